//! Barrier potentials confined to `[a, b]` and symmetric about `x_c`.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math::{abs, sqrt};
use crate::units::UnitsContext;

/// Relative tolerance for the mirror symmetry of sampled barriers.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Rectangular barrier of height `V0` on `[a, a + d]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectangularBarrier {
    height: f64,
    left: f64,
    width: f64,
}

impl RectangularBarrier {
    /// Checked constructor: `V0 > 0`, `a > 0`, `d > 0`.
    pub fn new(height: f64, left: f64, width: f64) -> Result<Self> {
        if !(height.is_finite() && height > 0.0) {
            return Err(invalid("V0", "barrier height must be positive and finite"));
        }
        Self::check_geometry(left, width)?;
        Ok(Self {
            height,
            left,
            width,
        })
    }

    fn check_geometry(left: f64, width: f64) -> Result<()> {
        if !(left.is_finite() && left > 0.0) {
            return Err(invalid("a", "left edge must be positive and finite"));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(invalid("d", "width must be positive and finite"));
        }
        Ok(())
    }

    /// Same geometry with another height. Zero or negative heights are
    /// accepted (free region, well); used for spin-shifted barriers.
    pub fn with_height(self, height: f64) -> Self {
        Self { height, ..self }
    }

    pub fn height(&self) -> f64 {
        self.height
    }
    pub fn left(&self) -> f64 {
        self.left
    }
    pub fn width(&self) -> f64 {
        self.width
    }
    pub fn right(&self) -> f64 {
        self.left + self.width
    }
    pub fn center(&self) -> f64 {
        self.left + 0.5 * self.width
    }
    /// `s = a + b`.
    pub fn edge_sum(&self) -> f64 {
        2.0 * self.left + self.width
    }

    /// Signed `kappa0^2 = 2 m V0 / hbar^2`.
    pub fn kappa0_sq(&self, units: UnitsContext) -> f64 {
        units.wavenumber_sq(self.height)
    }

    /// `kappa0 = sqrt(2 m V0)/hbar` (zero for non-positive heights).
    pub fn kappa0(&self, units: UnitsContext) -> f64 {
        sqrt(self.kappa0_sq(units).max(0.0))
    }

    pub fn potential_at(&self, x: f64) -> f64 {
        if x >= self.left && x <= self.right() {
            self.height
        } else {
            0.0
        }
    }
}

/// Symmetric barrier given by samples on a uniform grid covering `[a, b]`,
/// linearly interpolated in between and exactly zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSymmetricBarrier {
    left: f64,
    width: f64,
    values: Vec<f64>,
}

impl SampledSymmetricBarrier {
    /// Builds from potential values at `n >= 2` equally spaced points from
    /// `a` to `a + d` inclusive. Values are checked for mirror symmetry and
    /// then averaged with their mirror images so parity holds exactly.
    pub fn new(left: f64, width: f64, values: Vec<f64>) -> Result<Self> {
        RectangularBarrier::check_geometry(left, width)?;
        if values.len() < 2 {
            return Err(invalid("samples", "need at least two samples"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("samples", "potential values must be finite"));
        }
        let scale = values.iter().fold(0.0f64, |m, v| m.max(abs(*v)));
        let n = values.len();
        for i in 0..n / 2 {
            let dev = abs(values[i] - values[n - 1 - i]);
            if dev > SYMMETRY_TOLERANCE * scale {
                return Err(Error::AsymmetricBarrier {
                    index: i,
                    deviation: dev,
                });
            }
        }
        let values = (0..n)
            .map(|i| 0.5 * (values[i] + values[n - 1 - i]))
            .collect();
        Ok(Self {
            left,
            width,
            values,
        })
    }

    /// Builds from `(x, V)` pairs that must form a uniform grid from `a` to `b`.
    pub fn from_samples(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid("samples", "need at least two samples"));
        }
        let left = samples[0].0;
        let right = samples[samples.len() - 1].0;
        let width = right - left;
        if !(width > 0.0) {
            return Err(invalid("samples", "positions must increase"));
        }
        let step = width / (samples.len() - 1) as f64;
        for (i, (x, _)) in samples.iter().enumerate() {
            let expected = left + step * i as f64;
            if abs(x - expected) > 1e-9 * step.max(abs(expected)) {
                return Err(invalid("samples", "positions must form a uniform grid"));
            }
        }
        Self::new(left, width, samples.iter().map(|s| s.1).collect())
    }

    /// Samples `profile(x)` at `n` uniform points on `[a, a + d]`.
    pub fn from_fn(left: f64, width: f64, n: usize, profile: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid("samples", "need at least two samples"));
        }
        let step = width / (n - 1) as f64;
        Self::new(
            left,
            width,
            (0..n).map(|i| profile(left + step * i as f64)).collect(),
        )
    }

    pub fn left(&self) -> f64 {
        self.left
    }
    pub fn width(&self) -> f64 {
        self.width
    }
    pub fn right(&self) -> f64 {
        self.left + self.width
    }
    pub fn center(&self) -> f64 {
        self.left + 0.5 * self.width
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn step(&self) -> f64 {
        self.width / (self.values.len() - 1) as f64
    }

    /// Sample positions.
    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.step();
        (0..self.values.len()).map(move |i| self.left + h * i as f64)
    }

    pub fn potential_at(&self, x: f64) -> f64 {
        if !(x >= self.left && x <= self.right()) {
            return 0.0;
        }
        let n = self.values.len();
        let t = (x - self.left) / self.step();
        let i = (t as usize).min(n - 2);
        let f = t - i as f64;
        self.values[i] + f * (self.values[i + 1] - self.values[i])
    }

    /// Same barrier with every sample shifted by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            left: self.left,
            width: self.width,
            values: self.values.iter().map(|v| v + delta).collect(),
        }
    }
}

/// Any supported symmetric barrier.
#[derive(Debug, Clone, PartialEq)]
pub enum Barrier {
    Rectangular(RectangularBarrier),
    Sampled(SampledSymmetricBarrier),
}

impl From<RectangularBarrier> for Barrier {
    fn from(b: RectangularBarrier) -> Self {
        Barrier::Rectangular(b)
    }
}

impl From<SampledSymmetricBarrier> for Barrier {
    fn from(b: SampledSymmetricBarrier) -> Self {
        Barrier::Sampled(b)
    }
}

impl Barrier {
    pub fn left(&self) -> f64 {
        match self {
            Barrier::Rectangular(b) => b.left(),
            Barrier::Sampled(b) => b.left(),
        }
    }
    pub fn width(&self) -> f64 {
        match self {
            Barrier::Rectangular(b) => b.width(),
            Barrier::Sampled(b) => b.width(),
        }
    }
    pub fn right(&self) -> f64 {
        self.left() + self.width()
    }
    pub fn center(&self) -> f64 {
        self.left() + 0.5 * self.width()
    }

    pub fn potential_at(&self, x: f64) -> f64 {
        match self {
            Barrier::Rectangular(b) => b.potential_at(x),
            Barrier::Sampled(b) => b.potential_at(x),
        }
    }

    /// Largest potential value on `[a, b]`.
    pub fn max_potential(&self) -> f64 {
        match self {
            Barrier::Rectangular(b) => b.height(),
            Barrier::Sampled(b) => b.values().iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)),
        }
    }

    /// The barrier with `delta` added to the potential inside `[a, b]` only.
    pub fn shifted(&self, delta: f64) -> Barrier {
        match self {
            Barrier::Rectangular(b) => Barrier::Rectangular(b.with_height(b.height() + delta)),
            Barrier::Sampled(b) => Barrier::Sampled(b.shifted(delta)),
        }
    }

    pub fn as_rectangular(&self) -> Option<&RectangularBarrier> {
        match self {
            Barrier::Rectangular(b) => Some(b),
            Barrier::Sampled(_) => None,
        }
    }

    /// Stable 64-bit FNV-1a hash of the barrier description, used as a cache key.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |bits: u64| {
            for byte in bits.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        match self {
            Barrier::Rectangular(b) => {
                feed(1);
                feed(b.height().to_bits());
                feed(b.left().to_bits());
                feed(b.width().to_bits());
            }
            Barrier::Sampled(b) => {
                feed(2);
                feed(b.left().to_bits());
                feed(b.width().to_bits());
                feed(b.values().len() as u64);
                for v in b.values() {
                    feed(v.to_bits());
                }
            }
        }
        h
    }
}

/// Energy regime relative to a rectangular barrier top.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `E < V0`: evanescent interior, `kappa = sqrt(2m(V0 - E))/hbar`.
    UnderBarrier,
    /// `E > V0`: oscillating interior, `kappa = sqrt(2m(E - V0))/hbar`.
    OverBarrier,
    /// `E = V0` to rounding: linear interior, `kappa = 0`.
    Degenerate,
}

/// Interior wavenumber together with its regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa {
    pub value: f64,
    pub regime: Regime,
    /// Signed `kappa0^2 - k^2`: `kappa^2` under the barrier, `-kappa^2` above it.
    pub signed_sq: f64,
}

/// `kappa = sqrt(2m|V0 - E|)/hbar` with its regime flag.
///
/// Energies within a few ulps of the barrier top are flagged
/// [`Regime::Degenerate`], since `k = sqrt(2 m V0)/hbar` itself can only be
/// represented to rounding.
pub fn kappa_of(barrier: &RectangularBarrier, k: f64, units: UnitsContext) -> Result<Kappa> {
    if !(k.is_finite() && k > 0.0) {
        return Err(invalid("k", "wavenumber must be positive and finite"));
    }
    Ok(kappa_from_sq(barrier.kappa0_sq(units), k))
}

pub(crate) fn kappa_from_sq(kappa0_sq: f64, k: f64) -> Kappa {
    let k2 = k * k;
    let z = kappa0_sq - k2;
    let scale = abs(kappa0_sq).max(k2);
    if abs(z) <= 4.0 * f64::EPSILON * scale {
        Kappa {
            value: 0.0,
            regime: Regime::Degenerate,
            signed_sq: 0.0,
        }
    } else if z > 0.0 {
        Kappa {
            value: sqrt(z),
            regime: Regime::UnderBarrier,
            signed_sq: z,
        }
    } else {
        Kappa {
            value: sqrt(-z),
            regime: Regime::OverBarrier,
            signed_sq: z,
        }
    }
}
