//! Gaussian wave packets built from the stationary solutions on a
//! Gauss–Legendre momentum grid, and packet-level Larmor times.

use alloc::vec::Vec;

use crate::barrier::Barrier;
use crate::error::{invalid, Error, Result};
use crate::math::{exp, ln, sqrt, PI};
use crate::ode::OdeSettings;
use crate::quadrature::{adaptive_simpson, boole, gauss_legendre_interval, simpson};
use crate::stationary::{Channel, StationarySolution};
use crate::times::{dwell_ref_rect, dwell_tr_rect, weighted_dwell};
use crate::units::UnitsContext;
use crate::Complex;

/// Packet kinds share the stationary channel labels.
pub type PacketKind = Channel;

/// Incident Gaussian `A_in(k) = c exp(-l0^2 (k - k0)^2) e^{-i k x0}` with
/// `c = (2 l0^2 / pi)^{1/4}`, so that `int |A_in|^2 dk = 1`. In position
/// space the packet is centred at `x0` with `<x^2> - <x>^2 = l0^2` and
/// `<p> = hbar k0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub k0: f64,
    pub l0: f64,
    pub x0: f64,
}

impl GaussianSpec {
    pub fn new(k0: f64, l0: f64, x0: f64) -> Result<Self> {
        if !(k0.is_finite() && k0 > 0.0) {
            return Err(invalid("k0", "central wavenumber must be positive"));
        }
        if !(l0.is_finite() && l0 > 0.0) {
            return Err(invalid("l0", "half-width must be positive"));
        }
        if !x0.is_finite() {
            return Err(invalid("x0", "launch position must be finite"));
        }
        Ok(Self { k0, l0, x0 })
    }

    pub fn norm_const(&self) -> f64 {
        sqrt(sqrt(2.0 * self.l0 * self.l0 / PI))
    }

    pub fn amplitude(&self, k: f64) -> Complex {
        let g = self.norm_const() * exp(-self.l0 * self.l0 * (k - self.k0) * (k - self.k0));
        Complex::from_polar(g, -k * self.x0)
    }

    /// `|A_in(k)|^2`.
    pub fn density(&self, k: f64) -> f64 {
        let c = self.norm_const();
        c * c * exp(-2.0 * self.l0 * self.l0 * (k - self.k0) * (k - self.k0))
    }

    /// `w(k) = |A_in(k)|^2 - |A_in(-k)|^2`.
    pub fn spectral_weight(&self, k: f64) -> f64 {
        self.density(k) - self.density(-k)
    }

    /// `k0 l0 >= 2`: the negative-momentum tail is perturbative.
    pub fn is_narrow_in_k(&self) -> bool {
        self.k0 * self.l0 >= 2.0
    }

    /// The packet starts at least six widths left of `a`.
    pub fn starts_clear_of(&self, barrier: &Barrier) -> bool {
        barrier.left() - self.x0 >= 6.0 * self.l0
    }

    /// Position spread at time `t` for free motion.
    pub fn spread_at(&self, t: f64, units: UnitsContext) -> f64 {
        let r = units.hbar * t / (2.0 * units.mass * self.l0 * self.l0);
        self.l0 * sqrt(1.0 + r * r)
    }
}

/// Gauss–Legendre nodes over the truncated momentum support.
#[derive(Debug, Clone, PartialEq)]
pub struct KGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Relative amplitude cutoff `|A_in(k)| >= truncation * max |A_in|`.
    pub truncation: f64,
}

impl KGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Minimum number of momentum nodes.
pub const MIN_K_NODES: usize = 64;

/// `n` Gauss–Legendre nodes on `[k0 - delta, k0 + delta]` with
/// `delta = sqrt(ln(1/eps)) / l0`, the interval on which `|A_in| >= eps max|A_in|`.
/// The interval extends to negative `k` when the Gaussian tail does.
pub fn build_kgrid(spec: &GaussianSpec, eps: f64, n: usize) -> Result<KGrid> {
    if n < MIN_K_NODES {
        return Err(invalid("n_k", "need at least 64 momentum nodes"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps_k", "cutoff must lie in (0, 1)"));
    }
    let delta = sqrt(ln(1.0 / eps)) / spec.l0;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::EmptySupport);
    }
    let (nodes, weights) = gauss_legendre_interval(n, spec.k0 - delta, spec.k0 + delta);
    if nodes.contains(&0.0) {
        return Err(invalid("n_k", "a node falls exactly on k = 0; change n_k"));
    }
    Ok(KGrid {
        nodes,
        weights,
        truncation: eps,
    })
}

/// Spatial grid made of uniform Simpson segments, split at chosen
/// breakpoints (typically `a`, `x_c`, `b`, where packet densities have
/// derivative jumps). Breakpoints appear once at the end of each segment and
/// again at the start of the next.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    segments: Vec<(f64, f64, usize)>,
}

impl SpatialGrid {
    /// A single uniform segment of `n` points.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(hi > lo) || n < 3 {
            return Err(invalid("grid", "need hi > lo and at least three points"));
        }
        Ok(Self {
            segments: alloc::vec![(lo, hi, n)],
        })
    }

    /// Segments with spacing at most `dx` (interval counts divisible by
    /// four), split at every
    /// breakpoint strictly inside `(lo, hi)`.
    pub fn with_spacing(lo: f64, hi: f64, dx: f64, breaks: &[f64]) -> Result<Self> {
        if !(dx > 0.0) || !(hi > lo) {
            return Err(invalid("grid", "need hi > lo and a positive spacing"));
        }
        let mut edges = alloc::vec![lo];
        let mut inner: Vec<f64> = breaks.iter().copied().filter(|b| *b > lo && *b < hi).collect();
        inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.extend(inner);
        edges.push(hi);
        let segments = edges
            .windows(2)
            .map(|w| {
                // interval count a multiple of four, for the Boole rule
                let m = libm::ceil((w[1] - w[0]) / dx) as usize;
                let m = m.max(4).div_ceil(4) * 4;
                (w[0], w[1], m + 1)
            })
            .collect();
        Ok(Self { segments })
    }

    pub fn lo(&self) -> f64 {
        self.segments[0].0
    }
    pub fn hi(&self) -> f64 {
        self.segments[self.segments.len() - 1].1
    }
    pub fn len(&self) -> usize {
        self.segments.iter().map(|s| s.2).sum()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn segments(&self) -> &[(f64, f64, usize)] {
        &self.segments
    }

    pub fn points(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for &(lo, hi, n) in &self.segments {
            let h = (hi - lo) / (n - 1) as f64;
            out.extend((0..n).map(|i| if i == n - 1 { hi } else { lo + h * i as f64 }));
        }
        out
    }

    /// Integral of values sampled at [`SpatialGrid::points`]: composite
    /// Boole rule on segments whose interval count is divisible by four,
    /// Simpson otherwise.
    pub fn integrate<T: crate::quadrature::Integrand>(&self, values: &[T]) -> T {
        let mut total = T::zero();
        let mut start = 0;
        for &(lo, hi, n) in &self.segments {
            let h = (hi - lo) / (n - 1) as f64;
            let seg = &values[start..start + n];
            total = total
                + if (n - 1).is_multiple_of(4) {
                    boole(seg, h)
                } else {
                    simpson(seg, h)
                };
            start += n;
        }
        total
    }
}

/// Which asymptote to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Asymptote {
    /// `(1/sqrt(2 pi)) int A_in(k) e^{i(kx - Et/hbar)} dk`.
    Incident,
    /// Free outgoing waves `a_out e^{ik(x-d)} + b_out e^{ik(2a-x)}`.
    Outgoing,
}

/// Spatial moments of a (renormalised) packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub norm: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub mean_x2: f64,
    pub spread: f64,
}

/// Result of a packet Larmor-time computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketTime {
    /// `T` (transmission) or `R` (reflection) spectral weight used as normaliser.
    pub weight: f64,
    pub time: f64,
    /// Time window actually integrated (equal to `(0, 0)` for the spectral route).
    pub window: (f64, f64),
}

/// Options for the time-integral Larmor route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeIntegralOptions {
    /// Window ends where barrier occupancy drops below `eps_t` times the weight.
    pub eps_t: f64,
    /// Relative tolerance of the doubling Simpson rule in time.
    pub rtol: f64,
    /// Spatial Simpson intervals per barrier half.
    pub x_intervals: usize,
}

impl Default for TimeIntegralOptions {
    fn default() -> Self {
        Self {
            eps_t: 1e-10,
            rtol: 1e-8,
            x_intervals: 128,
        }
    }
}

/// Wave packet `psi(x, t) = (1/sqrt(2 pi)) int A_in(k) psi(x; k) e^{-iE t/hbar} dk`
/// for the full, transmission and reflection stationary channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    barrier: Barrier,
    spec: GaussianSpec,
    kgrid: KGrid,
    units: UnitsContext,
    solutions: Vec<StationarySolution>,
    /// `w_j A_in(k_j) / sqrt(2 pi)`.
    static_coef: Vec<Complex>,
    /// `E_j / hbar`.
    frequencies: Vec<f64>,
}

impl Packet {
    pub fn new(
        barrier: &Barrier,
        spec: GaussianSpec,
        kgrid: KGrid,
        units: UnitsContext,
        ode: &OdeSettings,
    ) -> Result<Self> {
        let solutions = kgrid
            .nodes
            .iter()
            .map(|&k| StationarySolution::new(barrier, k, units, ode))
            .collect::<Result<Vec<_>>>()?;
        Self::from_solutions(barrier, spec, kgrid, units, solutions)
    }

    /// Assembles a packet from stationary solutions computed elsewhere (for
    /// example in parallel); they must be in node order and match each node
    /// exactly.
    pub fn from_solutions(
        barrier: &Barrier,
        spec: GaussianSpec,
        kgrid: KGrid,
        units: UnitsContext,
        solutions: Vec<StationarySolution>,
    ) -> Result<Self> {
        for (i, &k) in kgrid.nodes.iter().enumerate() {
            match solutions.get(i) {
                Some(s) if s.k().to_bits() == k.to_bits() => {}
                _ => return Err(Error::CacheMiss { k }),
            }
        }
        if solutions.len() != kgrid.nodes.len() {
            return Err(invalid("solutions", "one stationary solution per node expected"));
        }
        let norm = 1.0 / sqrt(2.0 * PI);
        let static_coef = kgrid
            .nodes
            .iter()
            .zip(&kgrid.weights)
            .map(|(&k, &w)| spec.amplitude(k) * (w * norm))
            .collect();
        let frequencies = kgrid.nodes.iter().map(|&k| units.energy(k) / units.hbar).collect();
        Ok(Self {
            barrier: barrier.clone(),
            spec,
            kgrid,
            units,
            solutions,
            static_coef,
            frequencies,
        })
    }

    pub fn barrier(&self) -> &Barrier {
        &self.barrier
    }
    pub fn spec(&self) -> &GaussianSpec {
        &self.spec
    }
    pub fn kgrid(&self) -> &KGrid {
        &self.kgrid
    }
    pub fn units(&self) -> UnitsContext {
        self.units
    }
    pub fn solutions(&self) -> &[StationarySolution] {
        &self.solutions
    }

    /// `c_j(t) = w_j A_in(k_j) e^{-iE_j t/hbar} / sqrt(2 pi)`.
    pub fn coefficients(&self, t: f64) -> Vec<Complex> {
        self.static_coef
            .iter()
            .zip(&self.frequencies)
            .map(|(c, f)| c * Complex::from_polar(1.0, -f * t))
            .collect()
    }

    /// `(psi, psi')` of all three channels at every `x`, summed over nodes in order.
    pub fn sample_all(&self, t: f64, xs: &[f64]) -> [Vec<(Complex, Complex)>; 3] {
        let c = self.coefficients(t);
        let zero = (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
        let mut out = [
            alloc::vec![zero; xs.len()],
            alloc::vec![zero; xs.len()],
            alloc::vec![zero; xs.len()],
        ];
        for (i, &x) in xs.iter().enumerate() {
            let mut acc = [zero; 3];
            for (cj, sol) in c.iter().zip(&self.solutions) {
                let v = sol.eval_all(x);
                for ch in 0..3 {
                    acc[ch].0 += cj * v[ch].0;
                    acc[ch].1 += cj * v[ch].1;
                }
            }
            for ch in 0..3 {
                out[ch][i] = acc[ch];
            }
        }
        out
    }

    /// Packet values of one channel at time `t`.
    pub fn sample(&self, kind: PacketKind, t: f64, xs: &[f64]) -> Vec<Complex> {
        self.sample_with_derivative(kind, t, xs).into_iter().map(|p| p.0).collect()
    }

    pub fn sample_with_derivative(&self, kind: PacketKind, t: f64, xs: &[f64]) -> Vec<(Complex, Complex)> {
        let c = self.coefficients(t);
        xs.iter()
            .map(|&x| {
                let mut acc = (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
                for (cj, sol) in c.iter().zip(&self.solutions) {
                    let (p, dp) = sol.eval(kind, x);
                    acc.0 += cj * p;
                    acc.1 += cj * dp;
                }
                acc
            })
            .collect()
    }

    /// Free in/out asymptotes of the full packet.
    pub fn asymptote(&self, which: Asymptote, t: f64, xs: &[f64]) -> Vec<Complex> {
        let c = self.coefficients(t);
        let a = self.barrier.left();
        let d = self.barrier.width();
        xs.iter()
            .map(|&x| {
                let mut acc = Complex::new(0.0, 0.0);
                for (cj, sol) in c.iter().zip(&self.solutions) {
                    let k = sol.k();
                    acc += cj
                        * match which {
                            Asymptote::Incident => Complex::from_polar(1.0, k * x),
                            Asymptote::Outgoing => {
                                let m = sol.amplitudes();
                                m.a_out * Complex::from_polar(1.0, k * (x - d))
                                    + m.b_out * Complex::from_polar(1.0, k * (2.0 * a - x))
                            }
                        };
                }
                acc
            })
            .collect()
    }

    /// `int |psi_kind(x, t)|^2 dx` on `grid`.
    pub fn norm(&self, kind: PacketKind, t: f64, grid: &SpatialGrid) -> f64 {
        let v: Vec<f64> = self.sample(kind, t, &grid.points()).iter().map(|z| z.norm_sqr()).collect();
        grid.integrate(&v)
    }

    /// `<psi_tr | psi_ref>` at time `t`.
    pub fn cross_overlap(&self, t: f64, grid: &SpatialGrid) -> Complex {
        let xs = grid.points();
        let s = self.sample_all(t, &xs);
        let v: Vec<Complex> = s[1].iter().zip(&s[2]).map(|(a, b)| a.0.conj() * b.0).collect();
        grid.integrate(&v)
    }

    /// Norm, `<x>`, `<p>`, `<x^2>` and spread of the renormalised packet.
    pub fn moments(&self, kind: PacketKind, t: f64, grid: &SpatialGrid) -> Moments {
        let xs = grid.points();
        let s = self.sample_with_derivative(kind, t, &xs);
        let rho: Vec<f64> = s.iter().map(|p| p.0.norm_sqr()).collect();
        let norm = grid.integrate(&rho);
        let xr: Vec<f64> = rho.iter().zip(&xs).map(|(r, x)| r * x).collect();
        let x2r: Vec<f64> = rho.iter().zip(&xs).map(|(r, x)| r * x * x).collect();
        let pr: Vec<f64> = s.iter().map(|p| (p.0.conj() * p.1).im).collect();
        let mean_x = grid.integrate(&xr) / norm;
        let mean_x2 = grid.integrate(&x2r) / norm;
        let mean_p = self.units.hbar * grid.integrate(&pr) / norm;
        let var = (mean_x2 - mean_x * mean_x).max(0.0);
        Moments {
            norm,
            mean_x,
            mean_p,
            mean_x2,
            spread: sqrt(var),
        }
    }

    /// Time-independent subensemble weights
    /// `T = int_{k>0} w(k) T(k) dk` and `R = int_{k>0} w(k) R(k) dk`.
    pub fn spectral_norms(&self) -> (f64, f64) {
        let mut t = 0.0;
        let mut r = 0.0;
        for ((k, w), sol) in self.kgrid.nodes.iter().zip(&self.kgrid.weights).zip(&self.solutions) {
            if *k > 0.0 {
                let p = sol.params();
                let ww = w * self.spec.spectral_weight(*k);
                t += ww * p.transmission;
                r += ww * p.reflection;
            }
        }
        (t, r)
    }

    /// Per-node `T tau_tr` (or `R tau_ref`, or the Smith time), closed form
    /// for rectangular barriers and quadrature otherwise.
    fn node_weighted_dwell(&self, kind: PacketKind, sol: &StationarySolution, rtol: f64) -> Result<f64> {
        match (&self.barrier, kind) {
            (Barrier::Rectangular(r), Channel::Transmission) => {
                Ok(sol.params().transmission * dwell_tr_rect(r, sol.k(), self.units)?)
            }
            (Barrier::Rectangular(r), Channel::Reflection) => {
                Ok(sol.params().reflection * dwell_ref_rect(r, sol.k(), self.units)?)
            }
            _ => weighted_dwell(sol, kind, rtol),
        }
    }

    /// Spectral average of the stationary dwell times,
    /// `(1/T) int_{k>0} w(k) T(k) tau_tr(k) dk` (and the reflection analogue).
    /// For `Full` the Smith time is averaged with unit weight.
    pub fn larmor_time_spectral(&self, kind: PacketKind, rtol: f64) -> Result<PacketTime> {
        let mut num = 0.0;
        for ((k, w), sol) in self.kgrid.nodes.iter().zip(&self.kgrid.weights).zip(&self.solutions) {
            if *k > 0.0 {
                num += w * self.spec.spectral_weight(*k) * self.node_weighted_dwell(kind, sol, rtol)?;
            }
        }
        let weight = self.kind_weight(kind)?;
        Ok(PacketTime {
            weight,
            time: num / weight,
            window: (0.0, 0.0),
        })
    }

    fn kind_weight(&self, kind: PacketKind) -> Result<f64> {
        let (t, r) = self.spectral_norms();
        let w = match kind {
            Channel::Full => t + r,
            Channel::Transmission => t,
            Channel::Reflection => r,
        };
        if !(w > 1e-300) {
            return Err(Error::DegenerateWeight {
                channel: kind.name(),
                weight: w,
            });
        }
        Ok(w)
    }

    /// Precomputes the channel's stationary values on barrier points for
    /// repeated occupancy evaluations.
    pub fn frame(&self, kind: PacketKind, x_intervals: usize) -> PacketFrame {
        PacketFrame::new(self, kind, x_intervals)
    }

    /// `(1/T) int dt int_a^b |psi_tr(x, t)|^2 dx` (reflection: `(1/R)`, over
    /// `[a, x_c]`). The window is doubled until the barrier occupancy at both
    /// ends is below `eps_t` times the weight.
    pub fn larmor_time_timeintegral(&self, kind: PacketKind, opts: &TimeIntegralOptions) -> Result<PacketTime> {
        let weight = self.kind_weight(kind)?;
        let frame = self.frame(kind, opts.x_intervals);
        let v0 = self.units.velocity(self.spec.k0);
        let arrival = ((self.barrier.center() - self.spec.x0) / v0).max(0.0);
        let mut t0 = 0.0f64.min(arrival - 1.0);
        let mut t1 = 2.0 * arrival + 1.0;
        let limit = opts.eps_t * weight;
        let mut grown = 0;
        loop {
            let o0 = frame.occupancy(t0);
            let o1 = frame.occupancy(t1);
            if o0 <= limit && o1 <= limit {
                break;
            }
            grown += 1;
            if grown > 40 {
                return Err(Error::WindowFailure {
                    start: t0,
                    end: t1,
                    occupancy: o0.max(o1),
                });
            }
            let span = t1 - t0;
            if o0 > limit {
                t0 -= span;
            }
            if o1 > limit {
                t1 += span;
            }
        }
        let integral = adaptive_simpson(|t| frame.occupancy(t), t0, t1, opts.rtol, 256)?;
        Ok(PacketTime {
            weight,
            time: integral / weight,
            window: (t0, t1),
        })
    }

    /// Time after which the transmitted and reflected packets, moving at the
    /// central velocity and spreading freely, sit at least `n_sigma` widths
    /// away from the barrier. Fails when the `n_sigma` edge spreads at least
    /// as fast as the centre moves, since the packets then never clear it.
    pub fn separation_time(&self, n_sigma: f64) -> Result<f64> {
        let v = self.units.velocity(self.spec.k0);
        let spread_speed = n_sigma * self.units.hbar / (2.0 * self.units.mass * self.spec.l0);
        if !(n_sigma >= 0.0) || spread_speed >= v {
            return Err(invalid("n_sigma", "packet edge spreads faster than the centre moves"));
        }
        let travel = self.barrier.right() - self.spec.x0;
        let mut t = travel / v;
        for _ in 0..10_000 {
            let need = (travel + n_sigma * self.spec.spread_at(t, self.units)) / v;
            if (need - t).abs() <= 1e-12 * t {
                return Ok(need);
            }
            t = need;
        }
        Ok(t)
    }

    /// A grid with spacing at most `dx`, split at `a`, `x_c`, `b`, wide
    /// enough to hold the packet at `t = 0` and both outgoing packets at `t_late`.
    pub fn covering_grid(&self, t_late: f64, n_sigma: f64, dx: f64) -> Result<SpatialGrid> {
        let v = self.units.velocity(self.spec.k0);
        let s0 = self.spec.l0;
        let s1 = self.spec.spread_at(t_late, self.units);
        let b = &self.barrier;
        let a = b.left();
        let lo = (self.spec.x0 - n_sigma * s0).min(2.0 * a - self.spec.x0 - v * t_late - n_sigma * s1);
        let hi = (b.right() + n_sigma * s1).max(self.spec.x0 + v * t_late + n_sigma * s1);
        SpatialGrid::with_spacing(lo, hi, dx, &[a, b.center(), b.right()])
    }
}

/// Stationary values of one channel on Simpson points of the barrier
/// region (`[a, b]`, or `[a, x_c]` for reflection), premultiplied by the
/// static packet coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketFrame {
    /// Row-major `[segment][point][node]`.
    values: Vec<Vec<Vec<Complex>>>,
    steps: Vec<f64>,
    frequencies: Vec<f64>,
}

impl PacketFrame {
    fn new(packet: &Packet, kind: PacketKind, x_intervals: usize) -> Self {
        let n = (x_intervals.max(2) + 1) | 1;
        let (a, c, b) = (packet.barrier.left(), packet.barrier.center(), packet.barrier.right());
        let segments: Vec<(f64, f64)> = match kind {
            Channel::Reflection => alloc::vec![(a, c)],
            _ => alloc::vec![(a, c), (c, b)],
        };
        let mut values = Vec::new();
        let mut steps = Vec::new();
        for (lo, hi) in segments {
            let h = (hi - lo) / (n - 1) as f64;
            steps.push(h);
            let rows = (0..n)
                .map(|i| {
                    // both channels are continuous at x_c, so either side may be used
                    let x = if i == n - 1 { hi } else { lo + h * i as f64 };
                    packet
                        .solutions
                        .iter()
                        .zip(&packet.static_coef)
                        .map(|(s, cj)| cj * s.eval(kind, x).0)
                        .collect()
                })
                .collect();
            values.push(rows);
        }
        Self {
            values,
            steps,
            frequencies: packet.frequencies.clone(),
        }
    }

    /// `int |psi(x, t)|^2 dx` over the frame region.
    pub fn occupancy(&self, t: f64) -> f64 {
        let phases: Vec<Complex> = self.frequencies.iter().map(|f| Complex::from_polar(1.0, -f * t)).collect();
        let mut total = 0.0;
        for (rows, h) in self.values.iter().zip(&self.steps) {
            let dens: Vec<f64> = rows
                .iter()
                .map(|row| {
                    let mut acc = Complex::new(0.0, 0.0);
                    for (v, p) in row.iter().zip(&phases) {
                        acc += v * p;
                    }
                    acc.norm_sqr()
                })
                .collect();
            total += simpson(&dens, *h);
        }
        total
    }
}
