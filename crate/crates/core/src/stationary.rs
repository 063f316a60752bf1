//! Stationary scattering at fixed `k`: boundary matching, outgoing and
//! incoming-split amplitudes, and the transmission/reflection pieces
//! `psi_tr`, `psi_ref` of the full wave function.

use alloc::vec::Vec;

use crate::barrier::Barrier;
use crate::basis::{solve_basis, BarrierBasis};
use crate::error::{invalid, Error, Result};
use crate::math::{abs, PI};
use crate::ode::OdeSettings;
use crate::params::TunnelingParams;
use crate::units::UnitsContext;
use crate::Complex;

/// Which wave function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Full,
    Transmission,
    Reflection,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Full, Channel::Transmission, Channel::Reflection];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Full => "full",
            Channel::Transmission => "tr",
            Channel::Reflection => "ref",
        }
    }
}

/// Everything obtained from sewing the interior basis to the outer plane waves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryAmplitudes {
    /// `Q = u'(b) + i k u(b)`.
    pub q: Complex,
    /// `P = v'(b) + i k v(b)`.
    pub p: Complex,
    pub a_out: Complex,
    pub b_out: Complex,
    /// Incoming amplitude of the transmission piece, `a_out* (a_out + b_out)`.
    pub a_in_tr: Complex,
    /// Incoming amplitude of the reflection piece, `b_out (b_out* - a_out*)`.
    pub a_in_ref: Complex,
    /// Interior `psi_full = a_full u + b_full v`.
    pub a_full: Complex,
    pub b_full: Complex,
    /// Interior `psi_tr = a_tr_left u + b_tr v` on `[a, x_c]`.
    pub a_tr_left: Complex,
    /// Interior `psi_tr = a_tr_right u + b_tr v` on `[x_c, b]` (equals `a_full`).
    pub a_tr_right: Complex,
    pub b_tr: Complex,
    /// Interior `psi_ref = alpha_ref u + beta_ref v` on `[a, x_c]`.
    pub alpha_ref: Complex,
    /// Even part of `psi_ref`; vanishes for the physical root, and is kept
    /// only as a diagnostic.
    pub beta_ref: Complex,
}

/// `(Q, P)` at the right barrier edge for wavenumber `k` (negative `k`
/// yields the complex conjugates).
pub fn boundary_qp(basis: &BarrierBasis, k: f64) -> (Complex, Complex) {
    let (u, du, v, dv) = basis.at_edge();
    (Complex::new(du, k * u), Complex::new(dv, k * v))
}

/// `a_out = (Q/Q* - P/P*)/2`, `b_out = -(Q/Q* + P/P*)/2`.
pub fn outgoing_amplitudes(q: Complex, p: Complex) -> Result<(Complex, Complex)> {
    let (qa, pa) = (q.norm(), p.norm());
    if !(qa >= 1e-300 && pa >= 1e-300) || !qa.is_finite() || !pa.is_finite() {
        return Err(Error::SingularMatching {
            q_abs: qa,
            p_abs: pa,
        });
    }
    let eq = q / q.conj();
    let ep = p / p.conj();
    Ok((0.5 * (eq - ep), -0.5 * (eq + ep)))
}

/// `T = |a_out|^2`, `R = |b_out|^2`, `J = arg(a_out)` and the flag `F`:
/// `F = 0` when `sign(k) Re(Q P*) > 0`, `F = pi` when it is negative. On a
/// tie (zero to rounding) `F = 0` for `k >= 0` (and `pi` for `k < 0`, preserving `F(-k) = pi - F(k)`).
pub fn params_from_amplitudes(
    k: f64,
    a_out: Complex,
    b_out: Complex,
    q: Complex,
    p: Complex,
) -> TunnelingParams {
    let mut s = (q * p.conj()).re;
    // within rounding of zero counts as a tie
    if abs(s) <= 8.0 * f64::EPSILON * q.norm() * p.norm() {
        s = 0.0;
    }
    let flip = if k > 0.0 {
        if s >= 0.0 { 0.0 } else { PI }
    } else if k < 0.0 {
        if s < 0.0 { 0.0 } else { PI }
    } else {
        0.0
    };
    TunnelingParams {
        k,
        transmission: a_out.norm_sqr(),
        reflection: b_out.norm_sqr(),
        phase: a_out.arg(),
        flip,
    }
}

/// Incoming split `(A_in_tr, A_in_ref)` with `A_in_tr + A_in_ref = 1`.
pub fn incoming_splits(a_out: Complex, b_out: Complex) -> (Complex, Complex) {
    let a_tr = a_out.conj() * (a_out + b_out);
    let a_ref = b_out * (b_out.conj() - a_out.conj());
    (a_tr, a_ref)
}

/// Relative tolerance on the even component of `psi_ref`, measured against
/// the size of the terms that cancel in it.
pub const NODE_TOLERANCE: f64 = 1e-10;

/// Stationary solution at one wavenumber, able to evaluate `psi_full`,
/// `psi_tr` and `psi_ref` (with derivatives) anywhere on the line.
///
/// Outside the barrier:
/// `psi_full = e^{ikx} + b_out e^{ik(2a-x)}` for `x <= a` and
/// `a_out e^{ik(x-d)}` for `x >= b`;
/// `psi_tr = A_in_tr e^{ikx}` on the left and equals `psi_full` on the right;
/// `psi_ref = A_in_ref e^{ikx} + b_out e^{ik(2a-x)}` on the left and
/// vanishes identically for `x >= x_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarySolution {
    k: f64,
    left: f64,
    width: f64,
    units: UnitsContext,
    basis: BarrierBasis,
    amps: BoundaryAmplitudes,
    params: TunnelingParams,
}

impl StationarySolution {
    pub fn new(
        barrier: &Barrier,
        k: f64,
        units: UnitsContext,
        settings: &OdeSettings,
    ) -> Result<Self> {
        let basis = solve_basis(barrier, k, units, settings)?;
        Self::from_basis(barrier, k, units, basis)
    }

    /// Builds the solution on a precomputed basis (which must belong to
    /// `barrier` at energy `k^2`).
    pub fn from_basis(
        barrier: &Barrier,
        k: f64,
        units: UnitsContext,
        basis: BarrierBasis,
    ) -> Result<Self> {
        if !k.is_finite() {
            return Err(invalid("k", "wavenumber must be finite"));
        }
        let (q, p) = boundary_qp(&basis, k);
        let (a_out, b_out) = outgoing_amplitudes(q, p)?;
        let (a_in_tr, a_in_ref) = incoming_splits(a_out, b_out);
        let a = barrier.left();
        let w = basis.wronskian();
        let ph = Complex::from_polar(1.0 / w, k * a);
        let amps = BoundaryAmplitudes {
            q,
            p,
            a_out,
            b_out,
            a_in_tr,
            a_in_ref,
            a_full: -p.conj() * a_out * ph,
            b_full: q.conj() * a_out * ph,
            a_tr_left: p * a_in_tr * ph,
            a_tr_right: -p.conj() * a_out * ph,
            b_tr: q * a_in_tr * ph,
            alpha_ref: (a_in_ref * p + b_out * p.conj()) * ph,
            beta_ref: (a_in_ref * q + b_out * q.conj()) * ph,
        };
        let scale = 1.0f64.max(q.norm() * (a_in_ref.norm() + b_out.norm()) / abs(w));
        let residual = amps.beta_ref.norm();
        if !(residual <= NODE_TOLERANCE * scale) {
            return Err(Error::DecompositionFailure {
                residual,
                tolerance: NODE_TOLERANCE * scale,
            });
        }
        let params = params_from_amplitudes(k, a_out, b_out, q, p);
        Ok(Self {
            k,
            left: barrier.left(),
            width: barrier.width(),
            units,
            basis,
            amps,
            params,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn units(&self) -> UnitsContext {
        self.units
    }
    pub fn amplitudes(&self) -> &BoundaryAmplitudes {
        &self.amps
    }
    pub fn params(&self) -> TunnelingParams {
        self.params
    }
    pub fn basis(&self) -> &BarrierBasis {
        &self.basis
    }
    pub fn left(&self) -> f64 {
        self.left
    }
    pub fn right(&self) -> f64 {
        self.left + self.width
    }
    pub fn center(&self) -> f64 {
        self.left + 0.5 * self.width
    }

    /// `|psi_ref(x_c)|` computed from the genuine even coefficient.
    pub fn node_residual(&self) -> f64 {
        let (_, _, v, _) = self.basis.eval(0.0);
        (self.amps.beta_ref * v).norm()
    }

    /// `(psi, dpsi/dx)` of one channel at `x`.
    pub fn eval(&self, channel: Channel, x: f64) -> (Complex, Complex) {
        let v = self.eval_all(x);
        match channel {
            Channel::Full => v[0],
            Channel::Transmission => v[1],
            Channel::Reflection => v[2],
        }
    }

    /// `[(psi, psi')]` for full, transmission and reflection at `x`.
    pub fn eval_all(&self, x: f64) -> [(Complex, Complex); 3] {
        let k = self.k;
        let a = self.left;
        let b = self.right();
        let ik = Complex::new(0.0, k);
        let m = &self.amps;
        if x <= a {
            let inc = Complex::from_polar(1.0, k * x);
            let refl = m.b_out * Complex::from_polar(1.0, k * (2.0 * a - x));
            let tr = m.a_in_tr * inc;
            let rf = m.a_in_ref * inc + refl;
            [
                (inc + refl, ik * (inc - refl)),
                (tr, ik * tr),
                (rf, ik * (m.a_in_ref * inc - refl)),
            ]
        } else if x >= b {
            let out = m.a_out * Complex::from_polar(1.0, k * (x - self.width));
            let zero = Complex::new(0.0, 0.0);
            [(out, ik * out), (out, ik * out), (zero, zero)]
        } else {
            let xi = x - self.center();
            let (u, du, v, dv) = self.basis.eval(xi);
            let full = (m.a_full * u + m.b_full * v, m.a_full * du + m.b_full * dv);
            if xi < 0.0 {
                let tr = (m.a_tr_left * u + m.b_tr * v, m.a_tr_left * du + m.b_tr * dv);
                let rf = (m.alpha_ref * u, m.alpha_ref * du);
                [full, tr, rf]
            } else {
                let tr = (m.a_tr_right * u + m.b_full * v, m.a_tr_right * du + m.b_full * dv);
                let zero = Complex::new(0.0, 0.0);
                [full, tr, (zero, zero)]
            }
        }
    }

    /// Samples `psi_full` on `xgrid`.
    pub fn stationary_full(&self, xgrid: &[f64]) -> Vec<Complex> {
        xgrid.iter().map(|&x| self.eval(Channel::Full, x).0).collect()
    }

    /// Samples all three wave functions and their fluxes on `xgrid`.
    pub fn decompose(&self, xgrid: &[f64]) -> Result<StationaryDecomposition> {
        let mut d = StationaryDecomposition {
            k: self.k,
            transmission: self.params.transmission,
            node_residual: self.node_residual(),
            x: xgrid.to_vec(),
            psi_full: Vec::with_capacity(xgrid.len()),
            psi_tr: Vec::with_capacity(xgrid.len()),
            psi_ref: Vec::with_capacity(xgrid.len()),
            flux_full: Vec::with_capacity(xgrid.len()),
            flux_tr: Vec::with_capacity(xgrid.len()),
            flux_ref: Vec::with_capacity(xgrid.len()),
        };
        for &x in xgrid {
            let [f, t, r] = self.eval_all(x);
            d.psi_full.push(f.0);
            d.psi_tr.push(t.0);
            d.psi_ref.push(r.0);
            d.flux_full.push(probability_flux(f.0, f.1, self.units));
            d.flux_tr.push(probability_flux(t.0, t.1, self.units));
            d.flux_ref.push(probability_flux(r.0, r.1, self.units));
        }
        let max_psi = d.psi_full.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let tol = NODE_TOLERANCE * max_psi.max(1.0);
        if d.node_residual > tol {
            return Err(Error::DecompositionFailure {
                residual: d.node_residual,
                tolerance: tol,
            });
        }
        Ok(d)
    }
}

/// Sampled `psi_full`, `psi_tr`, `psi_ref` and their probability fluxes at one `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDecomposition {
    pub k: f64,
    pub transmission: f64,
    /// `|psi_ref(x_c)|` from the genuine even coefficient.
    pub node_residual: f64,
    pub x: Vec<f64>,
    pub psi_full: Vec<Complex>,
    pub psi_tr: Vec<Complex>,
    pub psi_ref: Vec<Complex>,
    pub flux_full: Vec<f64>,
    pub flux_tr: Vec<f64>,
    pub flux_ref: Vec<f64>,
}

/// `(hbar/m) Im(psi* psi')`.
pub fn probability_flux(psi: Complex, dpsi: Complex, units: UnitsContext) -> f64 {
    units.hbar / units.mass * (psi.conj() * dpsi).im
}

/// Uniform grid of `n` points over `[a - pad, b + pad]`; the default padding
/// is four de Broglie wavelengths at `k`.
pub fn default_xgrid(barrier: &Barrier, k: f64, padding: Option<f64>, n: usize) -> Vec<f64> {
    let pad = padding.unwrap_or_else(|| 4.0 * 2.0 * PI / abs(k).max(1e-12));
    let lo = barrier.left() - pad;
    let hi = barrier.right() + pad;
    let n = n.max(2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Default number of grid points for [`default_xgrid`].
pub const DEFAULT_XGRID_POINTS: usize = 2048;
