//! Odd/even interior solutions `u`, `v` of the stationary equation on the
//! barrier, in the local coordinate `xi = x - x_c`.

use alloc::vec::Vec;

use crate::barrier::{kappa_from_sq, Barrier, RectangularBarrier, Regime, SampledSymmetricBarrier};
use crate::error::{invalid, Result};
use crate::math::{cos, cosh, sin, sinh};
use crate::ode::{integrate, OdeSettings};
use crate::units::UnitsContext;

/// One integration node of a numerically solved basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSample {
    pub xi: f64,
    pub u: f64,
    pub du: f64,
    pub v: f64,
    pub dv: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// `u = sinh(kappa xi)`, `v = cosh(kappa xi)`.
    Hyperbolic(f64),
    /// `u = sin(kappa xi)`, `v = cos(kappa xi)`.
    Trigonometric(f64),
    /// `u = xi`, `v = 1` (interior energy exactly at the barrier top).
    Linear,
    /// Samples on `[0, d/2]`, with `q = 2m(V - E)/hbar^2` at each node.
    Numeric { samples: Vec<BasisSample>, q: Vec<f64> },
}

/// Odd solution `u` and even solution `v` with constant Wronskian
/// `W = u' v - v' u`.
///
/// Analytic rectangular bases use `u = sinh(kappa xi)` / `sin(kappa xi)`, so
/// `W = kappa`; numeric bases start from `u(0) = 0, u'(0) = 1, v(0) = 1,
/// v'(0) = 0`, so `W = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierBasis {
    energy_k: f64,
    half_width: f64,
    wronskian: f64,
    repr: Repr,
}

impl BarrierBasis {
    /// Magnitude of the wavenumber the basis was built for.
    pub fn k(&self) -> f64 {
        self.energy_k
    }
    pub fn half_width(&self) -> f64 {
        self.half_width
    }
    pub fn wronskian(&self) -> f64 {
        self.wronskian
    }
    pub fn is_analytic(&self) -> bool {
        !matches!(self.repr, Repr::Numeric { .. })
    }

    /// Integration nodes of a numeric basis (empty for analytic ones).
    pub fn samples(&self) -> &[BasisSample] {
        match &self.repr {
            Repr::Numeric { samples, .. } => samples,
            _ => &[],
        }
    }

    /// `(u, u', v, v')` at `xi`, using parity for `xi < 0`.
    pub fn eval(&self, xi: f64) -> (f64, f64, f64, f64) {
        let s = xi.abs();
        let (u, du, v, dv) = self.eval_nonneg(s);
        if xi < 0.0 {
            (-u, du, v, -dv)
        } else {
            (u, du, v, dv)
        }
    }

    /// Values at the right edge `xi = d/2`.
    pub fn at_edge(&self) -> (f64, f64, f64, f64) {
        match &self.repr {
            Repr::Numeric { samples, .. } => {
                let s = samples[samples.len() - 1];
                (s.u, s.du, s.v, s.dv)
            }
            _ => self.eval_nonneg(self.half_width),
        }
    }

    fn eval_nonneg(&self, s: f64) -> (f64, f64, f64, f64) {
        match &self.repr {
            Repr::Hyperbolic(kp) => {
                let (sh, ch) = (sinh(kp * s), cosh(kp * s));
                (sh, kp * ch, ch, kp * sh)
            }
            Repr::Trigonometric(kp) => {
                let (sn, cs) = (sin(kp * s), cos(kp * s));
                (sn, kp * cs, cs, -kp * sn)
            }
            Repr::Linear => (s, 1.0, 1.0, 0.0),
            Repr::Numeric { samples, q } => hermite(samples, q, s),
        }
    }

    /// Multiplies `u` by `cu` and `v` by `cv` (the Wronskian scales by `cu cv`).
    pub fn rescaled(&self, cu: f64, cv: f64) -> BarrierBasis {
        let samples: Vec<BasisSample> = match &self.repr {
            Repr::Numeric { samples, .. } => samples.clone(),
            _ => {
                let n = 801;
                (0..n)
                    .map(|i| {
                        let xi = self.half_width * i as f64 / (n - 1) as f64;
                        let (u, du, v, dv) = self.eval_nonneg(xi);
                        BasisSample { xi, u, du, v, dv }
                    })
                    .collect()
            }
        };
        let q = match &self.repr {
            Repr::Numeric { q, .. } => q.clone(),
            Repr::Hyperbolic(kp) => alloc::vec![kp * kp; samples.len()],
            Repr::Trigonometric(kp) => alloc::vec![-kp * kp; samples.len()],
            Repr::Linear => alloc::vec![0.0; samples.len()],
        };
        let samples = samples
            .into_iter()
            .map(|s| BasisSample {
                xi: s.xi,
                u: cu * s.u,
                du: cu * s.du,
                v: cv * s.v,
                dv: cv * s.dv,
            })
            .collect();
        BarrierBasis {
            energy_k: self.energy_k,
            half_width: self.half_width,
            wronskian: self.wronskian * cu * cv,
            repr: Repr::Numeric { samples, q },
        }
    }
}

/// Quintic Hermite interpolation using `f'' = q f` and `f''' = q' f + q f'`
/// at both interval ends; `q` is linear inside each interval.
fn hermite(samples: &[BasisSample], q: &[f64], s: f64) -> (f64, f64, f64, f64) {
    let n = samples.len();
    let j = match samples.binary_search_by(|p| p.xi.partial_cmp(&s).unwrap()) {
        Ok(j) => {
            let p = samples[j];
            return (p.u, p.du, p.v, p.dv);
        }
        Err(0) => 0,
        Err(j) if j >= n => n - 2,
        Err(j) => j - 1,
    };
    let (p0, p1) = (samples[j], samples[j + 1]);
    let h = p1.xi - p0.xi;
    let (q0, q1) = (q[j], q[j + 1]);
    let dq = (q1 - q0) / h;
    let t = (s - p0.xi) / h;
    let u = quintic(t, h, [p0.u, p0.du, q0 * p0.u], [p1.u, p1.du, q1 * p1.u]);
    let du = quintic(
        t,
        h,
        [p0.du, q0 * p0.u, dq * p0.u + q0 * p0.du],
        [p1.du, q1 * p1.u, dq * p1.u + q1 * p1.du],
    );
    let v = quintic(t, h, [p0.v, p0.dv, q0 * p0.v], [p1.v, p1.dv, q1 * p1.v]);
    let dv = quintic(
        t,
        h,
        [p0.dv, q0 * p0.v, dq * p0.v + q0 * p0.dv],
        [p1.dv, q1 * p1.v, dq * p1.v + q1 * p1.dv],
    );
    (u, du, v, dv)
}

/// Quintic Hermite interpolant on `[0, 1]` from value, first and second
/// derivative (with respect to the physical coordinate) at both ends.
fn quintic(t: f64, h: f64, a: [f64; 3], b: [f64; 3]) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h20 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h21 = 0.5 * (t3 - 2.0 * t4 + t5);
    h00 * a[0] + h10 * h * a[1] + h20 * h * h * a[2] + h01 * b[0] + h11 * h * b[1] + h21 * h * h * b[2]
}

/// Interior basis at wavenumber `k` (only `k^2` matters): analytic for
/// rectangular barriers, ODE integration for sampled ones.
pub fn solve_basis(
    barrier: &Barrier,
    k: f64,
    units: UnitsContext,
    settings: &OdeSettings,
) -> Result<BarrierBasis> {
    match barrier {
        Barrier::Rectangular(b) => analytic_basis(b, k, units),
        Barrier::Sampled(_) => solve_basis_numeric(barrier, k, units, settings),
    }
}

fn analytic_basis(b: &RectangularBarrier, k: f64, units: UnitsContext) -> Result<BarrierBasis> {
    if !k.is_finite() {
        return Err(invalid("k", "wavenumber must be finite"));
    }
    let kap = kappa_from_sq(b.kappa0_sq(units), k.abs());
    let (repr, w) = match kap.regime {
        Regime::UnderBarrier => (Repr::Hyperbolic(kap.value), kap.value),
        Regime::OverBarrier => (Repr::Trigonometric(kap.value), kap.value),
        Regime::Degenerate => (Repr::Linear, 1.0),
    };
    Ok(BarrierBasis {
        energy_k: k.abs(),
        half_width: 0.5 * b.width(),
        wronskian: w,
        repr,
    })
}

/// Interior basis by adaptive Runge–Kutta integration from `x_c` to `b`,
/// with `u(0) = 0, u'(0) = 1, v(0) = 1, v'(0) = 0` (so `W = 1`). Works for
/// rectangular barriers too, which makes it an oracle for the closed forms.
pub fn solve_basis_numeric(
    barrier: &Barrier,
    k: f64,
    units: UnitsContext,
    settings: &OdeSettings,
) -> Result<BarrierBasis> {
    if !k.is_finite() {
        return Err(invalid("k", "wavenumber must be finite"));
    }
    let xc = barrier.center();
    let h = 0.5 * barrier.width();
    let e_sq = k * k;
    let qf = |xi: f64| units.wavenumber_sq(interior_potential(barrier, xc + xi)) - e_sq;
    let breaks: Vec<f64> = match barrier {
        Barrier::Rectangular(_) => Vec::new(),
        Barrier::Sampled(s) => sampled_breaks(s, xc),
    };
    let pts = integrate(
        |xi, y: &[f64; 4]| {
            let q = qf(xi);
            [y[1], q * y[0], y[3], q * y[2]]
        },
        0.0,
        [0.0, 1.0, 1.0, 0.0],
        h,
        &breaks,
        settings,
    )
    .map_err(|e| match e {
        crate::Error::OdeFailure { position, reason } => crate::Error::OdeFailure {
            position: position + xc,
            reason,
        },
        other => other,
    })?;
    let n = pts.len();
    let mut samples = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    for (xi, y) in &pts {
        samples.push(BasisSample {
            xi: *xi,
            u: y[0],
            du: y[1],
            v: y[2],
            dv: y[3],
        });
        q.push(qf(*xi));
    }
    Ok(BarrierBasis {
        energy_k: k.abs(),
        half_width: h,
        wronskian: 1.0,
        repr: Repr::Numeric { samples, q },
    })
}

/// Potential inside the closed interval `[a, b]`, so that the endpoint
/// values of the barrier are used at `xi = d/2` rather than the outside zero.
fn interior_potential(barrier: &Barrier, x: f64) -> f64 {
    let x = x.clamp(barrier.left(), barrier.right());
    barrier.potential_at(x)
}

fn sampled_breaks(s: &SampledSymmetricBarrier, xc: f64) -> Vec<f64> {
    s.positions().map(|x| x - xc).filter(|xi| *xi > 0.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const U: UnitsContext = UnitsContext::NATURAL;

    #[test]
    fn wronskian_constant_on_numeric_basis() {
        let b = Barrier::from(
            SampledSymmetricBarrier::from_fn(5.0, 2.0, 201, |x| {
                let t = x - 6.0;
                1.5 * (1.0 - t * t)
            })
            .unwrap(),
        );
        let basis = solve_basis(&b, 0.8, U, &OdeSettings::default()).unwrap();
        for s in basis.samples() {
            let w = s.du * s.v - s.dv * s.u;
            assert!((w - 1.0).abs() < 1e-9, "W = {w} at {}", s.xi);
        }
        for i in 0..50 {
            let xi = -1.0 + 2.0 * i as f64 / 49.0;
            let (u, du, v, dv) = basis.eval(xi);
            assert!((du * v - dv * u - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn free_interior_is_trigonometric() {
        let b = Barrier::from(SampledSymmetricBarrier::new(2.0, 3.0, alloc::vec![0.0; 31]).unwrap());
        let k = 1.3;
        let basis = solve_basis(&b, k, U, &OdeSettings::default()).unwrap();
        for i in 0..40 {
            let xi = -1.5 + 3.0 * i as f64 / 39.0;
            let (u, du, v, dv) = basis.eval(xi);
            assert!((u - libm::sin(k * xi) / k).abs() < 1e-10);
            assert!((du - libm::cos(k * xi)).abs() < 1e-10);
            assert!((v - libm::cos(k * xi)).abs() < 1e-10);
            assert!((dv + k * libm::sin(k * xi)).abs() < 1e-10);
        }
    }

    #[test]
    fn numeric_matches_analytic_rectangle() {
        for &(v0, k) in &[(1.0, 1.0), (1.0, 1.9), (0.5, 0.3), (1.0, 2f64.sqrt())] {
            let r = RectangularBarrier::new(v0, 10.0, 1.0).unwrap();
            let b = Barrier::from(r);
            let an = solve_basis(&b, k, U, &OdeSettings::default()).unwrap();
            let nu = solve_basis_numeric(&b, k, U, &OdeSettings::default()).unwrap();
            let w = an.wronskian();
            for i in 0..=20 {
                let xi = 0.5 * i as f64 / 20.0;
                let (ua, dua, va, dva) = an.eval(xi);
                let (un, dun, vn, dvn) = nu.eval(xi);
                // analytic u has u'(0) = W, numeric has u'(0) = 1
                assert!((ua / w - un).abs() <= 1e-8 * un.abs().max(1e-3));
                assert!((dua / w - dun).abs() <= 1e-8 * dun.abs());
                assert!((va - vn).abs() <= 1e-8 * vn.abs());
                assert!((dva - dvn).abs() <= 1e-8 * vn.abs());
            }
        }
    }
}
