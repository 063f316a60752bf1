//! Real tunneling parameters `(T, J, F)` and their closed forms for the
//! rectangular barrier.

use crate::barrier::{kappa_from_sq, RectangularBarrier, Regime};
use crate::error::{invalid, Result};
use crate::math::{abs, atan2, cos, cosh, sin, sinh, sqrt, FRAC_PI_2, PI};
use crate::units::UnitsContext;
use crate::Complex;

/// Transmission probability `T`, reflection probability `R`, scattering
/// phase `J` and the phase flag `F in {0, pi}` at wavenumber `k`.
///
/// The outgoing amplitudes are `a_out = sqrt(T) e^{iJ}` and
/// `b_out = sqrt(R) e^{i(J - F - pi/2)}`, where the transmitted wave beyond
/// the barrier is written `a_out e^{ik(x - d)}`; with that convention the
/// free-space phase is `J = kd`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunnelingParams {
    pub k: f64,
    pub transmission: f64,
    pub reflection: f64,
    pub phase: f64,
    pub flip: f64,
}

impl TunnelingParams {
    /// `(a_out, b_out)` rebuilt from the real parameters.
    pub fn amplitudes(&self) -> (Complex, Complex) {
        let a = Complex::from_polar(sqrt(self.transmission.max(0.0)), self.phase);
        let b = Complex::from_polar(
            sqrt(self.reflection.max(0.0)),
            self.phase - self.flip - FRAC_PI_2,
        );
        (a, b)
    }

    /// Parameters at `-k` from the parity relations
    /// `T(-k) = T(k)`, `J(-k) = -J(k)`, `F(-k) = pi - F(k)`.
    pub fn reversed(&self) -> Self {
        Self {
            k: -self.k,
            transmission: self.transmission,
            reflection: self.reflection,
            phase: -self.phase,
            flip: PI - self.flip,
        }
    }
}

/// Closed-form `(T, J, F)` for a rectangular barrier.
///
/// * `E < V0`: `T = 1/(1 + th+^2 sinh^2(kappa d))`, `J = arctan(th- tanh(kappa d))`, `F = 0`;
/// * `E > V0`: `T = 1/(1 + th-^2 sin^2(kappa d))`, `J = arg(cos(kappa d) + i th+ sin(kappa d))`,
///   `F = 0` if `th- sin(kappa d) >= 0` and `pi` otherwise;
/// * `E = V0`: the `kappa -> 0` limit `T = 1/(1 + (kappa0^2 d / 2k)^2)`, `J = arctan(kd/2)`, `F = 0`,
///
/// with `th± = (k/kappa ± kappa/k)/2`. The over-barrier `J` is taken on the
/// quadrant of `cos(kappa d)` so that it equals `arg(a_out)` continuously.
/// Negative `k` is mapped through the parity relations.
pub fn rect_tunneling_params(
    barrier: &RectangularBarrier,
    k: f64,
    units: UnitsContext,
) -> Result<TunnelingParams> {
    if !k.is_finite() || k == 0.0 {
        return Err(invalid("k", "wavenumber must be non-zero and finite"));
    }
    if k < 0.0 {
        return Ok(rect_tunneling_params(barrier, -k, units)?.reversed());
    }
    let d = barrier.width();
    let kappa0_sq = barrier.kappa0_sq(units);
    let kap = kappa_from_sq(kappa0_sq, k);
    let kk = kap.value;
    let (transmission, phase, flip) = match kap.regime {
        Regime::UnderBarrier => {
            let th_p = 0.5 * (k / kk + kk / k);
            let th_m = 0.5 * (k / kk - kk / k);
            let sh = sinh(kk * d);
            let t = 1.0 / (1.0 + th_p * th_p * sh * sh);
            (t, atan2(th_m * sh, cosh(kk * d)), 0.0)
        }
        Regime::OverBarrier => {
            let th_p = 0.5 * (k / kk + kk / k);
            let th_m = 0.5 * (k / kk - kk / k);
            let s = sin(kk * d);
            let t = 1.0 / (1.0 + th_m * th_m * s * s);
            // sin(kappa d) within rounding of zero is a resonance, where F is
            // arbitrary; treat it as the tie F = 0
            let f = if th_m * s >= 0.0 || abs(s) <= 8.0 * f64::EPSILON * kk * d { 0.0 } else { PI };
            (t, atan2(th_p * s, cos(kk * d)), f)
        }
        Regime::Degenerate => {
            let g = kappa0_sq * d / (2.0 * k);
            (1.0 / (1.0 + g * g), atan2(k * d, 2.0), 0.0)
        }
    };
    Ok(TunnelingParams {
        k,
        transmission,
        reflection: 1.0 - transmission,
        phase,
        flip,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const U: UnitsContext = UnitsContext::NATURAL;

    #[test]
    fn unit_barrier_at_k_equal_kappa() {
        let b = RectangularBarrier::new(1.0, 10.0, 1.0).unwrap();
        let p = rect_tunneling_params(&b, 1.0, U).unwrap();
        let sh = 1f64.sinh();
        assert!((p.transmission - 1.0 / (1.0 + sh * sh)).abs() < 1e-15);
        assert!(p.phase.abs() < 1e-15);
        assert_eq!(p.flip, 0.0);
        assert_eq!(p.transmission + p.reflection, 1.0);
    }

    #[test]
    fn over_barrier_resonance() {
        let k = 2f64.sqrt();
        let b = RectangularBarrier::new(0.5, 10.0, PI).unwrap();
        let p = rect_tunneling_params(&b, k, U).unwrap();
        assert!((p.transmission - 1.0).abs() < 1e-12);
        assert_eq!(p.flip, 0.0);
    }

    #[test]
    fn vanishing_height_is_free() {
        let b = RectangularBarrier::new(1e-14, 10.0, 1.3).unwrap();
        let p = rect_tunneling_params(&b, 0.7, U).unwrap();
        assert!((p.transmission - 1.0).abs() < 1e-12);
        assert!(p.reflection.abs() < 1e-12);
        assert!((p.phase - 0.7 * 1.3).abs() < 1e-12);
    }

    #[test]
    fn degenerate_matches_neighbours() {
        let b = RectangularBarrier::new(1.0, 10.0, 1.0).unwrap();
        let k0 = 2f64.sqrt();
        let p0 = rect_tunneling_params(&b, k0, U).unwrap();
        for dk in [1e-6, -1e-6] {
            let p = rect_tunneling_params(&b, k0 + dk, U).unwrap();
            assert!((p.transmission - p0.transmission).abs() < 1e-5);
            assert!((p.phase - p0.phase).abs() < 1e-5);
        }
    }

    #[test]
    fn amplitudes_round_trip() {
        let b = RectangularBarrier::new(1.0, 10.0, 2.0).unwrap();
        let p = rect_tunneling_params(&b, 1.7, U).unwrap();
        let (a, bo) = p.amplitudes();
        assert!((a.norm_sqr() + bo.norm_sqr() - 1.0).abs() < 1e-14);
        assert!((a.arg() - p.phase).abs() < 1e-14);
    }
}
