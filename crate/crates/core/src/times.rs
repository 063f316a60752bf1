//! Characteristic times at fixed `k`: subensemble dwell times, the clock
//! offsets `tau_0`, `tau_z`, and the full-ensemble comparison times.

use crate::barrier::{kappa_from_sq, Barrier, RectangularBarrier, Regime};
use crate::error::{invalid, Error, Result};
use crate::math::{
    abs, acos, cos, cosh, cosh_minus_sinhc, coshc, sin, sinh, sinhc, sinhc_m1, wrap_angle,
    FRAC_PI_2,
};
use crate::ode::OdeSettings;
use crate::params::rect_tunneling_params;
use crate::quadrature::adaptive_simpson;
use crate::stationary::{Channel, StationarySolution};
use crate::units::UnitsContext;

/// Sign multiplying the oscillating terms in the over-barrier dwell-time
/// formulas. Fixed to `+1` by comparison with direct quadrature of the
/// dwell integrals (see the crate tests).
pub const OVER_BARRIER_BETA: f64 = 1.0;

/// Below this `|kappa d|` the rectangular formulas switch to forms built on
/// entire functions of `(kappa0^2 - k^2) d^2`, which stay regular at `E = V0`.
const SERIES_BAND: f64 = 0.1;

/// Probability-flux guard for the subensemble dwell times.
const FLUX_FLOOR: f64 = 1e-300;

/// Reflection weights below this are rounding noise of `|b_out|^2 ~ eps^2`
/// (a resonance), where `psi_ref` carries no information.
const REFLECTION_FLOOR: f64 = 1e-24;

/// Initial intervals per barrier half for the dwell quadratures.
const DWELL_INTERVALS: usize = 32;

fn integral_abs2(sol: &StationarySolution, channel: Channel, lo: f64, hi: f64, rtol: f64) -> Result<f64> {
    adaptive_simpson(|x| sol.eval(channel, x).0.norm_sqr(), lo, hi, rtol, DWELL_INTERVALS)
}

/// `(m / hbar|k|) * integral of |psi|^2` over the dwell region of `channel`:
/// `[a, b]` for full and transmission, `[a, x_c]` for reflection. Equals
/// `T tau_tr`, `R tau_ref` or the Smith time, and stays finite at `T, R -> 0`.
pub fn weighted_dwell(sol: &StationarySolution, channel: Channel, rtol: f64) -> Result<f64> {
    let (a, c, b) = (sol.left(), sol.center(), sol.right());
    let inner = match channel {
        Channel::Reflection => integral_abs2(sol, channel, a, c, rtol)?,
        _ => integral_abs2(sol, channel, a, c, rtol)? + integral_abs2(sol, channel, c, b, rtol)?,
    };
    let units = sol.units();
    Ok(inner * units.time_scale() / abs(sol.k()))
}

/// `(1/I_tr) int_a^b |psi_tr|^2 dx` with `I_tr = T hbar k / m`, by quadrature.
pub fn dwell_tr_numeric(sol: &StationarySolution, rtol: f64) -> Result<f64> {
    let t = sol.params().transmission;
    if !(t >= FLUX_FLOOR) {
        return Err(Error::TransmissionUnderflow { transmission: t });
    }
    Ok(weighted_dwell(sol, Channel::Transmission, rtol)? / t)
}

/// `(1/I_ref) int_a^{x_c} |psi_ref|^2 dx` with `I_ref = R hbar k / m`, by quadrature.
pub fn dwell_ref_numeric(sol: &StationarySolution, rtol: f64) -> Result<f64> {
    let r = sol.params().reflection;
    if !(r >= REFLECTION_FLOOR) {
        return Err(Error::ReflectionFree { reflection: r });
    }
    Ok(weighted_dwell(sol, Channel::Reflection, rtol)? / r)
}

/// Smith's full-ensemble dwell time `(m / hbar k) int_a^b |psi_full|^2 dx`.
pub fn dwell_smith(sol: &StationarySolution, rtol: f64) -> Result<f64> {
    weighted_dwell(sol, Channel::Full, rtol)
}

/// Smith time divided by `T`.
pub fn dwell_bohm(sol: &StationarySolution, rtol: f64) -> Result<f64> {
    let t = sol.params().transmission;
    if !(t >= FLUX_FLOOR) {
        return Err(Error::TransmissionUnderflow { transmission: t });
    }
    Ok(dwell_smith(sol, rtol)? / t)
}

struct RectVars {
    k: f64,
    d: f64,
    kappa: f64,
    kappa0_sq: f64,
    regime: Regime,
    w: f64,
    scale: f64,
}

fn rect_vars(b: &RectangularBarrier, k: f64, units: UnitsContext) -> Result<RectVars> {
    if !(k.is_finite() && k > 0.0) {
        return Err(invalid("k", "wavenumber must be positive and finite"));
    }
    let kappa0_sq = b.kappa0_sq(units);
    let kap = kappa_from_sq(kappa0_sq, k);
    let d = b.width();
    Ok(RectVars {
        k,
        d,
        kappa: kap.value,
        kappa0_sq,
        regime: kap.regime,
        w: kap.signed_sq * d * d,
        scale: units.time_scale(),
    })
}

impl RectVars {
    fn in_band(&self) -> bool {
        self.regime == Regime::Degenerate || self.kappa * self.d < SERIES_BAND
    }

    /// `(S, C, S1, CS1)` of `w = (kappa0^2 - k^2) d^2`.
    fn entire(&self) -> (f64, f64, f64, f64) {
        (sinhc(self.w), coshc(self.w), sinhc_m1(self.w), cosh_minus_sinhc(self.w))
    }

    fn tr_series(&self) -> f64 {
        let (s, _, s1, _) = self.entire();
        let (k, d) = (self.k, self.d);
        self.scale / (2.0 * k) * (d * (1.0 + s) + k * k * d * d * d * s1)
    }

    fn ref_series(&self) -> f64 {
        let (_, _, s1, _) = self.entire();
        let sh = sinhc(self.w / 4.0);
        let (k, d) = (self.k, self.d);
        self.scale * k * d * d * d * s1 / (1.0 + self.kappa0_sq * d * d * sh * sh / 4.0)
    }

    fn offset_series(&self) -> (f64, f64) {
        let (s, c, _, cs1) = self.entire();
        let (k, d, k0) = (self.k, self.d, self.kappa0_sq);
        let num = s + c + k * k * d * d * cs1;
        let den = 4.0 * k * k + k0 * k0 * d * d * s * s;
        (
            self.scale * 2.0 * k * d * num / den,
            self.scale * k0 * d * d * s * num / den,
        )
    }
}

/// Transmission dwell time of a rectangular barrier:
/// `m/(2 hbar k kappa^3) [(kappa^2 - k^2) kappa d + kappa0^2 sinh(kappa d)]` for `E < V0`,
/// `m/(2 hbar k kappa^3) [(kappa^2 + k^2) kappa d - beta kappa0^2 sin(kappa d)]` for `E >= V0`,
/// with `beta = +1`; regular through `E = V0`.
pub fn dwell_tr_rect(b: &RectangularBarrier, k: f64, units: UnitsContext) -> Result<f64> {
    let v = rect_vars(b, k, units)?;
    if v.in_band() {
        return Ok(v.tr_series());
    }
    dwell_tr_rect_with_beta(b, k, units, OVER_BARRIER_BETA)
}

/// [`dwell_tr_rect`] with an explicit `beta` in the over-barrier branch.
pub fn dwell_tr_rect_with_beta(b: &RectangularBarrier, k: f64, units: UnitsContext, beta: f64) -> Result<f64> {
    let v = rect_vars(b, k, units)?;
    let (kp, d, k0) = (v.kappa, v.d, v.kappa0_sq);
    let pre = v.scale / (2.0 * k * kp * kp * kp);
    Ok(match v.regime {
        Regime::UnderBarrier => pre * ((kp * kp - k * k) * kp * d + k0 * sinh(kp * d)),
        Regime::OverBarrier => pre * ((kp * kp + k * k) * kp * d - beta * k0 * sin(kp * d)),
        Regime::Degenerate => v.tr_series(),
    })
}

/// Reflection dwell time of a rectangular barrier:
/// `(m k / hbar kappa) (sinh(kappa d) - kappa d) / (kappa^2 + kappa0^2 sinh^2(kappa d/2))` for `E < V0`,
/// `(m k / hbar kappa) (kappa d - sin(kappa d)) / (kappa^2 + beta kappa0^2 sin^2(kappa d/2))` for `E >= V0`.
pub fn dwell_ref_rect(b: &RectangularBarrier, k: f64, units: UnitsContext) -> Result<f64> {
    let v = rect_vars(b, k, units)?;
    if v.in_band() {
        return Ok(v.ref_series());
    }
    dwell_ref_rect_with_beta(b, k, units, OVER_BARRIER_BETA)
}

/// [`dwell_ref_rect`] with an explicit `beta` in the over-barrier branch.
pub fn dwell_ref_rect_with_beta(b: &RectangularBarrier, k: f64, units: UnitsContext, beta: f64) -> Result<f64> {
    let v = rect_vars(b, k, units)?;
    let (kp, d, k0) = (v.kappa, v.d, v.kappa0_sq);
    let pre = v.scale * k / kp;
    Ok(match v.regime {
        Regime::UnderBarrier => {
            let sh = sinh(0.5 * kp * d);
            pre * (sinh(kp * d) - kp * d) / (kp * kp + k0 * sh * sh)
        }
        Regime::OverBarrier => {
            let sn = sin(0.5 * kp * d);
            pre * (kp * d - sin(kp * d)) / (kp * kp + beta * k0 * sn * sn)
        }
        Regime::Degenerate => v.ref_series(),
    })
}

/// Azimuthal clock offset `tau_0` (initial Larmor azimuth over `omega_L`):
/// `(2mk/hbar kappa) [(kappa^2 - k^2) sinh + kappa0^2 kappa d cosh] / (4k^2 kappa^2 + kappa0^4 sinh^2)`
/// for `E < V0` (arguments `kappa d`), and its analytic continuation
/// `(2mk/hbar kappa) [(kappa^2 + k^2) sin - kappa0^2 kappa d cos] / (4k^2 kappa^2 + kappa0^4 sin^2)`
/// for `E > V0`.
pub fn tau0_rect(b: &RectangularBarrier, k: f64, units: UnitsContext) -> Result<f64> {
    let v = rect_vars(b, k, units)?;
    if v.in_band() {
        return Ok(v.offset_series().0);
    }
    let (kp, d, k0) = (v.kappa, v.d, v.kappa0_sq);
    let pre = v.scale * 2.0 * k / kp;
    Ok(match v.regime {
        Regime::UnderBarrier => {
            let (sh, ch) = (sinh(kp * d), cosh(kp * d));
            pre * ((kp * kp - k * k) * sh + k0 * kp * d * ch) / (4.0 * k * k * kp * kp + k0 * k0 * sh * sh)
        }
        _ => {
            let (sn, cs) = (sin(kp * d), cos(kp * d));
            pre * ((kp * kp + k * k) * sn - k0 * kp * d * cs) / (4.0 * k * k * kp * kp + k0 * k0 * sn * sn)
        }
    })
}

/// Polar clock offset `tau_z` (initial polar tilt over `omega_L`):
/// `(m kappa0^2 / hbar kappa^2) sinh [(kappa^2 - k^2) sinh + kappa0^2 kappa d cosh] / (4k^2 kappa^2 + kappa0^4 sinh^2)`
/// for `E < V0`, and the analytic continuation
/// `(m kappa0^2 / hbar kappa^2) sin [(kappa^2 + k^2) sin - kappa0^2 kappa d cos] / (4k^2 kappa^2 + kappa0^4 sin^2)`
/// for `E > V0`.
pub fn tauz_rect(b: &RectangularBarrier, k: f64, units: UnitsContext) -> Result<f64> {
    let v = rect_vars(b, k, units)?;
    if v.in_band() {
        return Ok(v.offset_series().1);
    }
    let (kp, d, k0) = (v.kappa, v.d, v.kappa0_sq);
    let pre = v.scale * k0 / (kp * kp);
    Ok(match v.regime {
        Regime::UnderBarrier => {
            let (sh, ch) = (sinh(kp * d), cosh(kp * d));
            pre * sh * ((kp * kp - k * k) * sh + k0 * kp * d * ch) / (4.0 * k * k * kp * kp + k0 * k0 * sh * sh)
        }
        _ => {
            let (sn, cs) = (sin(kp * d), cos(kp * d));
            pre * sn * ((kp * kp + k * k) * sn - k0 * kp * d * cs) / (4.0 * k * k * kp * kp + k0 * k0 * sn * sn)
        }
    })
}

/// Stationary-phase times from a centred difference of `J(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTime {
    /// `(m / hbar k) dJ/dk`. Because `J` includes the free phase `kd`, this
    /// is a traversal time (`md / hbar k` for a free region).
    pub traversal: f64,
    /// `traversal - md / hbar k`: the delay relative to free flight.
    pub delay: f64,
}

/// Stationary-phase time with step `dk` (`k - dk > 0`).
pub fn phase_time(
    barrier: &Barrier,
    k: f64,
    dk: f64,
    units: UnitsContext,
    settings: &OdeSettings,
) -> Result<PhaseTime> {
    if !(dk > 0.0 && k - dk > 0.0) {
        return Err(invalid("dk", "need 0 < dk < k"));
    }
    let phase = |kk: f64| -> Result<f64> {
        Ok(match barrier {
            Barrier::Rectangular(r) => rect_tunneling_params(r, kk, units)?.phase,
            Barrier::Sampled(_) => StationarySolution::new(barrier, kk, units, settings)?.params().phase,
        })
    };
    let dj = wrap_angle(phase(k + dk)? - phase(k - dk)?);
    let traversal = units.time_scale() / k * dj / (2.0 * dk);
    Ok(PhaseTime {
        traversal,
        delay: traversal - units.time_scale() * barrier.width() / k,
    })
}

/// Clock offsets extracted from the stationary incoming amplitudes of the
/// two spin-shifted barriers (`V -/+ hbar omega / 2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryClockOffsets {
    /// Precession-sense azimuth of the transmission subensemble over `omega`.
    pub tr_tau0: f64,
    /// `(pi/2 - theta_tr)` over `omega`.
    pub tr_tauz: f64,
    pub ref_tau0: f64,
    pub ref_tauz: f64,
}

fn clock_offsets_at(
    barrier: &Barrier,
    k: f64,
    omega: f64,
    units: UnitsContext,
    settings: &OdeSettings,
) -> Result<StationaryClockOffsets> {
    let half = 0.5 * units.hbar * omega;
    let up = StationarySolution::new(&barrier.shifted(-half), k, units, settings)?;
    let down = StationarySolution::new(&barrier.shifted(half), k, units, settings)?;
    let (ua, da) = (up.amplitudes(), down.amplitudes());
    let angles = |a_up: crate::Complex, a_dn: crate::Complex| {
        let phi = (a_up * a_dn.conj()).arg();
        let (nu, nd) = (a_up.norm_sqr(), a_dn.norm_sqr());
        let theta = acos(((nu - nd) / (nu + nd)).clamp(-1.0, 1.0));
        (phi / omega, (FRAC_PI_2 - theta) / omega)
    };
    let (tr_tau0, tr_tauz) = angles(ua.a_in_tr, da.a_in_tr);
    let (ref_tau0, ref_tauz) = angles(ua.a_in_ref, da.a_in_ref);
    Ok(StationaryClockOffsets {
        tr_tau0,
        tr_tauz,
        ref_tau0,
        ref_tauz,
    })
}

/// Clock offsets at `omega -> 0` by two-point Richardson extrapolation in
/// `omega^2` (the angles are odd in `omega`).
pub fn clock_offsets_stationary(
    barrier: &Barrier,
    k: f64,
    omegas: [f64; 2],
    units: UnitsContext,
    settings: &OdeSettings,
) -> Result<StationaryClockOffsets> {
    let [wa, wb] = omegas;
    if !(wa > 0.0 && wb > 0.0 && wa != wb) {
        return Err(Error::InvalidOmegaList);
    }
    let ea = clock_offsets_at(barrier, k, wa, units, settings)?;
    let eb = clock_offsets_at(barrier, k, wb, units, settings)?;
    let rich = |a: f64, b: f64| (wa * wa * b - wb * wb * a) / (wa * wa - wb * wb);
    Ok(StationaryClockOffsets {
        tr_tau0: rich(ea.tr_tau0, eb.tr_tau0),
        tr_tauz: rich(ea.tr_tauz, eb.tr_tauz),
        ref_tau0: rich(ea.ref_tau0, eb.ref_tau0),
        ref_tauz: rich(ea.ref_tauz, eb.ref_tauz),
    })
}

/// Options shared by the per-`k` time computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeOptions {
    pub ode: OdeSettings,
    /// Relative tolerance of the doubling Simpson quadratures.
    pub quad_rtol: f64,
    /// Phase-time step as a fraction of `k`.
    pub phase_step: f64,
    /// Spin splittings for general-barrier clock offsets, in units of `hbar k^2 / m`.
    pub offset_omegas: [f64; 2],
}

impl Default for TimeOptions {
    fn default() -> Self {
        Self {
            ode: OdeSettings::default(),
            quad_rtol: 1e-8,
            phase_step: 1e-4,
            offset_omegas: [1e-3, 5e-4],
        }
    }
}

/// All characteristic times for one barrier and wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicTimes {
    pub k: f64,
    pub transmission: f64,
    pub tau_dwell_tr: f64,
    pub tau_dwell_ref: f64,
    pub tau_0: f64,
    pub tau_z: f64,
    pub tau_smith: f64,
    pub tau_bohm: f64,
    pub tau_phase: f64,
    pub tau_phase_delay: f64,
    /// Sign used in the over-barrier rectangular formulas.
    pub beta: f64,
}

impl CharacteristicTimes {
    /// Rectangular barriers use the closed forms for the dwell times and
    /// clock offsets; sampled barriers use quadrature and the stationary
    /// spin-shift extraction. Smith and Bohm times always use quadrature.
    pub fn compute(barrier: &Barrier, k: f64, units: UnitsContext, opts: &TimeOptions) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(invalid("k", "wavenumber must be positive and finite"));
        }
        let sol = StationarySolution::new(barrier, k, units, &opts.ode)?;
        let t = sol.params().transmission;
        let (tau_dwell_tr, tau_dwell_ref, tau_0, tau_z) = match barrier {
            Barrier::Rectangular(r) => (
                dwell_tr_rect(r, k, units)?,
                dwell_ref_rect(r, k, units)?,
                tau0_rect(r, k, units)?,
                tauz_rect(r, k, units)?,
            ),
            Barrier::Sampled(_) => {
                let scale = units.hbar * k * k / units.mass;
                let off = clock_offsets_stationary(
                    barrier,
                    k,
                    [opts.offset_omegas[0] * scale, opts.offset_omegas[1] * scale],
                    units,
                    &opts.ode,
                )?;
                (
                    dwell_tr_numeric(&sol, opts.quad_rtol)?,
                    dwell_ref_numeric(&sol, opts.quad_rtol)?,
                    off.tr_tau0,
                    off.tr_tauz,
                )
            }
        };
        let tau_smith = dwell_smith(&sol, opts.quad_rtol)?;
        if !(t >= FLUX_FLOOR) {
            return Err(Error::TransmissionUnderflow { transmission: t });
        }
        let phase = phase_time(barrier, k, opts.phase_step * k, units, &opts.ode)?;
        Ok(Self {
            k,
            transmission: t,
            tau_dwell_tr,
            tau_dwell_ref,
            tau_0,
            tau_z,
            tau_smith,
            tau_bohm: tau_smith / t,
            tau_phase: phase.traversal,
            tau_phase_delay: phase.delay,
            beta: OVER_BARRIER_BETA,
        })
    }
}
