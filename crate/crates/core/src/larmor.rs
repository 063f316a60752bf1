//! Larmor clock: a spin-1/2 mixture `(|up> + |down>)/sqrt(2)` whose
//! components see the barrier shifted by `-/+ hbar omega_L / 2`.
//!
//! With this Hamiltonian the spin precesses about `z` with
//! `dphi/dt = -omega_L`, where `phi = atan2(S_y, S_x)`. Clock readings are
//! therefore taken in the precession sense, `-phi`, so that an elapsed time
//! `tau` reads as a positive angle `omega_L tau`.

use alloc::vec::Vec;

use crate::barrier::Barrier;
use crate::error::{invalid, Error, Result};
use crate::math::{acos, atan2, wrap_angle, FRAC_PI_2};
use crate::ode::OdeSettings;
use crate::packet::{GaussianSpec, KGrid, Packet, PacketKind, SpatialGrid};
use crate::stationary::Channel;
use crate::units::UnitsContext;
use crate::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

/// Barrier seen by one spin component: `V - hbar omega/2` (up) or
/// `V + hbar omega/2` (down) inside `[a, b]`, unchanged outside.
pub fn shifted_barrier(barrier: &Barrier, omega: f64, spin: Spin, units: UnitsContext) -> Result<Barrier> {
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(invalid("omega_L", "Larmor frequency must be non-negative"));
    }
    let half = 0.5 * units.hbar * omega;
    Ok(match spin {
        Spin::Up => barrier.shifted(-half),
        Spin::Down => barrier.shifted(half),
    })
}

/// Two independent scalar packets, one per spin component.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorPacket {
    pub omega: f64,
    pub up: Packet,
    pub down: Packet,
}

impl SpinorPacket {
    pub fn new(
        barrier: &Barrier,
        spec: GaussianSpec,
        kgrid: KGrid,
        omega: f64,
        units: UnitsContext,
        ode: &OdeSettings,
    ) -> Result<Self> {
        let up = Packet::new(&shifted_barrier(barrier, omega, Spin::Up, units)?, spec, kgrid.clone(), units, ode)?;
        let down = Packet::new(&shifted_barrier(barrier, omega, Spin::Down, units)?, spec, kgrid, units, ode)?;
        Ok(Self { omega, up, down })
    }

    /// Spinor snapshot at time `t`; each component carries the mixture
    /// weight `1/sqrt(2)`.
    pub fn snapshot(&self, t: f64, grid: &SpatialGrid) -> SpinorSnapshot {
        let xs = grid.points();
        let w = core::f64::consts::FRAC_1_SQRT_2;
        let pick = |p: &Packet| -> [Vec<Complex>; 3] {
            let s = p.sample_all(t, &xs);
            let f = |v: &Vec<(Complex, Complex)>| v.iter().map(|z| z.0 * w).collect::<Vec<_>>();
            [f(&s[0]), f(&s[1]), f(&s[2])]
        };
        SpinorSnapshot {
            t,
            grid: grid.clone(),
            up: pick(&self.up),
            down: pick(&self.down),
        }
    }

    /// Spectral weights `(T_up, R_up, T_down, R_down)`.
    pub fn spectral_norms(&self) -> (f64, f64, f64, f64) {
        let (tu, ru) = self.up.spectral_norms();
        let (td, rd) = self.down.spectral_norms();
        (tu, ru, td, rd)
    }
}

/// Spinor components of every channel on a uniform grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorSnapshot {
    pub t: f64,
    pub grid: SpatialGrid,
    /// Indexed full, transmission, reflection.
    pub up: [Vec<Complex>; 3],
    pub down: [Vec<Complex>; 3],
}

fn channel_index(kind: PacketKind) -> usize {
    match kind {
        Channel::Full => 0,
        Channel::Transmission => 1,
        Channel::Reflection => 2,
    }
}

/// Normalised spin expectation values of one subensemble, in units where
/// `S = (hbar/2) sigma`: `S_x + i S_y = hbar <up|down> / (n_up + n_down)`,
/// `S_z = (hbar/2)(n_up - n_down)/(n_up + n_down)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinExpectation {
    pub t: f64,
    pub kind: PacketKind,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    /// `arccos(2 S_z / hbar)`.
    pub theta: f64,
    /// `atan2(S_y, S_x)`.
    pub phi: f64,
    /// `n_up + n_down`.
    pub norm: f64,
}

impl SpinExpectation {
    /// Azimuth in the precession sense, `-phi`.
    pub fn clock_phi(&self) -> f64 {
        -self.phi
    }
}

/// Spin expectations of the `kind` subensemble. Reflection components vanish
/// beyond `x_c`, so integrating over the whole grid equals integrating over
/// `(-inf, x_c]`.
pub fn spin_expectations(snap: &SpinorSnapshot, kind: PacketKind, units: UnitsContext) -> Result<SpinExpectation> {
    let i = channel_index(kind);
    let (up, down) = (&snap.up[i], &snap.down[i]);
    let nu: Vec<f64> = up.iter().map(|z| z.norm_sqr()).collect();
    let nd: Vec<f64> = down.iter().map(|z| z.norm_sqr()).collect();
    let ov: Vec<Complex> = up.iter().zip(down).map(|(a, b)| a.conj() * b).collect();
    let nu = snap.grid.integrate(&nu);
    let nd = snap.grid.integrate(&nd);
    let ov = snap.grid.integrate(&ov);
    let norm = nu + nd;
    if !(norm > 1e-300) {
        return Err(Error::DegenerateWeight {
            channel: kind.name(),
            weight: norm,
        });
    }
    let sx = units.hbar * ov.re / norm;
    let sy = units.hbar * ov.im / norm;
    let sz = 0.5 * units.hbar * (nu - nd) / norm;
    Ok(SpinExpectation {
        t: snap.t,
        kind,
        sx,
        sy,
        sz,
        theta: acos((2.0 * sz / units.hbar).clamp(-1.0, 1.0)),
        phi: atan2(sy, sx),
        norm,
    })
}

/// Clock angles: polar angle and precession-sense azimuth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockAngles {
    pub theta: f64,
    pub phi: f64,
}

/// Angles of the subensemble at `t = 0`, before the packet reaches the barrier.
pub fn initial_angles(spinor: &SpinorPacket, kind: PacketKind, grid: &SpatialGrid, units: UnitsContext) -> Result<ClockAngles> {
    let e = spin_expectations(&spinor.snapshot(0.0, grid), kind, units)?;
    Ok(ClockAngles {
        theta: e.theta,
        phi: e.clock_phi(),
    })
}

/// Small-field rate estimates with their Richardson extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecessionEstimate {
    pub omegas: Vec<f64>,
    /// Per-`omega` estimates of the rate.
    pub estimates: Vec<f64>,
    /// Two-point extrapolation to `omega -> 0` (angles are odd in `omega`).
    pub extrapolated: f64,
}

fn richardson(omegas: &[f64], estimates: &[f64]) -> Result<PrecessionEstimate> {
    let (wa, wb) = (omegas[0], omegas[1]);
    let (ea, eb) = (estimates[0], estimates[1]);
    let extrapolated = (wa * wa * eb - wb * wb * ea) / (wa * wa - wb * wb);
    if (ea - eb).abs() > 0.01 * extrapolated.abs() {
        return Err(Error::ExtrapolationDiverged { first: ea, second: eb });
    }
    Ok(PrecessionEstimate {
        omegas: omegas.to_vec(),
        estimates: estimates.to_vec(),
        extrapolated,
    })
}

fn check_family(family: &[SpinorPacket]) -> Result<()> {
    if family.len() < 2 || family.iter().any(|s| !(s.omega > 0.0)) || family[0].omega == family[1].omega {
        return Err(Error::InvalidOmegaList);
    }
    Ok(())
}

/// Larmor time `d(Delta phi)/d omega` at `omega -> 0`, with
/// `Delta phi = phi(t_late) - phi(0)` in the precession sense.
pub fn precession_rate(
    family: &[SpinorPacket],
    kind: PacketKind,
    t_late: f64,
    grid: &SpatialGrid,
    units: UnitsContext,
) -> Result<PrecessionEstimate> {
    check_family(family)?;
    let mut estimates = Vec::new();
    for s in family.iter().take(2) {
        let e0 = spin_expectations(&s.snapshot(0.0, grid), kind, units)?;
        let e1 = spin_expectations(&s.snapshot(t_late, grid), kind, units)?;
        let dphi = wrap_angle(e1.clock_phi() - e0.clock_phi());
        estimates.push(dphi / s.omega);
    }
    let omegas: Vec<f64> = family.iter().take(2).map(|s| s.omega).collect();
    richardson(&omegas, &estimates)
}

/// Initial clock offsets at `omega -> 0`: `phi^(0)/omega` and
/// `(pi/2 - theta^(0))/omega`.
pub fn clock_offset_rates(
    family: &[SpinorPacket],
    kind: PacketKind,
    grid: &SpatialGrid,
    units: UnitsContext,
) -> Result<(PrecessionEstimate, PrecessionEstimate)> {
    check_family(family)?;
    let mut phi = Vec::new();
    let mut theta = Vec::new();
    for s in family.iter().take(2) {
        let a = initial_angles(s, kind, grid, units)?;
        phi.push(a.phi / s.omega);
        theta.push((FRAC_PI_2 - a.theta) / s.omega);
    }
    let omegas: Vec<f64> = family.iter().take(2).map(|s| s.omega).collect();
    Ok((richardson(&omegas, &phi)?, richardson(&omegas, &theta)?))
}
