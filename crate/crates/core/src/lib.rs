//! Transmission/reflection decomposition of one-dimensional completed scattering.
//!
//! A particle incident from the left on a static barrier confined to `[a, b]`
//! is described by a stationary wave `psi_full(x; k)`. For barriers symmetric
//! about the midpoint `x_c`, this crate splits `psi_full` into two pieces:
//!
//! * `psi_tr`, carrying the whole probability flux `T * hbar * k / m`, and
//! * `psi_ref`, carrying zero flux and vanishing identically for `x >= x_c`,
//!
//! with `psi_full = psi_tr + psi_ref` everywhere. Wave packets built from these
//! pieces describe the to-be-transmitted and to-be-reflected subensembles, and
//! the crate computes their dwell times, Larmor-clock readings and the usual
//! full-ensemble comparison times (Smith, Bohm, stationary phase).
//!
//! The crate is `no_std` and only needs `alloc`. Parallel scans, file formats
//! and the command line live in the companion `tunnelsplit` crate.
//!
//! ```
//! use tunnelsplit_core::{Barrier, RectangularBarrier, StationarySolution, UnitsContext};
//!
//! let units = UnitsContext::NATURAL;
//! let barrier = Barrier::from(RectangularBarrier::new(1.0, 10.0, 1.0).unwrap());
//! let sol = StationarySolution::new(&barrier, 1.0, units, &Default::default()).unwrap();
//! let params = sol.params();
//! assert!((params.transmission - 0.419_974_341_614_026).abs() < 1e-12);
//! ```

#![no_std]
// `!(x > 0.0)` guards deliberately reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod barrier;
pub mod basis;
mod error;
pub mod larmor;
mod math;
pub mod ode;
pub mod packet;
pub mod params;
pub mod quadrature;
pub mod stationary;
pub mod times;
mod units;

pub use barrier::{kappa_of, Barrier, Kappa, RectangularBarrier, Regime, SampledSymmetricBarrier};
pub use basis::{solve_basis, solve_basis_numeric, BarrierBasis, BasisSample};
pub use error::{Error, Result};
pub use larmor::{
    clock_offset_rates, initial_angles, precession_rate, shifted_barrier, spin_expectations,
    ClockAngles, PrecessionEstimate, Spin, SpinExpectation, SpinorPacket, SpinorSnapshot,
};
pub use ode::OdeSettings;
pub use packet::{
    build_kgrid, Asymptote, GaussianSpec, KGrid, Moments, Packet, PacketFrame, PacketKind,
    PacketTime, SpatialGrid, TimeIntegralOptions,
};
pub use params::{rect_tunneling_params, TunnelingParams};
pub use stationary::{
    boundary_qp, incoming_splits, outgoing_amplitudes, params_from_amplitudes, probability_flux,
    default_xgrid, BoundaryAmplitudes, Channel, StationaryDecomposition, StationarySolution,
};
pub use times::{
    clock_offsets_stationary, dwell_bohm, dwell_ref_numeric, dwell_ref_rect, dwell_smith,
    dwell_tr_numeric, dwell_tr_rect, phase_time, tau0_rect, tauz_rect, CharacteristicTimes,
    PhaseTime, StationaryClockOffsets, TimeOptions,
};
pub use units::UnitsContext;

/// Complex amplitudes throughout the crate.
pub type Complex = num_complex::Complex64;
