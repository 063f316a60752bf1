//! Parallel evaluation with results collected in input order.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use tunnelsplit_core::{
    shifted_barrier, Barrier, GaussianSpec, KGrid, OdeSettings, Packet, Spin, SpinorPacket,
    StationarySolution, UnitsContext,
};

use crate::error::{CliError, CliResult};

/// A pool with `threads` workers, or rayon's default when `None`.
pub fn pool(threads: Option<usize>) -> CliResult<ThreadPool> {
    let mut b = ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::invalid("threads", "must be at least 1"));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Pool(e.to_string()))
}

/// Maps `f` over `items` on `pool`; the output order matches the input order
/// regardless of scheduling.
pub fn par_map<T, R, F>(pool: &ThreadPool, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    pool.install(|| items.par_iter().map(&f).collect())
}

/// Like [`par_map`], stopping at the first error in input order.
pub fn try_par_map<T, R, F>(pool: &ThreadPool, items: &[T], f: F) -> CliResult<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> CliResult<R> + Sync,
{
    par_map(pool, items, f).into_iter().collect()
}

/// Packet whose stationary solutions are solved in parallel.
pub fn packet(
    pool: &ThreadPool,
    barrier: &Barrier,
    spec: GaussianSpec,
    kgrid: KGrid,
    units: UnitsContext,
    ode: &OdeSettings,
) -> CliResult<Packet> {
    let solutions = par_map(pool, &kgrid.nodes, |&k| StationarySolution::new(barrier, k, units, ode))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::numeric("stationary solve", e))?;
    Packet::from_solutions(barrier, spec, kgrid, units, solutions)
        .map_err(|e| CliError::numeric("packet assembly", e))
}

/// Spinor packet for Larmor frequency `omega`, both components built in parallel.
pub fn spinor(
    pool: &ThreadPool,
    barrier: &Barrier,
    spec: GaussianSpec,
    kgrid: &KGrid,
    omega: f64,
    units: UnitsContext,
    ode: &OdeSettings,
) -> CliResult<SpinorPacket> {
    let shifted = |spin| {
        shifted_barrier(barrier, omega, spin, units)
            .map_err(|e| CliError::numeric(format!("spin-shifted barrier at omega = {omega}"), e))
    };
    let up = packet(pool, &shifted(Spin::Up)?, spec, kgrid.clone(), units, ode)?;
    let down = packet(pool, &shifted(Spin::Down)?, spec, kgrid.clone(), units, ode)?;
    Ok(SpinorPacket { omega, up, down })
}
