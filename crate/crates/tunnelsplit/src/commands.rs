//! The five subcommands. Each returns an [`Output`] that the caller renders;
//! all parallel work is collected in input order, so rendering is
//! independent of the thread count.

use rayon::ThreadPool;
use serde::Serialize;
use serde_json::{json, Value};
use tunnelsplit_core::{
    build_kgrid, clock_offset_rates, clock_offsets_stationary, default_xgrid, precession_rate,
    probability_flux, spin_expectations, tau0_rect, tauz_rect, Barrier, Channel,
    CharacteristicTimes, Packet, RectangularBarrier, SpinorPacket, StationarySolution,
};

use crate::batch;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult, NumericContext};
use crate::output::{Output, Table};

/// Half-width, in packet widths, of the grid used for packet snapshots.
const COVER_SIGMA: f64 = 6.0;

pub const PARAMS_HEADER: [&str; 6] = ["k", "E", "T", "R", "J", "F"];
pub const DECOMPOSE_HEADER: [&str; 9] = [
    "x", "re_full", "im_full", "re_tr", "im_tr", "re_ref", "im_ref", "flux_tr", "flux_ref",
];
pub const TIMES_HEADER: [&str; 8] = [
    "k", "tau_dwell_tr", "tau_dwell_ref", "tau_0", "tau_z", "tau_smith", "tau_bohm", "tau_phase",
];
pub const HARTMAN_HEADER: [&str; 6] = [
    "d", "tau_dwell_tr", "tau_dwell_ref", "tau_smith", "tau_bohm", "tau_phase",
];
pub const LARMOR_HEADER: [&str; 10] = [
    "omega", "t", "theta_tr", "phi_tr", "sz_tr", "norm_tr", "theta_ref", "phi_ref", "sz_ref", "norm_ref",
];

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

fn ks(cfg: &RunConfig) -> Vec<f64> {
    linspace(cfg.scan.k_min, cfg.scan.k_max, cfg.scan.k_points)
}

/// Tunneling parameters over the k scan.
pub fn params(cfg: &RunConfig, pool: &ThreadPool) -> CliResult<Output> {
    let units = cfg.units()?;
    let barrier = cfg.build_barrier()?;
    let ode = cfg.ode();
    let rows = batch::try_par_map(pool, &ks(cfg), |&k| {
        let p = StationarySolution::new(&barrier, k, units, &ode)
            .context(|| format!("params at k = {k}"))?
            .params();
        Ok(vec![k, units.energy(k), p.transmission, p.reflection, p.phase, p.flip])
    })?;
    let mut table = Table::new(&PARAMS_HEADER);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Output::Table { table, summary: None })
}

/// Wave functions and fluxes at `scan.k` (stationary) or, when `scan.t` is
/// set, of the packet at that time.
pub fn decompose(cfg: &RunConfig, pool: &ThreadPool) -> CliResult<Output> {
    let units = cfg.units()?;
    let barrier = cfg.build_barrier()?;
    let mut table = Table::new(&DECOMPOSE_HEADER);
    match cfg.scan.t {
        None => {
            let k = cfg.scan.k;
            let sol = StationarySolution::new(&barrier, k, units, &cfg.ode())
                .context(|| format!("decompose at k = {k}"))?;
            let xs = default_xgrid(&barrier, k, cfg.grids.padding, cfg.grids.n_x);
            let d = sol.decompose(&xs).context(|| format!("decompose at k = {k}"))?;
            for i in 0..xs.len() {
                table.push(vec![
                    d.x[i],
                    d.psi_full[i].re,
                    d.psi_full[i].im,
                    d.psi_tr[i].re,
                    d.psi_tr[i].im,
                    d.psi_ref[i].re,
                    d.psi_ref[i].im,
                    d.flux_tr[i],
                    d.flux_ref[i],
                ]);
            }
        }
        Some(t) => {
            let packet = build_packet(cfg, pool, &barrier)?;
            let grid = packet
                .covering_grid(t.max(0.0), COVER_SIGMA, cfg.grids.dx)
                .context(|| "packet grid".into())?;
            let xs = grid.points();
            let sample = |kind| packet.sample_with_derivative(kind, t, &xs);
            let (full, tr, rf) = (sample(Channel::Full), sample(Channel::Transmission), sample(Channel::Reflection));
            for i in 0..xs.len() {
                table.push(vec![
                    xs[i],
                    full[i].0.re,
                    full[i].0.im,
                    tr[i].0.re,
                    tr[i].0.im,
                    rf[i].0.re,
                    rf[i].0.im,
                    probability_flux(tr[i].0, tr[i].1, units),
                    probability_flux(rf[i].0, rf[i].1, units),
                ]);
            }
        }
    }
    Ok(Output::Table { table, summary: None })
}

fn build_packet(cfg: &RunConfig, pool: &ThreadPool, barrier: &Barrier) -> CliResult<Packet> {
    let spec = cfg.packet_spec()?;
    let kgrid = build_kgrid(&spec, cfg.tolerances.eps_k, cfg.grids.n_k)
        .map_err(|e| CliError::invalid("grids", e.to_string()))?;
    batch::packet(pool, barrier, spec, kgrid, cfg.units()?, &cfg.ode())
}

#[derive(Debug, Clone, Copy, Serialize)]
struct ChannelTimes {
    tr: f64,
    #[serde(rename = "ref")]
    rf: f64,
}

/// Packet-level Larmor times by the spectral average and by the time integral
/// of the barrier occupancy.
fn packet_larmor_times(cfg: &RunConfig, packet: &Packet) -> CliResult<Value> {
    let (t, r) = packet.spectral_norms();
    let spectral = |kind: Channel| {
        packet
            .larmor_time_spectral(kind, cfg.tolerances.quadrature)
            .context(|| format!("spectral Larmor time ({})", kind.name()))
            .map(|p| p.time)
    };
    let opts = cfg.time_integral_options();
    let integral = |kind: Channel| {
        packet
            .larmor_time_timeintegral(kind, &opts)
            .context(|| format!("time-integral Larmor time ({})", kind.name()))
            .map(|p| p.time)
    };
    Ok(json!({
        "transmission": t,
        "reflection": r,
        "larmor_spectral": ChannelTimes { tr: spectral(Channel::Transmission)?, rf: spectral(Channel::Reflection)? },
        "larmor_time_integral": ChannelTimes { tr: integral(Channel::Transmission)?, rf: integral(Channel::Reflection)? },
    }))
}

/// Characteristic times over the k scan; with a `[packet]` section the
/// JSON output adds packet-level weights and Larmor times.
pub fn times(cfg: &RunConfig, pool: &ThreadPool) -> CliResult<Output> {
    let units = cfg.units()?;
    let barrier = cfg.build_barrier()?;
    let opts = cfg.time_options();
    let rows = batch::try_par_map(pool, &ks(cfg), |&k| {
        let c = CharacteristicTimes::compute(&barrier, k, units, &opts)
            .context(|| format!("times at k = {k}"))?;
        Ok(vec![k, c.tau_dwell_tr, c.tau_dwell_ref, c.tau_0, c.tau_z, c.tau_smith, c.tau_bohm, c.tau_phase])
    })?;
    let mut table = Table::new(&TIMES_HEADER);
    rows.into_iter().for_each(|r| table.push(r));
    let summary = match cfg.packet {
        Some(_) => Some(packet_larmor_times(cfg, &build_packet(cfg, pool, &barrier)?)?),
        None => None,
    };
    Ok(Output::Table { table, summary })
}

/// Characteristic times over the barrier-width scan at fixed `scan.k`.
pub fn hartman(cfg: &RunConfig, pool: &ThreadPool) -> CliResult<Output> {
    let units = cfg.units()?;
    let Barrier::Rectangular(rect) = cfg.build_barrier()? else {
        return Err(CliError::invalid("barrier.kind", "the width scan needs a rectangular barrier"));
    };
    let opts = cfg.time_options();
    let k = cfg.scan.k;
    let ds = linspace(cfg.scan.d_min, cfg.scan.d_max, cfg.scan.d_points);
    let rows = batch::try_par_map(pool, &ds, |&d| {
        let b: Barrier = RectangularBarrier::new(rect.height(), rect.left(), d)
            .map_err(|e| CliError::invalid("scan.d", e.to_string()))?
            .into();
        let c = CharacteristicTimes::compute(&b, k, units, &opts).context(|| format!("times at d = {d}"))?;
        Ok(vec![d, c.tau_dwell_tr, c.tau_dwell_ref, c.tau_smith, c.tau_bohm, c.tau_phase])
    })?;
    let mut table = Table::new(&HARTMAN_HEADER);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Output::Table { table, summary: None })
}

#[derive(Debug, Clone, Serialize)]
struct AngleSeries {
    theta: Vec<f64>,
    phi: Vec<f64>,
    sz: Vec<f64>,
    norm: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct OmegaSeries {
    omega: f64,
    t: Vec<f64>,
    tr: AngleSeries,
    #[serde(rename = "ref")]
    rf: AngleSeries,
}

/// A Richardson-extrapolated estimate, or why it could not be formed.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
enum Estimate {
    Value { estimates: Vec<f64>, extrapolated: f64 },
    Failed { error: String },
}

impl Estimate {
    fn from(r: tunnelsplit_core::Result<tunnelsplit_core::PrecessionEstimate>) -> Self {
        match r {
            Ok(e) => Estimate::Value {
                estimates: e.estimates,
                extrapolated: e.extrapolated,
            },
            Err(e) => Estimate::Failed { error: e.to_string() },
        }
    }

    fn value(&self) -> Option<f64> {
        match self {
            Estimate::Value { extrapolated, .. } => Some(*extrapolated),
            Estimate::Failed { .. } => None,
        }
    }
}

/// Spinor (Larmor clock) simulation: angle series per frequency,
/// extrapolated precession and clock-offset rates, and the comparison with
/// the spectral route.
pub fn larmor(cfg: &RunConfig, pool: &ThreadPool) -> CliResult<Output> {
    let units = cfg.units()?;
    let barrier = cfg.build_barrier()?;
    let spec = cfg.packet_spec()?;
    let ode = cfg.ode();
    let kgrid = build_kgrid(&spec, cfg.tolerances.eps_k, cfg.grids.n_k)
        .map_err(|e| CliError::invalid("grids", e.to_string()))?;
    let scale = units.hbar * spec.k0 * spec.k0 / units.mass;
    let omegas: Vec<f64> = cfg.larmor.omegas.iter().map(|w| w * scale).collect();

    let scalar = batch::packet(pool, &barrier, spec, kgrid.clone(), units, &ode)?;
    let t_late = scalar
        .separation_time(cfg.larmor.n_sigma)
        .map_err(|e| CliError::invalid("larmor.n_sigma", e.to_string()))?;
    let grid = scalar
        .covering_grid(t_late, cfg.larmor.n_sigma + 2.0, cfg.grids.dx)
        .context(|| "Larmor grid".into())?;

    let family = omegas
        .iter()
        .map(|&w| batch::spinor(pool, &barrier, spec, &kgrid, w, units, &ode))
        .collect::<CliResult<Vec<SpinorPacket>>>()?;

    let times = linspace(0.0, t_late, cfg.larmor.n_times);
    let jobs: Vec<(usize, f64)> = (0..family.len()).flat_map(|i| times.iter().map(move |&t| (i, t))).collect();
    let samples = batch::try_par_map(pool, &jobs, |&(i, t)| {
        let snap = family[i].snapshot(t, &grid);
        let e = |kind: Channel| spin_expectations(&snap, kind, units).context(|| format!("spin at t = {t}"));
        Ok((e(Channel::Transmission)?, e(Channel::Reflection)?))
    })?;

    let mut table = Table::new(&LARMOR_HEADER);
    let mut series = Vec::new();
    for (i, s) in family.iter().enumerate() {
        let chunk = &samples[i * times.len()..(i + 1) * times.len()];
        let collect = |pick: fn(&(tunnelsplit_core::SpinExpectation, tunnelsplit_core::SpinExpectation)) -> &tunnelsplit_core::SpinExpectation| AngleSeries {
            theta: chunk.iter().map(|c| pick(c).theta).collect(),
            phi: chunk.iter().map(|c| pick(c).phi).collect(),
            sz: chunk.iter().map(|c| pick(c).sz).collect(),
            norm: chunk.iter().map(|c| pick(c).norm).collect(),
        };
        for (t, (a, b)) in times.iter().zip(chunk) {
            table.push(vec![s.omega, *t, a.theta, a.phi, a.sz, a.norm, b.theta, b.phi, b.sz, b.norm]);
        }
        series.push(OmegaSeries {
            omega: s.omega,
            t: times.clone(),
            tr: collect(|c| &c.0),
            rf: collect(|c| &c.1),
        });
    }

    let mut precession = serde_json::Map::new();
    let mut offsets = serde_json::Map::new();
    let mut pass = serde_json::Map::new();
    let packet_times = packet_larmor_times(cfg, &scalar)?;
    for kind in [Channel::Transmission, Channel::Reflection] {
        let est = Estimate::from(precession_rate(&family, kind, t_late, &grid, units));
        let spectral = packet_times["larmor_spectral"][kind.name()].as_f64().unwrap_or(f64::NAN);
        let ok = est
            .value()
            .is_some_and(|v| ((v - spectral) / spectral).abs() <= cfg.larmor.tolerance);
        pass.insert(kind.name().into(), json!(ok));
        precession.insert(kind.name().into(), json!(est));
        let (phi, theta) = match clock_offset_rates(&family, kind, &grid, units) {
            Ok((p, t)) => (Estimate::from(Ok(p)), Estimate::from(Ok(t))),
            Err(e) => (Estimate::from(Err(e.clone())), Estimate::from(Err(e))),
        };
        offsets.insert(kind.name().into(), json!({ "tau_0": phi, "tau_z": theta }));
    }

    let stationary = stationary_offsets(cfg, &barrier, spec.k0)?;
    let report = json!({
        "omega_unit": scale,
        "omegas": omegas,
        "t_late": t_late,
        "series": series,
        "transmission": packet_times["transmission"],
        "reflection": packet_times["reflection"],
        "larmor_spectral": packet_times["larmor_spectral"],
        "larmor_time_integral": packet_times["larmor_time_integral"],
        "precession": precession,
        "clock_offsets": offsets,
        "stationary_offsets_at_k0": stationary,
        "tolerance": cfg.larmor.tolerance,
        "pass": pass,
    });
    Ok(Output::Report { table, report })
}

/// Stationary clock offsets at the central wavenumber, for comparison with
/// the packet readings.
fn stationary_offsets(cfg: &RunConfig, barrier: &Barrier, k: f64) -> CliResult<Value> {
    let units = cfg.units()?;
    let ctx = || format!("stationary clock offsets at k = {k}");
    let scale = units.hbar * k * k / units.mass;
    let w = [cfg.larmor.omegas[0] * scale, cfg.larmor.omegas[1] * scale];
    let off = clock_offsets_stationary(barrier, k, w, units, &cfg.ode()).context(ctx)?;
    let mut v = json!({
        "tr": { "tau_0": off.tr_tau0, "tau_z": off.tr_tauz },
        "ref": { "tau_0": off.ref_tau0, "tau_z": off.ref_tauz },
    });
    if let Barrier::Rectangular(r) = barrier {
        v["closed_form"] = json!({
            "tau_0": tau0_rect(r, k, units).context(ctx)?,
            "tau_z": tauz_rect(r, k, units).context(ctx)?,
        });
    }
    Ok(v)
}
