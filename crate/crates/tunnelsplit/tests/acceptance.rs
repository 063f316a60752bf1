//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::time::Instant;

use tunnelsplit::commands::linspace;
use tunnelsplit::{batch, Format, RunConfig};
use tunnelsplit_core::times::{dwell_ref_rect_with_beta, dwell_tr_rect_with_beta};
use tunnelsplit_core::{
    build_kgrid, clock_offset_rates, dwell_ref_numeric, dwell_ref_rect, dwell_tr_numeric,
    dwell_tr_rect, tau0_rect, tauz_rect, Barrier, Channel, GaussianSpec, OdeSettings, Packet,
    RectangularBarrier, SampledSymmetricBarrier, SpinorPacket, StationarySolution, UnitsContext,
};

const U: UnitsContext = UnitsContext::NATURAL;
const QUAD_RTOL: f64 = 1e-10;

struct Check {
    failures: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self { failures: Vec::new() }
    }

    /// Records `worst <= tol` under `label`; returns a short summary.
    fn at_most(&mut self, label: &str, worst: f64, tol: f64) -> String {
        if worst.is_nan() || worst > tol {
            self.failures.push(format!("{label} = {worst:.3e} > {tol:.0e}"));
        }
        format!("{label} {worst:.2e} (<= {tol:.0e})")
    }

    fn holds(&mut self, label: &str, ok: bool, detail: String) -> String {
        if !ok {
            self.failures.push(format!("{label}: {detail}"));
        }
        format!("{label}: {detail}")
    }
}

fn report(id: u32, name: &str, check: Check, details: Vec<String>, started: Instant) -> bool {
    let ok = check.failures.is_empty();
    let mut err = std::io::stderr().lock();
    let _ = writeln!(
        err,
        "{} criterion {id} ({name}) [{:.1} s]",
        if ok { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    for d in details {
        let _ = writeln!(err, "      {d}");
    }
    for f in &check.failures {
        let _ = writeln!(err, "      violated: {f}");
    }
    ok
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

fn rect(v0: f64, a: f64, d: f64) -> RectangularBarrier {
    RectangularBarrier::new(v0, a, d).unwrap()
}

/// Smooth symmetric bump of height 1.2 on `[10, 12]`.
fn bump() -> Barrier {
    SampledSymmetricBarrier::from_fn(10.0, 2.0, 201, |x| {
        let z = (x - 11.0) / 0.5;
        1.2 * (-z * z).exp()
    })
    .unwrap()
    .into()
}

fn solve(b: &Barrier, k: f64) -> StationarySolution {
    StationarySolution::new(b, k, U, &OdeSettings::default()).unwrap()
}

fn unitarity() -> bool {
    let t0 = Instant::now();
    let mut c = Check::new();
    let (mut w_out, mut w_sum, mut w_abs, mut w_phase) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for b in [Barrier::from(rect(1.0, 10.0, 1.0)), bump()] {
        for k in linspace(0.05, 3.0, 100) {
            let m = *solve(&b, k).amplitudes();
            w_out = w_out.max((m.a_out.norm_sqr() + m.b_out.norm_sqr() - 1.0).abs());
            w_sum = w_sum.max((m.a_in_tr + m.a_in_ref - 1.0).norm());
            w_abs = w_abs.max((m.a_in_tr.norm_sqr() + m.a_in_ref.norm_sqr() - 1.0).abs());
            let diff = wrap(m.a_in_ref.arg() - m.a_in_tr.arg());
            w_phase = w_phase.max((diff.abs() - FRAC_PI_2).abs());
        }
    }
    let details = vec![
        c.at_most("max | |a_out|^2 + |b_out|^2 - 1 |", w_out, 1e-10),
        c.at_most("max |A_in_tr + A_in_ref - 1|", w_sum, 1e-12),
        c.at_most("max | |A_in_tr|^2 + |A_in_ref|^2 - 1 |", w_abs, 1e-10),
        c.at_most("max | |arg A_in_ref - arg A_in_tr| - pi/2 |", w_phase, 1e-8),
    ];
    report(1, "unitarity and splits, 2 x 100 k", c, details, t0)
}

fn decomposition() -> bool {
    let t0 = Instant::now();
    let mut c = Check::new();
    let (mut w_rec, mut w_node, mut w_ref, mut w_tr) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut pairs = 0;
    for b in [Barrier::from(rect(1.0, 10.0, 1.0)), bump()] {
        for k in linspace(0.3, 2.5, 10) {
            pairs += 1;
            let sol = solve(&b, k);
            let xs = tunnelsplit_core::default_xgrid(&b, k, None, 1024);
            let d = sol.decompose(&xs).unwrap();
            let peak = d.psi_full.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            let v = U.hbar * k / U.mass;
            for i in 0..xs.len() {
                w_rec = w_rec.max((d.psi_full[i] - d.psi_tr[i] - d.psi_ref[i]).norm());
                w_ref = w_ref.max(d.flux_ref[i].abs() / v);
                w_tr = w_tr.max((d.flux_tr[i] - d.transmission * v).abs() / (d.transmission * v));
            }
            let at_c = sol.eval(Channel::Reflection, b.center()).0.norm();
            w_node = w_node.max(at_c / peak);
        }
    }
    let details = vec![
        c.at_most("max |psi_full - psi_tr - psi_ref|", w_rec, 1e-12),
        c.at_most("max |psi_ref(x_c)| / max|psi|", w_node, 1e-10),
        c.at_most("max |j_ref| / (hbar k/m)", w_ref, 1e-8),
        c.at_most("max |j_tr - T hbar k/m| / (T hbar k/m)", w_tr, 1e-8),
    ];
    report(2, &format!("decomposition invariants, {pairs} (k, barrier) pairs"), c, details, t0)
}

fn dwell_closed_forms() -> bool {
    let t0 = Instant::now();
    let mut c = Check::new();
    let (mut w_under, mut w_over) = (0.0f64, 0.0f64);
    let mut misfit = [0.0f64; 2];
    let mut skipped = 0;
    for (v0, d) in [(1.0, 1.0), (1.0, 2.5), (0.5, 1.7)] {
        let r = rect(v0, 10.0, d);
        let b = Barrier::from(r);
        let k_top = (2.0 * v0).sqrt();
        for k in linspace(0.1, 3.0 * k_top, 50) {
            let sol = solve(&b, k);
            let tr_q = dwell_tr_numeric(&sol, QUAD_RTOL).unwrap();
            let ref_q = (sol.params().reflection > 1e-12).then(|| dwell_ref_numeric(&sol, QUAD_RTOL).unwrap());
            if ref_q.is_none() {
                skipped += 1;
            }
            let mut e = rel(dwell_tr_rect(&r, k, U).unwrap(), tr_q);
            if let Some(q) = ref_q {
                e = e.max(rel(dwell_ref_rect(&r, k, U).unwrap(), q));
            }
            if k < k_top {
                w_under = w_under.max(e);
            } else {
                w_over = w_over.max(e);
                for (slot, beta) in [1.0, -1.0].into_iter().enumerate() {
                    let mut m = rel(dwell_tr_rect_with_beta(&r, k, U, beta).unwrap(), tr_q);
                    if let Some(q) = ref_q {
                        m = m.max(rel(dwell_ref_rect_with_beta(&r, k, U, beta).unwrap(), q));
                    }
                    misfit[slot] = misfit[slot].max(m);
                }
            }
        }
    }
    let fitted = if misfit[0] <= misfit[1] { 1.0 } else { -1.0 };
    let details = vec![
        c.at_most("under-barrier max relative error", w_under, 1e-6),
        c.at_most("over-barrier max relative error", w_over, 1e-6),
        c.holds(
            "over-barrier sign fit",
            misfit[0].min(misfit[1]) <= 1e-6 && misfit[0].max(misfit[1]) > 1e-2,
            format!("beta = {fitted:+} (misfit +1: {:.2e}, -1: {:.2e})", misfit[0], misfit[1]),
        ),
        format!("{skipped} reflection-free points skipped for the reflection time"),
    ];
    report(3, "closed-form vs quadrature dwell times, 3 x 50 k", c, details, t0)
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn hartman() -> bool {
    let t0 = Instant::now();
    let mut c = Check::new();
    // V0 = 1, k = 1: kappa = 1, so d = kappa d
    let cfg = RunConfig::with_overrides(
        None,
        &["scan.k=1.0".into(), "scan.d_min=6.0".into(), "scan.d_max=12.0".into(), "scan.d_points=13".into()],
    )
    .unwrap();
    let pool = batch::pool(None).unwrap();
    let out = tunnelsplit::run(tunnelsplit::Command::Hartman, &cfg, &pool).unwrap();
    let rows = &out.table().rows;
    let row_at = |d: f64| rows.iter().find(|r| r[0] == d).unwrap();
    let ds: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let ln_tr: Vec<f64> = rows.iter().map(|r| r[1].ln()).collect();
    let slope = fit_slope(&ds, &ln_tr);
    let (a, b, m) = (row_at(10.0), row_at(12.0), row_at(8.0));
    let ratio = m[4] / m[1] / 8f64.cosh();
    let details = vec![
        c.at_most("|slope of ln tau_dwell_tr - kappa| / kappa", (slope - 1.0).abs(), 0.05),
        c.at_most("tau_dwell_ref change, kappa d 10 -> 12", rel(b[2], a[2]), 1e-3),
        c.at_most("tau_smith change, kappa d 10 -> 12", rel(b[3], a[3]), 1e-3),
        c.holds(
            "ordering at kappa d = 8",
            m[4] > 100.0 * m[1] && m[1] > 100.0 * m[3],
            format!("tau_bohm {:.3e} >> tau_tr {:.3e} >> tau_smith {:.3e}", m[4], m[1], m[3]),
        ),
        c.holds(
            "tau_bohm / tau_tr / cosh(kappa d) in [1/2, 2]",
            (0.5..=2.0).contains(&ratio),
            format!("{ratio:.4}"),
        ),
    ];
    report(4, "Hartman denial and saturation", c, details, t0)
}

fn packet_invariants() -> bool {
    let t0 = Instant::now();
    let mut c = Check::new();
    let pool = batch::pool(None).unwrap();
    let b: Barrier = rect(1.0, 40.0, 1.0).into();
    let spec = GaussianSpec::new(1.0, 4.0, 0.0).unwrap();
    let kg = build_kgrid(&spec, 1e-8, 512).unwrap();
    let p = batch::packet(&pool, &b, spec, kg, U, &OdeSettings::default()).unwrap();
    let (t_w, r_w) = p.spectral_norms();
    let t_late = p.separation_time(6.0).unwrap();
    let grid = p.covering_grid(t_late, 8.0, 0.05).unwrap();
    let (mut full, mut tr, mut rf, mut re) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut worst_tr_t = 0.0;
    let times = linspace(0.0, t_late, 9);
    let samples = batch::par_map(&pool, &times, |&t| {
        (
            p.norm(Channel::Full, t, &grid),
            p.norm(Channel::Transmission, t, &grid),
            p.norm(Channel::Reflection, t, &grid),
            p.cross_overlap(t, &grid),
        )
    });
    for (&t, (nf, nt, nr, ov)) in times.iter().zip(&samples) {
        full = full.max((nf - 1.0).abs());
        if (nt - t_w).abs() > tr {
            tr = (nt - t_w).abs();
            worst_tr_t = t;
        }
        rf = rf.max((nr - r_w).abs());
        re = re.max(ov.re.abs());
    }
    let late = samples.last().unwrap().3.norm();
    let details = vec![
        c.at_most("max |N_full - 1|", full, 1e-8),
        c.at_most(&format!("max |N_tr - T| (worst at t = {worst_tr_t:.1})"), tr, 1e-8),
        c.at_most("max |N_ref - R|", rf, 1e-8),
        c.at_most("|T + R - 1|", (t_w + r_w - 1.0).abs(), 1e-10),
        c.at_most("max |Re <tr|ref>|", re, 1e-8),
        c.at_most(&format!("|<tr|ref>| at t = {t_late:.1}"), late, 1e-6),
        format!("T = {t_w:.9}, R = {r_w:.9}; 9 times on [0, {t_late:.1}], n_k = 512, dx = 0.05"),
    ];
    report(5, "packet norms and overlap", c, details, t0)
}

fn larmor_triangle() -> bool {
    let t0 = Instant::now();
    let mut c = Check::new();
    let cfg = RunConfig::with_overrides(
        None,
        &[
            "barrier.left=40.0".into(),
            "packet.k0=1.0".into(),
            "packet.l0=4.0".into(),
            "grids.n_k=256".into(),
            "tolerances.quadrature=1e-10".into(),
        ],
    )
    .unwrap();
    let pool = batch::pool(None).unwrap();
    let out = tunnelsplit::run(tunnelsplit::Command::Larmor, &cfg, &pool).unwrap();
    let json: serde_json::Value = serde_json::from_str(&out.render(Format::Json, 17).unwrap()).unwrap();
    let mut details = Vec::new();
    for ch in ["tr", "ref"] {
        let s = json["larmor_spectral"][ch].as_f64().unwrap();
        let i = json["larmor_time_integral"][ch].as_f64().unwrap();
        let p = json["precession"][ch]["extrapolated"].as_f64().unwrap_or(f64::NAN);
        details.push(format!("{ch}: spectral {s:.8}, time integral {i:.8}, precession {p:.8}"));
        details.push(c.at_most(&format!("{ch} |integral - spectral| / spectral"), rel(i, s), 0.01));
        details.push(c.at_most(&format!("{ch} |precession - spectral| / spectral"), rel(p, s), 0.01));
        details.push(c.at_most(&format!("{ch} |precession - integral| / integral"), rel(p, i), 0.01));
    }
    let secs = t0.elapsed().as_secs_f64();
    details.push(c.at_most("runtime [s]", secs, 300.0));
    report(6, "Larmor consistency triangle (k0 l0 = 4)", c, details, t0)
}

fn clock_offsets() -> bool {
    let t0 = Instant::now();
    let mut c = Check::new();
    let pool = batch::pool(None).unwrap();
    let r = rect(1.0, 200.0, 1.0);
    let b: Barrier = r.into();
    let spec = GaussianSpec::new(1.0, 15.0, 0.0).unwrap();
    let kg = build_kgrid(&spec, 1e-8, 256).unwrap();
    let ode = OdeSettings::default();
    let family: Vec<SpinorPacket> = [1e-3, 5e-4]
        .iter()
        .map(|&w| batch::spinor(&pool, &b, spec, &kg, w, U, &ode).unwrap())
        .collect();
    let grid = family[0].up.covering_grid(0.0, 8.0, 0.05).unwrap();
    let tau0 = tau0_rect(&r, 1.0, U).unwrap();
    let tauz = tauz_rect(&r, 1.0, U).unwrap();
    let mut details = vec![format!("closed forms at k0 = 1: tau_0 = {tau0:.8}, tau_z = {tauz:.8}")];
    // transmission reads (+tau_0, +tau_z); reflection reads (-tau_0, -tau_z)
    for (kind, sign) in [(Channel::Transmission, 1.0), (Channel::Reflection, -1.0)] {
        let (phi, theta) = clock_offset_rates(&family, kind, &grid, U).unwrap();
        let name = kind.name();
        details.push(format!(
            "{name}: phi0/omega = {:.8}, (pi/2 - theta0)/omega = {:.8}",
            phi.extrapolated, theta.extrapolated
        ));
        details.push(c.at_most(
            &format!("{name} |phi0/omega - ({sign:+}) tau_0| / |tau_0|"),
            rel(phi.extrapolated, sign * tau0),
            0.01,
        ));
        details.push(c.at_most(
            &format!("{name} |(pi/2 - theta0)/omega - ({sign:+}) tau_z| / |tau_z|"),
            rel(theta.extrapolated, sign * tauz),
            0.01,
        ));
    }
    report(7, "clock offsets (V0 = 1, d = 1, k0 = 1, l0 = 15)", c, details, t0)
}

fn zero_identity() -> bool {
    let t0 = Instant::now();
    let mut c = Check::new();
    let mut details = Vec::new();

    let d = 1.5;
    let free: Barrier = SampledSymmetricBarrier::new(10.0, d, vec![0.0; 11]).unwrap().into();
    let flat = rect(1e-12, 10.0, d);
    let (mut wt, mut wj, mut wd) = (0.0f64, 0.0f64, 0.0f64);
    for k in [0.3, 1.0, 2.7] {
        let sol = solve(&free, k);
        let p = sol.params();
        wt = wt.max((p.transmission - 1.0).abs());
        wj = wj.max(wrap(p.phase - k * d).abs());
        let expect = U.mass * d / (U.hbar * k);
        wd = wd
            .max(rel(dwell_tr_numeric(&sol, QUAD_RTOL).unwrap(), expect))
            .max(rel(dwell_tr_rect(&flat, k, U).unwrap(), expect));
    }
    details.push(c.at_most("V = 0: max |T - 1|", wt, 1e-12));
    details.push(c.at_most("V = 0: max |J - k d| (mod 2 pi)", wj, 1e-9));
    details.push(c.at_most("V = 0 (numeric; closed form at V0 = 1e-12): max |tau_dwell_tr - m d/(hbar k)| relative", wd, 1e-9));

    let (mut rt, mut rz) = (0.0f64, 0.0f64);
    for n in 1..=4 {
        let r = rect(0.5, 10.0, n as f64 * PI);
        let b = Barrier::from(r);
        let k = 2f64.sqrt();
        let sol = solve(&b, k);
        rt = rt.max((sol.params().transmission - 1.0).abs());
        let dec = sol.decompose(&tunnelsplit_core::default_xgrid(&b, k, None, 1024)).unwrap();
        let peak = dec.psi_full.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        rz = rz.max(dec.psi_ref.iter().fold(0.0f64, |m, z| m.max(z.norm())) / peak);
    }
    details.push(c.at_most("kappa d = n pi (n = 1..4): max |T - 1|", rt, 1e-12));
    details.push(c.at_most("kappa d = n pi: max |psi_ref| / max |psi_full|", rz, 1e-10));

    let pool = batch::pool(None).unwrap();
    let b: Barrier = rect(1.0, 40.0, 1.0).into();
    let spec = GaussianSpec::new(1.0, 4.0, 0.0).unwrap();
    let kg = build_kgrid(&spec, 1e-8, 128).unwrap();
    let ode = OdeSettings::default();
    let scalar = Packet::new(&b, spec, kg.clone(), U, &ode).unwrap();
    let spinor = batch::spinor(&pool, &b, spec, &kg, 0.0, U, &ode).unwrap();
    let direct = SpinorPacket::new(&b, spec, kg, 0.0, U, &ode).unwrap();
    let xs = scalar.covering_grid(60.0, 6.0, 0.1).unwrap().points();
    let mut identical = spinor == direct;
    for t in [0.0, 30.0, 60.0] {
        for kind in Channel::ALL {
            let s = scalar.sample(kind, t, &xs);
            identical &= spinor.up.sample(kind, t, &xs) == s && spinor.down.sample(kind, t, &xs) == s;
        }
    }
    details.push(c.holds("omega = 0 spinor vs scalar packet", identical, "bitwise identical".into()));
    report(8, "zero and identity cases", c, details, t0)
}

fn determinism() -> bool {
    let t0 = Instant::now();
    let mut c = Check::new();
    let times_cfg = RunConfig::with_overrides(
        None,
        &[
            "scan.k_points=16".into(),
            "barrier.left=40.0".into(),
            "packet.k0=1.0".into(),
            "packet.l0=4.0".into(),
            "grids.n_k=128".into(),
        ],
    )
    .unwrap();
    let mut sampled_cfg = RunConfig::with_overrides(None, &["scan.k_points=8".into()]).unwrap();
    sampled_cfg.barrier = tunnelsplit::config::BarrierConfig::Sampled {
        file: None,
        values: Some((0..=40).map(|i| 1.0 - ((i as f64 - 20.0) / 20.0).powi(2)).collect()),
        left: Some(10.0),
        width: Some(1.0),
    };
    let hartman_cfg = RunConfig::default();
    let mut details = Vec::new();
    for (label, cmd, cfg) in [
        ("times (rectangular + packet summary)", tunnelsplit::Command::Times, &times_cfg),
        ("times (sampled)", tunnelsplit::Command::Times, &sampled_cfg),
        ("hartman", tunnelsplit::Command::Hartman, &hartman_cfg),
    ] {
        let render = |threads| {
            let pool = batch::pool(Some(threads)).unwrap();
            let out = tunnelsplit::run(cmd, cfg, &pool).unwrap();
            (out.render(Format::Csv, 17).unwrap(), out.render(Format::Json, 17).unwrap())
        };
        let one = render(1);
        let same = [4, 8].into_iter().all(|n| render(n) == one);
        details.push(c.holds(label, same, format!("{} CSV bytes, 1/4/8 threads identical = {same}", one.0.len())));
    }
    report(9, "determinism across thread counts", c, details, t0)
}

fn main() {
    let results = [
        unitarity(),
        decomposition(),
        dwell_closed_forms(),
        hartman(),
        packet_invariants(),
        larmor_triangle(),
        clock_offsets(),
        zero_identity(),
        determinism(),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    eprintln!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
