use std::path::Path;
use std::process::{Command, Output};

use tunnelsplit::commands::{self, linspace};
use tunnelsplit::output::parse_csv;
use tunnelsplit::{batch, run, Format, RunConfig};
use tunnelsplit_core::{rect_tunneling_params, RectangularBarrier, UnitsContext};

fn bin(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tunnelsplit"));
    c.args(args).env_remove("TUNNELSPLIT_THREADS");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const RECT: &str = "[barrier]\nkind = \"rectangular\"\nheight = 1.0\nleft = 10.0\nwidth = 1.0\n\n[scan]\nk_min = 0.2\nk_max = 2.5\nk_points = 24\n";

#[test]
fn params_header_and_line_endings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", RECT);
    let out = bin(&["params", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("k,E,T,R,J,F\n"));
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    assert_eq!(text.lines().count(), 25);
}

#[test]
fn params_scan_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", RECT);
    let out = bin(&["params", "--config", &cfg], &[]);
    let table = parse_csv(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let rect = RectangularBarrier::new(1.0, 10.0, 1.0).unwrap();
    let ks = linspace(0.2, 2.5, 24);
    for (row, k) in table.rows.iter().zip(ks) {
        assert_eq!(row[0], k);
        assert!((row[1] - 0.5 * k * k).abs() < 1e-15);
        let p = rect_tunneling_params(&rect, k, UnitsContext::NATURAL).unwrap();
        assert!((row[2] - p.transmission).abs() < 1e-10, "k={k}");
        assert!((row[3] - p.reflection).abs() < 1e-10, "k={k}");
        assert!((row[4] - p.phase).abs() < 1e-9, "k={k}");
        assert_eq!(row[5], p.flip);
    }
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let cfg = RunConfig::default();
    let pool = batch::pool(Some(1)).unwrap();
    for cmd in [tunnelsplit::Command::Params, tunnelsplit::Command::Times] {
        let out = run(cmd, &cfg, &pool).unwrap();
        let text = out.render(Format::Csv, 17).unwrap();
        let back = parse_csv(&text).unwrap();
        assert_eq!(back.columns, out.table().columns);
        for (a, b) in back.rows.iter().zip(&out.table().rows) {
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }
}

#[test]
fn json_round_trip_is_bit_exact() {
    let cfg = RunConfig::default();
    let pool = batch::pool(Some(1)).unwrap();
    let out = run(tunnelsplit::Command::Params, &cfg, &pool).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out.render(Format::Json, 17).unwrap()).unwrap();
    let rows = v["rows"].as_array().unwrap();
    for (a, b) in rows.iter().zip(&out.table().rows) {
        for (x, y) in a.as_array().unwrap().iter().zip(b) {
            assert_eq!(x.as_f64().unwrap().to_bits(), y.to_bits());
        }
    }
}

#[test]
fn unknown_barrier_kind_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", "[barrier]\nkind = \"triangle\"\nheight = 1.0\n");
    let out = bin(&["params", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("triangle"), "{err}");
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn validation_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    for (extra, field) in [
        ("[grids]\nn_k = 32\n", "grids.n_k"),
        ("[grids]\nn_x = 100\n", "grids.n_x"),
        ("[tolerances]\node_rtol = 0.0\n", "tolerances.ode_rtol"),
        ("[tolerances]\neps_t = -1e-3\n", "tolerances.eps_t"),
        ("[units]\nmass = -1.0\n", "units.mass"),
        ("[larmor]\nomegas = [1e-3]\n", "larmor.omegas"),
    ] {
        let cfg = write(dir.path(), "run.toml", &format!("{RECT}\n{extra}"));
        let out = bin(&["params", "--config", &cfg], &[]);
        assert_eq!(out.status.code(), Some(2), "{extra}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains(field), "{err}");
    }
}

#[test]
fn syntax_errors_carry_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", "[scan]\nk_min = 0.5\nk_max = = 2\n");
    let out = bin(&["params", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 3"));
}

#[test]
fn missing_config_and_bad_flags_are_usage_errors() {
    assert_eq!(bin(&["params", "--config", "/nonexistent/run.toml"], &[]).status.code(), Some(2));
    assert_eq!(bin(&["params", "--format", "xml"], &[]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"], &[]).status.code(), Some(2));
    assert_eq!(bin(&["params", "--threads", "0"], &[]).status.code(), Some(2));
    assert_eq!(bin(&["params"], &[("TUNNELSPLIT_THREADS", "0")]).status.code(), Some(2));
    assert_eq!(bin(&["params", "--set", "scan.k_points"], &[]).status.code(), Some(2));
    assert_eq!(bin(&["params", "--set", "scan.bogus=1"], &[]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exit_code() {
    // T ~ e^-800 underflows every transmission-normalised time
    let out = bin(&["times", "--set", "barrier.width=400.0", "--set", "scan.k_points=1"], &[]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn flags_override_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", RECT);
    let dest = dir.path().join("out.json");
    let out = bin(
        &[
            "params", "--config", &cfg, "--format", "json", "--out", dest.to_str().unwrap(),
            "--set", "scan.k_points=3", "--threads", "2",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(v["columns"][2], "T");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn precision_limits_significant_digits() {
    let out = bin(&["params", "--set", "output.precision=6", "--set", "scan.k_points=2"], &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.lines().nth(1).unwrap();
    assert_eq!(first.split(',').next().unwrap(), "2.00000e-1");
}

#[test]
fn sampled_barrier_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = String::from("x,V\n");
    for i in 0..=100 {
        let x = 10.0 + i as f64 / 100.0;
        rows.push_str(&format!("{x},1.0\n"));
    }
    write(dir.path(), "v.csv", &rows);
    let cfg = write(
        dir.path(),
        "run.toml",
        "[barrier]\nkind = \"sampled\"\nfile = \"v.csv\"\n[scan]\nk_min = 0.5\nk_max = 1.5\nk_points = 5\n",
    );
    let out = bin(&["params", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = parse_csv(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let rect = RectangularBarrier::new(1.0, 10.0, 1.0).unwrap();
    for row in &table.rows {
        let p = rect_tunneling_params(&rect, row[0], UnitsContext::NATURAL).unwrap();
        assert!((row[2] - p.transmission).abs() < 1e-9);
    }
}

#[test]
fn hartman_needs_a_rectangular_barrier() {
    let out = bin(
        &["hartman", "--set", "barrier={kind=\"sampled\",values=[0.5,1.0,0.5],left=2.0,width=1.0}"],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("barrier.kind"));
}

#[test]
fn decompose_stationary_and_packet() {
    let pool = batch::pool(Some(1)).unwrap();
    let mut cfg = RunConfig::default();
    cfg.grids.n_x = 400;
    let out = commands::decompose(&cfg, &pool).unwrap();
    let t = out.table();
    assert_eq!(t.columns.join(","), "x,re_full,im_full,re_tr,im_tr,re_ref,im_ref,flux_tr,flux_ref");
    assert_eq!(t.rows.len(), 400);
    let trans = t.rows[0][7];
    for r in &t.rows {
        assert!((r[1] - r[3] - r[5]).abs() < 1e-12 && (r[2] - r[4] - r[6]).abs() < 1e-12);
        assert!((r[7] - trans).abs() < 1e-8 && r[8].abs() < 1e-8);
    }

    cfg = RunConfig::with_overrides(
        None,
        &["packet.k0=1.0".into(), "packet.l0=4.0".into(), "barrier.left=40.0".into(), "scan.t=30.0".into(), "grids.n_k=64".into()],
    )
    .unwrap();
    cfg.validate().unwrap();
    let out = commands::decompose(&cfg, &pool).unwrap();
    for r in &out.table().rows {
        assert!((r[1] - r[3] - r[5]).abs() < 1e-12 && (r[2] - r[4] - r[6]).abs() < 1e-12);
        if r[0] >= 40.5 {
            assert_eq!((r[5], r[6], r[8]), (0.0, 0.0, 0.0));
        }
    }
}

#[test]
fn decompose_packet_needs_packet_section() {
    let out = bin(&["decompose", "--set", "scan.t=1.0"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("packet"));
}

#[test]
fn times_summary_only_in_json() {
    let pool = batch::pool(Some(1)).unwrap();
    let cfg = RunConfig::with_overrides(
        None,
        &["packet.k0=1.0".into(), "packet.l0=4.0".into(), "barrier.left=40.0".into(), "scan.k_points=2".into(), "grids.n_k=128".into()],
    )
    .unwrap();
    let out = run(tunnelsplit::Command::Times, &cfg, &pool).unwrap();
    let csv = out.render(Format::Csv, 17).unwrap();
    assert!(csv.starts_with("k,tau_dwell_tr,tau_dwell_ref,tau_0,tau_z,tau_smith,tau_bohm,tau_phase\n"));
    let v: serde_json::Value = serde_json::from_str(&out.render(Format::Json, 17).unwrap()).unwrap();
    let s = &v["summary"];
    let (t, r) = (s["transmission"].as_f64().unwrap(), s["reflection"].as_f64().unwrap());
    assert!((t + r - 1.0).abs() < 1e-10);
    for ch in ["tr", "ref"] {
        let a = s["larmor_spectral"][ch].as_f64().unwrap();
        let b = s["larmor_time_integral"][ch].as_f64().unwrap();
        assert!(((a - b) / a).abs() < 1e-4, "{ch}: {a} vs {b}");
    }
}

#[test]
fn config_file_round_trips_through_toml() {
    let mut cfg = RunConfig::default();
    cfg.packet = Some(tunnelsplit::config::PacketConfig { k0: 1.0, l0: 4.0, x0: -3.0 });
    cfg.scan.t = Some(12.5);
    cfg.larmor.omegas = vec![0.1 + 0.2, 1e-3 / 3.0];
    let text = toml::to_string(&cfg).unwrap();
    let back = RunConfig::parse(&text, Path::new("mem")).unwrap();
    assert_eq!(back, cfg);
}
