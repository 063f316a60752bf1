//! Run configuration: a TOML file whose keys may be overridden from the
//! command line.
//!
//! ```toml
//! [units]
//! hbar = 1.0
//! mass = 1.0
//!
//! [barrier]
//! kind = "rectangular"        # or "sampled"
//! height = 1.0
//! left = 10.0
//! width = 1.0
//! # sampled: `file = "v.csv"` (comma-separated x,V rows on a uniform grid) or
//! # `values = [...]` together with `left` and `width`
//!
//! [packet]
//! k0 = 1.0
//! l0 = 4.0
//! x0 = 0.0
//!
//! [grids]
//! n_k = 256
//! n_x = 2048
//! dx = 0.05
//!
//! [scan]
//! k_min = 0.2
//! k_max = 2.0
//! k_points = 10
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tunnelsplit_core::{
    Barrier, GaussianSpec, OdeSettings, RectangularBarrier, SampledSymmetricBarrier,
    TimeIntegralOptions, TimeOptions, UnitsContext,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub units: UnitsConfig,
    pub barrier: BarrierConfig,
    pub packet: Option<PacketConfig>,
    pub grids: GridConfig,
    pub tolerances: ToleranceConfig,
    pub scan: ScanConfig,
    pub larmor: LarmorConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            units: UnitsConfig::default(),
            barrier: BarrierConfig::Rectangular {
                height: 1.0,
                left: 10.0,
                width: 1.0,
            },
            packet: None,
            grids: GridConfig::default(),
            tolerances: ToleranceConfig::default(),
            scan: ScanConfig::default(),
            larmor: LarmorConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UnitsConfig {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for UnitsConfig {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BarrierConfig {
    Rectangular {
        height: f64,
        left: f64,
        width: f64,
    },
    Sampled {
        /// Two-column `x,V` file; relative paths resolve against the config file.
        file: Option<PathBuf>,
        /// Alternatively, values on a uniform grid over `[left, left + width]`.
        values: Option<Vec<f64>>,
        left: Option<f64>,
        width: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub k0: f64,
    pub l0: f64,
    #[serde(default)]
    pub x0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Momentum nodes of packet quadratures.
    pub n_k: usize,
    /// Points of stationary output grids.
    pub n_x: usize,
    /// Padding around the barrier for stationary grids (default: four wavelengths).
    pub padding: Option<f64>,
    /// Spacing of packet spatial grids.
    pub dx: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n_k: 256,
            n_x: 2048,
            padding: None,
            dx: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub ode_rtol: f64,
    pub ode_atol: f64,
    pub quadrature: f64,
    /// Relative amplitude cutoff of the momentum support.
    pub eps_k: f64,
    /// Barrier occupancy at which the Larmor time window is closed.
    pub eps_t: f64,
    /// Relative step of the stationary-phase derivative.
    pub phase_step: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            ode_rtol: 1e-10,
            ode_atol: 1e-12,
            quadrature: 1e-8,
            eps_k: 1e-8,
            eps_t: 1e-10,
            phase_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub k_points: usize,
    /// Single wavenumber for `decompose` and `hartman`.
    pub k: f64,
    /// Packet time for `decompose`; stationary output when absent.
    pub t: Option<f64>,
    pub d_min: f64,
    pub d_max: f64,
    pub d_points: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            k_min: 0.2,
            k_max: 2.0,
            k_points: 10,
            k: 1.0,
            t: None,
            d_min: 6.0,
            d_max: 12.0,
            d_points: 13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LarmorConfig {
    /// Larmor frequencies in units of `hbar k0^2 / m`.
    pub omegas: Vec<f64>,
    /// Separation, in packet widths, that defines the late time.
    pub n_sigma: f64,
    /// Snapshots per frequency in the angle series.
    pub n_times: usize,
    /// Relative agreement required between the precession and spectral routes.
    pub tolerance: f64,
}

impl Default for LarmorConfig {
    fn default() -> Self {
        Self {
            omegas: vec![1e-3, 5e-4],
            n_sigma: 6.0,
            n_times: 9,
            tolerance: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: Format,
    /// Significant digits of CSV numbers.
    pub precision: usize,
    pub path: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            precision: 17,
            path: None,
        }
    }
}

impl RunConfig {
    /// Reads and validates a config file.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        let mut cfg = Self::parse(&text, path)?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    /// Parses TOML text; `origin` only labels diagnostics.
    pub fn parse(text: &str, origin: &Path) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Parse {
            path: origin.to_owned(),
            message: e.to_string().trim_end().to_owned(),
        })
    }

    /// Loads `path` (or the defaults) and applies `key.path=value` overrides,
    /// where `value` is a TOML value; bare words are taken as strings.
    /// Override paths are relative to the working directory.
    pub fn with_overrides(path: Option<&Path>, overrides: &[String]) -> CliResult<Self> {
        let base = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if overrides.is_empty() {
            return Ok(base);
        }
        let mut tree = toml::Table::try_from(&base).map_err(|e| CliError::invalid("config", e.to_string()))?;
        for item in overrides {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| CliError::invalid("--set", format!("expected key=value, got `{item}`")))?;
            let value = parse_value(raw.trim());
            set_path(&mut tree, key.trim(), value)?;
        }
        toml::Value::Table(tree).try_into().map_err(|e: toml::de::Error| CliError::Parse {
            path: "--set".into(),
            message: e.message().to_owned(),
        })
    }

    fn resolve_paths(&mut self, base: &Path) {
        if let BarrierConfig::Sampled { file: Some(f), .. } = &mut self.barrier {
            if f.is_relative() {
                *f = base.join(&*f);
            }
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(CliError::invalid(field, format!("must be positive and finite, got {v}")))
            }
        };
        positive("units.hbar", self.units.hbar)?;
        positive("units.mass", self.units.mass)?;
        let t = &self.tolerances;
        positive("tolerances.ode_rtol", t.ode_rtol)?;
        positive("tolerances.ode_atol", t.ode_atol)?;
        positive("tolerances.quadrature", t.quadrature)?;
        positive("tolerances.eps_k", t.eps_k)?;
        positive("tolerances.eps_t", t.eps_t)?;
        positive("tolerances.phase_step", t.phase_step)?;
        if t.eps_k >= 1.0 {
            return Err(CliError::invalid("tolerances.eps_k", "must be below 1"));
        }
        if self.grids.n_k < 64 {
            return Err(CliError::invalid("grids.n_k", "must be at least 64"));
        }
        if self.grids.n_x < 256 {
            return Err(CliError::invalid("grids.n_x", "must be at least 256"));
        }
        positive("grids.dx", self.grids.dx)?;
        if let Some(p) = self.grids.padding {
            positive("grids.padding", p)?;
        }
        let s = &self.scan;
        positive("scan.k_min", s.k_min)?;
        positive("scan.k_max", s.k_max)?;
        positive("scan.k", s.k)?;
        if s.k_max < s.k_min {
            return Err(CliError::invalid("scan.k_max", "must not be below scan.k_min"));
        }
        if s.k_points == 0 {
            return Err(CliError::invalid("scan.k_points", "must be at least 1"));
        }
        positive("scan.d_min", s.d_min)?;
        positive("scan.d_max", s.d_max)?;
        if s.d_max < s.d_min {
            return Err(CliError::invalid("scan.d_max", "must not be below scan.d_min"));
        }
        if s.d_points == 0 {
            return Err(CliError::invalid("scan.d_points", "must be at least 1"));
        }
        if let Some(tt) = s.t {
            if !tt.is_finite() {
                return Err(CliError::invalid("scan.t", "must be finite"));
            }
        }
        let l = &self.larmor;
        if l.omegas.len() < 2 || l.omegas.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(CliError::invalid("larmor.omegas", "need at least two positive frequencies"));
        }
        if l.omegas[0] == l.omegas[1] {
            return Err(CliError::invalid("larmor.omegas", "the first two frequencies must differ"));
        }
        positive("larmor.n_sigma", l.n_sigma)?;
        positive("larmor.tolerance", l.tolerance)?;
        if l.n_times < 2 {
            return Err(CliError::invalid("larmor.n_times", "must be at least 2"));
        }
        if !(1..=17).contains(&self.output.precision) {
            return Err(CliError::invalid("output.precision", "must lie between 1 and 17"));
        }
        if let Some(p) = &self.packet {
            positive("packet.k0", p.k0)?;
            positive("packet.l0", p.l0)?;
            if !p.x0.is_finite() {
                return Err(CliError::invalid("packet.x0", "must be finite"));
            }
        }
        self.build_barrier()?;
        Ok(())
    }

    pub fn units(&self) -> CliResult<UnitsContext> {
        UnitsContext::new(self.units.hbar, self.units.mass)
            .map_err(|e| CliError::invalid("units", e.to_string()))
    }

    pub fn ode(&self) -> OdeSettings {
        OdeSettings {
            rtol: self.tolerances.ode_rtol,
            atol: self.tolerances.ode_atol,
            ..OdeSettings::default()
        }
    }

    pub fn time_options(&self) -> TimeOptions {
        TimeOptions {
            ode: self.ode(),
            quad_rtol: self.tolerances.quadrature,
            phase_step: self.tolerances.phase_step,
            ..TimeOptions::default()
        }
    }

    pub fn time_integral_options(&self) -> TimeIntegralOptions {
        TimeIntegralOptions {
            eps_t: self.tolerances.eps_t,
            rtol: self.tolerances.quadrature,
            ..TimeIntegralOptions::default()
        }
    }

    pub fn packet_spec(&self) -> CliResult<GaussianSpec> {
        let p = self
            .packet
            .ok_or_else(|| CliError::invalid("packet", "this command needs a [packet] section"))?;
        GaussianSpec::new(p.k0, p.l0, p.x0).map_err(|e| CliError::invalid("packet", e.to_string()))
    }

    pub fn build_barrier(&self) -> CliResult<Barrier> {
        let bad = |e: tunnelsplit_core::Error| CliError::invalid("barrier", e.to_string());
        match &self.barrier {
            BarrierConfig::Rectangular { height, left, width } => {
                Ok(RectangularBarrier::new(*height, *left, *width).map_err(bad)?.into())
            }
            BarrierConfig::Sampled {
                file,
                values,
                left,
                width,
            } => match (file, values) {
                (Some(path), None) => {
                    if left.is_some() || width.is_some() {
                        return Err(CliError::invalid(
                            "barrier",
                            "left and width come from the sample file",
                        ));
                    }
                    let samples = read_samples(path)?;
                    Ok(SampledSymmetricBarrier::from_samples(&samples).map_err(bad)?.into())
                }
                (None, Some(v)) => {
                    let (Some(l), Some(w)) = (left, width) else {
                        return Err(CliError::invalid("barrier", "values need left and width"));
                    };
                    Ok(SampledSymmetricBarrier::new(*l, *w, v.clone()).map_err(bad)?.into())
                }
                _ => Err(CliError::invalid("barrier", "give exactly one of file or values")),
            },
        }
    }
}

/// Reads comma-separated `x,V` rows. `#` comments are skipped, as is a
/// non-numeric header row.
pub fn read_samples(path: &Path) -> CliResult<Vec<(f64, f64)>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::invalid(&path.display().to_string(), e.to_string()))?;
    let mut out = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(|e| CliError::invalid(&path.display().to_string(), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let parsed: Option<Vec<f64>> = record.iter().map(|f| f.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 => out.push((v[0], v[1])),
            None if i == 0 => continue,
            _ => {
                return Err(CliError::invalid(
                    &format!("{}:{line}", path.display()),
                    "expected two numbers `x,V`",
                ))
            }
        }
    }
    Ok(out)
}

fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_owned()))
}

fn set_path(tree: &mut toml::Table, key: &str, value: toml::Value) -> CliResult<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| CliError::invalid("--set", "empty key"))?;
    let mut node = tree;
    for p in parts {
        let entry = node
            .entry(p.to_owned())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| CliError::invalid(key, format!("`{p}` is not a table")))?;
    }
    node.insert(last.to_owned(), value);
    Ok(())
}
