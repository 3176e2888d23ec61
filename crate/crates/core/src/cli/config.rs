use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{DefectForm, Directions, DEFAULT_QUADRATURE_POINTS};
use crate::model::{InitialKind, InitialSpec, ModelParams, Variant};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub dim: usize,
    pub n: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { dim: 3, n: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub alpha: f64,
    pub nu: f64,
    pub diff_d: f64,
    #[serde(rename = "K")]
    pub k_rate: f64,
    #[serde(rename = "A")]
    pub activation: f64,
    pub theta_i: f64,
    pub theta_bar: f64,
    pub variant: Variant,
}

impl Default for ModelSection {
    fn default() -> Self {
        let p = ModelParams::default();
        ModelSection {
            alpha: p.alpha,
            nu: p.nu,
            diff_d: p.diff_d,
            k_rate: p.k_rate,
            activation: p.activation,
            theta_i: p.theta_i,
            theta_bar: p.theta_bar,
            variant: Variant::Inviscid,
        }
    }
}

impl ModelSection {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            alpha: self.alpha,
            nu: self.nu,
            diff_d: self.diff_d,
            k_rate: self.k_rate,
            activation: self.activation,
            theta_i: self.theta_i,
            theta_bar: self.theta_bar,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeSection {
    /// Zero selects `cfl_safety·Δx/max|v|` from the initial state.
    pub dt: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
}

impl Default for TimeSection {
    fn default() -> Self {
        TimeSection {
            dt: 2e-3,
            t_end: 2.0,
            cfl_safety: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IcSection {
    pub kind: InitialKind,
    pub amplitude: f64,
    pub seed: u64,
    pub slope: f64,
    pub kmax: f64,
    pub z_amplitude: f64,
    pub z_mean: f64,
}

impl Default for IcSection {
    fn default() -> Self {
        let s = InitialSpec::default();
        IcSection {
            kind: InitialKind::TaylorGreen,
            amplitude: s.amplitude,
            seed: s.seed,
            slope: s.slope,
            kmax: s.kmax,
            z_amplitude: s.z_amplitude,
            z_mean: s.z_mean,
        }
    }
}

impl IcSection {
    pub fn spec(&self) -> InitialSpec {
        InitialSpec {
            amplitude: self.amplitude,
            seed: self.seed,
            slope: self.slope,
            kmax: self.kmax,
            z_amplitude: self.z_amplitude,
            z_mean: self.z_mean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub series_every: usize,
    /// Zero writes only the final snapshot.
    pub snapshot_every: usize,
    pub out_dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            series_every: 10,
            snapshot_every: 0,
            out_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FluxSection {
    pub kappas: Vec<f64>,
    /// Fit window; both zero disables the slope fit.
    pub fit_min: f64,
    pub fit_max: f64,
}

impl Default for FluxSection {
    fn default() -> Self {
        FluxSection {
            kappas: (1..=16).map(f64::from).collect(),
            fit_min: 0.0,
            fit_max: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DefectSection {
    pub eps_list: Vec<f64>,
    pub form: DefectForm,
    pub quadrature_points: usize,
    /// Largest accepted relative discrepancy between the two forms.
    pub tolerance: f64,
}

impl Default for DefectSection {
    fn default() -> Self {
        DefectSection {
            eps_list: vec![0.4, 0.2, 0.1],
            form: DefectForm::Both,
            quadrature_points: DEFAULT_QUADRATURE_POINTS,
            tolerance: 1e-2,
        }
    }
}

/// `p` and `q` accept a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Index {
    Finite(f64),
    Named(IndexName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexName {
    Inf,
}

impl Index {
    pub fn value(self) -> f64 {
        match self {
            Index::Finite(v) => v,
            Index::Named(IndexName::Inf) => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BesovSection {
    pub s: f64,
    pub p: Index,
    pub q: Index,
    /// Separations for the structure function; empty selects grid multiples
    /// `2^m h` below `xi_max`.
    pub xi_list: Vec<f64>,
    pub xi_max: f64,
    pub directions: Directions,
    /// Which snapshot field to analyze: `u`, `v` or `Z`.
    pub field: String,
}

impl Default for BesovSection {
    fn default() -> Self {
        BesovSection {
            s: 1.0 / 3.0,
            p: Index::Finite(3.0),
            q: Index::Named(IndexName::Inf),
            xi_list: Vec::new(),
            xi_max: 0.25,
            directions: Directions::Axes,
            field: "u".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IncrementsSection {
    pub xi_list: Vec<f64>,
    pub directions: Directions,
}

impl Default for IncrementsSection {
    fn default() -> Self {
        IncrementsSection {
            xi_list: vec![0.025, 0.05, 0.1, 0.2, 0.4, 0.8],
            directions: Directions::Axes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BurgersSection {
    pub sigma: f64,
    pub n: usize,
    pub eps_list: Vec<f64>,
}

impl Default for BurgersSection {
    fn default() -> Self {
        BurgersSection {
            sigma: 1.0,
            n: 4096,
            eps_list: vec![0.4, 0.2, 0.1, 0.05],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub alpha_list: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            alpha_list: vec![0.5, 0.25, 0.125],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BalanceSection {
    pub eps_list: Vec<f64>,
    pub dt_list: Vec<f64>,
    /// Time of the middle snapshot of each window.
    pub t_center: f64,
    pub chi_center: [f64; 3],
    pub chi_radius: f64,
}

impl Default for BalanceSection {
    fn default() -> Self {
        BalanceSection {
            eps_list: vec![0.2, 0.1],
            dt_list: vec![2e-3, 1e-3],
            t_center: 0.1,
            chi_center: [1.0, 2.0, 0.5],
            chi_radius: 1.5,
        }
    }
}

/// Complete run configuration; every section is optional in the file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub model: ModelSection,
    pub time: TimeSection,
    pub ic: IcSection,
    pub output: OutputSection,
    pub flux: FluxSection,
    pub defect: DefectSection,
    pub besov: BesovSection,
    pub increments: IncrementsSection,
    pub burgers: BurgersSection,
    pub sweep: SweepSection,
    pub balance: BalanceSection,
}

/// A configuration problem, anchored to a line of the source when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub source: String,
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.source)?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
        }
        if let Some(key) = &self.key {
            write!(f, ": key `{key}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of `key = …` inside `[section]`, or of the section header when the
/// key is absent.
fn locate(text: &str, section: &str, key: Option<&str>) -> Option<usize> {
    let mut current = String::new();
    let mut header = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                header = Some(i + 1);
            }
            continue;
        }
        if current != section {
            continue;
        }
        if let Some(k) = key {
            let lhs = line.split('=').next().unwrap_or("").trim().trim_matches('"');
            if line.contains('=') && lhs == k {
                return Some(i + 1);
            }
        }
    }
    header
}

/// Parse a `section.key=value` override; values are read as TOML and fall
/// back to plain strings.
pub fn parse_override(spec: &str) -> Result<(String, String, toml::Value), ConfigError> {
    let err = |message: String| ConfigError {
        source: "--set".into(),
        line: None,
        key: Some(spec.to_string()),
        message,
    };
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| err("expected section.key=value".into()))?;
    let (section, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| err("expected section.key=value".into()))?;
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    Ok((section.to_string(), key.to_string(), value))
}

/// Parsed configuration plus the text it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    /// Canonical TOML of the effective configuration (after overrides).
    pub canonical: String,
    pub overrides: Vec<String>,
}

pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<LoadedConfig, ConfigError> {
    let (source, text) = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| ConfigError {
                source: p.display().to_string(),
                line: None,
                key: None,
                message: format!("cannot read configuration: {e}"),
            })?;
            (p.display().to_string(), text)
        }
        None => ("<defaults>".to_string(), String::new()),
    };
    parse(&source, &text, overrides)
}

pub fn parse(source: &str, text: &str, overrides: &[String]) -> Result<LoadedConfig, ConfigError> {
    let mut table: toml::Table = toml::from_str(text).map_err(|e: toml::de::Error| ConfigError {
        source: source.to_string(),
        line: e.span().map(|s| line_of_offset(text, s.start)),
        key: None,
        message: e.message().to_string(),
    })?;
    // Typed parse of the file alone keeps spans for file errors.
    if let Err(e) = toml::from_str::<RunConfig>(text) {
        let message = e.message().lines().next().unwrap_or_default().to_string();
        let (section, key) = blame(e.message(), &table);
        let mut err = anchored(source, text, &[], section.as_deref(), key.as_deref(), message);
        if let Some(span) = e.span() {
            err.line = Some(line_of_offset(text, span.start));
        }
        return Err(err);
    }
    let mut overridden = Vec::new();
    for spec in overrides {
        let (section, key, value) = parse_override(spec)?;
        let entry = table
            .entry(section.clone())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        match entry {
            toml::Value::Table(t) => {
                t.insert(key.clone(), value);
            }
            _ => {
                return Err(ConfigError {
                    source: "--set".into(),
                    line: None,
                    key: Some(spec.clone()),
                    message: format!("`{section}` is not a section"),
                })
            }
        }
        overridden.push(format!("{section}.{key}"));
    }

    let config: RunConfig = RunConfig::deserialize(toml::Value::Table(table.clone())).map_err(|e| {
        let full = e.to_string();
        let (section, key) = blame(&full, &table);
        let message = full.lines().next().unwrap_or_default().to_string();
        anchored(source, text, &overridden, section.as_deref(), key.as_deref(), message)
    })?;
    if let Err((section, key, message)) = validate(&config) {
        return Err(anchored(source, text, &overridden, Some(section), Some(key), message));
    }
    let canonical = toml::to_string(&config).expect("configuration serializes");
    Ok(LoadedConfig {
        config,
        canonical,
        overrides: overrides.to_vec(),
    })
}

fn anchored(
    source: &str,
    text: &str,
    overridden: &[String],
    section: Option<&str>,
    key: Option<&str>,
    message: String,
) -> ConfigError {
    let full = match (section, key) {
        (Some(s), Some(k)) => Some(format!("{s}.{k}")),
        (Some(s), None) => Some(s.to_string()),
        _ => None,
    };
    if let Some(f) = &full {
        if overridden.contains(f) {
            return ConfigError {
                source: "--set".into(),
                line: None,
                key: full,
                message,
            };
        }
    }
    ConfigError {
        source: source.to_string(),
        line: section.and_then(|s| locate(text, s, key)),
        key: full,
        message,
    }
}

/// Guess the section and key a serde message refers to by matching quoted
/// names against the table.
fn blame(message: &str, table: &toml::Table) -> (Option<String>, Option<String>) {
    if let Some(path) = message.split("in `").nth(1).and_then(|r| r.split('`').next()) {
        if let Some((section, key)) = path.split_once('.') {
            return (Some(section.to_string()), Some(key.to_string()));
        }
    }
    let quoted: Vec<&str> = message.split('`').skip(1).step_by(2).collect();
    for (name, value) in table {
        if let toml::Value::Table(inner) = value {
            for q in &quoted {
                if inner.contains_key(*q) {
                    return (Some(name.clone()), Some(q.to_string()));
                }
            }
        }
    }
    for q in &quoted {
        if table.contains_key(*q) {
            return (Some(q.to_string()), None);
        }
    }
    (None, None)
}

type Invalid = (&'static str, &'static str, String);

fn check(ok: bool, section: &'static str, key: &'static str, message: impl FnOnce() -> String) -> Result<(), Invalid> {
    if ok {
        Ok(())
    } else {
        Err((section, key, message()))
    }
}

fn validate(c: &RunConfig) -> Result<(), Invalid> {
    check(c.grid.dim == 1 || c.grid.dim == 3, "grid", "dim", || {
        format!("must be 1 or 3, got {}", c.grid.dim)
    })?;
    check(c.grid.n >= 8 && c.grid.n.is_multiple_of(2), "grid", "n", || {
        format!("must be even and >= 8, got {}", c.grid.n)
    })?;
    check(matches!(c.besov.field.as_str(), "u" | "v" | "Z"), "besov", "field", || {
        format!("must be one of u, v, Z, got {:?}", c.besov.field)
    })?;
    if let Err(crate::Error::InvalidParameter { name, reason }) = c.model.params().validate() {
        let key = match name.as_str() {
            "alpha" => "alpha",
            "nu" => "nu",
            "diff_d" => "diff_d",
            "K" => "K",
            "A" => "A",
            "theta_i" => "theta_i",
            _ => "theta_bar",
        };
        return Err(("model", key, reason));
    }
    check(c.time.dt >= 0.0 && c.time.dt.is_finite(), "time", "dt", || {
        format!("must be >= 0 (0 selects the CFL step), got {}", c.time.dt)
    })?;
    check(c.time.t_end >= 0.0 && c.time.t_end.is_finite(), "time", "t_end", || {
        format!("must be >= 0, got {}", c.time.t_end)
    })?;
    check(c.time.cfl_safety > 0.0 && c.time.cfl_safety <= 1.0, "time", "cfl_safety", || {
        format!("must lie in (0, 1], got {}", c.time.cfl_safety)
    })?;
    check(c.output.series_every >= 1, "output", "series_every", || "must be >= 1".into())?;
    check(c.flux.kappas.iter().all(|k| *k > 0.0), "flux", "kappas", || "must be positive".into())?;
    check(c.flux.kappas.windows(2).all(|w| w[1] > w[0]), "flux", "kappas", || {
        "must be strictly increasing".into()
    })?;
    check(c.flux.fit_min <= c.flux.fit_max, "flux", "fit_min", || "must not exceed fit_max".into())?;
    let eps_ok = |l: &[f64]| l.iter().all(|e| *e > 0.0 && *e < std::f64::consts::PI);
    check(eps_ok(&c.defect.eps_list), "defect", "eps_list", || "entries must lie in (0, π)".into())?;
    check(c.defect.quadrature_points >= 3, "defect", "quadrature_points", || "must be >= 3".into())?;
    check(c.defect.tolerance > 0.0, "defect", "tolerance", || "must be positive".into())?;
    check(c.besov.p.value() >= 1.0, "besov", "p", || "must lie in [1, inf]".into())?;
    check(c.besov.q.value() >= 1.0, "besov", "q", || "must lie in [1, inf]".into())?;
    check(c.besov.s.is_finite(), "besov", "s", || "must be finite".into())?;
    check(matches!(c.besov.field.as_str(), "u" | "v" | "Z"), "besov", "field", || {
        format!("must be u, v or Z, got `{}`", c.besov.field)
    })?;
    check(eps_ok(&c.besov.xi_list), "besov", "xi_list", || "entries must lie in (0, π)".into())?;
    check(eps_ok(&c.increments.xi_list), "increments", "xi_list", || "entries must lie in (0, π)".into())?;
    check(c.burgers.sigma > 0.0, "burgers", "sigma", || "must be positive".into())?;
    check(eps_ok(&c.burgers.eps_list), "burgers", "eps_list", || "entries must lie in (0, π)".into())?;
    check(c.sweep.alpha_list.iter().all(|a| *a >= 0.0), "sweep", "alpha_list", || {
        "entries must be >= 0".into()
    })?;
    check(eps_ok(&c.balance.eps_list), "balance", "eps_list", || "entries must lie in (0, π)".into())?;
    check(c.balance.dt_list.iter().all(|d| *d > 0.0), "balance", "dt_list", || "entries must be positive".into())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = parse("x", "", &[]).unwrap();
        assert_eq!(c.config, RunConfig::default());
        let again = parse("x", &c.canonical, &[]).unwrap();
        assert_eq!(again.config, c.config);
    }

    #[test]
    fn unknown_key_reports_name_and_line() {
        let text = "[grid]\nn = 16\n\n[model]\nalpha = 0.1\nalhpa = 0.2\n";
        let e = parse("run.toml", text, &[]).unwrap_err();
        assert_eq!(e.line, Some(6), "{e}");
        assert_eq!(e.key.as_deref(), Some("model.alhpa"));
        assert!(e.to_string().starts_with("run.toml:6"));
    }

    #[test]
    fn invalid_value_reports_line() {
        let text = "[model]\nnu = 0.0\nalpha = -1.0\n";
        let e = parse("run.toml", text, &[]).unwrap_err();
        assert_eq!(e.line, Some(3));
        assert_eq!(e.key.as_deref(), Some("model.alpha"));
        let e = parse("run.toml", "[grid]\nn = \"big\"\n", &[]).unwrap_err();
        assert_eq!(e.line, Some(2), "{e}");
        let e = parse("run.toml", "[grid\nn = 3\n", &[]).unwrap_err();
        assert_eq!(e.line, Some(1));
        let e = parse("run.toml", "[besov]\ns = 0.5\nfield = \"w\"\n", &[]).unwrap_err();
        assert_eq!((e.line, e.key.as_deref()), (Some(3), Some("besov.field")), "{e}");
    }

    #[test]
    fn overrides_apply_after_the_file() {
        let text = "[model]\nalpha = 0.1\n";
        let c = parse(
            "x",
            text,
            &["model.alpha=0.3".into(), "ic.kind=random_div_free".into(), "besov.q=inf".into()],
        )
        .unwrap();
        assert_eq!(c.config.model.alpha, 0.3);
        assert_eq!(c.config.ic.kind, InitialKind::RandomDivFree);
        assert!(c.config.besov.q.value().is_infinite());
        let e = parse("x", text, &["model.alpha=-2".into()]).unwrap_err();
        assert_eq!(e.source, "--set");
        assert!(parse("x", text, &["alpha".into()]).is_err());
    }
}
