//! Experiment registry and table output behind the `opmat` binary.
//!
//! Every experiment is a pure function of its [`ExperimentConfig`]; tables are
//! written with [`opmat_core::format_sig`] so reruns with the same seed are
//! byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use opmat_core::kernels::SummabilityKernel;
use serde_json::json;

mod experiments;

pub use experiments::run_one;

pub const OUT_DIR_ENV: &str = "OPMAT_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] opmat_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0} check(s) failed")]
    CheckFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(opmat_core::Error::NoConvergence { .. }) => 2,
            CliError::CheckFailed(_) => 3,
            _ => 1,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Experiment {
    NormIdentities,
    SchurSubmultiplicativity,
    KernelAxioms,
    ConvolutionIdentity,
    SigmaProfiles,
    ToeplitzSymbolConvergence,
    PhiBounds,
    HinfProfile,
    MultiplierBounds,
    All,
}

impl Experiment {
    pub const SUITE: [Experiment; 9] = [
        Experiment::NormIdentities,
        Experiment::SchurSubmultiplicativity,
        Experiment::KernelAxioms,
        Experiment::ConvolutionIdentity,
        Experiment::SigmaProfiles,
        Experiment::ToeplitzSymbolConvergence,
        Experiment::PhiBounds,
        Experiment::HinfProfile,
        Experiment::MultiplierBounds,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::NormIdentities => "norm-identities",
            Experiment::SchurSubmultiplicativity => "schur-submultiplicativity",
            Experiment::KernelAxioms => "kernel-axioms",
            Experiment::ConvolutionIdentity => "convolution-identity",
            Experiment::SigmaProfiles => "sigma-profiles",
            Experiment::ToeplitzSymbolConvergence => "toeplitz-symbol-convergence",
            Experiment::PhiBounds => "phi-bounds",
            Experiment::HinfProfile => "hinf-profile",
            Experiment::MultiplierBounds => "multiplier-bounds",
            Experiment::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SigmaCase {
    Banded,
    Toeplitz,
    Dilation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Fejer,
    Poisson,
    Dirichlet,
}

impl From<KernelArg> for SummabilityKernel {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Fejer => SummabilityKernel::Fejer,
            KernelArg::Poisson => SummabilityKernel::Poisson,
            KernelArg::Dirichlet => SummabilityKernel::Dirichlet,
        }
    }
}

// ── tolerances ──────────────────────────────────────────────────────

const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("rank_one", 1e-9),
    ("tensor", 1e-8),
    ("modulation", 1e-9),
    ("spectrum", 1e-8),
    ("diagonal", 1e-10),
    ("submult", 1e-9),
    ("convolution", 1e-12),
    ("relative", 1e-3),
    ("dilation_floor", 0.5),
    ("dilation_witness", 1e-9),
    ("symbol_ceiling", 1e-8),
    ("symbol_gap", 0.02),
    ("phi", 1e-8),
    ("phi_ratio", 0.95),
    ("shift", 1e-12),
    ("closed_form", 1e-10),
    ("hinf", 1e-3),
];

/// Check thresholds, overridable with `--tolerance KEY=VAL`.
#[derive(Debug, Clone)]
pub struct Tolerances(BTreeMap<&'static str, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(DEFAULT_TOLERANCES.iter().copied().collect())
    }
}

impl Tolerances {
    pub fn keys() -> impl Iterator<Item = &'static str> {
        DEFAULT_TOLERANCES.iter().map(|(k, _)| *k)
    }

    pub fn with_overrides(overrides: &[(String, f64)]) -> Result<Self> {
        let mut t = Tolerances::default();
        for (key, value) in overrides {
            let Some((&k, slot)) = t.0.iter_mut().find(|(k, _)| **k == key.as_str()) else {
                return Err(CliError::Config(format!(
                    "unknown tolerance key `{key}` (known: {})",
                    Tolerances::keys().collect::<Vec<_>>().join(", ")
                )));
            };
            if !(value.is_finite() && *value >= 0.0) {
                return Err(CliError::Config(format!("tolerance `{k}` must be finite and >= 0")));
            }
            *slot = *value;
        }
        Ok(t)
    }

    pub fn get(&self, key: &str) -> f64 {
        self.0[key]
    }
}

/// Parse `KEY=VAL`.
pub fn parse_tolerance(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VAL, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

// ── configuration ───────────────────────────────────────────────────

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub kernel: Option<KernelArg>,
    pub case: Option<SigmaCase>,
    pub n_max: Option<usize>,
    pub trials: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            d: 2,
            n: 8,
            seed: 1,
            tolerances: Tolerances::default(),
            kernel: None,
            case: None,
            n_max: None,
            trials: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(CliError::Config("--d must be at least 1".into()));
        }
        if self.n == 0 {
            return Err(CliError::Config("--N must be at least 1".into()));
        }
        if self.n_max == Some(0) {
            return Err(CliError::Config("--n-max must be at least 1".into()));
        }
        if self.trials == Some(0) {
            return Err(CliError::Config("--trials must be at least 1".into()));
        }
        Ok(())
    }

    fn params_json(&self) -> serde_json::Value {
        json!({
            "d": self.d,
            "N": self.n,
            "seed": self.seed,
            "kernel": self.kernel.map(|k| SummabilityKernel::from(k).name()),
            "n_max": self.n_max,
            "trials": self.trials,
        })
    }
}

// ── tables and reports ──────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<isize> for Cell {
    fn from(x: isize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => opmat_core::format_sig(*x),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(i) => json!(i),
            // round-trip through the fixed format so JSON and CSV agree
            Cell::Float(x) if x.is_finite() => {
                json!(opmat_core::format_sig(*x).parse::<f64>().expect("formatted float"))
            }
            Cell::Float(x) => json!(x.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => {
        vec![$($crate::Cell::from($x)),*]
    };
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        json!({ "name": self.name, "columns": self.columns, "rows": rows })
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub experiment: Experiment,
    pub params: serde_json::Value,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(cfg: &ExperimentConfig, experiment: Experiment) -> Self {
        Report {
            experiment,
            params: cfg.params_json(),
            tables: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "experiment": self.experiment.name(),
            "params": self.params,
            "tables": self.tables.iter().map(Table::to_json).collect::<Vec<_>>(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name, "passed": c.passed, "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }

    /// `(file name, contents)` pairs for this report.
    pub fn files(&self, format: Format) -> Vec<(String, String)> {
        let base = self.experiment.name();
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("plain data");
                s.push('\n');
                vec![(format!("{base}.json"), s)]
            }
            Format::Csv => self
                .tables
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let name = if i == 0 {
                        format!("{base}.csv")
                    } else {
                        format!("{base}-{}.csv", t.name)
                    };
                    (name, t.to_csv())
                })
                .collect(),
        }
    }

    /// One line per check, for humans.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let mark = if c.passed { "pass" } else { "FAIL" };
            let _ = writeln!(out, "[{}] {mark} {}: {}", self.experiment.name(), c.name, c.detail);
        }
        out
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Report>> {
    cfg.validate()?;
    let list: Vec<Experiment> = if cfg.experiment == Experiment::All {
        Experiment::SUITE.to_vec()
    } else {
        vec![cfg.experiment]
    };
    list.into_iter()
        .map(|e| {
            let mut report = Report::new(cfg, e);
            run_one(e, cfg, &mut report)?;
            Ok(report)
        })
        .collect()
}

/// Write report files into `dir`, or to stdout when `dir` is `None`.
pub fn emit(reports: &[Report], format: Format, dir: Option<&Path>) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            for r in reports {
                for (name, body) in r.files(format) {
                    let path = dir.join(name);
                    std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
                    written.push(path);
                }
            }
        }
        None => {
            let mut out = String::new();
            for r in reports {
                for (name, body) in r.files(format) {
                    if format == Format::Csv {
                        let _ = writeln!(out, "# {name}");
                    }
                    out.push_str(&body);
                }
            }
            print!("{out}");
        }
    }
    Ok(written)
}

// ── convert ─────────────────────────────────────────────────────────

/// Re-serialise a matrix or scalar-symbol file in canonical form.
pub fn convert(input: &Path, output: &Path, densify: bool) -> Result<()> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", input.display())))?;
    let is_symbol = value.get("kind").is_some();
    let body = if is_symbol {
        if densify {
            return Err(CliError::Config("--densify applies to matrices only".into()));
        }
        opmat_core::kernels::ScalarSymbol::from_json(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", input.display())))?
            .to_json()
    } else {
        let m = opmat_core::BlockMatrix::from_json(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", input.display())))?;
        if densify {
            m.to_dense().to_json()
        } else {
            m.to_json()
        }
    };
    std::fs::write(output, body).map_err(|e| CliError::io(output, e))
}
