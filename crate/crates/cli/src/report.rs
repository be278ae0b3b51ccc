//! Run reports and their on-disk form.
//!
//! `summary.json` and every CSV are functions of (config, seed) only. Wall
//! time and the runtime budgets go to `timing.json`, which is the one file
//! expected to differ between reruns.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use schemars::JsonSchema;
use serde::Serialize;

use crate::config::{ExperimentConfig, ExperimentId};
use crate::LabError;

/// Round to 12 significant digits; non-finite values pass through.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

/// Text form of a metric for CSV cells.
pub fn format_metric(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(v);
    if r == 0.0 {
        "0".into()
    } else if (1e-6..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_metric(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, LabError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| LabError::Report(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .map_err(|e| LabError::Report(e.to_string()))?;
        }
        w.into_inner().map_err(|e| LabError::Report(e.to_string()))
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// One pass/fail comparison `lower <= value <= upper`.
#[derive(Clone, Debug, PartialEq, Serialize, JsonSchema)]
pub struct Check {
    pub name: String,
    /// Acceptance criterion number, when the check implements one.
    pub criterion: Option<u32>,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, criterion: Option<u32>, value: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let value = round_sig(value);
        let lower = lower.map(round_sig);
        let upper = upper.map(round_sig);
        let pass = !value.is_nan() && lower.is_none_or(|l| value >= l) && upper.is_none_or(|u| value <= u);
        Self {
            name: name.to_string(),
            criterion,
            value,
            lower,
            upper,
            pass,
        }
    }

    pub fn at_most(name: &str, criterion: u32, value: f64, upper: f64) -> Self {
        Self::new(name, Some(criterion), value, None, Some(upper))
    }

    pub fn at_least(name: &str, criterion: u32, value: f64, lower: f64) -> Self {
        Self::new(name, Some(criterion), value, Some(lower), None)
    }

    pub fn within(name: &str, criterion: u32, value: f64, lower: f64, upper: f64) -> Self {
        Self::new(name, Some(criterion), value, Some(lower), Some(upper))
    }

    fn bounds(&self) -> String {
        match (self.lower, self.upper) {
            (Some(l), Some(u)) => format!("in [{}, {}]", format_metric(l), format_metric(u)),
            (Some(l), None) => format!(">= {}", format_metric(l)),
            (None, Some(u)) => format!("<= {}", format_metric(u)),
            (None, None) => "recorded".into(),
        }
    }

    /// `PASS name: value (bound)`.
    pub fn line(&self) -> String {
        format!(
            "{} {}: {} ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            format_metric(self.value),
            self.bounds()
        )
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    /// Wall-time budgets; kept out of `summary.json`.
    pub runtime_checks: Vec<Check>,
    pub metrics: BTreeMap<String, f64>,
    pub tables: Vec<Table>,
    pub wall_time_seconds: f64,
}

impl Report {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            config: config.clone(),
            checks: Vec::new(),
            runtime_checks: Vec::new(),
            metrics: BTreeMap::new(),
            tables: Vec::new(),
            wall_time_seconds: 0.0,
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().chain(&self.runtime_checks).all(|c| c.pass)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn checks_for(&self, criterion: u32) -> impl Iterator<Item = &Check> {
        self.checks
            .iter()
            .chain(&self.runtime_checks)
            .filter(move |c| c.criterion == Some(criterion))
    }

    pub fn summary(&self) -> Summary {
        Summary {
            experiment: self.config.experiment,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.config.seed,
            config: serde_json::to_value(&self.config.params).expect("params serialize"),
            pass: self.checks.iter().all(|c| c.pass),
            checks: self.checks.clone(),
            metrics: self.metrics.iter().map(|(k, v)| (k.clone(), round_sig(*v))).collect(),
            tables: self.tables.iter().map(|t| format!("{}.csv", t.name)).collect(),
        }
    }

    pub fn timing(&self) -> Timing {
        Timing {
            wall_time_seconds: self.wall_time_seconds,
            pass: self.runtime_checks.iter().all(|c| c.pass),
            checks: self.runtime_checks.clone(),
        }
    }

    /// Writes `<out>/<experiment>/{<table>.csv, summary.json, timing.json}`.
    pub fn write(&self, out: &Path) -> Result<Vec<PathBuf>, LabError> {
        let dir = out.join(self.config.experiment.as_str());
        fs::create_dir_all(&dir).map_err(|source| LabError::Io {
            path: dir.clone(),
            source,
        })?;
        let mut written = Vec::new();
        let mut put = |name: String, bytes: Vec<u8>| -> Result<(), LabError> {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|source| LabError::Io {
                path: path.clone(),
                source,
            })?;
            written.push(path);
            Ok(())
        };
        for t in &self.tables {
            put(format!("{}.csv", t.name), t.to_csv()?)?;
        }
        put("summary.json".into(), json_bytes(&self.summary())?)?;
        put("timing.json".into(), json_bytes(&self.timing())?)?;
        Ok(written)
    }
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>, LabError> {
    let mut bytes = serde_json::to_vec_pretty(v).map_err(|e| LabError::Report(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Contents of `summary.json`.
#[derive(Clone, Debug, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub experiment: ExperimentId,
    pub library_version: String,
    pub seed: u64,
    /// Parameters after defaults are filled in.
    pub config: serde_json::Value,
    /// All metric checks passed (runtime budgets excluded).
    pub pass: bool,
    pub checks: Vec<Check>,
    pub metrics: BTreeMap<String, f64>,
    /// CSV files written next to this summary.
    pub tables: Vec<String>,
}

/// Contents of `timing.json`.
#[derive(Clone, Debug, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Timing {
    pub wall_time_seconds: f64,
    pub pass: bool,
    pub checks: Vec<Check>,
}

pub fn summary_schema() -> serde_json::Value {
    let gen = schemars::generate::SchemaSettings::draft2020_12()
        .with(|s| s.inline_subschemas = true)
        .into_generator();
    serde_json::to_value(gen.into_root_schema_for::<Summary>()).expect("schema serializes")
}
