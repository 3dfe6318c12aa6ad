//! Result tables and their CSV/JSON renderings.

use std::fmt::Write as _;

use serde_json::{json, Map};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    /// Undefined quantity, such as the efficiency of a machine that is off.
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Real)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

/// 17 significant digits: enough to round-trip any `f64`.
pub fn csv_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn json_f64(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(x) => csv_f64(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => csv_text(s),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Real(x) => json_f64(*x),
            Cell::Int(n) => (*n).into(),
            Cell::Bool(b) => (*b).into(),
            Cell::Text(s) => s.clone().into(),
            Cell::Missing => serde_json::Value::Null,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    pub cells: Vec<Cell>,
}

impl Column {
    pub fn new(name: impl Into<String>, cells: Vec<Cell>) -> Self {
        Self {
            name: name.into(),
            cells,
        }
    }

    pub fn reals(name: impl Into<String>, values: &[f64]) -> Self {
        Self::new(name, values.iter().map(|&x| Cell::Real(x)).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metadata {
    pub version: String,
    pub experiment: String,
    pub config_hash: String,
    pub seed: u64,
    pub wall_time: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    columns: Vec<Column>,
    /// Scalar results of a single run; empty for sweeps.
    pub summary: Vec<(String, Cell)>,
    pub parameters: serde_json::Value,
    pub metadata: Metadata,
}

impl ResultTable {
    pub fn new(
        columns: Vec<Column>,
        summary: Vec<(String, Cell)>,
        parameters: serde_json::Value,
        metadata: Metadata,
    ) -> Result<Self, CliError> {
        if let Some(first) = columns.first() {
            let n = first.cells.len();
            if let Some(bad) = columns.iter().find(|c| c.cells.len() != n) {
                return Err(CliError::Internal(format!(
                    "column '{}' has {} rows, expected {n}",
                    bad.name,
                    bad.cells.len()
                )));
            }
        }
        let mut names: Vec<&str> = columns.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::Internal("duplicate column names".into()));
        }
        Ok(Self {
            columns,
            summary,
            parameters,
            metadata,
        })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.cells.len())
    }

    /// Metadata and scalar results as `#` lines, then the header and rows.
    pub fn to_csv(&self) -> String {
        let m = &self.metadata;
        let mut out = String::new();
        let _ = writeln!(out, "# qtherm {}", m.version);
        let _ = writeln!(out, "# experiment {}", m.experiment);
        let _ = writeln!(out, "# config_hash sha256:{}", m.config_hash);
        let _ = writeln!(out, "# seed {}", m.seed);
        let _ = writeln!(out, "# wall_time_s {:.6}", m.wall_time);
        for (k, v) in &self.summary {
            let _ = writeln!(out, "# summary {k} = {}", v.csv());
        }
        let header: Vec<String> = self.columns.iter().map(|c| csv_text(&c.name)).collect();
        let _ = writeln!(out, "{}", header.join(","));
        for i in 0..self.rows() {
            let row: Vec<String> = self.columns.iter().map(|c| c.cells[i].csv()).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let m = &self.metadata;
        let mut columns = Map::new();
        for c in &self.columns {
            columns.insert(c.name.clone(), c.cells.iter().map(Cell::json).collect());
        }
        let mut summary = Map::new();
        for (k, v) in &self.summary {
            summary.insert(k.clone(), v.json());
        }
        let doc = json!({
            "metadata": {
                "version": m.version,
                "experiment": m.experiment,
                "config_hash": format!("sha256:{}", m.config_hash),
                "seed": m.seed,
                "wall_time_s": m.wall_time,
            },
            "parameters": self.parameters,
            "summary": summary,
            "columns": columns,
        });
        let mut s = serde_json::to_string_pretty(&doc).unwrap_or_default();
        s.push('\n');
        s
    }
}
