//! Experiment configuration: TOML parsing, `--set` overrides and static
//! validation.
//!
//! ```toml
//! experiment = "otto"
//! seed = 7
//!
//! [parameters]
//! omega_a = 2.0
//! omega_b = 1.0
//! t_h = 4.0
//! t_c = 1.0
//!
//! [sweep]
//! key = "t_h"
//! from = 2.0
//! to = 8.0
//! steps = 13
//! scale = "linear"
//!
//! [output]
//! path = "otto.csv"
//! format = "csv"
//! ```

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use toml::{Table, Value as Toml};

use crate::catalog::{Default, Experiment, Kind, ParamSpec};
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Real(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    List(Vec<f64>),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Real(x) => Some(*x),
            Value::Int(n) => Some(*n as f64),
            _ => None,
        }
    }

    /// Exact, locale-free rendering used for hashing: `{:e}` on `f64` is
    /// the shortest string that round-trips.
    fn canonical(&self) -> String {
        match self {
            Value::Real(x) => format!("r:{x:e}"),
            Value::Int(n) => format!("i:{n}"),
            Value::Bool(b) => format!("b:{b}"),
            Value::Text(s) => format!("s:{s:?}"),
            Value::List(v) => format!(
                "l:[{}]",
                v.iter()
                    .map(|x| format!("{x:e}"))
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Real(x) => crate::table::json_f64(*x),
            Value::Int(n) => (*n).into(),
            Value::Bool(b) => (*b).into(),
            Value::Text(s) => s.clone().into(),
            Value::List(v) => v.iter().map(|x| crate::table::json_f64(*x)).collect(),
        }
    }
}

/// Parameter values of one run, defaults filled in, in catalog order.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    entries: Vec<(&'static str, Value)>,
}

impl Params {
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &Value)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    /// Copy with one entry replaced or added.
    pub fn with(&self, key: &'static str, value: Value) -> Params {
        let mut out = self.clone();
        match out.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => out.entries.push((key, value)),
        }
        out
    }

    fn missing(key: &str) -> CliError {
        CliError::Internal(format!(
            "parameter '{key}' missing or mistyped after validation"
        ))
    }

    pub fn real(&self, key: &str) -> Result<f64, CliError> {
        self.get(key)
            .and_then(Value::as_f64)
            .ok_or_else(|| Self::missing(key))
    }

    pub fn count(&self, key: &str) -> Result<usize, CliError> {
        self.opt_count(key)?.ok_or_else(|| Self::missing(key))
    }

    pub fn opt_count(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Int(n)) if *n >= 0 => Ok(Some(*n as usize)),
            Some(_) => Err(Self::missing(key)),
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.get(key) {
            Some(Value::Bool(b)) => Ok(*b),
            _ => Err(Self::missing(key)),
        }
    }

    pub fn choice(&self, key: &str) -> Result<&str, CliError> {
        match self.get(key) {
            Some(Value::Text(s)) => Ok(s),
            _ => Err(Self::missing(key)),
        }
    }

    pub fn opt_list(&self, key: &str) -> Result<Option<&[f64]>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::List(v)) => Ok(Some(v)),
            Some(_) => Err(Self::missing(key)),
        }
    }

    pub fn list(&self, key: &str) -> Result<&[f64], CliError> {
        self.opt_list(key)?.ok_or_else(|| Self::missing(key))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub key: &'static str,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub scale: Scale,
    /// Integer parameters are swept over rounded points.
    pub integer: bool,
}

impl Sweep {
    pub fn points(&self) -> Vec<Value> {
        let n = self.steps;
        (0..n)
            .map(|k| {
                let s = if n == 1 {
                    0.0
                } else {
                    k as f64 / (n - 1) as f64
                };
                let x = match self.scale {
                    Scale::Linear => self.from + s * (self.to - self.from),
                    Scale::Log => (self.from.ln() + s * (self.to.ln() - self.from.ln())).exp(),
                };
                // land exactly on the end point
                let x = if k + 1 == n && n > 1 { self.to } else { x };
                if self.integer {
                    Value::Int(x.round() as i64)
                } else {
                    Value::Real(x)
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    /// Standard output when absent.
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub parameters: Params,
    pub sweep: Option<Sweep>,
    pub output: Output,
    pub seed: u64,
}

impl ExperimentConfig {
    /// SHA-256 over everything that determines the numbers: experiment,
    /// seed, resolved parameters and sweep. Output settings are left out.
    pub fn hash(&self) -> String {
        let mut text = format!(
            "experiment={}\nseed={}\n",
            self.experiment.name(),
            self.seed
        );
        for (k, v) in self.parameters.iter() {
            text.push_str(&format!("param.{k}={}\n", v.canonical()));
        }
        if let Some(s) = &self.sweep {
            let scale = match s.scale {
                Scale::Linear => "linear",
                Scale::Log => "log",
            };
            text.push_str(&format!(
                "sweep={},{:e},{:e},{},{scale}\n",
                s.key, s.from, s.to, s.steps
            ));
        }
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

// ------------------------------------------------------------ raw documents

/// Parses a configuration document into its raw table.
pub fn parse_document(text: &str) -> Result<Table, CliError> {
    text.parse::<Table>()
        .map_err(|e| CliError::config(format!("syntax: {}", e.message())))
}

pub fn load_document(path: &Path) -> Result<Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("{}: cannot read: {e}", path.display())))?;
    parse_document(&text)
}

fn valid_segment(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Splits `key=value`. The value is read as a TOML literal (`2.5`, `true`,
/// `[1, 2]`, `"text"`); anything that is not one is taken as a bare string.
/// Keys without a section prefix address `[parameters]`; `seed` and
/// `experiment` address the top level.
pub fn parse_set(arg: &str) -> Result<(Vec<String>, Toml), String> {
    let (key, raw) = arg
        .split_once('=')
        .ok_or_else(|| format!("--set {arg:?}: expected key=value"))?;
    let key = key.trim();
    let raw = raw.trim();
    let segments: Vec<&str> = key.split('.').collect();
    if !segments.iter().all(|s| valid_segment(s)) {
        return Err(format!("--set {arg:?}: malformed key {key:?}"));
    }
    let path: Vec<String> = match segments.as_slice() {
        [one] if matches!(*one, "seed" | "experiment") => vec![one.to_string()],
        [one] => vec!["parameters".into(), one.to_string()],
        [section, field] if matches!(*section, "parameters" | "sweep" | "output") => {
            vec![section.to_string(), field.to_string()]
        }
        _ => {
            return Err(format!(
                "--set {arg:?}: key must be NAME or parameters|sweep|output.NAME"
            ))
        }
    };
    let value = match format!("v = {raw}").parse::<Table>() {
        Ok(t) if t.len() == 1 && t.contains_key("v") => t["v"].clone(),
        _ => Toml::String(raw.to_string()),
    };
    Ok((path, value))
}

/// Writes `value` at `path`, creating the section table if needed.
pub fn set_path(doc: &mut Table, path: &[String], value: Toml) -> Result<(), String> {
    match path {
        [key] => {
            doc.insert(key.clone(), value);
            Ok(())
        }
        [section, key] => {
            let entry = doc
                .entry(section.clone())
                .or_insert_with(|| Toml::Table(Table::new()));
            match entry {
                Toml::Table(t) => {
                    t.insert(key.clone(), value);
                    Ok(())
                }
                _ => Err(format!("{section}: expected a table")),
            }
        }
        _ => Err("empty key".into()),
    }
}

pub fn apply_set(doc: &mut Table, arg: &str) -> Result<(), String> {
    let (path, value) = parse_set(arg)?;
    set_path(doc, &path, value)
}

// ------------------------------------------------------------ validation

fn toml_type(v: &Toml) -> &'static str {
    match v {
        Toml::String(_) => "string",
        Toml::Integer(_) => "integer",
        Toml::Float(_) => "float",
        Toml::Boolean(_) => "boolean",
        Toml::Datetime(_) => "datetime",
        Toml::Array(_) => "array",
        Toml::Table(_) => "table",
    }
}

fn number(v: &Toml) -> Option<f64> {
    match v {
        Toml::Integer(n) => Some(*n as f64),
        Toml::Float(x) => Some(*x),
        _ => None,
    }
}

/// Type and range check of one parameter value.
fn typed(spec: &ParamSpec, v: &Toml) -> Result<Value, String> {
    let key = spec.key;
    let out_of_range = |x: f64| format!("parameters.{key}: value {x} out of range {}", spec.bounds);
    let mistyped = || {
        format!(
            "parameters.{key}: expected {}, found {}",
            spec.kind.describe(),
            toml_type(v)
        )
    };
    match spec.kind {
        Kind::Real => {
            let x = number(v).ok_or_else(mistyped)?;
            if !spec.bounds.contains(x) {
                return Err(out_of_range(x));
            }
            Ok(Value::Real(x))
        }
        Kind::Int => {
            let Toml::Integer(n) = v else {
                return Err(mistyped());
            };
            if !spec.bounds.contains(*n as f64) {
                return Err(out_of_range(*n as f64));
            }
            Ok(Value::Int(*n))
        }
        Kind::Bool => match v {
            Toml::Boolean(b) => Ok(Value::Bool(*b)),
            _ => Err(mistyped()),
        },
        Kind::Choice(opts) => match v {
            Toml::String(s) if opts.contains(&s.as_str()) => Ok(Value::Text(s.clone())),
            Toml::String(s) => Err(format!(
                "parameters.{key}: {s:?} is not one of {}",
                opts.join("|")
            )),
            _ => Err(mistyped()),
        },
        Kind::RealList => {
            let Toml::Array(items) = v else {
                return Err(mistyped());
            };
            if items.is_empty() {
                return Err(format!("parameters.{key}: list is empty"));
            }
            let mut out = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                let x = number(item).ok_or_else(|| {
                    format!(
                        "parameters.{key}[{i}]: expected a number, found {}",
                        toml_type(item)
                    )
                })?;
                if !spec.bounds.contains(x) {
                    return Err(format!(
                        "parameters.{key}[{i}]: value {x} out of range {}",
                        spec.bounds
                    ));
                }
                out.push(x);
            }
            Ok(Value::List(out))
        }
    }
}

fn default_value(spec: &ParamSpec) -> Option<Value> {
    match spec.default {
        Default::Required | Default::Optional => None,
        Default::Real(x) => Some(Value::Real(x)),
        Default::Int(n) => Some(Value::Int(n)),
        Default::Bool(b) => Some(Value::Bool(b)),
        Default::Choice(s) => Some(Value::Text(s.into())),
    }
}

fn sweep_config(exp: Experiment, raw: &Toml, errs: &mut Vec<String>) -> Option<Sweep> {
    let Toml::Table(t) = raw else {
        errs.push("sweep: expected a table".into());
        return None;
    };
    for k in t.keys() {
        if !matches!(k.as_str(), "key" | "from" | "to" | "steps" | "scale") {
            errs.push(format!(
                "sweep.{k}: unknown key (expected key, from, to, steps, scale)"
            ));
        }
    }
    let before = errs.len();
    let spec = match t.get("key") {
        None => {
            errs.push("sweep.key: missing".into());
            None
        }
        Some(Toml::String(k)) => match exp.param(k) {
            None => {
                errs.push(format!("sweep.key: '{k}' is not a parameter of {exp}"));
                None
            }
            Some(s) if !s.kind.is_numeric() => {
                errs.push(format!(
                    "sweep.key: '{k}' is not a numeric parameter ({})",
                    s.kind.describe()
                ));
                None
            }
            Some(s) => Some(s),
        },
        Some(v) => {
            errs.push(format!(
                "sweep.key: expected a string, found {}",
                toml_type(v)
            ));
            None
        }
    };
    let mut bound = |name: &str| match t.get(name) {
        None => {
            errs.push(format!("sweep.{name}: missing"));
            None
        }
        Some(v) => match number(v).filter(|x| x.is_finite()) {
            Some(x) => Some(x),
            None => {
                errs.push(format!("sweep.{name}: expected a finite number"));
                None
            }
        },
    };
    let from = bound("from");
    let to = bound("to");
    let steps = match t.get("steps") {
        None => {
            errs.push("sweep.steps: missing".into());
            None
        }
        Some(Toml::Integer(n)) if *n >= 1 && *n <= 10_000_000 => Some(*n as usize),
        Some(_) => {
            errs.push("sweep.steps: expected an integer in [1, 10000000]".into());
            None
        }
    };
    let scale = match t.get("scale") {
        None => Some(Scale::Linear),
        Some(Toml::String(s)) if s == "linear" => Some(Scale::Linear),
        Some(Toml::String(s)) if s == "log" => Some(Scale::Log),
        Some(_) => {
            errs.push("sweep.scale: expected \"linear\" or \"log\"".into());
            None
        }
    };
    if errs.len() > before {
        return None;
    }
    let (spec, from, to, steps, scale) = (spec?, from?, to?, steps?, scale?);
    if scale == Scale::Log && !(from > 0.0 && to > 0.0) {
        errs.push("sweep: log scale needs positive end points".into());
        return None;
    }
    let sweep = Sweep {
        key: spec.key,
        from,
        to,
        steps,
        scale,
        integer: spec.kind == Kind::Int,
    };
    for end in [from, to] {
        let x = if sweep.integer { end.round() } else { end };
        if !spec.bounds.contains(x) {
            errs.push(format!(
                "sweep: end point {end} of '{}' out of range {}",
                spec.key, spec.bounds
            ));
        }
    }
    Some(sweep)
}

fn output_config(raw: Option<&Toml>, errs: &mut Vec<String>) -> Output {
    let mut out = Output {
        path: None,
        format: Format::Csv,
    };
    let Some(raw) = raw else { return out };
    let Toml::Table(t) = raw else {
        errs.push("output: expected a table".into());
        return out;
    };
    let mut explicit = false;
    for (k, v) in t {
        match (k.as_str(), v) {
            ("path", Toml::String(p)) if !p.is_empty() => out.path = Some(PathBuf::from(p)),
            ("path", _) => errs.push("output.path: expected a non-empty string".into()),
            ("format", Toml::String(f)) => match Format::parse(f) {
                Some(fmt) => {
                    out.format = fmt;
                    explicit = true;
                }
                None => errs.push(format!("output.format: {f:?} is not one of csv|json")),
            },
            ("format", _) => errs.push("output.format: expected a string".into()),
            _ => errs.push(format!("output.{k}: unknown key (expected path, format)")),
        }
    }
    if !explicit {
        if let Some(p) = &out.path {
            if p.extension().is_some_and(|e| e == "json") {
                out.format = Format::Json;
            }
        }
    }
    out
}

/// Checks that need several parameters at once.
fn cross_checks(exp: Experiment, params: &Params, sweep: Option<&Sweep>, errs: &mut Vec<String>) {
    // a swept parameter is checked at both ends of its range
    let values = |key: &str| -> Vec<f64> {
        match sweep {
            Some(s) if s.key == key => {
                let pts = s.points();
                [pts.first(), pts.last()]
                    .into_iter()
                    .flatten()
                    .filter_map(Value::as_f64)
                    .collect()
            }
            _ => params
                .get(key)
                .and_then(Value::as_f64)
                .into_iter()
                .collect(),
        }
    };
    for r in exp.relations() {
        for a in values(r.greater) {
            for b in values(r.lesser) {
                let ok = if r.strict { a > b } else { a >= b };
                if !ok {
                    let op = if r.strict { ">" } else { ">=" };
                    errs.push(format!(
                        "parameters: need {} {op} {} (got {a} and {b})",
                        r.greater, r.lesser
                    ));
                }
            }
        }
    }
    if let (Some(Value::List(e)), Some(Value::List(p))) =
        (params.get("energies"), params.get("populations"))
    {
        if e.len() != p.len() {
            errs.push(format!(
                "parameters.populations: length {} does not match energies length {}",
                p.len(),
                e.len()
            ));
        }
    }
}

/// Full static validation of a raw document. `expected` is the experiment
/// named on the command line, if any.
pub fn validate(
    doc: &Table,
    expected: Option<Experiment>,
) -> Result<ExperimentConfig, Vec<String>> {
    let mut errs = Vec::new();
    for k in doc.keys() {
        if !matches!(
            k.as_str(),
            "experiment" | "seed" | "parameters" | "sweep" | "output"
        ) {
            errs.push(format!(
                "{k}: unknown top-level key (expected experiment, seed, parameters, sweep, output)"
            ));
        }
    }
    let named = match doc.get("experiment") {
        None => None,
        Some(Toml::String(s)) => match Experiment::from_name(s) {
            Some(e) => Some(e),
            None => {
                errs.push(format!(
                    "experiment: unknown experiment {s:?} (see `qtherm list`)"
                ));
                return Err(errs);
            }
        },
        Some(v) => {
            errs.push(format!(
                "experiment: expected a string, found {}",
                toml_type(v)
            ));
            return Err(errs);
        }
    };
    let exp = match (named, expected) {
        (Some(a), Some(b)) if a != b => {
            errs.push(format!(
                "experiment: config names {a} but the command line asks for {b}"
            ));
            return Err(errs);
        }
        (Some(e), _) | (None, Some(e)) => e,
        (None, None) => {
            errs.push("experiment: missing".into());
            return Err(errs);
        }
    };
    let seed = match doc.get("seed") {
        None => 0,
        Some(Toml::Integer(n)) if *n >= 0 => *n as u64,
        Some(_) => {
            errs.push("seed: expected a non-negative integer".into());
            0
        }
    };

    let empty = Table::new();
    let raw_params = match doc.get("parameters") {
        None => &empty,
        Some(Toml::Table(t)) => t,
        Some(_) => {
            errs.push("parameters: expected a table".into());
            &empty
        }
    };
    for k in raw_params.keys() {
        if exp.param(k).is_none() {
            let known: Vec<&str> = exp.params().iter().map(|s| s.key).collect();
            errs.push(format!(
                "parameters.{k}: unknown key for {exp} (expected one of {})",
                known.join(", ")
            ));
        }
    }
    let sweep = doc
        .get("sweep")
        .and_then(|s| sweep_config(exp, s, &mut errs));
    let swept = |key: &str| match doc.get("sweep") {
        Some(Toml::Table(t)) => t.get("key").and_then(Toml::as_str) == Some(key),
        _ => false,
    };
    let mut entries = Vec::new();
    for spec in exp.params() {
        match raw_params.get(spec.key) {
            Some(v) => match typed(spec, v) {
                Ok(val) => entries.push((spec.key, val)),
                Err(e) => errs.push(e),
            },
            None => match default_value(spec) {
                Some(val) => entries.push((spec.key, val)),
                None if spec.default == Default::Required && !swept(spec.key) => {
                    errs.push(format!(
                        "parameters.{}: missing required key ({})",
                        spec.key, spec.doc
                    ))
                }
                None => {}
            },
        }
    }
    let params = Params { entries };
    let output = output_config(doc.get("output"), &mut errs);
    if errs.is_empty() {
        cross_checks(exp, &params, sweep.as_ref(), &mut errs);
    }
    if !errs.is_empty() {
        return Err(errs);
    }
    Ok(ExperimentConfig {
        experiment: exp,
        parameters: params,
        sweep,
        output,
        seed,
    })
}

/// Diagnostics for a config file; an empty list means it is runnable.
pub fn diagnostics(path: &Path) -> Result<Vec<String>, CliError> {
    let doc = load_document(path)?;
    Ok(match validate(&doc, None) {
        Ok(_) => Vec::new(),
        Err(errs) => errs,
    })
}
