//! Executes a validated configuration, sweeping on a bounded worker pool.

use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Map};

use crate::config::{ExperimentConfig, Scale};
use crate::error::CliError;
use crate::experiments::{run_point, Outcome};
use crate::table::{Cell, Column, Metadata, ResultTable};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Resolves the worker count: `QTHERM_THREADS` wins over the flag; 0 or
/// absent means one worker per core.
pub fn thread_count(flag: Option<usize>, env: Option<&str>) -> Result<usize, CliError> {
    match env {
        Some(s) => s.trim().parse::<usize>().map_err(|_| {
            CliError::config(format!(
                "QTHERM_THREADS: {s:?} is not a non-negative integer"
            ))
        }),
        None => Ok(flag.unwrap_or(0)),
    }
}

fn parameters_json(cfg: &ExperimentConfig) -> serde_json::Value {
    let mut m = Map::new();
    for (k, v) in cfg.parameters.iter() {
        m.insert(k.into(), v.to_json());
    }
    if let Some(s) = &cfg.sweep {
        let scale = match s.scale {
            Scale::Linear => "linear",
            Scale::Log => "log",
        };
        m.insert(
            "sweep".into(),
            json!({ "key": s.key, "from": s.from, "to": s.to, "steps": s.steps, "scale": scale }),
        );
    }
    serde_json::Value::Object(m)
}

/// Runs the configured experiment. A sweep yields one row per point in
/// sweep order; a single run yields its trace when it has one, otherwise a
/// one-row table of its scalar results.
pub fn run(cfg: &ExperimentConfig, threads: usize) -> Result<ResultTable, CliError> {
    let start = Instant::now();
    let (columns, summary) = match &cfg.sweep {
        None => {
            let out = run_point(cfg.experiment, &cfg.parameters, cfg.seed)?;
            let summary: Vec<(String, Cell)> = out
                .summary
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect();
            match out.trace {
                Some(trace) => (trace, summary),
                None => (
                    summary
                        .iter()
                        .map(|(k, v)| Column::new(k.clone(), vec![v.clone()]))
                        .collect(),
                    summary,
                ),
            }
        }
        Some(sweep) => {
            let points = sweep.points();
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::Internal(format!("worker pool: {e}")))?;
            // indexed collect keeps sweep order whatever the completion order
            let results: Vec<Result<Outcome, CliError>> = pool.install(|| {
                points
                    .par_iter()
                    .map(|x| {
                        run_point(
                            cfg.experiment,
                            &cfg.parameters.with(sweep.key, x.clone()),
                            cfg.seed,
                        )
                    })
                    .collect()
            });
            let mut outcomes = Vec::with_capacity(points.len());
            for (x, r) in points.iter().zip(results) {
                match r {
                    Ok(o) => outcomes.push(o),
                    Err(CliError::Model(e)) => {
                        let at = x.as_f64().unwrap_or(f64::NAN);
                        return Err(CliError::ModelAt {
                            key: sweep.key.into(),
                            at,
                            source: e,
                        });
                    }
                    Err(e) => return Err(e),
                }
            }
            (sweep_columns(sweep.key, &points, &outcomes)?, Vec::new())
        }
    };
    let metadata = Metadata {
        version: VERSION.into(),
        experiment: cfg.experiment.name().into(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        wall_time: start.elapsed().as_secs_f64(),
    };
    ResultTable::new(columns, summary, parameters_json(cfg), metadata)
}

fn sweep_columns(
    key: &str,
    points: &[crate::config::Value],
    outcomes: &[Outcome],
) -> Result<Vec<Column>, CliError> {
    let names: Vec<&str> = outcomes
        .first()
        .map(|o| o.summary.iter().map(|(k, _)| *k).collect())
        .unwrap_or_default();
    let mut columns = vec![Column::new(
        key,
        points
            .iter()
            .map(|v| match v {
                crate::config::Value::Int(n) => Cell::Int(*n),
                other => Cell::Real(other.as_f64().unwrap_or(f64::NAN)),
            })
            .collect(),
    )];
    for (j, name) in names.iter().enumerate() {
        let mut cells = Vec::with_capacity(outcomes.len());
        for o in outcomes {
            match o.summary.get(j) {
                Some((k, v)) if k == name => cells.push(v.clone()),
                _ => {
                    return Err(CliError::Internal(format!(
                        "summary shape changed across sweep points at '{name}'"
                    )))
                }
            }
        }
        let name = if *name == key {
            format!("{name}_result")
        } else {
            name.to_string()
        };
        columns.push(Column::new(name, cells));
    }
    Ok(columns)
}
