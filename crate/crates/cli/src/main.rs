use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qtherm_cli::catalog::{Default, Experiment};
use qtherm_cli::config::{self, Format};
use qtherm_cli::run::{run, thread_count};
use qtherm_cli::CliError;
use toml::{Table, Value as Toml};

const UNITS: &str = "\
Units: hbar = k_B = 1. Energies, frequencies and temperatures share one
unit of your choosing; times are in its inverse.

Run an experiment:
  qtherm <experiment> [--config <path>] [--set key=value]... [--out <path>]
                      [--format csv|json] [--threads N] [--seed S]

Exit codes: 0 success, 2 configuration error, 3 numerical or model error,
4 internal error.";

#[derive(Parser)]
#[command(name = "qtherm", version, about = "Quantum thermal machine experiments", after_help = UNITS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the experiment catalog with each experiment's keys.
    List,
    /// Check a config file without running it.
    Validate { path: PathBuf },
    /// Any experiment name from `qtherm list`.
    #[command(external_subcommand)]
    Run(Vec<String>),
}

#[derive(Parser)]
#[command(after_help = UNITS)]
struct RunArgs {
    /// TOML config with `experiment`, `seed`, `[parameters]`, `[sweep]`, `[output]`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a key; bare names address [parameters], e.g. `--set t_h=4`
    /// or `--set sweep.steps=50`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Sweep workers (0 = one per core). QTHERM_THREADS takes precedence.
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for experiments that draw random states.
    #[arg(long)]
    seed: Option<u64>,
}

fn list() {
    let mut out = String::new();
    for exp in Experiment::ALL {
        out.push_str(&format!("{:<14} {}\n", exp.name(), exp.about()));
        for s in exp.params() {
            let default = match s.default {
                Default::Required => "required".to_string(),
                Default::Optional => "optional".to_string(),
                Default::Real(x) => format!("default {x}"),
                Default::Int(n) => format!("default {n}"),
                Default::Bool(b) => format!("default {b}"),
                Default::Choice(c) => format!("default {c}"),
            };
            let range = if s.kind.is_numeric() || s.kind == qtherm_cli::catalog::Kind::RealList {
                format!(" in {}", s.bounds)
            } else {
                String::new()
            };
            out.push_str(&format!(
                "    {:<20} {}{range}, {default}: {}\n",
                s.key,
                s.kind.describe(),
                s.doc
            ));
        }
    }
    print!("{out}");
}

fn validate_file(path: &PathBuf) -> Result<(), CliError> {
    let diags = config::diagnostics(path)?;
    if diags.is_empty() {
        println!("{}: ok", path.display());
        Ok(())
    } else {
        Err(CliError::Config(diags))
    }
}

fn output_table(doc: &mut Table) -> Result<&mut Table, CliError> {
    match doc
        .entry("output")
        .or_insert_with(|| Toml::Table(Table::new()))
    {
        Toml::Table(t) => Ok(t),
        _ => Err(CliError::config("output: expected a table")),
    }
}

fn run_experiment(args: Vec<String>) -> Result<(), CliError> {
    let name = args.first().cloned().unwrap_or_default();
    let exp = Experiment::from_name(&name).ok_or_else(|| {
        CliError::config(format!("unknown experiment {name:?} (see `qtherm list`)"))
    })?;
    let opts = match RunArgs::try_parse_from(
        std::iter::once(format!("qtherm {name}")).chain(args.into_iter().skip(1)),
    ) {
        Ok(o) => o,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                Err(CliError::Config(Vec::new()))
            } else {
                Ok(())
            };
        }
    };
    let mut doc = match &opts.config {
        Some(p) => config::load_document(p)?,
        None => Table::new(),
    };
    let set_errors: Vec<String> = opts
        .set
        .iter()
        .filter_map(|s| config::apply_set(&mut doc, s).err())
        .collect();
    if !set_errors.is_empty() {
        return Err(CliError::Config(set_errors));
    }
    if let Some(seed) = opts.seed {
        let seed = i64::try_from(seed).map_err(|_| CliError::config("--seed: too large"))?;
        doc.insert("seed".into(), Toml::Integer(seed));
    }
    if let Some(out) = &opts.out {
        output_table(&mut doc)?.insert(
            "path".into(),
            Toml::String(out.to_string_lossy().into_owned()),
        );
    }
    if let Some(f) = &opts.format {
        output_table(&mut doc)?.insert("format".into(), Toml::String(f.clone()));
    }
    let cfg = config::validate(&doc, Some(exp)).map_err(CliError::Config)?;
    let threads = thread_count(
        opts.threads,
        std::env::var("QTHERM_THREADS").ok().as_deref(),
    )?;
    let table = run(&cfg, threads)?;
    let text = match cfg.output.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match &cfg.output.path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::config(format!("{}: cannot write: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::config(format!("stdout: {e}")))
        }
    }
}

fn dispatch() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                Err(CliError::Config(Vec::new()))
            } else {
                Ok(())
            };
        }
    };
    match cli.command {
        Command::List => {
            list();
            Ok(())
        }
        Command::Validate { path } => validate_file(&path),
        Command::Run(args) => run_experiment(args),
    }
}

fn main() -> ExitCode {
    let outcome = panic::catch_unwind(AssertUnwindSafe(dispatch));
    let err = match outcome {
        Ok(Ok(())) => return ExitCode::SUCCESS,
        Ok(Err(e)) => e,
        // the panic hook has already printed the message
        Err(_) => CliError::Internal("panic".into()),
    };
    match &err {
        CliError::Config(lines) => {
            for line in lines {
                eprintln!("error: {line}");
            }
        }
        other => eprintln!("error: {other}"),
    }
    ExitCode::from(err.exit_code() as u8)
}
