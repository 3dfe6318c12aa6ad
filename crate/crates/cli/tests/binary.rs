//! End-to-end runs of the `qtherm` binary.

use std::path::Path;
use std::process::{Command, Output};

fn qtherm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtherm"))
        .args(args)
        .env_remove("QTHERM_THREADS")
        .output()
        .expect("spawn qtherm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

/// Header and data rows of a CSV document, comments dropped.
fn table(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column<'a>(header: &[String], rows: &'a [Vec<String>], name: &str) -> Vec<&'a str> {
    let j = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[j].as_str()).collect()
}

fn without_wall_time(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with("# wall_time_s"))
        .collect::<Vec<_>>()
        .join("\n")
}

const OTTO: &str = r#"
experiment = "otto"

[parameters]
omega_a = 2.0
omega_b = 1.0
t_h = 4.0
t_c = 1.0
"#;

const CTM_SWEEP: &str = r#"
experiment = "ctm"

[parameters]
omega0 = 10.0
t_h = 4.0
t_c = 1.0

[sweep]
key = "omega"
from = 0.1
to = 8.0
steps = 80
"#;

#[test]
fn otto_single_row_at_half_efficiency() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "otto.toml", OTTO);
    let out = qtherm(&["otto", "--config", &cfg]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = table(&stdout(&out));
    assert_eq!(rows.len(), 1);
    // η = 1 − ω_B/ω_A
    let eta: f64 = column(&header, &rows, "efficiency")[0].parse().unwrap();
    assert!((eta - 0.5).abs() < 1e-15, "{eta}");
    assert_eq!(column(&header, &rows, "mode"), ["Engine"]);
}

#[test]
fn ctm_sweep_flips_mode_at_critical_frequency() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "ctm.toml", CTM_SWEEP);
    let out = qtherm(&["ctm", "--config", &cfg, "--threads", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = table(&stdout(&out));
    assert_eq!(rows.len(), 80);
    // ω₀ (T_h − T_c)/(T_h + T_c)
    let critical = 10.0 * 3.0 / 5.0;
    let grid = 7.9 / 79.0;
    let omegas: Vec<f64> = column(&header, &rows, "omega")
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let modes = column(&header, &rows, "mode");
    for (w, m) in omegas.iter().zip(&modes) {
        if *w < critical - grid {
            assert_eq!(*m, "Engine", "at {w}");
        } else if *w > critical + grid {
            assert_eq!(*m, "Refrigerator", "at {w}");
        }
    }
    // sweep order is kept
    assert!(omegas.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn missing_key_is_a_config_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", &OTTO.replace("omega_b = 1.0\n", ""));
    let out = qtherm(&["otto", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("omega_b"), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
}

#[test]
fn validate_accepts_a_runnable_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "otto.toml", OTTO);
    let out = qtherm(&["validate", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).is_empty());
}

#[test]
fn validate_rejects_sweep_over_non_numeric_key() {
    let dir = tempfile::tempdir().unwrap();
    let text = CTM_SWEEP
        .replace("key = \"omega\"", "key = \"waveform\"")
        .replace("t_c = 1.0\n", "t_c = 1.0\nomega = 1.0\n");
    let cfg = write(dir.path(), "ctm.toml", &text);
    let out = qtherm(&["validate", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 1, "{err}");
    assert!(lines[0].contains("waveform"), "{err}");
}

#[test]
fn validate_reports_theta_out_of_range() {
    let dir = tempfile::tempdir().unwrap();
    let text = "experiment = \"two-stroke\"\n[parameters]\nomega_k = 2.0\nomega_un = 1.0\nt_h = 4.0\nt_c = 1.0\ntheta = 7.0\n";
    let cfg = write(dir.path(), "ts.toml", text);
    let out = qtherm(&["validate", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(
        err.contains("theta") && err.contains("out of range"),
        "{err}"
    );
}

#[test]
fn validate_collects_every_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = "experiment = \"otto\"\ncolour = 1\n[parameters]\nomega_a = \"fast\"\nt_h = -1.0\nt_c = 1.0\nbogus = 2\n";
    let cfg = write(dir.path(), "bad.toml", text);
    let out = qtherm(&["validate", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    for needle in ["colour", "omega_a", "omega_b", "t_h", "bogus"] {
        assert!(err.contains(needle), "missing {needle}: {err}");
    }
    assert_eq!(err.lines().count(), 5, "{err}");
}

#[test]
fn unreadable_file_is_a_config_error() {
    let out = qtherm(&["validate", "/nonexistent/qtherm.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qtherm(&["otto", "--config", "/nonexistent/qtherm.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_experiment_is_a_config_error() {
    let out = qtherm(&["stirling"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("stirling"));
}

#[test]
fn model_failure_exits_with_module_error() {
    let out = qtherm(&[
        "charge-dicke",
        "--set",
        "n=2",
        "--set",
        "lambda=0.5",
        "--set",
        "tau=5",
        "--set",
        "photon_cutoff=20",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(
        stderr(&out).contains("cutoff 20 too small"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn set_overrides_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "otto.toml", OTTO);
    let out = qtherm(&["otto", "--config", &cfg, "--set", "omega_a=4"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = table(&stdout(&out));
    let eta: f64 = column(&header, &rows, "efficiency")[0].parse().unwrap();
    assert!((eta - 0.75).abs() < 1e-15);
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "ctm.toml", CTM_SWEEP);
    let a = qtherm(&["ctm", "--config", &cfg, "--threads", "1"]);
    let b = qtherm(&["ctm", "--config", &cfg, "--threads", "4"]);
    let c = Command::new(env!("CARGO_BIN_EXE_qtherm"))
        .args(["ctm", "--config", &cfg, "--threads", "1"])
        .env("QTHERM_THREADS", "7")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success() && c.status.success());
    let (a, b, c) = (
        without_wall_time(&stdout(&a)),
        without_wall_time(&stdout(&b)),
        without_wall_time(&stdout(&c)),
    );
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn seeded_random_state_is_reproducible() {
    let args = [
        "ergotropy",
        "--set",
        "energies=[0.0, 1.0, 2.5]",
        "--seed",
        "11",
    ];
    let a = without_wall_time(&stdout(&qtherm(&args)));
    let b = without_wall_time(&stdout(&qtherm(&args)));
    assert_eq!(a, b);
    let c = without_wall_time(&stdout(&qtherm(&[
        "ergotropy",
        "--set",
        "energies=[0.0, 1.0, 2.5]",
        "--seed",
        "12",
    ])));
    assert_ne!(a, c);
}

#[test]
fn json_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "otto.toml", OTTO);
    let target = dir.path().join("out.json");
    let out = qtherm(&["otto", "--config", &cfg, "--out", target.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(doc["metadata"]["experiment"], "otto");
    assert!(doc["metadata"]["config_hash"]
        .as_str()
        .unwrap()
        .starts_with("sha256:"));
    assert_eq!(doc["summary"]["efficiency"], 0.5);
    assert!(doc["summary"]["cop"].is_null());
    assert_eq!(doc["parameters"]["t_h"], 4.0);
}

#[test]
fn csv_floats_carry_seventeen_digits() {
    let out = qtherm(&[
        "maser",
        "--set",
        "omega_h=3",
        "--set",
        "omega_c=1",
        "--set",
        "t_h=4",
        "--set",
        "t_c=1",
    ]);
    let (header, rows) = table(&stdout(&out));
    let eff = column(&header, &rows, "efficiency")[0];
    let mantissa = eff.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{eff}");
    assert_eq!(eff.parse::<f64>().unwrap(), 1.0 - 1.0 / 3.0);
}

#[test]
fn list_names_every_experiment() {
    let out = qtherm(&["list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for exp in qtherm_cli::Experiment::ALL {
        assert!(
            text.lines().any(|l| l.starts_with(exp.name())),
            "{}",
            exp.name()
        );
    }
}

#[test]
fn help_documents_units() {
    let out = qtherm(&["--help"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("hbar = k_B = 1"));
}
