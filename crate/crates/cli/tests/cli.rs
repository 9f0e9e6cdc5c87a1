use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_central-spin"));
    c.env_remove("CSPIN_THREADS");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].to_string()).collect()
}

fn floats(csv: &str, name: &str) -> Vec<f64> {
    column(csv, name).iter().map(|x| x.parse().unwrap()).collect()
}

fn sidecar(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn evolve_period_doubling() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["evolve", "--n-sat", "19", "--lambda", "2pi", "--g", "pi", "--periods", "100", "-o", "traj.csv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8(out.stdout).unwrap();
    assert_eq!(summary.lines().count(), 1);
    assert!(summary.starts_with("evolve:"));

    let csv = std::fs::read_to_string(dir.path().join("traj.csv")).unwrap();
    let m = floats(&csv, "m_sat");
    assert_eq!(m.len(), 101);
    for (n, x) in m.iter().enumerate() {
        let want = if n % 2 == 0 { 9.5 } else { -9.5 };
        assert!((x - want).abs() < 1e-8, "n={n}: {x}");
    }
    let meta = sidecar(&dir.path().join("traj.json"));
    assert_eq!(meta["subcommand"], "evolve");
    assert_eq!(meta["results"]["backend"], "symmetric");
    assert_eq!(meta["config"]["command"]["evolve"]["n_sat"], 19);
}

#[test]
fn evolve_decimal_angles() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["evolve", "--n-sat", "19", "--lambda", "6.283185", "--g", "3.141593", "--periods", "100"],
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("evolve.csv")).unwrap();
    for (n, x) in floats(&csv, "m_sat").iter().enumerate() {
        let want = if n % 2 == 0 { 9.5 } else { -9.5 };
        // Six-decimal angles are off by ~1e-7 rad.
        assert!((x - want).abs() < 1e-3, "n={n}: {x}");
    }
}

#[test]
fn oracle_check_all_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["oracle-check", "--n-sat", "4..13"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("oracle-check.csv")).unwrap();
    let fid = floats(&csv, "fidelity");
    assert_eq!(fid.len(), 80);
    assert!(fid.iter().all(|f| (f - 1.0).abs() <= 1e-10));
    let meta = sidecar(&dir.path().join("oracle-check.json"));
    assert_eq!(meta["results"]["failing"], 0);
}

#[test]
fn qfi_fit_reports_quadratic_growth() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["qfi", "--n-sat", "7", "--lambda", "3.141593", "--g", "1.570796", "--periods", "10..100", "--fit"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta = sidecar(&dir.path().join("qfi.json"));
    let alpha = meta["results"]["fit"]["exponent"].as_f64().unwrap();
    assert!((alpha - 2.0).abs() < 0.1, "alpha = {alpha}");
    assert_eq!(meta["results"]["fit"]["points"].as_array().unwrap().len(), 91);
    let csv = std::fs::read_to_string(dir.path().join("qfi.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "lambda,g,n_periods,n_sat,F_ll,F_gg,F_lg,G,delta"
    );
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "# HO-DTC point\nsubcommand = evolve\nn_sat = 5\nlambda = pi\ng = pi/2 # quarter turn\nperiods = 24\nhalf_periods = true\n",
    )
    .unwrap();
    let out = run(dir.path(), &["--config", "run.cfg", "--periods", "12", "-o", "cfg.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("cfg.csv")).unwrap();
    // Initial record plus two per period.
    assert_eq!(csv.lines().count(), 1 + 1 + 2 * 12);
    let meta = sidecar(&dir.path().join("cfg.json"));
    assert_eq!(meta["config"]["command"]["evolve"]["periods"], 12);
    assert_eq!(meta["config"]["command"]["evolve"]["half_periods"], true);

    // The subcommand may also come from the command line.
    std::fs::write(dir.path().join("grid.cfg"), "n-sat = 4\nlambda = 2pi\ng = 2pi\nperiods = 3\n").unwrap();
    let out = run(dir.path(), &["evolve", "--config", "grid.cfg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec![
            "sweep", "--n-sat", "5", "--quantity", "O_bar", "--lambda", "0..4pi", "--lambda-points", "5",
            "--g", "0..2pi", "--g-points", "4", "--o-window", "60", "-o", out,
        ]
    };
    assert!(run(dir.path(), &args("a.csv")).status.success());
    let out = bin()
        .current_dir(dir.path())
        .env("CSPIN_THREADS", "2")
        .args(args("b.csv"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    let csv = String::from_utf8(a).unwrap();
    assert_eq!(csv.lines().count(), 21);
    assert_eq!(csv.lines().next().unwrap(), "lambda,g,n_sat,quantity,value,error");
}

#[test]
fn failed_cells_are_recorded_and_counted() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["sweep", "--n-sat", "30", "--backend", "full", "--lambda-points", "2", "--g-points", "3"],
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("6 warnings"), "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(column(&csv, "value").iter().all(|v| v.is_empty()));
    assert!(column(&csv, "error").iter().all(|e| e.contains("full backend")));
}

#[test]
fn errors_are_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    for (args, kind, code) in [
        (vec!["evolve", "--n-sat", "3", "--lambda", "pie", "--g", "1", "--periods", "2"], "usage", 2),
        (vec!["sweep", "--n-sat", "3", "--lambda", "2..1", "--lambda-points", "1"], "usage", 2),
        (vec!["evolve", "--n-sat", "3", "--lambda", "1", "--g-c", "1", "--g-sat", "1,2,3", "--periods", "2", "--backend", "symmetric"], "simulation", 1),
        (vec!["--config", "missing.cfg", "evolve"], "usage", 2),
        (vec!["frobnicate"], "usage", 2),
    ] {
        let out = run(dir.path(), &args);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        let stderr = String::from_utf8(out.stderr).unwrap();
        let record: Value = serde_json::from_str(stderr.lines().next().unwrap()).unwrap();
        assert_eq!(record["error"]["kind"], kind, "{args:?}");
        assert!(out.stdout.is_empty());
    }
    let out = bin()
        .current_dir(dir.path())
        .env("CSPIN_THREADS", "0")
        .args(["evolve", "--n-sat", "2", "--lambda", "1", "--g", "1", "--periods", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scaling_and_scan_write_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["scaling", "--n-sat", "6..20", "--periods", "100"]);
    assert!(out.status.success());
    let meta = sidecar(&dir.path().join("scaling.json"));
    assert_eq!(meta["results"]["fit"]["points"].as_array().unwrap().len(), 8);

    let out = run(dir.path(), &["qfi-scan", "--n-sat", "9", "--points", "9", "--periods", "40"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("qfi-scan.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    assert!(column(&csv, "regime").iter().all(|r| !r.is_empty()));
}
