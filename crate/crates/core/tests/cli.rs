use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn dspec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dspec"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("OUTPUT_DIR")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn error_kind(o: &Output) -> String {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().last().unwrap_or_default();
    let v: Value = serde_json::from_str(line).unwrap_or_else(|_| panic!("stderr is not error JSON: {text}"));
    v["error"]["kind"].as_str().unwrap().to_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_exact_interval() {
    let dir = TempDir::new().unwrap();
    let o = dspec(dir.path(), &["solve", "--preset", "interval_union(1)", "--exact", "--tmax", "100"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let eig = read_json(&dir.path().join("eig.json"));
    let values = eig["eigenvalues"].as_array().unwrap();
    assert_eq!(values.len(), 3);
    assert!((values[0].as_f64().unwrap() - std::f64::consts::PI.powi(2)).abs() < 1e-12);
}

#[test]
fn solve_spec_file_on_grid() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("sq.dom");
    fs::write(&spec, "dim=2\nrect 0 0 1 1\n").unwrap();
    let o = dspec(
        dir.path(),
        &["solve", "--spec", spec.to_str().unwrap(), "--h", "0.0625", "--count", "3", "--functions", "--format", "json"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let eig = read_json(&dir.path().join("eig.json"));
    assert_eq!(eig["eigenvalues"].as_array().unwrap().len(), 3);
    let bin = fs::metadata(dir.path().join("eig_functions.bin")).unwrap().len();
    assert_eq!(bin, 3 * 15 * 15 * 8);
}

#[test]
fn verify_saved_eigen_data() {
    let dir = TempDir::new().unwrap();
    let o = dspec(dir.path(), &["solve", "--preset", "interval_union(1)", "--exact", "--count", "10"]);
    assert_eq!(code(&o), 0);
    let eig = dir.path().join("eig.json");
    let o = dspec(dir.path(), &["verify", "--eig", eig.to_str().unwrap(), "--checks", "thm212,remark213,e59"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let verdicts = dir.path().join("verdicts.json");
    let v = read_json(&verdicts);
    assert_eq!(v["summary"]["failed"], 0);
    assert!(v["metadata"]["tool"].is_string());

    let o = dspec(dir.path(), &["report", "--input", verdicts.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("thm212"));
}

#[test]
fn failed_check_exits_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&dspec(dir.path(), &["solve", "--preset", "interval_union(1)", "--exact", "--count", "5"])), 0);
    let path = dir.path().join("eig.json");
    let mut eig = read_json(&path);
    let norms = eig["norms"][2].clone();
    // Shrink one L1 norm below the lower bound.
    eig["norms"][2]["l1"] = Value::from(norms["l1"].as_f64().unwrap() * 0.1);
    fs::write(&path, eig.to_string()).unwrap();
    let o = dspec(dir.path(), &["verify", "--eig", path.to_str().unwrap(), "--checks", "thm212"]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read_json(&dir.path().join("verdicts.json"))["summary"]["failed"].as_u64().unwrap() > 0);
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let o = dspec(dir.path(), &["solve", "--spec", "/nonexistent/domain.dom", "--h", "0.1"]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_kind(&o), "io");

    let o = dspec(dir.path(), &["verify", "--preset", "unit_square", "--h", "0.125", "--checks", "bogus"]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_kind(&o), "unknown_check");

    let o = dspec(dir.path(), &["solve", "--bogus-flag"]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_kind(&o), "usage");

    let o = dspec(dir.path(), &["sweep", "--family", "teapots", "--m", "1"]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_kind(&o), "unknown_family");

    let spec = dir.path().join("bad.dom");
    fs::write(&spec, "dim=2\nrect 0 0 1\n").unwrap();
    let o = dspec(dir.path(), &["solve", "--spec", spec.to_str().unwrap(), "--h", "0.1"]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_kind(&o), "parse");
}

#[test]
fn heat_with_oracle() {
    let dir = TempDir::new().unwrap();
    let o = dspec(
        dir.path(),
        &["heat", "--preset", "interval_union(1)", "--exact", "--times", "0.05,0.1,0.2,0.5", "--oracle"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("heat.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.lines().next().unwrap().contains("Q_timestep"));
    let series = read_json(&dir.path().join("heat.json"));
    let q = series["q_spectral"][1].as_f64().unwrap();
    assert!((q - 0.302_118_09).abs() < 1e-6);
    assert!(dir.path().join("heat_checks.json").exists());

    let o = dspec(dir.path(), &["heat", "--preset", "interval_union(1)", "--exact", "--times", ""]);
    assert_eq!(code(&o), 2);
}

#[test]
fn sweep_establishes_then_compares() {
    let dir = TempDir::new().unwrap();
    let golden = dir.path().join("envelopes.json");
    let args = ["sweep", "--family", "disjoint_balls", "--m", "1,2", "--h", "0.0625", "--golden", golden.to_str().unwrap()];
    let first = dspec(dir.path(), &args);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    let stored = read_json(&golden);
    assert!(stored["disjoint_balls:thm01"].as_f64().unwrap() > 0.0);

    let second = dspec(dir.path(), &args);
    assert_eq!(code(&second), 0);
    assert_eq!(read_json(&golden), stored);

    // An envelope far below the observed ratios must fail the run.
    fs::write(&golden, r#"{"disjoint_balls:thm01": 1e-9, "disjoint_balls:e510": 1e-9}"#).unwrap();
    let third = dspec(dir.path(), &args);
    assert_eq!(code(&third), 1);
}

#[test]
fn output_dir_from_environment() {
    let dir = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_dspec"))
        .args(["solve", "--preset", "interval_union(1)", "--exact", "--count", "2"])
        .env("OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("eig.json").exists());
}
