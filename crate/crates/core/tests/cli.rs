use std::process::{Command, Output};

use serde_json::Value;

fn torrec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torrec"))
        .args(args)
        .env_remove("TORREC_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn dim_reports_branch_and_config() {
    let v = json(&torrec(&["dim", "--matrix", "2,1;1,1", "--tau", "1.9248"]));
    assert_eq!(v["schema"], 1);
    assert_eq!(v["result"]["branch"], "log|λ₂|/τ");
    assert!((v["result"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-4);
    assert_eq!(v["config"]["command"], "dim");
    assert_eq!(v["config"]["matrix"], "2,1;1,1");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn periodic_lists_exact_points() {
    let v = json(&torrec(&["periodic", "--matrix", "[[2,1],[1,1]]", "--n", "2", "--oracle"]));
    let points = v["result"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 5);
    assert_eq!(v["result"]["count"], "5");
    assert_eq!(v["result"]["oracle_agrees"], true);
    assert!(points.iter().any(|p| p[0] == "1/5" && p[1] == "2/5"));
}

#[test]
fn rejected_matrix_exits_2() {
    let out = torrec(&["validate", "--matrix", "1,0;0,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eigenvalue on unit circle"));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(torrec(&["dim", "--matrix", "2,1;1,1", "--bogus"]).status.code(), Some(1));
    assert_eq!(torrec(&["dim", "--matrix", "2,1;1,1"]).status.code(), Some(1));
    assert_eq!(torrec(&["dim", "--matrix", "2,x;1,1", "--tau", "1"]).status.code(), Some(1));
    assert_eq!(torrec(&[]).status.code(), Some(1));
    assert_eq!(torrec(&["--help"]).status.code(), Some(0));
}

#[test]
fn cap_exceeded_exits_3() {
    let out = torrec(&["periodic", "--matrix", "2,1;1,1", "--n", "12", "--cap", "100"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn hypothesis_failure_exits_2() {
    let out = torrec(&["dim3d", "--m", "1", "--log-lambda", "3.0", "--tau", "1"]);
    assert!(matches!(out.status.code(), Some(1) | Some(2)));
    let out = torrec(&["geometry", "--matrix", "2,1;1,0", "--tau", "1", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (args, name) in [
        (vec!["measure", "--matrix", "2,1;1,1", "--tau", "0.5", "--n", "5", "--samples", "5000", "--seed", "9"], "m.json"),
        (vec!["cover", "--matrix", "3,1;1,1", "--tau", "1.2", "--n-min", "5", "--n-max", "9", "--format", "csv"], "c.csv"),
    ] {
        let first = dir.path().join(name);
        let second = dir.path().join(format!("re-{name}"));
        let mut a = args.clone();
        a.extend(["--output", first.to_str().unwrap()]);
        assert!(torrec(&a).status.success());
        let out = torrec(&["--replay", first.to_str().unwrap(), "--output", second.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["measure", "--matrix", "2,1;1,1", "--tau", "0.5", "--n", "6", "--samples", "20000"];
    let one = torrec(&[&args[..], &["--threads", "1"]].concat());
    let four = torrec(&[&args[..], &["--threads", "4"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn csv_carries_provenance_line() {
    let out = torrec(&["upper-bound", "--ells", "-1,0.5,2", "--tau", "1", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let head = lines.next().unwrap();
    assert!(head.starts_with("# {"));
    let cfg = torrec::cli::embedded_config(&text).unwrap();
    assert_eq!(cfg.format, torrec::cli::Format::Csv);
    assert_eq!(lines.next().unwrap(), "candidate,value,attains_min");
}

#[test]
fn equidist_from_alpha() {
    let v = json(&torrec(&["equidist", "--alpha", "-1,1,5,2", "--horizon", "1000", "--q-max", "100000"]));
    let c = v["result"]["badly_approximable_constant"].as_f64().unwrap();
    assert!((c - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-9);
    let bad = torrec(&["equidist", "--alpha", "1,1,5,0"]);
    assert_eq!(bad.status.code(), Some(1));
    let rational = torrec(&["equidist", "--alpha", "1,1,4,3"]);
    assert_eq!(rational.status.code(), Some(2));
}
