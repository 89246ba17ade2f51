use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn memloss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memloss")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const IDLE: &str = r#"{"n": 1, "gamma": 0.3, "layers": [{}, {}]}"#;
const BELL: &str = r#"{"n": 2, "gamma": 0.1, "layers": [
    {"gates": [{"kind": "H", "qubits": [0]}]},
    {"gates": [{"kind": "CNOT", "qubits": [0, 1]}], "resets": [{"qubit": 1, "bloch": [0, 0, 1]}]}]}"#;

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&memloss(&[])), 1);
    assert_eq!(code(&memloss(&["frobnicate"])), 1);
    assert_eq!(code(&memloss(&["check", "nonsense"])), 1);
    assert_eq!(code(&memloss(&["validate", "/definitely/not/here.json"])), 1);
    assert_eq!(code(&memloss(&["--help"])), 0);
}

#[test]
fn validate_reports_structure() {
    let dir = tempfile::tempdir().unwrap();
    let ok = memloss(&["validate", s(&write(dir.path(), "bell.json", BELL))]);
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).starts_with("ok: n=2 depth=2"));

    let overlap = r#"{"n": 2, "gamma": 0.1, "layers": [
        {"gates": [{"kind": "H", "qubits": [0]}, {"kind": "CNOT", "qubits": [0, 1]}]}]}"#;
    let bad = memloss(&["validate", s(&write(dir.path(), "bad.json", overlap))]);
    assert_eq!(code(&bad), 2);
    assert!(stdout(&bad).contains("layer 0"));
}

#[test]
fn survival_prints_an_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "idle.json", IDLE);
    let o = memloss(&[
        "survival",
        s(&path),
        "--trials",
        "20000",
        "--seed",
        "3",
        "--confidence",
        "0.99",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (lo, hi) = (v["ci_lo"].as_f64().unwrap(), v["ci_hi"].as_f64().unwrap());
    assert!(lo <= 0.49 && 0.49 <= hi, "{v}");
    assert_eq!(v["trials"], 20000);
    let again = memloss(&[
        "survival",
        s(&path),
        "--trials",
        "20000",
        "--seed",
        "3",
        "--confidence",
        "0.99",
    ]);
    assert_eq!(stdout(&again), stdout(&o));
}

#[test]
fn exact_trace_distance_on_idle_qubit() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "idle.json", IDLE);
    let zero = write(dir.path(), "zero.json", r#"{"n": 1, "amplitudes": [1, 0]}"#);
    let one = write(dir.path(), "one.json", r#"{"n": 1, "matrix": [[0, 0], [0, 1]]}"#);
    let o = memloss(&["exact", s(&c), "--rho", s(&zero), "--sigma", s(&one)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let d: f64 = stdout(&o).trim().parse().unwrap();
    assert!((d - 2.0 * 0.49).abs() < 1e-12);
}

#[test]
fn oversized_dense_request_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "big.json", r#"{"n": 8, "gamma": 0.1, "layers": [{}]}"#);
    let mut amps = vec!["0"; 256];
    amps[0] = "1";
    let rho = write(
        dir.path(),
        "rho.json",
        &format!(r#"{{"n": 8, "amplitudes": [{}]}}"#, amps.join(",")),
    );
    let o = memloss(&["exact", s(&c), "--rho", s(&rho), "--sigma", s(&rho)]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn check_suites_exit_codes() {
    for suite in ["adjoint", "equivalence", "mixture"] {
        let o = memloss(&["check", suite, "--instances", "10", "--seed", "4"]);
        assert_eq!(code(&o), 0, "{suite}: {}", stdout(&o));
        assert!(stdout(&o).contains(&format!("{suite}: ")));
    }
    let o = memloss(&["check", "lemma1", "--instances", "5", "--seed", "4", "--verbose"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("idle equality"));
    // too few samples is rejected up front
    assert_eq!(code(&memloss(&["check", "fact", "--instances", "10"])), 1);
}

#[test]
fn sweep_fit_plot_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"family": "idle", "n": [1, 2], "gamma": [0.3], "depths": [1, 2, 3, 4, 6, 8], "trials": 20000, "seed": 1}"#,
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(code(&memloss(&["sweep", s(&cfg), "--out", s(&a), "--threads", "1"])), 0);
    assert_eq!(code(&memloss(&["sweep", s(&cfg), "--out", s(&b), "--threads", "8"])), 0);
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("family,n,gamma,depth,trials,survivors,p_hat,ci_lo,ci_hi,seed\n"));
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 13);

    // resuming a finished sweep changes nothing
    assert_eq!(code(&memloss(&["sweep", s(&cfg), "--out", s(&a)])), 0);
    assert_eq!(fs::read_to_string(&a).unwrap(), text);

    let fit = memloss(&["fit", s(&a), "--epsilon", "0.01"]);
    assert_eq!(code(&fit), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&fit)).unwrap();
    let slope = v["fits"][0]["slope"].as_f64().unwrap();
    assert!((slope - 0.7f64.ln()).abs() < 0.05, "{slope}");
    assert!(v["scaling"][0]["error"].is_string());

    let svg = dir.path().join("p.svg");
    assert_eq!(
        code(&memloss(&[
            "plot",
            s(&a),
            "--kind",
            "survival-vs-depth",
            "--out",
            s(&svg)
        ])),
        0
    );
    let first = fs::read(&svg).unwrap();
    assert_eq!(
        code(&memloss(&[
            "plot",
            s(&a),
            "--kind",
            "survival-vs-depth",
            "--out",
            s(&svg)
        ])),
        0
    );
    assert_eq!(fs::read(&svg).unwrap(), first);
    assert!(String::from_utf8(first).unwrap().starts_with("<svg"));
}

#[test]
fn empty_depth_grid_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"family": "idle", "n": [1], "gamma": [0.3], "depths": [], "trials": 100, "seed": 1}"#,
    );
    let out = dir.path().join("e.csv");
    assert_eq!(code(&memloss(&["sweep", s(&cfg), "--out", s(&out)])), 0);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 1);
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"family": "idle", "n": [1], "gamma": [0.3], "depths": [2, 1], "trials": 100, "seed": 1}"#,
    );
    assert_eq!(code(&memloss(&["sweep", s(&bad), "--out", s(&out)])), 1);
}
