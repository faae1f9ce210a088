//! End-to-end tests of the `aeqc` binary: exit codes, report schema and
//! determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const QFT2: &str = "qubits 2\nh 0\ncs 1 0\nh 1\nswap 0 1\n";
const QFT2_NOISY: &str =
    "qubits 2\nh 0\nnoise bit_flip 1 0.95\ncs 1 0\nnoise phase_flip 0 0.95\nh 1\nswap 0 1\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aeqc"))
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn early_exit_check_reports_the_bound_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let ideal = write(dir.path(), "ideal.qc", QFT2);
    let noisy = write(dir.path(), "noisy.qc", QFT2_NOISY);
    let json = dir.path().join("report.json");
    let out = run(&[
        "check",
        "--ideal",
        ideal.to_str().unwrap(),
        "--noisy",
        noisy.to_str().unwrap(),
        "--epsilon",
        "0.1",
        "--algorithm",
        "individual",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("yes-by-bound"), "{text}");
    assert!(text.contains("0.902500000000"), "{text}");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    for key in [
        "verdict",
        "fj",
        "is_lower_bound",
        "epsilon",
        "algorithm",
        "terms_evaluated",
        "total_terms",
        "avg_fidelity",
        "cj",
        "peak_nodes",
        "wall_time_s",
        "seed",
    ] {
        assert!(report.get(key).is_some(), "missing key {key}");
    }
    assert_eq!(report["verdict"], "yes-by-bound");
    assert_eq!(report["terms_evaluated"], 1);
    assert_eq!(report["total_terms"], 4);
    assert!((report["fj"].as_f64().unwrap() - 0.9025).abs() < 1e-12);
}

#[test]
fn identical_circuits_are_equivalent_with_fidelity_one() {
    let dir = tempfile::tempdir().unwrap();
    let ideal = write(dir.path(), "ideal.qc", QFT2);
    let out = run(&[
        "check",
        "--ideal",
        ideal.to_str().unwrap(),
        "--noisy",
        ideal.to_str().unwrap(),
        "--epsilon",
        "0.01",
        "--oracle",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("fidelity:         1.000000000000"), "{text}");
    assert!(text.contains("oracle check: ok"), "{text}");
}

#[test]
fn tight_epsilon_yields_exit_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let ideal = write(dir.path(), "ideal.qc", QFT2);
    let noisy = write(dir.path(), "noisy.qc", QFT2_NOISY);
    let out = run(&[
        "check",
        "--ideal",
        ideal.to_str().unwrap(),
        "--noisy",
        noisy.to_str().unwrap(),
        "--epsilon",
        "0.05",
    ]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    assert!(stdout(&out).contains("not equivalent"));
}

#[test]
fn input_errors_yield_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let ideal = write(dir.path(), "ideal.qc", QFT2);
    let bad = write(dir.path(), "bad.qc", "qubits 2\nh 5\n");

    let out = run(&[
        "check",
        "--ideal",
        ideal.to_str().unwrap(),
        "--noisy",
        bad.to_str().unwrap(),
        "--epsilon",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");

    let out = run(&[
        "check",
        "--ideal",
        dir.path().join("missing.qc").to_str().unwrap(),
        "--noisy",
        ideal.to_str().unwrap(),
        "--epsilon",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");

    // epsilon outside [0, 1]
    let out = run(&[
        "check",
        "--ideal",
        ideal.to_str().unwrap(),
        "--noisy",
        ideal.to_str().unwrap(),
        "--epsilon",
        "1.5",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn noise_spec_json_is_applied() {
    let dir = tempfile::tempdir().unwrap();
    let ideal = write(dir.path(), "ideal.qc", QFT2);
    let spec = write(
        dir.path(),
        "noise.json",
        r#"[{"after": 0, "qubit": 1, "channel": "bit_flip", "p": 0.95},
            {"after": 1, "qubit": 0, "channel": "phase_flip", "p": 0.95}]"#,
    );
    let json = dir.path().join("report.json");
    let out = run(&[
        "check",
        "--ideal",
        ideal.to_str().unwrap(),
        "--noisy",
        ideal.to_str().unwrap(),
        "--noise-spec",
        spec.to_str().unwrap(),
        "--epsilon",
        "0.2",
        "--exact",
        "--oracle",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    // full run of the Fig.-2-style circuit: fj = p² = 0.9025
    assert_eq!(report["is_lower_bound"], false);
    assert!((report["fj"].as_f64().unwrap() - 0.9025).abs() < 1e-10);
}

#[test]
fn json_reports_are_deterministic_modulo_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let ideal = write(dir.path(), "ideal.qc", QFT2);
    let noisy = write(dir.path(), "noisy.qc", QFT2_NOISY);
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let json = dir.path().join(name);
        let out = run(&[
            "check",
            "--ideal",
            ideal.to_str().unwrap(),
            "--noisy",
            noisy.to_str().unwrap(),
            "--epsilon",
            "0.1",
            "--seed",
            "42",
            "--workers",
            "2",
            "--json",
            json.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_s");
        reports.push(v);
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn bench_reports_unit_fidelity_for_noiseless_circuits() {
    let out = run(&["bench", "bv", "5", "--noises", "0"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("bv5"), "{text}");
    assert!(text.contains("1.000000000"), "{text}");
}

#[test]
fn bench_writes_csv_rows_per_noise_count() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let out = run(&[
        "bench",
        "qft",
        "3",
        "--noises",
        "1..3",
        "--seed",
        "9",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let content = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = content.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("circuit,n,gates,noises,fj"));
    assert!(lines[1].starts_with("qft3,3,"));
}

#[test]
fn bench_rejects_unknown_family() {
    let out = run(&["bench", "grover", "3"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn bench_flip_noise_on_qft2_reports_a_fidelity() {
    let out = run(&["bench", "qft", "2", "--noises", "2", "--channel", "bit_flip", "--p", "0.95"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    // fidelity column is bounded and printed with nine decimals
    let text = stdout(&out);
    assert!(text.lines().count() >= 2, "{text}");
}
