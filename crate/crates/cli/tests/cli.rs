use std::path::Path;
use std::process::{Command, Output};

use rsp_core::io::{format_matrix, parse_matrix, parse_tradeoff_csv};
use rsp_core::linalg::ComplexMatrix;

fn rsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsp"))
        .args(args)
        .env_remove("RSP_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_reports_both_outcomes() {
    let o = rsp(&["run", "--mode", "equatorial", "--phi", "0.7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.matches("fidelity_B 0.853553").count(), 2, "{text}");

    let o = rsp(&["run", "--mode", "polar", "--theta", "0.9"]);
    assert!(stdout(&o).contains("fidelity_B 0.833333"));
    assert!(!stdout(&o).contains("MISMATCH"));
}

#[test]
fn pole_mismatch_is_flagged_off_the_pole() {
    let o = rsp(&["run", "--mode", "polar", "--theta", "0.9", "--alpha", "1.0"]);
    let text = stdout(&o);
    assert!(
        text.contains("= 1.000000") && text.contains("MISMATCH"),
        "{text}"
    );
    let o = rsp(&["run", "--mode", "polar", "--theta", "0", "--alpha", "1.0"]);
    assert!(!stdout(&o).contains("MISMATCH"));
}

#[test]
fn run_output_is_byte_identical_across_invocations() {
    let args = ["run", "--mode", "polar", "--theta", "2.5", "--alpha", "0.3"];
    assert_eq!(rsp(&args).stdout, rsp(&args).stdout);
}

#[test]
fn bad_flags_exit_with_usage_code() {
    for args in [
        &["run", "--mode", "equatorial"][..],
        &["run", "--mode", "equatorial", "--phi", "7"],
        &["run", "--mode", "polar", "--theta", "1", "--alpha", "2"],
        &["run", "--mode", "sideways", "--phi", "1"],
        &["tradeoff", "--alpha-steps", "1", "--out", "x.csv"],
        &["frobnicate"],
    ] {
        let o = rsp(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn tradeoff_writes_csv_and_notes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let o = rsp(&["tradeoff", "--alpha-steps", "3", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("paper-discrepancy"));
    let rows = parse_tradeoff_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows
        .windows(2)
        .all(|w| w[0].alpha < w[1].alpha && w[0].er_eq10 <= w[1].er_eq10));
    let polar = rows
        .iter()
        .find(|r| (r.f_pole - 5.0 / 6.0).abs() < 1e-12)
        .unwrap();
    assert!((polar.er_eq10 - 0.4425).abs() < 1e-3);
    assert!(polar.er_numeric_ab <= polar.eof_ab + polar.gap);
    let notes = std::fs::read_to_string(dir.path().join("curve.notes.txt")).unwrap();
    assert!(notes.contains("0.6095") && notes.contains("0.4425"));

    let seq = dir.path().join("seq.csv");
    rsp(&[
        "tradeoff",
        "--alpha-steps",
        "3",
        "--out",
        path_str(&seq),
        "--sequential",
    ]);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&seq).unwrap());

    let o = rsp(&[
        "tradeoff",
        "--alpha-steps",
        "3",
        "--out",
        "/nonexistent/dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn ere_on_state_files() {
    let dir = tempfile::tempdir().unwrap();
    let bell = dir.path().join("bell.txt");
    let mut m = ComplexMatrix::zeros(4);
    for (i, j, v) in [(1, 1, 0.5), (2, 2, 0.5), (1, 2, -0.5), (2, 1, -0.5)] {
        m[(i, j)].re = v;
    }
    std::fs::write(&bell, format_matrix(&m)).unwrap();
    let o = rsp(&["ere", path_str(&bell)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let value: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("value_bits "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 1.0).abs() < 1e-3);
    assert!(text.contains("paper-discrepancy") && text.contains("0.6095"));
    let sigma =
        parse_matrix(&std::fs::read_to_string(dir.path().join("bell.sigma.txt")).unwrap()).unwrap();
    assert_eq!(sigma.dim(), 4);

    let mixed = dir.path().join("mixed.txt");
    std::fs::write(
        &mixed,
        format_matrix(&ComplexMatrix::identity(4).scale_real(0.25)),
    )
    .unwrap();
    let text = stdout(&rsp(&["ere", path_str(&mixed)]));
    let value: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("value_bits "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(value <= 1e-9);

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, format_matrix(&ComplexMatrix::identity(4))).unwrap();
    let o = rsp(&["ere", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trace"));

    let o = rsp(&["ere", path_str(&dir.path().join("missing.txt"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn locc_sessions_replay_and_topologies_agree() {
    let dir = tempfile::tempdir().unwrap();
    let standard = dir.path().join("standard.txt");
    let o = rsp(&[
        "locc",
        "--mode",
        "equatorial",
        "--phi",
        "1.1",
        "--seed",
        "7",
        "--out",
        path_str(&standard),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&standard).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.starts_with("broadcast,")).count(),
        1
    );
    assert!(stdout(&o).contains("classical_cost_bits 1"));

    let fidelities = |out: &Output| -> Vec<String> {
        stdout(out)
            .lines()
            .filter(|l| l.starts_with("fidelity_"))
            .map(String::from)
            .collect()
    };
    let replayed = rsp(&["locc", "--replay", path_str(&standard)]);
    assert_eq!(replayed.status.code(), Some(0));
    assert_eq!(fidelities(&replayed), fidelities(&o));

    let same = dir.path().join("same.txt");
    let o2 = Command::new(env!("CARGO_BIN_EXE_rsp"))
        .args([
            "locc",
            "--mode",
            "equatorial",
            "--phi",
            "1.1",
            "--topology",
            "same-location",
        ])
        .args(["--out", path_str(&same)])
        .env("RSP_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(o2.status.code(), Some(0));
    assert_eq!(fidelities(&o2), fidelities(&o));
    assert!(std::fs::read_to_string(&same)
        .unwrap()
        .contains(",same-location,7,"));

    let tampered = dir.path().join("tampered.txt");
    std::fs::write(&tampered, text.replace("final,", "final,0.5,0.5\n#")).unwrap();
    assert_eq!(
        rsp(&["locc", "--replay", path_str(&tampered)])
            .status
            .code(),
        Some(4)
    );

    let o = rsp(&[
        "locc",
        "--mode",
        "polar",
        "--theta",
        "1",
        "--out",
        "/nonexistent/t.txt",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_passes_and_catches_a_corrupted_constant() {
    let o = rsp(&["verify", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let records: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 10);
    assert!(records.iter().all(|r| r["passed"] == true));

    let wrong = format!("equatorial_coherence={}", 1.0 / (2.0 * 3f64.sqrt()));
    let o = rsp(&["verify", "--expect", &wrong]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL  2"));
}
