use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use zsf_cli::commands::{corpus_rows, oracle_zeros};
use zsf_cli::report::FormView;
use zsf_cli::{corpus, exit, SystemDocument};
use zsf_core::{Tolerances, ZeroSet};

fn zsf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zsf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn corpus_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(format!("{name}.json"))
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn zeros_of_first_example() {
    let out = zsf(&["zeros", corpus_file("example1").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(exit::OK));
    assert!(stdout(&out).contains("zeros: 1, 8"), "{}", stdout(&out));
}

#[test]
fn zeros_of_exactly_proper_example() {
    let out = zsf(&["zeros", corpus_file("example2").to_str().unwrap()]);
    let text = stdout(&out);
    assert!(text.contains("dynamic extension applied"), "{text}");
    assert!(text.contains("zeros: -12, -8, -1"), "{text}");
}

#[test]
fn zeros_of_wide_example_show_candidates() {
    let out = zsf(&["zeros", corpus_file("example5").to_str().unwrap()]);
    let text = stdout(&out);
    assert!(text.contains("candidates: -0.5, 0, 1, 1"), "{text}");
    assert!(text.contains("zeros: 1, 1"), "{text}");
    assert!(text.contains("confirmed"), "{text}");
}

#[test]
fn json_zero_set_parses_back_and_is_deterministic() {
    let path = corpus_file("example4");
    let first = zsf(&["zeros", path.to_str().unwrap(), "--json"]);
    let second = zsf(&["zeros", path.to_str().unwrap(), "--json"]);
    assert_eq!(first.stdout, second.stdout);
    let zs: ZeroSet = serde_json::from_slice(&first.stdout).unwrap();
    let values = zs.zeros.expanded();
    assert_eq!(values.len(), 2);
    assert!(values[0].re < values[1].re);
}

#[test]
fn json_form_parses_back() {
    let out = zsf(&[
        "transform",
        corpus_file("example1").to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(exit::OK));
    let view: FormView = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(view.l_z, 2);
    assert_eq!(view.t.len(), 3);
    assert_eq!(view.a_eta.len(), 2);
    assert!(view.residuals.max_relative() < 1e-9);
}

#[test]
fn transform_text_lists_blocks_and_residuals() {
    let out = zsf(&["transform", corpus_file("example4").to_str().unwrap()]);
    let text = stdout(&out);
    for label in [
        "T (6x6)",
        "S (6x6)",
        "A_eta (2x2)",
        "A_xi (4x4)",
        "structure residuals",
    ] {
        assert!(text.contains(label), "missing {label}: {text}");
    }
}

#[test]
fn transform_extends_feedthrough_systems() {
    let out = zsf(&[
        "transform",
        corpus_file("example2").to_str().unwrap(),
        "--json",
    ]);
    let view: FormView = serde_json::from_slice(&out.stdout).unwrap();
    assert!(view.extended);
    assert_eq!(view.t.len(), 4);
}

#[test]
fn verify_passes_on_corpus() {
    for (name, _) in corpus::sources() {
        let out = zsf(&["verify", corpus_file(name).to_str().unwrap()]);
        assert_eq!(
            out.status.code(),
            Some(exit::OK),
            "{name}: {}",
            stdout(&out)
        );
        assert!(stdout(&out).contains("result: pass"));
    }
}

#[test]
fn verify_fails_on_wrong_expectation() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = corpus::document("example1").unwrap();
    doc.expected_zeros = Some(vec![[1.0, 0.0], [9.0, 0.0]]);
    let path = write_temp(&dir, "wrong.json", &doc.to_json());
    let out = zsf(&["verify", &path]);
    assert_eq!(out.status.code(), Some(exit::CHECK_FAILED));
    assert!(stdout(&out).contains("MISMATCH"));
}

#[test]
fn corpus_command_passes() {
    let out = zsf(&["corpus"]);
    assert_eq!(out.status.code(), Some(exit::OK), "{}", stdout(&out));
    assert!(stdout(&out).contains("5/5 passed"));
    assert!(corpus_rows().iter().all(|r| r.pass));
}

#[test]
fn malformed_document_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "bad.json",
        "{\n  \"name\": \"x\",\n  \"A\": [[1, 2]\n}\n",
    );
    let out = zsf(&["zeros", &path]);
    assert_eq!(out.status.code(), Some(exit::DOCUMENT));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));
}

#[test]
fn inconsistent_document_reports_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"name": "x", "A": [[1, 0], [0, 1]], "B": [[1], [0], [0]], "C": [[1, 0]]}"#;
    let path = write_temp(&dir, "shape.json", text);
    let out = zsf(&["zeros", &path]);
    assert_eq!(out.status.code(), Some(exit::DOCUMENT));
    assert!(stderr(&out).contains("field `B`"), "{}", stderr(&out));
}

#[test]
fn missing_file_is_a_document_error() {
    let out = zsf(&["zeros", "/nonexistent/system.json"]);
    assert_eq!(out.status.code(), Some(exit::DOCUMENT));
}

#[test]
fn solver_errors_exit_three() {
    // B = 0: no output ever sees the input.
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"name": "x", "A": [[-1, 0], [0, -2]], "B": [[0], [0]], "C": [[1, 1]]}"#;
    let path = write_temp(&dir, "decoupled.json", text);
    let out = zsf(&["zeros", &path]);
    assert_eq!(out.status.code(), Some(exit::SOLVER), "{}", stderr(&out));
}

#[test]
fn tall_system_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"name": "t", "A": [[0, 1], [-2, -3]], "B": [[0], [1]], "C": [[1, 0], [0, 1]]}"#;
    let path = write_temp(&dir, "tall.json", text);
    for cmd in ["zeros", "transform", "verify"] {
        let out = zsf(&[cmd, &path]);
        assert_eq!(out.status.code(), Some(exit::TALL), "{cmd}");
    }
}

#[test]
fn tolerance_flags_override_document() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = corpus::document("example1").unwrap();
    doc.tolerances = Some(zsf_cli::ToleranceOverrides {
        match_tol: Some(-1.0),
        ..Default::default()
    });
    // invalid in the document alone
    let text = doc.to_json();
    let path = write_temp(&dir, "tol.json", &text);
    assert_eq!(zsf(&["zeros", &path]).status.code(), Some(exit::DOCUMENT));

    let path = corpus_file("example1");
    let out = zsf(&["zeros", path.to_str().unwrap(), "--tol-match", "0"]);
    assert_eq!(out.status.code(), Some(exit::DOCUMENT));
    let out = zsf(&[
        "zeros",
        path.to_str().unwrap(),
        "--tol-rank",
        "1e-9",
        "--tol-zero",
        "1e-8",
        "--tol-match",
        "1e-5",
    ]);
    assert_eq!(out.status.code(), Some(exit::OK));
}

#[test]
fn usage_errors_are_distinct() {
    assert_eq!(zsf(&["frobnicate"]).status.code(), Some(exit::USAGE));
    assert_eq!(zsf(&["--help"]).status.code(), Some(exit::OK));
}

#[test]
fn oracle_applies_to_siso_and_square_only() {
    let tol = Tolerances::default();
    for (name, _) in corpus::sources() {
        let sys = corpus::document(name).unwrap().system().unwrap();
        let oracle = oracle_zeros(&sys, &tol);
        assert_eq!(oracle.is_none(), *name == "example5", "{name}");
    }
}

#[test]
fn bundled_documents_round_trip() {
    for (name, text) in corpus::sources() {
        let doc = SystemDocument::parse(text).unwrap();
        let again = SystemDocument::parse(&doc.to_json()).unwrap();
        assert_eq!(doc, again, "{name}");
    }
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec(any::<f64>(), cols), rows)
}

fn finite(rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    rows.into_iter()
        .map(|r| {
            r.into_iter()
                .map(|v| if v.is_finite() { v } else { 0.5 })
                .collect()
        })
        .collect()
}

fn document() -> impl Strategy<Value = SystemDocument> {
    (1usize..5, 1usize..4, 1usize..4).prop_flat_map(|(n, m, p)| {
        (matrix(n, n), matrix(n, m), matrix(p, n), matrix(p, m)).prop_map(|(a, b, c, d)| {
            SystemDocument {
                name: "random".into(),
                a: finite(a),
                b: finite(b),
                c: finite(c),
                d: Some(finite(d)),
                tolerances: None,
                expected_zeros: Some(vec![[0.1, -0.2]]),
            }
        })
    })
}

proptest! {
    #[test]
    fn documents_round_trip_bit_identically(doc in document()) {
        let back = SystemDocument::parse(&doc.to_json()).unwrap();
        let (s1, s2) = (doc.system().unwrap(), back.system().unwrap());
        let bits = |m: &zsf_core::Mat| m.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(s1.a()), bits(s2.a()));
        prop_assert_eq!(bits(s1.b()), bits(s2.b()));
        prop_assert_eq!(bits(s1.c()), bits(s2.c()));
        prop_assert_eq!(bits(s1.d()), bits(s2.d()));
        prop_assert_eq!(doc, back);
    }
}
