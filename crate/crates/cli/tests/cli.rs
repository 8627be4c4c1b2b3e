//! End-to-end checks of the binary: report determinism, exit codes, file
//! round trips and seed-stable verdicts.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semihyp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn analyze_reports_are_byte_identical_across_runs() {
    let args = ["analyze", "--family", "ex6_2", "--n", "6"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    // the report embeds its config
    let text = stdout(&a);
    assert!(text.contains("\"command\": \"analyze\""));
    assert!(text.contains("\"seed\""));
}

#[test]
fn analyze_detour_family_witness_carries_labels() {
    let out = run(&["analyze", "--family", "ex7_4", "--n", "6"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let delta = report["delta_thin_all"]["delta"].as_u64().unwrap();
    assert!(delta >= 2, "delta {delta}");
    let triple = report["delta_thin_all"]["witness_triple"].to_string();
    assert!(triple.contains('x'), "witness triple {triple}");
}

#[test]
fn analyze_path_digraph() {
    let out = run(&[
        "analyze", "--family", "nat_line", "--n", "4", "--format", "tsv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("delta_thin_all\t0"));
    assert!(text.contains("zero_hyperbolic\ttrue"));
}

#[test]
fn parse_errors_exit_2() {
    let dir = std::env::temp_dir().join("semihyp-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "3 1\n0 9\n").unwrap();
    let out = run(&["analyze", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "stderr: {err}");
}

#[test]
fn family_export_round_trips() {
    let out = run(&["family", "--family", "ex6_2", "--n", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("7 9\n"), "export: {text}");
    // reanalyze through a file
    let dir = std::env::temp_dir().join("semihyp-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path: PathBuf = dir.join("ex6_2.txt");
    std::fs::write(&path, &text).unwrap();
    let again = run(&[
        "analyze",
        "--input",
        path.to_str().unwrap(),
        "--format",
        "tsv",
    ]);
    assert!(again.status.success());
    assert!(stdout(&again).contains("vertices\t7"));
}

#[test]
fn verify_single_criterion_and_filtering() {
    let out = run(&["verify", "--criterion", "AC3", "--format", "tsv"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("AC3\tpass"));
    let out = run(&["verify", "--criterion", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verdicts_are_seed_stable() {
    // different seeds resample the corpora but must not flip the verdict
    for seed in ["1", "99"] {
        let out = run(&[
            "verify",
            "--criterion",
            "AC8",
            "--seed",
            seed,
            "--format",
            "tsv",
        ]);
        assert!(out.status.success(), "seed {seed}");
        assert!(stdout(&out).starts_with("AC8\tpass"));
    }
}

#[test]
fn qi_identity_between_equal_digraphs() {
    let dir = std::env::temp_dir().join("semihyp-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cycle.txt");
    std::fs::write(&path, "3 3\n0 1\n1 2\n2 0\n").unwrap();
    let p = path.to_str().unwrap();
    let out = run(&[
        "qi", "--input1", p, "--input2", p, "--gamma", "1", "--c", "0", "--format", "tsv",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("ok\ttrue"));
}

#[test]
fn stability_on_the_diamond() {
    let dir = std::env::temp_dir().join("semihyp-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("diamond.txt");
    std::fs::write(&path, "4 4\n0 1\n0 2\n1 3\n2 3\n").unwrap();
    let out = run(&[
        "stability",
        "--input",
        path.to_str().unwrap(),
        "--from",
        "0",
        "--to",
        "3",
        "--gamma",
        "1",
        "--c",
        "0",
        "--format",
        "tsv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("0\t3\t1\t1\t2\ttrue"), "got: {text}");
}

#[test]
fn diverge_on_the_rung_family() {
    let out = run(&[
        "diverge", "--family", "ex6_2", "--n", "8", "--format", "tsv",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("bound_pass\ttrue"));
}

#[test]
fn boundary_reports_classes_and_rho() {
    let out = run(&[
        "boundary", "--family", "ex14_2", "--n", "20", "--base", "x0", "--format", "tsv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("refinement_total\ttrue"));
    assert!(
        text.contains("boundary_class_2"),
        "three classes expected: {text}"
    );
}
