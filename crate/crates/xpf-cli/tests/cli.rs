//! End-to-end runs of the `xpf` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn xpf(args: &[&str]) -> Output {
    xpf_env(args, &[])
}

fn xpf_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_xpf"));
    cmd.args(args)
        .env_remove("XPF_MAX_QUBITS")
        .env_remove("XPF_SEARCH_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("xpf runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

#[test]
fn codewords_of_code_one() {
    let out = xpf(&["codewords", &path("code1.txt")]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for line in [
        "|κ_0⟩ = |0000001⟩ + ω^6|0001110⟩ + ω^9|1110001⟩ + ω^15|1111110⟩",
        "|κ_1⟩ = |0000010⟩ + ω^4|0001101⟩ + ω^9|1110010⟩ + ω^13|1111101⟩",
        "|κ_2⟩ = |0000100⟩ + ω^2|0001011⟩ + ω^9|1110100⟩ + ω^11|1111011⟩",
        "|κ_3⟩ = |0000111⟩ + |0001000⟩ + ω^9|1110111⟩ + ω^9|1111000⟩",
    ] {
        assert!(text.contains(line), "missing {line} in\n{text}");
    }
    assert!(text.contains("E_m:\n  0000001\n  0000010\n  0000100\n  0000111\n"));
}

#[test]
fn reed_muller_logical_reports_t_dagger() {
    let out = xpf(&["rm", "4", "--precision", "8"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let file = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("rm4_n8.txt");
    std::fs::write(&file, stdout(&out)).unwrap();
    let out = xpf(&["logical", &file.to_string_lossy()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("XP_8(0|000000000000000|111111111111111)"),
        "{text}"
    );
    assert!(
        text.contains("XP_8(0|000000000000000|000022222200002)"),
        "{text}"
    );
}

#[test]
fn reed_muller_at_construction_precision() {
    let out = xpf(&["rm", "4"]);
    let text = stdout(&out);
    assert!(text.contains("N=4 n=15"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("XP_4(")).count(), 8);
}

#[test]
fn diagonal_pauli_measurement_on_code_two() {
    let out = xpf(&[
        "measure",
        &path("code2.txt"),
        "XP_2(0|0000000|0111111)",
        "--diag-pauli",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("Pr(+1) = 1/4"), "{text}");
    assert!(text.contains("Pr(-1) = 3/4"), "{text}");
}

#[test]
fn json_code_file_matches_text() {
    let a = xpf(&["--format", "json", "logical", &path("code2.txt")]);
    let b = xpf(&["--format", "json", "logical", &path("code2.json")]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["core_size"], 4);
    assert_eq!(v["lx"][0], "XP_8(2|0011110|0012304)");
}

#[test]
fn output_is_deterministic() {
    let args = [
        "--format",
        "json",
        "measure",
        &path("code2.txt"),
        "XP_8(2|0011110|0012304)",
    ];
    let first = stdout(&xpf(&args));
    assert_eq!(first, stdout(&xpf(&args)));
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["outcomes"][0]["probability"], "1/2");
}

#[test]
fn action_of_classified_operator() {
    let out = xpf(&["action", &path("code2.txt"), "XP_8(0|0|0026620)"]);
    let text = stdout(&out);
    assert!(
        text.contains("phase vector f: [0, 0, 0, 8, 0, 0, 0, 8]"),
        "{text}"
    );
    assert!(text.contains("classification: core"), "{text}");
    let out = xpf(&["action", &path("code2.txt"), "XP_8(0|0|1000000)"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("not a logical operator"));
}

#[test]
fn hypergraph_conversion_round_trip() {
    let out = xpf(&["convert", "--whg-to-xp", "--optimised", &path("graph.txt")]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.starts_with("N=4 n=6\nXP_4(0|100010|320010)\n"),
        "{text}"
    );

    let out = xpf(&["convert", "--xp-to-whg", &path("cz_pair.txt")]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("CP(1/2,11)"), "{}", stdout(&out));
}

#[test]
fn oracle_check_passes_for_code_one() {
    let out = xpf(&["check", &path("code1.txt")]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(!text.contains("FAIL"));
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 6);
}

#[test]
fn exit_codes() {
    let out = xpf(&["canon", &path("empty.txt")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("w^2 I"), "{}", stderr(&out));

    let out = xpf_env(
        &["codewords", &path("code1.txt")],
        &[("XPF_MAX_QUBITS", "5")],
    );
    assert_eq!(out.status.code(), Some(3));
    let out = xpf_env(
        &["codewords", &path("code2.txt")],
        &[("XPF_SEARCH_BUDGET", "1")],
    );
    assert_eq!(out.status.code(), Some(3));

    let rm5 = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("rm5.txt");
    std::fs::write(&rm5, stdout(&xpf(&["rm", "5"]))).unwrap();
    let out = xpf(&["check", &rm5.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));

    assert_eq!(xpf(&[]).status.code(), Some(1));
    assert_eq!(xpf(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(xpf(&["rm", "2"]).status.code(), Some(1));
    assert_eq!(xpf(&["convert", &path("graph.txt")]).status.code(), Some(1));
    assert_eq!(xpf(&["--help"]).status.code(), Some(0));
}

#[test]
fn parse_errors_report_position() {
    let bad = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("bad.txt");
    std::fs::write(&bad, "N=8 n=7\n# comment\nXP_8(0|0000000|12a4444)\n").unwrap();
    let out = xpf(&["canon", &bad.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 3, column"), "{}", stderr(&out));
}
