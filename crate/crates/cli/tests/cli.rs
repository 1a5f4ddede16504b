mod common;

use std::process::Command as Process;

use common::{tests_dir, Fault, Sabotaged};
use nlpabs_cli::{execute, run, Output, RunConfig, EXIT_OK, EXIT_USAGE, EXIT_VIOLATIONS};

fn path(rel: &str) -> String {
    tests_dir().join(rel).to_string_lossy().into_owned()
}

fn nlpabs(args: &[&str]) -> Output {
    let mut full = vec!["nlpabs".to_string()];
    full.extend(args.iter().map(|a| if a.contains(".pl") || a.contains(".samples") { path(a) } else { a.to_string() }));
    run(full)
}

#[test]
fn graph_json_has_23_edges() {
    let out = nlpabs(&["graph", "corpus/diff.pl", "--format", "json"]);
    assert_eq!(out.code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["edges"].as_array().unwrap().len(), 23);
}

#[test]
fn graph_of_empty_program_fails() {
    let out = nlpabs(&["graph", "fixtures/empty.pl"]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("no clauses"), "{}", out.stderr);
}

#[test]
fn graph_dot_of_single_fact() {
    let out = nlpabs(&["graph", "fixtures/fact.pl", "--format", "dot"]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout.lines().filter(|l| l.contains("->")).count(), 3);
}

#[test]
fn graph_text_stats() {
    let out = nlpabs(&["graph", "corpus/diff.pl", "--stats"]);
    assert!(out.stdout.contains("(3,1)<-(1,1) E1\n"));
    assert!(out.stdout.contains("nodes 12, edges 23 (E0 1, E1 12, E2 8, E3 2), pmax 5"), "{}", out.stdout);
}

#[test]
fn parse_errors_carry_file_and_position() {
    let out = nlpabs(&["graph", "fixtures/broken.pl"]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("broken.pl:1:"), "{}", out.stderr);
}

#[test]
fn analyze_flat_reports_published_value() {
    let out = nlpabs(&["analyze", "corpus/diff.pl", "--semantics", "flat", "--domain", "groundness"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("(3,1)<-(1,1): {L, X}\n"), "{}", out.stdout);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines.len(), 23);
}

#[test]
fn analyze_diamond_point_1_3() {
    let out = nlpabs(&["analyze", "corpus/diff.pl", "--semantics", "diamond"]);
    assert!(out.stdout.contains("(1,3): {K, L, X}\n"), "{}", out.stdout);
}

#[test]
fn analyze_output_is_sorted() {
    let out = nlpabs(&["analyze", "corpus/diff.pl"]);
    let keys: Vec<&str> = out.stdout.lines().map(|l| l.split(':').next().unwrap()).collect();
    let parse = |k: &str| -> Vec<usize> {
        k.split(|c: char| !c.is_ascii_digit()).filter(|s| !s.is_empty()).map(|s| s.parse().unwrap()).collect()
    };
    let mut sorted = keys.clone();
    sorted.sort_by_key(|k| parse(k));
    assert_eq!(keys, sorted);
}

#[test]
fn analyze_unknown_domain_fails() {
    let out = nlpabs(&["analyze", "corpus/diff.pl", "--domain", "sign"]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("unknown domain"));
}

#[test]
fn analyze_json_with_stats_and_equations() {
    let out = nlpabs(&["analyze", "corpus/diff.pl", "--format", "json", "--stats", "--dump-equations"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["semantics"], "flat");
    assert_eq!(v["values"].as_array().unwrap().len(), 23);
    assert_eq!(v["equations"]["schema"], 1);
    assert!(v["stats"]["evaluations"].as_u64().unwrap() >= 23);
}

#[test]
fn analyze_rejects_dot() {
    assert_eq!(nlpabs(&["analyze", "corpus/diff.pl", "--format", "dot"]).code, EXIT_USAGE);
}

#[test]
fn analyze_bad_annotation_fails() {
    let dir = std::env::temp_dir().join(format!("nlpabs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bad.pl");
    std::fs::write(&file, "p(X).\n:- query(p(X), [Q]).\n").unwrap();
    let out = run(["nlpabs", "analyze", file.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("Q"), "{}", out.stderr);
}

#[test]
fn check_reports_zero_violations() {
    let out = nlpabs(&["check", "corpus/diff.pl", "--queries", "fixtures/diff_example.samples"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert!(out.stdout.contains("0 violations"));
}

#[test]
fn check_with_sabotaged_domain_finds_violations() {
    let cfg = RunConfig::from_args([
        "nlpabs".to_string(),
        "check".into(),
        path("corpus/diff.pl"),
        "--queries".into(),
        path("corpus/diff.samples"),
    ])
    .unwrap();
    let out = execute(&cfg, &Sabotaged(Fault::UnifyClaimsGround));
    assert_eq!(out.code, EXIT_VIOLATIONS);
    assert!(out.stdout.contains("violation at"));
    assert!(!out.stdout.contains("\n0 violations"));
}

#[test]
fn check_without_fixture_fails() {
    assert_eq!(nlpabs(&["check", "corpus/diff.pl"]).code, EXIT_USAGE);
    assert_eq!(nlpabs(&["check", "corpus/diff.pl", "--queries", "fixtures/missing.samples"]).code, EXIT_USAGE);
}

#[test]
fn check_rejects_undescribed_sample() {
    let dir = std::env::temp_dir().join(format!("nlpabs-cli-s-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bad.samples");
    std::fs::write(&file, "sample(5, Y = [A], Z = []).\n").unwrap();
    let out = run(["nlpabs", "check", &path("corpus/diff.pl"), "--queries", file.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("not described"), "{}", out.stderr);
}

#[test]
fn trace_finds_x_equal_2() {
    let out = nlpabs(&["trace", "corpus/diff.pl", "--queries", "fixtures/diff_example.samples"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("{X/2, Y/[2,1], Z/[3,1]}"), "{}", out.stdout);
}

#[test]
fn trace_depth_zero_keeps_initial_states() {
    let out = nlpabs(&["trace", "corpus/diff.pl", "--queries", "corpus/diff.samples", "--format", "json", "--depth", "0"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let states = v["states"].as_array().unwrap();
    assert_eq!(states.len(), 6);
    assert!(states.iter().all(|s| s["rule"].is_null()));
    assert_eq!(v["truncated"], true);
}

#[test]
fn trace_state_cap_sets_truncated() {
    let out = nlpabs(&["trace", "corpus/diff.pl", "--queries", "fixtures/diff_example.samples", "--max-states", "1"]);
    assert!(out.stdout.contains("truncated yes"), "{}", out.stdout);
}

#[test]
fn help_and_usage_errors() {
    let help = nlpabs(&["--help"]);
    assert_eq!(help.code, EXIT_OK);
    assert!(help.stdout.contains("analyze"));
    assert_eq!(nlpabs(&["analyze"]).code, EXIT_USAGE);
    assert_eq!(nlpabs(&["analyze", "corpus/diff.pl", "--semantics", "sharp"]).code, EXIT_USAGE);
    assert_eq!(nlpabs(&["analyze", "fixtures/nope.pl"]).code, EXIT_USAGE);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_nlpabs");
    let status = |args: &[String]| Process::new(bin).args(args).output().unwrap();
    let ok = status(&["analyze".into(), path("corpus/diff.pl")]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8(ok.stdout).unwrap(), nlpabs(&["analyze", "corpus/diff.pl"]).stdout);
    assert_eq!(status(&["graph".into(), path("fixtures/empty.pl")]).status.code(), Some(2));
}
