//! Drives the compiled binary end to end.

mod common;

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pivot-csp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn travel_arg() -> String {
    common::travel_path().display().to_string()
}

#[test]
fn generate_is_deterministic_per_seed() {
    let a = run(&[
        "--seed",
        "7",
        "generate",
        "--vars",
        "6",
        "--functional",
        "4",
    ]);
    let b = run(&[
        "--seed",
        "7",
        "generate",
        "--vars",
        "6",
        "--functional",
        "4",
    ]);
    let c = run(&[
        "--seed",
        "8",
        "generate",
        "--vars",
        "6",
        "--functional",
        "4",
    ]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn solve_travel_reports_the_five_solutions() {
    let out = run(&["--output", "machine", "solve", &travel_arg(), "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["solution_count"], 5);
    assert_eq!(value["extension_backtracks"], 0);
    assert_eq!(value["oracle"]["matches"], true);
    assert_eq!(value["roots"], serde_json::json!(["GUIDES", "CITIES"]));
    let solutions = value["solutions"].as_array().unwrap();
    assert!(!solutions.contains(&serde_json::json!([
        "Chris", "New-York", "USA", "$", "English"
    ])));
    assert!(solutions.contains(&serde_json::json!([
        "Bob", "New-York", "USA", "$", "English"
    ])));
}

#[test]
fn insoluble_instance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("insoluble.json");
    std::fs::write(
        &path,
        r#"{
            "variables": [
                {"name": "x", "domain": ["1", "2"]},
                {"name": "y", "domain": ["1"]}
            ],
            "constraints": [{"scope": ["x", "y"], "pairs": []}]
        }"#,
    )
    .unwrap();
    let out = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unreadable_input_exits_two() {
    let out = run(&["solve", "/no/such/file.json"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ nope").unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
}

#[test]
fn analyze_prints_the_decomposition() {
    let out = run(&["analyze", &travel_arg()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("roots (r = 2): GUIDES, CITIES"));
    assert!(text.contains("ordering: GUIDES, CITIES, COUNTRIES, CURRENCIES, LANGUAGES"));
    assert!(text.contains("candidate: CITIES -> COUNTRIES"));
}

#[test]
fn filter_writes_an_instance_that_verifies_and_solves() {
    let dir = tempfile::tempdir().unwrap();
    let filtered = dir.path().join("travel-filtered.json");
    let out = run(&[
        "filter",
        &travel_arg(),
        "--method",
        "pivot",
        "--out",
        filtered.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("constraints created: 1"));
    assert!(Path::new(&filtered).exists());

    // The unfiltered instance is not pivot consistent, the filtered one is.
    let before = run(&["verify", &travel_arg()]);
    assert_eq!(before.status.code(), Some(1));
    assert!(stdout(&before).contains("FAIL pivot-consistency"));
    let after = run(&["verify", filtered.to_str().unwrap()]);
    assert_eq!(after.status.code(), Some(0), "{}", stdout(&after));
    assert!(stdout(&after).contains("all checks passed"));

    let solved = run(&["--output", "machine", "solve", filtered.to_str().unwrap()]);
    assert_eq!(solved.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout(&solved)).unwrap();
    assert_eq!(value["solution_count"], 5);
}

#[test]
fn compare_tabulates_all_four_methods() {
    let out = run(&["--output", "machine", "compare", &travel_arg()]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let methods = value["methods"].as_array().unwrap();
    assert_eq!(methods.len(), 4);
    let by_name = |name: &str| {
        methods
            .iter()
            .find(|m| m["method"] == name)
            .unwrap()
            .clone()
    };
    assert_eq!(by_name("pivot")["constraints_created"], 1);
    assert_eq!(by_name("pivot")["constraints_modified"], 1);
    assert_eq!(by_name("pc")["constraints_created"], 5);
    assert_eq!(by_name("pc")["constraints_modified"], 5);
}

#[test]
fn generated_instances_solve_against_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    for seed in [3u64, 11, 29] {
        let path = dir.path().join(format!("gen-{seed}.json"));
        let out = run(&[
            "--seed",
            &seed.to_string(),
            "generate",
            "--vars",
            "7",
            "--functional",
            "5",
            "--cycles",
            "0.3",
            "--other",
            "2",
            "--tightness",
            "0.25",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let solved = run(&[
            "--output",
            "machine",
            "solve",
            path.to_str().unwrap(),
            "--oracle",
        ]);
        assert!(
            solved.status.code() == Some(0) || solved.status.code() == Some(1),
            "unexpected exit: {:?}",
            solved
        );
        let value: serde_json::Value = serde_json::from_str(&stdout(&solved)).unwrap();
        assert_eq!(value["oracle"]["checked"], true);
        assert_eq!(value["oracle"]["matches"], true);
    }
}

#[test]
fn external_plan_files_are_honored() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    std::fs::write(
        &plan,
        r#"{
            "roots": ["GUIDES", "CITIES"],
            "ordering": ["GUIDES", "CITIES", "COUNTRIES", "LANGUAGES", "CURRENCIES"],
            "candidates": [
                {"origin": "CITIES", "target": "COUNTRIES"},
                {"origin": "COUNTRIES", "target": "LANGUAGES"},
                {"origin": "COUNTRIES", "target": "CURRENCIES"}
            ]
        }"#,
    )
    .unwrap();
    let out = run(&[
        "--output",
        "machine",
        "filter",
        &travel_arg(),
        "--plan",
        plan.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["report"]["method"], "pivot");
    assert_eq!(
        value["report"]["constraints_created"]
            .as_array()
            .unwrap()
            .len(),
        1
    );

    // A malformed plan is an input error.
    let bad = dir.path().join("bad-plan.json");
    std::fs::write(
        &bad,
        r#"{"roots": ["GUIDES"], "ordering": ["GUIDES"], "candidates": []}"#,
    )
    .unwrap();
    let out = run(&["filter", &travel_arg(), "--plan", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_names_the_variable_breaking_a_bad_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let candidates = r#"[
        {"origin": "CITIES", "target": "COUNTRIES"},
        {"origin": "COUNTRIES", "target": "CURRENCIES"},
        {"origin": "COUNTRIES", "target": "LANGUAGES"}
    ]"#;

    // LANGUAGES placed before any functional ancestor.
    let no_ancestor = dir.path().join("no-ancestor.json");
    std::fs::write(
        &no_ancestor,
        format!(
            r#"{{"roots": ["GUIDES", "CITIES"],
                 "ordering": ["GUIDES", "CITIES", "LANGUAGES", "COUNTRIES", "CURRENCIES"],
                 "candidates": {candidates}}}"#
        ),
    )
    .unwrap();
    let out = run(&[
        "verify",
        &travel_arg(),
        "--plan",
        no_ancestor.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(
        text.contains("LANGUAGES has no earlier functional ancestor"),
        "{text}"
    );

    // Ordering not prefixed by the root set.
    let not_prefixed = dir.path().join("not-prefixed.json");
    std::fs::write(
        &not_prefixed,
        format!(
            r#"{{"roots": ["GUIDES", "CITIES"],
                 "ordering": ["GUIDES", "LANGUAGES", "COUNTRIES", "CURRENCIES", "CITIES"],
                 "candidates": {candidates}}}"#
        ),
    )
    .unwrap();
    let out = run(&[
        "verify",
        &travel_arg(),
        "--plan",
        not_prefixed.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(
        text.contains("not prefixed by the root set: LANGUAGES"),
        "{text}"
    );
}
