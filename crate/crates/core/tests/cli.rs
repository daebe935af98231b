mod common;

use std::path::PathBuf;
use std::process::{Command, Output};

use condim::cnf::parse_dimacs;

fn condim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_condim"))
        .args(args)
        .env_remove("CONDIM_EXTERNAL_SOLVER")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data_path(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn check_exit_codes() {
    let cases = [
        (["-n", "6", "-m", "6", "-k", "3"], 10),
        (["-n", "5", "-m", "6", "-k", "3"], 20),
        (["-n", "3", "-m", "3", "-k", "2"], 10),
        (["-n", "4", "-m", "2", "-k", "3"], 20),
        (["-n", "4", "-m", "2", "-k", "1"], 10),
    ];
    for (args, code) in cases {
        let mut full = vec!["check"];
        full.extend(args);
        assert_eq!(condim(&full).status.code(), Some(code), "{args:?}");
    }
}

#[test]
fn check_text_report() {
    let out = condim(&["check", "-n", "6", "-m", "6", "-k", "3"]);
    let text = stdout(&out);
    assert!(text.starts_with(
        "Model (decoding of satisfying assignment) found:\nAgent 0: 0 > 1 > 2 > 3 > 4 > 5\n"
    ));
    assert!(text.contains("does not have a Condorcet winning set of size 2"));
    assert_eq!(text.matches("does not cover alternative(s)").count(), 15);
    assert!(text.ends_with("outcome: found\n"));
}

#[test]
fn check_structured_report() {
    let out = condim(&["check", "-n", "6", "-m", "6", "-k", "3", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema"], "condim.check/v1");
    assert_eq!(doc["outcome"], "found");
    assert_eq!(doc["clauses"], 2586);
    assert_eq!(doc["variables"], 636);
    let report = &doc["report"];
    assert_eq!(report["schema"], "condim.witness-report/v1");
    assert_eq!(report["witnesses"].as_array().unwrap().len(), 15);
    let rankings: Vec<Vec<usize>> = serde_json::from_value(doc["rankings"].clone()).unwrap();
    let profile = condim::PreferenceProfile::new(rankings).unwrap();
    assert_eq!(common::brute_force_dimension(&profile), 3);

    let refuted = condim(&["check", "-n", "5", "-m", "6", "-k", "3", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&refuted.stdout).unwrap();
    assert_eq!(doc["outcome"], "refuted");
    assert!(doc.get("report").is_none());
}

#[test]
fn zero_timeout_is_unresolved() {
    let out = condim(&["check", "-n", "6", "-m", "6", "-k", "4", "--timeout", "0"]);
    assert_eq!(out.status.code(), Some(30));
    assert!(stdout(&out).ends_with("outcome: unresolved\n"));
}

#[test]
fn emits_cnf_without_solving() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("663.cnf");
    let out = condim(&[
        "check",
        "-n",
        "6",
        "-m",
        "6",
        "-k",
        "3",
        "--emit-cnf",
        path.to_str().unwrap(),
        "--no-solve",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let formula = parse_dimacs(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(
        (formula.variable_count(), formula.clause_count()),
        (636, 2586)
    );
    assert!(formula.comments().iter().any(|c| c == "n=6 m=6 k=3 sym=1"));

    let solved = condim(&["solve-dimacs", path.to_str().unwrap()]);
    assert_eq!(solved.status.code(), Some(10));
    assert!(stdout(&solved).starts_with("s SATISFIABLE\n"));
}

#[test]
fn oracle_and_space() {
    let out = condim(&["oracle", &data_path("fig1.profile")]);
    assert_eq!(stdout(&out), "dimension: 2\nminimal winning set: {0, 1}\n");
    let out = condim(&["oracle", &data_path("fig3.profile")]);
    assert_eq!(
        stdout(&out),
        "dimension: 3\nminimal winning set: {0, 1, 2}\n"
    );
    let out = condim(&["space", "-n", "3", "-m", "5"]);
    assert_eq!(stdout(&out), "1728000 (~1.7e6)\n");
}

#[test]
fn survey_grid_and_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let witnesses = dir.path().join("w");
    let out = condim(&[
        "survey",
        "-n",
        "5..6",
        "-m",
        "5..6",
        "--workers",
        "2",
        "--witness-dir",
        witnesses.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.matches('+').count(), 1, "{text}");
    assert_eq!(text.matches('-').count(), 3, "{text}");
    let saved = std::fs::read_to_string(witnesses.join("n6_m6_k3.profile")).unwrap();
    let profile: condim::PreferenceProfile = saved.parse().unwrap();
    assert_eq!(profile.condorcet_dimension(), 3);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(
        condim(&["check", "-n", "0", "-m", "3", "-k", "2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        condim(&["check", "-n", "3", "-m", "3", "-k", "2", "--solver", "nope"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        condim(&["oracle", "/no/such/profile"]).status.code(),
        Some(1)
    );
}
