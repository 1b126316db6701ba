use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn circrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circrep")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = circrep(&all);
    (serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap(), o.status.code().unwrap())
}

#[test]
fn exponent_of_alfalfa() {
    let o = circrep(&["exp", "alfalfa"]);
    assert_eq!(stdout(&o), "7/3\n");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn circular_exponent_of_dividing() {
    assert_eq!(stdout(&circrep(&["cexp", "dividing"])), "5/2 witness=ididi\n");
}

#[test]
fn check_verdicts_set_exit_code() {
    let o = circrep(&["check", "dividing", "--alpha", "5/2", "--strict", "--circular"]);
    assert_eq!((stdout(&o).as_str(), o.status.code()), ("pass\n", Some(0)));
    let o = circrep(&["check", "dividing", "--alpha", "5/2", "--circular"]);
    assert_eq!((stdout(&o).as_str(), o.status.code()), ("fail witness=ididi\n", Some(1)));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["check", "aa", "--alpha", "3.25"][..],
        &["check", "aa", "--alpha", "1/2"],
        &["frobnicate"],
        &["exp", "0a1"],
        &["exp", "--file", "/nonexistent/words.txt"],
        &["morphism", "check", "/nonexistent/morphism.txt"],
        &["verify", "no_such_claim"],
    ] {
        let o = circrep(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(circrep(&["check", "aa", "--alpha", "13/4"]).status.code(), Some(0));
}

#[test]
fn envelope_schema_and_text_agree() {
    let (v, code) = json(&["cexp", "dividing"]);
    assert_eq!(code, 0);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["command", "inputs", "result", "witnesses", "stats"] {
        assert!(keys.contains(&k), "{k} missing from {v}");
    }
    assert_eq!(v["command"], "cexp");
    assert_eq!(v["result"]["exponent"], "5/2");
    assert_eq!(v["witnesses"][0]["text"], "ididi");
    assert_eq!(v["witnesses"][0]["detail"]["period"], 2);
}

#[test]
fn words_from_stdin_and_file() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_circrep"))
        .args(["exp", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"alfalfa\n\nababa\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o), "7/3\n5/2\n");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("words.txt");
    std::fs::write(&path, "0101\n012\n").unwrap();
    assert_eq!(stdout(&circrep(&["exp", "--file", path.to_str().unwrap()])), "2\n1\n");
}

#[test]
fn morphism_commands() {
    let o = circrep(&["morphism", "check", "psi"]);
    assert_eq!(stdout(&o), "pass synchronizing=true strongly_synchronizing=true\n");
    let o = circrep(&["morphism", "check", "thue-morse"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&circrep(&["morphism", "apply", "thue-morse", "011"])), "011010\n");
    assert_eq!(stdout(&circrep(&["morphism", "fixpoint", "thue-morse", "--len", "8"])), "01101001\n");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flip.txt");
    std::fs::write(&path, "# swaps letters\n2 2 1\n1\n0\n").unwrap();
    assert_eq!(stdout(&circrep(&["morphism", "apply", path.to_str().unwrap(), "0010"])), "1101\n");
}

#[test]
fn factor_sets() {
    let (v, _) = json(&["factors", "thue-morse", "3"]);
    assert_eq!(v["result"]["count"], 6);
    let o = circrep(&["factors", "psi", "15"]);
    assert!(stdout(&o).starts_with("141 factors of length 15\n"));
}

#[test]
fn product_exponent() {
    assert_eq!(stdout(&circrep(&["pexp", "aba", "--i", "2", "--max-len", "10"])), "5/2 factors=aba+ba\n");
}

#[test]
fn search_report_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let cp = dir.path().join("search.checkpoint");
    let o = circrep(&[
        "search",
        "--k",
        "2",
        "--alpha",
        "4",
        "--circular",
        "--checkpoint",
        cp.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("longest_length=11 exhausted=true nodes_visited=84 "));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    for k in ["config", "longest_length", "witness", "exhausted", "nodes_visited", "wall_time_ms"] {
        assert!(r.get(k).is_some(), "{k}");
    }
    assert_eq!(r["witness"], "01001011010");
    assert_eq!(std::fs::read_to_string(&cp).unwrap(), "done 84 11 01001011010\n");

    let (v, _) = json(&["search", "--k", "2", "--alpha", "4", "--circular", "--resume", cp.to_str().unwrap()]);
    assert_eq!(v["result"]["longest_length"], 11);
    assert_eq!(v["result"]["nodes_visited"], 84);
}

#[test]
fn search_threads_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_circrep"))
        .args(["--json", "search", "--k", "3", "--alpha", "2", "--circular", "--max-len", "50"])
        .env("CIRCREP_THREADS", "3")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["stats"]["threads"], 3);
}

#[test]
fn verify_single_claim() {
    let o = circrep(&["verify", "psi_ssm"]);
    assert_eq!(o.status.code(), Some(0));
    let reports: Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = &reports.as_array().unwrap()[0];
    assert_eq!(r["claim_id"], "psi_ssm");
    assert_eq!(r["verdict"], "pass");

    let (v, code) = json(&["verify", "rti2"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "verify");
    assert_eq!(v["result"][0]["claim_id"], "rti2");
}
