use std::path::Path;
use std::process::{Command, Output};

use rainbow_ham::{Graph, GraphCollection, Instance};
use rainbow_ham_harness::report::Report;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rainbow-ham"));
    c.env_remove("RAINBOW_HAM_WORKERS");
    c
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).current_dir(cwd).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let complete = Instance::bare(GraphCollection::identical(Graph::complete(6), 6));
    std::fs::write(d.join("k6.json"), complete.to_json_string()).unwrap();
    let o = run(&["solve", "k6.json"], d);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["outcome"], "path");

    assert_eq!(code(&run(&["gen", "--builder", "b3", "--n", "6", "--out", "b3.json"], d)), 0);
    let o = run(&["solve", "b3.json"], d);
    assert_eq!(code(&o), 10);
    assert_eq!(stdout_json(&o)["certificate"]["kind"], "B3");

    std::fs::write(d.join("bad.json"), "{\"n\": 3, \"graphs\": [").unwrap();
    let o = run(&["solve", "bad.json"], d);
    assert_eq!(code(&o), 2);
    assert_eq!(stdout_json(&o)["outcome"], "input_error");
    assert_eq!(code(&run(&["solve", "missing.json"], d)), 2);
}

#[test]
fn solve_rejects_hypothesis_failures() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(&["gen", "--builder", "dirac", "--n", "7", "--out", "dirac.json"], d)), 0);
    assert_eq!(code(&run(&["solve", "dirac.json"], d)), 2);
}

#[test]
fn oracle_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(&["gen", "--builder", "b2", "--n", "6", "--out", "b2.json"], d);
    let o = run(&["oracle", "b2.json"], d);
    assert_eq!(code(&o), 10);
    assert_eq!(stdout_json(&o)["decision"], "not_found");
    let o = run(&["oracle", "--cycle", "b2.json"], d);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["decision"], "found");
    run(&["gen", "--n", "8", "--k", "1", "--seed", "4", "--out", "r.json"], d);
    let o = run(&["oracle", "--budget-nodes", "1", "r.json"], d);
    assert_eq!(code(&o), 20);
}

#[test]
fn gen_is_reproducible_and_writes_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for name in ["a.json", "b.json"] {
        let o = run(&["gen", "--n", "10", "--k", "2", "--p", "0.9", "--seed", "7", "--out", name], d);
        assert_eq!(code(&o), 0);
    }
    let a = std::fs::read(d.join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(d.join("b.json")).unwrap());
    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("a.json.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["spec"]["seed"], 7);

    run(&["gen", "--builder", "c3", "--n", "10", "--k", "2", "--out", "c3.json"], d);
    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("c3.json.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["certificate"]["kind"], "C3");
    assert_eq!(code(&run(&["solve", "c3.json"], d)), 10);

    let o = run(&["gen", "--builder", "b3", "--n", "5"], d);
    assert_eq!(code(&o), 2);
    let o = run(&["gen", "--small-vertex", "--n", "6", "--seed", "2"], d);
    assert_eq!(code(&o), 0);
    assert!(Instance::from_json_str(std::str::from_utf8(&o.stdout).unwrap()).is_ok());
}

#[test]
fn verify_passes_and_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["verify", "--samples", "40", "--all-pairs-samples", "8", "--n-max", "8", "--out", "rep.jsonl"];
    let o = run(&args, d);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(d.join("rep.jsonl")).unwrap();
    let rep = Report::from_jsonl(&text).unwrap();
    assert_eq!(rep.summary.total, rep.records.len());
    assert_eq!(code(&run(&["verify", "--report", "rep.jsonl"], d)), 0);

    let tampered = text.replacen("\"valid\":true", "\"valid\":false", 1);
    let tampered = Report::from_jsonl(&tampered).unwrap().to_jsonl();
    std::fs::write(d.join("bad.jsonl"), tampered).unwrap();
    assert_eq!(code(&run(&["verify", "--report", "bad.jsonl"], d)), 1);
}

#[test]
fn injected_faults_are_caught_with_bundles() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = run(
        &["verify", "--samples", "10", "--all-pairs-samples", "0", "--no-builders", "--inject-fault", "--out", "f.jsonl"],
        d,
    );
    assert_eq!(code(&o), 1);
    let bundles: Vec<_> = std::fs::read_dir(d.join("f.jsonl.bundles")).unwrap().collect();
    assert_eq!(bundles.len(), 10);
}

#[test]
fn sweep_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let base = ["sweep", "--samples", "60", "--controls", "--seed", "11"];
    let o1 = bin().args(base).args(["--workers", "1"]).current_dir(d).output().unwrap();
    let o2 = bin().args(base).env("RAINBOW_HAM_WORKERS", "3").current_dir(d).output().unwrap();
    assert_eq!(code(&o1), 0, "{}", String::from_utf8_lossy(&o1.stderr));
    assert_eq!(o1.stdout, o2.stdout);
    let rep = Report::from_jsonl(std::str::from_utf8(&o1.stdout).unwrap()).unwrap();
    assert_eq!(rep.summary.by_outcome.get("excluded"), Some(&4));
    assert_eq!(rep.summary.by_outcome.get("found"), Some(&60));
}

#[test]
fn bad_arguments_exit_with_input_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["frobnicate"], dir.path())), 2);
    assert_eq!(code(&run(&["sweep", "--n-min", "9", "--n-max", "5"], dir.path())), 2);
    assert_eq!(code(&run(&["--help"], dir.path())), 0);
}
