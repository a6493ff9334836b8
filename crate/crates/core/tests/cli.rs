use std::process::{Command, Output};
use std::sync::Arc;

use qcfa::sim::Executor;
use qcfa::zoo::build_by_name;

fn qcfa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcfa")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn build_prints_k_and_writes_a_valid_file() {
    let dir = tempfile::tempdir().unwrap();
    for (machine, eps, k) in [("palindrome3", "0.01", "k=7"), ("anbn", "0.1", "k=5")] {
        let path = dir.path().join(format!("{machine}.toml"));
        let o = qcfa(&["build", machine, "--epsilon", eps, "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains(k), "{}", stdout(&o));
        let o = qcfa(&["validate", "--machine", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qcfa(&["build", "foo"]).status.code(), Some(2));
    assert_eq!(qcfa(&["build", "anbn", "--epsilon", "1.5"]).status.code(), Some(2));
    assert_eq!(qcfa(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qcfa(&["run", "--machine", "anbn", "--input", "abc"]).status.code(), Some(2));
    let o = qcfa(&["scaling", "--lengths", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("fit"));
}

#[test]
fn invalid_machine_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.toml");
    let text = qcfa::automaton::write_machine(&build_by_name("anbn", 0.1).unwrap()).unwrap();
    // Drop one transition so the spec is incomplete.
    let start = text.find("[[transitions]]").unwrap();
    let end = start + 1 + text[start + 1..].find("[[transitions]]").unwrap();
    std::fs::write(&path, format!("{}{}", &text[..start], &text[end..])).unwrap();
    let o = qcfa(&["validate", "--machine", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn verify_passes_and_detects_corruption() {
    let o = qcfa(&["verify", "--n-max", "4", "--gap-max", "500"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("PASS").count(), 5);
    let o = qcfa(&["verify", "--n-max", "4", "--gap-max", "500", "--corrupt-matrix"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
    assert_eq!(qcfa(&["verify", "--n-max", "9"]).status.code(), Some(3));
}

#[test]
fn analyze_prints_exact_and_decimal() {
    let o = qcfa(&["analyze", "--machine", "palindrome3", "--epsilon", "0.5", "--input", "ab"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("11169/390625,0.0285926400000000"), "{out}");
    assert!(out.contains("1/32768"));
}

#[test]
fn run_matches_library_call() {
    let args = ["run", "--machine", "palindrome3", "--epsilon", "0.5", "--input", "ab", "--trials", "200", "--seed", "7"];
    let a = stdout(&qcfa(&args));
    assert_eq!(a, stdout(&qcfa(&args)));
    let ex = Executor::new(Arc::new(build_by_name("palindrome3", 0.5).unwrap())).unwrap();
    let s = ex.run_trials("ab", 200, 7, qcfa::sim::default_step_cap(2)).unwrap();
    let row = a.lines().nth(1).unwrap();
    assert!(row.starts_with(&format!("200,{},{},{},", s.accepted, s.rejected, s.capped)), "{row}");

    let o = qcfa(&["run", "--machine", "anbn", "--epsilon", "0.1", "--input", "ab", "--trials", "5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["accepted"], 5);
}

#[test]
fn trace_is_replayable() {
    let args = ["trace", "--machine", "anbn", "--epsilon", "0.1", "--input", "ab", "--seed", "4", "--step-cap", "300"];
    let a = stdout(&qcfa(&args));
    assert_eq!(a, stdout(&qcfa(&args)));
    assert!(a.starts_with("step,state,head,symbol,action,outcome\n0,check_a,0,^,I,"));
}

#[test]
fn scaling_budget_is_enforced() {
    let o = qcfa(&["scaling", "--lengths", "4,8,16,64", "--trials", "1000", "--budget", "1e9"]);
    assert_eq!(o.status.code(), Some(3));
    let args = ["scaling", "--lengths", "2,4,6", "--trials", "5", "--seed", "1"];
    let a = qcfa(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&qcfa(&args)));
    assert!(stdout(&a).contains("# exponent="));
}
