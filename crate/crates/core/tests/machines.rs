use std::sync::Arc;

use qcfa::automaton::{validate_machine, write_machine, parse_machine, Verdict};
use qcfa::sim::{reference_trace, Executor};
use qcfa::zoo::{
    anbn_state, build_anbn, build_by_name, build_palindrome_3state, build_palindrome_single_qubit, palindrome_state,
    AnbnParams, PalindromeParams,
};

fn executor(name: &str, eps: f64) -> Executor {
    Executor::new(Arc::new(build_by_name(name, eps).unwrap())).unwrap()
}

#[test]
fn builders_validate() {
    for name in ["palindrome3", "palindrome-qubit", "anbn"] {
        for eps in [0.01, 0.1, 0.5] {
            let spec = build_by_name(name, eps).unwrap();
            let report = validate_machine(&spec);
            assert!(report.is_ok(), "{name} eps={eps}: {report}");
        }
    }
}

#[test]
fn derived_k() {
    assert_eq!(PalindromeParams::new(0.01).unwrap().k, 7);
    assert_eq!(PalindromeParams::new(0.5).unwrap().k, 5);
    assert_eq!(PalindromeParams::new(0.5).unwrap().qubit_k(), 7);
    assert_eq!(AnbnParams::new(0.1).unwrap().k, 5);
    assert!(PalindromeParams::new(1.5).is_err());
    assert!(AnbnParams::new(0.0).is_err());
    let spec = build_palindrome_3state(&PalindromeParams::new(0.01).unwrap()).unwrap();
    assert_eq!(spec.quantum_dim(), 3);
    assert_eq!(spec.metadata()["k"], "7");
    let spec = build_palindrome_single_qubit(&PalindromeParams::new(0.01).unwrap()).unwrap();
    assert_eq!(spec.quantum_dim(), 2);
    assert_eq!(spec.metadata()["k"], "9");
}

#[test]
fn palindromes_are_accepted() {
    for name in ["palindrome3", "palindrome-qubit"] {
        let ex = executor(name, 0.5);
        for input in ["", "a"] {
            let stats = ex.run_trials(input, 20, 11, u64::MAX).unwrap();
            assert_eq!(stats.accepted, 20, "{name} {input:?}");
        }
        // Acceptance takes 2^{k(n+1)} passes on average; check only that
        // longer palindromes are never rejected.
        for input in ["aba", "abba", "babbab"] {
            let stats = ex.run_trials(input, 20, 11, 20_000).unwrap();
            assert_eq!(stats.rejected, 0, "{name} {input:?}");
        }
    }
}

#[test]
fn anbn_basic_runs() {
    let ex = executor("anbn", 0.1);
    for input in ["", "ab", "aabb"] {
        let stats = ex.run_trials(input, 50, 3, u64::MAX).unwrap();
        assert_eq!(stats.rejected, 0, "{input:?}");
        assert_eq!(stats.accepted, 50);
    }
    let o = ex.run_trial("ba", 9, u64::MAX).unwrap();
    assert_eq!(o.verdict, Verdict::Rejected);
    assert_eq!(o.passes_completed, 0);
    let stats = ex.run_trials("aab", 200, 5, u64::MAX).unwrap();
    assert!(stats.rejected > 150);
}

#[test]
fn executor_matches_step_semantics() {
    for (name, inputs) in [
        ("palindrome3", vec!["", "ab", "aba", "abb"]),
        ("palindrome-qubit", vec!["ab", "bab"]),
        ("anbn", vec!["", "ab", "aab", "ba"]),
    ] {
        let ex = executor(name, 0.5);
        for input in inputs {
            for seed in 0..5 {
                let fast = ex.trace(input, seed, 5_000).unwrap();
                let slow = reference_trace(ex.spec(), input, seed, 5_000).unwrap();
                assert_eq!(fast, slow, "{name} {input:?} seed {seed}");
            }
        }
    }
}

#[test]
fn same_seed_same_outcome() {
    let ex = executor("palindrome3", 0.5);
    let a = ex.run_trials("ab", 64, 99, u64::MAX).unwrap();
    let b = ex.run_trials("ab", 64, 99, u64::MAX).unwrap();
    assert_eq!(a, b);
    let single = ex.run_trials("ab", 1, 99, u64::MAX).unwrap();
    let o = ex.run_trial("ab", qcfa::sim::trial_seed(99, 0), u64::MAX).unwrap();
    assert_eq!(single.trials, 1);
    assert_eq!(single.mean_steps, o.steps_used as f64);
    assert_eq!(single.accepted + single.rejected + single.capped, 1);
}

#[test]
fn step_cap_is_reported() {
    let ex = executor("palindrome3", 0.01);
    let stats = ex.run_trials("abab", 10, 1, 10).unwrap();
    assert_eq!(stats.capped, 10);
    assert_eq!(stats.mean_steps, 10.0);
}

#[test]
fn trace_shows_pass_structure() {
    let ex = executor("palindrome3", 0.5);
    let t = ex.trace("a", 1, 40).unwrap();
    let states: Vec<&str> = t.entries.iter().map(|e| e.state.as_str()).collect();
    use palindrome_state as st;
    assert_eq!(&states[..7], &[st::START, st::LOOP1, st::LOOP1, st::REWIND, st::REWIND, st::LOOP2, st::LOOP2]);
    assert_eq!(t.entries[1].action, "U_a");
    assert_eq!(t.entries[5].action, "U_a_inv");
    assert_eq!(t.entries[6].action, "measure");
    assert_eq!(t.entries[6].outcome, Some(0));
    // loop (III) starts on $ and moves left
    assert_eq!(t.entries[7].state, st::flip(0, 0));
    assert_eq!(t.entries[7].head, 2);

    // empty input: loop (I) never applies a unitary
    let t = ex.trace("", 1, 40).unwrap();
    assert!(t.entries.iter().all(|e| e.action != "U_a" && e.action != "U_b"));
    assert_eq!(t.entries[1].state, st::LOOP1);
    assert_eq!(t.entries[1].symbol, "$");
}

#[test]
fn anbn_state_names_exist() {
    let spec = build_anbn(&AnbnParams::new(0.1).unwrap()).unwrap();
    for name in [anbn_state::LOOP1, anbn_state::CHECK_A, anbn_state::GOTO_FIRST] {
        assert!(spec.classical_index(name).is_some());
    }
    assert!(spec.classical_index(&anbn_state::walk(1, 1)).is_some());
    assert!(spec.classical_index(&anbn_state::seek(2, 0)).is_some());
}

#[test]
fn machine_files_round_trip() {
    for name in ["palindrome3", "palindrome-qubit", "anbn"] {
        let spec = build_by_name(name, 0.1).unwrap();
        let text = write_machine(&spec).unwrap();
        let back = parse_machine(&text).unwrap();
        assert_eq!(back, spec, "{name}");
    }
}
