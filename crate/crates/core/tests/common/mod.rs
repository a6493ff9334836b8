#![allow(dead_code)]

use qcfa::automaton::Status;
use qcfa::sim::{rng_from_seed, trial_seed, Executor, RunState, StateCache};
use qcfa::zoo::{anbn_state, palindrome_state};

/// Runs consecutive passes of a palindrome machine on `input` and counts the
/// passes whose end measurement rejects. A run that accepts is restarted.
pub fn palindrome_pass_rejections(ex: &Executor, input: &str, passes: u64, seed: u64) -> u64 {
    let spec = ex.spec();
    let measured = spec.classical_index(&palindrome_state::flip(0, 0)).unwrap();
    let loop1 = spec.classical_index(palindrome_state::LOOP1).unwrap();
    let tape = ex.encode(input).unwrap();
    let mut cache = StateCache::new();
    let mut rng = rng_from_seed(seed);
    let mut state = ex.initial_state();
    let mut rejected = 0;
    for _ in 0..passes {
        let end = ex.run_until(&mut cache, &tape, &state, &mut rng, u64::MAX, &|c| c == measured).unwrap();
        if end.status == Status::Rejected {
            rejected += 1;
            state = ex.initial_state();
            continue;
        }
        assert!(end.stopped, "pass ended without a measurement");
        let end = ex.run_until(&mut cache, &tape, &end.state, &mut rng, u64::MAX, &|c| c == loop1).unwrap();
        state = if end.status == Status::Accepted { ex.initial_state() } else { end.state };
    }
    rejected
}

/// Starts `walks` single random walks of the aⁿbⁿ machine on the first input
/// square and counts those absorbed at the right end-marker.
pub fn anbn_walk_right_hits(ex: &Executor, input: &str, walks: u64, seed: u64) -> u64 {
    let spec = ex.spec();
    let walk = spec.classical_index(&anbn_state::walk(1, 1)).unwrap();
    let left = spec.classical_index(&anbn_state::seek(2, 0)).unwrap();
    let right = spec.classical_index(&anbn_state::seek(2, 1)).unwrap();
    let tape = ex.encode(input).unwrap();
    let mut cache = StateCache::new();
    let start = RunState { classical: walk, head: 1, ..ex.initial_state() };
    let mut hits = 0;
    for i in 0..walks {
        let mut rng = rng_from_seed(trial_seed(seed, i));
        let end = ex.run_until(&mut cache, &tape, &start, &mut rng, u64::MAX, &|c| c == left || c == right).unwrap();
        assert!(end.stopped);
        if end.state.classical == right {
            hits += 1;
        }
    }
    hits
}

/// Brute-force palindrome check.
pub fn is_palindrome(x: &str) -> bool {
    x.chars().eq(x.chars().rev())
}

/// All strings over {a, b} of length at most `n`.
pub fn words_up_to(n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..n {
        layer = layer.iter().flat_map(|w| [format!("{w}a"), format!("{w}b")]).collect();
        out.extend(layer.iter().cloned());
    }
    out
}
