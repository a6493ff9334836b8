mod common;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use qcfa::analysis::{
    aggregate_halting, palindrome_pass_probs, palindrome_qubit_pass_probs, rotation_gap, rotation_gap_bound,
    PassProbabilities,
};
use qcfa::automaton::{initial_configuration, step};
use qcfa::linalg::{A_ENTRIES, B_ENTRIES};
use qcfa::scalar::rational_to_f64;
use qcfa::sim::{rng_from_seed, Executor};
use qcfa::zoo::{build_by_name, phi_map, u_hat};

fn ratio(n: u32, d: u32) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `β` by plain floating-point 3×3 products, written independently of the
/// exact path.
fn float_beta(x: &str) -> [f64; 3] {
    let mat = |c: char, inverse: bool| {
        let m = if c == 'a' { A_ENTRIES } else { B_ENTRIES };
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = if inverse { m[j][i] } else { m[i][j] } as f64 / 5.0;
            }
        }
        out
    };
    let apply = |m: [[f64; 3]; 3], v: [f64; 3]| -> [f64; 3] { std::array::from_fn(|i| (0..3).map(|j| m[i][j] * v[j]).sum()) };
    let mut v = [1.0, 0.0, 0.0];
    for c in x.chars() {
        v = apply(mat(c, false), v);
    }
    for c in x.chars() {
        v = apply(mat(c, true), v);
    }
    v
}

#[test]
fn rejection_is_zero_exactly_on_palindromes() {
    let words = common::words_up_to(10);
    assert_eq!(words.len(), 2047);
    for x in &words {
        let p = palindrome_pass_probs(x, 5).unwrap();
        assert_eq!(p.p_rej.is_zero(), common::is_palindrome(x), "{x}");
        let b = float_beta(x);
        let brute = b[1] * b[1] + b[2] * b[2];
        assert!((rational_to_f64(&p.p_rej) - brute).abs() < 1e-9, "{x}");
        let q = palindrome_qubit_pass_probs(x, 7).unwrap();
        assert_eq!(q.p_rej.is_zero(), common::is_palindrome(x), "{x}");
        assert!((rational_to_f64(&q.p_rej) - (1.0 - b[0]) / 2.0).abs() < 1e-9, "{x}");
    }
}

#[test]
fn qubit_rejection_is_at_least_a_quarter() {
    // (1 − β₀)/2 ≥ (β₁² + β₂²)/4 for unit β.
    for x in common::words_up_to(8) {
        let p = palindrome_pass_probs(&x, 5).unwrap().p_rej;
        let q = palindrome_qubit_pass_probs(&x, 7).unwrap().p_rej;
        assert!(q * BigRational::from_integer(4.into()) >= p, "{x}");
    }
}

proptest! {
    #[test]
    fn aggregate_sums_to_one(a in 0u32..=1000, r in 0u32..=1000, d in 1u32..=1000) {
        prop_assume!(a <= d && r <= d && (a > 0 || r > 0));
        let h = aggregate_halting(&PassProbabilities::exact(ratio(r, d), ratio(a, d))).unwrap();
        prop_assert!((h.accept.clone() + h.reject.clone()).is_one());
        prop_assert!(h.expected_iterations >= BigRational::one());
    }

    #[test]
    fn rotation_gap_bound_holds(d in 1i64..=1_000_000_000, negative in any::<bool>()) {
        let d = if negative { -d } else { d };
        let gap = rotation_gap(d).unwrap();
        prop_assert!(gap.lo >= rotation_gap_bound(d), "d = {}", d);
        prop_assert!(gap.lo <= gap.hi);
    }

    #[test]
    fn qubit_conjugation_is_a_phase(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0, sym in prop::sample::select(vec!['a', 'b'])) {
        let n = (x * x + y * y + z * z).sqrt();
        prop_assume!(n > 1e-3);
        let v = [x / n, y / n, z / n];
        let m = if sym == 'a' { A_ENTRIES } else { B_ENTRIES };
        let uv: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| m[i][j] as f64 * v[j]).sum::<f64>() / 5.0);
        let lhs = phi_map(v).unwrap().apply(&u_hat(sym).unwrap());
        let rhs = phi_map(uv).unwrap();
        prop_assert!((lhs.inner(&rhs).norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn step_keeps_head_on_tape_and_norm(seed in any::<u64>(), input in "[ab]{0,5}", which in 0usize..3) {
        let name = ["palindrome3", "palindrome-qubit", "anbn"][which];
        let spec = build_by_name(name, 0.5).unwrap();
        let mut config = initial_configuration(&spec, &input).unwrap();
        let mut rng = rng_from_seed(seed);
        for _ in 0..500 {
            if config.status(&spec) != qcfa::automaton::Status::Running {
                break;
            }
            config = step(&spec, &config, &mut rng).unwrap().0;
            prop_assert!(config.head <= input.len() + 1);
            prop_assert!((config.quantum.norm_sq_f64() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn exit_measurement_frequencies_match() {
    let ex = Executor::new(Arc::new(build_by_name("palindrome3", 0.5).unwrap())).unwrap();
    let passes = 100_000u64;
    let rejected = common::palindrome_pass_rejections(&ex, "ab", passes, 77) as f64;
    let p = 11169.0 / 390625.0;
    let n = passes as f64;
    let (e_rej, e_ok) = (n * p, n * (1.0 - p));
    let chi2 = (rejected - e_rej).powi(2) / e_rej + (n - rejected - e_ok).powi(2) / e_ok;
    let critical = ChiSquared::new(1.0).unwrap().inverse_cdf(1.0 - 1e-3);
    assert!(chi2 < critical, "chi2 = {chi2}, critical = {critical}");
}

#[test]
fn walk_hit_frequency_matches() {
    let ex = Executor::new(Arc::new(build_by_name("anbn", 0.1).unwrap())).unwrap();
    let walks = 20_000u64;
    for input in ["ab", "aab", "aaabbb"] {
        let hits = common::anbn_walk_right_hits(&ex, input, walks, 3) as f64;
        let p = 1.0 / (input.len() as f64 + 1.0);
        let sigma = (p * (1.0 - p) / walks as f64).sqrt();
        assert!((hits / walks as f64 - p).abs() <= 3.0 * sigma, "{input}: {hits}");
    }
}

#[test]
fn trial_rejections_match_aggregate() {
    let ex = Executor::new(Arc::new(build_by_name("palindrome3", 0.5).unwrap())).unwrap();
    let trials = 100_000;
    let s = ex.run_trials("ab", trials, 5, u64::MAX).unwrap();
    let h = aggregate_halting(&palindrome_pass_probs("ab", 5).unwrap()).unwrap();
    let p = rational_to_f64(&h.reject);
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    assert_eq!(s.capped, 0);
    assert!((s.reject_fraction() - p).abs() <= 3.0 * sigma, "{} vs {p}", s.reject_fraction());
}

#[test]
fn members_are_never_rejected() {
    let ex = Executor::new(Arc::new(build_by_name("anbn", 0.1).unwrap())).unwrap();
    let s = ex.run_trials("aabb", 1000, 8, u64::MAX).unwrap();
    assert_eq!((s.rejected, s.accepted), (0, 1000));
}
