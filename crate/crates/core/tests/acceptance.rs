//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//! `QCFA_ANBN_STEP_BUDGET` bounds the projected step count of the aⁿbⁿ
//! acceptance sweep (unbounded by default; the full sweep takes tens of
//! minutes on one core).

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcfa::analysis::{
    aggregate_halting, anbn_pass_probs, k_closure_report, palindrome_pass_probs, preimage_report, projected_anbn_steps,
    rotation_gap_sweep, runtime_scaling, verify_separation, walk_hit_probability, walk_hit_probability_by_solve,
    Generators, DEFAULT_SCALING_BUDGET,
};
use qcfa::linalg::{A_ENTRIES, B_ENTRIES};
use qcfa::scalar::rational_to_f64;
use qcfa::sim::{default_step_cap, Executor};
use qcfa::zoo::{build_anbn, build_by_name, phi_map, u_hat, AnbnParams, PalindromeParams};

struct Check {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: impl Into<String>) -> Check {
    Check { passed, detail: detail.into() }
}

fn within_limit(c: Check, elapsed: Duration, limit: Option<Duration>) -> Check {
    match limit {
        Some(l) if elapsed > l => check(false, format!("{}; took {:.2?}, limit {:.0?}", c.detail, elapsed, l)),
        _ => c,
    }
}

fn sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn k_closure() -> Check {
    let r = k_closure_report(&Generators::standard());
    check(r.holds(), format!("{} residues in K, {} counterexamples", r.members, r.counterexamples.len()))
}

fn separation() -> Check {
    let r = verify_separation(6).expect("n = 6 is within range");
    check(r.holds() && r.pairs == 5461, format!("{} pairs for n <= 6, {} violations", r.pairs, r.violations.len()))
}

fn palindrome_exact() -> Check {
    let k = PalindromeParams::new(0.01).unwrap().k;
    let bound = BigRational::new(99.into(), 100.into());
    let (mut pal, mut non, mut bad) = (0, 0, Vec::new());
    let mut worst: Option<BigRational> = None;
    for x in common::words_up_to(10) {
        let h = aggregate_halting(&palindrome_pass_probs(&x, k).unwrap()).unwrap();
        if common::is_palindrome(&x) {
            pal += 1;
            if !h.accept.is_one() {
                bad.push(x);
            }
        } else {
            non += 1;
            if h.reject < bound {
                bad.push(x.clone());
            }
            if worst.as_ref().map_or(true, |w| h.reject < *w) {
                worst = Some(h.reject);
            }
        }
    }
    let worst = worst.map_or(f64::NAN, |w| rational_to_f64(&w));
    check(
        bad.is_empty() && k == 7,
        format!("k={k}, {pal} palindromes accepted with probability 1, {non} others rejected with probability >= {worst:.6}, {} failures", bad.len()),
    )
}

fn pass_frequency() -> Check {
    let ex = Executor::new(Arc::new(build_by_name("palindrome3", 0.5).unwrap())).unwrap();
    let passes = 100_000;
    let rejected = common::palindrome_pass_rejections(&ex, "ab", passes, 2024);
    let p = 11169.0 / 390625.0;
    let f = rejected as f64 / passes as f64;
    let s = sigma(p, passes);
    let z = (f - p) / s;
    check(z.abs() <= 3.0, format!("{rejected}/{passes} = {f:.5} vs {p:.5}, z = {z:.2}"))
}

fn anbn() -> Check {
    let params = AnbnParams::new(0.1).unwrap();
    let ex = Executor::new(Arc::new(build_anbn(&params).unwrap())).unwrap();
    let budget = std::env::var("QCFA_ANBN_STEP_BUDGET").ok().and_then(|v| v.parse::<f64>().ok()).unwrap_or(f64::INFINITY);

    // Members: zero rejections.
    let mut spent = 0.0;
    let mut member_fail = Vec::new();
    let mut capped = 0;
    let mut done = None;
    for n in 0..=32u64 {
        let projected = projected_anbn_steps(2 * n, params.k, 1000);
        if spent + projected > budget {
            break;
        }
        let t = Instant::now();
        let input = "a".repeat(n as usize) + &"b".repeat(n as usize);
        let s = ex.run_trials(&input, 1000, 7_000 + n, default_step_cap(2 * n as usize)).unwrap();
        spent += s.mean_steps * 1000.0;
        capped += s.capped;
        if s.rejected > 0 {
            member_fail.push(n);
        }
        done = Some(n);
        eprintln!("  a^{n}b^{n}: {} accepted, {} rejected, {} capped ({:.1?})", s.accepted, s.rejected, s.capped, t.elapsed());
    }

    // Non-members: analytic bound and agreement with simulation.
    let mut pairs = 0;
    let mut weakest = f64::INFINITY;
    let mut outliers = Vec::new();
    let mut max_z: f64 = 0.0;
    let (mut accepted, mut expected, mut variance) = (0u64, 0.0, 0.0);
    let trials = 10_000;
    for n in 0..=20u64 {
        for np in 0..=(20 - n) {
            let d = n.abs_diff(np);
            if !(1..=5).contains(&d) {
                continue;
            }
            pairs += 1;
            let h = aggregate_halting(&anbn_pass_probs(n, np, params.k).unwrap()).unwrap();
            let reject = rational_to_f64(&h.reject);
            weakest = weakest.min(reject);
            let input = "a".repeat(n as usize) + &"b".repeat(np as usize);
            let s = ex.run_trials(&input, trials, 9_000 + 100 * n + np, default_step_cap((n + np) as usize)).unwrap();
            let z = (s.reject_fraction() - reject) / sigma(reject, trials);
            let accept = rational_to_f64(&h.accept);
            accepted += s.accepted;
            expected += accept * trials as f64;
            variance += accept * (1.0 - accept) * trials as f64;
            max_z = max_z.max(z.abs());
            if z.abs() > 3.0 || s.capped > 0 {
                outliers.push(format!("a^{n}b^{np}: z = {z:.2}, {} accepted vs {:.3} expected", s.accepted, accept * trials as f64));
            }
        }
    }

    let members_ok = done == Some(32) && member_fail.is_empty() && capped == 0;
    let members = match done {
        Some(32) => format!("a^n b^n, n <= 32: {} with rejections, {capped} capped", member_fail.len()),
        Some(n) => format!("a^n b^n: step budget exhausted after n = {n} (resource)"),
        None => "a^n b^n: step budget too small for n = 0 (resource)".into(),
    };
    check(
        members_ok && weakest >= 0.9 && outliers.is_empty(),
        format!(
            "{members}; {pairs} non-members, min analytic rejection {weakest:.4}, max |z| {max_z:.2}, \
             pooled acceptances {accepted} vs {expected:.1} expected (z = {:.2}), outliers [{}]",
            (accepted as f64 - expected) / variance.sqrt(),
            outliers.join("; ")
        ),
    )
}

fn rotation_gap() -> Check {
    let r = rotation_gap_sweep(10_000).unwrap();
    check(
        r.holds() && r.checked == 20_000,
        format!("{} values of d, {} violations, min 2d^2 sin^2 = {:.4} at d = {}", r.checked, r.violations.len(), r.min_ratio, r.min_ratio_at),
    )
}

fn random_walk() -> Check {
    let ex = Executor::new(Arc::new(build_by_name("anbn", 0.1).unwrap())).unwrap();
    let walks = 100_000;
    // Walk length n + n' + 1 = 5.
    let hits = common::anbn_walk_right_hits(&ex, "aabb", walks, 55);
    let p = 0.2;
    let z = (hits as f64 / walks as f64 - p) / sigma(p, walks);
    let solved = (1..=64).all(|n| {
        walk_hit_probability_by_solve(n).unwrap() == walk_hit_probability(n).unwrap()
            && walk_hit_probability(n).unwrap() == BigRational::new(1.into(), n.into())
    });
    check(z.abs() <= 3.0 && solved, format!("{hits}/{walks} right-marker hits, z = {z:.2}; exact solve = 1/N for N <= 64: {solved}"))
}

fn runtime_exponent() -> Check {
    match runtime_scaling(0.1, &[4, 8, 16, 32], 50, 4242, None, DEFAULT_SCALING_BUDGET) {
        Ok(r) => {
            let means: Vec<String> = r.rows.iter().map(|row| format!("m={}: {:.3e}", row.m, row.stats.mean_steps)).collect();
            check((3.3..=4.5).contains(&r.exponent), format!("slope {:.3} ({})", r.exponent, means.join(", ")))
        }
        Err(e) => check(false, e.to_string()),
    }
}

fn single_qubit() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let unit = |rng: &mut ChaCha8Rng| loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.map(|x| x / n);
        }
    };
    let mut worst_phase: f64 = 0.0;
    for (sym, m) in [('a', A_ENTRIES), ('b', B_ENTRIES)] {
        let u = u_hat(sym).unwrap();
        for _ in 0..1000 {
            let v = unit(&mut rng);
            let uv: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| m[i][j] as f64 * v[j]).sum::<f64>() / 5.0);
            let lhs = phi_map(v).unwrap().apply(&u);
            let rhs = phi_map(uv).unwrap();
            worst_phase = worst_phase.max((lhs.inner(&rhs).norm() - 1.0).abs());
        }
    }
    let mut bound_fail = 0;
    let mut tightest = f64::INFINITY;
    for delta in [0.01f64, 0.1, 0.5] {
        let mut count = 0;
        while count < 1000 {
            // Half near the boundary α₁² + α₂² = δ, half uniform.
            let v = if count % 2 == 0 {
                let a0 = (1.0 - delta).sqrt() * rng.gen_range(0.999..=1.0);
                let t = rng.gen_range(0.0..std::f64::consts::TAU);
                let r = (1.0 - a0 * a0).sqrt();
                [a0, r * t.cos(), r * t.sin()]
            } else {
                unit(&mut rng)
            };
            if v[1] * v[1] + v[2] * v[2] < delta {
                continue;
            }
            count += 1;
            let p = phi_map(v).unwrap().prob_one();
            tightest = tightest.min(p / (delta / 4.0));
            if p < delta / 4.0 {
                bound_fail += 1;
            }
        }
    }
    check(
        worst_phase <= 1e-9 && bound_fail == 0,
        format!("max ||<U^ Phi(v), Phi(Uv)>| - 1| = {worst_phase:.2e}; P(|1>) >= delta/4 failures {bound_fail}, min ratio {tightest:.4}"),
    )
}

fn double_preimage() -> Check {
    let r = preimage_report(&Generators::standard(), 1000, 31337);
    check(r.holds() && r.samples == 1000, format!("{} random vectors and {} residue classes, {} in K", r.samples, r.classes, r.violations.len()))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Check, Option<Duration>);
    let criteria: [Criterion; 10] = [
        ("k-set closure mod 5", k_closure, Some(Duration::from_secs(1))),
        ("word separation n <= 6", separation, Some(Duration::from_secs(10))),
        ("palindrome machine exact, |x| <= 10", palindrome_exact, Some(Duration::from_secs(30))),
        ("per-pass rejection frequency on \"ab\"", pass_frequency, None),
        ("a^n b^n machine correctness", anbn, None),
        ("rotation gap sweep |d| <= 10^4", rotation_gap, Some(Duration::from_secs(5))),
        ("random walk hitting law", random_walk, None),
        ("runtime exponent", runtime_exponent, Some(Duration::from_secs(600))),
        ("single-qubit reduction", single_qubit, None),
        ("double preimages avoid K", double_preimage, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let c = run();
        let elapsed = t.elapsed();
        let c = within_limit(c, elapsed, limit);
        let tag = if c.passed { "PASS" } else { "FAIL" };
        if !c.passed {
            failed += 1;
        }
        println!("{tag} [{:>2}] {name}: {} ({:.2?})", i + 1, c.detail, elapsed);
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
