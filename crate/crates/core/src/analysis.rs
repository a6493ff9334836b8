//! Closed-form pass probabilities and mechanical checks of the lemmas.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fixed::{sin_sq_sqrt2_pi, Bracket};
use crate::linalg::{
    exact_apply, in_k, in_k_mod5, int_vec, inverse_power_of_25, residual_norm_sq, IntVec3, MatrixTag, NamedMatrix,
    ScaledVec3,
};

/// Largest word length accepted by [`verify_separation`].
pub const MAX_SEPARATION_LENGTH: u32 = 8;
/// Largest `|d|` accepted by [`rotation_gap`].
pub const MAX_ROTATION_MULTIPLE: i64 = 1 << 40;
/// Fractional bits used for `sin²(√2·d·π)`.
pub const TRIG_BITS: u32 = 128;

/// The generator pair `(A, B)`. Checks take it as a parameter so a corrupted
/// pair can serve as a negative control.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generators {
    pub a: NamedMatrix,
    pub b: NamedMatrix,
}

impl Generators {
    pub fn standard() -> Self {
        Self { a: NamedMatrix::a(), b: NamedMatrix::b() }
    }

    /// `A` with one entry changed; breaks closure of `K`.
    pub fn corrupted() -> Self {
        let mut a = NamedMatrix::a();
        a.entries[1][0] = -2;
        Self { a, b: NamedMatrix::b() }
    }
}

impl Default for Generators {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureReport {
    /// Residue triples satisfying the K conditions.
    pub members: usize,
    /// `(u mod 5, matrix)` with `u ∈ K` but `M·u ∉ K`.
    pub counterexamples: Vec<([i64; 3], MatrixTag)>,
}

impl ClosureReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Every residue triple mod 5 in `K` is mapped into `K` by `A` and by `B`.
pub fn k_closure_report(g: &Generators) -> ClosureReport {
    let mut report = ClosureReport { members: 0, counterexamples: Vec::new() };
    for x in 0..5 {
        for y in 0..5 {
            for z in 0..5 {
                let u = [x, y, z];
                if !in_k_mod5(u) {
                    continue;
                }
                report.members += 1;
                for m in [&g.a, &g.b] {
                    if !in_k_mod5(m.mul_mod5(u)) {
                        report.counterexamples.push((u, m.tag));
                    }
                }
            }
        }
    }
    report
}

pub fn verify_k_closure() -> bool {
    k_closure_report(&Generators::standard()).holds()
}

/// `u` has an integer preimage under `M/5·5 = M`, i.e. `M⁻¹u = Mᵀu/25` is integral.
fn has_integer_preimage(m: &NamedMatrix, u: &IntVec3) -> bool {
    let t = m.inverse().mul_int(u);
    let q = BigInt::from(25);
    t.iter().all(|x| (x % &q).is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreimageReport {
    /// Residue classes mod 25 with integer preimages under both matrices.
    pub classes: usize,
    /// Random vectors with both preimages that were tested.
    pub samples: usize,
    /// Vectors with both preimages that lie in `K`.
    pub violations: Vec<[i64; 3]>,
}

impl PreimageReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lemma 2: if `u = Av` and `u = Bw` with integer `v`, `w`, then `u ∉ K`.
///
/// Both the preimage conditions (`Mᵀu ≡ 0 mod 25`) and K membership depend
/// only on `u mod 25`, so all 25³ classes are checked; then `samples` random
/// vectors `u = Av` with `Bᵀu ≡ 0 mod 25` are drawn and checked directly.
pub fn preimage_report(g: &Generators, samples: usize, seed: u64) -> PreimageReport {
    let mut report = PreimageReport { classes: 0, samples: 0, violations: Vec::new() };
    for x in 0..25 {
        for y in 0..25 {
            for z in 0..25 {
                let u = int_vec(x, y, z);
                if has_integer_preimage(&g.a, &u) && has_integer_preimage(&g.b, &u) {
                    report.classes += 1;
                    if in_k(&u) {
                        report.violations.push([x, y, z]);
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while report.samples < samples {
        let v = int_vec(rng.gen_range(-1_000_000..=1_000_000), rng.gen_range(-1_000_000..=1_000_000), rng.gen_range(-1_000_000..=1_000_000));
        let u = g.a.mul_int(&v);
        if !has_integer_preimage(&g.b, &u) {
            continue;
        }
        report.samples += 1;
        if in_k(&u) {
            let small = |x: &BigInt| i64::try_from(x).unwrap_or(i64::MAX);
            report.violations.push([small(&u[0]), small(&u[1]), small(&u[2])]);
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationViolation {
    pub x: Vec<MatrixTag>,
    pub y: Vec<MatrixTag>,
    pub residual: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationReport {
    pub n_max: u32,
    pub pairs: u64,
    pub violations: Vec<SeparationViolation>,
}

impl SeparationReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn word(bits: u32, n: u32) -> Vec<MatrixTag> {
    (0..n).map(|i| if bits >> i & 1 == 0 { MatrixTag::A } else { MatrixTag::B }).collect()
}

/// Lemma 3: for all `X, Y ∈ {A,B}ⁿ`, `n ≤ n_max`, the vector
/// `u = Y₁⁻¹⋯Yₙ⁻¹Xₙ⋯X₁(1,0,0)ᵀ` has `u₂² + u₃² = 0` iff `X = Y`, and
/// `u₂² + u₃² > 25⁻ⁿ` otherwise.
pub fn verify_separation(n_max: u32) -> Result<SeparationReport> {
    verify_separation_with(&Generators::standard(), n_max)
}

pub fn verify_separation_with(g: &Generators, n_max: u32) -> Result<SeparationReport> {
    if n_max > MAX_SEPARATION_LENGTH {
        return Err(Error::Resource(format!(
            "separation sweep is limited to n ≤ {MAX_SEPARATION_LENGTH} (4^n pairs per length), got {n_max}"
        )));
    }
    let pick = |t: MatrixTag| match t {
        MatrixTag::A => g.a.clone(),
        MatrixTag::B => g.b.clone(),
        MatrixTag::AInv => g.a.inverse(),
        MatrixTag::BInv => g.b.inverse(),
    };
    let mut report = SeparationReport { n_max, pairs: 0, violations: Vec::new() };
    for n in 0..=n_max {
        let count = 1u32 << n;
        let bound = inverse_power_of_25(n);
        let forward: Vec<ScaledVec3> = (0..count)
            .map(|x| word(x, n).iter().fold(ScaledVec3::unit_x(), |v, &t| exact_apply(&pick(t), &v)))
            .collect();
        let found: Vec<Vec<SeparationViolation>> = (0..count)
            .into_par_iter()
            .map(|y| {
                let yw = word(y, n);
                let mut bad = Vec::new();
                for (x, start) in forward.iter().enumerate() {
                    // Yₙ⁻¹ acts first, Y₁⁻¹ last.
                    let u = yw.iter().rev().fold(start.clone(), |v, &t| exact_apply(&pick(t.inverse()), &v));
                    // A non-unit result means the generators are not orthogonal.
                    let (r, unit) = match residual_norm_sq(&u) {
                        Ok(r) => (r, true),
                        Err(_) => (u.coord(1) * u.coord(1) + u.coord(2) * u.coord(2), false),
                    };
                    let ok = unit && if x as u32 == y { r.is_zero() } else { r > bound };
                    if !ok {
                        bad.push(SeparationViolation { x: word(x as u32, n), y: yw.clone(), residual: r });
                    }
                }
                bad
            })
            .collect();
        report.violations.extend(found.into_iter().flatten());
        report.pairs += u64::from(count) * u64::from(count);
    }
    Ok(report)
}

/// Per-pass halting probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PassProbabilities {
    /// Exact, or the midpoint of `p_rej_bracket` when irrational.
    pub p_rej: BigRational,
    /// Enclosure of an irrational `p_rej`; `None` when `p_rej` is exact.
    pub p_rej_bracket: Option<Bracket>,
    pub p_acc: BigRational,
}

impl PassProbabilities {
    pub fn exact(p_rej: BigRational, p_acc: BigRational) -> Self {
        Self { p_rej, p_rej_bracket: None, p_acc }
    }

    pub fn p_rej_is_exact(&self) -> bool {
        self.p_rej_bracket.is_none()
    }
}

fn two_pow_neg(e: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << e)
}

fn palindrome_word(x: &str) -> Result<Vec<MatrixTag>> {
    x.chars()
        .map(|c| match c {
            'a' => Ok(MatrixTag::A),
            'b' => Ok(MatrixTag::B),
            _ => Err(Error::InvalidInput(format!("symbol `{c}` is not in {{a,b}}"))),
        })
        .collect()
}

/// `β = X₁⁻¹…` as applied by the machine: loop (I) applies `X₁, …, Xₙ`, loop
/// (II) applies `X₁⁻¹, …, Xₙ⁻¹`, so `β = Xₙ⁻¹⋯X₁⁻¹Xₙ⋯X₁(1,0,0)ᵀ`.
pub fn palindrome_beta(x: &str) -> Result<ScaledVec3> {
    let w = palindrome_word(x)?;
    let forward = w.iter().fold(ScaledVec3::unit_x(), |v, &t| exact_apply(&NamedMatrix::of(t), &v));
    Ok(w.iter().fold(forward, |v, &t| exact_apply(&NamedMatrix::of(t.inverse()), &v)))
}

/// `p_rej = β₁² + β₂²`, `p_acc = 2^{−k(n+1)}`.
pub fn palindrome_pass_probs(x: &str, k: u32) -> Result<PassProbabilities> {
    let beta = palindrome_beta(x)?;
    let n = x.chars().count() as u64;
    Ok(PassProbabilities::exact(residual_norm_sq(&beta)?, two_pow_neg(u64::from(k) * (n + 1))))
}

/// The single-qubit machine measures `Φ(β)`, which yields `|1⟩` with
/// probability `sin²(φ/2) = (1 − β₀)/2`; `k` is the qubit machine's own.
pub fn palindrome_qubit_pass_probs(x: &str, k: u32) -> Result<PassProbabilities> {
    let beta = palindrome_beta(x)?;
    let n = x.chars().count() as u64;
    let half = BigRational::new(1.into(), 2.into());
    let p_rej = (BigRational::one() - beta.coord(0)) * half;
    Ok(PassProbabilities::exact(p_rej, two_pow_neg(u64::from(k) * (n + 1))))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaltingDistribution {
    pub accept: BigRational,
    pub reject: BigRational,
    pub expected_iterations: BigRational,
}

/// Geometric-series totals over repeated passes.
pub fn aggregate_halting(p: &PassProbabilities) -> Result<HaltingDistribution> {
    let (a, r) = (&p.p_acc, &p.p_rej);
    let unit = |x: &BigRational| !x.is_negative() && *x <= BigRational::one();
    if !unit(a) || !unit(r) {
        return Err(Error::Domain("pass probabilities must lie in [0, 1]".into()));
    }
    let denom = a + r - a * r;
    if denom.is_zero() {
        return Err(Error::NonHalting);
    }
    Ok(HaltingDistribution {
        accept: (a - a * r) / &denom,
        reject: r / &denom,
        expected_iterations: BigRational::one() / denom,
    })
}

/// `p_rej = sin²(√2(n−n′)π)` (exactly 0 when `n = n′`) and
/// `p_acc = 1/(2ᵏ(n+n′+1)²)`.
pub fn anbn_pass_probs(n: u64, n_prime: u64, k: u32) -> Result<PassProbabilities> {
    let d = i64::try_from(n as i128 - n_prime as i128).map_err(|_| Error::Domain("n − n′ out of range".into()))?;
    let walk = BigInt::from(n) + BigInt::from(n_prime) + 1;
    let p_acc = BigRational::new(BigInt::one(), (BigInt::one() << k) * &walk * &walk);
    if d == 0 {
        return Ok(PassProbabilities::exact(BigRational::zero(), p_acc));
    }
    let bracket = sin_sq_sqrt2_pi(d, TRIG_BITS);
    Ok(PassProbabilities { p_rej: bracket.midpoint(), p_rej_bracket: Some(bracket), p_acc })
}

/// Bracket for `sin²(√2·d·π)`.
pub fn rotation_gap(d: i64) -> Result<Bracket> {
    if d == 0 {
        return Err(Error::Domain("rotation gap is zero for d = 0".into()));
    }
    if d.unsigned_abs() > MAX_ROTATION_MULTIPLE as u64 {
        return Err(Error::Domain(format!("|d| must be at most 2^40, got {d}")));
    }
    Ok(sin_sq_sqrt2_pi(d, TRIG_BITS))
}

/// `1/(2d²)`.
pub fn rotation_gap_bound(d: i64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2) * BigInt::from(d) * BigInt::from(d))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapSweepReport {
    pub checked: u64,
    pub violations: Vec<i64>,
    /// Smallest `sin²(√2dπ)·2d²` seen (≥ 1 when the bound holds).
    pub min_ratio: f64,
    pub min_ratio_at: i64,
}

impl GapSweepReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `sin²(√2dπ) ≥ 1/(2d²)` for all `1 ≤ |d| ≤ d_max` on the lower
/// end of each bracket.
pub fn rotation_gap_sweep(d_max: i64) -> Result<GapSweepReport> {
    if !(1..=MAX_ROTATION_MULTIPLE).contains(&d_max) {
        return Err(Error::Domain(format!("d_max must lie in [1, 2^40], got {d_max}")));
    }
    let results: Vec<Result<(i64, bool, f64)>> = (-d_max..=d_max)
        .into_par_iter()
        .filter(|&d| d != 0)
        .map(|d| {
            let b = rotation_gap(d)?;
            let bound = rotation_gap_bound(d);
            let ratio = b.to_f64() * 2.0 * (d as f64) * (d as f64);
            Ok((d, b.lo >= bound, ratio))
        })
        .collect();
    let mut report = GapSweepReport { checked: 0, violations: Vec::new(), min_ratio: f64::INFINITY, min_ratio_at: 0 };
    for r in results {
        let (d, ok, ratio) = r?;
        report.checked += 1;
        if !ok {
            report.violations.push(d);
        }
        if ratio < report.min_ratio {
            report.min_ratio = ratio;
            report.min_ratio_at = d;
        }
    }
    Ok(report)
}

/// Probability that a symmetric walk from 1, absorbed at 0 and `N`, ends at `N`.
pub fn walk_hit_probability(walk_length: i64) -> Result<BigRational> {
    if walk_length < 1 {
        return Err(Error::Domain(format!("walk length must be at least 1, got {walk_length}")));
    }
    Ok(BigRational::new(BigInt::one(), BigInt::from(walk_length)))
}

/// The same probability from the absorbing-chain equations
/// `h₀ = 0`, `h_N = 1`, `h_i = (h_{i−1} + h_{i+1})/2`, solved exactly by
/// forward elimination.
pub fn walk_hit_probability_by_solve(walk_length: i64) -> Result<BigRational> {
    if walk_length < 1 {
        return Err(Error::Domain(format!("walk length must be at least 1, got {walk_length}")));
    }
    let n = walk_length as usize;
    if n == 1 {
        return Ok(BigRational::one());
    }
    // Unknowns h_1..h_{N-1}: −h_{i−1}/2 + h_i − h_{i+1}/2 = 0, with h_N = 1.
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut c = vec![BigRational::zero(); n]; // modified super-diagonal
    let mut d = vec![BigRational::zero(); n]; // modified right-hand side
    for i in 1..n {
        let rhs = if i == n - 1 { half.clone() } else { BigRational::zero() };
        let (c_prev, d_prev) = if i == 1 { (BigRational::zero(), BigRational::zero()) } else { (c[i - 1].clone(), d[i - 1].clone()) };
        let denom = BigRational::one() - &half * &c_prev;
        c[i] = &half / &denom;
        d[i] = (rhs + &half * d_prev) / denom;
    }
    let mut h = vec![BigRational::zero(); n + 1];
    h[n] = BigRational::one();
    for i in (1..n).rev() {
        h[i] = if i == n - 1 { d[i].clone() } else { &d[i] + &c[i] * &h[i + 1] };
    }
    Ok(h[1].clone())
}

/// Least-squares slope of `log(mean_steps)` against `log(length)`.
pub fn fit_runtime_exponent(lengths: &[f64], mean_steps: &[f64]) -> Result<f64> {
    if lengths.len() != mean_steps.len() {
        return Err(Error::Fit("lengths and mean steps differ in count".into()));
    }
    if lengths.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 data points, got {}", lengths.len())));
    }
    if lengths.iter().chain(mean_steps).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Fit("lengths and mean steps must be positive and finite".into()));
    }
    if lengths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Fit("lengths must be strictly increasing".into()));
    }
    let xs: Vec<f64> = lengths.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = mean_steps.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Per-pass probabilities of a named zoo machine on `input`.
pub fn machine_pass_probs(machine: &str, epsilon: f64, input: &str) -> Result<PassProbabilities> {
    use crate::zoo::{AnbnParams, PalindromeParams};
    match machine {
        "palindrome3" => palindrome_pass_probs(input, PalindromeParams::new(epsilon)?.k),
        "palindrome-qubit" => palindrome_qubit_pass_probs(input, PalindromeParams::new(epsilon)?.qubit_k()),
        "anbn" => {
            let k = AnbnParams::new(epsilon)?.k;
            if let Some(c) = input.chars().find(|c| !matches!(c, 'a' | 'b')) {
                return Err(Error::InvalidInput(format!("symbol `{c}` is not in {{a,b}}")));
            }
            let n = input.chars().take_while(|&c| c == 'a').count();
            let rest = &input[n..];
            if rest.contains('a') {
                // Rejected by the classical a*b* check before any pass.
                return Ok(PassProbabilities::exact(BigRational::one(), BigRational::zero()));
            }
            anbn_pass_probs(n as u64, rest.len() as u64, k)
        }
        other => Err(Error::Parameter(format!(
            "no closed form for machine `{other}` (known: {})",
            crate::zoo::MACHINE_NAMES.join(", ")
        ))),
    }
}

/// Step budget used by [`runtime_scaling`] when none is given.
pub const DEFAULT_SCALING_BUDGET: f64 = 1e10;

/// Rough expected step count of `trials` runs of the aⁿbⁿ machine on
/// `a^{m/2}b^{m/2}`: `2ᵏ(m+1)²` passes of about `11m + 8` steps.
pub fn projected_anbn_steps(m: u64, k: u32, trials: u64) -> f64 {
    let m = m as f64;
    trials as f64 * 2f64.powi(k as i32) * (m + 1.0).powi(2) * (11.0 * m + 8.0)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ScalingRow {
    pub m: u64,
    pub stats: crate::sim::TrialStats,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    pub exponent: f64,
}

/// Mean steps of the aⁿbⁿ machine on `a^{m/2}b^{m/2}` for each `m`, and the
/// fitted exponent. Each length uses master seed `seed + m`.
pub fn runtime_scaling(
    epsilon: f64,
    lengths: &[u64],
    trials: u64,
    seed: u64,
    step_cap: Option<u64>,
    budget: f64,
) -> Result<ScalingReport> {
    use std::sync::Arc;
    let params = crate::zoo::AnbnParams::new(epsilon)?;
    if let Some(m) = lengths.iter().find(|&&m| m == 0 || m % 2 == 1) {
        return Err(Error::Parameter(format!("lengths must be even and positive, got {m}")));
    }
    let projected: f64 = lengths.iter().map(|&m| projected_anbn_steps(m, params.k, trials)).sum();
    if projected > budget {
        return Err(Error::Resource(format!("projected {projected:.3e} steps exceed the budget of {budget:.3e}")));
    }
    if lengths.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 lengths, got {}", lengths.len())));
    }
    let ex = crate::sim::Executor::new(Arc::new(crate::zoo::build_anbn(&params)?))?;
    let mut rows = Vec::new();
    for &m in lengths {
        let half = (m / 2) as usize;
        let input = "a".repeat(half) + &"b".repeat(half);
        let cap = step_cap.unwrap_or_else(|| crate::sim::default_step_cap(m as usize));
        rows.push(ScalingRow { m, stats: ex.run_trials(&input, trials, seed.wrapping_add(m), cap)? });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.m as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.stats.mean_steps).collect();
    let exponent = fit_runtime_exponent(&xs, &ys)?;
    Ok(ScalingReport { rows, exponent })
}

/// One row of the verification table.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Parameters of [`verify_all`].
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub n_max: u32,
    pub preimage_samples: usize,
    pub gap_max: i64,
    pub walk_max: i64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { n_max: 6, preimage_samples: 1000, gap_max: 10_000, walk_max: 64, seed: 0 }
    }
}

/// Runs every lemma check against `g` and returns one row per check.
pub fn verify_all(g: &Generators, opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut rows = Vec::new();

    let closure = k_closure_report(g);
    rows.push(CheckResult {
        name: "k-closure".into(),
        passed: closure.holds(),
        detail: format!("{} residues in K, {} counterexamples", closure.members, closure.counterexamples.len()),
    });

    let pre = preimage_report(g, opts.preimage_samples, opts.seed);
    rows.push(CheckResult {
        name: "double-preimage".into(),
        passed: pre.holds(),
        detail: format!("{} classes mod 25, {} samples, {} in K", pre.classes, pre.samples, pre.violations.len()),
    });

    let sep = verify_separation_with(g, opts.n_max)?;
    rows.push(CheckResult {
        name: "separation".into(),
        passed: sep.holds(),
        detail: format!("n <= {}, {} pairs, {} violations", sep.n_max, sep.pairs, sep.violations.len()),
    });

    let gap = rotation_gap_sweep(opts.gap_max)?;
    rows.push(CheckResult {
        name: "rotation-gap".into(),
        passed: gap.holds(),
        detail: format!(
            "1 <= |d| <= {}, {} violations, min 2d^2 sin^2 = {:.6} at d = {}",
            opts.gap_max,
            gap.violations.len(),
            gap.min_ratio,
            gap.min_ratio_at
        ),
    });

    let mut mismatches = 0;
    for n in 1..=opts.walk_max {
        if walk_hit_probability_by_solve(n)? != walk_hit_probability(n)? {
            mismatches += 1;
        }
    }
    rows.push(CheckResult {
        name: "walk-hit".into(),
        passed: mismatches == 0,
        detail: format!("N <= {}, {} mismatches", opts.walk_max, mismatches),
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn closure_single_cases() {
        assert_eq!(NamedMatrix::a().mul_mod5([1, 0, 0]), [4, 2, 0]);
        assert!(in_k_mod5([4, 2, 0]));
        assert_eq!(NamedMatrix::b().mul_mod5([1, 0, 0]), [4, 0, 2]);
        assert!(in_k_mod5([4, 0, 2]));
        assert!(verify_k_closure());
        assert!(!k_closure_report(&Generators::corrupted()).holds());
    }

    #[test]
    fn separation_examples() {
        let r = verify_separation(3).unwrap();
        assert!(r.holds());
        assert_eq!(r.pairs, 1 + 4 + 16 + 64);
        assert!(matches!(verify_separation(9), Err(Error::Resource(_))));
    }

    #[test]
    fn pass_probs_examples() {
        let p = palindrome_pass_probs("ab", 5).unwrap();
        assert_eq!(p.p_rej, q(11169, 390625));
        assert_eq!(p.p_acc, q(1, 1 << 15));
        assert_eq!(palindrome_pass_probs("aba", 7).unwrap().p_rej, q(0, 1));
        let e = palindrome_pass_probs("", 5).unwrap();
        assert_eq!((e.p_rej, e.p_acc), (q(0, 1), q(1, 32)));
        assert!(palindrome_pass_probs("abc", 5).is_err());
        assert_eq!(palindrome_qubit_pass_probs("ab", 7).unwrap().p_rej, q(9, 1250));
    }

    #[test]
    fn aggregate_examples() {
        let h = aggregate_halting(&PassProbabilities::exact(q(0, 1), q(1, 8))).unwrap();
        assert_eq!(h.accept, q(1, 1));
        let h = aggregate_halting(&PassProbabilities::exact(q(1, 2), q(1, 2))).unwrap();
        assert_eq!((h.reject.clone(), h.accept.clone()), (q(2, 3), q(1, 3)));
        assert_eq!(h.expected_iterations, q(4, 3));
        let h = aggregate_halting(&PassProbabilities::exact(q(1, 3), q(0, 1))).unwrap();
        assert_eq!(h.reject, q(1, 1));
        assert!(matches!(aggregate_halting(&PassProbabilities::exact(q(0, 1), q(0, 1))), Err(Error::NonHalting)));
    }

    #[test]
    fn anbn_examples() {
        assert_eq!(anbn_pass_probs(3, 3, 5).unwrap().p_rej, q(0, 1));
        let p = anbn_pass_probs(2, 1, 5).unwrap();
        assert!(!p.p_rej_is_exact());
        assert!((crate::scalar::rational_to_f64(&p.p_rej) - 0.929_108_092_834_408_8).abs() < 1e-15);
        assert_eq!(anbn_pass_probs(2, 1, 3).unwrap().p_acc, q(1, 128));
    }

    #[test]
    fn gap_examples() {
        assert!((rotation_gap(1).unwrap().to_f64() - 0.929_108_092_834_408_8).abs() < 1e-15);
        assert!((rotation_gap(5).unwrap().to_f64() - 0.049_024_977_469_445_87).abs() < 1e-15);
        assert!(rotation_gap(5).unwrap().lo >= q(1, 50));
        assert!(matches!(rotation_gap(0), Err(Error::Domain(_))));
        assert!(rotation_gap((1 << 40) + 1).is_err());
        assert!(rotation_gap_sweep(200).unwrap().holds());
    }

    #[test]
    fn walk_examples() {
        assert_eq!(walk_hit_probability(2).unwrap(), q(1, 2));
        assert_eq!(walk_hit_probability(4).unwrap(), q(1, 4));
        assert_eq!(walk_hit_probability_by_solve(10).unwrap(), q(1, 10));
        assert_eq!(walk_hit_probability_by_solve(1).unwrap(), q(1, 1));
        assert!(walk_hit_probability(0).is_err());
        for n in 1..=64 {
            assert_eq!(walk_hit_probability_by_solve(n).unwrap(), walk_hit_probability(n).unwrap());
        }
    }

    #[test]
    fn verify_all_detects_corruption() {
        let opts = VerifyOptions { n_max: 3, preimage_samples: 50, gap_max: 50, walk_max: 8, seed: 1 };
        assert!(verify_all(&Generators::standard(), &opts).unwrap().iter().all(|r| r.passed));
        assert!(verify_all(&Generators::corrupted(), &opts).unwrap().iter().any(|r| !r.passed));
    }

    #[test]
    fn machine_probs() {
        assert_eq!(machine_pass_probs("palindrome3", 0.5, "ab").unwrap().p_rej, q(11169, 390625));
        let p = machine_pass_probs("anbn", 0.1, "aba").unwrap();
        assert_eq!(aggregate_halting(&p).unwrap().reject, q(1, 1));
        assert_eq!(machine_pass_probs("anbn", 0.1, "aabb").unwrap().p_acc, q(1, 800));
        assert!(machine_pass_probs("foo", 0.1, "").is_err());
    }

    #[test]
    fn fit_examples() {
        let m = [2.0, 4.0, 8.0, 16.0];
        let quartic: Vec<f64> = m.iter().map(|v: &f64| v.powi(4)).collect();
        assert!((fit_runtime_exponent(&m, &quartic).unwrap() - 4.0).abs() < 1e-9);
        assert!((fit_runtime_exponent(&m, &m).unwrap() - 1.0).abs() < 1e-9);
        assert!(matches!(fit_runtime_exponent(&[4.0], &[1.0]), Err(Error::Fit(_))));
        assert!(fit_runtime_exponent(&[4.0, 4.0, 8.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_runtime_exponent(&[1.0, 2.0, 3.0], &[1.0, 0.0, 3.0]).is_err());
    }
}
