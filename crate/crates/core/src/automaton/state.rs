//! Quantum register contents and the effect of actions on them.
//!
//! The exact backend stores a ray: an unnormalized vector over `Q(√2)`
//! scaled so its first nonzero coordinate is 1. Probabilities are ratios of
//! squared norms and stay exact. A rotation by a multiple of `√2·π` is kept
//! as a pending twist and only evaluated (with rational brackets) when a
//! measurement needs it. Anything the exact backend cannot represent falls
//! back to complex `f64`.

use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use super::spec::{ExactMatrix, Measurement, Unitary};
use crate::fixed::{sin_cos_sqrt2_pi, Bracket};
use crate::scalar::{threshold_u64_scale, Surd};

const TWO_POW_64: u128 = 1 << 64;
const MIN_BITS: u32 = 128;
const MAX_BITS: u32 = 1 << 14;

/// `R_pq(turns·√2·π)` applied on top of the stored ray.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Twist {
    pub plane: (usize, usize),
    pub turns: i64,
}

#[derive(Clone, Debug)]
pub enum QuantumState {
    Exact { ray: Vec<Surd>, twist: Option<Twist> },
    Float(Vec<Complex64>),
}

impl PartialEq for QuantumState {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Exact { ray: a, twist: s }, Self::Exact { ray: b, twist: t }) => a == b && s == t,
            (Self::Float(a), Self::Float(b)) => {
                a.len() == b.len()
                    && a.iter().zip(b).all(|(x, y)| {
                        x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()
                    })
            }
            _ => false,
        }
    }
}

impl Eq for QuantumState {}

impl Hash for QuantumState {
    fn hash<H: Hasher>(&self, h: &mut H) {
        match self {
            Self::Exact { ray, twist } => {
                0u8.hash(h);
                ray.hash(h);
                twist.hash(h);
            }
            Self::Float(v) => {
                1u8.hash(h);
                for x in v {
                    x.re.to_bits().hash(h);
                    x.im.to_bits().hash(h);
                }
            }
        }
    }
}

/// Probability of one measurement outcome (or of a union of outcomes).
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Probability {
    Exact(Surd),
    /// `(exact + (c·x + s·y)²) / norm` where `(s, c) = sin/cos(turns·√2·π)`.
    Twisted { exact: Surd, x: Surd, y: Surd, norm: Surd, turns: i64 },
    Float(f64),
}

impl Probability {
    pub fn to_f64(&self) -> f64 {
        match self {
            Probability::Exact(p) => p.to_f64(),
            Probability::Twisted { .. } => self.bracket(MIN_BITS).to_f64(),
            Probability::Float(p) => *p,
        }
    }

    pub fn as_exact(&self) -> Option<&Surd> {
        match self {
            Probability::Exact(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Probability::Exact(p) => p.is_zero(),
            Probability::Twisted { .. } => false,
            Probability::Float(p) => *p == 0.0,
        }
    }

    /// Rational bracket containing the probability.
    pub fn bracket(&self, bits: u32) -> Bracket {
        match self {
            Probability::Exact(p) => Bracket::from_surd(p, bits),
            Probability::Twisted { exact, x, y, norm, turns } => {
                let (s, c) = sin_cos_sqrt2_pi(*turns, bits);
                let w = c.mul(&Bracket::from_surd(x, bits)).add(&s.mul(&Bracket::from_surd(y, bits)));
                let num = Bracket::from_surd(exact, bits).add(&w.square());
                let inv = Bracket::from_surd(&norm.recip().expect("nonzero norm"), bits);
                num.mul(&inv)
            }
            Probability::Float(p) => {
                let r = BigRational::from_float(*p).unwrap_or_else(BigRational::zero);
                Bracket::exact(r)
            }
        }
    }

    /// `⌈p·2^64⌉` clamped to `[0, 2^64]`.
    pub fn threshold(&self) -> u128 {
        match self {
            Probability::Exact(p) => threshold_u64_scale(p),
            Probability::Float(p) => {
                let t = (p * TWO_POW_64 as f64).ceil();
                if t <= 0.0 {
                    0
                } else if t >= TWO_POW_64 as f64 {
                    TWO_POW_64
                } else {
                    t as u128
                }
            }
            Probability::Twisted { .. } => {
                let mut bits = MIN_BITS;
                loop {
                    let b = self.bracket(bits);
                    let lo = threshold_of(&b.lo);
                    let hi = threshold_of(&b.hi);
                    if lo == hi || bits >= MAX_BITS {
                        return if lo == hi { lo } else { threshold_of(&b.midpoint()) };
                    }
                    bits *= 2;
                }
            }
        }
    }
}

fn threshold_of(r: &BigRational) -> u128 {
    threshold_u64_scale(&Surd::from_rational(r.clone()))
}

/// The possible results of measuring a state: per outcome its probability
/// and post-measurement state (`None` when the outcome is impossible).
#[derive(Clone, Debug)]
pub struct Branches {
    pub probabilities: Vec<Probability>,
    pub states: Vec<Option<QuantumState>>,
    /// Cumulative thresholds `⌈(p₀+…+p_j)·2^64⌉`; the last is always `2^64`.
    pub thresholds: Vec<u128>,
}

impl Branches {
    /// Outcome selected by a uniform 64-bit draw.
    pub fn select(&self, draw: u64) -> usize {
        let r = draw as u128;
        self.thresholds.iter().position(|&t| r < t).unwrap_or(self.thresholds.len() - 1)
    }
}

fn canonical_ray(mut v: Vec<Surd>) -> Vec<Surd> {
    if let Some(first) = v.iter().find(|x| !x.is_zero()).cloned() {
        if !first.is_one() {
            let inv = first.recip().expect("nonzero");
            for x in v.iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
    }
    v
}

fn norm_sq(v: &[Surd]) -> Surd {
    let mut acc = Surd::zero();
    for x in v {
        if !x.is_zero() {
            acc += &x.square();
        }
    }
    acc
}

fn basis_ray(dim: usize, i: usize) -> Vec<Surd> {
    (0..dim).map(|j| if i == j { Surd::one() } else { Surd::zero() }).collect()
}

impl QuantumState {
    /// `|q_i⟩` on the exact backend.
    pub fn basis(dim: usize, i: usize) -> Self {
        QuantumState::Exact { ray: basis_ray(dim, i), twist: None }
    }

    pub fn from_float(amplitudes: Vec<Complex64>) -> Self {
        QuantumState::Float(amplitudes)
    }

    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Exact { ray, .. } => ray.len(),
            QuantumState::Float(v) => v.len(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, QuantumState::Exact { .. })
    }

    /// Normalized amplitudes in floating point.
    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            QuantumState::Float(v) => v.clone(),
            QuantumState::Exact { ray, twist } => {
                let n = norm_sq(ray).to_f64().sqrt();
                let mut v: Vec<Complex64> = ray.iter().map(|x| Complex64::new(x.to_f64() / n, 0.0)).collect();
                if let Some(t) = twist {
                    rotate_float(&mut v, t.plane, t.turns);
                }
                v
            }
        }
    }

    fn to_float(&self) -> QuantumState {
        QuantumState::Float(self.to_complex())
    }

    /// Exact squared amplitudes `|ψ_i|²`; `None` unless the state is an
    /// untwisted exact ray. They sum to exactly 1.
    pub fn exact_squared_amplitudes(&self) -> Option<Vec<Surd>> {
        match self {
            QuantumState::Exact { ray, twist: None } => {
                let inv = norm_sq(ray).recip()?;
                Some(ray.iter().map(|x| &x.square() * &inv).collect())
            }
            _ => None,
        }
    }

    /// `Σ|ψ_i|²` in floating point.
    pub fn norm_sq_f64(&self) -> f64 {
        self.to_complex().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn apply(&self, u: &Unitary) -> QuantumState {
        if u.is_identity() {
            return self.clone();
        }
        match (self, u) {
            (QuantumState::Exact { ray, twist: None }, Unitary::Exact(m)) => {
                QuantumState::Exact { ray: canonical_ray(m.apply(ray)), twist: None }
            }
            (QuantumState::Exact { ray, twist }, Unitary::Rotation { plane, multiple }) => {
                let (p, q) = *plane;
                let (turns, same_plane) = match twist {
                    None => (*multiple, true),
                    Some(t) if t.plane == (p, q) => (t.turns + multiple, true),
                    Some(t) if t.plane == (q, p) => (t.turns - multiple, true),
                    Some(_) => (0, false),
                };
                if !same_plane {
                    return self.to_float().apply(u);
                }
                let plane = twist.map_or(*plane, |t| t.plane);
                let idle = ray[plane.0].is_zero() && ray[plane.1].is_zero();
                let twist = (turns != 0 && !idle).then_some(Twist { plane, turns });
                QuantumState::Exact { ray: ray.clone(), twist }
            }
            (QuantumState::Exact { .. }, _) => self.to_float().apply(u),
            (QuantumState::Float(v), Unitary::Complex(m)) => QuantumState::Float(m.apply(v)),
            (QuantumState::Float(v), Unitary::Exact(m)) => QuantumState::Float(m.to_complex().apply(v)),
            (QuantumState::Float(v), Unitary::Rotation { plane, multiple }) => {
                let mut v = v.clone();
                rotate_float(&mut v, *plane, *multiple);
                QuantumState::Float(v)
            }
        }
    }

    pub fn measure(&self, m: &Measurement) -> Branches {
        let (probabilities, states) = match (self, m) {
            (QuantumState::Exact { ray, twist: None }, Measurement::Basis(parts)) => {
                let norm = norm_sq(ray);
                let inv = norm.recip().expect("nonzero ray");
                parts
                    .iter()
                    .map(|part| {
                        let projected: Vec<Surd> = (0..ray.len())
                            .map(|i| if part.contains(&i) { ray[i].clone() } else { Surd::zero() })
                            .collect();
                        let p = &norm_sq(&projected) * &inv;
                        let state = (!p.is_zero())
                            .then(|| QuantumState::Exact { ray: canonical_ray(projected), twist: None });
                        (Probability::Exact(p), state)
                    })
                    .unzip()
            }
            (QuantumState::Exact { ray, twist: None }, Measurement::Projectors(ps)) => {
                let inv = norm_sq(ray).recip().expect("nonzero ray");
                ps.iter()
                    .map(|proj| {
                        let projected = proj.apply(ray);
                        let p = &norm_sq(&projected) * &inv;
                        let state = (!p.is_zero())
                            .then(|| QuantumState::Exact { ray: canonical_ray(projected), twist: None });
                        (Probability::Exact(p), state)
                    })
                    .unzip()
            }
            (QuantumState::Exact { ray, twist: Some(t) }, Measurement::Basis(parts)) => {
                parts.iter().map(|part| twisted_branch(ray, *t, part)).unzip()
            }
            (QuantumState::Exact { .. }, Measurement::Projectors(_)) => return self.to_float().measure(m),
            (QuantumState::Float(v), m) => float_branches(v, m),
        };
        let thresholds = cumulative_thresholds(self, m, &probabilities);
        Branches { probabilities, states, thresholds }
    }
}

fn rotate_float(v: &mut [Complex64], (p, q): (usize, usize), turns: i64) {
    let (c, s) = crate::fixed::cos_sin_f64(turns);
    let (a, b) = (v[p], v[q]);
    v[p] = a * c - b * s;
    v[q] = a * s + b * c;
}

/// One outcome of a basis measurement on a twisted ray.
fn twisted_branch(ray: &[Surd], t: Twist, part: &[usize]) -> (Probability, Option<QuantumState>) {
    let prob = twisted_probability(ray, t, part);
    let (p, q) = t.plane;
    let (has_p, has_q) = (part.contains(&p), part.contains(&q));
    let others_zero = part.iter().all(|&i| i == p || i == q || ray[i].is_zero());
    let state = if prob.is_zero() {
        None
    } else if has_p == has_q {
        // The twist acts inside (or entirely outside) the kept subspace.
        let projected: Vec<Surd> =
            (0..ray.len()).map(|i| if part.contains(&i) { ray[i].clone() } else { Surd::zero() }).collect();
        let twist = (has_p && !(projected[p].is_zero() && projected[q].is_zero())).then_some(t);
        Some(QuantumState::Exact { ray: canonical_ray(projected), twist })
    } else if others_zero {
        let kept = if has_p { p } else { q };
        Some(QuantumState::basis(ray.len(), kept))
    } else {
        let v = QuantumState::Exact { ray: ray.to_vec(), twist: Some(t) }.to_complex();
        let mut projected: Vec<Complex64> =
            v.iter().enumerate().map(|(i, z)| if part.contains(&i) { *z } else { Complex64::zero() }).collect();
        let n: f64 = projected.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        projected.iter_mut().for_each(|z| *z /= n);
        Some(QuantumState::Float(projected))
    };
    (prob, state)
}

fn twisted_probability(ray: &[Surd], t: Twist, members: &[usize]) -> Probability {
    let (p, q) = t.plane;
    let (has_p, has_q) = (members.contains(&p), members.contains(&q));
    let norm = norm_sq(ray);
    let mut exact = Surd::zero();
    for &i in members {
        if (i != p && i != q) || has_p == has_q {
            exact += &ray[i].square();
        }
    }
    // Rotated coordinates: w_p = c·v_p − s·v_q, w_q = s·v_p + c·v_q.
    let (x, y) = match (has_p, has_q) {
        (true, false) => (ray[p].clone(), -&ray[q]),
        (false, true) => (ray[q].clone(), ray[p].clone()),
        _ => (Surd::zero(), Surd::zero()),
    };
    if x.is_zero() && y.is_zero() {
        return Probability::Exact(&exact * &norm.recip().expect("nonzero ray"));
    }
    Probability::Twisted { exact, x, y, norm, turns: t.turns }
}

fn float_branches(v: &[Complex64], m: &Measurement) -> (Vec<Probability>, Vec<Option<QuantumState>>) {
    let projectors: Vec<Vec<Complex64>> = match m {
        Measurement::Basis(parts) => parts
            .iter()
            .map(|part| v.iter().enumerate().map(|(i, z)| if part.contains(&i) { *z } else { Complex64::zero() }).collect())
            .collect(),
        Measurement::Projectors(ps) => ps.iter().map(|p| p.to_complex().apply(v)).collect(),
    };
    projectors
        .into_iter()
        .map(|mut w| {
            let p: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            let state = (p > 0.0).then(|| {
                let mut support = w.iter().enumerate().filter(|(_, z)| z.norm_sqr() > 0.0);
                if let (Some((i, _)), None) = (support.next(), support.next()) {
                    // A single basis component: drop the global phase.
                    return QuantumState::basis(w.len(), i);
                }
                let n = p.sqrt();
                w.iter_mut().for_each(|z| *z /= n);
                QuantumState::Float(w)
            });
            (Probability::Float(p), state)
        })
        .unzip()
}

fn cumulative_thresholds(state: &QuantumState, m: &Measurement, probs: &[Probability]) -> Vec<u128> {
    let count = probs.len();
    let mut out = Vec::with_capacity(count);
    match (state, m) {
        (QuantumState::Exact { ray, twist: Some(t) }, Measurement::Basis(parts)) => {
            let mut members = Vec::new();
            for part in &parts[..count.saturating_sub(1)] {
                members.extend_from_slice(part);
                out.push(twisted_probability(ray, *t, &members).threshold());
            }
        }
        _ => {
            let exact = probs.iter().all(|p| p.as_exact().is_some());
            let mut cum_exact = Surd::zero();
            let mut cum_float = 0.0;
            for p in &probs[..count.saturating_sub(1)] {
                if exact {
                    cum_exact += p.as_exact().expect("exact");
                    out.push(threshold_u64_scale(&cum_exact));
                } else {
                    cum_float += p.to_f64();
                    out.push(Probability::Float(cum_float).threshold());
                }
            }
        }
    }
    out.push(TWO_POW_64);
    // Impossible outcomes must never be selected; the last possible one
    // absorbs any rounding slack.
    if let Some(last) = probs.iter().rposition(|p| !p.is_zero()) {
        out[last..].iter_mut().for_each(|t| *t = TWO_POW_64);
    }
    for j in 0..count {
        if probs[j].is_zero() {
            let prev = if j == 0 { 0 } else { out[j - 1] };
            out[j] = prev;
        }
    }
    out
}

/// Orthogonality check of an exact projector family; used by validation.
pub(crate) fn check_projectors(ps: &[ExactMatrix]) -> Result<(), String> {
    let Some(first) = ps.first() else {
        return Err("measurement has no outcomes".into());
    };
    let n = first.dim();
    let mut sum: Vec<Vec<Surd>> = vec![vec![Surd::zero(); n]; n];
    for (j, p) in ps.iter().enumerate() {
        if p.transpose() != *p {
            return Err(format!("projector {j} is not self-adjoint"));
        }
        if p.mul(p) != *p {
            return Err(format!("projector {j} is not idempotent"));
        }
        for (k, other) in ps.iter().enumerate().skip(j + 1) {
            if p.mul(other).rows().iter().flatten().any(|x| !x.is_zero()) {
                return Err(format!("projectors {j} and {k} are not orthogonal"));
            }
        }
        for (i, row) in sum.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x += p.get(i, c);
            }
        }
    }
    if !ExactMatrix::new(sum).map(|m| m.is_identity()).unwrap_or(false) {
        return Err("projectors do not sum to the identity".into());
    }
    Ok(())
}

/// Squared amplitudes of a float state, for norm checks.
pub fn float_norm_defect(state: &QuantumState) -> f64 {
    (state.norm_sq_f64() - 1.0).abs()
}
