//! Fixed-point evaluation of sin/cos at angles `t·√2·π`.
//!
//! `t·√2` is reduced exactly with an integer square root, so the error does
//! not grow with `|t|`. Results come back as rational brackets `[lo, hi]`
//! that are guaranteed to contain the true value.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::{rational_to_f64, Surd};

/// Guard bits carried on top of the requested precision.
const GUARD: u32 = 64;
const PI_CACHE_BITS: u32 = 2048;

/// A closed interval with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Bracket {
    pub fn exact(v: BigRational) -> Self {
        Self { lo: v.clone(), hi: v }
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.midpoint())
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Bracket around `x = a + b·√2`.
    pub fn from_surd(x: &Surd, bits: u32) -> Self {
        if x.is_rational() {
            return Self::exact(x.rational_part().clone());
        }
        let root = (BigInt::from(2) << (2 * bits as u64)).sqrt();
        let den = BigInt::one() << bits;
        let sqrt2 = Self { lo: BigRational::new(root.clone(), den.clone()), hi: BigRational::new(root + 1, den) };
        sqrt2.scale(x.radical_part()).add(&Self::exact(x.rational_part().clone()))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let (a, b) = (&self.lo * r, &self.hi * r);
        if r.is_negative() {
            Self { lo: b, hi: a }
        } else {
            Self { lo: a, hi: b }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let products = [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        let lo = products.iter().min().expect("non-empty").clone();
        let hi = products.iter().max().expect("non-empty").clone();
        Self { lo, hi }
    }

    fn from_scaled(v: &BigInt, err_units: u32, bits: u32) -> Self {
        let den = BigInt::one() << bits;
        let e = BigInt::from(err_units);
        Self {
            lo: BigRational::new(v - &e, den.clone()),
            hi: BigRational::new(v + e, den),
        }
    }

    pub fn square(&self) -> Self {
        let lo_abs = self.lo.abs();
        let hi_abs = self.hi.abs();
        let straddles = self.lo.is_negative() && self.hi.is_positive();
        let max = if lo_abs > hi_abs { lo_abs.clone() } else { hi_abs.clone() };
        let min = if straddles { BigRational::zero() } else if lo_abs < hi_abs { lo_abs } else { hi_abs };
        Self { lo: &min * &min, hi: &max * &max }
    }
}

fn atan_inv_scaled(x: u32, w: u32) -> BigInt {
    // atan(1/x) = Σ (-1)^k / ((2k+1) x^(2k+1))
    let one = BigInt::one() << w;
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = &one / &x;
    let mut sum = BigInt::zero();
    let mut k: u32 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

fn compute_pi_scaled(w: u32) -> BigInt {
    let ww = w + 32;
    let pi = BigInt::from(16) * atan_inv_scaled(5, ww) - BigInt::from(4) * atan_inv_scaled(239, ww);
    pi >> 32
}

/// `π·2^w`, error below 2 units.
pub fn pi_scaled(w: u32) -> BigInt {
    static CACHE: OnceLock<BigInt> = OnceLock::new();
    if w <= PI_CACHE_BITS {
        let full = CACHE.get_or_init(|| compute_pi_scaled(PI_CACHE_BITS));
        full >> (PI_CACHE_BITS - w)
    } else {
        compute_pi_scaled(w)
    }
}

/// `frac(t·√2/2)·2^w` (the angle `t·√2·π` as a fraction of a full turn),
/// truncated; error below one unit.
fn turn_fraction(t: i64, w: u32) -> BigInt {
    let mag = BigInt::from(t.unsigned_abs());
    let root = ((BigInt::from(2) * &mag * &mag) << (2 * (w as u64 - 1))).sqrt();
    let mask = (BigInt::one() << w) - 1;
    let frac = root & &mask;
    if t < 0 && !frac.is_zero() {
        (BigInt::one() << w) - frac
    } else {
        frac
    }
}

/// `(sin φ, cos φ)·2^w` for `φ = r·2^-w · π/2`, `0 <= r < 2^w`.
fn sin_cos_quarter(r: &BigInt, w: u32) -> (BigInt, BigInt) {
    let phi = (r * pi_scaled(w)) >> (w + 1);
    let phi2 = (&phi * &phi) >> w;
    let one = BigInt::one() << w;

    let mut sin = BigInt::zero();
    let mut term = phi.clone();
    let mut k: u64 = 0;
    while !term.is_zero() {
        if k % 2 == 0 {
            sin += &term;
        } else {
            sin -= &term;
        }
        term = ((&term * &phi2) >> w) / BigInt::from((2 * k + 2) * (2 * k + 3));
        k += 1;
    }

    let mut cos = BigInt::zero();
    let mut term = one;
    let mut k: u64 = 0;
    while !term.is_zero() {
        if k % 2 == 0 {
            cos += &term;
        } else {
            cos -= &term;
        }
        term = ((&term * &phi2) >> w) / BigInt::from((2 * k + 1) * (2 * k + 2));
        k += 1;
    }
    (sin, cos)
}

/// Brackets for `sin(t·√2·π)` and `cos(t·√2·π)` of width at most `2^-(bits-2)`.
pub fn sin_cos_sqrt2_pi(t: i64, bits: u32) -> (Bracket, Bracket) {
    if t == 0 {
        return (Bracket::exact(BigRational::zero()), Bracket::exact(BigRational::one()));
    }
    let w = bits + GUARD;
    let x = turn_fraction(t, w);
    let quadrant = (&x >> (w - 2)).iter_u32_digits().next().unwrap_or(0) & 3;
    let r = (&x << 2u32) & ((BigInt::one() << w) - 1);
    let (s, c) = sin_cos_quarter(&r, w);
    let (s, c) = match quadrant {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    };
    // Accumulated truncation error is far below 2^GUARD units at scale w;
    // rescale to `bits` and widen by two units.
    let shift = GUARD;
    let s = s >> shift;
    let c = c >> shift;
    (Bracket::from_scaled(&s, 2, bits), Bracket::from_scaled(&c, 2, bits))
}

/// Bracket for `sin²(t·√2·π)`.
pub fn sin_sq_sqrt2_pi(t: i64, bits: u32) -> Bracket {
    sin_cos_sqrt2_pi(t, bits).0.square()
}

/// `(cos, sin)` of `t·√2·π` as `f64`, correctly reduced for any `t`.
pub fn cos_sin_f64(t: i64) -> (f64, f64) {
    let (s, c) = sin_cos_sqrt2_pi(t, 96);
    (c.to_f64(), s.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        // ⌊π·2^64⌋
        let p = pi_scaled(64);
        assert_eq!(p.to_string(), "57952155664616982739");
    }

    #[test]
    fn small_multiples_match_f64() {
        for t in -50i64..=50 {
            let (s, c) = sin_cos_sqrt2_pi(t, 128);
            let angle = t as f64 * std::f64::consts::SQRT_2 * std::f64::consts::PI;
            assert!((s.to_f64() - angle.sin()).abs() < 1e-12, "sin t={t}");
            assert!((c.to_f64() - angle.cos()).abs() < 1e-12, "cos t={t}");
        }
    }

    #[test]
    fn reference_values() {
        // Reference values computed independently at 200-bit precision.
        let one = sin_sq_sqrt2_pi(1, 128).to_f64();
        assert!((one - 0.929_108_092_834_408_8).abs() < 1e-15);
        let five = sin_sq_sqrt2_pi(5, 128).to_f64();
        assert!((five - 0.049_024_977_469_445_87).abs() < 1e-15);
    }

    #[test]
    fn bracket_is_tight_and_ordered() {
        let b = sin_sq_sqrt2_pi(12345, 128);
        assert!(b.lo <= b.hi);
        assert!(b.width() < BigRational::new(1.into(), BigInt::one() << 120));
    }

    #[test]
    fn pythagoras() {
        for t in [1i64, 7, -3, 1 << 30] {
            let (s, c) = sin_cos_sqrt2_pi(t, 128);
            let sum = s.square().midpoint() + c.square().midpoint();
            let err = (sum - BigRational::one()).abs();
            assert!(err < BigRational::new(1.into(), BigInt::one() << 100));
        }
    }
}
