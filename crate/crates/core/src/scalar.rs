//! Exact real numbers of the form `a + b·√2` with rational `a`, `b`.
//!
//! This is the scalar field of the exact simulation backend. It contains the
//! rationals (so every power-of-5 amplitude of the palindrome machine) and
//! `1/√2`, which is what a fair coin built from a π/4 rotation needs.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// `rational + radical·√2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    rational: BigRational,
    radical: BigRational,
}

impl Surd {
    pub fn new(rational: BigRational, radical: BigRational) -> Self {
        Self { rational, radical }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self { rational: r, radical: BigRational::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(v.into()))
    }

    /// `1/√2 = √2/2`.
    pub fn frac_1_sqrt2() -> Self {
        Self { rational: BigRational::zero(), radical: BigRational::new(1.into(), 2.into()) }
    }

    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn radical_part(&self) -> &BigRational {
        &self.radical
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.radical.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.rational.is_one() && self.radical.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.radical.is_zero()
    }

    pub fn to_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.rational)
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.rational);
        let sb = sign_of(&self.radical);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // Opposite signs: compare a² with 2b².
        let a2 = &self.rational * &self.rational;
        let b2 = &self.radical * &self.radical * BigRational::from_integer(2.into());
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// The algebraic conjugate `a − b√2`.
    pub fn conjugate(&self) -> Self {
        Self { rational: self.rational.clone(), radical: -&self.radical }
    }

    /// Field norm `a² − 2b²`; zero only for zero.
    pub fn field_norm(&self) -> BigRational {
        &self.rational * &self.rational
            - BigRational::from_integer(2.into()) * &self.radical * &self.radical
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.field_norm();
        let c = self.conjugate();
        Some(Self { rational: c.rational / &n, radical: c.radical / n })
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Exact `⌊self⌋`.
    pub fn floor(&self) -> BigInt {
        let base = self.rational.floor().to_integer() + floor_radical(&self.radical);
        // floor(x) + floor(y) <= floor(x + y) <= floor(x) + floor(y) + 1
        let next = Surd::from_rational(BigRational::from_integer(&base + 1));
        if (self - &next).signum() >= 0 {
            base + 1
        } else {
            base
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self.clone()).floor()
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.rational) + rational_to_f64(&self.radical) * std::f64::consts::SQRT_2
    }

    /// Multiply by `2^k`.
    pub fn shl(&self, k: u32) -> Self {
        let f = BigRational::from_integer(BigInt::one() << k);
        Self { rational: &self.rational * &f, radical: &self.radical * f }
    }
}

fn sign_of(r: &BigRational) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// `⌊b·√2⌋` for rational `b`.
fn floor_radical(b: &BigRational) -> BigInt {
    if b.is_zero() {
        return BigInt::zero();
    }
    // |b|√2 = sqrt(2 n² / d²); floor(sqrt(x)) = isqrt(floor(x)).
    let two_b2 = BigRational::from_integer(2.into()) * b * b;
    let root = two_b2.floor().to_integer().sqrt();
    if b.is_positive() {
        root
    } else {
        // 2b² is never a perfect rational square, so |b|√2 is never an integer.
        -root - 1
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Large operands: scale down before dividing.
    let shift = r.denom().bits().max(r.numer().bits()).saturating_sub(900);
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// `x` with 15 significant digits in plain decimal notation.
pub fn decimal_string(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let places = (14 - magnitude).clamp(0, 60) as usize;
    format!("{x:.places$}")
}

impl Default for Surd {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<BigRational> for Surd {
    fn from(r: BigRational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for Surd {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a Surd> for &'a Surd {
            type Output = Surd;
            fn $m(self, rhs: &'a Surd) -> Surd {
                let f: fn(&Surd, &Surd) -> Surd = $body;
                f(self, rhs)
            }
        }
        impl $tr<Surd> for Surd {
            type Output = Surd;
            fn $m(self, rhs: Surd) -> Surd {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Surd> for Surd {
            type Output = Surd;
            fn $m(self, rhs: &'a Surd) -> Surd {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| Surd {
    rational: &a.rational + &b.rational,
    radical: &a.radical + &b.radical,
});
forward_binop!(Sub, sub, |a, b| Surd {
    rational: &a.rational - &b.rational,
    radical: &a.radical - &b.radical,
});
forward_binop!(Mul, mul, |a, b| {
    if b.radical.is_zero() {
        if b.rational.is_one() {
            return a.clone();
        }
        return Surd { rational: &a.rational * &b.rational, radical: &a.radical * &b.rational };
    }
    if a.radical.is_zero() {
        return Surd { rational: &a.rational * &b.rational, radical: &a.rational * &b.radical };
    }
    let two = BigRational::from_integer(2.into());
    Surd {
        rational: &a.rational * &b.rational + two * &a.radical * &b.radical,
        radical: &a.rational * &b.radical + &a.radical * &b.rational,
    }
});
forward_binop!(Div, div, |a, b| a * &b.recip().expect("division by zero surd"));

impl AddAssign<&Surd> for Surd {
    fn add_assign(&mut self, rhs: &Surd) {
        self.rational += &rhs.rational;
        self.radical += &rhs.radical;
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { rational: -self.rational, radical: -self.radical }
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -self.clone()
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Surd {
    /// `3/5`, `1/2*sqrt2`, `1/3+1/2*sqrt2`, `-1/2*sqrt2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rational.is_zero(), self.radical.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.rational)),
            (true, false) => write!(f, "{}*sqrt2", fmt_rational(&self.radical)),
            (false, false) => {
                let sep = if self.radical.is_negative() { "" } else { "+" };
                write!(f, "{}{}{}*sqrt2", fmt_rational(&self.rational), sep, fmt_rational(&self.radical))
            }
        }
    }
}

/// Parses an exact rational: integer, `p/q`, or a terminating decimal such as `0.8`.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid exact number `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        let int_val: BigInt =
            if int_digits.is_empty() { BigInt::zero() } else { int_digits.parse().map_err(|_| bad())? };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_val: BigInt = frac.parse().map_err(|_| bad())?;
        let mag = int_val * &scale + frac_val;
        let num = if negative { -mag } else { mag };
        return Ok(BigRational::new(num, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

impl FromStr for Surd {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty exact number".into()));
        }
        // Split at a top-level sign that is not the leading one.
        let bytes = compact.as_bytes();
        let split = (1..bytes.len()).rev().find(|&i| {
            (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'E'
        });
        let (first, second) = match split {
            Some(i) => (&compact[..i], Some(&compact[i..])),
            None => (compact.as_str(), None),
        };
        let mut out = Surd::zero();
        for term in std::iter::once(first).chain(second) {
            out += &parse_term(term)?;
        }
        Ok(out)
    }
}

fn parse_term(term: &str) -> Result<Surd, Error> {
    let bad = || Error::Parse(format!("invalid exact number term `{term}`"));
    let term = term.strip_prefix('+').unwrap_or(term);
    for suffix in ["*sqrt2", "sqrt2"] {
        if let Some(coef) = term.strip_suffix(suffix) {
            let coef = match coef {
                "" => BigRational::one(),
                "-" => -BigRational::one(),
                c => parse_rational(c).map_err(|_| bad())?,
            };
            return Ok(Surd::new(BigRational::zero(), coef));
        }
    }
    Ok(Surd::from_rational(parse_rational(term)?))
}

/// `⌈x · 2^64⌉` clamped to `[0, 2^64]`: the inverse-CDF threshold used to
/// compare a cumulative probability against a 64-bit uniform draw.
pub fn threshold_u64_scale(x: &Surd) -> u128 {
    let c = x.shl(64).ceil();
    if c.is_negative() {
        0
    } else {
        c.to_u128().map_or(1u128 << 64, |v| v.min(1u128 << 64))
    }
}
