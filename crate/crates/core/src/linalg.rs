//! Exact integer linear algebra for the palindrome construction.
//!
//! Unit vectors reachable from `(1,0,0)` under `A/5`, `B/5` and their inverses
//! have the form `5^-e·(a,b,c)` with integer `a,b,c`; [`ScaledVec3`] stores
//! exactly that, so every amplitude is exact no matter how long the word.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type IntVec3 = [BigInt; 3];

pub fn int_vec(a: i64, b: i64, c: i64) -> IntVec3 {
    [a.into(), b.into(), c.into()]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatrixTag {
    A,
    B,
    AInv,
    BInv,
}

impl MatrixTag {
    pub fn inverse(self) -> Self {
        match self {
            MatrixTag::A => MatrixTag::AInv,
            MatrixTag::B => MatrixTag::BInv,
            MatrixTag::AInv => MatrixTag::A,
            MatrixTag::BInv => MatrixTag::B,
        }
    }
}

impl fmt::Display for MatrixTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixTag::A => "A",
            MatrixTag::B => "B",
            MatrixTag::AInv => "A_inv",
            MatrixTag::BInv => "B_inv",
        })
    }
}

/// An integer matrix `M` standing for the orthogonal map `M/5`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedMatrix {
    pub tag: MatrixTag,
    pub entries: [[i64; 3]; 3],
}

pub const A_ENTRIES: [[i64; 3]; 3] = [[4, 3, 0], [-3, 4, 0], [0, 0, 5]];
pub const B_ENTRIES: [[i64; 3]; 3] = [[4, 0, 3], [0, 5, 0], [-3, 0, 4]];

fn transpose(m: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let mut t = [[0; 3]; 3];
    for (i, row) in m.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            t[j][i] = v;
        }
    }
    t
}

impl NamedMatrix {
    pub fn new(tag: MatrixTag, entries: [[i64; 3]; 3]) -> Self {
        Self { tag, entries }
    }

    pub fn of(tag: MatrixTag) -> Self {
        let entries = match tag {
            MatrixTag::A => A_ENTRIES,
            MatrixTag::B => B_ENTRIES,
            // (M/5)^-1 = Mᵀ/5 since MᵀM = 25·I.
            MatrixTag::AInv => transpose(&A_ENTRIES),
            MatrixTag::BInv => transpose(&B_ENTRIES),
        };
        Self { tag, entries }
    }

    pub fn a() -> Self {
        Self::of(MatrixTag::A)
    }

    pub fn b() -> Self {
        Self::of(MatrixTag::B)
    }

    /// The matrix standing for the inverse map: the transpose.
    pub fn inverse(&self) -> Self {
        Self { tag: self.tag.inverse(), entries: transpose(&self.entries) }
    }

    /// `MᵀM = 25·I`.
    pub fn is_scaled_orthogonal(&self) -> bool {
        (0..3).all(|i| {
            (0..3).all(|j| {
                let dot: i64 = (0..3).map(|k| self.entries[k][i] * self.entries[k][j]).sum();
                dot == if i == j { 25 } else { 0 }
            })
        })
    }

    pub fn mul_int(&self, u: &IntVec3) -> IntVec3 {
        std::array::from_fn(|i| {
            self.entries[i].iter().zip(u).map(|(&m, x)| BigInt::from(m) * x).sum()
        })
    }

    /// `M·u mod 5` on residues.
    pub fn mul_mod5(&self, u: [i64; 3]) -> [i64; 3] {
        std::array::from_fn(|i| {
            self.entries[i].iter().zip(u).map(|(&m, x)| m * x).sum::<i64>().rem_euclid(5)
        })
    }
}

/// `5^-exponent · coords`, kept in canonical form: some coordinate is not a
/// multiple of 5, or the exponent is 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScaledVec3 {
    coords: IntVec3,
    exponent: u32,
}

impl ScaledVec3 {
    pub fn new(coords: IntVec3, exponent: u32) -> Self {
        let mut v = Self { coords, exponent };
        v.canonicalize();
        v
    }

    pub fn unit_x() -> Self {
        Self { coords: int_vec(1, 0, 0), exponent: 0 }
    }

    pub fn coords(&self) -> &IntVec3 {
        &self.coords
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    fn canonicalize(&mut self) {
        let five = BigInt::from(5);
        while self.exponent > 0 && self.coords.iter().all(|c| c.is_multiple_of(&five)) {
            for c in &mut self.coords {
                *c /= &five;
            }
            self.exponent -= 1;
        }
    }

    /// `a² + b² + c² = 25^e`.
    pub fn is_unit(&self) -> bool {
        let sq: BigInt = self.coords.iter().map(|c| c * c).sum();
        sq == BigInt::from(25).pow(self.exponent)
    }

    pub fn neg(&self) -> Self {
        Self { coords: self.coords.clone().map(|c| -c), exponent: self.exponent }
    }

    /// Coordinate `i` as an exact rational.
    pub fn coord(&self, i: usize) -> BigRational {
        BigRational::new(self.coords[i].clone(), BigInt::from(5).pow(self.exponent))
    }

    pub fn to_f64(&self) -> [f64; 3] {
        std::array::from_fn(|i| crate::scalar::rational_to_f64(&self.coord(i)))
    }
}

impl fmt::Display for ScaledVec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "5^-{}·({}, {}, {})", self.exponent, self.coords[0], self.coords[1], self.coords[2])
    }
}

/// `M/5` applied to `v`, returned in canonical form.
pub fn exact_apply(m: &NamedMatrix, v: &ScaledVec3) -> ScaledVec3 {
    ScaledVec3::new(m.mul_int(&v.coords), v.exponent + 1)
}

/// Applies the matrices of `word` left to right: the first tag acts first.
pub fn apply_word<'a>(word: impl IntoIterator<Item = &'a NamedMatrix>, v: &ScaledVec3) -> ScaledVec3 {
    word.into_iter().fold(v.clone(), |acc, m| exact_apply(m, &acc))
}

/// `f(u) = 4u₁ + 3u₂ + 3u₃`.
pub fn f_value(u: &IntVec3) -> BigInt {
    BigInt::from(4) * &u[0] + BigInt::from(3) * &u[1] + BigInt::from(3) * &u[2]
}

/// Membership in `K`: `u₁ ≢ 0`, `f(u) ≢ 0`, `u₂·u₃ ≡ 0`, all mod 5.
pub fn in_k(u: &IntVec3) -> bool {
    let five = BigInt::from(5);
    let nz = |x: &BigInt| !x.mod_floor(&five).is_zero();
    nz(&u[0]) && nz(&f_value(u)) && !nz(&(&u[1] * &u[2]))
}

/// The K conditions on a residue triple mod 5.
pub fn in_k_mod5(u: [i64; 3]) -> bool {
    let r = |x: i64| x.rem_euclid(5);
    r(u[0]) != 0 && r(4 * u[0] + 3 * u[1] + 3 * u[2]) != 0 && r(u[1] * u[2]) == 0
}

/// `u₂² + u₃²` of a unit vector, exactly.
pub fn residual_norm_sq(v: &ScaledVec3) -> Result<BigRational> {
    if !v.is_unit() {
        return Err(Error::Invariant(format!("{v} is not a unit vector")));
    }
    let num = &v.coords[1] * &v.coords[1] + &v.coords[2] * &v.coords[2];
    Ok(BigRational::new(num, BigInt::from(25).pow(v.exponent)))
}

/// `25^-n` as a rational.
pub fn inverse_power_of_25(n: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(25).pow(n))
}
