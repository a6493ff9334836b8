//! The single-qubit reduction of the palindrome machine.
//!
//! `Φ` maps a real unit vector `cos φ|q₀⟩ + sin φ sin ψ|q₁⟩ + sin φ cos ψ|q₂⟩`
//! to `e^{−iψ/2}cos(φ/2)|0⟩ + e^{iψ/2}sin(φ/2)|1⟩`. Under this map `U_a`
//! corresponds to `Û_a` and `U_b` to `Û_b` up to global phase, where the
//! half-angles satisfy `cos(θ/2) = 3/√10`, `sin(θ/2) = ±1/√10`
//! (so `cos θ = 4/5`).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `‖v‖ = 1` accepted by [`phi_map`].
pub const UNIT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState {
    pub alpha0: Complex64,
    pub alpha1: Complex64,
}

impl QubitState {
    pub fn new(alpha0: Complex64, alpha1: Complex64) -> Self {
        Self { alpha0, alpha1 }
    }

    pub fn norm_sq(&self) -> f64 {
        self.alpha0.norm_sqr() + self.alpha1.norm_sqr()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.alpha0.conj() * other.alpha0 + self.alpha1.conj() * other.alpha1
    }

    pub fn apply(&self, u: &[[Complex64; 2]; 2]) -> QubitState {
        QubitState {
            alpha0: u[0][0] * self.alpha0 + u[0][1] * self.alpha1,
            alpha1: u[1][0] * self.alpha0 + u[1][1] * self.alpha1,
        }
    }

    /// Probability of observing `|1⟩` in the `{|0⟩, |1⟩}` basis.
    pub fn prob_one(&self) -> f64 {
        self.alpha1.norm_sqr() / self.norm_sq()
    }
}

pub fn phi_map(v: [f64; 3]) -> Result<QubitState> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm.is_nan() || (norm - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::Domain(format!("phi_map needs a unit vector, got norm {norm}")));
    }
    let phi = v[0].clamp(-1.0, 1.0).acos();
    let psi = v[1].atan2(v[2]);
    let (hs, hc) = (phi / 2.0).sin_cos();
    Ok(QubitState {
        alpha0: Complex64::from_polar(hc, -psi / 2.0),
        alpha1: Complex64::from_polar(hs, psi / 2.0),
    })
}

fn half_angles() -> (f64, f64) {
    let r = 10f64.sqrt();
    (3.0 / r, 1.0 / r)
}

/// `Û_σ` as a row-major matrix.
pub fn u_hat(symbol: char) -> Result<[[Complex64; 2]; 2]> {
    let (c, s) = half_angles();
    let c = Complex64::new(c, 0.0);
    match symbol {
        // Û_a|0⟩ = c|0⟩ − i s|1⟩, Û_a|1⟩ = −i s|0⟩ + c|1⟩
        'a' => {
            let t = Complex64::new(0.0, -s);
            Ok([[c, t], [t, c]])
        }
        // Û_b|0⟩ = c|0⟩ − s|1⟩, Û_b|1⟩ = s|0⟩ + c|1⟩
        'b' => {
            let t = Complex64::new(s, 0.0);
            Ok([[c, t], [-t, c]])
        }
        other => Err(Error::Domain(format!("no qubit unitary for symbol `{other}`"))),
    }
}

/// `Û_σ⁻¹ = Û_σ†`.
pub fn u_hat_inverse(symbol: char) -> Result<[[Complex64; 2]; 2]> {
    let u = u_hat(symbol)?;
    Ok([[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]])
}
