//! Builders for the palindrome machines and the aⁿbⁿ machine.

mod anbn;
mod palindrome;
mod qubit;

pub use anbn::{anbn_state, build_anbn, AnbnParams};
pub use palindrome::{build_palindrome_3state, build_palindrome_single_qubit, palindrome_state, PalindromeParams};
pub use qubit::{phi_map, u_hat, QubitState};

use crate::automaton::{Action, ExactMatrix, MachineSpec, Measurement, Move, Symbol, Unitary};
use crate::error::{Error, Result};
use crate::scalar::Surd;

/// Names accepted by [`build_by_name`].
pub const MACHINE_NAMES: [&str; 3] = ["palindrome3", "palindrome-qubit", "anbn"];

/// Builds one of [`MACHINE_NAMES`] for the given error bound.
pub fn build_by_name(name: &str, epsilon: f64) -> Result<MachineSpec> {
    match name {
        "palindrome3" => build_palindrome_3state(&PalindromeParams::new(epsilon)?),
        "palindrome-qubit" => build_palindrome_single_qubit(&PalindromeParams::new(epsilon)?),
        "anbn" => build_anbn(&AnbnParams::new(epsilon)?),
        other => Err(Error::Parameter(format!(
            "unknown machine `{other}` (expected one of {})",
            MACHINE_NAMES.join(", ")
        ))),
    }
}

/// `⌈log₂(1/ε)⌉`: the least `j ≥ 0` with `ε·2^j ≥ 1`, computed exactly on
/// the binary value of `ε`.
pub fn ceil_log2_inv(epsilon: f64) -> Result<u32> {
    check_epsilon(epsilon)?;
    let mut j = 0;
    let mut x = epsilon;
    while x < 1.0 {
        x *= 2.0;
        j += 1;
    }
    Ok(j)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("epsilon must lie in (0, 1), got {epsilon}")))
    }
}

/// Replaces a move that would leave the tape by `Stay`. Only used for
/// transitions the machines never take.
fn clamp(symbol: Symbol, m: Move) -> Move {
    match (symbol, m) {
        (Symbol::LeftEnd, Move::Left) | (Symbol::RightEnd, Move::Right) => Move::Stay,
        _ => m,
    }
}

/// Swap of `|q₀⟩` and `|q₁⟩` on a register of dimension `dim`.
fn swap01(dim: usize) -> Action {
    let rows = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let one = match i {
                        0 => j == 1,
                        1 => j == 0,
                        _ => i == j,
                    };
                    if one {
                        Surd::one()
                    } else {
                        Surd::zero()
                    }
                })
                .collect()
        })
        .collect();
    Action::Unitary(Unitary::Exact(ExactMatrix::new(rows).expect("square")))
}

/// Rotation by π/4 in the `(q₀, q₁)` plane: `|q₀⟩ ↦ (|q₀⟩ + |q₁⟩)/√2`.
fn coin_rotation(dim: usize) -> Action {
    let h = Surd::frac_1_sqrt2();
    let rows = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| match (i, j) {
                    (0, 0) | (1, 0) | (1, 1) => h.clone(),
                    (0, 1) => -&h,
                    _ if i == j => Surd::one(),
                    _ => Surd::zero(),
                })
                .collect()
        })
        .collect();
    Action::Unitary(Unitary::Exact(ExactMatrix::new(rows).expect("square")))
}

/// Basis measurement `{q₀}` versus the rest.
fn measure_q0(dim: usize) -> Action {
    Action::Measurement(Measurement::Basis(vec![vec![0], (1..dim).collect()]))
}

fn identity(dim: usize) -> Action {
    Action::Unitary(Unitary::identity(dim))
}

pub(crate) const ID: &str = "I";
pub(crate) const COIN: &str = "coin";
pub(crate) const MEASURE: &str = "measure";
pub(crate) const SWAP: &str = "X01";
