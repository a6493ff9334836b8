use num_complex::Complex64;

use super::{ceil_log2_inv, clamp, coin_rotation, identity, measure_q0, swap01, COIN, ID, MEASURE, SWAP};
use crate::automaton::{Action, ComplexMatrix, ExactMatrix, MachineBuilder, MachineSpec, Move, Symbol, Unitary};
use crate::error::Result;
use crate::linalg::{A_ENTRIES, B_ENTRIES};
use crate::zoo::qubit::{u_hat, u_hat_inverse};

/// Error bound and the derived number of coin flips per tape square.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PalindromeParams {
    pub epsilon: f64,
    /// `max{5, ⌈log₂(1/ε)⌉}`; 5 = `⌈log₂ 25⌉`.
    pub k: u32,
}

impl PalindromeParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        Ok(Self { epsilon, k: ceil_log2_inv(epsilon)?.max(5) })
    }

    /// Coin flips per square for the single-qubit variant: detection per
    /// pass drops from δ to at least δ/4, so k grows by 2.
    pub fn qubit_k(&self) -> u32 {
        self.k + 2
    }
}

/// Classical state names of the palindrome machines.
pub mod palindrome_state {
    pub const START: &str = "start";
    /// Loop (I): apply `U_σ` moving right. One entry per pass.
    pub const LOOP1: &str = "loop1";
    pub const REWIND: &str = "rewind";
    /// Loop (II): apply `U_σ⁻¹` moving right; measures on `$`.
    pub const LOOP2: &str = "loop2";
    pub const ACCEPT: &str = "accept";
    pub const REJECT: &str = "reject";

    /// About to flip coin `i` of the current square, with flag `b`.
    pub fn flip(i: u32, b: u8) -> String {
        format!("flip{i}_b{b}")
    }

    pub fn toss(i: u32, b: u8) -> String {
        format!("toss{i}_b{b}")
    }

    pub fn heads(i: u32, b: u8) -> String {
        format!("heads{i}_b{b}")
    }

    pub fn tails(i: u32, b: u8) -> String {
        format!("tails{i}_b{b}")
    }
}

use palindrome_state as st;

const U_A: &str = "U_a";
const U_B: &str = "U_b";
const U_A_INV: &str = "U_a_inv";
const U_B_INV: &str = "U_b_inv";

struct Register {
    names: Vec<&'static str>,
    u_a: Action,
    u_b: Action,
    u_a_inv: Action,
    u_b_inv: Action,
}

/// The palindrome machine over `Q = {q₀, q₁, q₂}` with `U_a = A/5`, `U_b = B/5`.
pub fn build_palindrome_3state(params: &PalindromeParams) -> Result<MachineSpec> {
    let exact = |m: &[[i64; 3]; 3]| Action::Unitary(Unitary::Exact(ExactMatrix::from_scaled_ints(m, 5)));
    let transpose = |m: &[[i64; 3]; 3]| {
        let mut t = [[0; 3]; 3];
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                t[j][i] = *v;
            }
        }
        t
    };
    let reg = Register {
        names: vec!["q0", "q1", "q2"],
        u_a: exact(&A_ENTRIES),
        u_b: exact(&B_ENTRIES),
        u_a_inv: exact(&transpose(&A_ENTRIES)),
        u_b_inv: exact(&transpose(&B_ENTRIES)),
    };
    build("palindrome3", reg, params.epsilon, params.k)
}

/// The same control structure on one qubit, with `Û_a`, `Û_b` in place of
/// `U_a`, `U_b` and `k` raised by 2.
pub fn build_palindrome_single_qubit(params: &PalindromeParams) -> Result<MachineSpec> {
    let complex = |m: [[Complex64; 2]; 2]| {
        let rows = m.iter().map(|r| r.to_vec()).collect();
        Action::Unitary(Unitary::Complex(ComplexMatrix::new(rows).expect("2x2")))
    };
    let reg = Register {
        names: vec!["0", "1"],
        u_a: complex(u_hat('a')?),
        u_b: complex(u_hat('b')?),
        u_a_inv: complex(u_hat_inverse('a')?),
        u_b_inv: complex(u_hat_inverse('b')?),
    };
    build("palindrome-qubit", reg, params.epsilon, params.qubit_k())
}

fn build(name: &str, reg: Register, epsilon: f64, k: u32) -> Result<MachineSpec> {
    let dim = reg.names.len();
    let mut b = MachineBuilder::new(name).quantum_states(&reg.names).alphabet(&['a', 'b']);
    b.initial(reg.names[0], st::START);
    b.accepting(st::ACCEPT);
    b.rejecting(st::REJECT);
    b.pass_state(st::LOOP1);
    b.meta("k", k);
    b.meta("epsilon", epsilon);
    b.action(ID, identity(dim));
    b.action(U_A, reg.u_a);
    b.action(U_B, reg.u_b);
    b.action(U_A_INV, reg.u_a_inv);
    b.action(U_B_INV, reg.u_b_inv);
    b.action(MEASURE, measure_q0(dim));
    b.action(COIN, coin_rotation(dim));
    b.action(SWAP, swap01(dim));

    let a = Symbol::Letter('a');
    let bb = Symbol::Letter('b');
    let all = [Symbol::LeftEnd, a, bb, Symbol::RightEnd];
    let on = |b: &mut MachineBuilder, s: &str, sym: Symbol, act: &str, next: &str, m: Move| {
        b.on(s, sym, act, next, clamp(sym, m));
    };

    // Start of the first pass: step onto the first input square.
    for sym in all {
        on(&mut b, st::START, sym, ID, st::LOOP1, Move::Right);
    }

    // Loop (I).
    on(&mut b, st::LOOP1, Symbol::LeftEnd, ID, st::LOOP1, Move::Right);
    on(&mut b, st::LOOP1, a, U_A, st::LOOP1, Move::Right);
    on(&mut b, st::LOOP1, bb, U_B, st::LOOP1, Move::Right);
    on(&mut b, st::LOOP1, Symbol::RightEnd, ID, st::REWIND, Move::Left);

    // Back to ¢, then one square right.
    for sym in [a, bb, Symbol::RightEnd] {
        on(&mut b, st::REWIND, sym, ID, st::REWIND, Move::Left);
    }
    on(&mut b, st::REWIND, Symbol::LeftEnd, ID, st::LOOP2, Move::Right);

    // Loop (II), then the measurement on $.
    on(&mut b, st::LOOP2, Symbol::LeftEnd, ID, st::LOOP2, Move::Right);
    on(&mut b, st::LOOP2, a, U_A_INV, st::LOOP2, Move::Right);
    on(&mut b, st::LOOP2, bb, U_B_INV, st::LOOP2, Move::Right);
    b.on_outcomes(
        st::LOOP2,
        Symbol::RightEnd,
        MEASURE,
        &[(&st::flip(0, 0), Move::Stay), (st::REJECT, Move::Stay)],
    );

    // Loop (III): on every square from $ down to the first input square,
    // k coin flips; b becomes 1 unless all of them are heads. Each flip is
    // rotate, measure, then restore |q₀⟩.
    for flag in [0u8, 1] {
        for i in 0..k {
            for sym in all {
                let flip = st::flip(i, flag);
                if i == 0 && sym == Symbol::LeftEnd {
                    // Loop (III) is over.
                    if flag == 0 {
                        on(&mut b, &flip, sym, ID, st::ACCEPT, Move::Stay);
                    } else {
                        on(&mut b, &flip, sym, ID, st::LOOP1, Move::Right);
                    }
                } else {
                    on(&mut b, &flip, sym, COIN, &st::toss(i, flag), Move::Stay);
                }
                b.on_outcomes(
                    &st::toss(i, flag),
                    sym,
                    MEASURE,
                    &[(&st::heads(i, flag), Move::Stay), (&st::tails(i, 1), Move::Stay)],
                );
                let (next_heads, next_tails, m) = if i + 1 < k {
                    (st::flip(i + 1, flag), st::flip(i + 1, 1), Move::Stay)
                } else {
                    (st::flip(0, flag), st::flip(0, 1), Move::Left)
                };
                on(&mut b, &st::heads(i, flag), sym, ID, &next_heads, m);
                if flag == 1 {
                    on(&mut b, &st::tails(i, 1), sym, SWAP, &next_tails, m);
                }
            }
        }
    }
    b.build()
}
