use super::{ceil_log2_inv, clamp, coin_rotation, identity, measure_q0, swap01, COIN, ID, MEASURE, SWAP};
use crate::automaton::{Action, MachineBuilder, MachineSpec, Move, Symbol, Unitary};
use crate::error::Result;

/// Error bound and the derived number of final coin flips.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnbnParams {
    pub epsilon: f64,
    /// `1 + ⌈log₂(1/ε)⌉`.
    pub k: u32,
}

impl AnbnParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        Ok(Self { epsilon, k: 1 + ceil_log2_inv(epsilon)? })
    }
}

/// Classical state names of the aⁿbⁿ machine.
pub mod anbn_state {
    /// Classical `a*b*` check, still reading `a`s.
    pub const CHECK_A: &str = "check_a";
    /// Classical `a*b*` check, reading `b`s.
    pub const CHECK_B: &str = "check_b";
    /// Move left to `¢`, then step onto the first input square.
    pub const GOTO_FIRST: &str = "goto_first";
    /// Loop (I): rotate by `±√2·π` moving right; measures on `$`. One entry per pass.
    pub const LOOP1: &str = "loop1";
    pub const ACCEPT: &str = "accept";
    pub const REJECT: &str = "reject";

    /// Moving left to `¢` before walk `r` (1 or 2); `f = 1` while every
    /// earlier walk ended on `$`.
    pub fn seek(r: u8, f: u8) -> String {
        format!("seek{r}_f{f}")
    }

    /// Random walk `r` at the current square.
    pub fn walk(r: u8, f: u8) -> String {
        format!("walk{r}_f{f}")
    }

    pub fn walk_toss(r: u8, f: u8) -> String {
        format!("walk{r}_toss_f{f}")
    }

    pub fn walk_heads(r: u8, f: u8) -> String {
        format!("walk{r}_heads_f{f}")
    }

    pub fn walk_tails(r: u8, f: u8) -> String {
        format!("walk{r}_tails_f{f}")
    }

    /// Final coin `i`; `g = 1` while every earlier final coin was tails.
    pub fn flip(i: u32, g: u8) -> String {
        format!("flip{i}_g{g}")
    }

    pub fn toss(i: u32, g: u8) -> String {
        format!("toss{i}_g{g}")
    }

    pub fn heads(i: u32, g: u8) -> String {
        format!("heads{i}_g{g}")
    }

    pub fn tails(i: u32, g: u8) -> String {
        format!("tails{i}_g{g}")
    }
}

use anbn_state as st;

const ROT_A: &str = "rot_a";
const ROT_B: &str = "rot_b";

/// The aⁿbⁿ machine over a two-dimensional register.
pub fn build_anbn(params: &AnbnParams) -> Result<MachineSpec> {
    let k = params.k;
    let dim = 2;
    let mut b = MachineBuilder::new("anbn").quantum_states(&["q0", "q1"]).alphabet(&['a', 'b']);
    b.initial("q0", st::CHECK_A);
    b.accepting(st::ACCEPT);
    b.rejecting(st::REJECT);
    b.pass_state(st::LOOP1);
    b.meta("k", k);
    b.meta("epsilon", params.epsilon);
    b.action(ID, identity(dim));
    b.action(ROT_A, Action::Unitary(Unitary::Rotation { plane: (0, 1), multiple: 1 }));
    b.action(ROT_B, Action::Unitary(Unitary::Rotation { plane: (0, 1), multiple: -1 }));
    b.action(MEASURE, measure_q0(dim));
    b.action(COIN, coin_rotation(dim));
    b.action(SWAP, swap01(dim));

    let a = Symbol::Letter('a');
    let bb = Symbol::Letter('b');
    let (left, right) = (Symbol::LeftEnd, Symbol::RightEnd);
    let all = [left, a, bb, right];
    let on = |b: &mut MachineBuilder, s: &str, sym: Symbol, act: &str, next: &str, m: Move| {
        b.on(s, sym, act, next, clamp(sym, m));
    };

    // Classical a*b* check, left to right.
    on(&mut b, st::CHECK_A, left, ID, st::CHECK_A, Move::Right);
    on(&mut b, st::CHECK_A, a, ID, st::CHECK_A, Move::Right);
    on(&mut b, st::CHECK_A, bb, ID, st::CHECK_B, Move::Right);
    on(&mut b, st::CHECK_A, right, ID, st::GOTO_FIRST, Move::Left);
    on(&mut b, st::CHECK_B, left, ID, st::CHECK_B, Move::Right);
    on(&mut b, st::CHECK_B, a, ID, st::REJECT, Move::Stay);
    on(&mut b, st::CHECK_B, bb, ID, st::CHECK_B, Move::Right);
    on(&mut b, st::CHECK_B, right, ID, st::GOTO_FIRST, Move::Left);

    for sym in [a, bb, right] {
        on(&mut b, st::GOTO_FIRST, sym, ID, st::GOTO_FIRST, Move::Left);
    }
    on(&mut b, st::GOTO_FIRST, left, ID, st::LOOP1, Move::Right);

    // Loop (I), then the measurement on $.
    on(&mut b, st::LOOP1, left, ID, st::LOOP1, Move::Right);
    on(&mut b, st::LOOP1, a, ROT_A, st::LOOP1, Move::Right);
    on(&mut b, st::LOOP1, bb, ROT_B, st::LOOP1, Move::Right);
    b.on_outcomes(st::LOOP1, right, MEASURE, &[(&st::seek(1, 1), Move::Left), (st::REJECT, Move::Stay)]);

    // Block (II): two random walks from the first input square, absorbed at
    // either end-marker. Each walk step is a coin flip: heads moves right,
    // tails moves left.
    for r in [1u8, 2] {
        for f in [0u8, 1] {
            let seek = st::seek(r, f);
            let walk = st::walk(r, f);
            for sym in [a, bb, right] {
                on(&mut b, &seek, sym, ID, &seek, Move::Left);
            }
            on(&mut b, &seek, left, ID, &walk, Move::Right);

            // Absorbed on the left: this walk failed.
            if r == 1 {
                on(&mut b, &walk, left, ID, &st::seek(2, 0), Move::Stay);
            } else {
                on(&mut b, &walk, left, ID, st::LOOP1, Move::Right);
            }
            // Absorbed on the right.
            match (r, f) {
                (1, _) => on(&mut b, &walk, right, ID, &st::seek(2, f), Move::Left),
                (_, 1) => on(&mut b, &walk, right, ID, &st::flip(0, 1), Move::Stay),
                _ => on(&mut b, &walk, right, ID, st::GOTO_FIRST, Move::Left),
            }
            for sym in [a, bb] {
                on(&mut b, &walk, sym, COIN, &st::walk_toss(r, f), Move::Stay);
            }
            for sym in all {
                b.on_outcomes(
                    &st::walk_toss(r, f),
                    sym,
                    MEASURE,
                    &[(&st::walk_heads(r, f), Move::Stay), (&st::walk_tails(r, f), Move::Stay)],
                );
                on(&mut b, &st::walk_heads(r, f), sym, ID, &walk, Move::Right);
                on(&mut b, &st::walk_tails(r, f), sym, SWAP, &walk, Move::Left);
            }
        }
    }

    // Both walks ended on $: k coin flips, accept iff none is heads.
    for g in [0u8, 1] {
        for i in 0..k {
            for sym in all {
                on(&mut b, &st::flip(i, g), sym, COIN, &st::toss(i, g), Move::Stay);
                b.on_outcomes(
                    &st::toss(i, g),
                    sym,
                    MEASURE,
                    &[(&st::heads(i, 0), Move::Stay), (&st::tails(i, g), Move::Stay)],
                );
                let last = i + 1 == k;
                let after = |g: u8| match (last, g) {
                    (false, _) => (st::flip(i + 1, g), Move::Stay),
                    (true, 1) => (st::ACCEPT.to_string(), Move::Stay),
                    (true, _) => (st::GOTO_FIRST.to_string(), Move::Left),
                };
                if g == 0 {
                    let (next, m) = after(0);
                    on(&mut b, &st::heads(i, 0), sym, ID, &next, m);
                }
                let (next, m) = after(g);
                on(&mut b, &st::tails(i, g), sym, SWAP, &next, m);
            }
        }
    }
    b.build()
}
