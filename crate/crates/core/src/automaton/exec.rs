use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use super::spec::{Action, MachineSpec, Symbol};
use super::state::QuantumState;
use crate::error::{Error, Result};

/// `¢ · input · $` as tape symbols.
pub fn tape_of(spec: &MachineSpec, input: &str) -> Result<Arc<[Symbol]>> {
    let mut tape = vec![Symbol::LeftEnd];
    for c in input.chars() {
        if !spec.alphabet().contains(&c) {
            return Err(Error::InvalidInput(format!(
                "symbol `{c}` is not in the alphabet {{{}}}",
                spec.alphabet().iter().map(char::to_string).collect::<Vec<_>>().join(",")
            )));
        }
        tape.push(Symbol::Letter(c));
    }
    tape.push(Symbol::RightEnd);
    Ok(tape.into())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub classical: usize,
    pub head: usize,
    pub quantum: QuantumState,
    pub steps: u64,
    pub tape: Arc<[Symbol]>,
}

impl Configuration {
    pub fn input_len(&self) -> usize {
        self.tape.len() - 2
    }

    pub fn scanned(&self) -> Symbol {
        self.tape[self.head]
    }

    pub fn status(&self, spec: &MachineSpec) -> Status {
        status_of(spec, self.classical)
    }
}

pub(crate) fn status_of(spec: &MachineSpec, state: usize) -> Status {
    if spec.accepting().contains(&state) {
        Status::Accepted
    } else if spec.rejecting().contains(&state) {
        Status::Rejected
    } else {
        Status::Running
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Running,
    Accepted,
    Rejected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Verdict {
    Accepted,
    Rejected,
    StepCapExceeded,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accepted => "accepted",
            Verdict::Rejected => "rejected",
            Verdict::StepCapExceeded => "step-cap-exceeded",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Outcome {
    pub verdict: Verdict,
    pub steps_used: u64,
    pub passes_completed: u64,
}

/// What one step did: the action applied and, for a measurement, its outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepEvent {
    pub action: usize,
    pub outcome: Option<usize>,
    pub status: Status,
}

pub fn initial_configuration(spec: &MachineSpec, input: &str) -> Result<Configuration> {
    Ok(Configuration {
        classical: spec.initial_classical(),
        head: 0,
        quantum: QuantumState::basis(spec.quantum_dim(), spec.initial_quantum()),
        steps: 0,
        tape: tape_of(spec, input)?,
    })
}

/// Moves the head per `δ`, rejecting moves that leave the tape.
pub(crate) fn moved_head(head: usize, offset: i64, tape_len: usize) -> Result<usize> {
    let next = head as i64 + offset;
    if next < 0 || next >= tape_len as i64 {
        return Err(Error::Semantics(format!("head would move from {head} to {next}, outside [0, {}]", tape_len - 1)));
    }
    Ok(next as usize)
}

/// One step: apply `Θ(s,σ)` to the register, then take the classical
/// transition. A measurement consumes one 64-bit draw from `rng`.
pub fn step(spec: &MachineSpec, config: &Configuration, rng: &mut dyn RngCore) -> Result<(Configuration, StepEvent)> {
    if config.status(spec) != Status::Running {
        return Err(Error::Semantics("configuration is terminal".into()));
    }
    let symbol = config.scanned();
    let name = &spec.classical_states()[config.classical];
    let t = spec
        .transition(config.classical, symbol)
        .ok_or_else(|| Error::Semantics(format!("no transition for ({name}, {symbol})")))?;
    let action = &spec.actions()[t.action].action;
    if t.targets.len() != action.outcome_count() {
        return Err(Error::Semantics(format!("({name}, {symbol}) has the wrong number of targets")));
    }
    let (quantum, outcome) = match action {
        Action::Unitary(u) => (config.quantum.apply(u), None),
        Action::Measurement(m) => {
            let branches = config.quantum.measure(m);
            let j = branches.select(rng.next_u64());
            let state = branches.states[j].clone().expect("selected outcome has nonzero probability");
            (state, Some(j))
        }
    };
    let target = t.targets[outcome.unwrap_or(0)];
    let head = moved_head(config.head, target.movement.offset(), config.tape.len())?;
    let next = Configuration {
        classical: target.next,
        head,
        quantum,
        steps: config.steps + 1,
        tape: config.tape.clone(),
    };
    let status = next.status(spec);
    Ok((next, StepEvent { action: t.action, outcome, status }))
}
