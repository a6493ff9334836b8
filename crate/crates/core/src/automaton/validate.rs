use std::collections::BTreeSet;
use std::fmt;

use super::spec::{Action, MachineSpec, Measurement, Move, Symbol, Unitary};
use super::state::check_projectors;

/// Largest tolerated entry of `U†U − I` for floating-point unitaries.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    HaltingOverlap,
    MissingTransition,
    TransitionFromHalting,
    OutcomeCount,
    MarkerMove,
    NotUnitary,
    BadMeasurement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, message: String) {
        self.violations.push(Violation { kind, message });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "- {v}")?;
        }
        Ok(())
    }
}

pub fn validate_machine(spec: &MachineSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let names = spec.classical_states();

    for s in spec.accepting().intersection(spec.rejecting()) {
        report.push(ViolationKind::HaltingOverlap, format!("state `{}` is both accepting and rejecting", names[*s]));
    }

    for (s, name) in names.iter().enumerate() {
        for symbol in spec.tape_alphabet() {
            let t = spec.transition(s, symbol);
            match (spec.is_halting(s), t) {
                (false, None) => report.push(
                    ViolationKind::MissingTransition,
                    format!("no transition for ({name}, {symbol})"),
                ),
                (true, Some(_)) => report.push(
                    ViolationKind::TransitionFromHalting,
                    format!("halting state has a transition for ({name}, {symbol})"),
                ),
                _ => {}
            }
        }
    }

    for (&(s, symbol), t) in spec.transitions() {
        let pair = format!("({}, {symbol})", names[s]);
        let action = &spec.actions()[t.action];
        let expected = action.action.outcome_count();
        if t.targets.len() != expected {
            report.push(
                ViolationKind::OutcomeCount,
                format!("{pair} action `{}` has {expected} outcome(s) but {} target(s)", action.name, t.targets.len()),
            );
        }
        for target in &t.targets {
            match (symbol, target.movement) {
                (Symbol::LeftEnd, Move::Left) => report.push(
                    ViolationKind::MarkerMove,
                    format!("{pair} moves the head left on the left end-marker"),
                ),
                (Symbol::RightEnd, Move::Right) => report.push(
                    ViolationKind::MarkerMove,
                    format!("{pair} moves the head right on the right end-marker"),
                ),
                _ => {}
            }
        }
    }

    for a in spec.actions() {
        match &a.action {
            Action::Unitary(Unitary::Exact(m)) => {
                if !m.is_orthogonal() {
                    report.push(ViolationKind::NotUnitary, format!("action `{}`: U†U ≠ I", a.name));
                }
            }
            Action::Unitary(Unitary::Complex(m)) => {
                let defect = m.unitarity_defect();
                if defect.is_nan() || defect >= UNITARITY_TOLERANCE {
                    report.push(
                        ViolationKind::NotUnitary,
                        format!("action `{}`: U†U deviates from I by {defect:e}", a.name),
                    );
                }
            }
            Action::Unitary(Unitary::Rotation { plane: (p, q), .. }) => {
                if p == q {
                    report.push(ViolationKind::NotUnitary, format!("action `{}`: rotation plane is degenerate", a.name));
                }
            }
            Action::Measurement(Measurement::Basis(parts)) => {
                let mut seen = BTreeSet::new();
                let mut ok = !parts.is_empty();
                for &i in parts.iter().flatten() {
                    ok &= seen.insert(i);
                }
                ok &= seen.len() == spec.quantum_dim();
                if !ok {
                    report.push(
                        ViolationKind::BadMeasurement,
                        format!("action `{}`: outcomes do not partition the quantum states", a.name),
                    );
                }
            }
            Action::Measurement(Measurement::Projectors(ps)) => {
                if let Err(e) = check_projectors(ps) {
                    report.push(ViolationKind::BadMeasurement, format!("action `{}`: {e}", a.name));
                }
            }
        }
    }
    report
}
