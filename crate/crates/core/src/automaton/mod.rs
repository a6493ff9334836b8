//! The machine model: specifications, configurations and one-step semantics.

mod exec;
mod format;
mod spec;
mod state;
mod validate;

pub use exec::{initial_configuration, step, tape_of, Configuration, Outcome, Status, StepEvent, Verdict};
pub(crate) use exec::{moved_head, status_of};
pub use format::{parse_machine, read_machine_file, write_machine, write_machine_file, FORMAT_TAG};
pub use spec::{
    Action, ComplexMatrix, ExactMatrix, MachineBuilder, MachineSpec, Measurement, Move, NamedAction, Symbol, Target,
    Transition, Unitary,
};
pub use state::{float_norm_defect, Branches, Probability, QuantumState, Twist};
pub use validate::{validate_machine, ValidationReport, Violation, ViolationKind, UNITARITY_TOLERANCE};
