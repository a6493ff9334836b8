//! Simulator and analysis toolkit for two-way finite automata with quantum
//! and classical states.

pub mod analysis;
pub mod automaton;
pub mod error;
pub mod fixed;
pub mod linalg;
pub mod scalar;
pub mod sim;
pub mod zoo;

pub use error::{Error, Result};
