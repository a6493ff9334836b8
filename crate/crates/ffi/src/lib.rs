//! C ABI for the qcfa simulator.
//!
//! Every function returns a [`QcfaStatus`]; on failure the message is
//! available from [`qcfa_last_error`] on the same thread. Machines are opaque
//! handles released with [`qcfa_machine_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::Arc;

use qcfa::analysis::{self, Generators, VerifyOptions};
use qcfa::automaton::{read_machine_file, Verdict};
use qcfa::scalar::rational_to_f64;
use qcfa::sim::{default_step_cap, Executor};
use qcfa::zoo::build_by_name;
use qcfa::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcfaStatus {
    Ok = 0,
    /// Null pointer, bad UTF-8 or an out-of-range parameter.
    InvalidArgument = 1,
    /// Input string not over the machine's alphabet.
    InvalidInput = 2,
    /// Malformed or invalid machine spec.
    InvalidMachine = 3,
    /// A requested computation exceeds its resource limit.
    Resource = 4,
    Io = 5,
    /// Any other library error, or a caught panic.
    Internal = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum QcfaVerdict {
    Accepted = 0,
    Rejected = 1,
    #[default]
    StepCapExceeded = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QcfaOutcome {
    pub verdict: QcfaVerdict,
    pub steps_used: u64,
    pub passes_completed: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QcfaTrialStats {
    pub trials: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub capped: u64,
    pub mean_steps: f64,
    pub variance_steps: f64,
    pub seed: u64,
}

/// Per-pass and aggregate halting probabilities as doubles.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QcfaHalting {
    pub p_rej: f64,
    pub p_acc: f64,
    /// True when `p_rej` is rational and computed exactly.
    pub p_rej_exact: bool,
    pub accept: f64,
    pub reject: f64,
    pub expected_iterations: f64,
}

/// A compiled machine.
pub struct QcfaMachine {
    executor: Executor,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QcfaStatus {
    match e {
        Error::InvalidInput(_) => QcfaStatus::InvalidInput,
        Error::InvalidSpec(_) | Error::Validation(_) | Error::Parse(_) => QcfaStatus::InvalidMachine,
        Error::Parameter(_) | Error::Domain(_) => QcfaStatus::InvalidArgument,
        Error::Resource(_) => QcfaStatus::Resource,
        Error::Io(_) => QcfaStatus::Io,
        _ => QcfaStatus::Internal,
    }
}

enum Failure {
    Arg(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QcfaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QcfaStatus::Ok
        }
        Ok(Err(Failure::Arg(msg))) => {
            set_error(msg);
            QcfaStatus::InvalidArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            QcfaStatus::Internal
        }
    }
}

/// # Safety
/// `p` must be null or a NUL-terminated string valid for the call.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Arg(format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Arg(format!("{what} is not UTF-8")))
}

/// # Safety
/// `p` must be null or a valid, aligned pointer to writable `T`.
unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::Arg(format!("{what} is null")))
}

/// # Safety
/// `m` must be null or a handle returned by this library and not yet freed.
unsafe fn machine_arg<'a>(m: *const QcfaMachine) -> Result<&'a QcfaMachine, Failure> {
    m.as_ref().ok_or_else(|| Failure::Arg("machine is null".into()))
}

fn boxed(executor: Executor) -> *mut QcfaMachine {
    Box::into_raw(Box::new(QcfaMachine { executor }))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn qcfa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qcfa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a built-in machine (`palindrome3`, `palindrome-qubit`, `anbn`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn qcfa_machine_build(name: *const c_char, epsilon: f64, out: *mut *mut QcfaMachine) -> QcfaStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let spec = build_by_name(str_arg(name, "name")?, epsilon)?;
        *out = boxed(Executor::new(Arc::new(spec))?);
        Ok(())
    })
}

/// Loads and validates a machine spec file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn qcfa_machine_load(path: *const c_char, out: *mut *mut QcfaMachine) -> QcfaStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let spec = read_machine_file(Path::new(str_arg(path, "path")?))?;
        *out = boxed(Executor::new(Arc::new(spec))?);
        Ok(())
    })
}

/// Releases a machine. Null is ignored.
///
/// # Safety
/// `m` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn qcfa_machine_free(m: *mut QcfaMachine) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of classical states.
///
/// # Safety
/// `m` must be a live handle; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn qcfa_machine_classical_states(m: *const QcfaMachine, out: *mut usize) -> QcfaStatus {
    guard(|| {
        *out_arg(out, "out")? = machine_arg(m)?.executor.spec().classical_states().len();
        Ok(())
    })
}

/// Dimension of the quantum register.
///
/// # Safety
/// `m` must be a live handle; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn qcfa_machine_quantum_dim(m: *const QcfaMachine, out: *mut usize) -> QcfaStatus {
    guard(|| {
        *out_arg(out, "out")? = machine_arg(m)?.executor.spec().quantum_dim();
        Ok(())
    })
}

/// Step cap used when 0 is passed as `step_cap`: `10⁴·(n+2)⁴`.
#[no_mangle]
pub extern "C" fn qcfa_default_step_cap(input_len: usize) -> u64 {
    default_step_cap(input_len)
}

fn cap_for(step_cap: u64, input: &str) -> u64 {
    if step_cap == 0 {
        default_step_cap(input.chars().count())
    } else {
        step_cap
    }
}

/// Runs one trial. `step_cap = 0` selects the default cap.
///
/// # Safety
/// `m` must be a live handle, `input` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qcfa_run_trial(
    m: *const QcfaMachine,
    input: *const c_char,
    seed: u64,
    step_cap: u64,
    out: *mut QcfaOutcome,
) -> QcfaStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let input = str_arg(input, "input")?;
        let o = machine_arg(m)?.executor.run_trial(input, seed, cap_for(step_cap, input))?;
        let verdict = match o.verdict {
            Verdict::Accepted => QcfaVerdict::Accepted,
            Verdict::Rejected => QcfaVerdict::Rejected,
            Verdict::StepCapExceeded => QcfaVerdict::StepCapExceeded,
        };
        *out = QcfaOutcome { verdict, steps_used: o.steps_used, passes_completed: o.passes_completed };
        Ok(())
    })
}

/// Runs `trials` seeded trials; identical to the library's `run_trials`.
///
/// # Safety
/// `m` must be a live handle, `input` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qcfa_run_trials(
    m: *const QcfaMachine,
    input: *const c_char,
    trials: u64,
    master_seed: u64,
    step_cap: u64,
    out: *mut QcfaTrialStats,
) -> QcfaStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let input = str_arg(input, "input")?;
        let s = machine_arg(m)?.executor.run_trials(input, trials, master_seed, cap_for(step_cap, input))?;
        *out = QcfaTrialStats {
            trials: s.trials,
            accepted: s.accepted,
            rejected: s.rejected,
            capped: s.capped,
            mean_steps: s.mean_steps,
            variance_steps: s.variance_steps,
            seed: s.seed,
        };
        Ok(())
    })
}

/// Closed-form halting probabilities of a built-in machine on `input`.
///
/// # Safety
/// `machine` and `input` must be NUL-terminated strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qcfa_analyze(
    machine: *const c_char,
    epsilon: f64,
    input: *const c_char,
    out: *mut QcfaHalting,
) -> QcfaStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let p = analysis::machine_pass_probs(str_arg(machine, "machine")?, epsilon, str_arg(input, "input")?)?;
        let h = analysis::aggregate_halting(&p)?;
        *out = QcfaHalting {
            p_rej: rational_to_f64(&p.p_rej),
            p_acc: rational_to_f64(&p.p_acc),
            p_rej_exact: p.p_rej_is_exact(),
            accept: rational_to_f64(&h.accept),
            reject: rational_to_f64(&h.reject),
            expected_iterations: rational_to_f64(&h.expected_iterations),
        };
        Ok(())
    })
}

/// Runs all lemma checks with word length up to `n_max` (at most 8) and
/// stores whether every check passed.
///
/// # Safety
/// `all_passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcfa_verify(n_max: u32, all_passed: *mut bool) -> QcfaStatus {
    guard(|| {
        let out = out_arg(all_passed, "all_passed")?;
        let opts = VerifyOptions { n_max, ..VerifyOptions::default() };
        *out = analysis::verify_all(&Generators::standard(), &opts)?.iter().all(|r| r.passed);
        Ok(())
    })
}
