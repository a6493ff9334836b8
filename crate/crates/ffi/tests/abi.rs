use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use qcfa_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn build(name: &str, eps: f64) -> *mut QcfaMachine {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { qcfa_machine_build(c(name).as_ptr(), eps, &mut m) }, QcfaStatus::Ok);
    assert!(!m.is_null());
    m
}

fn last_error() -> String {
    let p = qcfa_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn build_query_and_free() {
    let m = build("palindrome3", 0.01);
    let (mut dim, mut states) = (0, 0);
    unsafe {
        assert_eq!(qcfa_machine_quantum_dim(m, &mut dim), QcfaStatus::Ok);
        assert_eq!(qcfa_machine_classical_states(m, &mut states), QcfaStatus::Ok);
        qcfa_machine_free(m);
        qcfa_machine_free(ptr::null_mut());
    }
    assert_eq!(dim, 3);
    assert!(states > 10);
    assert!(qcfa_last_error().is_null());
}

#[test]
fn errors_have_codes_and_messages() {
    let mut m = ptr::null_mut();
    let s = unsafe { qcfa_machine_build(c("foo").as_ptr(), 0.1, &mut m) };
    assert_eq!(s, QcfaStatus::InvalidArgument);
    assert!(m.is_null());
    assert!(last_error().contains("foo"));

    assert_eq!(unsafe { qcfa_machine_build(ptr::null(), 0.1, &mut m) }, QcfaStatus::InvalidArgument);
    assert_eq!(unsafe { qcfa_machine_build(c("anbn").as_ptr(), 0.1, ptr::null_mut()) }, QcfaStatus::InvalidArgument);
    assert_eq!(unsafe { qcfa_machine_load(c("/nonexistent/m.toml").as_ptr(), &mut m) }, QcfaStatus::Io);

    let m = build("anbn", 0.1);
    let mut o = QcfaOutcome::default();
    assert_eq!(unsafe { qcfa_run_trial(m, c("abc").as_ptr(), 1, 0, &mut o) }, QcfaStatus::InvalidInput);
    assert!(last_error().contains("invalid input"));
    let mut ok = false;
    assert_eq!(unsafe { qcfa_verify(9, &mut ok) }, QcfaStatus::Resource);
    unsafe { qcfa_machine_free(m) };
}

#[test]
fn runs_match_the_library() {
    let m = build("anbn", 0.1);
    let mut o = QcfaOutcome::default();
    assert_eq!(unsafe { qcfa_run_trial(m, c("ba").as_ptr(), 9, 0, &mut o) }, QcfaStatus::Ok);
    assert_eq!(o.verdict, QcfaVerdict::Rejected);

    let mut s = QcfaTrialStats::default();
    assert_eq!(unsafe { qcfa_run_trials(m, c("aab").as_ptr(), 100, 4, 0, &mut s) }, QcfaStatus::Ok);
    let ex = qcfa::sim::Executor::new(std::sync::Arc::new(qcfa::zoo::build_by_name("anbn", 0.1).unwrap())).unwrap();
    let lib = ex.run_trials("aab", 100, 4, qcfa::sim::default_step_cap(3)).unwrap();
    assert_eq!((s.accepted, s.rejected, s.capped, s.mean_steps), (lib.accepted, lib.rejected, lib.capped, lib.mean_steps));
    unsafe { qcfa_machine_free(m) };
}

#[test]
fn analysis_and_verification() {
    let mut h = QcfaHalting::default();
    assert_eq!(unsafe { qcfa_analyze(c("palindrome3").as_ptr(), 0.5, c("ab").as_ptr(), &mut h) }, QcfaStatus::Ok);
    assert_eq!(h.p_rej, 11169.0 / 390625.0);
    assert!(h.p_rej_exact);
    assert!((h.accept + h.reject - 1.0).abs() < 1e-15);
    assert_eq!(unsafe { qcfa_analyze(c("anbn").as_ptr(), 0.1, c("aab").as_ptr(), &mut h) }, QcfaStatus::Ok);
    assert!(!h.p_rej_exact);
    let mut ok = false;
    assert_eq!(unsafe { qcfa_verify(3, &mut ok) }, QcfaStatus::Ok);
    assert!(ok);
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/qcfa.h")).unwrap();
    for name in [
        "qcfa_machine_build",
        "qcfa_machine_load",
        "qcfa_machine_free",
        "qcfa_run_trial",
        "qcfa_run_trials",
        "qcfa_analyze",
        "qcfa_verify",
        "qcfa_last_error",
        "typedef struct QcfaMachine QcfaMachine",
        "QCFA_STATUS_RESOURCE = 4",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// Compiles and runs a C program against the header and static library when
/// a C compiler and the archive are available.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir: PathBuf = exe.parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libqcfa_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or {} not built", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "qcfa.h"
int main(void) {
    QcfaMachine *m = NULL;
    if (qcfa_machine_build("palindrome3", 0.5, &m) != QCFA_STATUS_OK) return 1;
    QcfaTrialStats s;
    if (qcfa_run_trials(m, "aba", 10, 1, 100000, &s) != QCFA_STATUS_OK) return 2;
    qcfa_machine_free(m);
    if (qcfa_machine_build("nope", 0.5, &m) != QCFA_STATUS_INVALID_ARGUMENT) return 3;
    printf("%llu %llu %s\n", (unsigned long long)s.trials, (unsigned long long)s.rejected, qcfa_last_error() ? "err" : "none");
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("smoke");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{:?}", out);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "10 0 err");
}
