use std::ffi::{c_char, CStr};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use zgkn_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(zgkn_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn solve_and_read_back() {
    let mut state: *mut ZgknState = ptr::null_mut();
    let st = unsafe { zgkn_solve(1e-3, -0.3, 0.5, 0, 0, ptr::null(), &mut state) };
    assert_eq!(st, ZgknStatus::Ok, "{}", last_error());
    assert!(!state.is_null());
    let (mut e, mut l) = (0.0, 0.0);
    assert_eq!(unsafe { zgkn_state_eigenvalues(state, &mut e, &mut l) }, ZgknStatus::Ok);
    let som = (1.0f64 - 0.09).sqrt();
    assert!((e - som).abs() < 1e-3, "E = {e}");
    assert!((l + 1.0).abs() < 1e-2, "lambda = {l}");

    let label = unsafe { c_str_to_string(zgkn_state_label(state)) }.unwrap();
    assert_eq!(label, "1s1/2");
    let (mut n, mut ell, mut tj, mut k, mut m) = (0u32, 0u32, 0u32, 0i64, 0u32);
    let st = unsafe { zgkn_state_quantum_numbers(state, &mut n, &mut ell, &mut tj, &mut k, &mut m) };
    assert_eq!(st, ZgknStatus::Ok);
    assert_eq!((n, ell, tj, k, m), (1, 0, 1, -1, 0));

    let mut conv = ZgknConvergence {
        iterations: 0,
        delta_e: f64::NAN,
        residual_lambda: f64::NAN,
        residual_e: f64::NAN,
        retried: true,
        in_guaranteed_region: false,
    };
    assert_eq!(unsafe { zgkn_state_convergence(state, &mut conv) }, ZgknStatus::Ok);
    assert!(conv.iterations >= 1 && conv.delta_e <= 1e-8);
    assert!(conv.in_guaranteed_region && !conv.retried);
    unsafe { zgkn_state_free(state) };
}

#[test]
fn profile_columns() {
    let mut state: *mut ZgknState = ptr::null_mut();
    assert_eq!(unsafe { zgkn_solve(1e-3, -0.3, 0.5, 0, 0, ptr::null(), &mut state) }, ZgknStatus::Ok);
    let mut prof: *mut ZgknProfile = ptr::null_mut();
    assert_eq!(unsafe { zgkn_wave_profile(state, 40, &mut prof) }, ZgknStatus::Ok, "{}", last_error());

    let mut len = 0usize;
    let st = unsafe { zgkn_profile_column(prof, ZgknColumn::Density, ptr::null_mut(), &mut len) };
    assert_eq!(st, ZgknStatus::BufferTooSmall);
    assert_eq!(len, 81);
    let mut buf = vec![0.0; len];
    let st = unsafe { zgkn_profile_column(prof, ZgknColumn::Density, buf.as_mut_ptr(), &mut len) };
    assert_eq!(st, ZgknStatus::Ok);
    assert!(buf.iter().all(|d| d.is_finite() && *d >= 0.0));

    let (mut peak, mut rn, mut an) = (0.0, 0.0, 0.0);
    assert_eq!(unsafe { zgkn_profile_summary(prof, &mut peak, &mut rn, &mut an) }, ZgknStatus::Ok);
    assert!(peak > 0.0 && rn > 0.0 && an > 0.0);
    unsafe {
        zgkn_profile_free(prof);
        zgkn_state_free(state);
    }
}

#[test]
fn error_codes() {
    let mut state: *mut ZgknState = ptr::null_mut();
    let st = unsafe { zgkn_solve(0.1, -0.3, 0.5, -1, 0, ptr::null(), &mut state) };
    assert_eq!(st, ZgknStatus::Inadmissible);
    assert!(state.is_null());
    assert!(last_error().contains("n_omega"), "{}", last_error());

    let st = unsafe { zgkn_solve(0.1, -0.3, 0.5, 0, 0, ptr::null(), ptr::null_mut()) };
    assert_eq!(st, ZgknStatus::NullPointer);

    let opts = ZgknSolveOptions { max_iter: 0, ..zgkn_solve_options_default() };
    let st = unsafe { zgkn_solve(0.1, -0.3, 0.5, 0, 0, &opts, &mut state) };
    assert_eq!(st, ZgknStatus::InvalidArgument);

    let mut e = 0.0;
    assert_eq!(unsafe { zgkn_sommerfeld(0, 1, -0.3, &mut e) }, ZgknStatus::Inadmissible);
    assert_eq!(unsafe { zgkn_state_eigenvalues(ptr::null(), &mut e, &mut e) }, ZgknStatus::NullPointer);
    assert!(unsafe { zgkn_state_label(ptr::null()) }.is_null());
    unsafe {
        zgkn_state_free(ptr::null_mut());
        zgkn_profile_free(ptr::null_mut());
    }
}

#[test]
fn error_message_is_cleared_and_copied() {
    let mut v = 0i64;
    assert_eq!(unsafe { zgkn_angular_k(0, 0.5, &mut v) }, ZgknStatus::InvalidArgument);
    let full = last_error();
    assert!(!full.is_empty());
    let mut buf = [0 as c_char; 8];
    let n = unsafe { zgkn_copy_last_error(buf.as_mut_ptr(), buf.len()) };
    assert_eq!(n, full.len());
    let short = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned();
    assert_eq!(short, full[..7]);
    assert_eq!(unsafe { zgkn_angular_k(1, 0.5, &mut v) }, ZgknStatus::Ok);
    assert_eq!(v, -1);
    assert!(last_error().is_empty());
}

#[test]
fn oracles() {
    let mut e = 0.0;
    assert_eq!(unsafe { zgkn_sommerfeld(0, -1, -0.5, &mut e) }, ZgknStatus::Ok);
    assert!((e - 0.75f64.sqrt()).abs() < 1e-15);
    let mut l = 0.0;
    let st = unsafe { zgkn_bsw_lambda(ZgknBswConvention::Printed, 0.5, 1, 0.1, 0.5, &mut l) };
    assert_eq!(st, ZgknStatus::Ok);
    assert!((l + 1.0016667).abs() < 1e-6, "{l}");
    let st = unsafe { zgkn_bsw_lambda(ZgknBswConvention::SignCorrected, 0.5, 1, 0.1, 0.5, &mut l) };
    assert_eq!(st, ZgknStatus::Ok);
    assert!((l + 0.9335185).abs() < 1e-6, "{l}");
    assert!((zgkn_gamma_from_z(1.0) + 0.0072973525693).abs() < 1e-16);
    let v = unsafe { CStr::from_ptr(zgkn_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_declares_api() {
    let h = std::fs::read_to_string(header_dir().join("zgkn.h")).unwrap();
    for sym in [
        "ZGKN_STATUS_OK",
        "ZGKN_STATUS_NOT_CONVERGED",
        "typedef struct ZgknState ZgknState",
        "zgkn_solve(",
        "zgkn_state_free(",
        "zgkn_wave_profile(",
        "zgkn_profile_column(",
        "zgkn_sommerfeld(",
        "zgkn_last_error_message(",
    ] {
        assert!(h.contains(sym), "header lacks {sym}");
    }
}

#[test]
fn header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    let src = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c");
    let out = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header_dir())
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
