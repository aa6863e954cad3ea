//! C ABI over the `zgkn` solver.
//!
//! Every entry point returns a [`ZgknStatus`] and writes results through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`zgkn_last_error_message`]. Solved states and wave profiles are opaque
//! handles released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use zgkn::oracles::{a0_angular_k, bsw_lambda_with, sommerfeld, BswConvention};
use zgkn::params::{ModelParams, WindingTarget, ALPHA_S};
use zgkn::solver::{solve_pair, BoundState, SolveOptions};
use zgkn::wavefunction::{wave_profile, WaveProfile};
use zgkn::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZgknStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Inadmissible = 3,
    NotConverged = 4,
    NumericalFailure = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZgknBswConvention {
    Printed = 0,
    SignCorrected = 1,
}

/// Columns of a wave profile.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZgknColumn {
    R = 0,
    BigR = 1,
    Omega = 2,
    Theta = 3,
    S = 4,
    BigTheta = 5,
    Density = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZgknSolveOptions {
    pub tol: f64,
    pub inner_tol: f64,
    pub max_iter: u32,
    pub theta_margin: f64,
}

/// Convergence diagnostics of a solved state.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZgknConvergence {
    pub iterations: u32,
    pub delta_e: f64,
    pub residual_lambda: f64,
    pub residual_e: f64,
    pub retried: bool,
    pub in_guaranteed_region: bool,
}

/// Opaque solved bound state.
pub struct ZgknState {
    inner: BoundState,
    label: CString,
}

/// Opaque radial and angular profile.
pub struct ZgknProfile {
    inner: WaveProfile,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(err: &Error) -> ZgknStatus {
    match err {
        Error::Inadmissible(_) => ZgknStatus::Inadmissible,
        Error::InvalidArgument(_) => ZgknStatus::InvalidArgument,
        Error::NotConverged { .. } => ZgknStatus::NotConverged,
        _ => ZgknStatus::NumericalFailure,
    }
}

fn fail(err: Error) -> ZgknStatus {
    set_error(err.to_string());
    status_of(&err)
}

/// Runs `f`, turning a panic into `ZGKN_STATUS_PANIC`.
fn guard(f: impl FnOnce() -> ZgknStatus) -> ZgknStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == ZgknStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => {
            set_error("internal panic");
            ZgknStatus::Panic
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(concat!("null pointer: ", stringify!($p)));
            return ZgknStatus::NullPointer;
        })+
    };
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn zgkn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static NUL-terminated crate version.
#[no_mangle]
pub extern "C" fn zgkn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `γ = −Z·α`.
#[no_mangle]
pub extern "C" fn zgkn_gamma_from_z(z: f64) -> f64 {
    -z * ALPHA_S
}

#[no_mangle]
pub extern "C" fn zgkn_solve_options_default() -> ZgknSolveOptions {
    let d = SolveOptions::default();
    ZgknSolveOptions { tol: d.tol, inner_tol: d.inner_tol, max_iter: d.max_iter as u32, theta_margin: d.theta_margin }
}

/// Solves for the bound state with windings `(n_theta, n_omega)`.
/// `options` may be null for the defaults. On success `*out` owns a new state.
///
/// # Safety
/// `out` must be valid for writes; `options`, when non-null, must point to a
/// valid `ZgknSolveOptions`.
#[no_mangle]
pub unsafe extern "C" fn zgkn_solve(
    a: f64,
    gamma: f64,
    kappa: f64,
    n_theta: i64,
    n_omega: i64,
    options: *const ZgknSolveOptions,
    out: *mut *mut ZgknState,
) -> ZgknStatus {
    guard(|| {
        non_null!(out);
        *out = ptr::null_mut();
        let mut opts = SolveOptions::default();
        if let Some(o) = options.as_ref() {
            opts.tol = o.tol;
            opts.inner_tol = o.inner_tol;
            opts.max_iter = o.max_iter as usize;
            opts.theta_margin = o.theta_margin;
        }
        let params = ModelParams::new(a, gamma, kappa);
        match solve_pair(&params, WindingTarget::new(n_theta, n_omega), &opts) {
            Ok(s) => {
                let label = CString::new(s.label.to_string()).unwrap_or_default();
                *out = Box::into_raw(Box::new(ZgknState { inner: s, label }));
                ZgknStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a state; null is ignored.
///
/// # Safety
/// `state` must be null or come from `zgkn_solve` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn zgkn_state_free(state: *mut ZgknState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle or null; `energy` and `lambda` valid for writes or null.
#[no_mangle]
pub unsafe extern "C" fn zgkn_state_eigenvalues(
    state: *const ZgknState,
    energy: *mut f64,
    lambda: *mut f64,
) -> ZgknStatus {
    guard(|| {
        non_null!(state, energy, lambda);
        let s = &(*state).inner;
        *energy = s.energy;
        *lambda = s.lambda;
        ZgknStatus::Ok
    })
}

/// # Safety
/// `state` must be a live handle or null; `out` valid for writes or null.
#[no_mangle]
pub unsafe extern "C" fn zgkn_state_convergence(state: *const ZgknState, out: *mut ZgknConvergence) -> ZgknStatus {
    guard(|| {
        non_null!(state, out);
        let s = &(*state).inner;
        let c = &s.convergence;
        *out = ZgknConvergence {
            iterations: c.iterations as u32,
            delta_e: c.delta_e,
            residual_lambda: c.residual_lambda,
            residual_e: c.residual_e,
            retried: c.retried,
            in_guaranteed_region: s.in_guaranteed_region,
        };
        ZgknStatus::Ok
    })
}

/// Spectroscopic label such as `2p1/2`, owned by the state.
///
/// # Safety
/// `state` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn zgkn_state_label(state: *const ZgknState) -> *const c_char {
    match state.as_ref() {
        Some(s) => s.label.as_ptr(),
        None => ptr::null(),
    }
}

/// Quantum numbers `(n, ℓ, k, M)` and `2j`.
///
/// # Safety
/// `state` must be a live handle or null; every out pointer valid for writes or null.
#[no_mangle]
pub unsafe extern "C" fn zgkn_state_quantum_numbers(
    state: *const ZgknState,
    n: *mut u32,
    ell: *mut u32,
    twice_j: *mut u32,
    k: *mut i64,
    big_m: *mut u32,
) -> ZgknStatus {
    guard(|| {
        non_null!(state, n, ell, twice_j, k, big_m);
        let l = &(*state).inner.label;
        *n = l.n;
        *ell = l.ell;
        *twice_j = (2.0 * l.j).round() as u32;
        *k = l.k;
        *big_m = l.big_m;
        ZgknStatus::Ok
    })
}

/// Wave profile of a solved state on `2n + 1` radial and angular points.
///
/// # Safety
/// `state` must be a live handle or null; `out` valid for writes or null.
#[no_mangle]
pub unsafe extern "C" fn zgkn_wave_profile(state: *const ZgknState, n: u32, out: *mut *mut ZgknProfile) -> ZgknStatus {
    guard(|| {
        non_null!(state, out);
        *out = ptr::null_mut();
        match wave_profile(&(*state).inner, n as usize) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(ZgknProfile { inner: p }));
                ZgknStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `profile` must be null or come from `zgkn_wave_profile` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn zgkn_profile_free(profile: *mut ZgknProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

fn column(p: &WaveProfile, c: ZgknColumn) -> &[f64] {
    match c {
        ZgknColumn::R => &p.r,
        ZgknColumn::BigR => &p.big_r,
        ZgknColumn::Omega => &p.omega,
        ZgknColumn::Theta => &p.theta,
        ZgknColumn::S => &p.s,
        ZgknColumn::BigTheta => &p.big_theta,
        ZgknColumn::Density => &p.density,
    }
}

/// Copies a column into `buf`. `*len` holds the capacity on entry and the
/// column length on return; a short buffer yields `ZGKN_STATUS_BUFFER_TOO_SMALL`
/// with nothing copied.
///
/// # Safety
/// `profile` must be a live handle or null; `len` valid for reads and writes;
/// `buf` valid for `*len` writes unless `*len` is zero.
#[no_mangle]
pub unsafe extern "C" fn zgkn_profile_column(
    profile: *const ZgknProfile,
    col: ZgknColumn,
    buf: *mut f64,
    len: *mut usize,
) -> ZgknStatus {
    guard(|| {
        non_null!(profile, len);
        let data = column(&(*profile).inner, col);
        let cap = *len;
        *len = data.len();
        if cap < data.len() {
            set_error(format!("buffer holds {cap} values, column has {}", data.len()));
            return ZgknStatus::BufferTooSmall;
        }
        non_null!(buf);
        ptr::copy_nonoverlapping(data.as_ptr(), buf, data.len());
        ZgknStatus::Ok
    })
}

/// Peak radius and the two normalization integrals of a profile.
///
/// # Safety
/// `profile` must be a live handle or null; out pointers valid for writes or null.
#[no_mangle]
pub unsafe extern "C" fn zgkn_profile_summary(
    profile: *const ZgknProfile,
    peak_r: *mut f64,
    radial_norm: *mut f64,
    angular_norm: *mut f64,
) -> ZgknStatus {
    guard(|| {
        non_null!(profile, peak_r, radial_norm, angular_norm);
        let p = &(*profile).inner;
        *peak_r = p.peak_r;
        *radial_norm = p.radial_norm;
        *angular_norm = p.angular_norm;
        ZgknStatus::Ok
    })
}

/// Sommerfeld energy for radial index `big_m` and spin-orbit number `k`.
///
/// # Safety
/// `out` must be valid for writes or null.
#[no_mangle]
pub unsafe extern "C" fn zgkn_sommerfeld(big_m: u32, k: i64, gamma: f64, out: *mut f64) -> ZgknStatus {
    guard(|| {
        non_null!(out);
        match sommerfeld(big_m, k, gamma) {
            Ok(v) => {
                *out = v;
                ZgknStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Small-a series for the angular eigenvalue.
///
/// # Safety
/// `out` must be valid for writes or null.
#[no_mangle]
pub unsafe extern "C" fn zgkn_bsw_lambda(
    convention: ZgknBswConvention,
    kappa: f64,
    big_n: i64,
    a: f64,
    energy: f64,
    out: *mut f64,
) -> ZgknStatus {
    guard(|| {
        non_null!(out);
        let conv = match convention {
            ZgknBswConvention::Printed => BswConvention::Printed,
            ZgknBswConvention::SignCorrected => BswConvention::SignCorrected,
        };
        match bsw_lambda_with(conv, kappa, big_n, a, energy) {
            Ok(v) => {
                *out = v;
                ZgknStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Spin-orbit number `k` with `λ = k` at `a = 0`.
///
/// # Safety
/// `out` must be valid for writes or null.
#[no_mangle]
pub unsafe extern "C" fn zgkn_angular_k(big_n: i64, kappa: f64, out: *mut i64) -> ZgknStatus {
    guard(|| {
        non_null!(out);
        match a0_angular_k(big_n, kappa) {
            Ok(v) => {
                *out = v;
                ZgknStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Copies the last error message into `buf` (truncated, always NUL-terminated).
/// Returns the full message length without the terminator.
///
/// # Safety
/// `buf` must be valid for `len` writes unless `len` is zero.
#[no_mangle]
pub unsafe extern "C" fn zgkn_copy_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Reads a C string for tests and callers that round-trip labels.
///
/// # Safety
/// `s` must be null or a valid NUL-terminated string.
pub unsafe fn c_str_to_string(s: *const c_char) -> Option<String> {
    if s.is_null() {
        None
    } else {
        Some(CStr::from_ptr(s).to_string_lossy().into_owned())
    }
}
