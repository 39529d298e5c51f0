//! C ABI over the qudit overlap bound laboratory.
//!
//! Conventions: every fallible call returns a [`QblStatus`]; on anything but
//! `Ok` the thread-local message behind [`qbl_last_error_message`] says why.
//! Out parameters are written only on `Ok`. The sweep lives behind an opaque
//! handle that must be released with [`qbl_sweep_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qudit_bound_lab::boundary;
use qudit_bound_lab::linalg::C64;
use qudit_bound_lab::oracle;
use qudit_bound_lab::state::SchmidtSpec;
use qudit_bound_lab::sweep::{self, ConfinementReport, OverlapSample, SweepConfig, SweepStrategy};
use qudit_bound_lab::Error;

/// Outcome of an FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QblStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Arguments violate a documented precondition.
    InvalidArgument = 2,
    /// Internal failure; see the last error message.
    Failure = 3,
}

/// One point of the analytic boundary curve.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QblBoundaryPoint {
    /// Shared eigenphase parameter of the extremal configuration.
    pub phi: f64,
    /// Largest reachable overlap modulus at this overlap phase.
    pub r_max: f64,
    /// Overlap phase.
    pub overlap_phase: f64,
    /// Sector angle of the extremal configuration.
    pub theta: f64,
    /// Lagrange multiplier of the stationarity condition.
    pub lambda: f64,
}

/// One recorded overlap sample.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QblSample {
    pub index: u64,
    pub re: f64,
    pub im: f64,
    /// Modulus of the overlap.
    pub r: f64,
    /// Phase of the overlap in (-pi, pi].
    pub phi: f64,
}

/// Opaque sweep outcome: samples plus their confinement report.
pub struct QblSweep {
    samples: Vec<OverlapSample>,
    report: ConfinementReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let sanitized = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = sanitized);
}

fn fail(err: &Error) -> QblStatus {
    set_error(err.to_string());
    match err {
        Error::Io(_) | Error::Json(_) | Error::Decomposition(_) => QblStatus::Failure,
        _ => QblStatus::InvalidArgument,
    }
}

fn guarded(job: impl FnOnce() -> QblStatus) -> QblStatus {
    match catch_unwind(AssertUnwindSafe(job)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic caught at the FFI boundary".to_string());
            QblStatus::Failure
        }
    }
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qbl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent non-Ok status on this thread.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qbl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Evaluates the analytic boundary at eigenphase parameter `phi`.
///
/// # Safety
/// `out` must be valid for writing one `QblBoundaryPoint`.
#[no_mangle]
pub unsafe extern "C" fn qbl_boundary_point(
    d: u32,
    phi: f64,
    out: *mut QblBoundaryPoint,
) -> QblStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out is null".to_string());
            return QblStatus::NullArgument;
        }
        match boundary::boundary_point(d as usize, phi) {
            Ok(point) => {
                unsafe {
                    out.write(QblBoundaryPoint {
                        phi: point.phi,
                        r_max: point.r_max,
                        overlap_phase: point.overlap_phase,
                        theta: point.theta,
                        lambda: point.lambda,
                    });
                }
                QblStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Boundary of a qubit pair with concurrence `c`, parametrized by `phi`.
///
/// # Safety
/// `out_r_max` and `out_phase` must each be valid for writing one `f64`.
#[no_mangle]
pub unsafe extern "C" fn qbl_qubit_boundary_point(
    c: f64,
    phi: f64,
    out_r_max: *mut f64,
    out_phase: *mut f64,
) -> QblStatus {
    guarded(|| {
        if out_r_max.is_null() || out_phase.is_null() {
            set_error("out_r_max or out_phase is null".to_string());
            return QblStatus::NullArgument;
        }
        match boundary::qubit_boundary_point(c, phi) {
            Ok((r_max, phase)) => {
                unsafe {
                    out_r_max.write(r_max);
                    out_phase.write(phase);
                }
                QblStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Fills `out` with the `d` overlap phases where the boundary touches the
/// unit circle; `len` must be at least `d`.
///
/// # Safety
/// `out` must be valid for writing `len` values.
#[no_mangle]
pub unsafe extern "C" fn qbl_topological_phases(d: u32, out: *mut f64, len: usize) -> QblStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out is null".to_string());
            return QblStatus::NullArgument;
        }
        if len < d as usize {
            set_error(format!("buffer holds {len} values but d = {d}"));
            return QblStatus::InvalidArgument;
        }
        match boundary::topological_phases(d as usize) {
            Ok(phases) => {
                for (i, phase) in phases.iter().enumerate() {
                    unsafe { out.add(i).write(*phase) };
                }
                QblStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Tests whether the complex overlap re + i im lies inside the reachable
/// region for maximally entangled qudit pairs of dimension `d`.
///
/// # Safety
/// `out` must be valid for writing one `bool`.
#[no_mangle]
pub unsafe extern "C" fn qbl_contains(
    d: u32,
    re: f64,
    im: f64,
    tol: f64,
    out: *mut bool,
) -> QblStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out is null".to_string());
            return QblStatus::NullArgument;
        }
        match boundary::contains(d as usize, C64::new(re, im), tol) {
            Ok(inside) => {
                unsafe { out.write(inside) };
                QblStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Checks the stationarity identity of the extremal eigenphase configuration
/// at parameter `phi`.
///
/// # Safety
/// `out` must be valid for writing one `bool`.
#[no_mangle]
pub unsafe extern "C" fn qbl_verify_stationarity(
    d: u32,
    phi: f64,
    tol: f64,
    out: *mut bool,
) -> QblStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out is null".to_string());
            return QblStatus::NullArgument;
        }
        match oracle::verify_stationarity(d as usize, phi, tol) {
            Ok(holds) => {
                unsafe { out.write(holds) };
                QblStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Runs a sweep of `n` random local evolutions and checks confinement.
///
/// `strategy` is one of "haar-two-sided", "haar-one-sided", "rxrz".
/// `concurrence` selects the initial qubit entanglement; pass a negative
/// value for the maximally entangled default. On success `out` receives a
/// handle that must be freed with [`qbl_sweep_free`].
///
/// # Safety
/// `strategy` must point to a NUL-terminated string and `out` must be valid
/// for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn qbl_sweep_run(
    d: u32,
    strategy: *const c_char,
    n: u64,
    seed: u64,
    tol: f64,
    concurrence: f64,
    out: *mut *mut QblSweep,
) -> QblStatus {
    guarded(|| {
        if strategy.is_null() || out.is_null() {
            set_error("strategy or out is null".to_string());
            return QblStatus::NullArgument;
        }
        let name = match unsafe { CStr::from_ptr(strategy) }.to_str() {
            Ok(name) => name,
            Err(_) => {
                set_error("strategy is not valid UTF-8".to_string());
                return QblStatus::InvalidArgument;
            }
        };
        let run = || -> Result<QblSweep, Error> {
            let strategy: SweepStrategy = name.parse()?;
            let d = d as usize;
            let (spec, membership) = if concurrence < 0.0 {
                (SchmidtSpec::maximally_entangled(d)?, None)
            } else if d == 2 {
                (
                    SchmidtSpec::qubit_with_concurrence(concurrence)?,
                    Some(concurrence),
                )
            } else {
                return Err(Error::Contract(
                    "concurrence applies to qubit pairs only".into(),
                ));
            };
            let config = SweepConfig::new(spec, strategy, n as usize, seed, tol)?;
            let samples = sweep::run_sweep(&config)?;
            let report = sweep::check_confinement(&samples, d, membership, tol)?;
            Ok(QblSweep { samples, report })
        };
        match run() {
            Ok(sweep) => {
                unsafe { out.write(Box::into_raw(Box::new(sweep))) };
                QblStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Number of samples held by the handle; 0 for null.
///
/// # Safety
/// `handle` must be null or a live handle from [`qbl_sweep_run`].
#[no_mangle]
pub unsafe extern "C" fn qbl_sweep_len(handle: *const QblSweep) -> u64 {
    if handle.is_null() {
        return 0;
    }
    unsafe { &*handle }.samples.len() as u64
}

/// Copies sample `index` out of the handle.
///
/// # Safety
/// `handle` must be null or a live handle from [`qbl_sweep_run`]; `out`
/// must be valid for writing one `QblSample`.
#[no_mangle]
pub unsafe extern "C" fn qbl_sweep_sample(
    handle: *const QblSweep,
    index: u64,
    out: *mut QblSample,
) -> QblStatus {
    guarded(|| {
        if handle.is_null() || out.is_null() {
            set_error("handle or out is null".to_string());
            return QblStatus::NullArgument;
        }
        let sweep = unsafe { &*handle };
        match sweep.samples.get(index as usize) {
            Some(sample) => {
                unsafe {
                    out.write(QblSample {
                        index: sample.index as u64,
                        re: sample.value.re,
                        im: sample.value.im,
                        r: sample.modulus(),
                        phi: sample.phase(),
                    });
                }
                QblStatus::Ok
            }
            None => {
                set_error(format!(
                    "index {index} out of range for {} samples",
                    sweep.samples.len()
                ));
                QblStatus::InvalidArgument
            }
        }
    })
}

/// Number of boundary violations found by the confinement check.
///
/// # Safety
/// `handle` must be null or a live handle from [`qbl_sweep_run`].
#[no_mangle]
pub unsafe extern "C" fn qbl_sweep_violations(handle: *const QblSweep) -> u64 {
    if handle.is_null() {
        return 0;
    }
    unsafe { &*handle }.report.violations.len() as u64
}

/// Largest boundary excess over all samples; 0 when confined.
///
/// # Safety
/// `handle` must be null or a live handle from [`qbl_sweep_run`].
#[no_mangle]
pub unsafe extern "C" fn qbl_sweep_max_excess(handle: *const QblSweep) -> f64 {
    if handle.is_null() {
        return 0.0;
    }
    unsafe { &*handle }.report.max_excess
}

/// Releases a sweep handle; null is a no-op.
///
/// # Safety
/// `handle` must be null or a handle from [`qbl_sweep_run`] that has not
/// been freed yet; it is dead afterwards.
#[no_mangle]
pub unsafe extern "C" fn qbl_sweep_free(handle: *mut QblSweep) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}
