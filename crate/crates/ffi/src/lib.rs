//! C ABI over `casimir-core`.
//!
//! Contexts and results are opaque heap handles released with their `_free`
//! functions. Every fallible call returns a [`CasimirStatus`]; the message of
//! the last failure on the calling thread is available from
//! [`casimir_last_error`]. Strings returned by this library must be released
//! with [`casimir_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use casimir_core::oracle::{extract_constant, verify_neumann_negativity, CutoffGrid};
use casimir_core::{energy, to_sig_digits, BoundaryCondition, EnergyResult, Error, PrecisionContext};

pub const CASIMIR_BC_DIRICHLET: u32 = 0;
pub const CASIMIR_BC_NEUMANN: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CasimirStatus {
    Ok = 0,
    InvalidArgument = 1,
    InsufficientPrecision = 2,
    IllConditioned = 3,
    Numerical = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Precision settings (opaque).
pub struct CasimirContext {
    inner: PrecisionContext,
}

/// One evaluated energy (opaque).
pub struct CasimirResult {
    inner: EnergyResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> CasimirStatus {
    match e {
        Error::InvalidArgument(_) => CasimirStatus::InvalidArgument,
        Error::InsufficientPrecision { .. } => CasimirStatus::InsufficientPrecision,
        Error::IllConditioned { .. } => CasimirStatus::IllConditioned,
        Error::Numerical(_) => CasimirStatus::Numerical,
    }
}

fn guarded(f: impl FnOnce() -> Result<(), CasimirStatus>) -> CasimirStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CasimirStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            CasimirStatus::Panic
        }
    }
}

fn fail(e: Error) -> CasimirStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> CasimirStatus {
    set_error(format!("{what} is null"));
    CasimirStatus::NullPointer
}

fn bc_from(bc: u32) -> Result<BoundaryCondition, CasimirStatus> {
    match bc {
        CASIMIR_BC_DIRICHLET => Ok(BoundaryCondition::Dirichlet),
        CASIMIR_BC_NEUMANN => Ok(BoundaryCondition::Neumann),
        other => {
            set_error(format!("unknown boundary condition {other}"));
            Err(CasimirStatus::InvalidArgument)
        }
    }
}

/// Creates a context; `target_digits` must be at least 10.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn casimir_context_new(
    target_digits: u32,
    guard_digits: u32,
    out: *mut *mut CasimirContext,
) -> CasimirStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = PrecisionContext::with_guard(target_digits, guard_digits).map_err(fail)?;
        *out = Box::into_raw(Box::new(CasimirContext { inner }));
        Ok(())
    })
}

/// # Safety
/// `ctx` must be null or a pointer from [`casimir_context_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn casimir_context_free(ctx: *mut CasimirContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Evaluates the energy for boundary condition `bc` (`CASIMIR_BC_*`).
///
/// # Safety
/// `ctx` must be a live context; `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn casimir_energy(
    ctx: *const CasimirContext,
    bc: u32,
    dimension: u32,
    out: *mut *mut CasimirResult,
) -> CasimirStatus {
    guarded(|| {
        if ctx.is_null() {
            return Err(null("ctx"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let bc = bc_from(bc)?;
        let inner = energy::energy(bc, dimension, &(*ctx).inner).map_err(fail)?;
        *out = Box::into_raw(Box::new(CasimirResult { inner }));
        Ok(())
    })
}

/// # Safety
/// See [`casimir_energy`].
#[no_mangle]
pub unsafe extern "C" fn casimir_dirichlet_energy(
    ctx: *const CasimirContext,
    dimension: u32,
    out: *mut *mut CasimirResult,
) -> CasimirStatus {
    casimir_energy(ctx, CASIMIR_BC_DIRICHLET, dimension, out)
}

/// # Safety
/// See [`casimir_energy`].
#[no_mangle]
pub unsafe extern "C" fn casimir_neumann_energy(
    ctx: *const CasimirContext,
    dimension: u32,
    out: *mut *mut CasimirResult,
) -> CasimirStatus {
    casimir_energy(ctx, CASIMIR_BC_NEUMANN, dimension, out)
}

/// # Safety
/// `res` must be null or a pointer from an energy call not yet freed.
#[no_mangle]
pub unsafe extern "C" fn casimir_result_free(res: *mut CasimirResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// Dimension of the result, or 0 for a null handle.
///
/// # Safety
/// `res` must be null or a live result.
#[no_mangle]
pub unsafe extern "C" fn casimir_result_dimension(res: *const CasimirResult) -> u32 {
    res.as_ref().map_or(0, |r| r.inner.dimension)
}

/// +1 or -1, or 0 for a null handle.
///
/// # Safety
/// `res` must be null or a live result.
#[no_mangle]
pub unsafe extern "C" fn casimir_result_sign(res: *const CasimirResult) -> i32 {
    res.as_ref().map_or(0, |r| r.inner.value.signum())
}

/// Nearest binary64 value; NaN for a null handle.
///
/// # Safety
/// `res` must be null or a live result.
#[no_mangle]
pub unsafe extern "C" fn casimir_result_value_f64(res: *const CasimirResult) -> f64 {
    res.as_ref().map_or(f64::NAN, |r| r.inner.value.to_f64())
}

/// Decimal digits cancelled in the alternating sum; NaN for a null handle.
///
/// # Safety
/// `res` must be null or a live result.
#[no_mangle]
pub unsafe extern "C" fn casimir_result_digits_lost(res: *const CasimirResult) -> f64 {
    res.as_ref().map_or(f64::NAN, |r| r.inner.cancellation_digits_lost)
}

/// The value with `significant_digits` digits (0 = the context target), as
/// a newly allocated string; null on failure.
///
/// # Safety
/// `res` must be null or a live result.
#[no_mangle]
pub unsafe extern "C" fn casimir_result_value_string(
    res: *const CasimirResult,
    significant_digits: u32,
) -> *mut c_char {
    let Some(r) = res.as_ref() else {
        null("res");
        return ptr::null_mut();
    };
    let n = if significant_digits == 0 {
        r.inner.context.target_digits()
    } else {
        significant_digits
    };
    match to_sig_digits(&r.inner.value, n) {
        Ok(s) => CString::new(s).map_or(ptr::null_mut(), CString::into_raw),
        Err(e) => {
            fail(e);
            ptr::null_mut()
        }
    }
}

/// Exact check that the Neumann energy is negative for all D <= max_dim;
/// writes the number of violations found.
///
/// # Safety
/// `violations` must be valid for writing one `u64`.
#[no_mangle]
pub unsafe extern "C" fn casimir_verify_neumann_negativity(max_dim: u32, violations: *mut u64) -> CasimirStatus {
    guarded(|| {
        if violations.is_null() {
            return Err(null("violations"));
        }
        if max_dim == 0 {
            return Err(fail(Error::InvalidArgument("max_dim must be positive".into())));
        }
        *violations = verify_neumann_negativity(max_dim).violations.len() as u64;
        Ok(())
    })
}

/// Fits the brute-force mode sum on the default cutoff grid (D <= 3) and
/// writes the extracted constant and the worst relative residual.
///
/// # Safety
/// `ctx` must be a live context; the out pointers valid for one `double`.
#[no_mangle]
pub unsafe extern "C" fn casimir_oracle_extract(
    ctx: *const CasimirContext,
    bc: u32,
    dimension: u32,
    constant: *mut f64,
    max_relative_residual: *mut f64,
) -> CasimirStatus {
    guarded(|| {
        if ctx.is_null() {
            return Err(null("ctx"));
        }
        if constant.is_null() || max_relative_residual.is_null() {
            return Err(null("output pointer"));
        }
        let bc = bc_from(bc)?;
        let c = &(*ctx).inner;
        let grid = CutoffGrid::default_grid(c.working_digits());
        let fit = extract_constant(dimension, bc, &grid, c).map_err(fail)?;
        *constant = fit.extracted_constant.to_f64();
        *max_relative_residual = fit.max_relative_residual;
        Ok(())
    })
}

/// Message for the last failure on this thread as a newly allocated string,
/// or null if nothing has failed.
#[no_mangle]
pub extern "C" fn casimir_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .and_then(|m| CString::new(m.as_str()).ok())
            .map_or(ptr::null_mut(), CString::into_raw)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn casimir_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
