//! C ABI over `dirichlet-spectra`.
//!
//! Objects are opaque handles created by `ds_domain_*`/`ds_solve` and released with the
//! matching `*_free`. Every fallible call returns a `DsStatus`; on failure the message
//! is available from `ds_last_error` until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dirichlet_spectra::error::Error;
use dirichlet_spectra::gallery::{Mode, Solved};
use dirichlet_spectra::geometry::{parse_domain, presets, DomainSpec};
use dirichlet_spectra::heat::{heat_content_spectral, heat_trace};
use dirichlet_spectra::spectral::{counting_function, Request};
use dirichlet_spectra::verify::{metadata, run_case, CheckId, VerdictFile, VerifyOptions};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DsStatus {
    Ok = 0,
    /// An explicit-constant check failed or its hypotheses were not met.
    CheckFailed = 1,
    InvalidArgument = 2,
    Parse = 3,
    Computation = 4,
    Io = 5,
    Panic = 6,
}

/// Parsed domain.
pub struct DsDomain(DomainSpec);

/// Solved eigenproblem.
pub struct DsEigen(Solved);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DsStatus {
    match e.kind() {
        "parse" | "validation" | "unresolved_feature" => DsStatus::Parse,
        "precondition" => DsStatus::CheckFailed,
        "resource" | "solver" | "not_positive_definite" | "singular" | "incomplete" => DsStatus::Computation,
        "io" | "json" | "csv" => DsStatus::Io,
        _ => DsStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<DsStatus, Error>) -> DsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            DsStatus::Panic
        }
    }
}

fn invalid(msg: &str) -> Error {
    Error::Config(msg.into())
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Error> {
    if s.is_null() {
        return Err(invalid("null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| invalid("string is not UTF-8"))
}

/// Message of the last failed call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn ds_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ds_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse a domain description (`dim=2`, `rect ...`, `disc ...`, `preset ...`).
///
/// # Safety
/// `text_ptr` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_domain_parse(text_ptr: *const c_char, out: *mut *mut DsDomain) -> DsStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("null output pointer"));
        }
        let spec = parse_domain(text(text_ptr)?)?;
        *out = Box::into_raw(Box::new(DsDomain(spec)));
        Ok(DsStatus::Ok)
    })
}

/// Build a preset domain such as `dumbbell(2, 0.2)`.
///
/// # Safety
/// `expr` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_domain_preset(expr: *const c_char, out: *mut *mut DsDomain) -> DsStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("null output pointer"));
        }
        let spec = presets::preset(text(expr)?)?;
        *out = Box::into_raw(Box::new(DsDomain(spec)));
        Ok(DsStatus::Ok)
    })
}

/// # Safety
/// `domain` must come from `ds_domain_parse`/`ds_domain_preset` or be NULL.
#[no_mangle]
pub unsafe extern "C" fn ds_domain_free(domain: *mut DsDomain) {
    if !domain.is_null() {
        drop(Box::from_raw(domain));
    }
}

/// Solve on a grid of width `h`, or in closed form when `h <= 0`. A positive `count`
/// asks for that many pairs; otherwise every eigenvalue up to `tmax`.
///
/// # Safety
/// `domain` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_solve(
    domain: *const DsDomain,
    h: f64,
    count: usize,
    tmax: f64,
    out: *mut *mut DsEigen,
) -> DsStatus {
    guard(|| {
        if domain.is_null() || out.is_null() {
            return Err(invalid("null handle"));
        }
        let mode = if h > 0.0 { Mode::Grid(h) } else { Mode::Exact };
        let request = if count > 0 { Request::Count(count) } else { Request::Threshold(tmax) };
        let solved = Solved::solve((*domain).0.clone(), mode, request)?;
        *out = Box::into_raw(Box::new(DsEigen(solved)));
        Ok(DsStatus::Ok)
    })
}

/// # Safety
/// `eig` must come from `ds_solve` or be NULL.
#[no_mangle]
pub unsafe extern "C" fn ds_eigen_free(eig: *mut DsEigen) {
    if !eig.is_null() {
        drop(Box::from_raw(eig));
    }
}

/// Number of eigenpairs held; 0 for a NULL handle.
///
/// # Safety
/// `eig` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn ds_eigen_len(eig: *const DsEigen) -> usize {
    eig.as_ref().map_or(0, |e| e.0.eig.len())
}

/// Copy up to `cap` eigenvalues into `values`; returns the number copied.
///
/// # Safety
/// `values` must have room for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn ds_eigen_values(eig: *const DsEigen, values: *mut f64, cap: usize) -> usize {
    let Some(e) = eig.as_ref() else { return 0 };
    if values.is_null() {
        return 0;
    }
    let n = cap.min(e.0.eig.len());
    ptr::copy_nonoverlapping(e.0.eig.eigenvalues.as_ptr(), values, n);
    n
}

/// `L^1`, `L^2` and `L^inf` norms of eigenfunction `k` (0-based).
///
/// # Safety
/// `eig` must be a live handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ds_eigen_norms(eig: *const DsEigen, k: usize, l1: *mut f64, l2: *mut f64, linf: *mut f64) -> DsStatus {
    guard(|| {
        let e = eig.as_ref().ok_or_else(|| invalid("null handle"))?;
        if l1.is_null() || l2.is_null() || linf.is_null() {
            return Err(invalid("null output pointer"));
        }
        let n = e.0.eig.norms.get(k).ok_or_else(|| invalid("eigen index out of range"))?;
        (*l1, *l2, *linf) = (n.l1, n.l2, n.linf);
        Ok(DsStatus::Ok)
    })
}

/// `N_t`, the number of eigenvalues at or below `t`.
///
/// # Safety
/// `eig` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_counting(eig: *const DsEigen, t: f64, out: *mut usize) -> DsStatus {
    guard(|| {
        let e = eig.as_ref().ok_or_else(|| invalid("null handle"))?;
        if out.is_null() {
            return Err(invalid("null output pointer"));
        }
        *out = counting_function(&e.0.eig, t)?;
        Ok(DsStatus::Ok)
    })
}

/// Heat trace `Z(t)` and a bound on the omitted tail.
///
/// # Safety
/// `eig` must be a live handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ds_heat_trace(eig: *const DsEigen, t: f64, value: *mut f64, tail: *mut f64) -> DsStatus {
    guard(|| {
        let e = eig.as_ref().ok_or_else(|| invalid("null handle"))?;
        if value.is_null() || tail.is_null() {
            return Err(invalid("null output pointer"));
        }
        let z = heat_trace(&e.0.eig, t)?;
        (*value, *tail) = (z.value, z.bound);
        Ok(DsStatus::Ok)
    })
}

/// Heat content `Q(t)` and a bound on the omitted tail.
///
/// # Safety
/// `eig` must be a live handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ds_heat_content(eig: *const DsEigen, t: f64, value: *mut f64, tail: *mut f64) -> DsStatus {
    guard(|| {
        let e = eig.as_ref().ok_or_else(|| invalid("null handle"))?;
        if value.is_null() || tail.is_null() {
            return Err(invalid("null output pointer"));
        }
        let q = heat_content_spectral(&e.0.eig, t)?;
        (*value, *tail) = (q.value, q.bound);
        Ok(DsStatus::Ok)
    })
}

/// Run checks (comma-separated ids, or NULL for the default selection) and return the
/// verdict JSON in `*json`, to be released with `ds_string_free`. Returns
/// `DS_STATUS_CHECK_FAILED` when an explicit check fails; the JSON is still produced.
///
/// # Safety
/// `eig` must be a live handle, `checks` NULL or a NUL-terminated string, `json` valid.
#[no_mangle]
pub unsafe extern "C" fn ds_verify(eig: *mut DsEigen, checks: *const c_char, json: *mut *mut c_char) -> DsStatus {
    guard(|| {
        let e = eig.as_mut().ok_or_else(|| invalid("null handle"))?;
        if json.is_null() {
            return Err(invalid("null output pointer"));
        }
        let opts = VerifyOptions {
            checks: if checks.is_null() { None } else { Some(CheckId::parse_list(text(checks)?)?) },
            ..VerifyOptions::default()
        };
        let case = run_case(&mut e.0, &opts)?;
        let file = VerdictFile::new(vec![case], metadata("ffi"));
        *json = CString::new(file.to_json()?).map_err(|_| invalid("JSON contains NUL"))?.into_raw();
        Ok(if file.ok() { DsStatus::Ok } else { DsStatus::CheckFailed })
    })
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn ds_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
