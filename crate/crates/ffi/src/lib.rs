//! C ABI for the analyzer: opaque handles, integer status codes, and
//! JSON-in/JSON-out entry points. The generated header lives in
//! `include/cournot.h`.
//!
//! Ownership rules: every `*_new`/`*_from_json` output must be released with
//! the matching `*_free`; strings returned through out-parameters must be
//! released with `cournot_string_free`. Handles are not thread-safe to mutate
//! concurrently, but all operations here take shared references, so read-only
//! use from several threads is fine.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cournot_core::analysis::{analyze_market, AnalysisConfig};
use cournot_core::dist::Distribution;
use cournot_core::equilibrium::MarketConfig;
use cournot_core::reliability::{gfr, gmrd, hazard, mrd};
use cournot_core::Error;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CournotStatus {
    Ok = 0,
    /// A pointer argument was null or a scalar argument was out of range.
    InvalidArgument = 1,
    /// JSON or parameter validation failed.
    ConfigParse = 2,
    /// The market violates the mean-exceeds-cost assumption.
    AssumptionViolated = 3,
    /// Numerical integration failed to converge.
    QuadratureFailure = 4,
    /// A numeric evaluation was undefined (outside support, zero survival,
    /// missing density, empty region).
    NumericError = 5,
    /// Shape verdicts contradicted a proven implication.
    InconsistentVerdict = 6,
    /// Filesystem access failed.
    IoError = 7,
    /// The argument was not valid UTF-8.
    Utf8Error = 8,
    /// An internal invariant was violated; the library caught a panic.
    Panic = 9,
}

fn status_of(err: &Error) -> CournotStatus {
    match err {
        Error::InvalidParameters(_) | Error::NonPositiveScale(_) | Error::ConfigParse(_) => {
            CournotStatus::ConfigParse
        }
        Error::AssumptionViolated { .. } => CournotStatus::AssumptionViolated,
        Error::QuadratureFailure { .. } => CournotStatus::QuadratureFailure,
        Error::OutOfSupport { .. }
        | Error::NonPositivePoint(_)
        | Error::ZeroSurvival(_)
        | Error::DensityNotAvailable
        | Error::EmptyRegion(_) => CournotStatus::NumericError,
        Error::InconsistentVerdict(_) => CournotStatus::InconsistentVerdict,
        Error::Io(_) => CournotStatus::IoError,
    }
}

/// Opaque demand-distribution handle.
pub struct CournotDist {
    inner: Distribution,
}

/// Opaque market handle (demand distribution, firm count, marginal cost).
pub struct CournotMarket {
    inner: MarketConfig,
}

/// Run `body` under a panic guard, writing its result through `out`.
fn guarded<T, F: FnOnce() -> Result<T, CournotStatus>>(out: *mut T, body: F) -> CournotStatus {
    if out.is_null() {
        return CournotStatus::InvalidArgument;
    }
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(value)) => {
            unsafe { out.write(value) };
            CournotStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => CournotStatus::Panic,
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, CournotStatus> {
    if ptr.is_null() {
        return Err(CournotStatus::InvalidArgument);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| CournotStatus::Utf8Error)
}

unsafe fn deref<'a, T>(ptr: *const T) -> Result<&'a T, CournotStatus> {
    unsafe { ptr.as_ref() }.ok_or(CournotStatus::InvalidArgument)
}

/// Parse a demand distribution from its JSON spec, e.g.
/// `{"family":"uniform","params":{"lo":0.0,"hi":1.0}}`.
///
/// # Safety
/// `json` must be a valid NUL-terminated C string; `out` must be a valid
/// pointer. On `Ok` the caller owns the handle and must release it with
/// [`cournot_dist_free`].
#[no_mangle]
pub unsafe extern "C" fn cournot_dist_from_json(
    json: *const c_char,
    out: *mut *mut CournotDist,
) -> CournotStatus {
    guarded(out, || {
        let text = unsafe { read_str(json) }?;
        let spec: cournot_core::dist::DistSpec =
            serde_json::from_str(text).map_err(|_| CournotStatus::ConfigParse)?;
        let dist = spec.to_distribution().map_err(|e| status_of(&e))?;
        Ok(Box::into_raw(Box::new(CournotDist { inner: dist })))
    })
}

/// Create a new handle for the distribution scaled by `factor` (> 0).
///
/// # Safety
/// `dist` must be a live handle from this library; `out` must be valid. The
/// new handle is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn cournot_dist_scale(
    dist: *const CournotDist,
    factor: f64,
    out: *mut *mut CournotDist,
) -> CournotStatus {
    guarded(out, || {
        let d = unsafe { deref(dist) }?;
        let scaled = d.inner.scale(factor).map_err(|e| status_of(&e))?;
        Ok(Box::into_raw(Box::new(CournotDist { inner: scaled })))
    })
}

/// Shared implementation for the scalar evaluators: guards the handle and
/// the argument, then applies `eval`.
unsafe fn dist_eval(
    dist: *const CournotDist,
    x: f64,
    out: *mut f64,
    eval: impl FnOnce(&Distribution, f64) -> Result<f64, CournotStatus>,
) -> CournotStatus {
    guarded(out, || {
        let d = unsafe { deref(dist) }?;
        if !x.is_finite() {
            return Err(CournotStatus::InvalidArgument);
        }
        eval(&d.inner, x)
    })
}

/// Survival function `P(D > x)`.
///
/// # Safety
/// `dist` must be a live handle from this library; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn cournot_dist_survival(
    dist: *const CournotDist,
    x: f64,
    out: *mut f64,
) -> CournotStatus {
    unsafe { dist_eval(dist, x, out, |d, x| Ok(d.survival(x))) }
}

/// Probability density at `x`; fails with `NumericError` when the
/// distribution carries no density.
///
/// # Safety
/// `dist` must be a live handle from this library; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn cournot_dist_density(
    dist: *const CournotDist,
    x: f64,
    out: *mut f64,
) -> CournotStatus {
    unsafe { dist_eval(dist, x, out, |d, x| d.density(x).ok_or(CournotStatus::NumericError)) }
}

/// Integrated survival `E[(D - x)+]`.
///
/// # Safety
/// `dist` must be a live handle from this library; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn cournot_dist_integrated_survival(
    dist: *const CournotDist,
    x: f64,
    out: *mut f64,
) -> CournotStatus {
    unsafe { dist_eval(dist, x, out, |d, x| Ok(d.integrated_survival(x))) }
}

/// Quantile at level `u` in [0, 1].
///
/// # Safety
/// `dist` must be a live handle from this library; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn cournot_dist_quantile(
    dist: *const CournotDist,
    u: f64,
    out: *mut f64,
) -> CournotStatus {
    unsafe {
        dist_eval(dist, u, out, |d, u| {
            if !(0.0..=1.0).contains(&u) {
                return Err(CournotStatus::InvalidArgument);
            }
            Ok(d.quantile(u))
        })
    }
}

/// Hazard rate `f / S` at `x` (0 inside support gaps).
///
/// # Safety
/// `dist` must be a live handle from this library; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn cournot_dist_hazard(
    dist: *const CournotDist,
    x: f64,
    out: *mut f64,
) -> CournotStatus {
    unsafe { dist_eval(dist, x, out, |d, x| hazard(d, x).map_err(|e| status_of(&e))) }
}

/// Generalized failure rate `x f / S` at `x`.
///
/// # Safety
/// `dist` must be a live handle from this library; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn cournot_dist_gfr(
    dist: *const CournotDist,
    x: f64,
    out: *mut f64,
) -> CournotStatus {
    unsafe { dist_eval(dist, x, out, |d, x| gfr(d, x).map_err(|e| status_of(&e))) }
}

/// Mean residual demand `E[D - x | D > x]` at `x >= 0`.
///
/// # Safety
/// `dist` must be a live handle from this library; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn cournot_dist_mrd(
    dist: *const CournotDist,
    x: f64,
    out: *mut f64,
) -> CournotStatus {
    unsafe {
        dist_eval(dist, x, out, |d, x| {
            if x < 0.0 {
                return Err(CournotStatus::InvalidArgument);
            }
            mrd(d, x).map_err(|e| status_of(&e))
        })
    }
}

/// Generalized mean residual demand `m(x) / x` at `x > 0`.
///
/// # Safety
/// `dist` must be a live handle from this library; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn cournot_dist_gmrd(
    dist: *const CournotDist,
    x: f64,
    out: *mut f64,
) -> CournotStatus {
    unsafe { dist_eval(dist, x, out, |d, x| gmrd(d, x).map_err(|e| status_of(&e))) }
}

/// Raw moment `E[D^k]`; writes `+inf` when the moment diverges.
///
/// # Safety
/// `dist` must be a live handle from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cournot_dist_moment(
    dist: *const CournotDist,
    k: u32,
    out: *mut f64,
) -> CournotStatus {
    guarded(out, || {
        let d = unsafe { deref(dist) }?;
        Ok(d.inner.moment(k))
    })
}

/// Mean of the distribution.
///
/// # Safety
/// `dist` must be a live handle from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cournot_dist_mean(dist: *const CournotDist, out: *mut f64) -> CournotStatus {
    guarded(out, || {
        let d = unsafe { deref(dist) }?;
        Ok(d.inner.mean())
    })
}

/// Release a distribution handle. Passing null is a no-op.
///
/// # Safety
/// `dist` must be null or a handle produced by this library that has not
/// already been freed.
#[no_mangle]
pub unsafe extern "C" fn cournot_dist_free(dist: *mut CournotDist) {
    if !dist.is_null() {
        drop(unsafe { Box::from_raw(dist) });
    }
}

/// Build a market from a demand handle (cloned into the market), a firm
/// count `n >= 1`, and a marginal cost `c >= 0` below the mean.
///
/// # Safety
/// `dist` must be a live handle; `out` must be valid. The caller owns the
/// returned handle and must release it with [`cournot_market_free`].
#[no_mangle]
pub unsafe extern "C" fn cournot_market_new(
    dist: *const CournotDist,
    n: u32,
    c: f64,
    out: *mut *mut CournotMarket,
) -> CournotStatus {
    guarded(out, || {
        let d = unsafe { deref(dist) }?;
        let market = MarketConfig::new(d.inner.clone(), n, c).map_err(|e| status_of(&e))?;
        Ok(Box::into_raw(Box::new(CournotMarket { inner: market })))
    })
}

/// The equilibrium indicator `L(X) = m(X) - c/S(X) - X/n`; equilibria are
/// its zeros in total output.
///
/// # Safety
/// `market` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cournot_market_l_value(
    market: *const CournotMarket,
    x_total: f64,
    out: *mut f64,
) -> CournotStatus {
    guarded(out, || {
        let m = unsafe { deref(market) }?;
        if !x_total.is_finite() || x_total < 0.0 {
            return Err(CournotStatus::InvalidArgument);
        }
        m.inner.l_value(x_total).map_err(|e| status_of(&e))
    })
}

/// Expected market price `E[(D - X)+]` at total output `X`.
///
/// # Safety
/// `market` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cournot_market_expected_price(
    market: *const CournotMarket,
    x_total: f64,
    out: *mut f64,
) -> CournotStatus {
    guarded(out, || {
        let m = unsafe { deref(market) }?;
        if !x_total.is_finite() || x_total < 0.0 {
            return Err(CournotStatus::InvalidArgument);
        }
        Ok(m.inner.expected_price(x_total))
    })
}

/// Release a market handle. Passing null is a no-op.
///
/// # Safety
/// `market` must be null or a handle produced by this library that has not
/// already been freed.
#[no_mangle]
pub unsafe extern "C" fn cournot_market_free(market: *mut CournotMarket) {
    if !market.is_null() {
        drop(unsafe { Box::from_raw(market) });
    }
}

/// Run the full analysis pipeline on a JSON configuration (same format as the
/// CLI) and return the JSON report. Output paths in the config are ignored;
/// no files are written.
///
/// # Safety
/// `config_json` must be a valid NUL-terminated C string; `out_report` must be
/// valid. On `Ok` the caller owns the returned string and must release it with
/// [`cournot_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cournot_analyze_json(
    config_json: *const c_char,
    out_report: *mut *mut c_char,
) -> CournotStatus {
    guarded(out_report, || {
        let text = unsafe { read_str(config_json) }?;
        let mut cfg = AnalysisConfig::from_json(text).map_err(|e| status_of(&e))?;
        cfg.outputs = Default::default();
        let report = analyze_market(&cfg).map_err(|e| status_of(&e))?;
        let json = serde_json::to_string_pretty(&report).map_err(|_| CournotStatus::Panic)?;
        let cstring = CString::new(json).map_err(|_| CournotStatus::Panic)?;
        Ok(cstring.into_raw())
    })
}

/// Release a string returned by this library. Passing null is a no-op.
///
/// # Safety
/// `s` must be null or a string produced by this library that has not already
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn cournot_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn cournot_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
