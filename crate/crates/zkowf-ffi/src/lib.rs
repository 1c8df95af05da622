//! C ABI for the experiment harness.
//!
//! The interface follows the usual opaque-handle pattern: a config is
//! parsed into a `ZkowfConfig*`, run into a `ZkowfResult*`, and both are
//! released by their `_free` functions. Functions that can fail return a
//! `ZkowfStatus`; the last failure's message is retrievable per thread via
//! `zkowf_last_error_message`. Strings returned to the caller are
//! NUL-terminated, owned by the caller, and released with
//! `zkowf_string_free`.
//!
//! All handles are independent: a result outlives the config it was run
//! from, and distinct handles may be used from distinct threads. No
//! function touches global state other than the thread-local error slot.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use zkowf::harness::{emit_report, run_experiment, ExperimentConfig, ReportFormat, Verdict};

/// Status codes returned by fallible functions.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ZkowfStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// The config text failed to parse or was not valid UTF-8.
    ParseError = 2,
    /// The experiment failed to run.
    RunError = 3,
}

/// An experiment's verdict, mirrored as plain integers for C callers.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ZkowfVerdict {
    BoundHolds = 0,
    BoundViolated = 1,
    Inconclusive = 2,
}

/// Opaque parsed experiment config.
pub struct ZkowfConfig {
    inner: ExperimentConfig,
}

/// Opaque experiment result.
pub struct ZkowfResult {
    inner: zkowf::harness::ExperimentResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn to_owned_c_string(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Parse a NUL-terminated config document into a new handle.
///
/// On success writes the handle through `out` and returns `Ok`; on failure
/// leaves `out` untouched and records an error message.
///
/// # Safety
/// `text` must point to a NUL-terminated string and `out` to writable
/// memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn zkowf_config_parse(
    text: *const c_char,
    out: *mut *mut ZkowfConfig,
) -> ZkowfStatus {
    if text.is_null() || out.is_null() {
        set_error("null argument".into());
        return ZkowfStatus::NullArgument;
    }
    let text = match CStr::from_ptr(text).to_str() {
        Ok(t) => t,
        Err(e) => {
            set_error(format!("config is not UTF-8: {e}"));
            return ZkowfStatus::ParseError;
        }
    };
    match ExperimentConfig::parse(text) {
        Ok(cfg) => {
            *out = Box::into_raw(Box::new(ZkowfConfig { inner: cfg }));
            ZkowfStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            ZkowfStatus::ParseError
        }
    }
}

/// Release a config handle. A null handle is a no-op.
///
/// # Safety
/// `cfg` must be null or a handle from `zkowf_config_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zkowf_config_free(cfg: *mut ZkowfConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Run the experiment a config describes with the given seed.
///
/// On success writes a result handle through `out`. The config handle
/// remains valid and may be reused.
///
/// # Safety
/// `cfg` must be a live config handle and `out` writable memory for one
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn zkowf_experiment_run(
    cfg: *const ZkowfConfig,
    seed: u64,
    out: *mut *mut ZkowfResult,
) -> ZkowfStatus {
    if cfg.is_null() || out.is_null() {
        set_error("null argument".into());
        return ZkowfStatus::NullArgument;
    }
    match run_experiment(&(*cfg).inner, seed) {
        Ok(result) => {
            *out = Box::into_raw(Box::new(ZkowfResult { inner: result }));
            ZkowfStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            ZkowfStatus::RunError
        }
    }
}

/// The verdict of a result. A null handle reports `Inconclusive`.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn zkowf_result_verdict(result: *const ZkowfResult) -> ZkowfVerdict {
    if result.is_null() {
        return ZkowfVerdict::Inconclusive;
    }
    match (*result).inner.verdict {
        Verdict::BoundHolds => ZkowfVerdict::BoundHolds,
        Verdict::BoundViolated => ZkowfVerdict::BoundViolated,
        Verdict::Inconclusive => ZkowfVerdict::Inconclusive,
    }
}

/// Render a result as its archival JSON document.
///
/// Returns a heap string the caller releases with `zkowf_string_free`, or
/// null on a null handle.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn zkowf_result_json(result: *const ZkowfResult) -> *mut c_char {
    if result.is_null() {
        return ptr::null_mut();
    }
    match emit_report(&(*result).inner, ReportFormat::Json) {
        Ok(json) => to_owned_c_string(&json),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// Release a result handle. A null handle is a no-op.
///
/// # Safety
/// `result` must be null or a handle from `zkowf_experiment_run` not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn zkowf_result_free(result: *mut ZkowfResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Release a string returned by this library. A null pointer is a no-op.
///
/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zkowf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The message of the calling thread's most recent error, as a heap string
/// released with `zkowf_string_free`; null if no error has occurred.
#[no_mangle]
pub extern "C" fn zkowf_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(c) => to_owned_c_string(c.to_str().unwrap_or_default()),
        None => ptr::null_mut(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: &str = "experiment.kind = reduce\n\
        protocol.kind = dial-nizk\n\
        protocol.eps_c = 1/16\n\
        protocol.eps_s = 1/8\n\
        protocol.eps_z = 1/4\n\
        protocol.crs_len = 4\n\
        protocol.sim_corrupt_len = 2\n\
        instance.arm = yes\n\
        inverter.kind = canonical\n\
        mode = exact\n";

    fn parse(text: &str) -> *mut ZkowfConfig {
        let c = CString::new(text).unwrap();
        let mut cfg = ptr::null_mut();
        let st = unsafe { zkowf_config_parse(c.as_ptr(), &mut cfg) };
        assert_eq!(st, ZkowfStatus::Ok);
        cfg
    }

    #[test]
    fn parse_run_render_free() {
        let cfg = parse(CFG);
        let mut result = ptr::null_mut();
        let st = unsafe { zkowf_experiment_run(cfg, 7, &mut result) };
        assert_eq!(st, ZkowfStatus::Ok);
        assert_eq!(unsafe { zkowf_result_verdict(result) }, ZkowfVerdict::BoundHolds);
        let json = unsafe { zkowf_result_json(result) };
        assert!(!json.is_null());
        let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
        assert!(text.contains("\"verdict\": \"bound-holds\""));
        unsafe {
            zkowf_string_free(json);
            zkowf_result_free(result);
            zkowf_config_free(cfg);
        }
    }

    #[test]
    fn parse_errors_are_reported() {
        let c = CString::new("not a config line\n").unwrap();
        let mut cfg = ptr::null_mut();
        let st = unsafe { zkowf_config_parse(c.as_ptr(), &mut cfg) };
        assert_eq!(st, ZkowfStatus::ParseError);
        assert!(cfg.is_null());
        let msg = zkowf_last_error_message();
        assert!(!msg.is_null());
        let text = unsafe { CStr::from_ptr(msg) }.to_str().unwrap().to_string();
        assert!(text.contains("parse error"));
        unsafe { zkowf_string_free(msg) };
    }

    #[test]
    fn run_errors_are_reported() {
        let cfg = parse("experiment.kind = launch\n");
        let mut result = ptr::null_mut();
        let st = unsafe { zkowf_experiment_run(cfg, 0, &mut result) };
        assert_eq!(st, ZkowfStatus::RunError);
        assert!(result.is_null());
        unsafe { zkowf_config_free(cfg) };
    }

    #[test]
    fn null_arguments_are_rejected() {
        let mut cfg = ptr::null_mut();
        assert_eq!(
            unsafe { zkowf_config_parse(ptr::null(), &mut cfg) },
            ZkowfStatus::NullArgument
        );
        let mut result = ptr::null_mut();
        assert_eq!(
            unsafe { zkowf_experiment_run(ptr::null(), 0, &mut result) },
            ZkowfStatus::NullArgument
        );
        assert_eq!(unsafe { zkowf_result_verdict(ptr::null()) }, ZkowfVerdict::Inconclusive);
        assert!(unsafe { zkowf_result_json(ptr::null()) }.is_null());
        unsafe {
            zkowf_config_free(ptr::null_mut());
            zkowf_result_free(ptr::null_mut());
            zkowf_string_free(ptr::null_mut());
        }
    }
}
