//! C ABI over `sqd-core`: opaque spec and report handles, status codes, and
//! JSON strings owned by the library.
//!
//! Every function returns an [`SqdStatus`] or a pointer that is null on
//! failure; the message of the most recent failure on the calling thread is
//! available from [`sqd_last_error_message`]. Strings returned by the library
//! must be released with [`sqd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sqd_core::berend::BerendBounds;
use sqd_core::classifier::{classify, ClassifyOptions, Verdict, VerdictReport};
use sqd_core::number_field::construct_example;
use sqd_core::{ActionSpec, Error, MonicIntPoly};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    ComputationFailed = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqdVerdict {
    VirtuallyNilpotentSqd = 0,
    BerendSqd = 1,
    NotSqd = 2,
    Inconclusive = 3,
}

impl From<Verdict> for SqdVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::VirtuallyNilpotentSqd => SqdVerdict::VirtuallyNilpotentSqd,
            Verdict::BerendSqd => SqdVerdict::BerendSqd,
            Verdict::NotSqd => SqdVerdict::NotSqd,
            Verdict::Inconclusive => SqdVerdict::Inconclusive,
        }
    }
}

/// Validated action specification.
pub struct SqdSpec {
    inner: ActionSpec,
}

/// Classification report.
pub struct SqdReport {
    inner: VerdictReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> SqdStatus {
    match e {
        Error::Schema { .. }
        | Error::NotSquare { .. }
        | Error::DimensionMismatch { .. }
        | Error::NotUnimodular { .. }
        | Error::GeneratorNotUnimodular { .. }
        | Error::NotCommuting { .. }
        | Error::NotMonic
        | Error::NotCubic(_)
        | Error::ReduciblePolynomial
        | Error::NotTotallyReal { .. } => SqdStatus::InvalidInput,
        _ => SqdStatus::ComputationFailed,
    }
}

fn guard(f: impl FnOnce() -> SqdStatus) -> SqdStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            SqdStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, SqdStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(SqdStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        SqdStatus::InvalidUtf8
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Parses and validates a JSON spec `{"d", "n", "generators"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqd_spec_from_json(json: *const c_char, out: *mut *mut SqdSpec) -> SqdStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return SqdStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match ActionSpec::from_json_str(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(SqdSpec { inner }));
                SqdStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Lattice rank `d` and acting rank `n`.
///
/// # Safety
/// `spec` must come from [`sqd_spec_from_json`]; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqd_spec_dims(spec: *const SqdSpec, d: *mut usize, n: *mut usize) -> SqdStatus {
    guard(|| {
        if spec.is_null() || d.is_null() || n.is_null() {
            set_error("null pointer argument");
            return SqdStatus::NullPointer;
        }
        *d = (*spec).inner.d;
        *n = (*spec).inner.n;
        SqdStatus::Ok
    })
}

/// # Safety
/// `spec` must come from [`sqd_spec_from_json`] or be null.
#[no_mangle]
pub unsafe extern "C" fn sqd_spec_free(spec: *mut SqdSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Classifies with default bounds; `witness` attaches a non-SQD witness
/// when the verdict is `not_sqd`.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqd_classify(spec: *const SqdSpec, witness: bool, out: *mut *mut SqdReport) -> SqdStatus {
    guard(|| {
        if spec.is_null() || out.is_null() {
            set_error("null pointer argument");
            return SqdStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let options = ClassifyOptions {
            witness,
            ..ClassifyOptions::default()
        };
        match classify(&(*spec).inner, &options) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(SqdReport { inner }));
                SqdStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                status_of(&e)
            }
        }
    })
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqd_report_verdict(report: *const SqdReport, out: *mut SqdVerdict) -> SqdStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            set_error("null pointer argument");
            return SqdStatus::NullPointer;
        }
        *out = (*report).inner.verdict.into();
        SqdStatus::Ok
    })
}

/// Pretty JSON of the report; release with [`sqd_string_free`]. Null on
/// failure.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sqd_report_to_json(report: *const SqdReport) -> *mut c_char {
    clear_error();
    if report.is_null() {
        set_error("null report");
        return ptr::null_mut();
    }
    match catch_unwind(AssertUnwindSafe(|| serde_json::to_string_pretty(&(*report).inner))) {
        Ok(Ok(s)) => into_c_string(s),
        _ => {
            set_error("report serialization failed");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `report` must come from [`sqd_classify`] or be null.
#[no_mangle]
pub unsafe extern "C" fn sqd_report_free(report: *mut SqdReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Builds the two-unit spec for a totally real cubic given as ascending
/// comma-separated coefficients; writes the full verification report as
/// JSON to `out_json` (release with [`sqd_string_free`]).
///
/// # Safety
/// `poly` must be a NUL-terminated string; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqd_construct_example(
    poly: *const c_char,
    unit_bound: i64,
    out_json: *mut *mut c_char,
) -> SqdStatus {
    guard(|| {
        if out_json.is_null() {
            set_error("null output pointer");
            return SqdStatus::NullPointer;
        }
        *out_json = ptr::null_mut();
        let text = match read_str(poly) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let result = MonicIntPoly::parse_ascending(text)
            .and_then(|p| construct_example(&p, unit_bound, BerendBounds::default()));
        match result {
            Ok(ex) => {
                if !ex.verified {
                    set_error("constructed example failed verification");
                    return SqdStatus::ComputationFailed;
                }
                *out_json = into_c_string(serde_json::to_string_pretty(&ex).unwrap_or_default());
                SqdStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                status_of(&e)
            }
        }
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sqd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or null. Valid until the
/// next library call on the same thread.
#[no_mangle]
pub extern "C" fn sqd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
