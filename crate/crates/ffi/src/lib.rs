//! C ABI over the trasdim library.
//!
//! Windows and certificates are opaque heap handles owned by the caller and
//! released with their `_free` function. Every fallible call returns a
//! [`TrasdimStatus`]; on failure the message is available from
//! [`trasdim_last_error_message`] on the same thread. Strings handed out are
//! NUL-terminated UTF-8 and must be released with [`trasdim_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use trasdim::borst::SetSystem;
use trasdim::covers::{validate_cover, ColoredCover};
use trasdim::solver::{decide_cover, Certificate, DecisionInstance, SearchMode, SolverConfig, Verdict};
use trasdim::spaces::Window;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrasdimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidJson = 3,
    InvalidArgument = 4,
    OutOfRange = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrasdimVerdict {
    Sat = 0,
    Unsat = 1,
    Unknown = 2,
}

/// A finite window of a lattice or tower space.
pub struct TrasdimWindow {
    inner: Window,
}

/// Result of one decision run.
pub struct TrasdimCertificate {
    inner: Certificate,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: TrasdimStatus, msg: impl Into<String>) -> TrasdimStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning panics into [`TrasdimStatus::Panic`].
fn guard(f: impl FnOnce() -> TrasdimStatus) -> TrasdimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(TrasdimStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, TrasdimStatus> {
    if s.is_null() {
        return Err(fail(TrasdimStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| fail(TrasdimStatus::InvalidUtf8, e.to_string()))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("NULs removed")
        .into_raw()
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(TrasdimStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn trasdim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the last error message on this thread, or null if none.
#[no_mangle]
pub extern "C" fn trasdim_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(m) => m.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn trasdim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a window from JSON: a spec such as
/// `{"family":"zn","dims":2,"side":3}` or an explicit point list.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trasdim_window_from_json(
    json: *const c_char,
    out: *mut *mut TrasdimWindow,
) -> TrasdimStatus {
    guard(|| {
        non_null!(out);
        let text = try_ffi!(read_str(json));
        let value: serde_json::Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => return fail(TrasdimStatus::InvalidJson, e.to_string()),
        };
        match Window::from_json(&value) {
            Ok(w) => {
                *out = Box::into_raw(Box::new(TrasdimWindow { inner: w }));
                TrasdimStatus::Ok
            }
            Err(e) => fail(TrasdimStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `window` must be null or a handle from [`trasdim_window_from_json`].
#[no_mangle]
pub unsafe extern "C" fn trasdim_window_free(window: *mut TrasdimWindow) {
    if !window.is_null() {
        drop(Box::from_raw(window));
    }
}

/// # Safety
/// `window` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trasdim_window_len(
    window: *const TrasdimWindow,
    out: *mut usize,
) -> TrasdimStatus {
    guard(|| {
        non_null!(window, out);
        *out = (*window).inner.len();
        TrasdimStatus::Ok
    })
}

/// Distance between points `i` and `j` in window order.
///
/// # Safety
/// `window` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trasdim_window_distance(
    window: *const TrasdimWindow,
    i: usize,
    j: usize,
    out: *mut u64,
) -> TrasdimStatus {
    guard(|| {
        non_null!(window, out);
        let w = &(*window).inner;
        if i >= w.len() || j >= w.len() {
            return fail(
                TrasdimStatus::OutOfRange,
                format!("index out of range for a window of {} points", w.len()),
            );
        }
        *out = w.dist(i, j);
        TrasdimStatus::Ok
    })
}

/// Decides whether `window` has a cover by `n_radii` families, family `i`
/// being `radii[i]`-disjoint, with every block of diameter `≤ diameter`.
///
/// # Safety
/// `window` must be a live handle, `radii` must point to `n_radii` values and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trasdim_decide(
    window: *const TrasdimWindow,
    radii: *const u64,
    n_radii: usize,
    diameter: u64,
    node_budget: u64,
    fast: bool,
    out: *mut *mut TrasdimCertificate,
) -> TrasdimStatus {
    guard(|| {
        non_null!(window, out);
        if radii.is_null() && n_radii > 0 {
            return fail(TrasdimStatus::NullPointer, "radii is null");
        }
        let radii = if n_radii == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(radii, n_radii).to_vec()
        };
        let inst = match DecisionInstance::new((*window).inner.clone(), radii, diameter) {
            Ok(i) => i,
            Err(e) => return fail(TrasdimStatus::InvalidArgument, e.to_string()),
        };
        let cfg = SolverConfig {
            mode: if fast {
                SearchMode::Fast
            } else {
                SearchMode::Canonical
            },
            node_budget,
        };
        let cert = decide_cover(&inst, &cfg);
        *out = Box::into_raw(Box::new(TrasdimCertificate { inner: cert }));
        TrasdimStatus::Ok
    })
}

/// # Safety
/// `cert` must be null or a handle from [`trasdim_decide`].
#[no_mangle]
pub unsafe extern "C" fn trasdim_certificate_free(cert: *mut TrasdimCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// # Safety
/// `cert` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trasdim_certificate_verdict(
    cert: *const TrasdimCertificate,
    out: *mut TrasdimVerdict,
) -> TrasdimStatus {
    guard(|| {
        non_null!(cert, out);
        *out = match (*cert).inner.verdict {
            Verdict::Sat { .. } => TrasdimVerdict::Sat,
            Verdict::Unsat => TrasdimVerdict::Unsat,
            Verdict::Unknown => TrasdimVerdict::Unknown,
        };
        TrasdimStatus::Ok
    })
}

/// Search nodes explored.
///
/// # Safety
/// `cert` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trasdim_certificate_nodes(
    cert: *const TrasdimCertificate,
    out: *mut u64,
) -> TrasdimStatus {
    guard(|| {
        non_null!(cert, out);
        *out = (*cert).inner.stats.nodes;
        TrasdimStatus::Ok
    })
}

/// The certificate document, including the witness cover when SAT.
///
/// # Safety
/// `cert` must be a live handle; `out` must be writable. Free the result
/// with [`trasdim_string_free`].
#[no_mangle]
pub unsafe extern "C" fn trasdim_certificate_to_json(
    cert: *const TrasdimCertificate,
    out: *mut *mut c_char,
) -> TrasdimStatus {
    guard(|| {
        non_null!(cert, out);
        match serde_json::to_string(&(*cert).inner) {
            Ok(s) => {
                *out = into_c_string(s);
                TrasdimStatus::Ok
            }
            Err(e) => fail(TrasdimStatus::InvalidJson, e.to_string()),
        }
    })
}

/// Checks a cover document against `window` and `diameter`.
///
/// # Safety
/// `window` must be a live handle, `cover_json` a NUL-terminated string and
/// `accepted` writable.
#[no_mangle]
pub unsafe extern "C" fn trasdim_validate_cover_json(
    window: *const TrasdimWindow,
    cover_json: *const c_char,
    diameter: u64,
    accepted: *mut bool,
) -> TrasdimStatus {
    guard(|| {
        non_null!(window, accepted);
        let text = try_ffi!(read_str(cover_json));
        let cover: ColoredCover = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => return fail(TrasdimStatus::InvalidJson, e.to_string()),
        };
        *accepted = validate_cover(&cover, &(*window).inner, diameter).accepted();
        TrasdimStatus::Ok
    })
}

/// Rank of an explicit set system given as
/// `{"universe":[..],"members":[[..],..]}`, written as ordinal text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable. Free the
/// result with [`trasdim_string_free`].
#[no_mangle]
pub unsafe extern "C" fn trasdim_set_system_ord(
    json: *const c_char,
    out: *mut *mut c_char,
) -> TrasdimStatus {
    guard(|| {
        non_null!(out);
        let text = try_ffi!(read_str(json));
        match serde_json::from_str::<SetSystem>(text) {
            Ok(sys) => {
                *out = into_c_string(sys.ord().to_string());
                TrasdimStatus::Ok
            }
            Err(e) => fail(TrasdimStatus::InvalidJson, e.to_string()),
        }
    })
}
