//! C ABI over `varfl`.
//!
//! Inputs and outputs are UTF-8 JSON strings in the same formats the CLI
//! reads and writes. A session owns one loaded dataset. Every fallible
//! function returns a [`VarflStatus`]; on failure the message is available
//! from [`varfl_last_error_message`] on the same thread. Strings handed out
//! by the library must be released with [`varfl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde_json::Value;
use varfl::io::{self, RankedFile, TruthFile};
use varfl::localize::detect;
use varfl::{evaluate, localize, Dataset, Error, LocalizeOptions};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarflStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    Precondition = 4,
    Internal = 5,
}

/// Opaque handle to a loaded dataset.
pub struct VarflSession {
    dataset: Dataset,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(VarflStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_precondition() {
            VarflStatus::Precondition
        } else {
            VarflStatus::InvalidInput
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> VarflStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VarflStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            VarflStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(VarflStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(VarflStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn write_out(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    let c = CString::new(text).map_err(|_| Failure(VarflStatus::Internal, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn check_out<T>(out: *mut *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure(VarflStatus::NullPointer, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

unsafe fn live<'a>(s: *const VarflSession) -> Result<&'a VarflSession, Failure> {
    s.as_ref()
        .ok_or_else(|| Failure(VarflStatus::NullPointer, "session is null".into()))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(VarflStatus::InvalidInput, msg.into())
}

/// Options JSON: any of `technique`, `metric`, `weight`, `agg`, `norm`,
/// `max_interaction`, `include_forward`. Missing keys keep defaults.
fn parse_options(text: Option<&str>) -> Result<LocalizeOptions, Failure> {
    let mut opts = LocalizeOptions::default();
    let Some(text) = text else {
        return Ok(opts);
    };
    let value: Value = serde_json::from_str(text).map_err(|e| invalid(format!("options: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| invalid("options must be a JSON object"))?;
    for (key, v) in obj {
        let as_str = || {
            v.as_str()
                .ok_or_else(|| invalid(format!("options.{key} must be a string")))
        };
        match key.as_str() {
            "technique" => opts.technique = as_str()?.parse()?,
            "metric" => opts.ranking.metric = as_str()?.parse()?,
            "agg" => opts.ranking.aggregation = as_str()?.parse()?,
            "norm" => opts.ranking.normalization = as_str()?.parse()?,
            "weight" => {
                opts.ranking.weight = v
                    .as_f64()
                    .ok_or_else(|| invalid("options.weight must be a number"))?
            }
            "max_interaction" => {
                opts.max_interaction = v
                    .as_u64()
                    .ok_or_else(|| invalid("options.max_interaction must be a non-negative integer"))?
                    as usize
            }
            "include_forward" => {
                opts.include_forward = v
                    .as_bool()
                    .ok_or_else(|| invalid("options.include_forward must be a boolean"))?
            }
            other => return Err(invalid(format!("unknown option `{other}`"))),
        }
    }
    opts.validate()?;
    Ok(opts)
}

/// Loads and cross-validates a dataset from the three JSON documents.
///
/// # Safety
/// The string arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn varfl_session_new(
    system_json: *const c_char,
    products_json: *const c_char,
    spectra_json: *const c_char,
    out: *mut *mut VarflSession,
) -> VarflStatus {
    guard(|| {
        check_out(out)?;
        let system = read_str(system_json, "system")?;
        let products = read_str(products_json, "products")?;
        let spectra = read_str(spectra_json, "spectra")?;
        let dataset = Dataset::from_json_strs(system, products, spectra)?;
        *out = Box::into_raw(Box::new(VarflSession { dataset }));
        Ok(())
    })
}

/// Releases a session. Null is ignored.
///
/// # Safety
/// `session` must come from [`varfl_session_new`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn varfl_session_free(session: *mut VarflSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Runs a technique and writes the ranked-list JSON to `out_json`.
/// `options_json` may be null for defaults.
///
/// # Safety
/// `session` must be live; `options_json` null or NUL-terminated;
/// `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn varfl_localize(
    session: *const VarflSession,
    options_json: *const c_char,
    out_json: *mut *mut c_char,
) -> VarflStatus {
    guard(|| {
        check_out(out_json)?;
        let s = live(session)?;
        let text = if options_json.is_null() {
            None
        } else {
            Some(read_str(options_json, "options")?)
        };
        let opts = parse_options(text)?;
        let result = localize(&s.dataset, &opts)?;
        let file = result.to_file(opts.manifest(Default::default()));
        write_out(out_json, io::to_json_string(&file))
    })
}

/// Detects suspicious partial configurations of size at most `k` and
/// writes them as a JSON array.
///
/// # Safety
/// `session` must be live; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn varfl_detect_spcs(
    session: *const VarflSession,
    k: u32,
    out_json: *mut *mut c_char,
) -> VarflStatus {
    guard(|| {
        check_out(out_json)?;
        let s = live(session)?;
        let spcs = detect(&s.dataset, k as usize)?;
        write_out(out_json, io::to_json_string(&spcs))
    })
}

/// Evaluates a ranked-list JSON against a ground-truth JSON whose ids are
/// checked against the session's system. Writes the report JSON.
///
/// # Safety
/// `session` must be live; strings NUL-terminated; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn varfl_evaluate(
    session: *const VarflSession,
    ranked_json: *const c_char,
    truth_json: *const c_char,
    out_json: *mut *mut c_char,
) -> VarflStatus {
    guard(|| {
        check_out(out_json)?;
        let s = live(session)?;
        let ranked: RankedFile = io::parse_json("ranked", read_str(ranked_json, "ranked")?)?;
        let truth: TruthFile = io::parse_json("truth", read_str(truth_json, "truth")?)?;
        let truth = io::ground_truth(&s.dataset.system, truth)?;
        let report = evaluate(&ranked.to_ranked_list(), &truth);
        write_out(out_json, io::to_json_string(&report))
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn varfl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn varfl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn varfl_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}
