//! C ABI over `expansive-core`.
//!
//! Systems live behind opaque `ExpSystem` handles. Every fallible call
//! returns an `ExpStatus`; on failure `exp_last_error` describes the cause.
//! Strings handed out by the library are freed with `exp_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use expansive_core::analysis::{companion_set, Mode};
use expansive_core::claims::{verify_claim, ClaimOptions};
use expansive_core::exactnum::ExactScalar;
use expansive_core::space::{truncate, IndexBounds, Point, SystemRef};
use expansive_core::sysfile::build_family;
use expansive_core::Error;

/// Status codes of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    Computation = 5,
    Panic = 6,
}

/// Index window of a truncation.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct ExpBounds {
    pub lo: i64,
    pub hi: i64,
    pub depth: u32,
    pub samples: u32,
}

/// Opaque handle to a built system.
pub struct ExpSystem {
    sys: SystemRef,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(ExpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidArgument(_) | Error::UnknownPoint(_) | Error::LimitOrdinal(_) | Error::OrdinalCap(..) => {
                ExpStatus::InvalidArgument
            }
            Error::Parse(_) | Error::Json(_) => ExpStatus::Parse,
            _ => ExpStatus::Computation,
        };
        Fail(status, e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(ExpStatus::Parse, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ExpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ExpStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ExpStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(ExpStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(ExpStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(ExpStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn owned(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no nul bytes").into_raw()
}

unsafe fn system<'a>(h: *const ExpSystem) -> Result<&'a ExpSystem, Fail> {
    h.as_ref().ok_or_else(|| Fail(ExpStatus::NullPointer, "system handle is null".into()))
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn exp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a system of `family` from a JSON parameter object (`params_json`
/// may be null for families without parameters).
///
/// # Safety
/// `family` and `params_json` must be null or valid C strings; `out` must
/// point to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn exp_system_build(
    family: *const c_char,
    params_json: *const c_char,
    out: *mut *mut ExpSystem,
) -> ExpStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let family = text(family, "family")?;
        let params = if params_json.is_null() {
            serde_json::Value::Null
        } else {
            serde_json::from_str(text(params_json, "params_json")?)?
        };
        let sys = build_family(family, &params)?.system();
        *out = Box::into_raw(Box::new(ExpSystem { sys }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `sys` must be null or a handle from `exp_system_build` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn exp_system_free(sys: *mut ExpSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Frees a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn exp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Canonical parameters of the system as JSON.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn exp_system_params(sys: *const ExpSystem, out: *mut *mut c_char) -> ExpStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let s = system(sys)?;
        *out = owned(serde_json::to_string(&serde_json::json!({
            "family": s.sys.family(),
            "params": s.sys.params(),
        }))?);
        Ok(())
    })
}

/// Cantor-Bendixson rank in Cantor normal form, e.g. `2` or `w`.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn exp_system_rank(sys: *const ExpSystem, out: *mut *mut c_char) -> ExpStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let s = system(sys)?;
        let space = s.sys.space().ok_or_else(|| {
            Fail(ExpStatus::InvalidArgument, format!("{} has no scattered description", s.sys.family()))
        })?;
        *out = owned(space.cb_rank()?.to_string());
        Ok(())
    })
}

/// Companion set of `point` at threshold `delta` (a fraction such as
/// `1/8`) over the truncation `bounds` with `horizon`, as JSON. The number of
/// members is also stored in `count` when it is not null.
///
/// # Safety
/// Pointers must be valid as described; `bounds` must point to an `ExpBounds`.
#[no_mangle]
pub unsafe extern "C" fn exp_companions(
    sys: *const ExpSystem,
    bounds: *const ExpBounds,
    horizon: u32,
    delta: *const c_char,
    point: *const c_char,
    two_sided: bool,
    count: *mut usize,
    out: *mut *mut c_char,
) -> ExpStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let s = system(sys)?;
        let b = bounds.as_ref().ok_or_else(|| Fail(ExpStatus::NullPointer, "bounds is null".into()))?;
        let delta: ExactScalar = text(delta, "delta")?.parse()?;
        let point: Point = text(point, "point")?.parse()?;
        let ib = IndexBounds { lo: b.lo, hi: b.hi, depth: b.depth, samples: b.samples };
        let tr = truncate(s.sys.clone(), &ib, horizon)?;
        let mode = if two_sided { Mode::TwoSided } else { Mode::Forward };
        let r = companion_set(&tr, &point, &delta, horizon, mode)?;
        if !count.is_null() {
            *count = r.members.len();
        }
        *out = owned(serde_json::to_string(&r)?);
        Ok(())
    })
}

/// Runs a named claim; `n = 0` uses the claim's default levels. Writes the
/// verdict to `ok` and the full report JSON to `out`.
///
/// # Safety
/// `name` must be a valid C string; `ok` and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn exp_verify_claim(
    name: *const c_char,
    n: u32,
    ok: *mut bool,
    out: *mut *mut c_char,
) -> ExpStatus {
    guard(|| {
        out_ptr(out, "out")?;
        out_ptr(ok, "ok")?;
        let name = text(name, "name")?;
        let r = verify_claim(name, &ClaimOptions { n: (n > 0).then_some(n) })?;
        *ok = r.ok;
        *out = owned(serde_json::to_string(&r)?);
        Ok(())
    })
}
