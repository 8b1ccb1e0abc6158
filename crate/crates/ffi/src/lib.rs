//! C ABI for `tracelab`.
//!
//! Every fallible call returns a [`TlStatus`]; on failure the message is kept
//! per thread and read with [`tl_last_error`]. Objects are opaque handles
//! released with their matching `*_free` function. Field elements cross the
//! boundary as their enumeration index.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tracelab::experiments::{self, Experiment, ExperimentConfig};
use tracelab::ff::{Elem, Field};
use tracelab::tracefn::TraceFunction;
use tracelab::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Precondition = 3,
    Unsupported = 4,
    LimitExceeded = 5,
    DivisionByZero = 6,
    Parse = 7,
    Internal = 8,
}

/// A finite field `F_{p^e}`.
pub struct TlField(Field);

/// A tabulated trace function with values in a finite residue field.
pub struct TlTrace(TraceFunction);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TlStatus {
    match e {
        Error::NotPrime(_)
        | Error::ReducibleModulus { .. }
        | Error::Ramified { .. }
        | Error::FieldMismatch(..)
        | Error::InvalidParameter(_) => TlStatus::InvalidArgument,
        Error::Precondition(_) => TlStatus::Precondition,
        Error::Unsupported(_) => TlStatus::Unsupported,
        Error::CapExceeded { .. } | Error::BudgetExceeded { .. } => TlStatus::LimitExceeded,
        Error::DivisionByZero => TlStatus::DivisionByZero,
        Error::Parse(_) | Error::Json(_) => TlStatus::Parse,
        Error::Io(_) => TlStatus::Internal,
    }
}

struct Failure(TlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(TlStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TlStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TlStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure(TlStatus::Parse, format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(out: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    out.as_mut().ok_or_else(|| null(what))
}

fn elem_arg(field: &Field, x: u64) -> Result<Elem, Failure> {
    field.from_index(x).map_err(Failure::from)
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn tl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates `F_{p^e}` with its canonical modulus.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_field_new(p: u64, e: u32, out: *mut *mut TlField) -> TlStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(TlField(Field::canonical(p, e)?)));
        Ok(())
    })
}

/// # Safety
/// `field` must come from [`tl_field_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tl_field_free(field: *mut TlField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// `p^e`, or 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tl_field_order(field: *const TlField) -> u64 {
    field.as_ref().map_or(0, |f| f.0.order())
}

/// Canonical text form `p^e:modulus` written into a new string; release it
/// with [`tl_string_free`].
///
/// # Safety
/// `field` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_field_describe(field: *const TlField, out: *mut *mut c_char) -> TlStatus {
    guard(|| {
        let f = field.as_ref().ok_or_else(|| null("field"))?;
        let out = out_arg(out, "out")?;
        *out = CString::new(f.0.spec().canonical_string()).expect("no nul").into_raw();
        Ok(())
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TlOp {
    Add = 0,
    Sub = 1,
    Mul = 2,
    Div = 3,
}

/// `out = a op b` on element indices.
///
/// # Safety
/// `field` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_field_op(field: *const TlField, op: TlOp, a: u64, b: u64, out: *mut u64) -> TlStatus {
    guard(|| {
        let f = &field.as_ref().ok_or_else(|| null("field"))?.0;
        let out = out_arg(out, "out")?;
        let (a, b) = (elem_arg(f, a)?, elem_arg(f, b)?);
        let r = match op {
            TlOp::Add => f.add(a, b),
            TlOp::Sub => f.sub(a, b),
            TlOp::Mul => f.mul(a, b),
            TlOp::Div => f.div(a, b)?,
        };
        *out = r.index() as u64;
        Ok(())
    })
}

/// Builds a trace function from a JSON object with the experiment parameter
/// names (`p`, `e`, `ell`, `kind`, `order`, `n`, `f`, `normalized`, ...).
///
/// # Safety
/// `config_json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_trace_new(config_json: *const c_char, out: *mut *mut TlTrace) -> TlStatus {
    guard(|| {
        let text = str_arg(config_json, "config_json")?;
        let out = out_arg(out, "out")?;
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(Error::from)?;
        cfg.validate()?;
        *out = Box::into_raw(Box::new(TlTrace(experiments::build_trace(&cfg)?)));
        Ok(())
    })
}

/// # Safety
/// `trace` must come from [`tl_trace_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tl_trace_free(trace: *mut TlTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Orders of the domain and residue fields.
///
/// # Safety
/// `trace` must be a live handle; outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tl_trace_orders(trace: *const TlTrace, domain: *mut u64, residue: *mut u64) -> TlStatus {
    guard(|| {
        let t = &trace.as_ref().ok_or_else(|| null("trace"))?.0;
        *out_arg(domain, "domain")? = t.domain().order();
        *out_arg(residue, "residue")? = t.context().field().order();
        Ok(())
    })
}

/// `t(x)` as a residue-field index; `singular` is set to 1 when `x` lies in
/// the singular set, where the value is 0 by convention.
///
/// # Safety
/// `trace` must be a live handle; outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tl_trace_value(trace: *const TlTrace, x: u64, value: *mut u64, singular: *mut u8) -> TlStatus {
    guard(|| {
        let t = &trace.as_ref().ok_or_else(|| null("trace"))?.0;
        let x = elem_arg(t.domain(), x)?;
        *out_arg(value, "value")? = t.value(x).index() as u64;
        *out_arg(singular, "singular")? = t.is_singular(x) as u8;
        Ok(())
    })
}

/// Runs a named experiment (`equidist-shift`, `variance`, ...) and returns
/// the report JSON in a new string; release it with [`tl_string_free`].
/// `exact_ok` is set to 1 when every exact check passed.
///
/// # Safety
/// Strings must be nul-terminated; outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tl_run_experiment(
    name: *const c_char,
    config_json: *const c_char,
    report_json: *mut *mut c_char,
    exact_ok: *mut u8,
) -> TlStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let text = str_arg(config_json, "config_json")?;
        let report_json = out_arg(report_json, "report_json")?;
        let exact_ok = out_arg(exact_ok, "exact_ok")?;
        let experiment: Experiment = serde_json::from_value(serde_json::Value::String(name.into()))
            .map_err(|_| Failure(TlStatus::InvalidArgument, format!("unknown experiment {name:?}")))?;
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(Error::from)?;
        let report = experiments::run(experiment, &cfg)?;
        *exact_ok = report.exact_checks_pass() as u8;
        *report_json = CString::new(report.to_json()?).expect("no nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
