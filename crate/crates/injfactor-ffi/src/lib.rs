//! C interface to `injfactor`.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Strings returned through out-parameters are
//! freed with [`injf_string_free`]. Every call returns an [`InjfStatus`]; on
//! failure [`injf_last_error`] describes the error for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use injfactor::describe::map_from_description;
use injfactor::pipeline::{extract_witnesses, synthesize, verify_witness, FactorizationWitness};
use injfactor::{CycleType, Element, Error, Injection};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InjfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Malformed = 3,
    /// The cycle types violate a precondition of the factorization.
    Validation = 4,
    NotEquivalent = 5,
    VerificationFailed = 6,
    OutOfCarrier = 7,
    Other = 8,
    Panic = 9,
}

pub struct InjfWitness(FactorizationWitness);

pub struct InjfMap(Injection);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> InjfStatus {
    match e {
        Error::Malformed(_) => InjfStatus::Malformed,
        Error::NoInfiniteCycle(_) | Error::CoimageMismatch | Error::UnsupportedDrosteCase | Error::EmptyType => {
            InjfStatus::Validation
        }
        Error::NotEquivalent => InjfStatus::NotEquivalent,
        Error::VerificationFailed(_) => InjfStatus::VerificationFailed,
        Error::OutOfCarrier(_) => InjfStatus::OutOfCarrier,
        _ => InjfStatus::Other,
    }
}

struct Fail(InjfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> InjfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => InjfStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            InjfStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(InjfStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Fail(InjfStatus::InvalidUtf8, e.to_string()))
}

unsafe fn json(p: *const c_char) -> Result<serde_json::Value, Fail> {
    serde_json::from_str(text(p)?).map_err(|e| Fail(InjfStatus::Malformed, e.to_string()))
}

unsafe fn cycle_type(p: *const c_char) -> Result<CycleType, Fail> {
    Ok(CycleType::from_json(&json(p)?)?)
}

fn null(what: &str) -> Fail {
    Fail(InjfStatus::NullArgument, format!("null {what}"))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out pointer"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out pointer"));
    }
    *out = CString::new(s).map_err(|e| Fail(InjfStatus::Other, e.to_string()))?.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn injf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds and checks a factorization witness from three cycle-type JSON texts.
///
/// # Safety
/// The string arguments must be null or valid NUL-terminated strings and
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn injf_synthesize(
    tf: *const c_char,
    tg: *const c_char,
    th: *const c_char,
    out: *mut *mut InjfWitness,
) -> InjfStatus {
    guard(|| {
        let (tf, tg, th) = (cycle_type(tf)?, cycle_type(tg)?, cycle_type(th)?);
        let state = synthesize(&tf, &tg, &th)?;
        put(out, InjfWitness(extract_witnesses(state, &tf, &tg, &th)?))
    })
}

/// Rebuilds a witness from bundle JSON by replaying its plan.
///
/// # Safety
/// As for [`injf_synthesize`].
#[no_mangle]
pub unsafe extern "C" fn injf_witness_from_bundle(bundle: *const c_char, out: *mut *mut InjfWitness) -> InjfStatus {
    guard(|| put(out, InjfWitness(FactorizationWitness::from_bundle(&json(bundle)?)?)))
}

/// Writes the replayable bundle JSON of a witness.
///
/// # Safety
/// `w` must be null or a live witness handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn injf_witness_bundle(w: *const InjfWitness, out: *mut *mut c_char) -> InjfStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("witness"))?;
        put_string(out, w.0.bundle().to_string())
    })
}

/// Checks the witness identity and certificates on `n` points and stores the
/// number of failures in `failures`.
///
/// # Safety
/// `w` must be null or a live witness handle; `failures` must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn injf_witness_verify(w: *const InjfWitness, n: usize, failures: *mut usize) -> InjfStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("witness"))?;
        if failures.is_null() {
            return Err(null("out pointer"));
        }
        let r = verify_witness(&w.0, n);
        *failures = r.mismatches.len() + r.violations.len();
        Ok(())
    })
}

/// Evaluates `x a f0 a⁻¹ b g0 b⁻¹` on an element in text form.
///
/// # Safety
/// As for [`injf_witness_bundle`]; `x` must be null or a valid string.
#[no_mangle]
pub unsafe extern "C" fn injf_witness_chain(w: *const InjfWitness, x: *const c_char, out: *mut *mut c_char) -> InjfStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("witness"))?;
        let x: Element = text(x)?.parse()?;
        if !w.0.h0.carrier().contains(&x) {
            return Err(Error::OutOfCarrier(x).into());
        }
        put_string(out, w.0.chain(&x).to_string())
    })
}

/// Exposes one of the witness maps (`"f"`, `"g"`, `"h"`, `"f0"`, `"g0"`,
/// `"h0"`) as a new map handle.
///
/// # Safety
/// As for [`injf_witness_chain`].
#[no_mangle]
pub unsafe extern "C" fn injf_witness_map(w: *const InjfWitness, name: *const c_char, out: *mut *mut InjfMap) -> InjfStatus {
    guard(|| {
        let w = &w.as_ref().ok_or_else(|| null("witness"))?.0;
        let m = match text(name)? {
            "f" => &w.state.f,
            "g" => &w.state.g,
            "h" => &w.state.h,
            "f0" => &w.f0,
            "g0" => &w.g0,
            "h0" => &w.h0,
            other => return Err(Fail(InjfStatus::Malformed, format!("unknown map name {other:?}"))),
        };
        put(out, InjfMap(m.clone()))
    })
}

/// # Safety
/// `w` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn injf_witness_free(w: *mut InjfWitness) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Builds a map from its JSON description.
///
/// # Safety
/// As for [`injf_synthesize`].
#[no_mangle]
pub unsafe extern "C" fn injf_map_from_description(desc: *const c_char, out: *mut *mut InjfMap) -> InjfStatus {
    guard(|| put(out, InjfMap(map_from_description(&json(desc)?)?)))
}

/// Image of an element in text form.
///
/// # Safety
/// `m` must be null or a live map handle; `x` null or a valid string; `out`
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn injf_map_apply(m: *const InjfMap, x: *const c_char, out: *mut *mut c_char) -> InjfStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("map"))?;
        let x: Element = text(x)?.parse()?;
        put_string(out, m.0.apply(&x)?.to_string())
    })
}

/// Preimage of an element; `*out` is set to null when it has none.
///
/// # Safety
/// As for [`injf_map_apply`].
#[no_mangle]
pub unsafe extern "C" fn injf_map_preimage(m: *const InjfMap, y: *const c_char, out: *mut *mut c_char) -> InjfStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("map"))?;
        let y: Element = text(y)?.parse()?;
        match m.0.preimage(&y)? {
            Some(x) => put_string(out, x.to_string()),
            None if out.is_null() => Err(null("out pointer")),
            None => {
                *out = ptr::null_mut();
                Ok(())
            }
        }
    })
}

/// First `n` carrier elements in rank order, as a JSON list of text forms.
///
/// # Safety
/// `m` must be null or a live map handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn injf_map_window(m: *const InjfMap, n: usize, out: *mut *mut c_char) -> InjfStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("map"))?;
        let xs: Vec<String> = m.0.carrier().window(n).iter().map(Element::to_string).collect();
        put_string(out, serde_json::to_string(&xs).unwrap())
    })
}

/// Certified cycle type of a map as JSON.
///
/// # Safety
/// As for [`injf_map_apply`].
#[no_mangle]
pub unsafe extern "C" fn injf_map_census(m: *const InjfMap, out: *mut *mut c_char) -> InjfStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("map"))?;
        put_string(out, m.0.cert()?.census().to_json().to_string())
    })
}

/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn injf_map_free(m: *mut InjfMap) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn injf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
