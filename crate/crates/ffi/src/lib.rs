//! C interface to `mvtangent`.
//!
//! Objects cross the boundary as opaque handles built from JSON text and
//! released with the matching `_free` function. Every call returns an
//! `MvtStatus`; on failure the message is available from `mvt_last_error`
//! on the same thread. Strings returned through out-parameters are owned by
//! the caller and released with `mvt_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mvtangent::mcnaughton::ZMap;
use mvtangent::tangents::{check_rationally_outgoing, ClosedSet, TangentCertificate};
use mvtangent::triangulation::{regularize, SimplicialComplex};
use mvtangent::witness::{build_witness, refute_ideal_membership, verify_crux, WitnessPair};
use mvtangent::{Error, Point};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MvtStatus {
    Ok = 0,
    /// The computation succeeded and the verdict is negative.
    NegativeVerdict = 1,
    /// Malformed JSON or data that violates a schema invariant.
    InvalidInput = 2,
    /// Well-formed input that fails an operation's precondition.
    Precondition = 3,
    NullPointer = 4,
    /// Resource exhaustion, internal inconsistency or a caught panic.
    Internal = 5,
}

pub struct MvtComplex(SimplicialComplex);
pub struct MvtZMap(ZMap);
pub struct MvtClosedSet(ClosedSet);
pub struct MvtCertificate(TangentCertificate);
pub struct MvtWitness(WitnessPair);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(MvtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Precondition(_)
            | Error::NotInSimplex(_)
            | Error::OutsideComplex(_)
            | Error::NotContained(_)
            | Error::DomainMismatch(_)
            | Error::NoAdmissibleGenerator(_)
            | Error::ZeroResidual { .. } => MvtStatus::Precondition,
            Error::BudgetExhausted(_) | Error::Inconsistent(_) => MvtStatus::Internal,
            _ => MvtStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn null() -> Failure {
    Failure(MvtStatus::NullPointer, "null pointer argument".into())
}

/// Run `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<MvtStatus, Failure>) -> MvtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MvtStatus::Internal
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(MvtStatus::InvalidInput, format!("not UTF-8: {e}")))
}

unsafe fn from_json<T: serde::de::DeserializeOwned>(s: *const c_char) -> Result<T, Failure> {
    serde_json::from_str(text(s)?).map_err(|e| Failure(MvtStatus::InvalidInput, e.to_string()))
}

unsafe fn handle<'a, T>(h: *const T) -> Result<&'a T, Failure> {
    h.as_ref().ok_or_else(null)
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<MvtStatus, Failure> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(value));
    Ok(MvtStatus::Ok)
}

unsafe fn put_json<T: serde::Serialize>(out: *mut *mut c_char, value: &T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    let s = serde_json::to_string_pretty(value)
        .map_err(|e| Failure(MvtStatus::Internal, e.to_string()))?;
    *out = CString::new(s)
        .map_err(|e| Failure(MvtStatus::Internal, e.to_string()))?
        .into_raw();
    Ok(())
}

fn verdict(ok: bool) -> MvtStatus {
    if ok {
        MvtStatus::Ok
    } else {
        MvtStatus::NegativeVerdict
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mvt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn mvt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

macro_rules! free_fn {
    ($name:ident, $ty:ty) => {
        /// # Safety
        /// `h` must be NULL or a handle from this library, not yet freed.
        #[no_mangle]
        pub unsafe extern "C" fn $name(h: *mut $ty) {
            if !h.is_null() {
                drop(Box::from_raw(h));
            }
        }
    };
}

free_fn!(mvt_complex_free, MvtComplex);
free_fn!(mvt_zmap_free, MvtZMap);
free_fn!(mvt_closed_set_free, MvtClosedSet);
free_fn!(mvt_certificate_free, MvtCertificate);
free_fn!(mvt_witness_free, MvtWitness);

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mvt_complex_from_json(
    json: *const c_char,
    out: *mut *mut MvtComplex,
) -> MvtStatus {
    guard(|| put(out, MvtComplex(from_json(json)?)))
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mvt_complex_to_json(
    h: *const MvtComplex,
    out: *mut *mut c_char,
) -> MvtStatus {
    guard(|| {
        put_json(out, &handle(h)?.0)?;
        Ok(MvtStatus::Ok)
    })
}

/// `MVT_STATUS_OK` when every cell is regular, `MVT_STATUS_NEGATIVE_VERDICT`
/// otherwise.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mvt_complex_is_regular(h: *const MvtComplex) -> MvtStatus {
    guard(|| Ok(verdict(handle(h)?.0.is_regular())))
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mvt_complex_regularize(
    h: *const MvtComplex,
    out: *mut *mut MvtComplex,
) -> MvtStatus {
    guard(|| put(out, MvtComplex(regularize(&handle(h)?.0)?)))
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mvt_zmap_from_json(
    json: *const c_char,
    out: *mut *mut MvtZMap,
) -> MvtStatus {
    guard(|| put(out, MvtZMap(from_json(json)?)))
}

/// Evaluate at a point given as a JSON array of rational strings; the value
/// is written in the same form.
///
/// # Safety
/// `h` must be a live handle, `point_json` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mvt_zmap_eval(
    h: *const MvtZMap,
    point_json: *const c_char,
    out: *mut *mut c_char,
) -> MvtStatus {
    guard(|| {
        let z = handle(h)?;
        let p: Point = from_json(point_json)?;
        put_json(out, &z.0.evaluate(&p)?)?;
        Ok(MvtStatus::Ok)
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mvt_closed_set_from_json(
    json: *const c_char,
    out: *mut *mut MvtClosedSet,
) -> MvtStatus {
    guard(|| put(out, MvtClosedSet(from_json(json)?)))
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mvt_certificate_from_json(
    json: *const c_char,
    out: *mut *mut MvtCertificate,
) -> MvtStatus {
    guard(|| put(out, MvtCertificate(from_json(json)?)))
}

/// Check the certificate against `x`. The tangency evidence uses the first
/// sample of `x` converging to the certificate's point. `report` may be NULL.
///
/// # Safety
/// Handles must be live; `report` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mvt_check_outgoing(
    cert: *const MvtCertificate,
    x: *const MvtClosedSet,
    tol: f64,
    report: *mut *mut c_char,
) -> MvtStatus {
    guard(|| {
        let (cert, x) = (&handle(cert)?.0, &handle(x)?.0);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure(
                MvtStatus::InvalidInput,
                "tolerance must be positive".into(),
            ));
        }
        let seq = x.samples().iter().find(|s| s.limit() == &cert.x);
        let r = check_rationally_outgoing(cert, x, seq, tol)?;
        if !report.is_null() {
            put_json(report, &r)?;
        }
        Ok(verdict(r.verdict))
    })
}

/// # Safety
/// `cert` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mvt_witness_build(
    cert: *const MvtCertificate,
    n: usize,
    out: *mut *mut MvtWitness,
) -> MvtStatus {
    guard(|| put(out, MvtWitness(build_witness(&handle(cert)?.0, n)?)))
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mvt_witness_to_json(
    h: *const MvtWitness,
    out: *mut *mut c_char,
) -> MvtStatus {
    guard(|| {
        put_json(out, &handle(h)?.0)?;
        Ok(MvtStatus::Ok)
    })
}

/// `X ∩ Zf = X ∩ Zg`. `report` may be NULL.
///
/// # Safety
/// Handles must be live; `report` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mvt_witness_verify(
    w: *const MvtWitness,
    x: *const MvtClosedSet,
    report: *mut *mut c_char,
) -> MvtStatus {
    guard(|| {
        let r = verify_crux(&handle(w)?.0, &handle(x)?.0)?;
        if !report.is_null() {
            put_json(report, &r)?;
        }
        Ok(verdict(r.verdict))
    })
}

/// `MVT_STATUS_OK` when `f ≤ m·g` fails on `x` for every `m ≤ m_max`.
/// `report` may be NULL.
///
/// # Safety
/// Handles must be live; `report` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mvt_witness_refute(
    w: *const MvtWitness,
    x: *const MvtClosedSet,
    m_max: u64,
    report: *mut *mut c_char,
) -> MvtStatus {
    guard(|| {
        let r = refute_ideal_membership(&handle(w)?.0, &handle(x)?.0, m_max)?;
        if !report.is_null() {
            put_json(report, &r)?;
        }
        Ok(verdict(r.refuted_up_to_m_max))
    })
}
