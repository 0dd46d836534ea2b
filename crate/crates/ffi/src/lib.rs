//! C ABI over `ffperiods`.
//!
//! Handles are opaque and owned by the caller; every `*_new` or report
//! constructor has a matching `*_free`. Functions return an [`FfpStatus`];
//! on failure [`ffp_last_error`] describes the error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ffperiods::cli::parse_element;
use ffperiods::ffield::FqField;
use ffperiods::funcfield::{product_formula_check, CurveDescriptor};
use ffperiods::genus1::final_cancellation;
use ffperiods::zeta_periods::{carlitz_product_formula_report, z_inf_trivial_at_0, ZetaClosedForm};
use ffperiods::{Error, Rational};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FfpStatus {
    Ok = 0,
    VerificationFailed = 1,
    InvalidInput = 2,
    PrecisionInsufficient = 3,
    NullPointer = 4,
    Panic = 5,
}

/// A curve over a finite field.
pub struct FfpCurve {
    curve: CurveDescriptor,
}

/// A finished verification report.
pub struct FfpReport {
    json: String,
    total: Rational,
    holds: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> FfpStatus {
    match e {
        Error::VerificationFailed(_) => FfpStatus::VerificationFailed,
        Error::PrecisionInsufficient(_) => FfpStatus::PrecisionInsufficient,
        _ => FfpStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<(), FfpStatus>) -> FfpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FfpStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            FfpStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, FfpStatus>;
}

impl<T> OrStatus<T> for ffperiods::Result<T> {
    fn or_status(self) -> Result<T, FfpStatus> {
        self.map_err(|e| {
            set_error(e.to_string());
            status_of(&e)
        })
    }
}

fn non_null<T>(p: *const T) -> Result<(), FfpStatus> {
    if p.is_null() {
        set_error("null pointer argument");
        return Err(FfpStatus::NullPointer);
    }
    Ok(())
}

fn field(q: u64) -> Result<FqField, FfpStatus> {
    FqField::with_order(q).map_err(|e| {
        set_error(format!("q = {q}: {e}"));
        FfpStatus::InvalidInput
    })
}

unsafe fn write_curve(out: *mut *mut FfpCurve, curve: CurveDescriptor) {
    *out = Box::into_raw(Box::new(FfpCurve { curve }));
}

unsafe fn write_report(out: *mut *mut FfpReport, json: String, total: Rational, holds: bool) {
    *out = Box::into_raw(Box::new(FfpReport { json, total, holds }));
}

/// The projective line over `F_q`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ffp_curve_new_p1(q: u64, out: *mut *mut FfpCurve) -> FfpStatus {
    guard(|| {
        non_null(out)?;
        let k = field(q)?;
        write_curve(out, CurveDescriptor::projective_line(&k));
        Ok(())
    })
}

/// `y^2 + a1 t y + a3 y = t^3 + a2 t^2 + a4 t + a6` over `F_q`, with
/// `a = {a1, a2, a3, a4, a6}` reduced into the field.
///
/// # Safety
/// `a` must point to five readable integers and `out` must be valid for a
/// pointer write.
#[no_mangle]
pub unsafe extern "C" fn ffp_curve_new_elliptic(q: u64, a: *const i64, out: *mut *mut FfpCurve) -> FfpStatus {
    guard(|| {
        non_null(a)?;
        non_null(out)?;
        let k = field(q)?;
        let coeffs: [i64; 5] = std::slice::from_raw_parts(a, 5).try_into().unwrap();
        write_curve(out, CurveDescriptor::elliptic_from_ints(&k, coeffs).or_status()?);
        Ok(())
    })
}

/// # Safety
/// `curve` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ffp_curve_free(curve: *mut FfpCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Number of points over `F_{q^d}`, including the point at infinity.
///
/// # Safety
/// `curve` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ffp_curve_count_points(curve: *const FfpCurve, d: u32, out: *mut u64) -> FfpStatus {
    guard(|| {
        non_null(curve)?;
        non_null(out)?;
        *out = (*curve).curve.count_points(d).or_status()?;
        Ok(())
    })
}

/// `zeta'(0)/zeta(0)` of the ring regular away from infinity, as the
/// rational coefficient `num/den` of `log q`.
///
/// # Safety
/// `curve` must be a live handle; `num` and `den` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ffp_zeta_logderiv(curve: *const FfpCurve, num: *mut i64, den: *mut i64) -> FfpStatus {
    guard(|| {
        non_null(curve)?;
        non_null(num)?;
        non_null(den)?;
        let z = ZetaClosedForm::for_curve(&(*curve).curve).or_status()?;
        let l = z_inf_trivial_at_0(&z).or_status()?;
        *num = *l.0.numer();
        *den = *l.0.denom();
        Ok(())
    })
}

/// Sum of `d_v v(f)` over all places for the element written in `elem`
/// (e.g. `"(t^2+1)/t"` or `"y/t"`).
///
/// # Safety
/// `curve` must be a live handle, `elem` a NUL-terminated string and
/// `total` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ffp_product_formula(curve: *const FfpCurve, elem: *const c_char, total: *mut i64) -> FfpStatus {
    guard(|| {
        non_null(curve)?;
        non_null(elem)?;
        non_null(total)?;
        let s = CStr::from_ptr(elem).to_str().map_err(|_| {
            set_error("element is not UTF-8");
            FfpStatus::InvalidInput
        })?;
        let f = parse_element(&(*curve).curve, s).or_status()?;
        let r = product_formula_check(&f).or_status()?;
        *total = r.total;
        if r.total != 0 {
            set_error(format!("product formula total {} for {}", r.total, r.element));
            return Err(FfpStatus::VerificationFailed);
        }
        Ok(())
    })
}

/// The regularized Carlitz product formula over `F_q(t)`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ffp_carlitz_report(q: u64, prec: i64, max_place_degree: u32, out: *mut *mut FfpReport) -> FfpStatus {
    guard(|| {
        non_null(out)?;
        field(q)?;
        if max_place_degree > 4 {
            set_error("place degree above 4");
            return Err(FfpStatus::InvalidInput);
        }
        let r = carlitz_product_formula_report(q, prec, max_place_degree).or_status()?;
        let json = serde_json::to_string(&r).expect("report serializes");
        write_report(out, json, r.ledger.total.0, r.holds());
        Ok(())
    })
}

/// The genus-one period ledger of an elliptic curve.
///
/// # Safety
/// `curve` must be a live handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ffp_genus1_report(curve: *const FfpCurve, prec: i64, product_truncation: u32, out: *mut *mut FfpReport) -> FfpStatus {
    guard(|| {
        non_null(curve)?;
        non_null(out)?;
        let r = final_cancellation(&(*curve).curve, prec, product_truncation as usize).or_status()?;
        let json = serde_json::to_string(&r).expect("report serializes");
        write_report(out, json, r.total().0, r.holds());
        Ok(())
    })
}

/// Total of the report's ledger as `num/den` (coefficient of `log q`).
///
/// # Safety
/// `report` must be a live handle; `num` and `den` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ffp_report_total(report: *const FfpReport, num: *mut i64, den: *mut i64) -> FfpStatus {
    guard(|| {
        non_null(report)?;
        non_null(num)?;
        non_null(den)?;
        *num = *(*report).total.numer();
        *den = *(*report).total.denom();
        Ok(())
    })
}

/// `Ok` when the ledger total vanishes, `VerificationFailed` otherwise.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ffp_report_status(report: *const FfpReport) -> FfpStatus {
    if report.is_null() {
        return FfpStatus::NullPointer;
    }
    if (*report).holds {
        FfpStatus::Ok
    } else {
        FfpStatus::VerificationFailed
    }
}

/// The report as JSON; release with [`ffp_string_free`]. Null on failure.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ffp_report_to_json(report: *const FfpReport) -> *mut c_char {
    if report.is_null() {
        set_error("null pointer argument");
        return ptr::null_mut();
    }
    CString::new((*report).json.clone()).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `report` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ffp_report_free(report: *mut FfpReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ffp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, empty after a
/// success. Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ffp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
