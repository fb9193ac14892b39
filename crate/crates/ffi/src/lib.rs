//! C ABI for the twisted rapid-decay toolkit: opaque handles over the
//! core types, integer status codes, and a thread-local error message.
//!
//! Every constructor hands back an owned handle through an out-pointer
//! and the caller must release it with the matching `*_free`. All
//! functions are safe to call with null handles — they report
//! `GRD_STATUS_NULL_POINTER` (or return 0 for getters) instead of
//! crashing. Strings are NUL-terminated UTF-8.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use groupoid_rd::algebra::{reduced_norm, weighted_seminorm, GFunction, SeminormMode};
use groupoid_rd::error::Error;
use groupoid_rd::groupoid::Groupoid;
use groupoid_rd::io;
use groupoid_rd::length::LengthFunction;
use groupoid_rd::metric::FiniteMetricSpace;
use groupoid_rd::rd::{rd_ratio, witness_ratio_bound};
use groupoid_rd::twist::Cocycle;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrdStatus {
    GrdStatusOk = 0,
    GrdStatusNullPointer = 1,
    GrdStatusInvalidUtf8 = 2,
    GrdStatusIo = 3,
    GrdStatusParse = 4,
    GrdStatusSchema = 5,
    GrdStatusValidation = 6,
    GrdStatusInvalidInput = 7,
    GrdStatusInternal = 8,
}

/// Seminorm aggregation across units.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrdSeminormMode {
    GrdSeminormSymmetric = 0,
    GrdSeminormSupSource = 1,
}

/// A loaded groupoid, together with the metric space it came from when
/// the source was a builtin space spec (so `"metric"` lengths resolve).
pub struct GrdGroupoid {
    groupoid: Groupoid,
    metric: Option<Arc<FiniteMetricSpace>>,
}

/// A length function compatible with the groupoid it was loaded for.
pub struct GrdLength {
    length: LengthFunction,
}

/// A 2-cocycle validated against the groupoid it was loaded for.
pub struct GrdCocycle {
    cocycle: Cocycle,
}

/// A finitely supported coefficient vector on a groupoid's arrows.
pub struct GrdFunction {
    function: GFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn record_error(message: &str) {
    let sanitized: Vec<u8> = message.bytes().filter(|&b| b != 0).collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(e: &Error) -> GrdStatus {
    match e {
        Error::Io(_) => GrdStatus::GrdStatusIo,
        Error::Parse(_) => GrdStatus::GrdStatusParse,
        Error::Schema(_) | Error::DanglingId(_) => GrdStatus::GrdStatusSchema,
        Error::Validation { .. } => GrdStatus::GrdStatusValidation,
        _ => GrdStatus::GrdStatusInvalidInput,
    }
}

fn fail(e: Error) -> GrdStatus {
    let status = status_of(&e);
    record_error(&e.to_string());
    status
}

/// Runs `body` with panics converted to `GRD_STATUS_INTERNAL` so no
/// unwind ever crosses the C boundary.
fn guarded(body: impl FnOnce() -> GrdStatus) -> GrdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            record_error("internal panic");
            GrdStatus::GrdStatusInternal
        }
    }
}

/// # Safety
/// `spec` must be a valid NUL-terminated string or null.
unsafe fn read_str<'a>(spec: *const c_char) -> Result<&'a str, GrdStatus> {
    if spec.is_null() {
        record_error("null string argument");
        return Err(GrdStatus::GrdStatusNullPointer);
    }
    unsafe { CStr::from_ptr(spec) }.to_str().map_err(|_| {
        record_error("string argument is not valid UTF-8");
        GrdStatus::GrdStatusInvalidUtf8
    })
}

unsafe fn deref<'a, T>(ptr: *const T) -> Result<&'a T, GrdStatus> {
    if ptr.is_null() {
        record_error("null handle argument");
        return Err(GrdStatus::GrdStatusNullPointer);
    }
    Ok(unsafe { &*ptr })
}

fn hand_out<T>(out: *mut *mut T, value: T) -> GrdStatus {
    if out.is_null() {
        record_error("null out-pointer");
        return GrdStatus::GrdStatusNullPointer;
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    GrdStatus::GrdStatusOk
}

fn write_f64(out: *mut f64, value: f64) -> GrdStatus {
    if out.is_null() {
        record_error("null out-pointer");
        return GrdStatus::GrdStatusNullPointer;
    }
    unsafe { *out = value };
    GrdStatus::GrdStatusOk
}

/// Version of the library as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn grd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the message of the most recent error on this thread into
/// `buf` (truncated to `cap` - 1 bytes, always NUL-terminated) and
/// returns the full message length in bytes, excluding the NUL. Call
/// with a null `buf` or zero `cap` to query the required length.
///
/// # Safety
/// `buf`, when non-null, must point to at least `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn grd_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Loads a groupoid from a JSON file path or a `builtin:` spec (for
/// example `builtin:tree:6` or `builtin:cyclic:12`).
///
/// # Safety
/// `spec` must be a valid NUL-terminated string; `out` must be a valid
/// pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn grd_groupoid_load(
    spec: *const c_char,
    out: *mut *mut GrdGroupoid,
) -> GrdStatus {
    guarded(|| {
        let spec = match unsafe { read_str(spec) } {
            Ok(s) => s,
            Err(status) => return status,
        };
        match io::resolve_groupoid(spec) {
            Ok((groupoid, metric)) => hand_out(out, GrdGroupoid { groupoid, metric }),
            Err(e) => fail(e),
        }
    })
}

/// Releases a groupoid handle. Null is ignored.
///
/// # Safety
/// `g` must be a handle from `grd_groupoid_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grd_groupoid_free(g: *mut GrdGroupoid) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// Number of arrows, or 0 for a null handle.
///
/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn grd_groupoid_arrows(g: *const GrdGroupoid) -> u64 {
    match unsafe { deref(g) } {
        Ok(h) => h.groupoid.num_arrows() as u64,
        Err(_) => 0,
    }
}

/// Number of units, or 0 for a null handle.
///
/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn grd_groupoid_units(g: *const GrdGroupoid) -> u64 {
    match unsafe { deref(g) } {
        Ok(h) => h.groupoid.num_units() as u64,
        Err(_) => 0,
    }
}

/// Loads a length function from a JSON file path or an inline spec:
/// `metric` (for groupoids that came with a metric space) or
/// `word:<id>,<id>,...`.
///
/// # Safety
/// `g` must be a live groupoid handle; `spec` a valid NUL-terminated
/// string; `out` a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn grd_length_load(
    g: *const GrdGroupoid,
    spec: *const c_char,
    out: *mut *mut GrdLength,
) -> GrdStatus {
    guarded(|| {
        let handle = match unsafe { deref(g) } {
            Ok(h) => h,
            Err(status) => return status,
        };
        let spec = match unsafe { read_str(spec) } {
            Ok(s) => s,
            Err(status) => return status,
        };
        match io::resolve_length(spec, &handle.groupoid, handle.metric.as_ref()) {
            Ok(length) => hand_out(out, GrdLength { length }),
            Err(e) => fail(e),
        }
    })
}

/// Releases a length handle. Null is ignored.
///
/// # Safety
/// `l` must be a handle from `grd_length_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grd_length_free(l: *mut GrdLength) {
    if !l.is_null() {
        drop(unsafe { Box::from_raw(l) });
    }
}

/// Loads a 2-cocycle from a JSON file path or an inline spec
/// (`trivial`, or `heisenberg` on the four-arrow group).
///
/// # Safety
/// `g` must be a live groupoid handle; `spec` a valid NUL-terminated
/// string; `out` a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn grd_cocycle_load(
    g: *const GrdGroupoid,
    spec: *const c_char,
    out: *mut *mut GrdCocycle,
) -> GrdStatus {
    guarded(|| {
        let handle = match unsafe { deref(g) } {
            Ok(h) => h,
            Err(status) => return status,
        };
        let spec = match unsafe { read_str(spec) } {
            Ok(s) => s,
            Err(status) => return status,
        };
        match io::resolve_cocycle(spec, &handle.groupoid) {
            Ok(cocycle) => hand_out(out, GrdCocycle { cocycle }),
            Err(e) => fail(e),
        }
    })
}

/// Releases a cocycle handle. Null is ignored.
///
/// # Safety
/// `c` must be a handle from `grd_cocycle_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grd_cocycle_free(c: *mut GrdCocycle) {
    if !c.is_null() {
        drop(unsafe { Box::from_raw(c) });
    }
}

/// Loads a function from a JSON coefficient file.
///
/// # Safety
/// `g` must be a live groupoid handle; `path` a valid NUL-terminated
/// string; `out` a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn grd_function_load(
    g: *const GrdGroupoid,
    path: *const c_char,
    out: *mut *mut GrdFunction,
) -> GrdStatus {
    guarded(|| {
        let handle = match unsafe { deref(g) } {
            Ok(h) => h,
            Err(status) => return status,
        };
        let path = match unsafe { read_str(path) } {
            Ok(s) => s,
            Err(status) => return status,
        };
        match io::load_function(std::path::Path::new(path), &handle.groupoid) {
            Ok(function) => hand_out(out, GrdFunction { function }),
            Err(e) => fail(e),
        }
    })
}

/// Builds a function from `len` doubles holding interleaved real and
/// imaginary parts, one pair per arrow in id order; `len` must equal
/// twice the arrow count.
///
/// # Safety
/// `g` must be a live groupoid handle; `coeffs` must point to `len`
/// readable doubles; `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn grd_function_from_coeffs(
    g: *const GrdGroupoid,
    coeffs: *const f64,
    len: usize,
    out: *mut *mut GrdFunction,
) -> GrdStatus {
    guarded(|| {
        let handle = match unsafe { deref(g) } {
            Ok(h) => h,
            Err(status) => return status,
        };
        if coeffs.is_null() {
            record_error("null coefficient buffer");
            return GrdStatus::GrdStatusNullPointer;
        }
        let arrows = handle.groupoid.num_arrows();
        if len != 2 * arrows {
            return fail(Error::Schema(format!(
                "expected {} doubles (two per arrow), got {len}",
                2 * arrows
            )));
        }
        let raw = unsafe { std::slice::from_raw_parts(coeffs, len) };
        let values = raw
            .chunks_exact(2)
            .map(|pair| num_complex::Complex64::new(pair[0], pair[1]))
            .collect();
        match GFunction::from_coeffs(&handle.groupoid, values) {
            Ok(function) => hand_out(out, GrdFunction { function }),
            Err(e) => fail(e),
        }
    })
}

/// Releases a function handle. Null is ignored.
///
/// # Safety
/// `f` must be a handle from a function constructor not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grd_function_free(f: *mut GrdFunction) {
    if !f.is_null() {
        drop(unsafe { Box::from_raw(f) });
    }
}

/// Reduced (fiberwise spectral) norm of `f` twisted by `sigma`.
///
/// # Safety
/// All handles must be live and belong to the same groupoid; `out`
/// must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn grd_reduced_norm(
    g: *const GrdGroupoid,
    f: *const GrdFunction,
    sigma: *const GrdCocycle,
    out: *mut f64,
) -> GrdStatus {
    guarded(|| {
        let (g, f, sigma) = match unsafe { (deref(g), deref(f), deref(sigma)) } {
            (Ok(g), Ok(f), Ok(s)) => (g, f, s),
            (Err(e), ..) | (_, Err(e), _) | (.., Err(e)) => return e,
        };
        match reduced_norm(&g.groupoid, &f.function, &sigma.cocycle) {
            Ok(value) => write_f64(out, value),
            Err(e) => fail(e),
        }
    })
}

/// Length-weighted seminorm of `f` at exponent `t`.
///
/// # Safety
/// All handles must be live and belong to the same groupoid; `out`
/// must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn grd_weighted_seminorm(
    g: *const GrdGroupoid,
    f: *const GrdFunction,
    l: *const GrdLength,
    t: f64,
    mode: GrdSeminormMode,
    out: *mut f64,
) -> GrdStatus {
    guarded(|| {
        let (g, f, l) = match unsafe { (deref(g), deref(f), deref(l)) } {
            (Ok(g), Ok(f), Ok(l)) => (g, f, l),
            (Err(e), ..) | (_, Err(e), _) | (.., Err(e)) => return e,
        };
        let mode = match mode {
            GrdSeminormMode::GrdSeminormSymmetric => SeminormMode::Symmetric,
            GrdSeminormMode::GrdSeminormSupSource => SeminormMode::SupSource,
        };
        match weighted_seminorm(&g.groupoid, &f.function, &l.length, t, mode) {
            Ok(value) => write_f64(out, value),
            Err(e) => fail(e),
        }
    })
}

/// Seminorm concentrated at one unit's fiber.
///
/// # Safety
/// All handles must be live and belong to the same groupoid; `out`
/// must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn grd_weighted_seminorm_at_unit(
    g: *const GrdGroupoid,
    f: *const GrdFunction,
    l: *const GrdLength,
    t: f64,
    unit: u32,
    out: *mut f64,
) -> GrdStatus {
    guarded(|| {
        let (g, f, l) = match unsafe { (deref(g), deref(f), deref(l)) } {
            (Ok(g), Ok(f), Ok(l)) => (g, f, l),
            (Err(e), ..) | (_, Err(e), _) | (.., Err(e)) => return e,
        };
        match weighted_seminorm(
            &g.groupoid,
            &f.function,
            &l.length,
            t,
            SeminormMode::AtUnit(unit),
        ) {
            Ok(value) => write_f64(out, value),
            Err(e) => fail(e),
        }
    })
}

/// Rapid-decay ratio `reduced_norm / weighted_seminorm` at exponent
/// `t`; fails on the zero function.
///
/// # Safety
/// All handles must be live and belong to the same groupoid; `out`
/// must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn grd_rd_ratio(
    g: *const GrdGroupoid,
    f: *const GrdFunction,
    sigma: *const GrdCocycle,
    l: *const GrdLength,
    t: f64,
    out: *mut f64,
) -> GrdStatus {
    guarded(|| {
        let (g, f, sigma, l) = match unsafe { (deref(g), deref(f), deref(sigma), deref(l)) } {
            (Ok(g), Ok(f), Ok(s), Ok(l)) => (g, f, s, l),
            (Err(e), ..) | (_, Err(e), ..) | (_, _, Err(e), _) | (.., Err(e)) => return e,
        };
        match rd_ratio(&g.groupoid, &f.function, &sigma.cocycle, &l.length, t) {
            Ok(value) => write_f64(out, value),
            Err(e) => fail(e),
        }
    })
}

/// Closed-form certified lower bound on the RD ratio of a ball witness
/// with `fiber_size` arrows at the given radius and exponent.
#[no_mangle]
pub extern "C" fn grd_witness_ratio_bound(fiber_size: u64, radius: f64, t: f64) -> f64 {
    witness_ratio_bound(fiber_size, radius, t)
}
