//! C interface to `mflab`.
//!
//! Every fallible function returns an [`MflabStatus`]. On failure the message
//! is kept per thread and read back with [`mflab_last_error_message`].
//! Objects are opaque handles owned by the caller and released with the
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mflab::jsq_reference::jsq_stationary;
use mflab::meanfield_ode::fixed_point;
use mflab::ring_sim::{empirical_proportion, RingConfig, RingSimulator};
use mflab::state_space::{rho_distance, total_variation};
use mflab::{Error, ProportionVector, SuperNodeVector};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MflabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unstable = 3,
    DimensionMismatch = 4,
    StateSpaceTooLarge = 5,
    NumericalFailure = 6,
    Serialization = 7,
    Panic = 8,
}

/// Sparse proportion vector over supernode tuples.
pub struct MflabProportion(ProportionVector);

/// Ring simulator with its current queue lengths and clock.
pub struct MflabRing {
    sim: RingSimulator,
    k: usize,
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

fn status_of(err: &Error) -> MflabStatus {
    match err {
        Error::Config(_) | Error::Malformed(_) => MflabStatus::InvalidArgument,
        Error::Unstable { .. } => MflabStatus::Unstable,
        Error::Dimension { .. } => MflabStatus::DimensionMismatch,
        Error::StateSpaceTooLarge { .. } => MflabStatus::StateSpaceTooLarge,
        Error::Json(_) | Error::Io(_) => MflabStatus::Serialization,
        _ => MflabStatus::NumericalFailure,
    }
}

struct Fail(MflabStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(MflabStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure, and turns panics into [`MflabStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MflabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_error();
            MflabStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MflabStatus::Panic
        }
    }
}

unsafe fn tuple<'a>(coords: *const u32, len: usize) -> Result<&'a [u32], Fail> {
    if coords.is_null() {
        return Err(null("coords"));
    }
    if len == 0 {
        return Err(Fail(MflabStatus::InvalidArgument, "a supernode tuple needs at least one coordinate".into()));
    }
    Ok(std::slice::from_raw_parts(coords, len))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn boxed(p: ProportionVector) -> *mut MflabProportion {
    Box::into_raw(Box::new(MflabProportion(p)))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn mflab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mflab_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Empty proportion vector over `(k+1)`-tuples.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn mflab_proportion_new(k: usize, out: *mut *mut MflabProportion) -> MflabStatus {
    guard(|| write(out, boxed(ProportionVector::new(k))))
}

/// # Safety
/// `p` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn mflab_proportion_free(p: *mut MflabProportion) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Sets the fraction at tuple `coords[0..len]`; `len` must be `k + 1`.
///
/// # Safety
/// `p` must be a live handle and `coords` valid for `len` reads.
#[no_mangle]
pub unsafe extern "C" fn mflab_proportion_set(
    p: *mut MflabProportion,
    coords: *const u32,
    len: usize,
    value: f64,
) -> MflabStatus {
    guard(|| {
        let p = p.as_mut().ok_or_else(|| null("proportion"))?;
        let u = SuperNodeVector::new(tuple(coords, len)?.to_vec())?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(Fail(MflabStatus::InvalidArgument, format!("fraction {value} is not a nonnegative number")));
        }
        p.0.insert(u, value)?;
        Ok(())
    })
}

/// Fraction at tuple `coords[0..len]`; zero when absent.
///
/// # Safety
/// `p` must be a live handle, `coords` valid for `len` reads, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mflab_proportion_get(
    p: *const MflabProportion,
    coords: *const u32,
    len: usize,
    out: *mut f64,
) -> MflabStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("proportion"))?;
        let u = SuperNodeVector::new(tuple(coords, len)?.to_vec())?;
        if u.k() != p.0.k() {
            return Err(Error::Dimension { left: u.k(), right: p.0.k() }.into());
        }
        write(out, p.0.get(&u))
    })
}

/// Number of stored tuples.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mflab_proportion_len(p: *const MflabProportion, out: *mut usize) -> MflabStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("proportion"))?;
        write(out, p.0.len())
    })
}

/// JSON object mapping `"u0,...,uk"` to fractions. Release the string with
/// [`mflab_string_free`].
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mflab_proportion_to_json(p: *const MflabProportion, out: *mut *mut c_char) -> MflabStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("proportion"))?;
        let json = p.0.to_json()?;
        let s = CString::new(json).map_err(|e| Fail(MflabStatus::Serialization, e.to_string()))?;
        write(out, s.into_raw())
    })
}

/// Parses the format written by [`mflab_proportion_to_json`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mflab_proportion_from_json(json: *const c_char, out: *mut *mut MflabProportion) -> MflabStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Fail(MflabStatus::InvalidArgument, e.to_string()))?;
        let p = ProportionVector::from_json(text)?;
        write(out, boxed(p))
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn mflab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `sup_u |a_u - b_u| / (u_k + 1)`.
///
/// # Safety
/// `a` and `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mflab_rho_distance(a: *const MflabProportion, b: *const MflabProportion, out: *mut f64) -> MflabStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        write(out, rho_distance(&a.0, &b.0)?)
    })
}

/// Half the l1 distance.
///
/// # Safety
/// `a` and `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mflab_total_variation(a: *const MflabProportion, b: *const MflabProportion, out: *mut f64) -> MflabStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        write(out, total_variation(&a.0, &b.0)?)
    })
}

/// Stationary law of JSQ among `k + 1` queues truncated at `cap`.
/// `residual` may be NULL.
///
/// # Safety
/// `out` must be writable; `residual` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mflab_jsq_stationary(
    k: usize,
    lambda: f64,
    mu: f64,
    cap: u32,
    out: *mut *mut MflabProportion,
    residual: *mut f64,
) -> MflabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let st = jsq_stationary(k, lambda, mu, cap)?;
        if !residual.is_null() {
            residual.write(st.residual);
        }
        write(out, boxed(st.proportion()))
    })
}

/// Fixed point of the mean-field equations, reached by integrating from
/// empty queues until `max |dz/dt| <= tolerance`. `residual` may be NULL.
///
/// # Safety
/// `out` must be writable; `residual` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mflab_meanfield_fixed_point(
    k: usize,
    lambda: f64,
    mu: f64,
    cap: u32,
    tolerance: f64,
    out: *mut *mut MflabProportion,
    residual: *mut f64,
) -> MflabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let fp = fixed_point(k, lambda, mu, cap, tolerance)?;
        if !residual.is_null() {
            residual.write(fp.residual);
        }
        write(out, boxed(fp.state.proportion()))
    })
}

/// Ring of `n_nodes` empty queues, each routing to the shortest of itself
/// and its next `k` neighbours.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mflab_ring_new(
    n_nodes: usize,
    k: usize,
    lambda: f64,
    mu: f64,
    seed: u64,
    stream: u64,
    out: *mut *mut MflabRing,
) -> MflabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let config = RingConfig { n_nodes, k_neighbors: k, lambda, mu, seed, horizon: f64::INFINITY };
        let sim = RingSimulator::new(config, vec![0; n_nodes], stream)?;
        write(out, Box::into_raw(Box::new(MflabRing { sim, k })))
    })
}

/// # Safety
/// `r` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn mflab_ring_free(r: *mut MflabRing) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Simulates up to absolute time `until`. Earlier times are a no-op.
///
/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mflab_ring_run(r: *mut MflabRing, until: f64) -> MflabStatus {
    guard(|| {
        let r = r.as_mut().ok_or_else(|| null("ring"))?;
        if !until.is_finite() {
            return Err(Fail(MflabStatus::InvalidArgument, format!("run target {until} is not finite")));
        }
        r.sim.advance_until(until, |_, _| {});
        Ok(())
    })
}

/// Current simulation time.
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mflab_ring_time(r: *const MflabRing, out: *mut f64) -> MflabStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("ring"))?;
        write(out, r.sim.state().clock)
    })
}

/// Copies the queue lengths into `buf`, which must hold `n_nodes` entries.
///
/// # Safety
/// `r` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn mflab_ring_queues(r: *const MflabRing, buf: *mut u32, len: usize) -> MflabStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("ring"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let queues = &r.sim.state().queues;
        if len < queues.len() {
            return Err(Fail(MflabStatus::InvalidArgument, format!("buffer holds {len} entries, ring has {}", queues.len())));
        }
        std::slice::from_raw_parts_mut(buf, queues.len()).copy_from_slice(queues);
        Ok(())
    })
}

/// Current empirical proportion vector of the ring, as a new handle.
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mflab_ring_proportion(r: *const MflabRing, out: *mut *mut MflabProportion) -> MflabStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("ring"))?;
        write(out, boxed(empirical_proportion(&r.sim.state().queues, r.k)))
    })
}
