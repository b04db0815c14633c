//! C ABI over `genbound`.
//!
//! Every function returns a [`GbStatus`]. On failure the message is kept per
//! thread and read with [`gb_last_error`]. Strings handed out by the library
//! are freed with [`gb_string_free`], settings with [`gb_setting_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::atomic::{AtomicU64, Ordering};

use genbound::bounds::{all_bounds, Analysis};
use genbound::cmi::{build_cmi_joint, cmi_report};
use genbound::counterexample::{counterexample_setting, verify_properties, CEParams, Mode, PartitionSpace};
use genbound::lemmacov::{cov_report, ParityEnsemble};
use genbound::probcore::rational::{rational_from_i64, to_f64};
use genbound::setting::{random_setting, LearningSetting, SizeCaps};
use genbound::{Error, Limits};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    GuardExceeded = 3,
    Overflow = 4,
    Parse = 5,
    InvalidSetting = 6,
    Internal = 7,
    Panic = 8,
}

/// Opaque handle to a learning setting.
pub struct GbSetting {
    inner: LearningSetting,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

static MAX_STATES: AtomicU64 = AtomicU64::new(0);

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GbStatus {
    match e {
        Error::GuardExceeded { .. } => GbStatus::GuardExceeded,
        Error::Overflow(_) => GbStatus::Overflow,
        Error::Parse(_) => GbStatus::Parse,
        Error::InvalidSetting(_) | Error::LossRange(_) | Error::InvalidDistribution(_) => GbStatus::InvalidSetting,
        Error::InvalidArgument(_) | Error::DuplicateSample => GbStatus::InvalidArgument,
        _ => GbStatus::Internal,
    }
}

struct Fail(GbStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GbStatus::Ok,
        Ok(Err(Fail(s, m))) => {
            set_error(&m);
            s
        }
        Err(_) => {
            set_error("panic inside genbound");
            GbStatus::Panic
        }
    }
}

fn limits() -> Result<Limits, Fail> {
    let mut l = Limits::from_env()?;
    let cap = MAX_STATES.load(Ordering::Relaxed);
    if cap > 0 {
        l.max_states = cap as u128;
    }
    Ok(l)
}

fn null() -> Fail {
    Fail(GbStatus::NullPointer, "null pointer argument".into())
}

unsafe fn setting<'a>(h: *const GbSetting) -> Result<&'a LearningSetting, Fail> {
    h.as_ref().map(|s| &s.inner).ok_or_else(null)
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(GbStatus::Internal, "interior NUL in output".into()))?;
    put(out, c.into_raw())
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, Fail> {
    serde_json::to_string(v).map_err(|e| Fail(GbStatus::Internal, e.to_string()))
}

unsafe fn put_setting(out: *mut *mut GbSetting, s: LearningSetting) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    out.write(Box::into_raw(Box::new(GbSetting { inner: s })));
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failure on this thread, or NULL. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn gb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Override the exact-state guard for every later call; 0 restores the
/// default.
#[no_mangle]
pub extern "C" fn gb_set_max_states(cap: u64) {
    MAX_STATES.store(cap, Ordering::Relaxed);
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_setting_from_json(json: *const c_char, out: *mut *mut GbSetting) -> GbStatus {
    guard(|| {
        if json.is_null() {
            return Err(null());
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Fail(GbStatus::Parse, "setting JSON is not UTF-8".into()))?;
        put_setting(out, LearningSetting::from_json(text)?)
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_setting_random(seed: u64, out: *mut *mut GbSetting) -> GbStatus {
    guard(|| put_setting(out, random_setting(seed, SizeCaps::default())))
}

/// The partition construction on `{0,1}^d` with blocks of size `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_setting_counterexample(d: u32, n: u32, out: *mut *mut GbSetting) -> GbStatus {
    guard(|| {
        let space = PartitionSpace::new(d, n, &limits()?)?;
        put_setting(out, counterexample_setting(&space)?)
    })
}

/// # Safety
/// `h` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gb_setting_free(h: *mut GbSetting) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_setting_sizes(
    h: *const GbSetting,
    data_size: *mut usize,
    n: *mut usize,
    hypotheses: *mut usize,
) -> GbStatus {
    guard(|| {
        let s = setting(h)?;
        put(data_size, s.data_size())?;
        put(n, s.n())?;
        put(hypotheses, s.hypothesis_count())
    })
}

/// Setting document as JSON.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_setting_to_json(h: *const GbSetting, out: *mut *mut c_char) -> GbStatus {
    guard(|| put_string(out, setting(h)?.to_json()))
}

/// `E[R - r_S]` and `E[(R - r_S)^2]` as doubles.
///
/// # Safety
/// `h` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_gap_moments(h: *const GbSetting, gap: *mut f64, squared: *mut f64) -> GbStatus {
    guard(|| {
        let s = setting(h)?;
        let a = Analysis::new(s, &limits()?)?;
        put(gap, to_f64(&a.stats.expected_gap))?;
        put(squared, to_f64(&a.stats.expected_squared_gap))
    })
}

/// Every standard-setting bound as a JSON array; `sigma = sigma_num / sigma_den`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_bounds_report_json(
    h: *const GbSetting,
    sigma_num: i64,
    sigma_den: i64,
    out: *mut *mut c_char,
) -> GbStatus {
    guard(|| {
        if sigma_num <= 0 || sigma_den <= 0 {
            return Err(Fail(GbStatus::InvalidArgument, "sigma must be positive".into()));
        }
        let s = setting(h)?;
        let a = Analysis::new(s, &limits()?)?;
        put_string(out, json(&all_bounds(&a, &rational_from_i64(sigma_num, sigma_den))?)?)
    })
}

/// The supersample report as JSON.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_cmi_report_json(h: *const GbSetting, out: *mut *mut c_char) -> GbStatus {
    guard(|| {
        let s = setting(h)?;
        let sj = build_cmi_joint(s, &limits()?)?;
        put_string(out, json(&cmi_report(&sj)?)?)
    })
}

/// Counterexample certification; `monte_carlo` selects sampling with
/// `trials` draws from `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_verify_counterexample_json(
    n: u32,
    d: u32,
    monte_carlo: bool,
    trials: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> GbStatus {
    guard(|| {
        if !n.is_power_of_two() {
            return Err(Fail(GbStatus::InvalidArgument, format!("n must be a power of two, got {n}")));
        }
        let mode = if monte_carlo { Mode::MonteCarlo } else { Mode::Exact };
        let mut p = CEParams::new(n.trailing_zeros(), d, mode);
        p.trials = trials;
        p.seed = seed;
        put_string(out, json(&verify_properties(&p, &limits()?)?)?)
    })
}

/// One covariance row for `N0` zeros, `N1` ones, and blocks of size `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_lemma_cov_json(n0: u32, n1: u32, n: u32, out: *mut *mut c_char) -> GbStatus {
    guard(|| put_string(out, json(&cov_report(&ParityEnsemble::new(n0, n1, n)?)?)?))
}
