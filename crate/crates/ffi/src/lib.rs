//! C interface to `urnlab`.
//!
//! Urns are opaque handles created by [`urnlab_urn_from_json`] or
//! [`urnlab_urn_new`] and released with [`urnlab_urn_free`]. Every fallible
//! call returns a [`UrnlabStatus`]; on failure, [`urnlab_last_error`] holds a
//! message for the calling thread. Strings returned through `char **` are
//! owned by the caller and must be released with [`urnlab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use urnlab::moments::{direction_variance, exact_moment_series, mc_standardized_moments, McConfig};
use urnlab::poly::{MultiIndex, Polynomial};
use urnlab::spectral::{decompose, Arith, Decomposition, SpectralOptions, UrnKind};
use urnlab::urn::{simulate, validate, NormalizedUrn, UrnSpec};
use urnlab::verify::{self, VerifyConfig};
use urnlab::Error;

/// Result codes. Zero is success.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UrnlabStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Schema = 3,
    InvalidUrn = 4,
    NotSmall = 5,
    BudgetExceeded = 6,
    Numerical = 7,
    DegenerateDirection = 8,
    LeftOrthant = 9,
    BufferTooSmall = 10,
    CheckFailed = 11,
    Panic = 12,
}

/// Small/large class as reported by [`urnlab_classify`].
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UrnlabKind {
    StrictlySmall = 0,
    CriticallySmall = 1,
    Large = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct UrnlabClass {
    pub kind: UrnlabKind,
    /// Size of the largest critical Jordan block minus one.
    pub d: u32,
    /// Power of the logarithm in the variance: 0 or `2d + 1`.
    pub nu: u32,
    /// Largest real part among non-Perron eigenvalues, with `m = 1`.
    pub sigma2: f64,
    /// 1 when the decomposition is exact (rational).
    pub exact: i32,
}

/// Opaque urn handle.
pub struct UrnlabUrn {
    urn: NormalizedUrn,
    dec: Decomposition,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> UrnlabStatus {
    match e {
        Error::Schema(_) | Error::Io(_) => UrnlabStatus::Schema,
        Error::Invalid(_) => UrnlabStatus::InvalidUrn,
        Error::NotSmall { .. } => UrnlabStatus::NotSmall,
        Error::BudgetExceeded { .. } => UrnlabStatus::BudgetExceeded,
        Error::DegenerateDirection { .. } => UrnlabStatus::DegenerateDirection,
        Error::LeftOrthant { .. } => UrnlabStatus::LeftOrthant,
        Error::IllConditioned { .. }
        | Error::StabilityViolation { .. }
        | Error::ResonanceAmbiguity { .. }
        | Error::UnsupportedSupport { .. }
        | Error::ExactUnavailable(_) => UrnlabStatus::Numerical,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (UrnlabStatus, String)>) -> UrnlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UrnlabStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            UrnlabStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, (UrnlabStatus, String)>;
}

impl<T> OrStatus<T> for urnlab::Result<T> {
    fn or_status(self) -> Result<T, (UrnlabStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn fail<T>(status: UrnlabStatus, msg: &str) -> Result<T, (UrnlabStatus, String)> {
    Err((status, msg.to_string()))
}

fn build(spec: UrnSpec) -> urnlab::Result<UrnlabUrn> {
    let urn = validate(&spec).into_result()?;
    let dec = decompose(&urn, Arith::Auto, &SpectralOptions::default())?;
    Ok(UrnlabUrn { urn, dec })
}

unsafe fn handle<'a>(urn: *const UrnlabUrn) -> Result<&'a UrnlabUrn, (UrnlabStatus, String)> {
    // SAFETY: the caller passes a live handle from this library or null.
    urn.as_ref().ok_or((UrnlabStatus::NullArgument, "null urn handle".into()))
}

unsafe fn give_string(text: String, out: *mut *mut c_char) -> Result<(), (UrnlabStatus, String)> {
    let c = CString::new(text).map_err(|_| (UrnlabStatus::Schema, "string contains NUL".to_string()))?;
    // SAFETY: `out` was checked non-null by the caller.
    *out = c.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread, or an empty string.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn urnlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses an urn spec `{"R": [[...]], "X0": [...], "name": "..."}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn urnlab_urn_from_json(json: *const c_char, out: *mut *mut UrnlabUrn) -> UrnlabStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(UrnlabStatus::NullArgument, "null argument");
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| (UrnlabStatus::InvalidUtf8, "input is not UTF-8".into()))?;
        let urn = build(UrnSpec::from_json(text).or_status()?).or_status()?;
        *out = Box::into_raw(Box::new(urn));
        Ok(())
    })
}

/// Builds an urn from an integer replacement matrix (`colors * colors`,
/// row-major) and initial composition (`colors`).
///
/// # Safety
/// `r` and `x0` must point to that many readable values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn urnlab_urn_new(
    colors: usize,
    r: *const i64,
    x0: *const i64,
    out: *mut *mut UrnlabUrn,
) -> UrnlabStatus {
    guard(|| {
        if r.is_null() || x0.is_null() || out.is_null() {
            return fail(UrnlabStatus::NullArgument, "null argument");
        }
        if colors == 0 {
            return fail(UrnlabStatus::InvalidUrn, "no colors");
        }
        let flat = std::slice::from_raw_parts(r, colors * colors);
        let rows: Vec<Vec<i64>> = flat.chunks(colors).map(<[i64]>::to_vec).collect();
        let x0 = std::slice::from_raw_parts(x0, colors);
        let urn = build(UrnSpec::from_integers(&rows, x0).or_status()?).or_status()?;
        *out = Box::into_raw(Box::new(urn));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `urn` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn urnlab_urn_free(urn: *mut UrnlabUrn) {
    if !urn.is_null() {
        drop(Box::from_raw(urn));
    }
}

/// Number of colors, or 0 for a null handle.
///
/// # Safety
/// `urn` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn urnlab_urn_colors(urn: *const UrnlabUrn) -> usize {
    urn.as_ref().map_or(0, |u| u.urn.colors())
}

/// # Safety
/// `urn` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn urnlab_classify(urn: *const UrnlabUrn, out: *mut UrnlabClass) -> UrnlabStatus {
    guard(|| {
        let u = handle(urn)?;
        if out.is_null() {
            return fail(UrnlabStatus::NullArgument, "null output");
        }
        let class = u.dec.classify();
        *out = UrnlabClass {
            kind: match class.kind {
                UrnKind::StrictlySmall => UrnlabKind::StrictlySmall,
                UrnKind::CriticallySmall => UrnlabKind::CriticallySmall,
                UrnKind::Large => UrnlabKind::Large,
            },
            d: class.d as u32,
            nu: class.nu as u32,
            sigma2: class.sigma2,
            exact: u.dec.is_exact() as i32,
        };
        Ok(())
    })
}

/// Eigenvalues of the normalized replacement matrix, Perron root first, one
/// entry per Jordan index. `re` and `im` must hold `len >= colors` values.
///
/// # Safety
/// `urn` must be a live handle; `re` and `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn urnlab_eigenvalues(urn: *const UrnlabUrn, re: *mut f64, im: *mut f64, len: usize) -> UrnlabStatus {
    guard(|| {
        let u = handle(urn)?;
        if re.is_null() || im.is_null() {
            return fail(UrnlabStatus::NullArgument, "null output");
        }
        let eigs = u.dec.complex().eigenvalues;
        if len < eigs.len() {
            return fail(UrnlabStatus::BufferTooSmall, "buffer shorter than the number of colors");
        }
        for (k, l) in eigs.iter().enumerate() {
            *re.add(k) = l.re;
            *im.add(k) = l.im;
        }
        Ok(())
    })
}

/// Simulates `n` steps; writes the `(n + 1) * colors` compositions row by row.
///
/// # Safety
/// `urn` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn urnlab_simulate(urn: *const UrnlabUrn, n: usize, seed: u64, out: *mut f64, len: usize) -> UrnlabStatus {
    guard(|| {
        let u = handle(urn)?;
        if out.is_null() {
            return fail(UrnlabStatus::NullArgument, "null output");
        }
        let s = u.urn.colors();
        if len < (n + 1) * s {
            return fail(UrnlabStatus::BufferTooSmall, "buffer shorter than (n + 1) * colors");
        }
        let traj = simulate(&u.urn.original, n, seed).or_status()?;
        for (i, state) in traj.states.iter().enumerate() {
            for (j, x) in state.x.iter().enumerate() {
                *out.add(i * s + j) = *x;
            }
        }
        Ok(())
    })
}

/// `E u^alpha(X_k)` for `k = 0..=n_max` on the normalized urn, where `u` are
/// the Jordan coordinates. `re` and `im` must hold `n_max + 1` values.
///
/// # Safety
/// `urn` must be a live handle; `alpha` must hold `colors` values; `re` and
/// `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn urnlab_exact_moments(
    urn: *const UrnlabUrn,
    alpha: *const u32,
    n_max: usize,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> UrnlabStatus {
    guard(|| {
        let u = handle(urn)?;
        if alpha.is_null() || re.is_null() || im.is_null() {
            return fail(UrnlabStatus::NullArgument, "null argument");
        }
        if len < n_max + 1 {
            return fail(UrnlabStatus::BufferTooSmall, "buffer shorter than n_max + 1");
        }
        let alpha = MultiIndex::new(std::slice::from_raw_parts(alpha, u.urn.colors()).to_vec());
        let values: Vec<Complex64> = match &u.dec {
            Decomposition::Exact(d) => {
                let f = Polynomial::monomial(alpha);
                exact_moment_series(&f, n_max, d, u.urn.normalized.x0())
                    .or_status()?
                    .iter()
                    .map(urnlab::Field::to_complex)
                    .collect()
            }
            Decomposition::Float(d) => {
                let x0: Vec<Complex64> = u.urn.normalized.x0_f64().iter().map(|&v| Complex64::new(v, 0.0)).collect();
                exact_moment_series(&Polynomial::monomial(alpha), n_max, d, &x0).or_status()?
            }
        };
        for (k, v) in values.iter().enumerate() {
            *re.add(k) = v.re;
            *im.add(k) = v.im;
        }
        Ok(())
    })
}

/// Simulated standardized moments `k = 1..=k_max` of `<w, X_n>`, with
/// bootstrap standard errors from 200 resamples.
///
/// # Safety
/// `urn` must be a live handle; `w` must hold `colors` doubles; `values`
/// and `stderrs` must hold `k_max` doubles.
#[no_mangle]
pub unsafe extern "C" fn urnlab_mc_moments(
    urn: *const UrnlabUrn,
    w: *const f64,
    n: usize,
    samples: usize,
    seed: u64,
    k_max: u32,
    values: *mut f64,
    stderrs: *mut f64,
) -> UrnlabStatus {
    guard(|| {
        let u = handle(urn)?;
        if w.is_null() || values.is_null() || stderrs.is_null() {
            return fail(UrnlabStatus::NullArgument, "null argument");
        }
        let class = u.dec.classify();
        if class.kind == UrnKind::Large {
            return Err(Error::NotSmall { class: "Large".into() }).or_status();
        }
        let w = std::slice::from_raw_parts(w, u.urn.colors()).to_vec();
        let complex = u.dec.complex();
        let x0: Vec<Complex64> = u.urn.normalized.x0_f64().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let gamma = direction_variance(&complex, &x0, &class, &w, u.urn.scale_f64(), n).or_status()?;
        let cfg = McConfig { n, samples, seed, k_max, resamples: 200 };
        let report = mc_standardized_moments(&u.urn.original, &w, gamma, &cfg).or_status()?;
        for (i, m) in report.moments.iter().enumerate() {
            *values.add(i) = m.value;
            *stderrs.add(i) = m.stderr;
        }
        Ok(())
    })
}

/// Runs the acceptance checks and returns the JSON report through `out`.
/// Returns `CheckFailed` (with the report still written) when a check fails.
///
/// # Safety
/// `urn` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn urnlab_verify_json(
    urn: *const UrnlabUrn,
    mc_samples: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> UrnlabStatus {
    let mut failed = false;
    let status = guard(|| {
        let u = handle(urn)?;
        if out.is_null() {
            return fail(UrnlabStatus::NullArgument, "null output");
        }
        let cfg = VerifyConfig { mc_samples, seed, ..Default::default() };
        let report = verify::run(u.urn.clone(), &cfg).or_status()?;
        failed = !report.passed;
        let text = serde_json::to_string(&report).map_err(|e| (UrnlabStatus::Schema, e.to_string()))?;
        give_string(text, out)
    });
    if status == UrnlabStatus::Ok && failed {
        set_error("one or more checks failed");
        return UrnlabStatus::CheckFailed;
    }
    status
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn urnlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
