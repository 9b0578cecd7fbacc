//! C ABI over the lab: opaque handles, status codes and a thread-local last error.
//!
//! Every function returns a [`PsStatus`]; on failure the message is available from
//! [`ps_last_error`]. Handles and strings returned here are owned by the caller and
//! released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use padic_siegel::arith::CyclotomicNumber;
use padic_siegel::characters::{factor_cyclotomic_mod_p, DirichletCharacter, EmbeddingSigma};
use padic_siegel::lab::{
    build_g_km, convergence_report, theorem1_product_run, unit_congruence_check, Delta, Outcome,
    Report, Theorem2Config, UnitCongruence, DEFAULT_M_MAX_LIMIT,
};
use padic_siegel::qseries::SiegelSeries;
use padic_siegel::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Precondition = 3,
    Computation = 4,
    PrecisionLoss = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsOutcome {
    Pass = 0,
    Fail = 2,
    PrecisionInsufficient = 3,
}

/// A Dirichlet character mod p with values in Q(ζ_{p-1}).
pub struct PsCharacter(DirichletCharacter);

/// A finished lab report.
pub struct PsReport(Report);

/// A degree-2 Siegel expansion with coefficients in Q(ζ_{p-1}).
pub struct PsSeries(SiegelSeries<CyclotomicNumber>);

/// Parameters of a convergence run. `a = 0` selects the smallest admissible a.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct PsRunConfig {
    pub p: u64,
    pub chi: *const PsCharacter,
    pub sigma_index: usize,
    pub a: u64,
    pub m_max: u32,
    pub trunc: usize,
    pub prec: u32,
    /// Permit m_max above 3.
    pub allow_large: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(PsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn status_of(e: &Error) -> PsStatus {
    match e {
        Error::NotOddPrime(_)
        | Error::Parse(_)
        | Error::ParityMismatch { .. }
        | Error::InvalidWeight(..)
        | Error::ConductorMismatch(..)
        | Error::PrimeMismatch(..)
        | Error::CharacterMismatch(_)
        | Error::RingMismatch(_) => PsStatus::InvalidArgument,
        Error::Precondition(_) => PsStatus::Precondition,
        Error::PrecisionLoss(_) => PsStatus::PrecisionLoss,
        Error::Morphism { source, .. } => status_of(source),
        _ => PsStatus::Computation,
    }
}

fn null(what: &str) -> Failure {
    Failure(PsStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("internal panic: {msg}"));
            PsStatus::Panic
        }
    }
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(PsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = CString::new(s)
        .map_err(|_| Failure(PsStatus::Computation, "string contains nul".into()))?
        .into_raw();
    Ok(())
}

unsafe fn run_config(cfg: *const PsRunConfig) -> Result<Theorem2Config, Failure> {
    let cfg = borrow(cfg, "config")?;
    let chi = borrow(cfg.chi, "config.chi")?;
    if cfg.m_max > DEFAULT_M_MAX_LIMIT && !cfg.allow_large {
        return Err(Failure(
            PsStatus::Precondition,
            format!("m_max {} exceeds {DEFAULT_M_MAX_LIMIT} without allow_large", cfg.m_max),
        ));
    }
    Ok(Theorem2Config {
        p: cfg.p,
        chi: chi.0.clone(),
        sigma_index: cfg.sigma_index,
        a: (cfg.a != 0).then_some(cfg.a),
        m_max: cfg.m_max,
        trunc: cfg.trunc,
        prec: cfg.prec,
    })
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn ps_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the last error message on this thread, or NULL. Free with `ps_string_free`.
#[no_mangle]
pub extern "C" fn ps_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ps_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The character of (Z/p)^× sending the smallest primitive root to ζ_{p-1}^t.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_character_new(p: u64, t: u64, out: *mut *mut PsCharacter) -> PsStatus {
    guard(|| put(out, PsCharacter(DirichletCharacter::new(p, t)?)))
}

/// Parses "p:t".
///
/// # Safety
/// `spec` must be a nul-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_character_parse(spec: *const c_char, out: *mut *mut PsCharacter) -> PsStatus {
    guard(|| {
        let chi: DirichletCharacter = read_str(spec, "spec")?.parse()?;
        put(out, PsCharacter(chi))
    })
}

/// # Safety
/// `chi` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_character_inverse(chi: *const PsCharacter, out: *mut *mut PsCharacter) -> PsStatus {
    guard(|| {
        let chi = borrow(chi, "chi")?;
        put(out, PsCharacter(chi.0.inverse()))
    })
}

/// Order of the character, or 0 for a NULL handle.
///
/// # Safety
/// `chi` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_character_order(chi: *const PsCharacter) -> u64 {
    chi.as_ref().map_or(0, |c| c.0.order())
}

/// # Safety
/// `chi` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_character_free(chi: *mut PsCharacter) {
    if !chi.is_null() {
        drop(Box::from_raw(chi));
    }
}

/// Sorted roots of Φ_{p-1} mod p. Writes at most `capacity` roots; `out_len` receives the count.
///
/// # Safety
/// `roots` must hold `capacity` values (or be NULL with capacity 0); `out_len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_cyclotomic_roots(
    p: u64,
    roots: *mut u64,
    capacity: usize,
    out_len: *mut usize,
) -> PsStatus {
    guard(|| {
        if out_len.is_null() || (roots.is_null() && capacity > 0) {
            return Err(null("output buffer"));
        }
        let found = factor_cyclotomic_mod_p(p)?;
        for (i, d) in found.iter().take(capacity).enumerate() {
            *roots.add(i) = *d;
        }
        *out_len = found.len();
        Ok(())
    })
}

/// Convergence run for G_{k_m}, m = 1..=m_max.
///
/// # Safety
/// `cfg` must point to a valid config with a live `chi`; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_theorem2_run(cfg: *const PsRunConfig, out: *mut *mut PsReport) -> PsStatus {
    guard(|| {
        let cfg = run_config(cfg)?;
        put(out, PsReport(convergence_report(&cfg)?))
    })
}

/// Product run of `f` against the sequence configured by `cfg_inverse`.
///
/// # Safety
/// `f` must be a live handle, `cfg_inverse` a valid config, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_theorem1_run(
    f: *const PsSeries,
    cfg_inverse: *const PsRunConfig,
    out: *mut *mut PsReport,
) -> PsStatus {
    guard(|| {
        let f = borrow(f, "f")?;
        let cfg = run_config(cfg_inverse)?;
        put(out, PsReport(theorem1_product_run(&f.0, &cfg)?))
    })
}

/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_report_outcome(report: *const PsReport, out: *mut PsOutcome) -> PsStatus {
    guard(|| {
        let r = borrow(report, "report")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = match r.0.outcome {
            Outcome::Pass => PsOutcome::Pass,
            Outcome::Fail => PsOutcome::Fail,
            Outcome::PrecisionInsufficient => PsOutcome::PrecisionInsufficient,
        };
        Ok(())
    })
}

/// Number of stages, or 0 for a NULL handle.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_report_stage_count(report: *const PsReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.stages.len())
}

/// Minimum valuation of stage `index`; `capped` is set when only a lower bound is known.
///
/// # Safety
/// `report` must be a live handle; `value` and `capped` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_report_min_valuation(
    report: *const PsReport,
    index: usize,
    value: *mut i64,
    capped: *mut bool,
) -> PsStatus {
    guard(|| {
        let r = borrow(report, "report")?;
        if value.is_null() || capped.is_null() {
            return Err(null("output pointer"));
        }
        let stage = r.0.stages.get(index).ok_or_else(|| {
            Failure(PsStatus::InvalidArgument, format!("stage {index} out of range"))
        })?;
        let (v, c) = match stage.min_val {
            Delta::Value(v) => (v, false),
            Delta::AtLeast(v) => (v, true),
        };
        *value = v;
        *capped = c;
        Ok(())
    })
}

/// Report as JSON. Free with `ps_string_free`.
///
/// # Safety
/// `report` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_report_to_json(report: *const PsReport, out: *mut *mut c_char) -> PsStatus {
    guard(|| {
        let r = borrow(report, "report")?;
        let s = serde_json::to_string(&r.0).map_err(Error::from)?;
        put_string(out, s)
    })
}

/// # Safety
/// `report` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_report_free(report: *mut PsReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// The exact series G_{k_m} of a configured run.
///
/// # Safety
/// `cfg` must be a valid config and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_build_g(cfg: *const PsRunConfig, m: u32, out: *mut *mut PsSeries) -> PsStatus {
    guard(|| {
        let res = run_config(cfg)?.resolve()?;
        put(out, PsSeries(build_g_km(&res, m)?.g))
    })
}

/// # Safety
/// `json` must be a nul-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_series_from_json(json: *const c_char, out: *mut *mut PsSeries) -> PsStatus {
    guard(|| {
        let v: serde_json::Value = serde_json::from_str(read_str(json, "json")?).map_err(Error::from)?;
        put(out, PsSeries(SiegelSeries::from_json(&v)?))
    })
}

/// # Safety
/// `series` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_series_to_json(series: *const PsSeries, out: *mut *mut c_char) -> PsStatus {
    guard(|| {
        let s = borrow(series, "series")?;
        put_string(out, s.0.to_json().to_string())
    })
}

/// Whether σ_i(G) ≡ 1 mod p on the stored support.
///
/// # Safety
/// `series` must be a live handle and `holds` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_unit_congruence(
    series: *const PsSeries,
    p: u64,
    sigma_index: usize,
    prec: u32,
    holds: *mut bool,
) -> PsStatus {
    guard(|| {
        let s = borrow(series, "series")?;
        if holds.is_null() {
            return Err(null("output pointer"));
        }
        let sigma = EmbeddingSigma::new(p, sigma_index, prec)?;
        match unit_congruence_check(&s.0, &sigma)? {
            UnitCongruence::NonIntegral { index, valuation } => Err(Failure(
                PsStatus::Computation,
                format!("σ-image not integral at {index:?} (valuation {valuation})"),
            )),
            other => {
                *holds = other == UnitCongruence::Holds;
                Ok(())
            }
        }
    })
}

/// # Safety
/// `series` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_series_free(series: *mut PsSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}
