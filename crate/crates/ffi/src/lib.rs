//! C ABI for the heavytail analysis library.
//!
//! Samples travel as opaque handles created from raw `double` buffers; fits
//! and reports come back through plain C structs. Every fallible call returns
//! an [`HtStatus`]; on failure a thread-local message with the details is
//! available from [`ht_last_error_message`] until the next failing call on
//! the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::ptr;
use std::slice;

use heavytail::distributions::DistributionSpec;
use heavytail::error::Error;
use heavytail::gof::{self, RefitMode};
use heavytail::ingest::{self, Sample, SampleKind};
use heavytail::maxent::{self, EntropyKind, MaxEntProblem};
use heavytail::tailfit::{self, FitFamily, FitMethod, TailFit};
use heavytail::{concentration, seeding};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtStatus {
    HtOk = 0,
    HtNullPointer = 1,
    HtInvalidArgument = 2,
    HtInsufficientTail = 3,
    HtZeroVariance = 4,
    HtInfeasible = 5,
    HtSolverFailure = 6,
    HtDomainError = 7,
    HtConfigError = 8,
}

/// Distribution family of a fit or generator.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtFamily {
    HtFamilyExponential = 0,
    HtFamilyPareto = 1,
    HtFamilyQExponential = 2,
}

/// Estimation method of a fit.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtMethod {
    HtMethodRegression = 0,
    HtMethodMle = 1,
}

/// Entropy functional selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtEntropy {
    HtEntropyShannon = 0,
    HtEntropyTsallis = 1,
}

/// A fitted tail model. `r_squared` is NaN for maximum-likelihood fits.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HtTailFit {
    pub family: HtFamily,
    pub method: HtMethod,
    pub exponent: f64,
    pub cutoff: f64,
    pub r_squared: f64,
    pub std_error: f64,
}

/// Rank-size regression result.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HtZipfFit {
    pub gamma: f64,
    pub top_k: usize,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Parametric-bootstrap KS report. Critical values are the replicate KS
/// quantiles at the 10%, 5%, and 1% significance levels.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HtBootstrapReport {
    pub observed_ks: f64,
    pub n_replicates: usize,
    pub p_value: f64,
    pub critical_10: f64,
    pub critical_05: f64,
    pub critical_01: f64,
}

/// Opaque sample handle.
pub struct HtSample {
    inner: Sample,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: HtStatus, message: String) -> HtStatus {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).ok();
    });
    status
}

fn fail_error(err: Error) -> HtStatus {
    let status = match &err {
        Error::InsufficientTail { .. } => HtStatus::HtInsufficientTail,
        Error::ZeroVariance => HtStatus::HtZeroVariance,
        Error::Infeasible { .. } => HtStatus::HtInfeasible,
        Error::SolverFailure(_) | Error::DivergentEstimate => HtStatus::HtSolverFailure,
        Error::Domain(_) | Error::CutoffMismatch { .. } | Error::RankRange { .. } => {
            HtStatus::HtDomainError
        }
        Error::Config(_) => HtStatus::HtConfigError,
        _ => HtStatus::HtInvalidArgument,
    };
    fail(status, err.to_string())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ht_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ht_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |msg| msg.as_ptr())
    })
}

/// Create a sample from `len` positive values.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` to a writable
/// pointer slot. Free the handle with [`ht_sample_free`].
#[no_mangle]
pub unsafe extern "C" fn ht_sample_new(
    values: *const f64,
    len: usize,
    out: *mut *mut HtSample,
) -> HtStatus {
    if values.is_null() || out.is_null() {
        return fail(HtStatus::HtNullPointer, "null pointer argument".into());
    }
    let data = slice::from_raw_parts(values, len).to_vec();
    match Sample::new(data, SampleKind::Revenues, "ffi") {
        Ok(sample) => {
            *out = Box::into_raw(Box::new(HtSample { inner: sample }));
            HtStatus::HtOk
        }
        Err(e) => fail_error(e),
    }
}

/// Release a sample handle. NULL is ignored.
///
/// # Safety
/// `sample` must be a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ht_sample_free(sample: *mut HtSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Number of values in a sample.
///
/// # Safety
/// `sample` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ht_sample_len(sample: *const HtSample) -> usize {
    if sample.is_null() {
        return 0;
    }
    (*sample).inner.len()
}

/// Divide every value by the sample standard deviation (n−1 denominator),
/// producing a new handle and reporting the scale divided out.
///
/// # Safety
/// Pointer arguments as in [`ht_sample_new`].
#[no_mangle]
pub unsafe extern "C" fn ht_sample_standardize(
    sample: *const HtSample,
    out: *mut *mut HtSample,
    out_scale: *mut f64,
) -> HtStatus {
    if sample.is_null() || out.is_null() || out_scale.is_null() {
        return fail(HtStatus::HtNullPointer, "null pointer argument".into());
    }
    match ingest::standardize(&(*sample).inner) {
        Ok((standardized, scale)) => {
            *out = Box::into_raw(Box::new(HtSample {
                inner: standardized,
            }));
            *out_scale = scale;
            HtStatus::HtOk
        }
        Err(e) => fail_error(e),
    }
}

fn tail_fit_out(fit: TailFit) -> HtTailFit {
    HtTailFit {
        family: match fit.family {
            FitFamily::Exponential => HtFamily::HtFamilyExponential,
            FitFamily::Pareto => HtFamily::HtFamilyPareto,
        },
        method: match fit.method {
            FitMethod::Regression => HtMethod::HtMethodRegression,
            FitMethod::Mle => HtMethod::HtMethodMle,
        },
        exponent: fit.exponent,
        cutoff: fit.cutoff,
        r_squared: fit.r_squared.unwrap_or(f64::NAN),
        std_error: fit.std_error,
    }
}

/// Hill/MLE power-law fit on the values at or above `cutoff`.
///
/// # Safety
/// `sample` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ht_fit_power_mle(
    sample: *const HtSample,
    cutoff: f64,
    out: *mut HtTailFit,
) -> HtStatus {
    if sample.is_null() || out.is_null() {
        return fail(HtStatus::HtNullPointer, "null pointer argument".into());
    }
    let result =
        tailfit::select_tail(&(*sample).inner, cutoff).and_then(|tail| tailfit::fit_power_mle(&tail));
    match result {
        Ok(fit) => {
            *out = tail_fit_out(fit);
            HtStatus::HtOk
        }
        Err(e) => fail_error(e),
    }
}

/// Log-log tail regression on the values at or above `cutoff`.
///
/// # Safety
/// As [`ht_fit_power_mle`].
#[no_mangle]
pub unsafe extern "C" fn ht_fit_power_regression(
    sample: *const HtSample,
    cutoff: f64,
    out: *mut HtTailFit,
) -> HtStatus {
    if sample.is_null() || out.is_null() {
        return fail(HtStatus::HtNullPointer, "null pointer argument".into());
    }
    let result = tailfit::select_tail(&(*sample).inner, cutoff)
        .and_then(|tail| tailfit::fit_power_regression(&tail));
    match result {
        Ok(fit) => {
            *out = tail_fit_out(fit);
            HtStatus::HtOk
        }
        Err(e) => fail_error(e),
    }
}

/// Exponential fit: fixed-intercept regression when `has_fixed_intercept`,
/// otherwise the shifted-exponential MLE.
///
/// # Safety
/// As [`ht_fit_power_mle`].
#[no_mangle]
pub unsafe extern "C" fn ht_fit_exponential(
    sample: *const HtSample,
    has_fixed_intercept: bool,
    fixed_intercept_at: f64,
    out: *mut HtTailFit,
) -> HtStatus {
    if sample.is_null() || out.is_null() {
        return fail(HtStatus::HtNullPointer, "null pointer argument".into());
    }
    let intercept = has_fixed_intercept.then_some(fixed_intercept_at);
    match tailfit::fit_exponential(&(*sample).inner, intercept) {
        Ok(fit) => {
            *out = tail_fit_out(fit);
            HtStatus::HtOk
        }
        Err(e) => fail_error(e),
    }
}

/// Rank-size regression over the `top_k` largest values.
///
/// # Safety
/// As [`ht_fit_power_mle`].
#[no_mangle]
pub unsafe extern "C" fn ht_fit_zipf(
    sample: *const HtSample,
    top_k: usize,
    out: *mut HtZipfFit,
) -> HtStatus {
    if sample.is_null() || out.is_null() {
        return fail(HtStatus::HtNullPointer, "null pointer argument".into());
    }
    match tailfit::fit_zipf(&(*sample).inner, top_k) {
        Ok(fit) => {
            *out = HtZipfFit {
                gamma: fit.gamma,
                top_k: fit.top_k,
                intercept: fit.intercept,
                r_squared: fit.r_squared,
            };
            HtStatus::HtOk
        }
        Err(e) => fail_error(e),
    }
}

/// Two-sided KS statistic of the tail at or above `cutoff` against a fitted
/// family with the given exponent anchored at the cutoff.
///
/// # Safety
/// As [`ht_fit_power_mle`].
#[no_mangle]
pub unsafe extern "C" fn ht_ks_statistic(
    sample: *const HtSample,
    cutoff: f64,
    family: HtFamily,
    exponent: f64,
    out: *mut f64,
) -> HtStatus {
    if sample.is_null() || out.is_null() {
        return fail(HtStatus::HtNullPointer, "null pointer argument".into());
    }
    let result = spec_for(family, exponent, cutoff).and_then(|spec| {
        let tail = tailfit::select_tail(&(*sample).inner, cutoff)?;
        gof::ks_statistic(&tail, &spec)
    });
    match result {
        Ok(d) => {
            *out = d;
            HtStatus::HtOk
        }
        Err(e) => fail_error(e),
    }
}

/// Parametric-bootstrap KS test of the tail at or above `fit.cutoff`.
///
/// # Safety
/// `fit` must point to a readable fit struct; other pointers as in
/// [`ht_fit_power_mle`].
#[no_mangle]
pub unsafe extern "C" fn ht_bootstrap_test(
    sample: *const HtSample,
    fit: *const HtTailFit,
    n_replicates: usize,
    seed: u64,
    refit: bool,
    out: *mut HtBootstrapReport,
) -> HtStatus {
    if sample.is_null() || fit.is_null() || out.is_null() {
        return fail(HtStatus::HtNullPointer, "null pointer argument".into());
    }
    let c_fit = *fit;
    let family = match c_fit.family {
        HtFamily::HtFamilyExponential => FitFamily::Exponential,
        HtFamily::HtFamilyPareto => FitFamily::Pareto,
        HtFamily::HtFamilyQExponential => {
            return fail(
                HtStatus::HtConfigError,
                "bootstrap supports exponential and pareto fits".into(),
            )
        }
    };
    let tail_fit = TailFit {
        family,
        method: match c_fit.method {
            HtMethod::HtMethodRegression => FitMethod::Regression,
            HtMethod::HtMethodMle => FitMethod::Mle,
        },
        exponent: c_fit.exponent,
        cutoff: c_fit.cutoff,
        r_squared: if c_fit.r_squared.is_nan() {
            None
        } else {
            Some(c_fit.r_squared)
        },
        std_error: c_fit.std_error,
    };
    let mode = if refit {
        RefitMode::Refit
    } else {
        RefitMode::Fixed
    };
    let result = tailfit::select_tail(&(*sample).inner, c_fit.cutoff)
        .and_then(|tail| gof::bootstrap_test(&tail, &tail_fit, n_replicates, seed, mode));
    match result {
        Ok(report) => {
            *out = HtBootstrapReport {
                observed_ks: report.observed_ks,
                n_replicates: report.n_replicates,
                p_value: report.p_value,
                critical_10: report.critical_value(0.10).unwrap_or(f64::NAN),
                critical_05: report.critical_value(0.05).unwrap_or(f64::NAN),
                critical_01: report.critical_value(0.01).unwrap_or(f64::NAN),
            };
            HtStatus::HtOk
        }
        Err(e) => fail_error(e),
    }
}

/// Gini coefficient of the sample.
///
/// # Safety
/// As [`ht_fit_power_mle`].
#[no_mangle]
pub unsafe extern "C" fn ht_gini(sample: *const HtSample, out: *mut f64) -> HtStatus {
    if sample.is_null() || out.is_null() {
        return fail(HtStatus::HtNullPointer, "null pointer argument".into());
    }
    match concentration::lorenz(&(*sample).inner) {
        Ok(curve) => {
            *out = curve.gini;
            HtStatus::HtOk
        }
        Err(e) => fail_error(e),
    }
}

/// Share of the total held by the top `fraction` of the population.
///
/// # Safety
/// As [`ht_fit_power_mle`].
#[no_mangle]
pub unsafe extern "C" fn ht_top_share(
    sample: *const HtSample,
    fraction: f64,
    out: *mut f64,
) -> HtStatus {
    if sample.is_null() || out.is_null() {
        return fail(HtStatus::HtNullPointer, "null pointer argument".into());
    }
    match concentration::top_share(&(*sample).inner, fraction) {
        Ok(share) => {
            *out = share;
            HtStatus::HtOk
        }
        Err(e) => fail_error(e),
    }
}

/// Smallest population fraction holding at least 80% of the total.
///
/// # Safety
/// As [`ht_fit_power_mle`].
#[no_mangle]
pub unsafe extern "C" fn ht_pareto_rule(sample: *const HtSample, out: *mut f64) -> HtStatus {
    if sample.is_null() || out.is_null() {
        return fail(HtStatus::HtNullPointer, "null pointer argument".into());
    }
    match concentration::pareto_rule_check(&(*sample).inner) {
        Ok(p80) => {
            *out = p80;
            HtStatus::HtOk
        }
        Err(e) => fail_error(e),
    }
}

fn spec_for(family: HtFamily, param: f64, x_min: f64) -> Result<DistributionSpec, Error> {
    match family {
        HtFamily::HtFamilyExponential => DistributionSpec::exponential(param, x_min),
        HtFamily::HtFamilyPareto => DistributionSpec::pareto(param, x_min),
        HtFamily::HtFamilyQExponential => DistributionSpec::q_exponential(param, 1.0, x_min),
    }
}

/// Draw `n` values by seeded inverse transform into a caller buffer.
/// For the q-exponential, `param` is the entropic index and the scale is 1.
///
/// # Safety
/// `out_values` must point to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ht_distribution_sample(
    family: HtFamily,
    param: f64,
    x_min: f64,
    n: usize,
    seed: u64,
    out_values: *mut f64,
) -> HtStatus {
    if out_values.is_null() {
        return fail(HtStatus::HtNullPointer, "null pointer argument".into());
    }
    let result = spec_for(family, param, x_min).and_then(|spec| spec.sample(n, seed));
    match result {
        Ok(sample) => {
            let out = slice::from_raw_parts_mut(out_values, n);
            out.copy_from_slice(sample.values());
            HtStatus::HtOk
        }
        Err(e) => fail_error(e),
    }
}

/// Solve a constrained maximum-entropy problem over `n_levels` strictly
/// increasing positive levels. Probabilities land in `out_probabilities`
/// (length `n_levels`); the Lagrange multipliers land in `out_kappa` and
/// `out_lambda`. For Shannon entropy `q` is ignored.
///
/// # Safety
/// `levels` must point to `n_levels` readable doubles and `out_probabilities`
/// to as many writable ones; the multiplier pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ht_maxent_solve(
    levels: *const f64,
    n_levels: usize,
    target_mean: f64,
    entropy: HtEntropy,
    q: f64,
    out_probabilities: *mut f64,
    out_kappa: *mut f64,
    out_lambda: *mut f64,
) -> HtStatus {
    if levels.is_null() || out_probabilities.is_null() || out_kappa.is_null() || out_lambda.is_null()
    {
        return fail(HtStatus::HtNullPointer, "null pointer argument".into());
    }
    let level_vec = slice::from_raw_parts(levels, n_levels).to_vec();
    let kind = match entropy {
        HtEntropy::HtEntropyShannon => EntropyKind::Shannon,
        HtEntropy::HtEntropyTsallis => EntropyKind::Tsallis { q },
    };
    let result = MaxEntProblem::new(level_vec, target_mean, kind).and_then(|p| maxent::solve(&p));
    match result {
        Ok(solution) => {
            let out = slice::from_raw_parts_mut(out_probabilities, n_levels);
            out.copy_from_slice(&solution.probabilities);
            *out_kappa = solution.kappa;
            *out_lambda = solution.lambda;
            HtStatus::HtOk
        }
        Err(e) => fail_error(e),
    }
}

/// Derive the deterministic seed for stream `index` from `base`; matches the
/// scheme the bootstrap uses for its replicate streams.
#[no_mangle]
pub extern "C" fn ht_derive_seed(base: u64, index: u64) -> u64 {
    seeding::derive(base, index)
}
