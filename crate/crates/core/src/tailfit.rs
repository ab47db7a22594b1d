//! Tail selection and exponent estimation: Hill/MLE and log-log cdf
//! regression for the power law, fixed-intercept and MLE fits for the
//! exponential, and rank-size regression for Zipf's law.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Sample;

/// Fits on fewer tail points than this abort instead of extrapolating.
pub const MIN_TAIL_POINTS: usize = 10;

/// Default tail cutoff in standardized units: one standard deviation.
pub const DEFAULT_CUTOFF: f64 = 1.0;

/// Default number of top ranks entering the Zipf regression.
pub const DEFAULT_TOP_K: usize = 100;

/// The retained upper tail of a sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailSelection {
    pub cutoff: f64,
    pub n_total: usize,
    pub n_tail: usize,
    /// Tail values sorted ascending; every value ≥ cutoff.
    pub tail_values: Vec<f64>,
}

/// Which distribution family a fit belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFamily {
    Exponential,
    Pareto,
}

/// How the exponent was estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Regression,
    Mle,
}

/// A fitted tail model: α for the power law or β for the exponential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub family: FitFamily,
    pub method: FitMethod,
    pub exponent: f64,
    pub cutoff: f64,
    /// Present for regression fits only.
    pub r_squared: Option<f64>,
    pub std_error: f64,
}

/// Rank-size regression result: magnitude ∝ rank^(−γ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZipfFit {
    pub gamma: f64,
    pub top_k: usize,
    /// Fitted ln(value) at ln(rank) = 0, i.e. the log of the rank-1 level.
    pub intercept: f64,
    pub r_squared: f64,
}

/// Keep the values at or above `cutoff`, sorted ascending.
///
/// Selection itself never fails on small tails; the fit operations enforce
/// [`MIN_TAIL_POINTS`].
pub fn select_tail(sample: &Sample, cutoff: f64) -> Result<TailSelection> {
    if !(cutoff >= 0.0) || !cutoff.is_finite() {
        return Err(Error::InvalidParameter {
            name: "cutoff",
            value: cutoff,
            reason: "cutoff must be non-negative",
        });
    }
    let mut tail_values: Vec<f64> = sample
        .values()
        .iter()
        .copied()
        .filter(|v| *v >= cutoff)
        .collect();
    tail_values.sort_unstable_by(f64::total_cmp);
    Ok(TailSelection {
        cutoff,
        n_total: sample.len(),
        n_tail: tail_values.len(),
        tail_values,
    })
}

/// Raw Hill/MLE exponent for a continuous Pareto above a fixed cutoff:
/// α̂ = n / Σ ln(x_i / cutoff). No minimum-count floor; see [`fit_power_mle`].
pub fn hill_exponent(values: &[f64], cutoff: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("no tail values".into()));
    }
    if !(cutoff > 0.0) {
        return Err(Error::InvalidParameter {
            name: "cutoff",
            value: cutoff,
            reason: "power-law cutoff must be strictly positive",
        });
    }
    let log_sum: f64 = values.iter().map(|x| (x / cutoff).ln()).sum();
    if log_sum <= 0.0 {
        return Err(Error::DivergentEstimate);
    }
    Ok(values.len() as f64 / log_sum)
}

/// Maximum-likelihood power-law fit on the selected tail.
pub fn fit_power_mle(tail: &TailSelection) -> Result<TailFit> {
    require_tail(tail)?;
    let exponent = hill_exponent(&tail.tail_values, tail.cutoff)?;
    Ok(TailFit {
        family: FitFamily::Pareto,
        method: FitMethod::Mle,
        exponent,
        cutoff: tail.cutoff,
        r_squared: None,
        std_error: exponent / (tail.n_tail as f64).sqrt(),
    })
}

/// Log-log regression of the empirical tail function, mirroring a graphical
/// cdf fit: ln F_emp(x_(i)) on ln x_(i) with F_emp(x_(i)) = (n−i+1)/n for
/// ascending-sorted values. The exponent is the negated slope.
pub fn fit_power_regression(tail: &TailSelection) -> Result<TailFit> {
    require_tail(tail)?;
    let n = tail.n_tail as f64;
    let points: Vec<(f64, f64)> = tail
        .tail_values
        .iter()
        .enumerate()
        .map(|(i, x)| (x.ln(), ((n - i as f64) / n).ln()))
        .collect();
    let ols = ols_fit(&points)?;
    if !(-ols.slope > 0.0) {
        return Err(Error::DivergentEstimate);
    }
    Ok(TailFit {
        family: FitFamily::Pareto,
        method: FitMethod::Regression,
        exponent: -ols.slope,
        cutoff: tail.cutoff,
        r_squared: Some(ols.r_squared),
        std_error: ols.slope_se,
    })
}

/// Exponential fit.
///
/// With `fixed_intercept_at = Some(b0)` this is the graphical fit with the
/// tail function pinned to 1 at b0: a through-origin regression of
/// ln F_emp(v) on (v − b0) over the distinct sample values, where
/// F_emp(v) = #{x ≥ v}/n. Without it, the shifted-exponential MLE
/// β̂ = 1/(mean − min).
pub fn fit_exponential(sample: &Sample, fixed_intercept_at: Option<f64>) -> Result<TailFit> {
    match fixed_intercept_at {
        Some(b0) => fit_exponential_fixed(sample, b0),
        None => fit_exponential_mle(sample),
    }
}

fn fit_exponential_mle(sample: &Sample) -> Result<TailFit> {
    let min = sample.min();
    let excess = sample.mean() - min;
    if excess <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let exponent = 1.0 / excess;
    Ok(TailFit {
        family: FitFamily::Exponential,
        method: FitMethod::Mle,
        exponent,
        cutoff: min,
        r_squared: None,
        std_error: exponent / (sample.len() as f64).sqrt(),
    })
}

fn fit_exponential_fixed(sample: &Sample, b0: f64) -> Result<TailFit> {
    let mut sorted = sample.values().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    if sorted[0] < b0 {
        return Err(Error::Domain(format!(
            "fixed intercept {b0} exceeds the sample minimum {}",
            sorted[0]
        )));
    }
    let n = sorted.len() as f64;

    // One point per distinct value: (v − b0, ln(#{x ≥ v}/n)).
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let tail_prob = (sorted.len() - i) as f64 / n;
        points.push((v - b0, tail_prob.ln()));
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        i = j;
    }

    let (slope, se, r2) = ols_through_origin(&points)?;
    if !(-slope > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok(TailFit {
        family: FitFamily::Exponential,
        method: FitMethod::Regression,
        exponent: -slope,
        cutoff: b0,
        r_squared: Some(r2),
        std_error: se,
    })
}

/// Rank-size regression over the `top_k` largest values:
/// ln(value) on ln(rank), γ = −slope. Ties keep first-appearance order.
pub fn fit_zipf(sample: &Sample, top_k: usize) -> Result<ZipfFit> {
    if top_k < 3 {
        return Err(Error::InvalidParameter {
            name: "top_k",
            value: top_k as f64,
            reason: "rank-size regression needs at least 3 ranks",
        });
    }
    if top_k > sample.len() {
        return Err(Error::RankRange {
            top_k,
            n: sample.len(),
        });
    }
    let mut sorted = sample.values().to_vec();
    // Stable sort: ties stay in order of first appearance.
    sorted.sort_by(|a, b| b.total_cmp(a));
    let points: Vec<(f64, f64)> = sorted[..top_k]
        .iter()
        .enumerate()
        .map(|(i, v)| (((i + 1) as f64).ln(), v.ln()))
        .collect();
    let ols = ols_fit(&points)?;
    if !(-ols.slope > 0.0) {
        return Err(Error::Domain(
            "rank-size regression has no decay: non-negative slope".into(),
        ));
    }
    Ok(ZipfFit {
        gamma: -ols.slope,
        top_k,
        intercept: ols.intercept,
        r_squared: ols.r_squared,
    })
}

fn require_tail(tail: &TailSelection) -> Result<()> {
    if tail.n_tail < MIN_TAIL_POINTS {
        return Err(Error::InsufficientTail {
            n_tail: tail.n_tail,
            min: MIN_TAIL_POINTS,
        });
    }
    if !(tail.cutoff > 0.0) {
        return Err(Error::InvalidParameter {
            name: "cutoff",
            value: tail.cutoff,
            reason: "power-law fits need a strictly positive cutoff",
        });
    }
    Ok(())
}

struct Ols {
    slope: f64,
    intercept: f64,
    r_squared: f64,
    slope_se: f64,
}

fn ols_fit(points: &[(f64, f64)]) -> Result<Ols> {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    if sxx <= 0.0 {
        return Err(Error::DivergentEstimate);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = points.iter().map(|(_, y)| (y - mean_y) * (y - mean_y)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let slope_se = if points.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(Ols {
        slope,
        intercept,
        r_squared,
        slope_se,
    })
}

/// Through-origin least squares; r² is the uncentered version
/// 1 − Σe²/Σy², appropriate when the intercept is pinned by construction.
fn ols_through_origin(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    let szz: f64 = points.iter().map(|(z, _)| z * z).sum();
    if szz <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let szy: f64 = points.iter().map(|(z, y)| z * y).sum();
    let slope = szy / szz;
    let ss_res: f64 = points
        .iter()
        .map(|(z, y)| {
            let e = y - slope * z;
            e * e
        })
        .sum();
    let ss_tot: f64 = points.iter().map(|(_, y)| y * y).sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let n = points.len() as f64;
    let se = if points.len() > 1 {
        (ss_res / (n - 1.0) / szz).sqrt()
    } else {
        0.0
    };
    Ok((slope, se, r_squared))
}
