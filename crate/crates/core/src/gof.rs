//! Parametric-bootstrap Kolmogorov–Smirnov goodness-of-fit testing.
//!
//! Replicate samples are drawn from the fitted model with per-replicate seeds
//! derived from (seed, index), so the report is bit-identical for any worker
//! count and the p-value is an exact count over replicates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::seeding;
use crate::tailfit::{hill_exponent, FitFamily, TailFit, TailSelection};

/// Default replicate count.
pub const DEFAULT_REPLICATES: usize = 10_000;

/// Significance levels reported in `critical_values`.
pub const SIGNIFICANCE_LEVELS: [f64; 3] = [0.10, 0.05, 0.01];

const MIN_REPLICATES: usize = 100;

/// Whether each replicate is scored against the original fit or refitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefitMode {
    /// Score replicates against the single fitted model (default; mirrors
    /// simulating with "the estimated exponent").
    Fixed,
    /// Re-estimate the exponent on each replicate before scoring; the
    /// conservative standard when the exponent came from the data.
    Refit,
}

/// One significance level and the replicate KS quantile that goes with it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    pub significance: f64,
    pub ks_value: f64,
}

/// Bootstrap test report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub observed_ks: f64,
    pub n_replicates: usize,
    /// Fraction of replicate KS statistics ≥ the observed one.
    pub p_value: f64,
    /// Ordered by decreasing significance; values increase as significance drops.
    pub critical_values: Vec<CriticalValue>,
    pub refit_mode: RefitMode,
    /// Raw replicate statistics, kept for dumping and diagnostics.
    #[serde(skip)]
    pub replicate_ks: Vec<f64>,
}

/// Two-sided Kolmogorov–Smirnov statistic of the tail against a distribution:
/// sup over both branches of the empirical step function,
/// D = max_i max(|i/n − G(x_(i))|, |(i−1)/n − G(x_(i))|) with G = 1 − F.
pub fn ks_statistic(tail: &TailSelection, spec: &DistributionSpec) -> Result<f64> {
    if tail.n_tail == 0 {
        return Err(Error::EmptyInput("empty tail".into()));
    }
    let tol = 1e-9 * tail.cutoff.abs().max(1.0);
    if (spec.x_min() - tail.cutoff).abs() > tol {
        return Err(Error::CutoffMismatch {
            cutoff: tail.cutoff,
            x_min: spec.x_min(),
        });
    }
    ks_statistic_sorted(&tail.tail_values, spec)
}

/// `values` must be sorted ascending and lie within the spec's support.
fn ks_statistic_sorted(values: &[f64], spec: &DistributionSpec) -> Result<f64> {
    let n = values.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in values.iter().enumerate() {
        let g = 1.0 - spec.tail_function(*x)?;
        let upper = ((i + 1) as f64 / n - g).abs();
        let lower = (i as f64 / n - g).abs();
        d = d.max(upper.max(lower));
    }
    Ok(d)
}

/// Exact-count p-value with the ≥ convention: a hypothetical observed
/// statistic of zero maps to exactly 1.
pub fn p_value_from_replicates(observed: f64, replicates: &[f64]) -> f64 {
    let hits = replicates.iter().filter(|r| **r >= observed).count();
    hits as f64 / replicates.len() as f64
}

/// Parametric bootstrap: simulate `n_replicates` samples of the tail's size
/// from the fitted model and locate the observed KS statistic among them.
pub fn bootstrap_test(
    tail: &TailSelection,
    fit: &TailFit,
    n_replicates: usize,
    seed: u64,
    refit_mode: RefitMode,
) -> Result<BootstrapReport> {
    if n_replicates < MIN_REPLICATES {
        return Err(Error::Config(format!(
            "n_replicates = {n_replicates}, need at least {MIN_REPLICATES}"
        )));
    }
    if tail.n_tail == 0 {
        return Err(Error::EmptyInput("empty tail".into()));
    }
    let spec = spec_from_fit(fit, tail.cutoff)?;
    let observed_ks = ks_statistic(tail, &spec)?;

    let replicate_ks: Vec<f64> = (0..n_replicates)
        .into_par_iter()
        .map(|r| replicate_statistic(&spec, tail.n_tail, seeding::derive(seed, r as u64), refit_mode))
        .collect::<Result<Vec<f64>>>()?;

    let p_value = p_value_from_replicates(observed_ks, &replicate_ks);

    let mut sorted = replicate_ks.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let critical_values = SIGNIFICANCE_LEVELS
        .iter()
        .map(|sig| CriticalValue {
            significance: *sig,
            ks_value: percentile(&sorted, 1.0 - sig),
        })
        .collect();

    Ok(BootstrapReport {
        observed_ks,
        n_replicates,
        p_value,
        critical_values,
        refit_mode,
        replicate_ks,
    })
}

fn replicate_statistic(
    spec: &DistributionSpec,
    n: usize,
    seed: u64,
    refit_mode: RefitMode,
) -> Result<f64> {
    let replicate = spec.sample(n, seed)?;
    let mut values = replicate.values().to_vec();
    values.sort_unstable_by(f64::total_cmp);
    let scored_against = match refit_mode {
        RefitMode::Fixed => *spec,
        RefitMode::Refit => refit(spec, &values)?,
    };
    ks_statistic_sorted(&values, &scored_against)
}

/// Re-estimate the exponent on a replicate, keeping the known lower bound.
fn refit(spec: &DistributionSpec, sorted_values: &[f64]) -> Result<DistributionSpec> {
    match *spec {
        DistributionSpec::Pareto { x_min, .. } => {
            DistributionSpec::pareto(hill_exponent(sorted_values, x_min)?, x_min)
        }
        DistributionSpec::Exponential { x_min, .. } => {
            let mean = sorted_values.iter().sum::<f64>() / sorted_values.len() as f64;
            let excess = mean - x_min;
            if excess <= 0.0 {
                return Err(Error::ZeroVariance);
            }
            DistributionSpec::exponential(1.0 / excess, x_min)
        }
        DistributionSpec::QExponential { .. } => Err(Error::Config(
            "bootstrap refitting is defined for pareto and exponential fits only".into(),
        )),
    }
}

fn spec_from_fit(fit: &TailFit, cutoff: f64) -> Result<DistributionSpec> {
    match fit.family {
        FitFamily::Pareto => DistributionSpec::pareto(fit.exponent, cutoff),
        FitFamily::Exponential => DistributionSpec::exponential(fit.exponent, cutoff),
    }
}

/// Order-statistic percentile: the smallest value with at least `q·n`
/// replicates at or below it (ceil(q·n)-th order statistic).
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let idx = ((q * n as f64).ceil() as usize).clamp(1, n) - 1;
    sorted[idx]
}

impl BootstrapReport {
    /// Critical value at a significance level, if it was tabulated.
    pub fn critical_value(&self, significance: f64) -> Option<f64> {
        self.critical_values
            .iter()
            .find(|cv| (cv.significance - significance).abs() < 1e-12)
            .map(|cv| cv.ks_value)
    }
}
