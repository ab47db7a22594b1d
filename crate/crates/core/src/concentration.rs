//! Lorenz curve, Gini coefficient, and top-share concentration measures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Sample;

/// Lorenz curve and its Gini coefficient.
///
/// Points run from (0, 0) to (1, 1): the k-th point is the money share held
/// by the poorest k members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorenzCurve {
    pub points: Vec<(f64, f64)>,
    pub gini: f64,
}

/// Lorenz curve of a sample, one point per member plus the origin.
///
/// The Gini coefficient comes from the same ascending-sorted array:
/// G = 2 Σ i·x_(i) / (n Σ x) − (n+1)/n.
pub fn lorenz(sample: &Sample) -> Result<LorenzCurve> {
    let mut sorted = sample.values().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    let total: f64 = sorted.iter().sum();

    let mut points = Vec::with_capacity(n + 1);
    points.push((0.0, 0.0));
    let mut acc = 0.0;
    for (k, x) in sorted.iter().enumerate() {
        acc += x;
        points.push(((k + 1) as f64 / n as f64, acc / total));
    }
    // Pin the endpoint exactly.
    points[n] = (1.0, 1.0);

    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, x)| (i + 1) as f64 * x)
        .sum();
    let nf = n as f64;
    let gini = 2.0 * weighted / (nf * total) - (nf + 1.0) / nf;

    Ok(LorenzCurve {
        points,
        gini: gini.max(0.0),
    })
}

/// Share of the total held by the top `ceil(fraction·n)` members.
pub fn top_share(sample: &Sample, fraction: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Domain(format!(
            "top-share fraction {fraction} outside (0, 1]"
        )));
    }
    let n = sample.len();
    // Guard the ceil against floating noise like 0.1 * 30 = 3.0000000000000004.
    let raw = fraction * n as f64;
    let k = if (raw - raw.round()).abs() < 1e-9 {
        raw.round() as usize
    } else {
        raw.ceil() as usize
    };
    let k = k.clamp(1, n);

    let mut sorted = sample.values().to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let top: f64 = sorted[..k].iter().sum();
    let total: f64 = sorted.iter().sum();
    Ok(top / total)
}

/// Smallest population fraction whose top members hold at least 80% of the
/// total (the "80-20 rule" check).
pub fn pareto_rule_check(sample: &Sample) -> Result<f64> {
    let mut sorted = sample.values().to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let total: f64 = sorted.iter().sum();
    let threshold = 0.8 * total;
    let eps = 1e-12 * total;

    let mut acc = 0.0;
    for (k, x) in sorted.iter().enumerate() {
        acc += x;
        if acc + eps >= threshold {
            return Ok((k + 1) as f64 / sorted.len() as f64);
        }
    }
    Ok(1.0)
}
