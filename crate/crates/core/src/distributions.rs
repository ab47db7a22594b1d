//! Analytic reference distributions: exponential (Maxwell–Boltzmann), Pareto
//! power law, and the Tsallis q-exponential, each with tail function, density,
//! and seeded inverse-transform sampling.
//!
//! Throughout, the "tail function" is F(x) = P(X ≥ x), so F(x_min) = 1 and the
//! density is the magnitude of its derivative.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Sample, SampleKind};

/// A fully parameterized distribution on [x_min, ∞).
///
/// The q-exponential is the tail family solving the Tsallis maximum-entropy
/// problem: density ∝ (1 + (q−1)(x−x_min)/scale)^(−1/(q−1)), which gives a
/// tail function decaying with exponent (2−q)/(q−1) = 1/(q−1) − 1. It
/// recovers the exponential with rate 1/scale as q → 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistributionSpec {
    Exponential { beta: f64, x_min: f64 },
    Pareto { alpha: f64, x_min: f64 },
    QExponential { q: f64, scale: f64, x_min: f64 },
}

impl DistributionSpec {
    pub fn exponential(beta: f64, x_min: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "rate must be strictly positive",
            });
        }
        if !(x_min >= 0.0) || !x_min.is_finite() {
            return Err(Error::InvalidParameter {
                name: "x_min",
                value: x_min,
                reason: "support lower bound must be non-negative",
            });
        }
        Ok(Self::Exponential { beta, x_min })
    }

    pub fn pareto(alpha: f64, x_min: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "tail exponent must be strictly positive",
            });
        }
        if !(x_min > 0.0) || !x_min.is_finite() {
            return Err(Error::InvalidParameter {
                name: "x_min",
                value: x_min,
                reason: "power-law support needs a strictly positive lower bound",
            });
        }
        Ok(Self::Pareto { alpha, x_min })
    }

    /// `q` must lie in (1, 2): below 1 the tail is not heavy, at 2 and above
    /// the density is no longer normalizable.
    pub fn q_exponential(q: f64, scale: f64, x_min: f64) -> Result<Self> {
        if !(q > 1.0 && q < 2.0) {
            return Err(Error::InvalidParameter {
                name: "q",
                value: q,
                reason: "entropic index must lie in (1, 2)",
            });
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParameter {
                name: "scale",
                value: scale,
                reason: "scale must be strictly positive",
            });
        }
        if !(x_min >= 0.0) || !x_min.is_finite() {
            return Err(Error::InvalidParameter {
                name: "x_min",
                value: x_min,
                reason: "support lower bound must be non-negative",
            });
        }
        Ok(Self::QExponential { q, scale, x_min })
    }

    pub fn x_min(&self) -> f64 {
        match *self {
            Self::Exponential { x_min, .. }
            | Self::Pareto { x_min, .. }
            | Self::QExponential { x_min, .. } => x_min,
        }
    }

    /// The fitted exponent in the family's usual convention (β or α);
    /// for the q-exponential, the asymptotic tail exponent (2−q)/(q−1).
    pub fn exponent(&self) -> f64 {
        match *self {
            Self::Exponential { beta, .. } => beta,
            Self::Pareto { alpha, .. } => alpha,
            Self::QExponential { q, .. } => (2.0 - q) / (q - 1.0),
        }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if x < self.x_min() || !x.is_finite() {
            return Err(Error::Domain(format!(
                "x = {x} below support lower bound {}",
                self.x_min()
            )));
        }
        Ok(())
    }

    /// Tail function F(x) = P(X ≥ x); equals 1 at x_min and is non-increasing.
    pub fn tail_function(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(match *self {
            Self::Exponential { beta, x_min } => (-beta * (x - x_min)).exp(),
            Self::Pareto { alpha, x_min } => (x / x_min).powf(-alpha),
            Self::QExponential { q, scale, x_min } => {
                let y = (x - x_min) / scale;
                // (1 + (q−1)y)^(−(2−q)/(q−1)), stable near q = 1 via ln1p.
                let ln_base = ((q - 1.0) * y).ln_1p();
                (-(2.0 - q) / (q - 1.0) * ln_base).exp()
            }
        })
    }

    /// Probability density at x (the magnitude of the tail-function slope).
    pub fn density(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(match *self {
            Self::Exponential { beta, x_min } => beta * (-beta * (x - x_min)).exp(),
            Self::Pareto { alpha, x_min } => alpha / x_min * (x / x_min).powf(-alpha - 1.0),
            Self::QExponential { q, scale, x_min } => {
                let y = (x - x_min) / scale;
                let ln_base = ((q - 1.0) * y).ln_1p();
                (2.0 - q) / scale * (-1.0 / (q - 1.0) * ln_base).exp()
            }
        })
    }

    /// Inverse of the tail function: the x with F(x) = u, for u in (0, 1].
    ///
    /// This is the inverse transform used by [`sample`](Self::sample).
    pub fn quantile_tail(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(Error::Domain(format!(
                "tail probability u = {u} outside (0, 1]"
            )));
        }
        Ok(match *self {
            Self::Exponential { beta, x_min } => x_min - u.ln() / beta,
            Self::Pareto { alpha, x_min } => x_min * u.powf(-1.0 / alpha),
            Self::QExponential { q, scale, x_min } => {
                // Invert u = (1 + (q−1)y/s)^(−(2−q)/(q−1)).
                let p = (q - 1.0) / (2.0 - q);
                let y = scale / (q - 1.0) * (u.powf(-p) - 1.0);
                x_min + y
            }
        })
    }

    /// Draw `n` values by inverse transform from a ChaCha stream seeded with
    /// `seed`. Identical (spec, n, seed) always yields identical output.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Sample> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: 0.0,
                reason: "sample size must be at least 1",
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            // 1 − U maps [0,1) onto (0,1], keeping the inverse finite.
            let u = 1.0 - rng.gen::<f64>();
            values.push(self.quantile_tail(u)?);
        }
        Sample::new(values, SampleKind::Revenues, "synthetic")
    }
}
