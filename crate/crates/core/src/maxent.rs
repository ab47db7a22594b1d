//! Constrained maximum-entropy solvers on a discrete level grid.
//!
//! Maximizing Shannon entropy under a normalization and a mean constraint
//! yields the Boltzmann form p_i ∝ exp(−κ m_i). Maximizing Tsallis entropy
//! S_q under the same constraints makes p_i^(q−1) affine in the level, so the
//! solution is the generalized-exponential family
//!
//!   p_i ∝ (1 − (q−1) θ m_i)^(1/(q−1)),
//!
//! which recovers the Boltzmann solution as q → 1 and decays as the power law
//! m^(−1/(1−q)) for q < 1. The same family is conventionally written with the
//! dual index q̃ = 2 − q as p ∝ (A + κ m)^(−1/(q̃−1)); under that labeling the
//! heavy-tail range is q̃ > 1 and the tail function of the solved distribution
//! falls with exponent 1/(q̃−1) − 1. Solvers find the multipliers by bracketed
//! root-finding on the mean constraint, which is monotone in the tilt.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Sample, SampleKind};

/// Relative tolerance on the achieved mean.
pub const MEAN_TOLERANCE: f64 = 1e-10;

/// Default level-grid size when none is supplied.
pub const DEFAULT_LEVELS: usize = 64;

/// Entropy functional being maximized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntropyKind {
    Shannon,
    Tsallis { q: f64 },
}

/// A discrete constrained maximum-entropy problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxEntProblem {
    levels: Vec<f64>,
    target_mean: f64,
    entropy: EntropyKind,
}

impl MaxEntProblem {
    pub fn new(levels: Vec<f64>, target_mean: f64, entropy: EntropyKind) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "levels",
                value: levels.len() as f64,
                reason: "need at least two money levels",
            });
        }
        if levels.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "levels",
                value: f64::NAN,
                reason: "levels must be finite and strictly positive",
            });
        }
        if levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter {
                name: "levels",
                value: f64::NAN,
                reason: "levels must be strictly increasing",
            });
        }
        if let EntropyKind::Tsallis { q } = entropy {
            if !(q > 0.0) || q == 1.0 || !q.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "q",
                    value: q,
                    reason: "entropic index must be positive and different from 1",
                });
            }
        }
        let (min, max) = (levels[0], levels[levels.len() - 1]);
        if !(target_mean > min && target_mean < max) {
            return Err(Error::Infeasible {
                target: target_mean,
                min,
                max,
            });
        }
        Ok(Self {
            levels,
            target_mean,
            entropy,
        })
    }

    /// Logarithmically spaced level grid, the default when data gives only a
    /// range.
    pub fn log_levels(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
        if !(min > 0.0 && max > min) || count < 2 {
            return Err(Error::InvalidParameter {
                name: "levels",
                value: count as f64,
                reason: "log grid needs 0 < min < max and at least two levels",
            });
        }
        let (a, b) = (min.ln(), max.ln());
        let mut levels: Vec<f64> = (0..count)
            .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
            .collect();
        // Pin endpoints exactly against rounding in exp/ln.
        levels[0] = min;
        levels[count - 1] = max;
        Ok(levels)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn target_mean(&self) -> f64 {
        self.target_mean
    }

    pub fn entropy(&self) -> EntropyKind {
        self.entropy
    }
}

/// A solved distribution over the problem's levels, with the Lagrange
/// multipliers of the mean constraint (κ) and normalization (λ).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxEntSolution {
    pub levels: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub kappa: f64,
    pub lambda: f64,
    pub achieved_mean: f64,
    pub entropy_value: f64,
    pub entropy: EntropyKind,
}

/// Entropy of a probability vector under the given functional.
///
/// Shannon uses the 0·log 0 := 0 convention; Tsallis is (1 − Σ pᵠ)/(q − 1).
pub fn entropy_value(probabilities: &[f64], entropy: EntropyKind) -> Result<f64> {
    if probabilities.is_empty() {
        return Err(Error::InvalidProbabilities("empty vector".into()));
    }
    if probabilities.iter().any(|p| *p < 0.0 || !p.is_finite()) {
        return Err(Error::InvalidProbabilities(
            "probabilities must be finite and non-negative".into(),
        ));
    }
    let sum: f64 = probabilities.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProbabilities(format!(
            "probabilities sum to {sum}, not 1"
        )));
    }
    Ok(match entropy {
        EntropyKind::Shannon => probabilities
            .iter()
            .filter(|p| **p > 0.0)
            .map(|p| -p * p.ln())
            .sum(),
        EntropyKind::Tsallis { q } => {
            let power_sum: f64 = probabilities.iter().map(|p| p.powf(q)).sum();
            (1.0 - power_sum) / (q - 1.0)
        }
    })
}

/// Solve whichever problem was posed.
pub fn solve(problem: &MaxEntProblem) -> Result<MaxEntSolution> {
    match problem.entropy {
        EntropyKind::Shannon => solve_shannon(problem),
        EntropyKind::Tsallis { .. } => solve_tsallis(problem),
    }
}

/// Shannon case: p_i ∝ exp(−κ m_i), κ found by bisection on the mean.
pub fn solve_shannon(problem: &MaxEntProblem) -> Result<MaxEntSolution> {
    if !matches!(problem.entropy, EntropyKind::Shannon) {
        return Err(Error::Config("problem is not a Shannon problem".into()));
    }
    let m = &problem.levels;
    let target = problem.target_mean;

    // The mean under p(κ) falls strictly from max(m) to min(m) as κ grows.
    let state = |kappa: f64| boltzmann_state(m, kappa);
    let kappa = solve_monotone(target, 0.0, &|k| state(k).1, ExpandBounds::Unbounded)?;
    let (probabilities, achieved_mean, log_z) = state(kappa);

    finish_solution(problem, probabilities, kappa, 1.0 - log_z, achieved_mean)
}

/// Tsallis case: stationarity of the Lagrangian forces p_i^(q−1) to be
/// affine in m_i, giving p_i ∝ (1 − (q−1) θ m_i)^(1/(q−1)).
///
/// The family is normalized explicitly, so only the one-dimensional mean
/// equation in the tilt θ needs root-finding; the multipliers follow from
/// p_i^(q−1) = −(q−1)(λ + κ m_i)/q evaluated on the solved vector. All
/// probabilities are kept strictly positive (the affine base must stay
/// positive across the grid); targets that would need boundary mass make the
/// bracket expansion fail with a solver error.
pub fn solve_tsallis(problem: &MaxEntProblem) -> Result<MaxEntSolution> {
    let q = match problem.entropy {
        EntropyKind::Tsallis { q } => q,
        EntropyKind::Shannon => {
            return Err(Error::Config("problem is not a Tsallis problem".into()))
        }
    };
    let m = &problem.levels;
    let target = problem.target_mean;
    let m_max = m[m.len() - 1];

    // (1 − (q−1)θm)^(1/(q−1)) is the q̃-exponential at the dual index
    // q̃ = 2 − q, so the tilted-family machinery runs at q̃.
    let qd = 2.0 - q;
    // base_i = 1 + (q̃−1) θ m_i must stay positive across the grid.
    let bounds = if qd > 1.0 {
        ExpandBounds::LowerPole(-1.0 / ((qd - 1.0) * m_max))
    } else {
        ExpandBounds::UpperPole(1.0 / ((1.0 - qd) * m_max))
    };
    let state = |theta: f64| q_state(m, qd, theta);
    let theta = solve_monotone(target, 0.0, &|t| state(t).1, bounds)?;
    let (probabilities, achieved_mean, log_z) = state(theta);

    // p^(q−1) = A + K m with A = Z^(1−q), K = A (1−q) θ; stationarity reads
    // p^(q−1) = −(q−1)(λ + κ m)/q, so κ = −qK/(q−1) and λ = −qA/(q−1).
    let a = ((1.0 - q) * log_z).exp();
    let k = a * (1.0 - q) * theta;
    let kappa = -q * k / (q - 1.0);
    let lambda = -q * a / (q - 1.0);

    finish_solution(problem, probabilities, kappa, lambda, achieved_mean)
}

/// Draw `n` level values according to the solved probabilities,
/// deterministically in `seed`.
pub fn generate_synthetic(solution: &MaxEntSolution, n: usize, seed: u64) -> Result<Sample> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "sample size must be at least 1",
        });
    }
    let mut cumulative = Vec::with_capacity(solution.probabilities.len());
    let mut acc = 0.0;
    for p in &solution.probabilities {
        acc += p;
        cumulative.push(acc);
    }
    let last = cumulative.len() - 1;
    cumulative[last] = 1.0;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n)
        .map(|_| {
            let u = rng.gen::<f64>();
            let idx = cumulative.partition_point(|c| *c <= u);
            solution.levels[idx.min(last)]
        })
        .collect();
    Sample::new(values, SampleKind::Revenues, "levels")
}

/// Mean of the Boltzmann distribution p ∝ exp(−κ m) on a level grid; handy
/// for constructing problems whose solution has a prescribed κ.
pub fn boltzmann_mean(levels: &[f64], kappa: f64) -> f64 {
    boltzmann_state(levels, kappa).1
}

// --- internals ---

/// (probabilities, mean, ln Z) for p ∝ exp(−κ m), computed via logsumexp.
fn boltzmann_state(m: &[f64], kappa: f64) -> (Vec<f64>, f64, f64) {
    let logw: Vec<f64> = m.iter().map(|mi| -kappa * mi).collect();
    normalize_logw(m, &logw)
}

/// (probabilities, mean, ln Z) for w = (1 + (q−1)θm)^(−1/(q−1)).
fn q_state(m: &[f64], q: f64, theta: f64) -> (Vec<f64>, f64, f64) {
    let logw: Vec<f64> = m
        .iter()
        .map(|mi| -((q - 1.0) * theta * mi).ln_1p() / (q - 1.0))
        .collect();
    normalize_logw(m, &logw)
}

fn normalize_logw(m: &[f64], logw: &[f64]) -> (Vec<f64>, f64, f64) {
    let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logw.iter().map(|lw| (lw - max).exp()).collect();
    let z: f64 = weights.iter().sum();
    let probabilities: Vec<f64> = weights.iter().map(|w| w / z).collect();
    let mean = probabilities.iter().zip(m).map(|(p, mi)| p * mi).sum();
    (probabilities, mean, max + z.ln())
}

/// How the tilt parameter may range while keeping the family well defined.
enum ExpandBounds {
    Unbounded,
    /// Domain is (pole, ∞).
    LowerPole(f64),
    /// Domain is (−∞, pole).
    UpperPole(f64),
}

impl ExpandBounds {
    /// k-th probe moving down from 0 toward the lower end of the domain.
    fn probe_down(&self, k: u32) -> f64 {
        match self {
            ExpandBounds::Unbounded | ExpandBounds::UpperPole(_) => -(2f64.powi(k as i32)),
            // Geometric approach to the pole from inside.
            ExpandBounds::LowerPole(pole) => pole * (1.0 - 2f64.powi(-(k as i32 + 1))),
        }
    }

    /// k-th probe moving up from 0 toward the upper end of the domain.
    fn probe_up(&self, k: u32) -> f64 {
        match self {
            ExpandBounds::Unbounded | ExpandBounds::LowerPole(_) => 2f64.powi(k as i32),
            ExpandBounds::UpperPole(pole) => pole * (1.0 - 2f64.powi(-(k as i32 + 1))),
        }
    }
}

/// Find t with mean(t) = target for a non-increasing mean function, by
/// bracket expansion from `start` and bisection.
fn solve_monotone(
    target: f64,
    start: f64,
    mean_at: &dyn Fn(f64) -> f64,
    bounds: ExpandBounds,
) -> Result<f64> {
    let tol = MEAN_TOLERANCE * target.abs();
    let m0 = mean_at(start);
    if (m0 - target).abs() <= tol {
        return Ok(start);
    }

    // mean decreases in t: below-target means look left, above-target right.
    let (mut lo, mut hi);
    if m0 < target {
        hi = start;
        lo = start;
        let mut found = false;
        for k in 0..900 {
            let probe = bounds.probe_down(k);
            if probe >= hi {
                continue;
            }
            lo = probe;
            if mean_at(lo) >= target {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::SolverFailure(format!(
                "target mean {target} not reachable: family saturates at {}",
                mean_at(lo)
            )));
        }
    } else {
        lo = start;
        hi = start;
        let mut found = false;
        for k in 0..900 {
            let probe = bounds.probe_up(k);
            if probe <= lo {
                continue;
            }
            hi = probe;
            if mean_at(hi) <= target {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::SolverFailure(format!(
                "target mean {target} not reachable: family saturates at {}",
                mean_at(hi)
            )));
        }
    }

    let mut best = lo;
    let mut best_err = (mean_at(lo) - target).abs();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let mean = mean_at(mid);
        let err = (mean - target).abs();
        if err < best_err {
            best = mid;
            best_err = err;
        }
        if err <= tol {
            return Ok(mid);
        }
        if mean >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best_err <= tol {
        Ok(best)
    } else {
        Err(Error::SolverFailure(format!(
            "mean constraint not met: residual {best_err:e} exceeds tolerance {tol:e}"
        )))
    }
}

fn finish_solution(
    problem: &MaxEntProblem,
    probabilities: Vec<f64>,
    kappa: f64,
    lambda: f64,
    achieved_mean: f64,
) -> Result<MaxEntSolution> {
    let entropy_value = entropy_value(&probabilities, problem.entropy)?;
    Ok(MaxEntSolution {
        levels: problem.levels.clone(),
        probabilities,
        kappa,
        lambda,
        achieved_mean,
        entropy_value,
        entropy: problem.entropy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn shannon(levels: Vec<f64>, target: f64) -> MaxEntProblem {
        MaxEntProblem::new(levels, target, EntropyKind::Shannon).unwrap()
    }

    fn tsallis(levels: Vec<f64>, target: f64, q: f64) -> MaxEntProblem {
        MaxEntProblem::new(levels, target, EntropyKind::Tsallis { q }).unwrap()
    }

    fn assert_constraints(solution: &MaxEntSolution, target: f64) {
        let sum: f64 = solution.probabilities.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12, "Σp = {sum}");
        assert!(
            (solution.achieved_mean - target).abs() <= MEAN_TOLERANCE * target,
            "mean {} vs target {target}",
            solution.achieved_mean
        );
        assert!(solution.probabilities.iter().all(|p| *p >= 0.0));
    }

    /// Random feasible perturbation of p: a direction orthogonal to both
    /// constraints, scaled to keep every component non-negative.
    fn perturb(p: &[f64], m: &[f64], rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
        let n = p.len();
        let g: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        // Project g onto {d: Σd = 0, Σ d·m = 0} by solving the 2×2 system.
        let (sn, sm, smm) = (
            n as f64,
            m.iter().sum::<f64>(),
            m.iter().map(|x| x * x).sum::<f64>(),
        );
        let (sg, sgm) = (
            g.iter().sum::<f64>(),
            g.iter().zip(m).map(|(gi, mi)| gi * mi).sum::<f64>(),
        );
        let det = sn * smm - sm * sm;
        let a = (sg * smm - sm * sgm) / det;
        let b = (sn * sgm - sg * sm) / det;
        let d: Vec<f64> = g
            .iter()
            .zip(m)
            .map(|(gi, mi)| gi - a - b * mi)
            .collect();
        let mut t = f64::INFINITY;
        for (pi, di) in p.iter().zip(&d) {
            if *di < 0.0 {
                t = t.min(-pi / di);
            }
        }
        if !t.is_finite() || t <= 0.0 {
            return None;
        }
        let t = t * 0.9 * rng.gen::<f64>();
        Some(p.iter().zip(&d).map(|(pi, di)| pi + t * di).collect())
    }

    #[test]
    fn shannon_entropy_values() {
        let uniform = vec![0.25; 4];
        assert_relative_eq!(
            entropy_value(&uniform, EntropyKind::Shannon).unwrap(),
            4f64.ln(),
            max_relative = 1e-14
        );
        let degenerate = vec![1.0, 0.0, 0.0];
        assert_eq!(
            entropy_value(&degenerate, EntropyKind::Shannon).unwrap(),
            0.0
        );
    }

    #[test]
    fn tsallis_entropy_value() {
        let uniform = vec![0.5, 0.5];
        assert_relative_eq!(
            entropy_value(&uniform, EntropyKind::Tsallis { q: 2.0 }).unwrap(),
            0.5,
            max_relative = 1e-14
        );
    }

    #[test]
    fn invalid_probability_vectors_are_rejected() {
        assert!(entropy_value(&[0.5, 0.6], EntropyKind::Shannon).is_err());
        assert!(entropy_value(&[-0.1, 1.1], EntropyKind::Shannon).is_err());
        assert!(entropy_value(&[], EntropyKind::Shannon).is_err());
    }

    #[test]
    fn symmetric_shannon_problem_is_uniform() {
        let solution = solve_shannon(&shannon(vec![1.0, 2.0, 3.0], 2.0)).unwrap();
        for p in &solution.probabilities {
            assert_relative_eq!(*p, 1.0 / 3.0, max_relative = 1e-12);
        }
        assert_relative_eq!(solution.kappa, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn two_level_shannon_closed_form() {
        // p = [2/3, 1/3] forces e^κ = 2.
        let solution = solve_shannon(&shannon(vec![1.0, 2.0], 4.0 / 3.0)).unwrap();
        assert_relative_eq!(solution.probabilities[0], 2.0 / 3.0, epsilon = 1e-9);
        assert_relative_eq!(solution.probabilities[1], 1.0 / 3.0, epsilon = 1e-9);
        assert_relative_eq!(solution.kappa, 2f64.ln(), epsilon = 1e-9);
        assert_constraints(&solution, 4.0 / 3.0);

        // Independent bisection oracle on f(κ) = (e^−κ + 2e^−2κ)/(e^−κ + e^−2κ).
        let f = |k: f64| {
            let (w1, w2) = ((-k).exp(), (-2.0 * k).exp());
            (w1 + 2.0 * w2) / (w1 + w2)
        };
        let (mut lo, mut hi) = (-10.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) >= 4.0 / 3.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_relative_eq!(solution.kappa, 0.5 * (lo + hi), epsilon = 1e-9);
    }

    #[test]
    fn boltzmann_form_with_prescribed_kappa() {
        let levels: Vec<f64> = (1..=50).map(f64::from).collect();
        let kappa = 0.27;
        let target = boltzmann_mean(&levels, kappa);
        let solution = solve_shannon(&shannon(levels.clone(), target)).unwrap();
        assert!((solution.kappa - kappa).abs() < 1e-9);
        let z: f64 = levels.iter().map(|b| (-kappa * b).exp()).sum();
        for (p, b) in solution.probabilities.iter().zip(&levels) {
            assert!((p - (-kappa * b).exp() / z).abs() < 1e-9);
        }
    }

    #[test]
    fn infeasible_target_is_rejected_at_construction() {
        let err = MaxEntProblem::new(vec![1.0, 2.0], 2.5, EntropyKind::Shannon).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
        let err = MaxEntProblem::new(vec![1.0, 2.0], 1.0, EntropyKind::Shannon).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
    }

    #[test]
    fn symmetric_tsallis_problem_is_uniform_for_any_q() {
        for q in [0.5, 1.3, 1.5, 2.5] {
            let solution = solve_tsallis(&tsallis(vec![1.0, 2.0, 3.0], 2.0, q)).unwrap();
            for p in &solution.probabilities {
                assert_relative_eq!(*p, 1.0 / 3.0, max_relative = 1e-10);
            }
            assert!(solution.kappa.abs() < 1e-10);
        }
    }

    #[test]
    fn tsallis_solution_satisfies_constraints_and_stationary_form() {
        let levels = vec![1.0, 2.0, 4.0, 8.0];
        let q = 1.5;
        let solution = solve_tsallis(&tsallis(levels.clone(), 2.0, q)).unwrap();
        assert_constraints(&solution, 2.0);
        // Stationarity: p = [−(q−1)(λ + κm)/q]^(1/(q−1)) on every level.
        for (p, m) in solution.probabilities.iter().zip(&levels) {
            let base = -(q - 1.0) * (solution.lambda + solution.kappa * m) / q;
            assert_relative_eq!(*p, base.powf(1.0 / (q - 1.0)), max_relative = 1e-8);
        }
        // Equivalently the conventional power form at the dual index
        // q̃ = 2 − q: p = (A + κ̃ m)^(−1/(q̃−1)) with an affine base.
        let qd = 2.0 - q;
        let pw: Vec<f64> = solution
            .probabilities
            .iter()
            .map(|p| p.powf(-(qd - 1.0)))
            .collect();
        let slope = (pw[3] - pw[0]) / (levels[3] - levels[0]);
        for i in 0..4 {
            let affine = pw[0] + slope * (levels[i] - levels[0]);
            assert_relative_eq!(pw[i], affine, max_relative = 1e-8);
        }
    }

    #[test]
    fn tsallis_near_one_matches_shannon() {
        let levels = vec![1.0, 2.0, 4.0, 8.0, 16.0];
        let target = 3.0;
        let s = solve_shannon(&shannon(levels.clone(), target)).unwrap();
        let t = solve_tsallis(&tsallis(levels, target, 1.0 + 1e-6)).unwrap();
        for (ps, pt) in s.probabilities.iter().zip(&t.probabilities) {
            assert!((ps - pt).abs() < 1e-3);
        }
    }

    #[test]
    fn q_to_one_continuity_ladder() {
        let levels = vec![1.0, 3.0, 5.0, 11.0, 20.0];
        let target = 4.0;
        let s = solve_shannon(&shannon(levels.clone(), target)).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6] {
            let t = solve_tsallis(&tsallis(levels.clone(), target, 1.0 + eps)).unwrap();
            let dist = s
                .probabilities
                .iter()
                .zip(&t.probabilities)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(dist < prev, "sup distance {dist} did not shrink at ε={eps}");
            prev = dist;
        }
    }

    #[test]
    fn unreachable_tsallis_target_fails_with_diagnostics() {
        // At q = 0.5 the family decays at most like m^−2, so the mean cannot
        // drop below Σ m^−1 / Σ m^−2; a target under that floor has no
        // multiplier pair.
        let levels = vec![1.0, 2.0, 4.0, 8.0];
        let floor = levels.iter().map(|m| 1.0 / m).sum::<f64>()
            / levels.iter().map(|m| 1.0 / (m * m)).sum::<f64>();
        let problem = tsallis(levels, floor * 0.9, 0.5);
        assert!(matches!(
            solve_tsallis(&problem),
            Err(Error::SolverFailure(_))
        ));
    }

    #[test]
    fn monotone_tilt_direction() {
        let levels: Vec<f64> = (1..=10).map(f64::from).collect();
        let midpoint = levels.iter().sum::<f64>() / levels.len() as f64;

        let below = solve_shannon(&shannon(levels.clone(), midpoint - 2.0)).unwrap();
        assert!(below.kappa > 0.0);
        assert!(below.probabilities.windows(2).all(|w| w[1] <= w[0] + 1e-15));

        let above = solve_shannon(&shannon(levels.clone(), midpoint + 2.0)).unwrap();
        assert!(above.kappa < 0.0);
        assert!(above.probabilities.windows(2).all(|w| w[1] >= w[0] - 1e-15));
    }

    #[test]
    fn solutions_beat_random_feasible_perturbations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let levels = vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
        let target = 6.0;
        let problems = [
            shannon(levels.clone(), target),
            tsallis(levels.clone(), target, 1.5),
            tsallis(levels.clone(), target, 0.7),
        ];
        for problem in problems {
            let solution = solve(&problem).unwrap();
            let mut tried = 0;
            while tried < 100 {
                let Some(p) = perturb(&solution.probabilities, &levels, &mut rng) else {
                    continue;
                };
                tried += 1;
                let perturbed = entropy_value(&p, problem.entropy()).unwrap();
                assert!(
                    solution.entropy_value >= perturbed - 1e-9,
                    "perturbation beat the solution: {} > {}",
                    perturbed,
                    solution.entropy_value
                );
            }
        }
    }

    #[test]
    fn degenerate_solution_generates_constant_sample() {
        let solution = MaxEntSolution {
            levels: vec![1.0, 2.0, 3.0],
            probabilities: vec![1.0, 0.0, 0.0],
            kappa: 0.0,
            lambda: 0.0,
            achieved_mean: 1.0,
            entropy_value: 0.0,
            entropy: EntropyKind::Shannon,
        };
        let sample = generate_synthetic(&solution, 1000, 5).unwrap();
        assert!(sample.values().iter().all(|v| *v == 1.0));
    }

    #[test]
    fn generator_is_deterministic_and_matches_probabilities() {
        let levels: Vec<f64> = (1..=20).map(f64::from).collect();
        let target = boltzmann_mean(&levels, 0.4);
        let solution = solve_shannon(&shannon(levels, target)).unwrap();
        let a = generate_synthetic(&solution, 50_000, 99).unwrap();
        let b = generate_synthetic(&solution, 50_000, 99).unwrap();
        assert_eq!(a.values(), b.values());
        // Frequency of the first level within 3 binomial sigmas.
        let p0 = solution.probabilities[0];
        let freq = a.values().iter().filter(|v| **v == 1.0).count() as f64 / 50_000.0;
        let sigma = (p0 * (1.0 - p0) / 50_000.0).sqrt();
        assert!((freq - p0).abs() < 3.0 * sigma, "freq {freq} vs p {p0}");
    }

    #[test]
    fn boltzmann_draws_recover_kappa_through_exponential_fit() {
        let levels: Vec<f64> = (1..=60).map(f64::from).collect();
        let kappa = 0.27;
        let target = boltzmann_mean(&levels, kappa);
        let solution = solve_shannon(&shannon(levels, target)).unwrap();
        let sample = generate_synthetic(&solution, 100_000, 12).unwrap();
        let fit = crate::tailfit::fit_exponential(&sample, Some(1.0)).unwrap();
        assert!(
            (fit.exponent - kappa).abs() / kappa < 0.05,
            "β̂ = {}",
            fit.exponent
        );
    }

    #[test]
    fn heavy_tail_draws_recover_ccdf_exponent_through_hill_fit() {
        // On a linearly spaced grid the solved pmf decays like m^(−1/(1−q)),
        // so the tail function falls with exponent 1/(1−q) − 1; in the dual
        // labeling q̃ = 2 − q that exponent is the usual 1/(q̃−1) − 1.
        // q = 0.5 makes it exactly 1.
        let q = 0.5;
        let n_levels = 4000;
        let levels: Vec<f64> = (0..n_levels).map(|i| 1.0 + 5.0 * i as f64).collect();
        let uniform_mean = levels.iter().sum::<f64>() / n_levels as f64;
        let target = uniform_mean * 0.01;
        let problem = tsallis(levels, target, q);
        let solution = solve_tsallis(&problem).unwrap();
        let sample = generate_synthetic(&solution, 100_000, 23).unwrap();

        let expected = 1.0 / (1.0 - q) - 1.0;
        let cutoff = target * 4.0;
        let tail = crate::tailfit::select_tail(&sample, cutoff).unwrap();
        let fit = crate::tailfit::fit_power_mle(&tail).unwrap();
        assert!(
            (fit.exponent - expected).abs() / expected < 0.10,
            "α̂ = {} vs {expected} (n_tail = {})",
            fit.exponent,
            tail.n_tail
        );
    }
}
