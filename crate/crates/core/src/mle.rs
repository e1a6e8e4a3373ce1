//! Maximum-likelihood estimation of `theta`.
//!
//! The likelihood equation in complex form is `sum_j h(X_j, theta) = 0`.
//! The solver iterates the complex Fisher-scoring map
//! `theta <- theta + 2 Im(theta) i * score(theta)`, which is the one-step
//! update applied repeatedly, with backtracking that keeps every iterate in
//! the half-plane and never lets the log-likelihood drop. The Cauchy
//! likelihood is unimodal in `(mu, sigma)`, so monotone ascent reaches the
//! unique root.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::estimators::{estimate_pipeline, median, Generator};
use crate::geometry::{log_density, mobius_h, HalfPlanePoint};
use crate::sampling::SampleBatch;

const MAX_BACKTRACKS: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Convergence threshold on `|score|`.
    pub score_tol: f64,
    /// Stop once `|theta_{k+1} - theta_k| / Im(theta_k)` falls below this.
    pub step_tol: f64,
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            score_tol: 1e-12,
            step_tol: 1e-14,
            max_iters: 200,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0;
        if !positive(self.score_tol) || !positive(self.step_tol) || self.max_iters == 0 {
            return Err(invalid(format!(
                "solver tolerances must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MleResult {
    pub theta_hat: HalfPlanePoint,
    pub iterations: usize,
    /// `|score(theta_hat)|`, i.e. `|sum_j h(X_j, theta_hat)| / n`.
    pub final_score_norm: f64,
    pub converged: bool,
}

/// `(1/n) sum_j h(X_j, t)`. Its modulus never exceeds 1.
pub fn score(batch: &SampleBatch, t: HalfPlanePoint) -> Complex64 {
    let s: Complex64 = batch.iter().map(|x| mobius_h(x, t)).sum();
    s / batch.len() as f64
}

pub fn log_likelihood(batch: &SampleBatch, t: HalfPlanePoint) -> f64 {
    batch.iter().map(|x| log_density(x, t)).sum()
}

/// The common diagonal entry `n / (2 Im(t)^2)` of the Fisher information
/// for `(mu, sigma)`.
pub fn fisher_info_scalar(n: usize, t: HalfPlanePoint) -> f64 {
    n as f64 / (2.0 * t.im() * t.im())
}

/// Slack below which a log-likelihood decrease is treated as rounding noise.
pub(crate) fn ascent_slack(ll: f64) -> f64 {
    1e-13 * (1.0 + ll.abs())
}

fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `median + (IQR / 2) i`; the half-IQR of `C(mu, sigma)` is `sigma`.
fn quartile_start(batch: &SampleBatch) -> Result<HalfPlanePoint> {
    let mut sorted = batch.values().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let center = median(batch).unwrap_or_else(|_| quantile_type7(&sorted, 0.5));
    let half_iqr = 0.5 * (quantile_type7(&sorted, 0.75) - quantile_type7(&sorted, 0.25));
    HalfPlanePoint::new(center, half_iqr).map_err(|_| {
        Error::Degenerate("sample has zero interquartile range; no interior start".into())
    })
}

/// Starting point: the `1/(x + i)` one-step estimate, falling back to the
/// quartile start if that initializer is degenerate.
pub fn default_start(batch: &SampleBatch) -> Result<HalfPlanePoint> {
    match estimate_pipeline(&Generator::f3(), batch, false) {
        Ok(out) => Ok(out.value),
        Err(_) => quartile_start(batch),
    }
}

/// Maximum-likelihood estimate from the default start.
pub fn mle(batch: &SampleBatch, cfg: &SolverConfig) -> Result<MleResult> {
    cfg.validate()?;
    match batch.len() {
        1 => Err(Error::Unsupported(
            "maximum likelihood needs at least 2 observations".into(),
        )),
        2 => {
            let (a, b) = (batch.values()[0], batch.values()[1]);
            if a == b {
                return Err(Error::Degenerate(
                    "two equal observations have no interior likelihood maximum".into(),
                ));
            }
            let theta_hat = HalfPlanePoint::new(0.5 * (a + b), 0.5 * (a - b).abs())?;
            let final_score_norm = score(batch, theta_hat).norm();
            Ok(MleResult {
                theta_hat,
                iterations: 0,
                final_score_norm,
                converged: final_score_norm < cfg.score_tol,
            })
        }
        _ => mle_from(batch, default_start(batch)?, cfg),
    }
}

/// Scoring iteration from an explicit start.
pub fn mle_from(
    batch: &SampleBatch,
    start: HalfPlanePoint,
    cfg: &SolverConfig,
) -> Result<MleResult> {
    cfg.validate()?;
    let mut theta = start;
    let mut ll = log_likelihood(batch, theta);
    let mut s = score(batch, theta);
    let mut iterations = 0;

    while iterations < cfg.max_iters && s.norm() >= cfg.score_tol {
        let step = Complex64::new(-s.im, s.re) * (2.0 * theta.im());
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_BACKTRACKS {
            if let Ok(cand) = HalfPlanePoint::from_complex(theta.to_complex() + step * scale) {
                let cand_ll = log_likelihood(batch, cand);
                if cand_ll >= ll - ascent_slack(ll) {
                    accepted = Some((cand, cand_ll));
                    break;
                }
            }
            scale *= 0.5;
        }
        let Some((next, next_ll)) = accepted else {
            break;
        };
        let moved = (next.to_complex() - theta.to_complex()).norm() / theta.im();
        theta = next;
        ll = next_ll;
        s = score(batch, theta);
        iterations += 1;
        if moved < cfg.step_tol {
            break;
        }
    }

    let final_score_norm = s.norm();
    Ok(MleResult {
        theta_hat: theta,
        iterations,
        final_score_norm,
        converged: final_score_norm < cfg.score_tol,
    })
}
