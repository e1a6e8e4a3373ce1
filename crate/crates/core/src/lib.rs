//! Estimation of the joint location-scale parameter of the Cauchy
//! distribution.
//!
//! A Cauchy law `C(mu, sigma)` is handled through its complex parameter
//! `theta = mu + sigma*i` in the upper half-plane. The crate provides
//!
//! - closed-form quasi-arithmetic mean estimators and their one-step
//!   (Fisher-scoring) refinements ([`estimators`]),
//! - the maximum-likelihood estimator ([`mle`]),
//! - closed-form Kullback-Leibler divergences, Bahadur rates and the
//!   Mobius maps to the circular Cauchy family ([`geometry`]),
//! - reproducible samplers ([`sampling`]) and a Monte-Carlo harness for
//!   normalized mean-squared errors and tail probabilities
//!   ([`simulation`]).
//!
//! ```
//! use cauchy_est::{estimate_pipeline, sample_cauchy, Generator, HalfPlanePoint, SeedSpec};
//!
//! let theta = HalfPlanePoint::new(3.0, 2.0).unwrap();
//! let batch = sample_cauchy(2000, theta, SeedSpec::new(42, 0)).unwrap();
//! let z = estimate_pipeline(&Generator::f2(), &batch, false).unwrap().value;
//! assert!((z.re() - 3.0).abs() < 0.5 && (z.im() - 2.0).abs() < 0.5);
//! ```

pub mod cli;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod literal;
pub mod mle;
pub mod sampling;
pub mod simulation;

pub use error::{Error, Result};
pub use estimators::{
    circular_estimate, estimate_pipeline, estimate_pipeline_with, median, median_with, one_step,
    qam_estimate, qam_estimate_median_adjusted, CircularOutcome, EstimateDiagnostics,
    EstimateOutcome, Generator, GeneratorKind, OddMedianRule, OneStepOutcome, PipelineOutcome,
};
pub use geometry::{
    bahadur_rate, bahadur_rate_circular, boundary_to_circle, circle_to_boundary,
    circular_log_density, h_extended, kl_circular, kl_halfplane, log_density, maximal_invariant,
    mobius_derivative, mobius_h, mobius_to_disk, mobius_to_halfplane, sl2_act, DiskPoint,
    HalfPlanePoint, Sl2Matrix,
};
pub use mle::{fisher_info_scalar, log_likelihood, mle, mle_from, score, MleResult, SolverConfig};
pub use num_complex::Complex64;
pub use sampling::{
    cauchy_cdf, cauchy_quantile, pull_to_line, push_to_circle, sample_cauchy, sample_circular,
    AngleBatch, SampleBatch, SeedSpec,
};
pub use simulation::{
    run_circular_mse, run_mse, run_mse_with, run_table, run_tail, run_tail_with, CircularScenario,
    Estimator, EstimatorKind, MseScenario, Runner, SimTableRow, StandardTable, TailRecord,
    TailScenario,
};
