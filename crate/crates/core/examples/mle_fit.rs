//! Maximum likelihood by complex Fisher scoring, compared with the
//! one-step estimator it starts from.
//!
//! ```text
//! cargo run --release --example mle_fit
//! ```

use cauchy_est::{
    estimate_pipeline, log_likelihood, mle, sample_cauchy, score, Generator, HalfPlanePoint,
    SampleBatch, SeedSpec, SolverConfig,
};

fn main() -> cauchy_est::Result<()> {
    let theta = HalfPlanePoint::new(-2.0, 0.5)?;
    let cfg = SolverConfig::default();
    for n in [5, 20, 100, 1000] {
        let batch = sample_cauchy(n, theta, SeedSpec::new(3, n as u64))?;
        let start = estimate_pipeline(&Generator::f3(), &batch, false)?.value;
        let fit = mle(&batch, &cfg)?;
        println!(
            "n={n:5}  one-step {:.5}  mle {:.5}  ({} iterations, |score| {:.1e}, ll gain {:.2e})",
            start.to_complex(),
            fit.theta_hat.to_complex(),
            fit.iterations,
            score(&batch, fit.theta_hat).norm(),
            log_likelihood(&batch, fit.theta_hat) - log_likelihood(&batch, start),
        );
    }

    // Two points have a closed form: midpoint plus half the range.
    let pair = SampleBatch::new(vec![1.0, 4.0])?;
    println!("\nn=2: {}", mle(&pair, &cfg)?.theta_hat);
    Ok(())
}
