//! Plugging an arbitrary estimator into the Monte-Carlo harness. Here the
//! sample median and half the interquartile range, the classical quick
//! estimator, against the one-step f3 estimator on the same samples.
//!
//! ```text
//! cargo run --release --example custom_estimator
//! ```

use cauchy_est::{
    run_mse, run_mse_with, Complex64, EstimatorKind, Generator, HalfPlanePoint, MseScenario,
    Runner, SampleBatch,
};

fn quartiles(batch: &SampleBatch) -> Complex64 {
    let mut v = batch.values().to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (v.len() - 1) as f64;
        let (lo, frac) = (h.floor() as usize, h.fract());
        v[lo] + frac * (v[(lo + 1).min(v.len() - 1)] - v[lo])
    };
    Complex64::new(q(0.5), 0.5 * (q(0.75) - q(0.25)))
}

fn main() -> cauchy_est::Result<()> {
    let runner = Runner::new(None);
    for n in [10, 100, 1000] {
        let s = MseScenario {
            theta: HalfPlanePoint::new(1.0, 2.0)?,
            n,
            estimator: EstimatorKind::OneStep,
            generator: Some(Generator::f3()),
            replications: 20_000,
            base_seed: 9,
        };
        let quick = run_mse_with(&s, &|b: &SampleBatch| Ok(quartiles(b)), &runner)?;
        let one_step = run_mse(&s, &runner)?;
        println!(
            "n={n:5}  quartiles {:.3}  one-step f3 {:.3}",
            quick.statistic, one_step.statistic
        );
    }
    Ok(())
}
