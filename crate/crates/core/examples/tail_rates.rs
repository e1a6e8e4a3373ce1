//! Tail probabilities P(|T - theta| > eps) against exp(-n b(eps, theta)).
//!
//! ```text
//! cargo run --release --example tail_rates
//! ```

use cauchy_est::{run_tail, EstimatorKind, Generator, HalfPlanePoint, Runner, TailScenario};

fn main() -> cauchy_est::Result<()> {
    let runner = Runner::new(None);
    println!("estimator  n    p_hat     exp(-n b)  rate ratio");
    for (estimator, generator) in [
        (EstimatorKind::OneStep, Some(Generator::f3())),
        (EstimatorKind::Mle, None),
    ] {
        for n in [10, 20, 40, 80] {
            let s = TailScenario {
                theta: HalfPlanePoint::I,
                n,
                eps: 1.0,
                estimator,
                generator,
                replications: 50_000,
                base_seed: 5,
            };
            let r = run_tail(&s, &runner)?;
            println!(
                "{:<10} {n:<4} {:.2e}  {:.2e}   {:.3}",
                estimator.as_str(),
                r.p_hat,
                (-(n as f64) * r.bahadur_rate).exp(),
                r.rate_ratio
            );
            for w in &r.warnings {
                println!("    note: {w}");
            }
        }
    }
    Ok(())
}
