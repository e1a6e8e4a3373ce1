//! Circular Cauchy parameter estimation through the Mobius map to the
//! real line.
//!
//! ```text
//! cargo run --release --example circular
//! ```

use cauchy_est::{
    circular_estimate, run_circular_mse, sample_circular, CircularScenario, DiskPoint, Generator,
    HalfPlanePoint, Runner, SeedSpec,
};

fn main() -> cauchy_est::Result<()> {
    let w = DiskPoint::new(0.3, -0.4)?;
    let alpha = HalfPlanePoint::I;
    let angles = sample_circular(5000, w, alpha, SeedSpec::new(11, 0))?;
    let est = circular_estimate(&angles, &Generator::f3(), alpha, false)?;
    println!("w = {:?}, W_n = {:.4}", w.to_complex(), est.w.to_complex());
    println!("line estimate behind it: {}", est.pipeline.value);

    // n E|W_n - w|^2 approaches (1 - |w|^2)^2; the printed ratio tends to 1.
    for n in [10, 100, 1000] {
        let row = run_circular_mse(
            &CircularScenario {
                w,
                alpha,
                n,
                generator: Generator::f3(),
                median_adjust: false,
                replications: 5_000,
                base_seed: 1,
            },
            &Runner::new(None),
        )?;
        println!("n={n:5}  ratio {:.3} ± {:.3}", row.statistic, row.mc_stderr);
    }
    Ok(())
}
