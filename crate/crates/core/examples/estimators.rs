//! Quasi-arithmetic means and their one-step refinements on a simulated
//! sample, with and without median adjustment.
//!
//! ```text
//! cargo run --release --example estimators -- [n] [seed]
//! ```

use cauchy_est::{
    estimate_pipeline, qam_estimate, sample_cauchy, Complex64, Generator, HalfPlanePoint, SeedSpec,
};

fn main() -> cauchy_est::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(200, |s| s.parse().expect("n"));
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed"));

    let theta = HalfPlanePoint::new(10.0, 1.0)?;
    let batch = sample_cauchy(n, theta, SeedSpec::new(seed, 0))?;
    println!("true theta = {theta}, n = {n}\n");
    println!("gen  Y_n                       Z_n                       Z~_n (median-adjusted)");
    let fmt = |z: Complex64| format!("{z:.4}");
    for g in Generator::presets() {
        let y = fmt(qam_estimate(&g, &batch)?.raw);
        let z = fmt(estimate_pipeline(&g, &batch, false)?.value.to_complex());
        let zm = fmt(estimate_pipeline(&g, &batch, true)?.value.to_complex());
        println!("{g}   {y:<25} {z:<25} {zm}");
    }

    // A generator with a custom pole.
    let g: Generator = "recip:0+5i".parse()?;
    let z = estimate_pipeline(&g, &batch, true)?;
    println!(
        "\n{g}: {:.4} after {} halvings",
        z.value.to_complex(),
        z.halvings
    );
    Ok(())
}
