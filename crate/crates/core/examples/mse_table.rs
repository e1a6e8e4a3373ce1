//! Normalized mean-squared-error table for the one-step estimators, in the
//! CSV layout written by `cauchy-est simulate-mse`.
//!
//! ```text
//! cargo run --release --example mse_table -- [replications] [table]
//! ```
//!
//! `table` is 1 (one-step), 2 (maximum likelihood) or 3 (median-adjusted).
//! Every statistic tends to 4 as `n` grows.

use cauchy_est::simulation::write_table_csv;
use cauchy_est::{run_table, HalfPlanePoint, Runner, StandardTable};

fn main() -> cauchy_est::Result<()> {
    let mut args = std::env::args().skip(1);
    let reps: u64 = args
        .next()
        .map_or(10_000, |s| s.parse().expect("replications"));
    let table = match args.next().as_deref() {
        Some("2") => StandardTable::Mle,
        Some("3") => StandardTable::MedianAdjusted,
        _ => StandardTable::OneStep,
    };
    let scenarios = table.scenarios(Some(HalfPlanePoint::I), reps, 2024)?;
    let rows = run_table(&scenarios, &Runner::new(None))?;
    write_table_csv(&rows, std::io::stdout().lock()).expect("write to stdout");
    Ok(())
}
