//! Monte-Carlo harness for normalized mean-squared errors and tail
//! probabilities.
//!
//! Replication `r` of every scenario draws its sample from
//! `SeedSpec(base_seed, r)`, so estimators evaluated with the same base seed
//! see identical samples. Per-replication results are collected in
//! replication order and reduced by pairwise summation, which makes every
//! reported number independent of the worker count.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::estimators::{circular_estimate, estimate_pipeline, qam_estimate, Generator};
use crate::geometry::{bahadur_rate, DiskPoint, HalfPlanePoint};
use crate::mle::{mle, SolverConfig};
use crate::sampling::{sample_cauchy, sample_circular, SampleBatch, SeedSpec};

/// Default replication count per cell.
pub const DEFAULT_REPLICATIONS: u64 = 100_000;
/// Replication count used for the published tables.
pub const FULL_REPLICATIONS: u64 = 1_000_000;
/// Minimum replication count accepted by a scenario.
pub const MIN_REPLICATIONS: u64 = 100;
/// Sample sizes of the standard table grid.
pub const TABLE_SAMPLE_SIZES: [usize; 5] = [10, 50, 100, 500, 1000];
/// Iteration cap of the likelihood solver inside simulations. Scoring
/// converges linearly and a few small samples need several hundred steps.
pub const SIMULATION_MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    /// The quasi-arithmetic mean `Y_n`.
    Qam,
    /// The one-step estimator `Z_n`.
    OneStep,
    /// The median-adjusted one-step estimator.
    OneStepMedian,
    /// The maximum-likelihood estimator.
    Mle,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::Qam => "qam",
            EstimatorKind::OneStep => "one_step",
            EstimatorKind::OneStepMedian => "one_step_median",
            EstimatorKind::Mle => "mle",
        }
    }

    pub fn needs_generator(&self) -> bool {
        !matches!(self, EstimatorKind::Mle)
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qam" => Ok(Self::Qam),
            "one_step" | "one-step" => Ok(Self::OneStep),
            "one_step_median" | "one-step-median" => Ok(Self::OneStepMedian),
            "mle" => Ok(Self::Mle),
            _ => Err(invalid(format!(
                "unknown estimator '{s}', expected qam, one_step, one_step_median or mle"
            ))),
        }
    }
}

/// Anything that maps a sample to a point estimate of `theta`.
pub trait PointEstimator: Sync {
    fn estimate(&self, batch: &SampleBatch) -> Result<Complex64>;
}

impl<F> PointEstimator for F
where
    F: Fn(&SampleBatch) -> Result<Complex64> + Sync,
{
    fn estimate(&self, batch: &SampleBatch) -> Result<Complex64> {
        self(batch)
    }
}

/// One of the library estimators, ready to run on a batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimator {
    pub kind: EstimatorKind,
    pub generator: Option<Generator>,
    pub solver: SolverConfig,
}

impl Estimator {
    pub fn new(kind: EstimatorKind, generator: Option<Generator>) -> Result<Self> {
        if kind.needs_generator() && generator.is_none() {
            return Err(invalid(format!(
                "estimator {} needs a generator",
                kind.as_str()
            )));
        }
        Ok(Self {
            kind,
            generator: if kind.needs_generator() {
                generator
            } else {
                None
            },
            solver: SolverConfig {
                max_iters: SIMULATION_MAX_ITERS,
                ..SolverConfig::default()
            },
        })
    }
}

impl PointEstimator for Estimator {
    fn estimate(&self, batch: &SampleBatch) -> Result<Complex64> {
        // constructor guarantees a generator for every kind but Mle
        let g = self.generator.unwrap_or_else(Generator::f3);
        match self.kind {
            EstimatorKind::Qam => Ok(qam_estimate(&g, batch)?.initializer(&g)?.to_complex()),
            EstimatorKind::OneStep => Ok(estimate_pipeline(&g, batch, false)?.value.to_complex()),
            EstimatorKind::OneStepMedian => {
                Ok(estimate_pipeline(&g, batch, true)?.value.to_complex())
            }
            EstimatorKind::Mle => {
                let r = mle(batch, &self.solver)?;
                if !r.converged {
                    return Err(Error::Degenerate(format!(
                        "maximum likelihood did not converge (|score| = {:e})",
                        r.final_score_norm
                    )));
                }
                Ok(r.theta_hat.to_complex())
            }
        }
    }
}

/// Parallel execution policy. Results do not depend on it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Runner {
    workers: Option<usize>,
}

impl Runner {
    /// `None` uses the machine parallelism.
    pub fn new(workers: Option<usize>) -> Self {
        Self { workers }
    }

    pub fn sequential() -> Self {
        Self { workers: Some(1) }
    }

    fn map_replications<T, F>(&self, replications: u64, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        let run = || {
            (0..replications)
                .into_par_iter()
                .map(&f)
                .collect::<Vec<T>>()
        };
        match self.workers {
            None => Ok(run()),
            Some(w) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(w.max(1))
                    .build()
                    .map_err(|e| Error::Internal(format!("cannot build worker pool: {e}")))?;
                Ok(pool.install(run))
            }
        }
    }
}

/// Sum by recursive halving; fixed association order for a given length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Mean and standard error of the mean.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(values) / k as f64;
    if k < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&dev) / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}

/// Successful per-replication values plus a failure tally.
struct Collected<T> {
    values: Vec<T>,
    failures: u64,
    first_failure: Option<String>,
}

fn collect<T>(results: Vec<Result<T>>) -> Collected<T> {
    let mut values = Vec::with_capacity(results.len());
    let mut failures = 0;
    let mut first_failure = None;
    for r in results {
        match r {
            Ok(v) => values.push(v),
            Err(e) => {
                failures += 1;
                if first_failure.is_none() {
                    first_failure = Some(e.to_string());
                }
            }
        }
    }
    Collected {
        values,
        failures,
        first_failure,
    }
}

/// Runs `estimator` on `replications` samples of size `n` from `C(theta)`,
/// in replication order.
pub fn replicate<E: PointEstimator + ?Sized>(
    theta: HalfPlanePoint,
    n: usize,
    replications: u64,
    base_seed: u64,
    estimator: &E,
    runner: &Runner,
) -> Result<Vec<Result<Complex64>>> {
    runner.map_replications(replications, |r| {
        let batch = sample_cauchy(n, theta, SeedSpec::new(base_seed, r))?;
        estimator.estimate(&batch)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MseScenario {
    pub theta: HalfPlanePoint,
    pub n: usize,
    pub estimator: EstimatorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Generator>,
    pub replications: u64,
    pub base_seed: u64,
}

impl MseScenario {
    pub fn validate(&self) -> Result<()> {
        if self.replications < MIN_REPLICATIONS {
            return Err(invalid(format!(
                "scenario needs at least {MIN_REPLICATIONS} replications, got {}",
                self.replications
            )));
        }
        if self.n < 2 {
            return Err(invalid(format!("scenario needs n >= 2, got {}", self.n)));
        }
        Estimator::new(self.estimator, self.generator).map(|_| ())
    }
}

/// One cell of a normalized-MSE table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimTableRow {
    pub mu: f64,
    pub sigma: f64,
    pub n: usize,
    pub estimator: EstimatorKind,
    pub generator: Option<Generator>,
    pub replications: u64,
    pub base_seed: u64,
    /// Replications excluded because the estimator failed.
    pub failures: u64,
    /// Mean of `n |T - theta|^2 / Im(theta)^2` over the successes.
    pub statistic: f64,
    pub mc_stderr: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SimTableRow {
    fn for_scenario(s: &MseScenario) -> Self {
        Self {
            mu: s.theta.re(),
            sigma: s.theta.im(),
            n: s.n,
            estimator: s.estimator,
            generator: s.generator,
            replications: s.replications,
            base_seed: s.base_seed,
            failures: 0,
            statistic: f64::NAN,
            mc_stderr: f64::NAN,
            error: None,
        }
    }

    pub fn successes(&self) -> u64 {
        self.replications - self.failures
    }
}

/// Normalized MSE of an arbitrary estimator.
pub fn run_mse_with<E: PointEstimator + ?Sized>(
    scenario: &MseScenario,
    estimator: &E,
    runner: &Runner,
) -> Result<SimTableRow> {
    if scenario.replications == 0 || scenario.n == 0 {
        return Err(invalid("scenario needs positive n and replications"));
    }
    let theta = scenario.theta;
    let scale = scenario.n as f64 / (theta.im() * theta.im());
    let results = replicate(
        theta,
        scenario.n,
        scenario.replications,
        scenario.base_seed,
        estimator,
        runner,
    )?;
    let summands: Vec<Result<f64>> = results
        .into_iter()
        .map(|r| {
            let t = r?;
            let v = scale * (t - theta.to_complex()).norm_sqr();
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Degenerate(format!("non-finite estimate {t}")))
            }
        })
        .collect();
    let c = collect(summands);
    if c.values.is_empty() {
        return Err(Error::AllReplicationsFailed {
            replications: scenario.replications,
            mode: c.first_failure.unwrap_or_default(),
        });
    }
    let (statistic, mc_stderr) = mean_and_stderr(&c.values);
    let mut row = SimTableRow::for_scenario(scenario);
    row.failures = c.failures;
    row.statistic = statistic;
    row.mc_stderr = mc_stderr;
    Ok(row)
}

/// Normalized MSE `mean n |T - theta|^2 / Im(theta)^2` for a scenario.
pub fn run_mse(scenario: &MseScenario, runner: &Runner) -> Result<SimTableRow> {
    scenario.validate()?;
    let est = Estimator::new(scenario.estimator, scenario.generator)?;
    run_mse_with(scenario, &est, runner)
}

/// Runs every scenario in order. A failing cell becomes a row with NaN
/// statistics and its error message; the remaining cells still run.
pub fn run_table(scenarios: &[MseScenario], runner: &Runner) -> Result<Vec<SimTableRow>> {
    if scenarios.is_empty() {
        return Err(invalid("table specification is empty"));
    }
    Ok(scenarios
        .iter()
        .map(|s| {
            run_mse(s, runner).unwrap_or_else(|e| {
                let mut row = SimTableRow::for_scenario(s);
                row.failures = s.replications;
                row.error = Some(e.to_string());
                row
            })
        })
        .collect())
}

/// Cartesian product of parameters, sample sizes and generators, in that
/// nesting order with sample size varying fastest within a generator.
pub fn table_grid(
    thetas: &[HalfPlanePoint],
    sizes: &[usize],
    estimator: EstimatorKind,
    generators: &[Generator],
    replications: u64,
    base_seed: u64,
) -> Result<Vec<MseScenario>> {
    if thetas.is_empty() || sizes.is_empty() {
        return Err(invalid(
            "table grid needs at least one parameter and one sample size",
        ));
    }
    let gens: Vec<Option<Generator>> = if estimator.needs_generator() {
        if generators.is_empty() {
            return Err(invalid("table grid needs at least one generator"));
        }
        generators.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let mut out = Vec::new();
    for &theta in thetas {
        for &generator in &gens {
            for &n in sizes {
                let s = MseScenario {
                    theta,
                    n,
                    estimator,
                    generator,
                    replications,
                    base_seed,
                };
                s.validate()?;
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// The four `(mu, sigma)` panels of the one-step tables.
pub fn standard_panels() -> [HalfPlanePoint; 4] {
    [(0.0, 1.0), (10.0, 1.0), (0.0, 10.0), (10.0, 10.0)]
        .map(|(m, s)| HalfPlanePoint::new(m, s).expect("panel parameters are valid"))
}

/// Which of the three standard tables to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardTable {
    /// One-step estimators, four generators.
    OneStep,
    /// Maximum likelihood at `theta = i`.
    Mle,
    /// Median-adjusted one-step estimators, four generators.
    MedianAdjusted,
}

impl StandardTable {
    /// Scenarios for one panel (`theta`), or all panels when `None`.
    /// The likelihood table is always built at `theta = i`.
    pub fn scenarios(
        &self,
        theta: Option<HalfPlanePoint>,
        replications: u64,
        base_seed: u64,
    ) -> Result<Vec<MseScenario>> {
        let panels: Vec<HalfPlanePoint> = match theta {
            Some(t) => vec![t],
            None => standard_panels().to_vec(),
        };
        match self {
            StandardTable::OneStep => table_grid(
                &panels,
                &TABLE_SAMPLE_SIZES,
                EstimatorKind::OneStep,
                &Generator::presets(),
                replications,
                base_seed,
            ),
            StandardTable::MedianAdjusted => table_grid(
                &panels,
                &TABLE_SAMPLE_SIZES,
                EstimatorKind::OneStepMedian,
                &Generator::presets(),
                replications,
                base_seed,
            ),
            StandardTable::Mle => table_grid(
                &[theta.unwrap_or(HalfPlanePoint::I)],
                &TABLE_SAMPLE_SIZES,
                EstimatorKind::Mle,
                &[],
                replications,
                base_seed,
            ),
        }
    }
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v}")
    }
}

pub const TABLE_CSV_HEADER: [&str; 9] = [
    "mu",
    "sigma",
    "n",
    "estimator",
    "generator",
    "replications",
    "failures",
    "statistic",
    "mc_stderr",
];

/// CSV with the columns of [`TABLE_CSV_HEADER`], full precision.
pub fn write_table_csv<W: Write>(rows: &[SimTableRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TABLE_CSV_HEADER)?;
    for r in rows {
        w.write_record([
            fmt_f64(r.mu),
            fmt_f64(r.sigma),
            r.n.to_string(),
            r.estimator.as_str().to_string(),
            r.generator.map(|g| g.to_string()).unwrap_or_default(),
            r.replications.to_string(),
            r.failures.to_string(),
            fmt_f64(r.statistic),
            fmt_f64(r.mc_stderr),
        ])?;
    }
    w.flush()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailScenario {
    pub theta: HalfPlanePoint,
    pub n: usize,
    pub eps: f64,
    pub estimator: EstimatorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Generator>,
    pub replications: u64,
    pub base_seed: u64,
}

impl TailScenario {
    pub fn validate(&self) -> Result<()> {
        if !self.eps.is_finite() || self.eps <= 0.0 {
            return Err(invalid(format!(
                "tail scenario needs eps > 0, got {}",
                self.eps
            )));
        }
        if self.n < 2 || self.replications == 0 {
            return Err(invalid(
                "tail scenario needs n >= 2 and positive replications",
            ));
        }
        Estimator::new(self.estimator, self.generator).map(|_| ())
    }

    /// `R exp(-n b(eps, theta))`, the hit count suggested by the Bahadur
    /// rate.
    pub fn expected_hits(&self) -> Result<f64> {
        let b = bahadur_rate(self.eps, self.theta)?;
        Ok(self.replications as f64 * (-(self.n as f64) * b).exp())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRecord {
    pub scenario: TailScenario,
    /// Fraction of successful replications with `|T - theta| > eps`.
    pub p_hat: f64,
    /// `-log(p_hat) / (n b(eps, theta))`; infinite when no replication hit.
    #[serde(serialize_with = "serialize_ratio")]
    pub rate_ratio: f64,
    pub mc_stderr_p: f64,
    pub hits: u64,
    pub failures: u64,
    pub bahadur_rate: f64,
    pub warnings: Vec<String>,
}

fn serialize_ratio<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

pub fn run_tail_with<E: PointEstimator + ?Sized>(
    scenario: &TailScenario,
    estimator: &E,
    runner: &Runner,
) -> Result<TailRecord> {
    if scenario.eps.is_nan() || scenario.eps <= 0.0 {
        return Err(invalid(format!(
            "tail scenario needs eps > 0, got {}",
            scenario.eps
        )));
    }
    let theta = scenario.theta;
    let b = bahadur_rate(scenario.eps, theta)?;
    let results = replicate(
        theta,
        scenario.n,
        scenario.replications,
        scenario.base_seed,
        estimator,
        runner,
    )?;
    let c = collect(
        results
            .into_iter()
            .map(|r| r.map(|t| (t - theta.to_complex()).norm() > scenario.eps))
            .collect(),
    );
    if c.values.is_empty() {
        return Err(Error::AllReplicationsFailed {
            replications: scenario.replications,
            mode: c.first_failure.unwrap_or_default(),
        });
    }
    let k = c.values.len() as f64;
    let hits = c.values.iter().filter(|h| **h).count() as u64;
    let p_hat = hits as f64 / k;
    let mut warnings = Vec::new();
    let expected = scenario.expected_hits()?;
    if expected < 20.0 {
        warnings.push(format!(
            "expected hit count R*exp(-n*b) = {expected:.2} is below 20; p_hat is unreliable"
        ));
    }
    let rate_ratio = if hits == 0 {
        warnings.push("no replication exceeded eps; rate_ratio reported as +inf".into());
        f64::INFINITY
    } else {
        -p_hat.ln() / (scenario.n as f64 * b)
    };
    if c.failures > 0 {
        warnings.push(format!(
            "{} replications failed and were excluded: {}",
            c.failures,
            c.first_failure.unwrap_or_default()
        ));
    }
    Ok(TailRecord {
        scenario: *scenario,
        p_hat,
        rate_ratio,
        mc_stderr_p: (p_hat * (1.0 - p_hat) / k).sqrt(),
        hits,
        failures: c.failures,
        bahadur_rate: b,
        warnings,
    })
}

/// Empirical tail probability `P(|T - theta| > eps)` against the Bahadur
/// rate.
pub fn run_tail(scenario: &TailScenario, runner: &Runner) -> Result<TailRecord> {
    scenario.validate()?;
    let est = Estimator::new(scenario.estimator, scenario.generator)?;
    run_tail_with(scenario, &est, runner)
}

pub const TAIL_CSV_HEADER: [&str; 12] = [
    "mu",
    "sigma",
    "n",
    "eps",
    "estimator",
    "generator",
    "replications",
    "failures",
    "hits",
    "p_hat",
    "mc_stderr_p",
    "rate_ratio",
];

pub fn write_tail_csv<W: Write>(records: &[TailRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TAIL_CSV_HEADER)?;
    for r in records {
        let s = &r.scenario;
        w.write_record([
            fmt_f64(s.theta.re()),
            fmt_f64(s.theta.im()),
            s.n.to_string(),
            fmt_f64(s.eps),
            s.estimator.as_str().to_string(),
            s.generator.map(|g| g.to_string()).unwrap_or_default(),
            s.replications.to_string(),
            r.failures.to_string(),
            r.hits.to_string(),
            fmt_f64(r.p_hat),
            fmt_f64(r.mc_stderr_p),
            if r.rate_ratio.is_finite() {
                fmt_f64(r.rate_ratio)
            } else {
                "inf".into()
            },
        ])?;
    }
    w.flush()
}

/// Normalized MSE of the circular estimator `W_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularScenario {
    pub w: DiskPoint,
    pub alpha: HalfPlanePoint,
    pub n: usize,
    pub generator: Generator,
    #[serde(default)]
    pub median_adjust: bool,
    pub replications: u64,
    pub base_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircularRow {
    pub scenario: CircularScenario,
    pub failures: u64,
    /// Mean of `n |W_n - w|^2 / (1 - |w|^2)^2`.
    pub statistic: f64,
    pub mc_stderr: f64,
}

pub fn run_circular_mse(scenario: &CircularScenario, runner: &Runner) -> Result<CircularRow> {
    if scenario.n < 2 || scenario.replications == 0 {
        return Err(invalid(
            "circular scenario needs n >= 2 and positive replications",
        ));
    }
    let w = scenario.w.to_complex();
    let bound = 1.0 - scenario.w.norm_sqr();
    let scale = scenario.n as f64 / (bound * bound);
    let results = runner.map_replications(scenario.replications, |r| {
        let angles = sample_circular(
            scenario.n,
            scenario.w,
            scenario.alpha,
            SeedSpec::new(scenario.base_seed, r),
        )?;
        let est = circular_estimate(
            &angles,
            &scenario.generator,
            scenario.alpha,
            scenario.median_adjust,
        )?;
        Ok(scale * (est.w.to_complex() - w).norm_sqr())
    })?;
    let c = collect(results);
    if c.values.is_empty() {
        return Err(Error::AllReplicationsFailed {
            replications: scenario.replications,
            mode: c.first_failure.unwrap_or_default(),
        });
    }
    let (statistic, mc_stderr) = mean_and_stderr(&c.values);
    Ok(CircularRow {
        scenario: *scenario,
        failures: c.failures,
        statistic,
        mc_stderr,
    })
}
