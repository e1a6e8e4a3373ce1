//! Command-line front end.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit code: 0 on success, 1 on usage or input errors (one line on the
//! error stream), 2 when a simulation finished with failed cells.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::estimators::{circular_estimate, estimate_pipeline_with, Generator, OddMedianRule};
use crate::geometry::{
    bahadur_rate, bahadur_rate_circular, kl_circular, kl_halfplane, DiskPoint, HalfPlanePoint,
};
use crate::literal::{format_complex, parse_complex};
use crate::mle::{mle, SolverConfig};
use crate::sampling::{sample_cauchy, sample_circular, AngleBatch, SampleBatch, SeedSpec};
use crate::simulation::{
    run_table, run_tail, table_grid, write_table_csv, write_tail_csv, EstimatorKind, MseScenario,
    Runner, StandardTable, TailRecord, TailScenario, DEFAULT_REPLICATIONS, FULL_REPLICATIONS,
};

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "CAUCHY_EST_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "cauchy-est",
    version,
    about = "Cauchy location-scale estimation toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a reproducible Cauchy or circular Cauchy sample (CSV, one value per line)
    Sample(SampleArgs),
    /// One-step estimate from a sample file (JSON)
    Estimate(EstimateArgs),
    /// Maximum-likelihood estimate from a sample file (JSON)
    Mle(MleArgs),
    /// Kullback-Leibler divergence between two parameters (JSON)
    Kl(KlArgs),
    /// Bahadur rate b(eps, theta) (JSON)
    Rate(RateArgs),
    /// Monte-Carlo normalized mean-squared error tables (CSV + JSON)
    SimulateMse(SimulateMseArgs),
    /// Monte-Carlo tail probabilities against the Bahadur rate (CSV + JSON)
    SimulateTail(SimulateTailArgs),
}

fn complex_arg(s: &str) -> Result<Complex64> {
    parse_complex(s)
}

fn generator_arg(s: &str) -> Result<Generator> {
    s.parse()
}

fn estimator_arg(s: &str) -> Result<EstimatorKind> {
    s.parse()
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Cauchy parameter mu+sigma i
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, default_value = "0+1i")]
    theta: Complex64,
    /// Sample size
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Substream index
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Emit angles from the circular Cauchy law with parameter --w
    #[arg(long)]
    circular: bool,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, default_value = "0+0i")]
    w: Complex64,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, default_value = "0+1i")]
    alpha: Complex64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OddMedianArg {
    ThreePoint,
    Strict,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Sample file; standard input when absent
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_parser = generator_arg, default_value = "f3")]
    generator: Generator,
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true",
          action = clap::ArgAction::Set)]
    median_adjust: bool,
    #[arg(long, value_enum, default_value = "three-point")]
    odd_median: OddMedianArg,
    /// Input holds angles in [0, 2pi) from a circular Cauchy law
    #[arg(long)]
    circular: bool,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, default_value = "0+1i")]
    alpha: Complex64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MleArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-12)]
    score_tol: f64,
    #[arg(long, default_value_t = 1e-14)]
    step_tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct KlArgs {
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    from: Complex64,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    to: Complex64,
    /// Treat both parameters as circular Cauchy parameters in the unit disk
    #[arg(long)]
    disk: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RateArgs {
    #[arg(long)]
    eps: f64,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, conflicts_with = "w")]
    theta: Option<Complex64>,
    /// Circular parameter; selects the circular rate
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    w: Option<Complex64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulationCommon {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<u64>,
    /// Use 1e6 replications per cell
    #[arg(long)]
    full: bool,
    /// Worker threads; machine parallelism when absent
    #[arg(long)]
    workers: Option<usize>,
    /// Write CSV here and a JSON mirror next to it
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print JSON instead of CSV on standard output
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SimulateMseArgs {
    /// JSON scenario file (one scenario or an array)
    #[arg(long, conflicts_with_all = ["table", "n"])]
    scenario: Option<PathBuf>,
    /// Standard table: 1 one-step, 2 likelihood, 3 median-adjusted
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    table: Option<u8>,
    /// Parameter; for --table restricts to one panel
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    theta: Option<Complex64>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_parser = estimator_arg, default_value = "one_step")]
    estimator: EstimatorKind,
    #[arg(long, value_parser = generator_arg, value_delimiter = ',')]
    generator: Vec<Generator>,
    #[command(flatten)]
    common: SimulationCommon,
}

#[derive(Debug, Args)]
struct SimulateTailArgs {
    #[arg(long, conflicts_with_all = ["n"])]
    scenario: Option<PathBuf>,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, default_value = "0+1i")]
    theta: Complex64,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, value_parser = estimator_arg, default_value = "one_step")]
    estimator: EstimatorKind,
    #[arg(long, value_parser = generator_arg)]
    generator: Option<Generator>,
    #[command(flatten)]
    common: SimulationCommon,
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

enum Failure {
    Usage(String),
    Partial,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

type CliResult = std::result::Result<(), Failure>;

/// Runs the command line with the process environment and standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let env_seed = std::env::var(SEED_ENV).ok();
    let stdin = io::stdin();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(
        args,
        env_seed.as_deref(),
        &mut stdin.lock(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    )
}

/// [`run`] with explicit streams and seed fallback.
pub fn run_with<I, T>(
    args: I,
    env_seed: Option<&str>,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let text = e.to_string();
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            let _ = writeln!(stderr, "{line}");
            return 1;
        }
    };
    let mut io = Io {
        stdin,
        stdout,
        stderr,
    };
    match dispatch(cli.command, env_seed, &mut io) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(io.stderr, "error: {msg}");
            1
        }
        Err(Failure::Partial) => 2,
    }
}

fn dispatch(command: Command, env_seed: Option<&str>, io: &mut Io<'_>) -> CliResult {
    match command {
        Command::Sample(a) => cmd_sample(a, env_seed, io),
        Command::Estimate(a) => cmd_estimate(a, io),
        Command::Mle(a) => cmd_mle(a, io),
        Command::Kl(a) => cmd_kl(a, io),
        Command::Rate(a) => cmd_rate(a, io),
        Command::SimulateMse(a) => cmd_simulate_mse(a, env_seed, io),
        Command::SimulateTail(a) => cmd_simulate_tail(a, env_seed, io),
    }
}

fn resolve_seed(flag: Option<u64>, env_seed: Option<&str>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env_seed {
        Some(text) => text.trim().parse().map_err(|_| {
            invalid(format!(
                "{SEED_ENV}='{text}' is not an unsigned 64-bit seed"
            ))
        }),
        None => Err(invalid(format!(
            "missing seed: pass --seed or set {SEED_ENV}"
        ))),
    }
}

fn emit(text: &str, out: Option<&Path>, io: &mut Io<'_>) -> CliResult {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io.stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json(value: &Value, out: Option<&Path>, io: &mut Io<'_>) -> CliResult {
    let mut text = serde_json::to_string(value).map_err(|e| Failure::Usage(e.to_string()))?;
    text.push('\n');
    emit(&text, out, io)
}

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn cmd_sample(a: SampleArgs, env_seed: Option<&str>, io: &mut Io<'_>) -> CliResult {
    let seed = resolve_seed(a.seed, env_seed)?;
    let spec = SeedSpec::new(seed, a.stream);
    let mut text = String::new();
    let values = if a.circular {
        let w = DiskPoint::from_complex(a.w)?;
        let alpha = HalfPlanePoint::from_complex(a.alpha)?;
        text.push_str(&format!(
            "# circular w={} alpha={} n={} seed={} stream={}\n",
            format_complex(a.w),
            format_complex(a.alpha),
            a.n,
            seed,
            a.stream
        ));
        sample_circular(a.n, w, alpha, spec)?.angles().to_vec()
    } else {
        let theta = HalfPlanePoint::from_complex(a.theta)?;
        text.push_str(&format!(
            "# theta={} n={} seed={} stream={}\n",
            format_complex(a.theta),
            a.n,
            seed,
            a.stream
        ));
        sample_cauchy(a.n, theta, spec)?.into_values()
    };
    for v in values {
        text.push_str(&format!("{v}\n"));
    }
    emit(&text, a.out.as_deref(), io)
}

/// Parses one value per line. Blank lines and `#` comments are skipped; for
/// multi-column rows the first field is used.
pub fn parse_sample_text(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line
            .split(',')
            .next()
            .unwrap_or("")
            .trim()
            .replace('\u{2212}', "-");
        let v: f64 = field
            .parse()
            .map_err(|_| invalid(format!("line {}: '{field}' is not a number", k + 1)))?;
        values.push(v);
    }
    Ok(values)
}

fn read_values(input: Option<&Path>, io: &mut Io<'_>) -> Result<Vec<f64>> {
    let text = match input {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| invalid(format!("cannot read {}: {e}", p.display())))?,
        None => {
            let mut s = String::new();
            io::BufReader::new(&mut *io.stdin)
                .read_to_string(&mut s)
                .map_err(|e| invalid(format!("cannot read standard input: {e}")))?;
            s
        }
    };
    parse_sample_text(&text)
}

fn cmd_estimate(a: EstimateArgs, io: &mut Io<'_>) -> CliResult {
    let values = read_values(a.input.as_deref(), io)?;
    let rule = match a.odd_median {
        OddMedianArg::ThreePoint => OddMedianRule::ThreePoint,
        OddMedianArg::Strict => OddMedianRule::Strict,
    };
    let adjust = a.median_adjust.then_some(rule);
    let mut out = if a.circular {
        let alpha = HalfPlanePoint::from_complex(a.alpha)?;
        let angles = AngleBatch::new(values)?;
        if a.median_adjust && rule == OddMedianRule::Strict {
            return Err(Failure::Usage(
                "--odd-median strict is not supported with --circular".into(),
            ));
        }
        let est = circular_estimate(&angles, &a.generator, alpha, a.median_adjust)?;
        let mut v = pipeline_json(&est.pipeline);
        v["w"] = pair(est.w.to_complex());
        v
    } else {
        let batch = SampleBatch::new(values)?;
        pipeline_json(&estimate_pipeline_with(&a.generator, &batch, adjust)?)
    };
    out["generator"] = json!(a.generator.to_string());
    out["median_adjust"] = json!(a.median_adjust);
    emit_json(&out, a.out.as_deref(), io)
}

fn pipeline_json(p: &crate::estimators::PipelineOutcome) -> Value {
    json!({
        "y": pair(p.initial.to_complex()),
        "z": pair(p.value.to_complex()),
        "diagnostics": {
            "boundary_hit": p.initial_diagnostics.boundary_hit,
            "mean_magnitude": p.initial_diagnostics.mean_magnitude,
            "halvings": p.halvings,
        },
    })
}

fn cmd_mle(a: MleArgs, io: &mut Io<'_>) -> CliResult {
    let batch = SampleBatch::new(read_values(a.input.as_deref(), io)?)?;
    let cfg = SolverConfig {
        score_tol: a.score_tol,
        step_tol: a.step_tol,
        max_iters: a.max_iters,
    };
    let r = mle(&batch, &cfg)?;
    let out = json!({
        "theta": pair(r.theta_hat.to_complex()),
        "iterations": r.iterations,
        "score_norm": r.final_score_norm,
        "converged": r.converged,
    });
    emit_json(&out, a.out.as_deref(), io)
}

fn cmd_kl(a: KlArgs, io: &mut Io<'_>) -> CliResult {
    let kl = if a.disk {
        kl_circular(
            DiskPoint::from_complex(a.from)?,
            DiskPoint::from_complex(a.to)?,
        )
    } else {
        kl_halfplane(
            HalfPlanePoint::from_complex(a.from)?,
            HalfPlanePoint::from_complex(a.to)?,
        )
    };
    emit_json(&json!({ "kl": kl }), a.out.as_deref(), io)
}

fn cmd_rate(a: RateArgs, io: &mut Io<'_>) -> CliResult {
    let b = match (a.theta, a.w) {
        (_, Some(w)) => bahadur_rate_circular(a.eps, DiskPoint::from_complex(w)?)?,
        (Some(t), None) => bahadur_rate(a.eps, HalfPlanePoint::from_complex(t)?)?,
        (None, None) => return Err(Failure::Usage("rate needs --theta or --w".into())),
    };
    emit_json(&json!({ "b": b }), a.out.as_deref(), io)
}

fn replications(common: &SimulationCommon) -> u64 {
    if common.full {
        FULL_REPLICATIONS
    } else {
        common.replications.unwrap_or(DEFAULT_REPLICATIONS)
    }
}

/// Reads a scenario file, filling `base_seed` and `replications` where an
/// entry leaves them out.
fn load_scenarios<T: serde::de::DeserializeOwned>(
    path: &Path,
    seed: u64,
    reps: u64,
) -> Result<Vec<T>> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let entries = match value {
        Value::Array(v) => v,
        other => vec![other],
    };
    entries
        .into_iter()
        .map(|mut e| {
            if let Value::Object(m) = &mut e {
                m.entry("base_seed").or_insert(json!(seed));
                m.entry("replications").or_insert(json!(reps));
            }
            serde_json::from_value(e).map_err(|err| invalid(format!("{}: {err}", path.display())))
        })
        .collect()
}

fn json_path(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "json") {
        out.with_extension("json.json")
    } else {
        out.with_extension("json")
    }
}

fn write_outputs(
    csv: Vec<u8>,
    json_value: Value,
    common: &SimulationCommon,
    io: &mut Io<'_>,
) -> CliResult {
    let json_text = serde_json::to_string_pretty(&json_value)
        .map_err(|e| Failure::Usage(e.to_string()))?
        + "\n";
    match &common.out {
        Some(path) => {
            fs::write(path, &csv)?;
            fs::write(json_path(path), json_text)?;
        }
        None if common.json => io.stdout.write_all(json_text.as_bytes())?,
        None => io.stdout.write_all(&csv)?,
    }
    Ok(())
}

fn cmd_simulate_mse(a: SimulateMseArgs, env_seed: Option<&str>, io: &mut Io<'_>) -> CliResult {
    let seed = resolve_seed(a.common.seed, env_seed)?;
    let reps = replications(&a.common);
    let theta = a.theta.map(HalfPlanePoint::from_complex).transpose()?;
    let scenarios: Vec<MseScenario> = if let Some(path) = &a.scenario {
        load_scenarios(path, seed, reps)?
    } else if let Some(t) = a.table {
        let table = match t {
            1 => StandardTable::OneStep,
            2 => StandardTable::Mle,
            _ => StandardTable::MedianAdjusted,
        };
        table.scenarios(theta, reps, seed)?
    } else {
        let theta =
            theta.ok_or_else(|| invalid("simulate-mse needs --scenario, --table or --theta"))?;
        if a.n.is_empty() {
            return Err(Failure::Usage("simulate-mse needs --n".into()));
        }
        let gens = if a.generator.is_empty() && a.estimator.needs_generator() {
            Generator::presets().to_vec()
        } else {
            a.generator.clone()
        };
        table_grid(&[theta], &a.n, a.estimator, &gens, reps, seed)?
    };
    let runner = Runner::new(a.common.workers);
    let rows = run_table(&scenarios, &runner)?;
    let mut csv = Vec::new();
    write_table_csv(&rows, &mut csv)?;
    let json_value = serde_json::to_value(&rows).map_err(|e| Failure::Usage(e.to_string()))?;
    write_outputs(csv, json_value, &a.common, io)?;
    let failed: Vec<_> = rows.iter().filter(|r| r.error.is_some()).collect();
    for r in &failed {
        writeln!(
            io.stderr,
            "cell mu={} sigma={} n={} {} {} failed: {}",
            r.mu,
            r.sigma,
            r.n,
            r.estimator.as_str(),
            r.generator.map(|g| g.to_string()).unwrap_or_default(),
            r.error.as_deref().unwrap_or("")
        )?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Partial)
    }
}

fn cmd_simulate_tail(a: SimulateTailArgs, env_seed: Option<&str>, io: &mut Io<'_>) -> CliResult {
    let seed = resolve_seed(a.common.seed, env_seed)?;
    let reps = replications(&a.common);
    let scenarios: Vec<TailScenario> = if let Some(path) = &a.scenario {
        load_scenarios(path, seed, reps)?
    } else {
        if a.n.is_empty() {
            return Err(Failure::Usage(
                "simulate-tail needs --n or --scenario".into(),
            ));
        }
        let theta = HalfPlanePoint::from_complex(a.theta)?;
        let generator = if a.estimator.needs_generator() {
            Some(a.generator.unwrap_or_else(Generator::f3))
        } else {
            None
        };
        a.n.iter()
            .map(|&n| TailScenario {
                theta,
                n,
                eps: a.eps,
                estimator: a.estimator,
                generator,
                replications: reps,
                base_seed: seed,
            })
            .collect()
    };
    if scenarios.is_empty() {
        return Err(Failure::Usage("no tail scenarios given".into()));
    }
    let runner = Runner::new(a.common.workers);
    let mut records: Vec<TailRecord> = Vec::new();
    let mut failed = false;
    for s in &scenarios {
        match run_tail(s, &runner) {
            Ok(r) => {
                for w in &r.warnings {
                    writeln!(io.stderr, "warning: n={} eps={}: {w}", s.n, s.eps)?;
                }
                records.push(r);
            }
            Err(e) => {
                writeln!(io.stderr, "cell n={} eps={} failed: {e}", s.n, s.eps)?;
                failed = true;
            }
        }
    }
    let mut csv = Vec::new();
    write_tail_csv(&records, &mut csv)?;
    let json_value = serde_json::to_value(&records).map_err(|e| Failure::Usage(e.to_string()))?;
    write_outputs(csv, json_value, &a.common, io)?;
    if failed {
        Err(Failure::Partial)
    } else {
        Ok(())
    }
}
