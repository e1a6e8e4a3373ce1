//! Closed-form estimators of `theta = mu + sigma*i`.
//!
//! The starting point is a quasi-arithmetic mean `Y = f^{-1}(mean f(X_j))`
//! whose generator `f` is holomorphic on the closed upper half-plane minus a
//! pole, so that `E f(X) = f(theta)` and `Y` is consistent. One Fisher
//! scoring step in complex form,
//!
//! ```text
//! Z = Y + (2 Im(Y) i / n) * sum_j (X_j - Y)/(X_j - conj(Y)),
//! ```
//!
//! then makes it efficient. The median-adjusted variants first center the
//! sample at its median, which makes the `log x` generator exactly affine
//! equivariant.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::geometry::{mobius_h, mobius_to_disk, DiskPoint, HalfPlanePoint};
use crate::literal::{format_complex, parse_complex};
use crate::sampling::{pull_to_line, AngleBatch, SampleBatch};

/// Maximum number of step halvings in [`one_step`].
pub const MAX_HALVINGS: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// `f(x) = log(x + alpha)`, `Im(alpha) >= 0`.
    Log,
    /// `f(x) = 1/(x + alpha)`, `Im(alpha) > 0`.
    Reciprocal,
}

/// Generator of a quasi-arithmetic mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator {
    kind: GeneratorKind,
    alpha: Complex64,
}

impl Generator {
    pub fn log(alpha: Complex64) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() || alpha.im < 0.0 {
            return Err(invalid(format!(
                "log generator needs Im(alpha) >= 0, got {alpha}"
            )));
        }
        // normalize -0.0 so that real shifts sit on the closed half-plane
        let alpha = Complex64::new(alpha.re, alpha.im + 0.0);
        Ok(Self {
            kind: GeneratorKind::Log,
            alpha,
        })
    }

    pub fn reciprocal(alpha: Complex64) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() || alpha.im <= 0.0 {
            return Err(invalid(format!(
                "reciprocal generator needs Im(alpha) > 0, got {alpha}"
            )));
        }
        Ok(Self {
            kind: GeneratorKind::Reciprocal,
            alpha,
        })
    }

    /// `log x`
    pub fn f1() -> Self {
        Self {
            kind: GeneratorKind::Log,
            alpha: Complex64::new(0.0, 0.0),
        }
    }

    /// `log(x + i)`
    pub fn f2() -> Self {
        Self {
            kind: GeneratorKind::Log,
            alpha: Complex64::new(0.0, 1.0),
        }
    }

    /// `1/(x + i)`
    pub fn f3() -> Self {
        Self {
            kind: GeneratorKind::Reciprocal,
            alpha: Complex64::new(0.0, 1.0),
        }
    }

    /// `1/(x + 2i)`
    pub fn f4() -> Self {
        Self {
            kind: GeneratorKind::Reciprocal,
            alpha: Complex64::new(0.0, 2.0),
        }
    }

    pub fn presets() -> [Generator; 4] {
        [Self::f1(), Self::f2(), Self::f3(), Self::f4()]
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// `f(x)` for a real observation.
    #[inline]
    pub fn forward(&self, x: f64) -> Result<Complex64> {
        self.forward_complex(Complex64::new(x, 0.0))
    }

    /// `f(z)` for `Im(z) >= 0`. The logarithm takes its argument in `[0, pi]`.
    #[inline]
    pub fn forward_complex(&self, z: Complex64) -> Result<Complex64> {
        let s = z + self.alpha;
        match self.kind {
            GeneratorKind::Log => {
                if s.im < 0.0 {
                    return Err(invalid(format!(
                        "log generator evaluated below the axis at {z}"
                    )));
                }
                if s.re == 0.0 && s.im == 0.0 {
                    return Err(Error::BranchPoint { x: z.re });
                }
                let arg = if s.im == 0.0 {
                    if s.re < 0.0 {
                        PI
                    } else {
                        0.0
                    }
                } else {
                    s.im.atan2(s.re)
                };
                Ok(Complex64::new(0.5 * s.norm_sqr().ln(), arg))
            }
            GeneratorKind::Reciprocal => Ok(s.inv()),
        }
    }

    /// `f^{-1}(y)`.
    pub fn inverse(&self, y: Complex64) -> Result<Complex64> {
        match self.kind {
            GeneratorKind::Log => Ok(y.exp() - self.alpha),
            GeneratorKind::Reciprocal => {
                if y.norm() < 1e-300 {
                    return Err(Error::Degenerate(format!(
                        "reciprocal generator cannot invert {y}"
                    )));
                }
                Ok(y.inv() - self.alpha)
            }
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in Self::presets().iter().enumerate() {
            if p == self {
                return write!(f, "f{}", k + 1);
            }
        }
        let prefix = match self.kind {
            GeneratorKind::Log => "log",
            GeneratorKind::Reciprocal => "recip",
        };
        write!(f, "{prefix}:{}", format_complex(self.alpha))
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f1" => Ok(Self::f1()),
            "f2" => Ok(Self::f2()),
            "f3" => Ok(Self::f3()),
            "f4" => Ok(Self::f4()),
            _ => {
                if let Some(a) = s.strip_prefix("log:") {
                    Self::log(parse_complex(a)?)
                } else if let Some(a) = s.strip_prefix("recip:") {
                    Self::reciprocal(parse_complex(a)?)
                } else {
                    Err(invalid(format!(
                        "unknown generator '{s}', expected f1..f4, log:a+bi or recip:a+bi"
                    )))
                }
            }
        }
    }
}

impl Serialize for Generator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Generator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EstimateDiagnostics {
    /// The raw estimate fell on or below the real axis.
    pub boundary_hit: bool,
    /// `|mean f(X_j)|`.
    pub mean_magnitude: f64,
}

/// Result of a quasi-arithmetic mean. `value` is `None` exactly when the raw
/// estimate is not a valid half-plane point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOutcome {
    pub raw: Complex64,
    pub value: Option<HalfPlanePoint>,
    pub diagnostics: EstimateDiagnostics,
}

impl EstimateOutcome {
    fn from_raw(raw: Complex64, mean: Complex64) -> Self {
        let value = HalfPlanePoint::from_complex(raw).ok();
        Self {
            raw,
            value,
            diagnostics: EstimateDiagnostics {
                boundary_hit: value.is_none(),
                mean_magnitude: mean.norm(),
            },
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.value.is_none()
    }

    /// The estimate as an initializer, or a `DegenerateInitializer` error.
    pub fn initializer(&self, g: &Generator) -> Result<HalfPlanePoint> {
        self.value.ok_or_else(|| Error::DegenerateInitializer {
            generator: g.to_string(),
            im: self.raw.im,
        })
    }
}

fn generator_mean(g: &Generator, values: impl Iterator<Item = f64>, n: usize) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for x in values {
        acc += g.forward(x)?;
    }
    Ok(acc / n as f64)
}

/// The quasi-arithmetic mean `Y_n = f^{-1}(mean f(X_j))`.
pub fn qam_estimate(g: &Generator, batch: &SampleBatch) -> Result<EstimateOutcome> {
    if batch.len() < 2 {
        return Err(invalid(
            "quasi-arithmetic mean needs at least 2 observations",
        ));
    }
    let mean = generator_mean(g, batch.iter(), batch.len())?;
    let raw = g.inverse(mean)?;
    Ok(EstimateOutcome::from_raw(raw, mean))
}

/// How the median of an odd-sized sample is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OddMedianRule {
    /// Mean of the three central order statistics (needs `n >= 5`).
    #[default]
    ThreePoint,
    /// The middle order statistic itself. With `log x` this places one
    /// centered observation on the branch point.
    Strict,
}

/// Sample median with the default odd-`n` rule.
pub fn median(batch: &SampleBatch) -> Result<f64> {
    median_with(batch, OddMedianRule::ThreePoint)
}

pub fn median_with(batch: &SampleBatch, rule: OddMedianRule) -> Result<f64> {
    let n = batch.len();
    let mut sorted = batch.values().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    if n.is_multiple_of(2) {
        return Ok(0.5 * (sorted[n / 2 - 1] + sorted[n / 2]));
    }
    match rule {
        OddMedianRule::Strict => Ok(sorted[n / 2]),
        OddMedianRule::ThreePoint => {
            if n < 5 {
                return Err(Error::Unsupported(format!(
                    "three-point median needs an odd sample of at least 5, got {n}"
                )));
            }
            let mid = n / 2;
            Ok((sorted[mid - 1] + sorted[mid] + sorted[mid + 1]) / 3.0)
        }
    }
}

/// `M + f^{-1}(mean f(X_j - M))` with `M` the sample median.
pub fn qam_estimate_median_adjusted(
    g: &Generator,
    batch: &SampleBatch,
    rule: OddMedianRule,
) -> Result<EstimateOutcome> {
    if batch.len() < 2 {
        return Err(invalid(
            "quasi-arithmetic mean needs at least 2 observations",
        ));
    }
    let m = median_with(batch, rule)?;
    let mean =
        generator_mean(g, batch.iter().map(|x| x - m), batch.len()).map_err(|e| match e {
            Error::BranchPoint { x } => Error::BranchPoint { x: x + m },
            other => other,
        })?;
    let raw = g.inverse(mean)? + m;
    Ok(EstimateOutcome::from_raw(raw, mean))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneStepOutcome {
    pub value: HalfPlanePoint,
    /// How many times the scoring step was halved to stay in the half-plane.
    pub halvings: u32,
}

/// One complex Fisher-scoring step from `start`.
pub fn one_step(batch: &SampleBatch, start: HalfPlanePoint) -> Result<OneStepOutcome> {
    let n = batch.len() as f64;
    let s: Complex64 = batch.iter().map(|x| mobius_h(x, start)).sum();
    // 2 Im(Y) i S / n
    let step = Complex64::new(-s.im, s.re) * (2.0 * start.im() / n);
    let y = start.to_complex();
    let mut scale = 1.0;
    for halvings in 0..=MAX_HALVINGS {
        if let Ok(value) = HalfPlanePoint::from_complex(y + step * scale) {
            return Ok(OneStepOutcome { value, halvings });
        }
        scale *= 0.5;
    }
    Err(Error::Internal(format!(
        "one-step update from {start} left the half-plane after {MAX_HALVINGS} halvings"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOutcome {
    /// The initial quasi-arithmetic mean.
    pub initial: HalfPlanePoint,
    pub initial_diagnostics: EstimateDiagnostics,
    /// The one-step estimate.
    pub value: HalfPlanePoint,
    pub halvings: u32,
}

/// `Z_n` (or the median-adjusted `Z~_n`) with the default odd-`n` rule.
pub fn estimate_pipeline(
    g: &Generator,
    batch: &SampleBatch,
    median_adjust: bool,
) -> Result<PipelineOutcome> {
    estimate_pipeline_with(g, batch, median_adjust.then_some(OddMedianRule::ThreePoint))
}

/// Like [`estimate_pipeline`]; `adjust = Some(rule)` selects the
/// median-adjusted initializer.
pub fn estimate_pipeline_with(
    g: &Generator,
    batch: &SampleBatch,
    adjust: Option<OddMedianRule>,
) -> Result<PipelineOutcome> {
    let outcome = match adjust {
        None => qam_estimate(g, batch)?,
        Some(rule) => qam_estimate_median_adjusted(g, batch, rule)?,
    };
    let initial = outcome.initializer(g)?;
    let step = one_step(batch, initial)?;
    Ok(PipelineOutcome {
        initial,
        initial_diagnostics: outcome.diagnostics,
        value: step.value,
        halvings: step.halvings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularOutcome {
    /// `W_n = phi_alpha(Z_n)`.
    pub w: DiskPoint,
    /// The half-plane pipeline on the pulled-back sample.
    pub pipeline: PipelineOutcome,
}

/// Estimates the circular Cauchy parameter by pulling the angles back to the
/// real line with `phi_alpha^{-1}`, running the one-step pipeline, and mapping
/// the result forward with `phi_alpha`.
pub fn circular_estimate(
    angles: &AngleBatch,
    g: &Generator,
    alpha: HalfPlanePoint,
    median_adjust: bool,
) -> Result<CircularOutcome> {
    let batch = pull_to_line(angles, alpha)?;
    let pipeline = estimate_pipeline(g, &batch, median_adjust)?;
    let w = mobius_to_disk(pipeline.value, alpha)?;
    Ok(CircularOutcome { w, pipeline })
}
