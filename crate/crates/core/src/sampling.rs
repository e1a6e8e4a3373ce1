//! Reproducible inverse-CDF sampling.
//!
//! Every batch is a pure function of a [`SeedSpec`]: the base seed keys a
//! ChaCha8 generator and the stream index selects one of its 2^64
//! independent streams, so replication `r` of any experiment can be
//! regenerated on any thread without touching the others.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{
    boundary_to_circle, circle_to_boundary, mobius_to_halfplane, DiskPoint, HalfPlanePoint,
};

/// Smallest uniform variate fed to the quantile map.
pub const UNIFORM_MIN: f64 = 5.421010862427522e-20; // 2^-64
/// Largest uniform variate fed to the quantile map.
pub const UNIFORM_MAX: f64 = 1.0 - f64::EPSILON / 2.0; // 1 - 2^-53

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub base_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub fn new(base_seed: u64, stream_index: u64) -> Self {
        Self {
            base_seed,
            stream_index,
        }
    }

    pub fn stream(&self) -> UniformStream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base_seed);
        rng.set_stream(self.stream_index);
        UniformStream { rng }
    }
}

/// Uniform variates on `[2^-64, 1 - 2^-53]`.
#[derive(Debug, Clone)]
pub struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        let u = (self.rng.next_u64() >> 11) as f64 * (f64::EPSILON / 2.0);
        u.clamp(UNIFORM_MIN, UNIFORM_MAX)
    }
}

/// An ordered, non-empty list of finite real observations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    values: Vec<f64>,
}

impl SampleBatch {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("sample batch must not be empty"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "sample batch contains non-finite value {v}"
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied()
    }

    /// The batch `scale*x + shift`.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|x| scale * x + shift).collect())
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// An ordered, non-empty list of angles in `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleBatch {
    angles: Vec<f64>,
}

impl AngleBatch {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(invalid("angle batch must not be empty"));
        }
        if let Some(a) = angles.iter().find(|a| !(**a >= 0.0 && **a < TAU)) {
            return Err(invalid(format!("angle {a} is outside [0, 2pi)")));
        }
        Ok(Self { angles })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// Inverse CDF of `C(theta)`.
pub fn cauchy_quantile(u: f64, theta: HalfPlanePoint) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(invalid(format!(
            "quantile level must lie in (0, 1), got {u}"
        )));
    }
    Ok(quantile_unchecked(u, theta))
}

#[inline]
fn quantile_unchecked(u: f64, theta: HalfPlanePoint) -> f64 {
    theta.re() + theta.im() * (PI * (u - 0.5)).tan()
}

pub fn cauchy_cdf(x: f64, theta: HalfPlanePoint) -> f64 {
    0.5 + ((x - theta.re()) / theta.im()).atan() / PI
}

/// `n` i.i.d. draws from `C(theta)`.
pub fn sample_cauchy(n: usize, theta: HalfPlanePoint, seed: SeedSpec) -> Result<SampleBatch> {
    if n == 0 {
        return Err(invalid("sample size must be at least 1"));
    }
    let mut stream = seed.stream();
    let values = (0..n)
        .map(|_| quantile_unchecked(stream.next_uniform(), theta))
        .collect();
    SampleBatch::new(values)
}

/// Angle of a unit complex number, folded into `[0, 2pi)`.
pub(crate) fn angle_of(re: f64, im: f64) -> f64 {
    let a = im.atan2(re);
    if a < 0.0 {
        let shifted = a + TAU;
        if shifted >= TAU {
            0.0
        } else {
            shifted
        }
    } else {
        a
    }
}

/// `n` i.i.d. draws from the circular Cauchy law with parameter `w`: real
/// draws from `C(phi_alpha^{-1}(w))` pushed onto the circle by `phi_alpha`.
pub fn sample_circular(
    n: usize,
    w: DiskPoint,
    alpha: HalfPlanePoint,
    seed: SeedSpec,
) -> Result<AngleBatch> {
    let theta = mobius_to_halfplane(w, alpha)?;
    let batch = sample_cauchy(n, theta, seed)?;
    push_to_circle(&batch, alpha)
}

/// Maps real observations to angles via `x -> arg(phi_alpha(x))`.
pub fn push_to_circle(batch: &SampleBatch, alpha: HalfPlanePoint) -> Result<AngleBatch> {
    let angles = batch
        .iter()
        .map(|x| {
            let u = boundary_to_circle(x, alpha);
            angle_of(u.re, u.im)
        })
        .collect();
    AngleBatch::new(angles)
}

/// Inverse of [`push_to_circle`]. The angle 0 is the image of infinity and
/// is rejected.
pub fn pull_to_line(angles: &AngleBatch, alpha: HalfPlanePoint) -> Result<SampleBatch> {
    let values = angles
        .angles()
        .iter()
        .map(|&a| {
            circle_to_boundary(Complex64::from_polar(1.0, a), alpha)
                .ok_or(Error::PullbackPole { angle: a })
        })
        .collect::<Result<Vec<_>>>()?;
    SampleBatch::new(values)
}
