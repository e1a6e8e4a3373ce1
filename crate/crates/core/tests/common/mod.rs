//! Helpers shared by the integration tests: an adaptive quadrature oracle and
//! a deterministic source of random test inputs.

#![allow(dead_code)]

use cauchy_est::sampling::UniformStream;
use cauchy_est::{Complex64, HalfPlanePoint, SampleBatch, SeedSpec};

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

fn cauchy_density(x: f64, mu: f64, sigma: f64) -> f64 {
    sigma / (std::f64::consts::PI * ((x - mu).powi(2) + sigma * sigma))
}

/// `K(P_from | P_to)` by quadrature. The substitution
/// `x = mu' + sigma' tan(pi (u - 1/2))` turns `p(x; from) dx` into `du`, so
/// the integrand is the bounded log-density ratio on `(0, 1)`.
pub fn kl_by_quadrature(from: (f64, f64), to: (f64, f64)) -> f64 {
    let (mf, sf) = from;
    let (mt, st) = to;
    let f = |u: f64| {
        let u = u.clamp(1e-17, 1.0 - 1e-16);
        let x = mf + sf * (std::f64::consts::PI * (u - 0.5)).tan();
        // log p(x; from) - log p(x; to), written to stay finite for huge |x|
        let num = ((x - mt) / sf).powi(2) + (st / sf).powi(2);
        let den = ((x - mf) / sf).powi(2) + 1.0;
        (sf / st).ln() + (num / den).ln()
    };
    integrate(&f, 0.0, 1.0, 1e-11)
}

pub fn density_mass(mu: f64, sigma: f64) -> f64 {
    let f = |v: f64| {
        let x = mu + sigma * v.tan();
        let c = v.cos();
        cauchy_density(x, mu, sigma) * sigma / (c * c)
    };
    let h = std::f64::consts::FRAC_PI_2 - 1e-9;
    integrate(&f, -h, h, 1e-12)
}

/// Uniform test inputs driven by the crate's own stream type.
pub struct Rand(UniformStream);

impl Rand {
    pub fn new(seed: u64) -> Self {
        Rand(SeedSpec::new(seed, u64::MAX).stream())
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.0.next_uniform()
    }

    pub fn index(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        let span = (hi_inclusive - lo + 1) as f64;
        lo + ((self.0.next_uniform() * span) as usize).min(hi_inclusive - lo)
    }

    pub fn theta(&mut self) -> HalfPlanePoint {
        HalfPlanePoint::new(self.uniform(-10.0, 10.0), self.uniform(0.2, 10.0)).unwrap()
    }
}

pub fn batch(values: &[f64]) -> SampleBatch {
    SampleBatch::new(values.to_vec()).unwrap()
}

/// Mean and standard error of each component of a complex sample.
pub fn complex_mean_se(zs: &[Complex64]) -> ((f64, f64), (f64, f64)) {
    let n = zs.len() as f64;
    let stats = |get: &dyn Fn(&Complex64) -> f64| {
        let m = zs.iter().map(get).sum::<f64>() / n;
        let v = zs.iter().map(|z| (get(z) - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    };
    (stats(&|z| z.re), stats(&|z| z.im))
}
