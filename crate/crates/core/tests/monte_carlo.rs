//! Distributional checks. Every test uses fixed seeds, so the 4-SE bands
//! below are deterministic pass/fail thresholds.

mod common;

use std::f64::consts::TAU;

use cauchy_est::{
    cauchy_cdf, estimate_pipeline, h_extended, mle, mle_from, mobius_h, run_tail, sample_cauchy,
    sample_circular, Complex64, DiskPoint, EstimatorKind, Generator, HalfPlanePoint, Runner,
    SampleBatch, SeedSpec, SolverConfig, TailScenario,
};
use common::{complex_mean_se, Rand};

const N: usize = 100_000;

fn hp(re: f64, im: f64) -> HalfPlanePoint {
    HalfPlanePoint::new(re, im).unwrap()
}

fn assert_mean_within_4se(zs: &[Complex64], target: Complex64, what: &str) {
    let ((mr, sr), (mi, si)) = complex_mean_se(zs);
    assert!(
        (mr - target.re).abs() < 4.0 * sr && (mi - target.im).abs() < 4.0 * si,
        "{what}: mean {mr}+{mi}i, target {target}, se ({sr}, {si})"
    );
}

#[test]
fn sample_median_is_centred() {
    let b = sample_cauchy(N, HalfPlanePoint::I, SeedSpec::new(101, 0)).unwrap();
    let m = cauchy_est::median(&b).unwrap();
    assert!(m.abs() < 0.02, "{m}");
}

#[test]
fn mean_of_h_matches_cauchy_integral() {
    let b = sample_cauchy(N, HalfPlanePoint::I, SeedSpec::new(102, 0)).unwrap();
    let t = hp(0.0, 2.0);
    let zs: Vec<_> = b.iter().map(|x| mobius_h(x, t)).collect();
    let target = h_extended(Complex64::new(0.0, 1.0), t).unwrap();
    assert!((target - Complex64::new(-1.0 / 3.0, 0.0)).norm() < 1e-15);
    assert_mean_within_4se(&zs, target, "h(X, 2i)");
}

#[test]
fn score_is_centred() {
    for (k, theta) in [hp(0.0, 1.0), hp(10.0, 1.0), hp(0.0, 10.0)]
        .into_iter()
        .enumerate()
    {
        let b = sample_cauchy(N, theta, SeedSpec::new(103, k as u64)).unwrap();
        let h: Vec<_> = b.iter().map(|x| mobius_h(x, theta)).collect();
        let h2: Vec<_> = h.iter().map(|z| z * z).collect();
        assert_mean_within_4se(&h, Complex64::new(0.0, 0.0), "h");
        assert_mean_within_4se(&h2, Complex64::new(0.0, 0.0), "h^2");
    }
}

#[test]
fn residue_identity_for_every_generator() {
    for (k, theta) in [hp(0.0, 1.0), hp(10.0, 1.0), hp(0.0, 10.0)]
        .into_iter()
        .enumerate()
    {
        let b = sample_cauchy(N, theta, SeedSpec::new(104, k as u64)).unwrap();
        for g in Generator::presets() {
            let zs: Vec<_> = b.iter().map(|x| g.forward(x).unwrap()).collect();
            let target = g.forward_complex(theta.to_complex()).unwrap();
            assert_mean_within_4se(&zs, target, &format!("{g} at {theta}"));
        }
    }
}

#[test]
fn circular_sampler_is_uniform_at_origin() {
    let a = sample_circular(
        N,
        DiskPoint::ORIGIN,
        HalfPlanePoint::I,
        SeedSpec::new(105, 0),
    )
    .unwrap();
    let mut v = a.angles().to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let ks = v
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = x / TAU;
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0f64, f64::max);
    assert!(ks < 1.63 / n.sqrt(), "KS statistic {ks}");
}

#[test]
fn circular_first_moment_is_w() {
    let w = DiskPoint::new(0.5, 0.0).unwrap();
    for (k, alpha) in [hp(0.0, 1.0), hp(3.0, 0.5)].into_iter().enumerate() {
        let a = sample_circular(N, w, alpha, SeedSpec::new(106, k as u64)).unwrap();
        let zs: Vec<_> = a
            .angles()
            .iter()
            .map(|&t| Complex64::from_polar(1.0, t))
            .collect();
        assert_mean_within_4se(&zs, w.to_complex(), "E exp(i angle)");
    }
}

#[test]
fn circular_estimate_recovers_w() {
    let w = DiskPoint::new(0.5, 0.0).unwrap();
    let a = sample_circular(N, w, HalfPlanePoint::I, SeedSpec::new(107, 0)).unwrap();
    let est =
        cauchy_est::circular_estimate(&a, &Generator::f3(), HalfPlanePoint::I, false).unwrap();
    assert!((est.w.to_complex() - w.to_complex()).norm() < 0.02);
}

#[test]
fn neighbouring_streams_are_uncorrelated() {
    let a = sample_cauchy(N, HalfPlanePoint::I, SeedSpec::new(108, 5)).unwrap();
    let b = sample_cauchy(N, HalfPlanePoint::I, SeedSpec::new(108, 6)).unwrap();
    // correlate the underlying uniforms; raw Cauchy values have no moments
    let u: Vec<_> = a.iter().map(|x| cauchy_cdf(x, HalfPlanePoint::I)).collect();
    let v: Vec<_> = b.iter().map(|x| cauchy_cdf(x, HalfPlanePoint::I)).collect();
    let n = N as f64;
    let (mu, mv) = (u.iter().sum::<f64>() / n, v.iter().sum::<f64>() / n);
    let cov: f64 = u.iter().zip(&v).map(|(x, y)| (x - mu) * (y - mv)).sum();
    let su: f64 = u.iter().map(|x| (x - mu).powi(2)).sum();
    let sv: f64 = v.iter().map(|y| (y - mv).powi(2)).sum();
    let r = cov / (su * sv).sqrt();
    assert!(r.abs() < 0.01, "{r}");
}

#[test]
fn pipelines_are_consistent() {
    let theta = hp(2.0, 3.0);
    let n = 10_000;
    let bound = 10.0 * 2.0 * theta.im() / (n as f64).sqrt();
    for g in Generator::presets() {
        let close = (0..100)
            .filter(|&r| {
                let b = sample_cauchy(n, theta, SeedSpec::new(109, r)).unwrap();
                let z = estimate_pipeline(&g, &b, false).unwrap().value;
                (z.to_complex() - theta.to_complex()).norm() < bound
            })
            .count();
        assert!(close >= 99, "{g}: {close}/100");
    }
}

#[test]
fn mle_is_unique_from_random_starts() {
    let mut rng = Rand::new(110);
    let cfg = SolverConfig::default();
    for k in 0..20 {
        let n = rng.index(5, 100);
        let theta = rng.theta();
        let b = sample_cauchy(n, theta, SeedSpec::new(110, k)).unwrap();
        let reference = mle(&b, &cfg).unwrap();
        assert!(reference.converged);
        let scale = reference.theta_hat.im();
        for _ in 0..20 {
            let start = hp(
                theta.re() + rng.uniform(-5.0, 5.0) * theta.im(),
                theta.im() * rng.uniform(0.1, 5.0),
            );
            let r = mle_from(&b, start, &cfg).unwrap();
            assert!(r.converged, "start {start}");
            let d = (r.theta_hat.to_complex() - reference.theta_hat.to_complex()).norm();
            assert!(d < 1e-8 * scale.max(1.0), "n={n} start {start}: {d}");
        }
    }
}

#[test]
fn mle_tail_probability_scale() {
    let s = TailScenario {
        theta: HalfPlanePoint::I,
        n: 40,
        eps: 1.0,
        estimator: EstimatorKind::Mle,
        generator: None,
        replications: 100_000,
        base_seed: 111,
    };
    let r = run_tail(&s, &Runner::new(None)).unwrap();
    assert!(r.p_hat > 0.0 && r.p_hat < 0.1, "{}", r.p_hat);
    assert!((0.5..=2.0).contains(&r.rate_ratio), "{}", r.rate_ratio);
}

#[test]
fn constant_stub_never_exceeds_eps() {
    let s = TailScenario {
        theta: HalfPlanePoint::I,
        n: 10,
        eps: 0.5,
        estimator: EstimatorKind::OneStep,
        generator: Some(Generator::f3()),
        replications: 1000,
        base_seed: 112,
    };
    let stub = |_: &SampleBatch| Ok(Complex64::new(0.0, 1.0));
    let r = cauchy_est::run_tail_with(&s, &stub, &Runner::sequential()).unwrap();
    assert_eq!(r.p_hat, 0.0);
    assert!(r.rate_ratio.is_infinite());
    assert!(!r.warnings.is_empty());
}
