//! Parameter spaces of the Cauchy and circular Cauchy families.
//!
//! A Cauchy law `C(mu, sigma)` is identified with the point `mu + sigma*i` of
//! the upper half-plane; a circular Cauchy law with a point of the open unit
//! disk. The two are linked by the Cayley-type maps [`mobius_to_disk`] and
//! [`mobius_to_halfplane`], and both carry a closed-form Kullback-Leibler
//! divergence that depends only on the hyperbolic invariant
//! [`maximal_invariant`].

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// Smallest admissible imaginary part of a [`HalfPlanePoint`].
pub const MIN_IM: f64 = 1e-300;

/// Largest admissible squared modulus of a [`DiskPoint`].
pub const MAX_DISK_NORM_SQR: f64 = 1.0 - 1e-12;

/// A Cauchy parameter `theta = mu + sigma*i` with `sigma > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    re: f64,
    im: f64,
}

impl HalfPlanePoint {
    /// The standard Cauchy parameter `i`.
    pub const I: HalfPlanePoint = HalfPlanePoint { re: 0.0, im: 1.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(invalid(format!(
                "half-plane point {re}+{im}i is not finite"
            )));
        }
        if im < MIN_IM {
            return Err(invalid(format!(
                "half-plane point needs Im > 0, got {re}+{im}i"
            )));
        }
        Ok(Self { re, im })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    /// Location `mu`.
    pub fn re(&self) -> f64 {
        self.re
    }

    /// Scale `sigma`.
    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// The image under `x -> scale*x + shift`, which maps `C(theta)` onto
    /// `C(scale*theta + shift)` for `scale > 0`.
    pub fn affine(self, scale: f64, shift: f64) -> Result<Self> {
        Self::new(scale * self.re + shift, scale * self.im)
    }
}

impl fmt::Display for HalfPlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.re, self.im)
    }
}

impl From<HalfPlanePoint> for Complex64 {
    fn from(p: HalfPlanePoint) -> Self {
        p.to_complex()
    }
}

impl Serialize for HalfPlanePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.re, self.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for HalfPlanePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        HalfPlanePoint::new(re, im).map_err(serde::de::Error::custom)
    }
}

/// A circular Cauchy parameter `w` with `|w| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    re: f64,
    im: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(invalid(format!("disk point {re}+{im}i is not finite")));
        }
        if re * re + im * im > MAX_DISK_NORM_SQR {
            return Err(invalid(format!(
                "disk point {re}+{im}i is not inside the unit disk"
            )));
        }
        Ok(Self { re, im })
    }

    pub fn from_complex(w: Complex64) -> Result<Self> {
        Self::new(w.re, w.im)
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

impl fmt::Display for DiskPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.re, self.im)
    }
}

impl Serialize for DiskPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.re, self.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiskPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        DiskPoint::new(re, im).map_err(serde::de::Error::custom)
    }
}

/// An element of SL(2, R), stored with unit determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sl2Matrix {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Sl2Matrix {
    pub const IDENTITY: Sl2Matrix = Sl2Matrix {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Builds the matrix `[[a, b], [c, d]]`, rescaling by `1/sqrt(ad - bc)`.
    /// A non-positive determinant has no representative in SL(2, R).
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if ![a, b, c, d].iter().all(|v| v.is_finite()) || !det.is_finite() || det <= 0.0 {
            return Err(invalid(format!(
                "matrix [[{a}, {b}], [{c}, {d}]] has determinant {det}, need > 0"
            )));
        }
        let s = det.sqrt().recip();
        Ok(Self {
            a: a * s,
            b: b * s,
            c: c * s,
            d: d * s,
        })
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }
}

impl Mul for Sl2Matrix {
    type Output = Sl2Matrix;

    fn mul(self, o: Sl2Matrix) -> Sl2Matrix {
        Sl2Matrix {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

/// The kernel `h(x, t) = (x - t)/(x - conj(t))` for real `x`; always of unit
/// modulus.
#[inline]
pub fn mobius_h(x: f64, t: HalfPlanePoint) -> Complex64 {
    let u = x - t.re;
    // (u - i s)/(u + i s) = (u - i s)^2 / (u^2 + s^2)
    let s = t.im;
    let den = u * u + s * s;
    Complex64::new((u * u - s * s) / den, -2.0 * u * s / den)
}

/// `h(z, t)` for `z` in the closed upper half-plane.
pub fn h_extended(z: Complex64, t: HalfPlanePoint) -> Result<Complex64> {
    if z.im < 0.0 {
        return Err(invalid(format!("h_extended needs Im(z) >= 0, got {z}")));
    }
    let den = z - t.to_complex().conj();
    if den.norm_sqr() == 0.0 {
        return Err(Error::Degenerate(format!("z = {z} coincides with conj(t)")));
    }
    Ok((z - t.to_complex()) / den)
}

/// `|gamma - theta|^2 / (4 Im(gamma) Im(theta))`, the invariant of the
/// diagonal SL(2, R) action on pairs of half-plane points.
pub fn maximal_invariant(gamma: HalfPlanePoint, theta: HalfPlanePoint) -> f64 {
    let dre = gamma.re - theta.re;
    let dim = gamma.im - theta.im;
    (dre * dre + dim * dim) / (4.0 * gamma.im * theta.im)
}

/// Kullback-Leibler divergence `K(P_from | P_to)` between two Cauchy laws.
pub fn kl_halfplane(from: HalfPlanePoint, to: HalfPlanePoint) -> f64 {
    maximal_invariant(from, to).ln_1p()
}

/// `b(eps, theta)`: the infimum of `K(P_theta' | P_theta)` over
/// `|theta' - theta| > eps`. Independent of the location.
pub fn bahadur_rate(eps: f64, theta: HalfPlanePoint) -> Result<f64> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(invalid(format!("bahadur_rate needs eps > 0, got {eps}")));
    }
    let s = theta.im;
    Ok((eps * eps / (4.0 * s * (s + eps))).ln_1p())
}

/// Kullback-Leibler divergence between two circular Cauchy laws.
pub fn kl_circular(from: DiskPoint, to: DiskPoint) -> f64 {
    let d = (from.to_complex() - to.to_complex()).norm_sqr();
    (d / ((1.0 - from.norm_sqr()) * (1.0 - to.norm_sqr()))).ln_1p()
}

/// Circular analogue of [`bahadur_rate`], valid for `0 < eps < 1 - |w|`.
///
/// This is `K(P_w | P_w')` at `w' = w + eps w/|w|`, the outward point of the
/// circle `|w' - w| = eps`. Off the origin that is the largest divergence on
/// the circle; the smallest is at the inward point, `|w'| = |w| - eps`. Both
/// share the `eps^2 / (1 - |w|^2)^2` small-`eps` behaviour.
pub fn bahadur_rate_circular(eps: f64, w: DiskPoint) -> Result<f64> {
    let r = w.norm();
    if eps.is_nan() || eps <= 0.0 || eps >= 1.0 - r {
        return Err(invalid(format!(
            "bahadur_rate_circular needs 0 < eps < {}, got {eps}",
            1.0 - r
        )));
    }
    let outer = r + eps;
    Ok((eps * eps / ((1.0 - r * r) * (1.0 - outer * outer))).ln_1p())
}

/// `phi_alpha(z) = h(z, alpha)`, mapping the upper half-plane onto the unit
/// disk with `alpha` sent to the origin.
pub fn mobius_to_disk(z: HalfPlanePoint, alpha: HalfPlanePoint) -> Result<DiskPoint> {
    let a = alpha.to_complex();
    let zc = z.to_complex();
    DiskPoint::from_complex((zc - a) / (zc - a.conj()))
}

/// `phi_alpha` on the boundary: a real point goes to the unit circle.
pub fn boundary_to_circle(x: f64, alpha: HalfPlanePoint) -> Complex64 {
    mobius_h(x, alpha)
}

/// `phi_alpha^{-1}(w) = (alpha - conj(alpha) w)/(1 - w)`.
pub fn mobius_to_halfplane(w: DiskPoint, alpha: HalfPlanePoint) -> Result<HalfPlanePoint> {
    let a = alpha.to_complex();
    let wc = w.to_complex();
    HalfPlanePoint::from_complex((a - a.conj() * wc) / (1.0 - wc))
}

/// `phi_alpha^{-1}` on the unit circle, returning a real point. The point
/// `u = 1` is the image of infinity and has no preimage.
pub fn circle_to_boundary(u: Complex64, alpha: HalfPlanePoint) -> Option<f64> {
    let a = alpha.to_complex();
    let den = Complex64::new(1.0, 0.0) - u;
    if den.norm_sqr() == 0.0 {
        return None;
    }
    Some(((a - a.conj() * u) / den).re)
}

/// Complex derivative `phi_alpha'(z) = (alpha - conj(alpha))/(z - conj(alpha))^2`.
pub fn mobius_derivative(z: Complex64, alpha: HalfPlanePoint) -> Complex64 {
    let a = alpha.to_complex();
    let q = z - a.conj();
    (a - a.conj()) / (q * q)
}

/// The fractional linear action `(a z + b)/(c z + d)`.
pub fn sl2_act(m: Sl2Matrix, z: HalfPlanePoint) -> Result<HalfPlanePoint> {
    let zc = z.to_complex();
    let num = zc * m.a + m.b;
    let den = zc * m.c + m.d;
    HalfPlanePoint::from_complex(num / den)
}

/// Log-density of `C(theta)` at `x`.
pub fn log_density(x: f64, theta: HalfPlanePoint) -> f64 {
    let u = x - theta.re;
    theta.im.ln() - PI.ln() - (u * u + theta.im * theta.im).ln()
}

/// Log-density of the circular Cauchy law with parameter `w` at `angle`.
pub fn circular_log_density(angle: f64, w: DiskPoint) -> f64 {
    let e = Complex64::from_polar(1.0, angle);
    ((1.0 - w.norm_sqr()) / (2.0 * PI * (e - w.to_complex()).norm_sqr())).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn hp(re: f64, im: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(re, im).unwrap()
    }

    fn dp(re: f64, im: f64) -> DiskPoint {
        DiskPoint::new(re, im).unwrap()
    }

    #[test]
    fn construction_rejects_boundary_and_non_finite() {
        assert!(HalfPlanePoint::new(0.0, 0.0).is_err());
        assert!(HalfPlanePoint::new(0.0, -1.0).is_err());
        assert!(HalfPlanePoint::new(f64::NAN, 1.0).is_err());
        assert!(HalfPlanePoint::new(0.0, f64::INFINITY).is_err());
        assert!(HalfPlanePoint::new(0.0, 1e-300).is_ok());
        assert!(DiskPoint::new(1.0, 0.0).is_err());
        assert!(DiskPoint::new(0.6, 0.8).is_err());
        assert!(DiskPoint::new(0.5, 0.5).is_ok());
        assert!(Sl2Matrix::new(1.0, 2.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn sl2_normalizes_determinant() {
        let m = Sl2Matrix::new(2.0, 1.0, 1.0, 3.0).unwrap();
        assert_abs_diff_eq!(m.det(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn h_examples() {
        let v = mobius_h(0.0, HalfPlanePoint::I);
        assert_abs_diff_eq!(v.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        let v = mobius_h(1.0, HalfPlanePoint::I);
        assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn h_extended_examples() {
        let t = hp(0.3, 1.7);
        assert_eq!(
            h_extended(t.to_complex(), t).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let v = h_extended(Complex64::new(0.0, 2.0), HalfPlanePoint::I).unwrap();
        assert_abs_diff_eq!(v.re, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        let v = h_extended(Complex64::new(0.0, 1.0), hp(0.0, 2.0)).unwrap();
        assert_abs_diff_eq!(v.re, -1.0 / 3.0, epsilon = 1e-15);
        assert!(h_extended(Complex64::new(0.0, -1.0), HalfPlanePoint::I).is_err());
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_halfplane(HalfPlanePoint::I, HalfPlanePoint::I), 0.0);
        assert_abs_diff_eq!(
            kl_halfplane(hp(0.0, 2.0), HalfPlanePoint::I),
            (9.0f64 / 8.0).ln(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            kl_halfplane(hp(1.0, 1.0), HalfPlanePoint::I),
            1.25f64.ln(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn kl_is_accurate_for_nearby_parameters() {
        let a = hp(0.0, 1.0);
        let b = hp(1e-8, 1.0);
        // chi = 1e-16/4; a naive ln(1 + chi) would round to 0
        assert_abs_diff_eq!(kl_halfplane(a, b), 0.25e-16, epsilon = 1e-30);
    }

    #[test]
    fn bahadur_rate_examples() {
        let b = bahadur_rate(1.0, HalfPlanePoint::I).unwrap();
        assert_abs_diff_eq!(b, (9.0f64 / 8.0).ln(), epsilon = 1e-15);
        assert_eq!(b, bahadur_rate(1.0, hp(10.0, 1.0)).unwrap());
        assert!(bahadur_rate(0.0, HalfPlanePoint::I).is_err());
        assert!(bahadur_rate(-1.0, HalfPlanePoint::I).is_err());
        for sigma in [0.5, 1.0, 3.0] {
            let theta = hp(2.0, sigma);
            let eps = 1e-5;
            let ratio = bahadur_rate(eps, theta).unwrap() / (eps * eps);
            assert_abs_diff_eq!(ratio, 1.0 / (4.0 * sigma * sigma), epsilon = 1e-4);
        }
    }

    #[test]
    fn bahadur_rate_is_increasing() {
        let theta = hp(0.0, 2.0);
        let mut prev = 0.0;
        for k in 1..200 {
            let b = bahadur_rate(k as f64 * 0.05, theta).unwrap();
            assert!(b > prev);
            prev = b;
        }
    }

    #[test]
    fn circular_kl_and_rate_examples() {
        assert_eq!(kl_circular(DiskPoint::ORIGIN, DiskPoint::ORIGIN), 0.0);
        let half = dp(0.5, 0.0);
        assert_abs_diff_eq!(
            kl_circular(DiskPoint::ORIGIN, half),
            (4.0f64 / 3.0).ln(),
            epsilon = 1e-15
        );
        let via_plane = kl_halfplane(
            mobius_to_halfplane(DiskPoint::ORIGIN, HalfPlanePoint::I).unwrap(),
            mobius_to_halfplane(half, HalfPlanePoint::I).unwrap(),
        );
        assert_abs_diff_eq!(via_plane, (4.0f64 / 3.0).ln(), epsilon = 1e-14);

        assert_abs_diff_eq!(
            bahadur_rate_circular(0.5, DiskPoint::ORIGIN).unwrap(),
            (4.0f64 / 3.0).ln(),
            epsilon = 1e-15
        );
        let eps = 1e-5;
        let r = bahadur_rate_circular(eps, DiskPoint::ORIGIN).unwrap() / (eps * eps);
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-4);
        assert!(bahadur_rate_circular(0.5, half).is_err());
        assert!(bahadur_rate_circular(0.0, half).is_err());
    }

    #[test]
    fn circular_rate_against_grid() {
        // K(P_w | P_w') on the circle |w' - w| = eps: the closed form is the
        // largest value, the smallest sits on the side facing the origin
        let w = dp(0.3, -0.2);
        let eps = 0.1;
        let m = 10_000;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for k in 0..m {
            let phi = 2.0 * PI * k as f64 / m as f64;
            let c =
                DiskPoint::from_complex(w.to_complex() + Complex64::from_polar(eps, phi)).unwrap();
            let kl = kl_circular(w, c);
            lo = lo.min(kl);
            hi = hi.max(kl);
        }
        let closed = bahadur_rate_circular(eps, w).unwrap();
        assert!((hi - closed).abs() < 1e-8, "{hi} vs {closed}");
        let r = w.norm();
        let inward = (eps * eps / ((1.0 - r * r) * (1.0 - (r - eps).powi(2)))).ln_1p();
        assert!((lo - inward).abs() < 1e-8, "{lo} vs {inward}");

        // at the origin the circle is a level set and both agree
        let closed = bahadur_rate_circular(0.5, DiskPoint::ORIGIN).unwrap();
        let c = DiskPoint::from_complex(Complex64::new(0.0, 0.5)).unwrap();
        assert_abs_diff_eq!(kl_circular(DiskPoint::ORIGIN, c), closed, epsilon = 1e-15);
    }

    #[test]
    fn mobius_examples() {
        let w = mobius_to_disk(HalfPlanePoint::I, HalfPlanePoint::I).unwrap();
        assert_eq!(w.to_complex(), Complex64::new(0.0, 0.0));
        let w = mobius_to_disk(hp(0.0, 2.0), HalfPlanePoint::I).unwrap();
        assert_abs_diff_eq!(w.re(), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.im(), 0.0, epsilon = 1e-15);
        let z = mobius_to_halfplane(DiskPoint::ORIGIN, HalfPlanePoint::I).unwrap();
        assert_eq!(z, HalfPlanePoint::I);
        let z = mobius_to_halfplane(dp(1.0 / 3.0, 0.0), HalfPlanePoint::I).unwrap();
        assert_abs_diff_eq!(z.re(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im(), 2.0, epsilon = 1e-14);
        let u = boundary_to_circle(3.5, hp(1.0, 2.0));
        assert_abs_diff_eq!(u.norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            circle_to_boundary(u, hp(1.0, 2.0)).unwrap(),
            3.5,
            epsilon = 1e-12
        );
        assert!(circle_to_boundary(Complex64::new(1.0, 0.0), HalfPlanePoint::I).is_none());
    }

    #[test]
    fn sl2_examples() {
        let z = hp(0.4, 2.5);
        assert_eq!(sl2_act(Sl2Matrix::IDENTITY, z).unwrap(), z);
        let m = Sl2Matrix::new(2.0, 0.0, 0.0, 0.5).unwrap();
        let v = sl2_act(m, HalfPlanePoint::I).unwrap();
        assert_abs_diff_eq!(v.re(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im(), 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            maximal_invariant(hp(0.0, 4.0), hp(0.0, 2.0)),
            maximal_invariant(hp(0.0, 2.0), HalfPlanePoint::I),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(maximal_invariant(hp(0.0, 2.0), HalfPlanePoint::I), 0.125);
        assert_eq!(maximal_invariant(z, z), 0.0);
    }

    #[test]
    fn density_examples() {
        assert_abs_diff_eq!(
            log_density(0.0, HalfPlanePoint::I),
            -PI.ln(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            log_density(1.0, HalfPlanePoint::I),
            -(2.0 * PI).ln(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            circular_log_density(1.234, DiskPoint::ORIGIN),
            -(2.0 * PI).ln(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            circular_log_density(0.0, dp(0.5, 0.0)),
            (3.0 / (2.0 * PI)).ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn serde_validates() {
        let p: HalfPlanePoint = serde_json::from_str("[1.5, 2.0]").unwrap();
        assert_eq!(p, hp(1.5, 2.0));
        assert!(serde_json::from_str::<HalfPlanePoint>("[1.5, -2.0]").is_err());
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1.5,2.0]");
        assert!(serde_json::from_str::<DiskPoint>("[1.5, 0.0]").is_err());
    }
}
