//! Disk automorphisms in the canonical form `φ(z) = λ(a − z)/(1 − āz)`.
//!
//! Every automorphism of the unit disk is a rotation composed with a single
//! Blaschke factor. We always store the pair `(a, λ)` with `a = φ⁻¹(0)` and
//! `|λ| = 1`; composition and inversion renormalize `λ` immediately so that
//! long words do not drift off the unit circle.
//!
//! Under this convention the identity is `(a, λ) = (0, −1)` and the rotation
//! `z ↦ μz` is `(0, −μ)`. Use [`DiskAutomorphism::rotation_factor`] to read a
//! stabilizer of the origin back as its multiplier `μ`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points with `|z| ≥ 1 − BOUNDARY_MARGIN` are not accepted as disk points.
pub const BOUNDARY_MARGIN: f64 = 1e-14;

/// Largest double strictly below one.
const ONE_BELOW: f64 = 1.0 - f64::EPSILON / 2.0;

/// Tolerance on `||λ| − 1|` accepted by [`DiskAutomorphism::new`].
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// A point strictly inside the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() || z.norm() >= 1.0 - BOUNDARY_MARGIN {
            return Err(Error::OutsideDisk { re: z.re, im: z.im });
        }
        Ok(DiskPoint(z))
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0))
    }

    pub fn origin() -> Self {
        DiskPoint(Complex64::new(0.0, 0.0))
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.0.norm()
    }
}

impl TryFrom<Complex64> for DiskPoint {
    type Error = Error;

    fn try_from(z: Complex64) -> Result<Self> {
        DiskPoint::new(z)
    }
}

impl From<DiskPoint> for Complex64 {
    fn from(p: DiskPoint) -> Complex64 {
        p.0
    }
}

impl fmt::Display for DiskPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Pseudo-hyperbolic distance `|z − w| / |1 − w̄z|`.
pub fn pseudo_hyperbolic(z: Complex64, w: Complex64) -> f64 {
    (z - w).norm() / (1.0 - w.conj() * z).norm()
}

/// The 16 fixed probe points `{0.1 e^{2πik/8}, 0.6 e^{2πik/8}}`.
pub fn probe_grid() -> Vec<DiskPoint> {
    [0.1, 0.6]
        .iter()
        .flat_map(|&r| {
            (0..8).map(move |k| DiskPoint(Complex64::from_polar(r, 2.0 * PI * k as f64 / 8.0)))
        })
        .collect()
}

/// Pulls a center that rounded onto (or past) the unit circle back inside.
fn clamp_inside(a: Complex64) -> Complex64 {
    let r = a.norm();
    if r >= 1.0 {
        a * (ONE_BELOW / r)
    } else {
        a
    }
}

fn unit(z: Complex64) -> Complex64 {
    z / z.norm()
}

/// A Möbius self-map of the disk, `φ(z) = λ(a − z)/(1 − āz)`.
///
/// `a` satisfies `|a| < 1`. Unlike [`DiskPoint`] it may sit arbitrarily close
/// to the circle: high powers of a hyperbolic element have centers that are
/// not representable at the `BOUNDARY_MARGIN` distance, and they are kept at
/// the largest modulus below one instead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskAutomorphism {
    a: Complex64,
    lambda: Complex64,
}

impl DiskAutomorphism {
    pub fn new(a: DiskPoint, lambda: Complex64) -> Result<Self> {
        if !lambda.re.is_finite()
            || !lambda.im.is_finite()
            || (lambda.norm() - 1.0).abs() > UNIMODULAR_TOL
        {
            return Err(Error::NotDiskAutomorphism(format!(
                "|λ| = {} is not 1",
                lambda.norm()
            )));
        }
        Ok(Self { a: a.value(), lambda: unit(lambda) })
    }

    /// Identity map; canonically `(a, λ) = (0, −1)`.
    pub fn identity() -> Self {
        Self { a: Complex64::new(0.0, 0.0), lambda: Complex64::new(-1.0, 0.0) }
    }

    /// Rotation `z ↦ μz` with `|μ| = 1`.
    pub fn rotation(mu: Complex64) -> Result<Self> {
        Self::new(DiskPoint::origin(), -mu)
    }

    /// The hyperbolic generator `γ_a(z) = (z − a)/(1 − az)`, `a ∈ (−1, 1)`.
    pub fn hyperbolic(a: f64) -> Result<Self> {
        let a = DiskPoint::real(a)?;
        Self::new(a, Complex64::new(-1.0, 0.0))
    }

    /// Builds the canonical form of `(pz + q)/(rz + s)`.
    ///
    /// The map is first checked to send the disk onto itself (`|φ(0)| < 1` and
    /// unimodular values at 8 boundary points), and the canonical pair is then
    /// required to reproduce it on the probe grid to `1e-12`.
    pub fn canonicalize(p: Complex64, q: Complex64, r: Complex64, s: Complex64) -> Result<Self> {
        let coeffs = [p, q, r, s];
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NotDiskAutomorphism("non-finite coefficient".into()));
        }
        let det = p * s - q * r;
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 || det.norm() <= 1e-14 * scale * scale {
            return Err(Error::NotDiskAutomorphism("degenerate coefficients".into()));
        }
        let mobius = |z: Complex64| (p * z + q) / (r * z + s);
        if s.norm() <= 1e-14 * scale || (q / s).norm() >= 1.0 {
            return Err(Error::NotDiskAutomorphism("φ(0) is not inside the disk".into()));
        }
        for k in 0..8 {
            let xi = Complex64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / 8.0);
            let m = mobius(xi).norm();
            if !m.is_finite() || (m - 1.0).abs() > 1e-9 {
                return Err(Error::NotDiskAutomorphism(format!(
                    "boundary point maps to modulus {m}"
                )));
            }
        }
        if p.norm() <= 1e-14 * scale {
            return Err(Error::NotDiskAutomorphism("φ⁻¹(0) is at infinity".into()));
        }
        let a = -q / p;
        if a.norm() >= 1.0 {
            return Err(Error::NotDiskAutomorphism("φ⁻¹(0) is outside the disk".into()));
        }
        let candidate = Self { a, lambda: unit(-p / s) };
        for z in probe_grid() {
            let dev = (candidate.apply(z.value()) - mobius(z.value())).norm();
            if dev > 1e-12 {
                return Err(Error::NotDiskAutomorphism(format!(
                    "canonical form deviates by {dev:e} at probe {z}"
                )));
            }
        }
        Ok(candidate)
    }

    /// Closed form of the `n`-th iterate of `γ_a(z) = (z − a)/(1 − az)`:
    /// `γ^(n)(z) = (z − a_n)/(1 − a_n z)` with `a_n = tanh(n·artanh a)`.
    pub fn iterate_cyclic(a: f64, n: i64) -> Result<Self> {
        if !(a.abs() < 1.0) {
            return Err(Error::InvalidInput(format!("hyperbolic parameter {a} outside (-1, 1)")));
        }
        let a_n = cyclic_center(a, n);
        Ok(Self {
            a: clamp_inside(Complex64::new(a_n, 0.0)),
            lambda: Complex64::new(-1.0, 0.0),
        })
    }

    #[inline]
    pub fn a(&self) -> Complex64 {
        self.a
    }

    #[inline]
    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    /// Coefficients `(p, q, r, s)` of `(pz + q)/(rz + s)`.
    pub fn coefficients(&self) -> [Complex64; 4] {
        let one = Complex64::new(1.0, 0.0);
        [-self.lambda, self.lambda * self.a, -self.a.conj(), one]
    }

    /// Evaluates the map at any complex `z` (including the boundary circle).
    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.lambda * (self.a - z) / (1.0 - self.a.conj() * z)
    }

    /// Evaluates at a disk point. Fails only when the image rounds onto the
    /// boundary margin, which happens for words whose center is numerically
    /// on the circle.
    pub fn evaluate(&self, z: DiskPoint) -> Result<DiskPoint> {
        DiskPoint::new(self.apply(z.value()))
    }

    /// `φ′(z) = λ(|a|² − 1)/(1 − āz)²`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let d = 1.0 - self.a.conj() * z;
        self.lambda * (self.a.norm_sqr() - 1.0) / (d * d)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let [p1, q1, r1, s1] = self.coefficients();
        let [p2, q2, r2, s2] = other.coefficients();
        let p = p1 * p2 + q1 * r2;
        let q = p1 * q2 + q1 * s2;
        let s = r1 * q2 + s1 * s2;
        Self { a: clamp_inside(-q / p), lambda: unit(-p / s) }
    }

    /// Inverse map, `(a, λ) ↦ (λa, λ̄)`.
    pub fn inverse(&self) -> Self {
        Self { a: clamp_inside(self.lambda * self.a), lambda: self.lambda.conj() }
    }

    /// For stabilizers of the origin, the multiplier `μ` of `z ↦ μz`.
    pub fn rotation_factor(&self) -> Option<Complex64> {
        (self.a.norm() == 0.0).then(|| -self.lambda)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.a.norm() <= tol && (self.lambda + 1.0).norm() <= tol
    }

    /// Largest deviation `|self(z) − other(z)|` over the probe grid.
    pub fn probe_distance(&self, other: &Self) -> f64 {
        probe_grid()
            .into_iter()
            .map(|z| (self.apply(z.value()) - other.apply(z.value())).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for DiskAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·({} − z)/(1 − conj({})z)", self.lambda, self.a, self.a)
    }
}

/// `a_n = ((1+a)^n − (1−a)^n)/((1+a)^n + (1−a)^n) = tanh(n·artanh a)`.
pub fn cyclic_center(a: f64, n: i64) -> f64 {
    (n as f64 * a.atanh()).tanh()
}

/// `1 − a_n = 2(1−a)^n/((1+a)^n + (1−a)^n)`, evaluated without cancellation.
pub fn cyclic_center_complement(a: f64, n: u64) -> f64 {
    let t = n as f64 * a.abs().atanh();
    2.0 / ((2.0 * t).exp() + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disk_point_rejects_boundary_and_nan() {
        assert!(DiskPoint::real(0.999).is_ok());
        assert!(DiskPoint::real(1.0).is_err());
        assert!(DiskPoint::real(1.0 - 1e-15).is_err());
        assert!(DiskPoint::new(c(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn canonicalize_hyperbolic_generator() {
        let f = DiskAutomorphism::canonicalize(c(1.0, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(1.0, 0.0))
            .unwrap();
        assert!((f.a() - c(0.5, 0.0)).norm() < 1e-15);
        assert!((f.lambda() - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn canonicalize_identity_and_negation() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let id = DiskAutomorphism::canonicalize(one, zero, zero, one).unwrap();
        assert!(id.is_identity(1e-15));
        assert_eq!(id.rotation_factor(), Some(one));
        let neg = DiskAutomorphism::canonicalize(-one, zero, zero, one).unwrap();
        assert_eq!(neg.a(), zero);
        assert_eq!(neg.lambda(), one);
        assert_eq!(neg.rotation_factor(), Some(-one));
    }

    #[test]
    fn canonicalize_rejects_non_automorphisms() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        // z/2 is a contraction, not onto.
        assert!(DiskAutomorphism::canonicalize(c(0.5, 0.0), zero, zero, one).is_err());
        // (z - 2)/(1 - 2z) swaps inside and outside.
        assert!(DiskAutomorphism::canonicalize(one, c(-2.0, 0.0), c(-2.0, 0.0), one).is_err());
        assert!(DiskAutomorphism::canonicalize(zero, zero, zero, zero).is_err());
    }

    #[test]
    fn compose_squares_to_closed_form() {
        let g = DiskAutomorphism::hyperbolic(0.5).unwrap();
        let g2 = g.compose(&g);
        assert!((g2.a() - c(0.8, 0.0)).norm() < 1e-15);
        let expected = DiskAutomorphism::hyperbolic(0.8).unwrap();
        assert!(g2.probe_distance(&expected) < 1e-12);
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let f = DiskAutomorphism::new(DiskPoint::from_re_im(0.3, -0.4).unwrap(), c(0.6, 0.8)).unwrap();
        assert!(f.compose(&f.inverse()).is_identity(1e-12));
        assert!(f.inverse().compose(&f).is_identity(1e-12));
        let id = DiskAutomorphism::identity();
        assert!(id.compose(&f).probe_distance(&f) < 1e-15);
    }

    #[test]
    fn inverse_examples() {
        let g = DiskAutomorphism::hyperbolic(0.5).unwrap();
        let inv = g.inverse();
        assert!((inv.apply(c(0.0, 0.0)) - c(0.5, 0.0)).norm() < 1e-15);
        assert!(DiskAutomorphism::identity().inverse().is_identity(0.0));
        let mu = Complex64::from_polar(1.0, 0.7);
        let rot = DiskAutomorphism::rotation(mu).unwrap();
        let back = rot.inverse().rotation_factor().unwrap();
        assert!((back - mu.conj()).norm() < 1e-15);
    }

    #[test]
    fn evaluate_examples() {
        let g = DiskAutomorphism::hyperbolic(0.5).unwrap();
        let at = |x: f64| g.evaluate(DiskPoint::real(x).unwrap()).unwrap().value();
        assert_eq!(at(0.0), c(-0.5, 0.0));
        assert_eq!(at(0.5), c(0.0, 0.0));
        let z = DiskPoint::from_re_im(0.2, 0.3).unwrap();
        assert_eq!(DiskAutomorphism::identity().evaluate(z).unwrap(), z);
    }

    #[test]
    fn derivative_examples() {
        let f = DiskAutomorphism::new(DiskPoint::real(0.5).unwrap(), c(-1.0, 0.0)).unwrap();
        assert!((f.derivative(c(0.0, 0.0)) - c(0.75, 0.0)).norm() < 1e-15);
        let z = c(0.3, -0.2);
        assert!((DiskAutomorphism::identity().derivative(z) - c(1.0, 0.0)).norm() < 1e-15);
        let mu = Complex64::from_polar(1.0, 2.0);
        let rot = DiskAutomorphism::rotation(mu).unwrap();
        assert!((rot.derivative(z) - mu).norm() < 1e-15);
    }

    #[test]
    fn iterate_cyclic_examples() {
        let g1 = DiskAutomorphism::iterate_cyclic(0.5, 1).unwrap();
        assert!((g1.a().re - 0.5).abs() < 1e-15);
        let g2 = DiskAutomorphism::iterate_cyclic(0.5, 2).unwrap();
        assert!((g2.a().re - 0.8).abs() < 1e-15);
        assert!(DiskAutomorphism::iterate_cyclic(0.3, 0).unwrap().is_identity(0.0));
        let back = DiskAutomorphism::iterate_cyclic(0.5, -2).unwrap();
        assert!((back.apply(c(0.0, 0.0)) - c(0.8, 0.0)).norm() < 1e-15);
        assert!(DiskAutomorphism::iterate_cyclic(1.0, 3).is_err());
    }

    #[test]
    fn closed_form_center_matches_power_formula() {
        for &a in &[0.3, 0.5, 0.7] {
            for n in 1..=20i32 {
                let (p, m) = ((1.0f64 + a).powi(n), (1.0f64 - a).powi(n));
                let direct = (p - m) / (p + m);
                assert!((cyclic_center(a, n as i64) - direct).abs() < 1e-14);
                let comp = 2.0 * m / (p + m);
                let rel = (cyclic_center_complement(a, n as u64) - comp).abs() / comp;
                assert!(rel < 1e-12, "a={a} n={n} rel={rel}");
            }
        }
    }

    #[test]
    fn high_iterates_stay_well_defined() {
        let g = DiskAutomorphism::iterate_cyclic(0.7, 30).unwrap();
        assert!(g.a().norm() < 1.0);
        let w = g.apply(c(0.2, 0.1));
        assert!((w + 1.0).norm() < 1e-12);
    }

    #[test]
    fn pseudo_hyperbolic_is_invariant() {
        let f = DiskAutomorphism::new(DiskPoint::from_re_im(0.1, 0.6).unwrap(), c(0.0, 1.0)).unwrap();
        let (z, w) = (c(0.3, 0.2), c(-0.5, 0.1));
        let before = pseudo_hyperbolic(z, w);
        let after = pseudo_hyperbolic(f.apply(z), f.apply(w));
        assert!((before - after).abs() < 1e-14);
    }
}
