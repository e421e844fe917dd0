//! Reproducing kernels, Gram matrices and boundary quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};
use crate::linalg::{psd_check, CMatrix, HermitianMatrix, PsdReport};
use crate::mobius::{pseudo_hyperbolic, DiskPoint};
use crate::orbit::{enumerate_orbit, GroupPresentation, OrbitOptions, Word};

/// Points closer than this (pseudo-hyperbolic) are treated as equal.
pub const DUPLICATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelSpec {
    Szego,
    /// `K(z, w) = 1/(1 − φ(z)conj(φ(w)))` with `φ = inner^power`.
    ComposedInner { inner: BlaschkeProduct, power: u32 },
    /// Orbit-indexed Szegő blocks; only usable through [`orbit_block`].
    OrbitGram { group: GroupPresentation, depth: usize },
}

impl KernelSpec {
    pub fn composed(inner: BlaschkeProduct, power: u32) -> Result<Self> {
        if inner.origin_multiplicity() == 0 {
            return Err(Error::InvalidInput("composed kernel needs an inner function vanishing at 0".into()));
        }
        if power == 0 {
            return Err(Error::InvalidInput("composed kernel power must be at least 1".into()));
        }
        Ok(KernelSpec::ComposedInner { inner, power })
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Szego => "szego",
            KernelSpec::ComposedInner { .. } => "composed",
            KernelSpec::OrbitGram { .. } => "orbit",
        }
    }

    /// The map the kernel is pulled back along: `z` for Szegő, `φ(z)` for a
    /// composed kernel.
    pub fn symbol(&self, z: Complex64) -> Result<Complex64> {
        match self {
            KernelSpec::Szego => Ok(z),
            KernelSpec::ComposedInner { inner, power } => Ok(inner.value_at(z).powu(*power)),
            KernelSpec::OrbitGram { .. } => Err(Error::UnsupportedVariant("orbit")),
        }
    }
}

/// `K^S(z, w) = 1/(1 − w̄z)`.
#[inline]
pub fn szego(z: Complex64, w: Complex64) -> Complex64 {
    1.0 / (1.0 - w.conj() * z)
}

pub fn kernel_eval(k: &KernelSpec, z: DiskPoint, w: DiskPoint) -> Result<Complex64> {
    Ok(szego(k.symbol(z.value())?, k.symbol(w.value())?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub points: Vec<DiskPoint>,
    pub entries: HermitianMatrix,
    /// Largest truncation error of the kernel symbol over the points.
    pub truncation_note: Option<f64>,
}

pub fn check_distinct(points: &[DiskPoint]) -> Result<()> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let distance = pseudo_hyperbolic(points[i].value(), points[j].value());
            if distance <= DUPLICATE_TOL {
                return Err(Error::DuplicatePoints { i, j, distance });
            }
        }
    }
    Ok(())
}

/// `[K(z_i, z_j)]`, upper triangle computed and mirrored.
pub fn gram(k: &KernelSpec, points: &[DiskPoint]) -> Result<GramMatrix> {
    check_distinct(points)?;
    let symbols = points.iter().map(|p| k.symbol(p.value())).collect::<Result<Vec<_>>>()?;
    let n = points.len();
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = szego(symbols[i], symbols[j]);
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    let truncation_note = match k {
        KernelSpec::ComposedInner { inner, power } => points
            .iter()
            .map(|&p| inner.eval(p).map(|v| v.error_bound.map(|e| *power as f64 * e)))
            .collect::<Result<Option<Vec<f64>>>>()?
            .map(|v| v.into_iter().fold(0.0, f64::max)),
        _ => None,
    };
    Ok(GramMatrix { points: points.to_vec(), entries: HermitianMatrix::new(m)?, truncation_note })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitBlock {
    pub row_words: Vec<Word>,
    pub col_words: Vec<Word>,
    /// `entries[r][c] = K^S(γ_r(z), η_c(w))`.
    pub entries: Vec<Vec<Complex64>>,
}

/// The truncated block `[K^S(γ(z), η(w))]` over the deduplicated orbits of
/// `z` and `w`.
pub fn orbit_block(
    group: &GroupPresentation,
    opts: OrbitOptions,
    z: DiskPoint,
    w: DiskPoint,
) -> Result<OrbitBlock> {
    let oz = enumerate_orbit(group, z, opts)?;
    let ow = enumerate_orbit(group, w, opts)?;
    let entries = oz
        .points()
        .map(|p| ow.points().map(|q| szego(p.value(), q.value())).collect())
        .collect();
    Ok(OrbitBlock {
        row_words: oz.entries.into_iter().map(|e| e.word).collect(),
        col_words: ow.entries.into_iter().map(|e| e.word).collect(),
        entries,
    })
}

/// Checks `C²·K^S(B(z), B(w)) − K^σ(z, w) ⪰ 0` on the given points.
pub fn dominance_check(
    k_sigma: &KernelSpec,
    b_gamma: &BlaschkeProduct,
    c: f64,
    points: &[DiskPoint],
    tol: Option<f64>,
) -> Result<(HermitianMatrix, PsdReport)> {
    let g = gram(k_sigma, points)?;
    let bs: Vec<Complex64> = points.iter().map(|p| b_gamma.value_at(p.value())).collect();
    let n = points.len();
    let mut d = CMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            d[(i, j)] = c * c * szego(bs[i], bs[j]) - g.entries.matrix()[(i, j)];
            d[(j, i)] = d[(i, j)].conj();
        }
    }
    let d = HermitianMatrix::new(d)?;
    let report = psd_check(&d, tol)?;
    Ok((d, report))
}

/// Nodes and weights for `(1/2π)∫ f(e^{iθ}) dθ`.
///
/// The circle is split into the upper and lower half and each half is mapped
/// to the real line by `ξ = tanh(x/2 ± iπ/4)`, for which `dθ/dx = sech x`.
/// The midpoint rule on `[−40, 40]` then converges geometrically even when
/// the integrand has poles just outside the circle, where the uniform rule
/// on the circle stalls.
pub fn circle_quadrature(n_quad: usize) -> Vec<(Complex64, f64)> {
    let half = n_quad / 2;
    let span = 80.0;
    let h = span / half as f64;
    let mut nodes = Vec::with_capacity(2 * half);
    for k in 0..half {
        let x = -span / 2.0 + (k as f64 + 0.5) * h;
        let xi = Complex64::new(x / 2.0, PI / 4.0).tanh();
        let weight = h / (2.0 * PI * x.cosh());
        nodes.push((xi, weight));
        nodes.push((xi.conj(), weight));
    }
    nodes
}

/// `G_nm ≈ ∫ b^{2n} conj(b^{2m}) dm` for `0 ≤ n, m ≤ max_power`.
pub fn boundary_gram_quadrature(b: &BlaschkeProduct, max_power: usize, n_quad: usize) -> Result<GramMatrix> {
    if b.origin_multiplicity() == 0 {
        return Err(Error::InvalidInput("boundary Gram needs a product vanishing at 0".into()));
    }
    if n_quad < 1024 || !n_quad.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "quadrature size must be a power of two ≥ 1024, got {n_quad}"
        )));
    }
    let dim = max_power + 1;
    let mut m = CMatrix::zeros(dim);
    let mut powers = vec![Complex64::new(0.0, 0.0); dim];
    for (xi, weight) in circle_quadrature(n_quad) {
        let b2 = b.value_at(xi).powu(2);
        let mut p = Complex64::new(1.0, 0.0);
        for slot in powers.iter_mut() {
            *slot = p;
            p *= b2;
        }
        for i in 0..dim {
            for j in i..dim {
                m[(i, j)] += weight * powers[i] * powers[j].conj();
            }
        }
    }
    for i in 0..dim {
        for j in 0..i {
            m[(i, j)] = m[(j, i)].conj();
        }
    }
    Ok(GramMatrix { points: Vec::new(), entries: HermitianMatrix::new(m)?, truncation_note: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{default_tolerance, min_eig};
    use crate::orbit::OrbitOptions;
    use proptest::prelude::*;

    fn p(re: f64) -> DiskPoint {
        DiskPoint::real(re).unwrap()
    }

    fn z_squared() -> KernelSpec {
        KernelSpec::composed(BlaschkeProduct::identity(), 2).unwrap()
    }

    #[test]
    fn kernel_eval_examples() {
        assert!((kernel_eval(&KernelSpec::Szego, p(0.5), p(0.5)).unwrap() - 4.0 / 3.0).norm() < 1e-15);
        let w = DiskPoint::from_re_im(0.3, -0.7).unwrap();
        assert_eq!(kernel_eval(&KernelSpec::Szego, DiskPoint::origin(), w).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(kernel_eval(&z_squared(), DiskPoint::origin(), DiskPoint::origin()).unwrap(), Complex64::new(1.0, 0.0));
        let orbit = KernelSpec::OrbitGram { group: GroupPresentation::cyclic(0.5).unwrap(), depth: 1 };
        assert_eq!(kernel_eval(&orbit, w, w).unwrap_err(), Error::UnsupportedVariant("orbit"));
    }

    #[test]
    fn gram_examples() {
        let g = gram(&KernelSpec::Szego, &[p(0.0), p(-0.5), p(0.5)]).unwrap();
        let expected = CMatrix::from_real_rows(&[&[1.0, 1.0, 1.0], &[1.0, 4.0 / 3.0, 0.8], &[1.0, 0.8, 4.0 / 3.0]]).unwrap();
        assert!(g.entries.matrix().max_diff(&expected) < 1e-15);

        let one = gram(&KernelSpec::Szego, &[p(0.9)]).unwrap();
        assert!(one.entries.matrix()[(0, 0)].re > 0.0);

        let c = gram(&z_squared(), &[p(0.0), p(0.5)]).unwrap();
        let expected = CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0 / (1.0 - 1.0 / 16.0)]]).unwrap();
        assert!(c.entries.matrix().max_diff(&expected) < 1e-15);

        assert!(matches!(gram(&KernelSpec::Szego, &[p(0.5), p(0.5)]), Err(Error::DuplicatePoints { i: 0, j: 1, .. })));
    }

    #[test]
    fn orbit_block_examples() {
        let g = GroupPresentation::cyclic(0.5).unwrap();
        let z = DiskPoint::from_re_im(0.1, 0.4).unwrap();
        let w = DiskPoint::from_re_im(-0.3, 0.2).unwrap();
        let b0 = orbit_block(&g, OrbitOptions::new(0), z, w).unwrap();
        assert_eq!(b0.entries.len(), 1);
        assert_eq!(b0.entries[0][0], kernel_eval(&KernelSpec::Szego, z, w).unwrap());

        let b1 = orbit_block(&g, OrbitOptions::new(1), DiskPoint::origin(), DiskPoint::origin()).unwrap();
        let gram3 = gram(&KernelSpec::Szego, &[p(0.0), p(-0.5), p(0.5)]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((b1.entries[i][j] - gram3.entries.matrix()[(i, j)]).norm() < 1e-15);
            }
        }
        let z2 = GroupPresentation::z2z2(0.5).unwrap();
        let bz = orbit_block(&z2, OrbitOptions::new(1), DiskPoint::origin(), DiskPoint::origin()).unwrap();
        assert_eq!(bz.entries, b1.entries);
    }

    #[test]
    fn orbit_blocks_nest() {
        let g = GroupPresentation::z2z2(0.4).unwrap();
        let z = DiskPoint::from_re_im(0.1, 0.4).unwrap();
        let w = DiskPoint::from_re_im(-0.3, 0.2).unwrap();
        let small = orbit_block(&g, OrbitOptions::new(3), z, w).unwrap();
        let big = orbit_block(&g, OrbitOptions::new(4), z, w).unwrap();
        for (r, row) in small.entries.iter().enumerate() {
            assert_eq!(&big.entries[r][..row.len()], &row[..]);
        }
    }

    #[test]
    fn dominance_examples() {
        let g = GroupPresentation::z2z2(0.5).unwrap();
        let o = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(200)).unwrap();
        let b = BlaschkeProduct::from_orbit(&o, 1, true).unwrap();
        let b2 = BlaschkeProduct::from_orbit(&o, 2, true).unwrap();
        let k = KernelSpec::composed(b, 2).unwrap();
        let pts = [DiskPoint::from_re_im(0.1, 0.2).unwrap(), DiskPoint::from_re_im(-0.4, 0.3).unwrap()];
        let (d, r) = dominance_check(&k, &b2, 1.0, &pts, None).unwrap();
        assert!(d.matrix().max_abs() < 1e-10);
        assert!(r.is_psd);
        let (_, r0) = dominance_check(&k, &b2, 0.0, &pts, None).unwrap();
        assert!(!r0.is_psd);
        let (_, big) = dominance_check(&KernelSpec::Szego, &b2, 10.0, &pts[..1], None).unwrap();
        assert!(big.min_eigenvalue > 0.0);
    }

    #[test]
    fn quadrature_examples() {
        let z = BlaschkeProduct::identity();
        let g0 = boundary_gram_quadrature(&z, 0, 1024).unwrap();
        assert!((g0.entries.matrix()[(0, 0)] - 1.0).norm() < 1e-12);
        let g = boundary_gram_quadrature(&z, 3, 4096).unwrap();
        assert!(g.entries.matrix().max_diff(&CMatrix::identity(4)) < 1e-8);
        assert!(boundary_gram_quadrature(&z, 3, 1000).is_err());
        assert!(boundary_gram_quadrature(&BlaschkeProduct::new(0, vec![p(0.5)]), 1, 1024).is_err());
    }

    #[test]
    fn quadrature_weights_sum_to_one() {
        let s: f64 = circle_quadrature(2048).iter().map(|(_, w)| w).sum();
        assert!((s - 1.0).abs() < 1e-13);
        assert!(circle_quadrature(2048).iter().all(|(xi, _)| (xi.norm() - 1.0).abs() < 1e-14));
    }

    fn disk_point() -> impl Strategy<Value = DiskPoint> {
        (0.0f64..0.95, 0.0f64..(2.0 * PI)).prop_map(|(r, t)| DiskPoint::new(Complex64::from_polar(r, t)).unwrap())
    }

    proptest! {
        #[test]
        fn kernels_are_hermitian(z in disk_point(), w in disk_point()) {
            for k in [KernelSpec::Szego, z_squared()] {
                let a = kernel_eval(&k, z, w).unwrap();
                let b = kernel_eval(&k, w, z).unwrap();
                prop_assert!((a - b.conj()).norm() <= 1e-12);
            }
        }

        #[test]
        fn composed_is_szego_of_symbol(z in disk_point(), w in disk_point()) {
            let k = z_squared();
            let direct = kernel_eval(&k, z, w).unwrap();
            let pz = DiskPoint::new(k.symbol(z.value()).unwrap()).unwrap();
            let pw = DiskPoint::new(k.symbol(w.value()).unwrap()).unwrap();
            prop_assert_eq!(direct, kernel_eval(&KernelSpec::Szego, pz, pw).unwrap());
        }

        #[test]
        fn gram_is_psd(pts in proptest::collection::vec(disk_point(), 1..7)) {
            prop_assume!(check_distinct(&pts).is_ok());
            let g = gram(&KernelSpec::Szego, &pts).unwrap();
            prop_assert!(min_eig(&g.entries).unwrap() >= -default_tolerance(&g.entries));
        }
    }
}
