//! Dense Hermitian eigenvalues by the cyclic complex Jacobi method.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 2000;
const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("matrix is not square".into()));
        }
        Ok(Self { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect(),
        )
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|A_ij − B_ij|`.
    pub fn max_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    pub fn principal_submatrix(&self, idx: &[usize]) -> CMatrix {
        CMatrix::from_fn(idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    /// `A ⊗ B` (Kronecker product).
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let k = other.n;
        CMatrix::from_fn(self.n * k, |i, j| self[(i / k, j / k)] * other[(i % k, j % k)])
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// A conjugate-symmetric matrix. Construction checks the symmetry defect and
/// then replaces the lower triangle by the conjugate of the upper one and the
/// diagonal by its real part, so downstream code sees an exactly Hermitian
/// matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CMatrix", into = "CMatrix")]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let defect = m.hermitian_defect();
        let scale = 1.0 + m.max_abs();
        if defect > 1e-10 * scale {
            return Err(Error::InvalidInput(format!(
                "matrix is not Hermitian (defect {defect:e})"
            )));
        }
        let mut m = m;
        for i in 0..m.n {
            m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in i + 1..m.n {
                m[(j, i)] = m[(i, j)].conj();
            }
        }
        Ok(Self(m))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(CMatrix::from_real_rows(rows)?)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0.n
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.n()).map(|i| self.0[(i, i)].re).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n()).map(|i| self.0[(i, i)].re).sum()
    }

    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.n {
            m[(i, i)] += c;
        }
        Self(m)
    }

    /// `D A D` for a positive diagonal `D`; preserves the inertia.
    pub fn congruence_diagonal(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.n());
        Self(CMatrix::from_fn(self.n(), |i, j| self.0[(i, j)] * (d[i] * d[j])))
    }
}

impl TryFrom<CMatrix> for HermitianMatrix {
    type Error = Error;

    fn try_from(m: CMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<HermitianMatrix> for CMatrix {
    fn from(h: HermitianMatrix) -> CMatrix {
        h.0
    }
}

/// All eigenvalues in ascending order.
pub fn eigenvalues(h: &HermitianMatrix) -> Result<Vec<f64>> {
    let n = h.n();
    if n > MAX_DIM {
        return Err(Error::InvalidInput(format!("matrix dimension {n} exceeds {MAX_DIM}")));
    }
    let mut a = h.0.clone();
    let frob = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = OFF_DIAGONAL_TOL * frob;
    let off_norm = |a: &CMatrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, p, q, sweeps > 4);
            }
        }
    }

    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// One Jacobi rotation annihilating `a[p][q]`. Only rows `p` and `q` are
/// computed; the columns follow by conjugate symmetry.
fn rotate(a: &mut CMatrix, p: usize, q: usize, late_sweep: bool) {
    let zero = Complex64::new(0.0, 0.0);
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Past the first sweeps an element below the rounding level of both
    // diagonal entries is dropped without rotating.
    let g = 100.0 * r;
    if late_sweep && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
        a[(p, q)] = zero;
        a[(q, p)] = zero;
        return;
    }
    let e = apq / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let (se, sec) = (e * s, e.conj() * s);
    let n = a.n;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        let new_p = apk * c - aqk * se;
        let new_q = apk * sec + aqk * c;
        a[(p, k)] = new_p;
        a[(q, k)] = new_q;
        a[(k, p)] = new_p.conj();
        a[(k, q)] = new_q.conj();
    }
    a[(p, p)] = Complex64::new(app - t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * r, 0.0);
    a[(p, q)] = zero;
    a[(q, p)] = zero;
}

pub fn min_eig(h: &HermitianMatrix) -> Result<f64> {
    Ok(eigenvalues(h)?.first().copied().unwrap_or(f64::INFINITY))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub min_eigenvalue: f64,
    pub is_psd: bool,
    pub tolerance_used: f64,
}

pub fn default_tolerance(h: &HermitianMatrix) -> f64 {
    1e-10 * (1.0 + h.max_diagonal())
}

/// PSD verdict `min_eig ≥ −tol`; `tol` defaults to `1e−10·(1 + max diagonal)`.
pub fn psd_check(h: &HermitianMatrix, tol: Option<f64>) -> Result<PsdReport> {
    let tolerance_used = match tol {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => return Err(Error::InvalidInput(format!("PSD tolerance must be positive, got {t}"))),
        None => default_tolerance(h),
    };
    let min_eigenvalue = min_eig(h)?;
    Ok(PsdReport { min_eigenvalue, is_psd: min_eigenvalue >= -tolerance_used, tolerance_used })
}

fn det2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    a * d - b * c
}

fn principal_minor(m: &CMatrix, idx: &[usize]) -> f64 {
    let e = |i: usize, j: usize| m[(idx[i], idx[j])];
    match idx.len() {
        1 => e(0, 0).re,
        2 => det2(e(0, 0), e(0, 1), e(1, 0), e(1, 1)).re,
        3 => (e(0, 0) * det2(e(1, 1), e(1, 2), e(2, 1), e(2, 2))
            - e(0, 1) * det2(e(1, 0), e(1, 2), e(2, 0), e(2, 2))
            + e(0, 2) * det2(e(1, 0), e(1, 1), e(2, 0), e(2, 1)))
        .re,
        _ => unreachable!(),
    }
}

/// PSD test by all principal minors, for matrices of order at most 3.
pub fn brute_force_psd_3x3(h: &HermitianMatrix) -> Result<bool> {
    let n = h.n();
    if n > 3 {
        return Err(Error::InvalidInput(format!("brute-force PSD check needs n ≤ 3, got {n}")));
    }
    let subsets = (1u32..1 << n).map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>());
    Ok(subsets.into_iter().all(|idx| principal_minor(&h.0, &idx) >= -1e-12))
}
