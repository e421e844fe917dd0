//! Truncated orbit Blaschke products and their characters.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobius::{DiskAutomorphism, DiskPoint};
use crate::orbit::Orbit;

/// Largest modulus at which [`BlaschkeProduct::eval`] reports a value.
pub const EVAL_RADIUS: f64 = 0.999;

/// `z^m · Π (|ζ|/ζ)(ζ − z)/(1 − ζ̄z)` over the stored zeros, plus the total
/// weight `Σ(1 − |ζ|)` of zeros that were left out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    origin_multiplicity: usize,
    zeros: Vec<DiskPoint>,
    tail_weight: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeValue {
    pub value: Complex64,
    /// `None` when the omitted zeros carry no bound (generic groups).
    pub error_bound: Option<f64>,
}

impl BlaschkeProduct {
    /// Finite product with the given zeros; zeros equal to 0 are folded into
    /// the origin multiplicity.
    pub fn new(origin_multiplicity: usize, zeros: Vec<DiskPoint>) -> Self {
        let extra = zeros.iter().filter(|z| z.norm() == 0.0).count();
        Self {
            origin_multiplicity: origin_multiplicity + extra,
            zeros: zeros.into_iter().filter(|z| z.norm() != 0.0).collect(),
            tail_weight: Some(0.0),
        }
    }

    /// `B(z) = z`.
    pub fn identity() -> Self {
        Self::new(1, Vec::new())
    }

    /// The orbit Blaschke product raised to the power `m`, each zero repeated
    /// `m` times in orbit order. With `strict`, orbits without a tail bound
    /// are refused.
    pub fn from_orbit(orbit: &Orbit, m: usize, strict: bool) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("stabilizer order must be at least 1".into()));
        }
        if strict && orbit.tail_bound.is_none() {
            return Err(Error::NoTailBound);
        }
        let mut origin_multiplicity = 0;
        let mut zeros = Vec::with_capacity(m * orbit.len());
        for p in orbit.points() {
            if p.norm() == 0.0 {
                origin_multiplicity += m;
            } else {
                zeros.extend(std::iter::repeat_n(p, m));
            }
        }
        Ok(Self {
            origin_multiplicity,
            zeros,
            tail_weight: orbit.tail_bound.map(|t| m as f64 * t),
        })
    }

    pub fn origin_multiplicity(&self) -> usize {
        self.origin_multiplicity
    }

    pub fn zeros(&self) -> &[DiskPoint] {
        &self.zeros
    }

    pub fn tail_weight(&self) -> Option<f64> {
        self.tail_weight
    }

    pub fn degree(&self) -> usize {
        self.origin_multiplicity + self.zeros.len()
    }

    /// Evaluates the stored finite product at any complex `z`, in stored
    /// zero order. No radius check.
    pub fn value_at(&self, z: Complex64) -> Complex64 {
        let mut v = Complex64::new(1.0, 0.0);
        for _ in 0..self.origin_multiplicity {
            v *= z;
        }
        for zeta in &self.zeros {
            let zeta = zeta.value();
            v *= (zeta.norm() / zeta) * (zeta - z) / (1.0 - zeta.conj() * z);
        }
        v
    }

    /// Value with the truncation bound `tail_weight·(1 + |z|)/(1 − |z|)`.
    ///
    /// Each omitted factor satisfies
    /// `|1 − (|ζ|/ζ)(ζ − z)/(1 − ζ̄z)| ≤ (1 − |ζ|)(1 + |z|)/(1 − |z|)`, and a
    /// product of contractions moves by at most the sum of the moves.
    pub fn eval(&self, z: DiskPoint) -> Result<BlaschkeValue> {
        let r = z.norm();
        if r > EVAL_RADIUS {
            return Err(Error::TooCloseToBoundary { modulus: r, limit: EVAL_RADIUS });
        }
        Ok(BlaschkeValue {
            value: self.value_at(z.value()),
            error_bound: self.tail_weight.map(|t| t * (1.0 + r) / (1.0 - r)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterReport {
    pub values: Vec<Complex64>,
    pub consistency_residual: f64,
}

/// Eight probes `0.5·e^{iπ(2k+1)/8}`, off the real axis where the orbits of
/// the real hyperbolic groups accumulate.
pub fn character_probes() -> Vec<DiskPoint> {
    (0..8)
        .map(|k| {
            DiskPoint::new(Complex64::from_polar(0.5, PI * (2 * k + 1) as f64 / 8.0))
                .expect("probe inside disk")
        })
        .collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Estimates `σ(g)` from `B(g(z_k))/B(z_k)` at the eight probes.
///
/// The componentwise median of the ratios is projected to the unit circle;
/// the residual is the largest distance of a ratio from the median. Fails
/// when the residual exceeds `tol`, when the median is not unimodular to
/// `tol`, or when a probe value is not at least ten times its error bound.
pub fn character_of(b: &BlaschkeProduct, g: &DiskAutomorphism, tol: f64) -> Result<CharacterReport> {
    let inconclusive = |msg: String| Error::InconclusiveCharacter(msg);
    let mut ratios = Vec::with_capacity(8);
    for z in character_probes() {
        let gz = DiskPoint::new(g.apply(z.value()))
            .map_err(|_| inconclusive(format!("g maps probe {z} onto the boundary")))?;
        let bz = b.eval(z)?;
        let bgz = b.eval(gz).map_err(|e| inconclusive(format!("image of probe {z}: {e}")))?;
        for v in [bz, bgz] {
            if let Some(err) = v.error_bound {
                if !(v.value.norm() > 10.0 * err) {
                    return Err(inconclusive(format!(
                        "probe value {:e} within ten error bounds ({err:e}) of zero",
                        v.value.norm()
                    )));
                }
            }
        }
        if bz.value.norm() == 0.0 {
            return Err(inconclusive(format!("probe {z} is a zero of B")));
        }
        ratios.push(bgz.value / bz.value);
    }
    let m = Complex64::new(
        median(ratios.iter().map(|r| r.re).collect()),
        median(ratios.iter().map(|r| r.im).collect()),
    );
    let consistency_residual = ratios.iter().map(|r| (r - m).norm()).fold(0.0, f64::max);
    if !(consistency_residual <= tol) {
        return Err(inconclusive(format!(
            "ratios disagree by {consistency_residual:e} (tolerance {tol:e})"
        )));
    }
    if !((m.norm() - 1.0).abs() <= tol) {
        return Err(inconclusive(format!("ratio modulus {} is not 1", m.norm())));
    }
    Ok(CharacterReport { values: vec![m / m.norm()], consistency_residual })
}

/// Characters of every generator; the residual is the worst of them.
pub fn character_report(b: &BlaschkeProduct, generators: &[DiskAutomorphism], tol: f64) -> Result<CharacterReport> {
    let mut values = Vec::with_capacity(generators.len());
    let mut residual: f64 = 0.0;
    for g in generators {
        let r = character_of(b, g, tol)?;
        values.extend(r.values);
        residual = residual.max(r.consistency_residual);
    }
    Ok(CharacterReport { values, consistency_residual: residual })
}
