//! Disk interpolants by the Schur–Nevanlinna recursion, and their
//! compositions with inner functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};
use crate::kernel::{DUPLICATE_TOL, KernelSpec};
use crate::linalg::psd_check;
use crate::mobius::{pseudo_hyperbolic, DiskPoint};
use crate::pick::{assemble_pick, PickProblem};

/// A parameter this close to the circle ends the recursion.
pub const DEGENERATE_TOL: f64 = 1e-10;
/// Largest interpolation residual accepted from a constructed interpolant.
pub const RESIDUAL_TOL: f64 = 1e-8;
pub const GRID_RADIUS: f64 = 0.999;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurInterpolant {
    nodes: Vec<DiskPoint>,
    schur_parameters: Vec<Complex64>,
    /// Set when the recursion stopped at a unimodular parameter; the
    /// interpolant is then a Blaschke product of this degree.
    degenerate_rank: Option<usize>,
}

fn blaschke_factor(zk: Complex64, z: Complex64) -> Complex64 {
    (z - zk) / (1.0 - zk.conj() * z)
}

impl SchurInterpolant {
    pub fn nodes(&self) -> &[DiskPoint] {
        &self.nodes
    }

    pub fn schur_parameters(&self) -> &[Complex64] {
        &self.schur_parameters
    }

    pub fn degenerate_rank(&self) -> Option<usize> {
        self.degenerate_rank
    }

    /// `f = (ρ_k + b_k f_{k+1})/(1 + ρ̄_k b_k f_{k+1})`, unwound from the last
    /// parameter with the free tail set to 0.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let params = &self.schur_parameters;
        let mut f = Complex64::new(0.0, 0.0);
        let mut rest = params.len();
        if self.degenerate_rank.is_some() {
            rest -= 1;
            f = params[rest];
        }
        for k in (0..rest).rev() {
            let rho = params[k];
            let bf = blaschke_factor(self.nodes[k].value(), z) * f;
            f = (rho + bf) / (1.0 + rho.conj() * bf);
        }
        f
    }

    /// `max |f(r·e^{2πik/n})|` over `n` points.
    pub fn grid_sup_norm(&self, n: usize, r: f64) -> f64 {
        grid_sup(|z| self.evaluate(z), n, r)
    }
}

fn grid_sup(f: impl Fn(Complex64) -> Complex64, n: usize, r: f64) -> f64 {
    (0..n)
        .map(|k| f(Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64)).norm())
        .fold(0.0, f64::max)
}

/// Solves `f(z_j) = w_j` with `‖f‖_∞ ≤ 1` on the disk.
///
/// Fails with `Infeasible` when the Szegő Pick matrix is not PSD at the
/// default tolerance.
pub fn interpolate_disk(nodes: &[DiskPoint], targets: &[Complex64]) -> Result<SchurInterpolant> {
    let problem = PickProblem::scalar(nodes.to_vec(), targets.to_vec(), KernelSpec::Szego)?;
    let report = psd_check(&assemble_pick(&problem)?, None)?;
    if !report.is_psd {
        return Err(Error::Infeasible { min_eigenvalue: report.min_eigenvalue });
    }

    let mut w = targets.to_vec();
    let mut schur_parameters = Vec::with_capacity(nodes.len());
    let mut degenerate_rank = None;
    for k in 0..nodes.len() {
        let rho = w[k];
        if rho.norm() >= 1.0 - DEGENERATE_TOL {
            schur_parameters.push(rho / rho.norm());
            degenerate_rank = Some(k);
            break;
        }
        schur_parameters.push(rho);
        let zk = nodes[k].value();
        for j in k + 1..nodes.len() {
            let moved = (w[j] - rho) / (1.0 - rho.conj() * w[j]);
            w[j] = moved / blaschke_factor(zk, nodes[j].value());
        }
    }
    let s = SchurInterpolant { nodes: nodes.to_vec(), schur_parameters, degenerate_rank };

    let residual = nodes
        .iter()
        .zip(targets)
        .map(|(z, w)| (s.evaluate(z.value()) - w).norm())
        .fold(0.0, f64::max);
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::NumericalBreakdown(format!("interpolation residual {residual:e}")));
    }
    Ok(s)
}

/// `F = g ∘ φ^m` with `g` a disk interpolant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposedInterpolant {
    pub inner: BlaschkeProduct,
    pub power: u32,
    pub disk: SchurInterpolant,
    /// Index into the merged disk nodes for each original node.
    pub node_map: Vec<usize>,
}

impl ComposedInterpolant {
    pub fn symbol(&self, z: Complex64) -> Complex64 {
        self.inner.value_at(z).powu(self.power)
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.disk.evaluate(self.symbol(z))
    }

    pub fn grid_sup_norm(&self, n: usize, r: f64) -> f64 {
        grid_sup(|z| self.evaluate(z), n, r)
    }
}

/// Interpolates on `H^∞` of the inner function `φ = inner^power`.
///
/// Nodes with the same image `ζ = φ(z)` are merged when their targets agree
/// and rejected with `AliasedNodes` otherwise.
pub fn interpolate_composed(
    nodes: &[DiskPoint],
    targets: &[Complex64],
    inner: &BlaschkeProduct,
    power: u32,
) -> Result<ComposedInterpolant> {
    if nodes.len() != targets.len() || nodes.is_empty() {
        return Err(Error::InvalidInput("need equally many nodes and targets, at least one".into()));
    }
    KernelSpec::composed(inner.clone(), power)?;
    let mut zeta: Vec<DiskPoint> = Vec::new();
    let mut first: Vec<usize> = Vec::new();
    let mut merged_targets: Vec<Complex64> = Vec::new();
    let mut node_map = Vec::with_capacity(nodes.len());
    for (j, (z, &w)) in nodes.iter().zip(targets).enumerate() {
        let image = inner.value_at(z.value()).powu(power);
        match zeta.iter().position(|q| pseudo_hyperbolic(q.value(), image) <= DUPLICATE_TOL) {
            Some(m) => {
                if (merged_targets[m] - w).norm() > DUPLICATE_TOL {
                    return Err(Error::AliasedNodes { i: first[m], j });
                }
                node_map.push(m);
            }
            None => {
                zeta.push(DiskPoint::new(image)?);
                first.push(j);
                merged_targets.push(w);
                node_map.push(zeta.len() - 1);
            }
        }
    }
    let disk = interpolate_disk(&zeta, &merged_targets)?;
    let f = ComposedInterpolant { inner: inner.clone(), power, disk, node_map };
    let residual = nodes
        .iter()
        .zip(targets)
        .map(|(z, w)| (f.evaluate(z.value()) - w).norm())
        .fold(0.0, f64::max);
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::NumericalBreakdown(format!("interpolation residual {residual:e}")));
    }
    Ok(f)
}
