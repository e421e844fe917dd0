//! Pick matrices, feasibility verdicts, Pick norms and Cesàro averages.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{check_distinct, szego, KernelSpec, DUPLICATE_TOL};
use crate::linalg::{psd_check, CMatrix, HermitianMatrix, PsdReport};
use crate::mobius::{pseudo_hyperbolic, DiskAutomorphism, DiskPoint};
use crate::orbit::{enumerate_orbit, GroupKind, GroupPresentation, OrbitOptions, Word};

/// Orbit points with `1 − |p|` below this are left out of orbit-Pick
/// matrices; closer to the circle `1 − |p|²` has lost too many digits to
/// carry the normalization.
pub const ORBIT_PICK_HORIZON: f64 = 1e-8;

/// Default PSD tolerance for the normalized orbit-Pick matrix.
pub const ORBIT_PICK_TOL: f64 = 1e-9;

/// Width at which [`pick_norm`] stops bisecting.
pub const PICK_NORM_WIDTH: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Targets {
    Scalar(Vec<Complex64>),
    /// Square `k×k` targets, one per node.
    Matrix(Vec<CMatrix>),
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::Scalar(v) => v.len(),
            Targets::Matrix(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Block size `k` (1 for scalar targets).
    pub fn block(&self) -> usize {
        match self {
            Targets::Scalar(_) => 1,
            Targets::Matrix(v) => v.first().map_or(1, CMatrix::n),
        }
    }

    /// Target `i` as a `k×k` matrix.
    fn matrix(&self, i: usize) -> CMatrix {
        match self {
            Targets::Scalar(v) => CMatrix::from_fn(1, |_, _| v[i]),
            Targets::Matrix(v) => v[i].clone(),
        }
    }

    fn max_abs_diff(&self, i: usize, j: usize) -> f64 {
        self.matrix(i).max_diff(&self.matrix(j))
    }

    pub fn scale(&self, c: Complex64) -> Targets {
        match self {
            Targets::Scalar(v) => Targets::Scalar(v.iter().map(|w| w * c).collect()),
            Targets::Matrix(v) => Targets::Matrix(
                v.iter().map(|m| CMatrix::from_fn(m.n(), |i, j| m[(i, j)] * c)).collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickProblem {
    nodes: Vec<DiskPoint>,
    targets: Targets,
    kernel: KernelSpec,
}

impl PickProblem {
    pub fn new(nodes: Vec<DiskPoint>, targets: Targets, kernel: KernelSpec) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidInput("at least one node is required".into()));
        }
        if nodes.len() != targets.len() {
            return Err(Error::InvalidInput(format!(
                "{} nodes but {} targets",
                nodes.len(),
                targets.len()
            )));
        }
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        match &targets {
            Targets::Scalar(v) => {
                if !v.iter().all(finite) {
                    return Err(Error::InvalidInput("targets must be finite".into()));
                }
            }
            Targets::Matrix(v) => {
                let k = targets.block();
                if k == 0 || v.iter().any(|m| m.n() != k) {
                    return Err(Error::InvalidInput("matrix targets must share one nonzero size".into()));
                }
                if !v.iter().all(|m| m.rows().iter().flatten().all(finite)) {
                    return Err(Error::InvalidInput("targets must be finite".into()));
                }
            }
        }
        Ok(Self { nodes, targets, kernel })
    }

    pub fn scalar(nodes: Vec<DiskPoint>, targets: Vec<Complex64>, kernel: KernelSpec) -> Result<Self> {
        Self::new(nodes, Targets::Scalar(targets), kernel)
    }

    pub fn nodes(&self) -> &[DiskPoint] {
        &self.nodes
    }

    pub fn targets(&self) -> &Targets {
        &self.targets
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn with_targets(&self, targets: Targets) -> Result<Self> {
        Self::new(self.nodes.clone(), targets, self.kernel.clone())
    }
}

/// Builds `[(c²I − W_iW_j^*)·k_ij]` from kernel values `k_ij` (upper triangle
/// used), for nodes indexed through `node_of`.
fn assemble_blocks(
    targets: &Targets,
    node_of: &[usize],
    c2: f64,
    kernel: impl Fn(usize, usize) -> Complex64,
) -> Result<HermitianMatrix> {
    let k = targets.block();
    let mats: Vec<CMatrix> = (0..targets.len()).map(|i| targets.matrix(i)).collect();
    let rows = node_of.len();
    let mut m = CMatrix::zeros(rows * k);
    for a in 0..rows {
        for b in a..rows {
            let kv = kernel(a, b);
            let (wi, wj) = (&mats[node_of[a]], &mats[node_of[b]]);
            for r in 0..k {
                for s in 0..k {
                    let mut ww = Complex64::new(0.0, 0.0);
                    for t in 0..k {
                        ww += wi[(r, t)] * wj[(s, t)].conj();
                    }
                    let id = if r == s { c2 } else { 0.0 };
                    let v = (id - ww) * kv;
                    m[(a * k + r, b * k + s)] = v;
                    m[(b * k + s, a * k + r)] = v.conj();
                }
            }
        }
    }
    HermitianMatrix::new(m)
}

fn check_aliasing(p: &PickProblem, symbols: &[Complex64]) -> Result<()> {
    if let KernelSpec::ComposedInner { .. } = p.kernel {
        for i in 0..symbols.len() {
            for j in i + 1..symbols.len() {
                if pseudo_hyperbolic(symbols[i], symbols[j]) <= DUPLICATE_TOL
                    && p.targets.max_abs_diff(i, j) > DUPLICATE_TOL
                {
                    return Err(Error::AliasedNodes { i, j });
                }
            }
        }
    }
    Ok(())
}

fn assemble_scaled(p: &PickProblem, c2: f64) -> Result<HermitianMatrix> {
    if let KernelSpec::OrbitGram { .. } = p.kernel {
        return Err(Error::UnsupportedVariant("orbit"));
    }
    check_distinct(&p.nodes)?;
    let symbols = p.nodes.iter().map(|z| p.kernel.symbol(z.value())).collect::<Result<Vec<_>>>()?;
    check_aliasing(p, &symbols)?;
    let node_of: Vec<usize> = (0..p.nodes.len()).collect();
    assemble_blocks(&p.targets, &node_of, c2, |i, j| szego(symbols[i], symbols[j]))
}

/// `[(1 − w_i w̄_j)K(z_i, z_j)]`, or `[(I − W_iW_j^*)K(z_i, z_j)]` in blocks.
pub fn assemble_pick(p: &PickProblem) -> Result<HermitianMatrix> {
    assemble_scaled(p, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitPick {
    /// `(node, word)` for each row block.
    pub index: Vec<(usize, Word)>,
    /// `[(I − W_iW_j^*)K^S(γ(z_i), η(z_j))]`.
    pub raw: HermitianMatrix,
    /// `raw` scaled by `√(1 − |γ(z_i)|²)` on both sides.
    pub normalized: HermitianMatrix,
    pub depth: usize,
    pub complete_depth: usize,
}

/// Truncated orbit-Pick matrix over the orbits of all nodes.
///
/// The Szegő kernel grows like `1/(1 − |p|²)` along an orbit, so the raw
/// matrix has entries spanning many orders of magnitude. The normalized
/// matrix is congruent to it by a positive diagonal, has the same inertia and
/// diagonal entries at most one, and is the one used for verdicts.
pub fn assemble_orbit_pick(
    p: &PickProblem,
    group: &GroupPresentation,
    depth: usize,
    horizon: f64,
) -> Result<OrbitPick> {
    check_distinct(&p.nodes)?;
    let opts = OrbitOptions::new(depth).with_horizon(horizon);
    let mut index = Vec::new();
    let mut node_of = Vec::new();
    let mut points = Vec::new();
    let mut complete_depth = depth;
    for (i, &z) in p.nodes.iter().enumerate() {
        let orbit = enumerate_orbit(group, z, opts)?;
        complete_depth = complete_depth.min(orbit.complete_depth);
        for e in orbit.entries {
            index.push((i, e.word));
            node_of.push(i);
            points.push(e.point.value());
        }
    }
    let raw = assemble_blocks(&p.targets, &node_of, 1.0, |a, b| szego(points[a], points[b]))?;
    // Scaled entries are formed directly rather than by multiplying `raw`,
    // since √(1−|p|²)√(1−|q|²)/(1−q̄p) is well conditioned where the kernel
    // itself is not.
    let normalized = assemble_blocks(&p.targets, &node_of, 1.0, |a, b| {
        let (pa, pb) = (points[a], points[b]);
        (1.0 - pa.norm_sqr()).sqrt() * (1.0 - pb.norm_sqr()).sqrt() / (1.0 - pb.conj() * pa)
    })?;
    Ok(OrbitPick { index, raw, normalized, depth, complete_depth })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub psd: PsdReport,
    pub matrix: HermitianMatrix,
    pub pick_norm: Option<f64>,
}

pub fn feasibility(p: &PickProblem, tol: Option<f64>) -> Result<FeasibilityReport> {
    let matrix = assemble_pick(p)?;
    let psd = psd_check(&matrix, tol)?;
    Ok(FeasibilityReport { psd, matrix, pick_norm: None })
}

/// Verdict from the normalized orbit-Pick matrix; `tol` defaults to
/// [`ORBIT_PICK_TOL`].
pub fn orbit_feasibility(
    p: &PickProblem,
    group: &GroupPresentation,
    depth: usize,
    tol: Option<f64>,
) -> Result<(OrbitPick, PsdReport)> {
    let op = assemble_orbit_pick(p, group, depth, ORBIT_PICK_HORIZON)?;
    let report = psd_check(&op.normalized, Some(tol.unwrap_or(ORBIT_PICK_TOL)))?;
    Ok((op, report))
}

fn max_target_norm(t: &Targets) -> f64 {
    match t {
        Targets::Scalar(v) => v.iter().map(|w| w.norm()).fold(0.0, f64::max),
        // Spectral norm is bounded by the Frobenius norm; use the latter as a
        // bracket and the largest entry as a lower bound.
        Targets::Matrix(v) => v
            .iter()
            .map(|m| m.rows().iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max),
    }
}

/// Least `c ≥ 0` with `[(c²I − W_iW_j^*)K(z_i, z_j)] ⪰ 0`, by bisection.
pub fn pick_norm(p: &PickProblem) -> Result<f64> {
    let top = max_target_norm(&p.targets);
    if top == 0.0 {
        return Ok(0.0);
    }
    let n = p.nodes.len() as f64;
    let feasible = |c: f64| -> Result<bool> {
        let m = assemble_scaled(p, c * c)?;
        let tol = 1e-13 * (1.0 + m.max_diagonal());
        Ok(psd_check(&m, Some(tol))?.is_psd)
    };
    let lo_start = match &p.targets {
        Targets::Scalar(_) => top,
        Targets::Matrix(v) => v.iter().flat_map(|m| m.rows().into_iter().flatten()).map(|z| z.norm()).fold(0.0, f64::max),
    };
    if feasible(lo_start)? {
        return Ok(lo_start);
    }
    let mut lo = lo_start;
    let mut hi = top * n.max(1.0);
    let mut doublings = 0;
    while !feasible(hi)? {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::NumericalBreakdown("pick norm bracket did not close".into()));
        }
    }
    while hi - lo > PICK_NORM_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `(1/(2K+1))·Σ_{|k|≤K} (γ^(k)(z))^n` for the cyclic group `γ(z) = (z − a)/(1 − az)`.
pub fn amenable_average(group: &GroupPresentation, z: DiskPoint, power: u32, k_max: u64) -> Result<Complex64> {
    let a = match group.kind() {
        GroupKind::Cyclic { a } if a > 0.0 && a < 1.0 => a,
        _ => return Err(Error::InvalidGroup("averaging needs a cyclic group with 0 < a < 1".into())),
    };
    if k_max > i64::MAX as u64 / 2 {
        return Err(Error::InvalidInput("averaging window too large".into()));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for k in -(k_max as i64)..=k_max as i64 {
        sum += DiskAutomorphism::iterate_cyclic(a, k)?.apply(z.value()).powu(power);
    }
    Ok(sum / (2 * k_max + 1) as f64)
}
