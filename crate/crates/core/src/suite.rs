//! Seeded random instances and the built-in verification suite.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::error::Result;
use crate::kernel::{boundary_gram_quadrature, check_distinct, dominance_check, KernelSpec};
use crate::linalg::{brute_force_psd_3x3, min_eig, psd_check, CMatrix, HermitianMatrix};
use crate::mobius::{cyclic_center_complement, probe_grid, DiskAutomorphism, DiskPoint};
use crate::orbit::{enumerate_orbit, GroupPresentation, OrbitOptions};
use crate::pick::{amenable_average, assemble_pick, orbit_feasibility, pick_norm, PickProblem};
use crate::schur::{interpolate_composed, GRID_RADIUS};

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const GAMMA2_DEPTH: usize = 200;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the disk of radius `r`.
pub fn random_disk_point<R: Rng>(rng: &mut R, r: f64) -> DiskPoint {
    let rad = r * rng.gen::<f64>().sqrt();
    let t = rng.gen_range(0.0..2.0 * PI);
    DiskPoint::new(Complex64::from_polar(rad, t)).expect("radius below one")
}

/// `μ·Π (|q|/q)(q − ζ)/(1 − q̄ζ)`: a finite Blaschke product with a
/// unimodular constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskInner {
    pub mu: Complex64,
    pub product: BlaschkeProduct,
}

impl DiskInner {
    pub fn random<R: Rng>(rng: &mut R, max_degree: usize) -> Self {
        let degree = rng.gen_range(1..=max_degree);
        let zeros = (0..degree).map(|_| random_disk_point(rng, 0.9)).collect();
        let mu = Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
        Self { mu, product: BlaschkeProduct::new(0, zeros) }
    }

    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        self.mu * self.product.value_at(zeta)
    }
}

/// The orbit product `B` of the origin under `Z₂ ∗ Z₂`; `B²` is the
/// associated product of the group.
pub fn gamma2_product(a: f64, depth: usize) -> Result<BlaschkeProduct> {
    let g = GroupPresentation::z2z2(a)?;
    let o = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(depth))?;
    BlaschkeProduct::from_orbit(&o, 1, true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gamma2Instance {
    pub a: f64,
    pub nodes: Vec<DiskPoint>,
    pub inner: DiskInner,
    pub scale: f64,
    pub targets: Vec<Complex64>,
}

impl Gamma2Instance {
    /// Targets `s·g(B(z_j)²)` with a random inner `g` of degree at most 3.
    /// `scale` is drawn from `[lo, hi]`.
    pub fn random<R: Rng>(rng: &mut R, b: &BlaschkeProduct, a: f64, scale: (f64, f64)) -> Self {
        loop {
            let n = rng.gen_range(2..=4);
            let nodes: Vec<DiskPoint> = (0..n).map(|_| random_disk_point(rng, 0.9)).collect();
            if check_distinct(&nodes).is_err() {
                continue;
            }
            let inner = DiskInner::random(rng, 3);
            let s = if scale.0 == scale.1 { scale.0 } else { rng.gen_range(scale.0..scale.1) };
            let targets = nodes.iter().map(|z| s * inner.eval(b.value_at(z.value()).powu(2))).collect();
            return Self { a, nodes, inner, scale: s, targets };
        }
    }

    pub fn problem(&self, b: &BlaschkeProduct) -> Result<PickProblem> {
        PickProblem::scalar(self.nodes.clone(), self.targets.clone(), KernelSpec::composed(b.clone(), 2)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }
}

fn grid50() -> Vec<Complex64> {
    [0.1, 0.3, 0.5, 0.7, 0.9]
        .iter()
        .flat_map(|&r| (0..10).map(move |k| Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.25) / 10.0)))
        .collect()
}

pub fn check_closed_form_iteration() -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for a in [0.3, 0.5, 0.7] {
        let g = DiskAutomorphism::hyperbolic(a)?;
        for (step, sign) in [(g, 1i64), (g.inverse(), -1)] {
            let mut power = DiskAutomorphism::identity();
            for n in 1..=30 {
                power = step.compose(&power);
                let closed = DiskAutomorphism::iterate_cyclic(a, sign * n)?;
                for z in grid50() {
                    worst = worst.max((closed.apply(z) - power.apply(z)).norm());
                }
            }
        }
    }
    Ok(CheckOutcome::new("closed-form iteration", worst <= 1e-10, format!("max deviation {worst:.3e}")))
}

pub fn check_geometric_bound() -> Result<CheckOutcome> {
    let mut min_slack = f64::INFINITY;
    let mut worst_mismatch: f64 = 0.0;
    for a in [0.3f64, 0.5, 0.7] {
        let q = (1.0 - a) / (1.0 + a);
        for n in 0..=200 {
            let qn = q.powi(n);
            let complement = 2.0 * qn / (1.0 + qn);
            min_slack = min_slack.min(2.0 * qn - complement);
            let lib = cyclic_center_complement(a, n as u64);
            worst_mismatch = worst_mismatch.max((lib - complement).abs() / complement);
        }
    }
    Ok(CheckOutcome::new(
        "geometric Blaschke bound",
        min_slack >= 0.0 && worst_mismatch <= 1e-12,
        format!("min slack {min_slack:.3e}, closed-form mismatch {worst_mismatch:.3e}"),
    ))
}

pub fn character_probe_points() -> Vec<Complex64> {
    (0..20).map(|k| Complex64::from_polar(0.6 * (k as f64 + 1.0) / 20.0, 2.399_963 * k as f64 + 0.3)).collect()
}

pub fn check_character_identity() -> Result<CheckOutcome> {
    let g = GroupPresentation::cyclic(0.5)?;
    let o = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(GAMMA2_DEPTH))?;
    let b = BlaschkeProduct::from_orbit(&o, 1, true)?;
    let gamma = DiskAutomorphism::hyperbolic(0.5)?;
    let (mut shift, mut odd): (f64, f64) = (0.0, 0.0);
    for z in character_probe_points() {
        shift = shift.max((b.value_at(gamma.apply(z)) + b.value_at(z)).norm());
        odd = odd.max((b.value_at(-z) + b.value_at(z)).norm());
    }
    Ok(CheckOutcome::new(
        "character identity",
        shift <= 1e-6 && odd <= 1e-12,
        format!("max |B(γz)+B(z)| {shift:.3e}, max |B(−z)+B(z)| {odd:.3e}"),
    ))
}

pub fn check_orthonormal_basis() -> Result<CheckOutcome> {
    let g = GroupPresentation::cyclic(0.5)?;
    let o = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(50))?;
    let b = BlaschkeProduct::from_orbit(&o, 1, true)?;
    let gram = boundary_gram_quadrature(&b, 5, 8192)?;
    let dev = gram.entries.matrix().max_diff(&CMatrix::identity(6));
    Ok(CheckOutcome::new("orthonormal basis", dev <= 1e-6, format!("‖G − I‖_max {dev:.3e}")))
}

pub fn check_two_point_norm() -> Result<CheckOutcome> {
    let nodes = vec![DiskPoint::origin(), DiskPoint::real(0.5)?];
    let p = PickProblem::scalar(nodes, vec![Complex64::new(0.0, 0.0), Complex64::new(0.9, 0.0)], KernelSpec::Szego)?;
    let c = pick_norm(&p)?;
    Ok(CheckOutcome::new("two-point extremal norm", (c - 1.8).abs() <= 1e-8, format!("pick norm {c:.12}")))
}

pub fn check_gamma2_round_trip(seed: u64, count: usize, grid: usize) -> Result<CheckOutcome> {
    let mut r = rng(seed);
    let (mut worst_eig, mut worst_res, mut worst_norm) = (f64::INFINITY, 0.0f64, 0.0f64);
    let mut failures = 0;
    for _ in 0..count {
        let a = r.gen_range(0.4..0.7);
        let b = gamma2_product(a, GAMMA2_DEPTH)?;
        let inst = Gamma2Instance::random(&mut r, &b, a, (1.0, 1.0));
        let m = min_eig(&assemble_pick(&inst.problem(&b)?)?)?;
        worst_eig = worst_eig.min(m);
        match interpolate_composed(&inst.nodes, &inst.targets, &b, 2) {
            Ok(f) => {
                let res = inst
                    .nodes
                    .iter()
                    .zip(&inst.targets)
                    .map(|(z, w)| (f.evaluate(z.value()) - w).norm())
                    .fold(0.0, f64::max);
                worst_res = worst_res.max(res);
                worst_norm = worst_norm.max(f.grid_sup_norm(grid, GRID_RADIUS));
            }
            Err(_) => failures += 1,
        }
    }
    let passed = failures == 0 && worst_eig >= -1e-9 && worst_res <= 1e-8 && worst_norm <= 1.0 + 1e-8;
    Ok(CheckOutcome::new(
        "round-trip interpolation",
        passed,
        format!(
            "{count} instances, {failures} construction failures, min eig {worst_eig:.3e}, residual {worst_res:.3e}, grid norm {worst_norm:.12}"
        ),
    ))
}

/// Composed-kernel verdict versus the truncated orbit-Pick verdict.
pub fn check_condition_equivalence(seed: u64, count: usize) -> Result<CheckOutcome> {
    let mut r = rng(seed ^ 0x5eed);
    let (mut agree, mut seen, mut feasible) = (0, 0, 0);
    while seen < count {
        let a = r.gen_range(0.4..0.7);
        let b = gamma2_product(a, GAMMA2_DEPTH)?;
        let inst = Gamma2Instance::random(&mut r, &b, a, (0.5, 1.5));
        let p = inst.problem(&b)?;
        let composed = min_eig(&assemble_pick(&p)?)?;
        if composed.abs() < 1e-6 {
            continue;
        }
        seen += 1;
        let group = GroupPresentation::z2z2(a)?;
        let (_, orbit) = orbit_feasibility(&p, &group, GAMMA2_DEPTH, None)?;
        feasible += usize::from(composed > 0.0);
        agree += usize::from((composed > 0.0) == orbit.is_psd);
    }
    Ok(CheckOutcome::new(
        "condition equivalence",
        agree == count,
        format!("{agree}/{count} verdicts agree ({feasible} feasible)"),
    ))
}

pub fn check_kernel_dominance(seed: u64) -> Result<CheckOutcome> {
    let mut r = rng(seed ^ 0xd0);
    let g = GroupPresentation::z2z2(0.5)?;
    let o = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(GAMMA2_DEPTH))?;
    let b = BlaschkeProduct::from_orbit(&o, 1, true)?;
    let b2 = BlaschkeProduct::from_orbit(&o, 2, true)?;
    let k = KernelSpec::composed(b, 2)?;
    let (mut worst, mut zero_fails) = (0.0f64, 0);
    for _ in 0..10 {
        let pts: Vec<DiskPoint> = loop {
            let n = r.gen_range(2..=5);
            let pts: Vec<DiskPoint> = (0..n).map(|_| random_disk_point(&mut r, 0.9)).collect();
            if check_distinct(&pts).is_ok() {
                break pts;
            }
        };
        let (d, _) = dominance_check(&k, &b2, 1.0, &pts, None)?;
        worst = worst.max(d.matrix().max_abs());
        let (_, r0) = dominance_check(&k, &b2, 0.0, &pts, None)?;
        zero_fails += usize::from(!r0.is_psd);
    }
    Ok(CheckOutcome::new(
        "kernel dominance",
        worst <= 1e-10 && zero_fails == 10,
        format!("C=1 max entry {worst:.3e}; C=0 rejected {zero_fails}/10"),
    ))
}

pub fn check_amenable_average() -> Result<CheckOutcome> {
    let g = GroupPresentation::cyclic(0.5)?;
    let z = DiskPoint::real(0.3)?;
    let odd = amenable_average(&g, z, 1, 10_000)?.norm();
    let even = (amenable_average(&g, z, 2, 10_000)? - 1.0).norm();
    Ok(CheckOutcome::new(
        "amenable averaging",
        odd <= 0.01 && even <= 0.01,
        format!("|avg z| {odd:.3e}, |avg z² − 1| {even:.3e}"),
    ))
}

/// `BB^* − sI` with random complex `B` and shift `s`, which lands on both
/// sides of the PSD cone in comparable proportions.
pub fn random_hermitian3<R: Rng>(rng: &mut R) -> HermitianMatrix {
    let b = CMatrix::from_fn(3, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let shift = rng.gen_range(0.0..0.5);
    let m = CMatrix::from_fn(3, |i, j| {
        let bb: Complex64 = (0..3).map(|k| b[(i, k)] * b[(j, k)].conj()).sum();
        if i == j {
            bb - shift
        } else {
            bb
        }
    });
    HermitianMatrix::new(m).expect("constructed Hermitian")
}

pub fn check_psd_oracle(seed: u64) -> Result<CheckOutcome> {
    let mut r = rng(seed ^ 0x3);
    let (mut agree, mut n, mut psd) = (0, 0, 0);
    while n < 1000 {
        let h = random_hermitian3(&mut r);
        if min_eig(&h)?.abs() < 1e-8 {
            continue;
        }
        n += 1;
        let verdict = psd_check(&h, None)?.is_psd;
        psd += usize::from(verdict);
        agree += usize::from(verdict == brute_force_psd_3x3(&h)?);
    }
    Ok(CheckOutcome::new("PSD oracle agreement", agree == n, format!("{agree}/{n} agree ({psd} PSD)")))
}

/// Group-law sanity on the probe grid.
pub fn check_group_laws() -> Result<CheckOutcome> {
    let f = DiskAutomorphism::new(DiskPoint::from_re_im(0.3, -0.4)?, Complex64::from_polar(1.0, 0.7))?;
    let g = DiskAutomorphism::new(DiskPoint::from_re_im(-0.6, 0.1)?, Complex64::from_polar(1.0, -2.0))?;
    let h = DiskAutomorphism::hyperbolic(0.45)?;
    let assoc = f.compose(&g).compose(&h).probe_distance(&f.compose(&g.compose(&h)));
    let inv = f.compose(&f.inverse()).probe_distance(&DiskAutomorphism::identity());
    let eval = probe_grid()
        .into_iter()
        .map(|z| (f.compose(&g).apply(z.value()) - f.apply(g.apply(z.value()))).norm())
        .fold(0.0, f64::max);
    let worst = assoc.max(inv).max(eval);
    Ok(CheckOutcome::new("automorphism group laws", worst <= 1e-12, format!("max deviation {worst:.3e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub instances: usize,
    pub grid: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, instances: 100, grid: 4096 }
    }
}

pub fn run_suite(opts: SuiteOptions) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        check_group_laws()?,
        check_closed_form_iteration()?,
        check_geometric_bound()?,
        check_character_identity()?,
        check_orthonormal_basis()?,
        check_two_point_norm()?,
        check_gamma2_round_trip(opts.seed, opts.instances, opts.grid)?,
        check_condition_equivalence(opts.seed, opts.instances)?,
        check_kernel_dominance(opts.seed)?,
        check_amenable_average()?,
        check_psd_oracle(opts.seed)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_reproducible() {
        let b = gamma2_product(0.5, 50).unwrap();
        let x = Gamma2Instance::random(&mut rng(1), &b, 0.5, (0.5, 1.5));
        let y = Gamma2Instance::random(&mut rng(1), &b, 0.5, (0.5, 1.5));
        assert_eq!(x, y);
        assert!(x.nodes.len() >= 2 && x.nodes.len() <= 4);
    }

    #[test]
    fn cheap_checks_pass() {
        for c in [
            check_group_laws().unwrap(),
            check_geometric_bound().unwrap(),
            check_two_point_norm().unwrap(),
            check_amenable_average().unwrap(),
            check_psd_oracle(3).unwrap(),
        ] {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn small_instance_runs_pass() {
        for c in [check_gamma2_round_trip(5, 5, 512).unwrap(), check_condition_equivalence(5, 3).unwrap()] {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
