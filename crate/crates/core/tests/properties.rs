use fuchsian_pick::blaschke::BlaschkeProduct;
use fuchsian_pick::kernel::{gram, kernel_eval, orbit_block, KernelSpec};
use fuchsian_pick::linalg::{default_tolerance, min_eig};
use fuchsian_pick::mobius::{cyclic_center, pseudo_hyperbolic, DiskAutomorphism, DiskPoint};
use fuchsian_pick::orbit::{enumerate_orbit, GroupPresentation, OrbitOptions};
use fuchsian_pick::pick::{assemble_pick, pick_norm, PickProblem};
use fuchsian_pick::Complex64;
use proptest::prelude::*;

fn disk(r_max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r_max, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn automorphism() -> impl Strategy<Value = DiskAutomorphism> {
    (disk(0.9), 0.0..std::f64::consts::TAU)
        .prop_map(|(a, t)| DiskAutomorphism::new(DiskPoint::new(a).unwrap(), Complex64::from_polar(1.0, t)).unwrap())
}

fn group() -> impl Strategy<Value = GroupPresentation> {
    (0.3..0.7f64, any::<bool>()).prop_map(|(a, z2)| {
        if z2 {
            GroupPresentation::z2z2(a).unwrap()
        } else {
            GroupPresentation::cyclic(a).unwrap()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_is_associative(f in automorphism(), g in automorphism(), h in automorphism()) {
        let left = f.compose(&g).compose(&h);
        let right = f.compose(&g.compose(&h));
        prop_assert!(left.probe_distance(&right) <= 1e-12);
        prop_assert!(f.compose(&f.inverse()).is_identity(1e-12));
        prop_assert!(f.inverse().compose(&f).is_identity(1e-12));
    }

    #[test]
    fn derivative_matches_finite_differences(f in automorphism(), z in disk(0.8)) {
        let h = 1e-6;
        let fd = (f.apply(z + h) - f.apply(z - h)) / (2.0 * h);
        let d = f.derivative(z);
        prop_assert!((fd - d).norm() <= 1e-6 * d.norm());
    }

    #[test]
    fn cyclic_centers_increase(a in 0.05..0.95f64, n in 1i64..60) {
        let (x, y) = (cyclic_center(a, n), cyclic_center(a, n + 1));
        prop_assert!(x < y || y == 1.0 || 1.0 - x < 1e-15);
        prop_assert!(y <= 1.0);
    }

    #[test]
    fn orbits_are_deterministic_and_closed(g in group(), base in disk(0.5), depth in 0usize..6) {
        let base = DiskPoint::new(base).unwrap();
        let opts = OrbitOptions::new(depth);
        let o = enumerate_orbit(&g, base, opts).unwrap();
        prop_assert_eq!(&o, &enumerate_orbit(&g, base, opts).unwrap());
        let pts: Vec<Complex64> = o.points().map(|p| p.value()).collect();
        for e in o.entries.iter().filter(|e| e.level < depth) {
            for gen in g.generators() {
                for m in [*gen, gen.inverse()] {
                    let img = m.apply(e.point.value());
                    prop_assert!(pts.iter().any(|&q| pseudo_hyperbolic(img, q) <= 1e-10));
                }
            }
        }
        prop_assert!(o.entries.iter().all(|e| e.weight > 0.0 && e.weight <= 1.0));
    }

    #[test]
    fn partial_sums_grow_within_tail_bound(g in group(), depth in 0usize..12) {
        let o = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(depth)).unwrap();
        let deeper = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(depth + 8)).unwrap();
        prop_assert!(deeper.partial_sum >= o.partial_sum);
        prop_assert!(deeper.partial_sum <= o.partial_sum + o.tail_bound.unwrap() + 1e-12);
    }

    #[test]
    fn blaschke_products_are_contractive(zeros in prop::collection::vec(disk(0.95), 0..6), m in 0usize..3, z in disk(0.999)) {
        let b = BlaschkeProduct::new(m, zeros.into_iter().map(|q| DiskPoint::new(q).unwrap()).collect());
        prop_assert!(b.value_at(z).norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn truncation_error_bound_holds(depth in 2usize..12, z in disk(0.6)) {
        let g = GroupPresentation::cyclic(0.5).unwrap();
        let short = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(depth)).unwrap();
        let long = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(depth + 20)).unwrap();
        let bn = BlaschkeProduct::from_orbit(&short, 1, true).unwrap();
        let bm = BlaschkeProduct::from_orbit(&long, 1, true).unwrap();
        let zp = DiskPoint::new(z).unwrap();
        let v = bn.eval(zp).unwrap();
        prop_assert!((v.value - bm.value_at(z)).norm() <= v.error_bound.unwrap());
    }

    #[test]
    fn gram_matrices_are_hermitian_psd(pts in prop::collection::vec(disk(0.9), 1..6), power in 1u32..3) {
        let pts: Vec<DiskPoint> = pts.into_iter().map(|z| DiskPoint::new(z).unwrap()).collect();
        let inner = BlaschkeProduct::new(1, vec![DiskPoint::real(0.5).unwrap()]);
        for k in [KernelSpec::Szego, KernelSpec::composed(inner, power).unwrap()] {
            let Ok(g) = gram(&k, &pts) else { continue };
            let m = g.entries.matrix();
            prop_assert!(m.hermitian_defect() <= 1e-12);
            prop_assert!(min_eig(&g.entries).unwrap() >= -1e-10 * (1.0 + g.entries.max_diagonal()));
        }
    }

    #[test]
    fn composed_kernel_is_szego_of_symbol(z in disk(0.9), w in disk(0.9), power in 1u32..4) {
        let inner = BlaschkeProduct::new(1, vec![DiskPoint::real(-0.3).unwrap()]);
        let k = KernelSpec::composed(inner, power).unwrap();
        let (zp, wp) = (DiskPoint::new(z).unwrap(), DiskPoint::new(w).unwrap());
        let direct = kernel_eval(&KernelSpec::Szego, DiskPoint::new(k.symbol(z).unwrap()).unwrap(), DiskPoint::new(k.symbol(w).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(kernel_eval(&k, zp, wp).unwrap(), direct);
    }

    #[test]
    fn orbit_blocks_nest(g in group(), z in disk(0.5), w in disk(0.5), depth in 0usize..5) {
        let (z, w) = (DiskPoint::new(z).unwrap(), DiskPoint::new(w).unwrap());
        let small = orbit_block(&g, OrbitOptions::new(depth), z, w).unwrap();
        let big = orbit_block(&g, OrbitOptions::new(depth + 1), z, w).unwrap();
        prop_assert_eq!(&big.row_words[..small.row_words.len()], &small.row_words[..]);
        for (r, row) in small.entries.iter().enumerate() {
            prop_assert_eq!(&big.entries[r][..row.len()], &row[..]);
        }
    }

    #[test]
    fn pick_matrix_scales_with_targets(
        nodes in prop::collection::vec(disk(0.9), 2..5),
        s in 0.1..3.0f64,
    ) {
        let nodes: Vec<DiskPoint> = nodes.into_iter().map(|z| DiskPoint::new(z).unwrap()).collect();
        let targets: Vec<Complex64> = nodes.iter().map(|z| z.value() * 0.7).collect();
        let Ok(p) = PickProblem::scalar(nodes.clone(), targets.clone(), KernelSpec::Szego) else { return Ok(()) };
        let m = assemble_pick(&p).unwrap();
        // With f(z) = 0.7z the data is always feasible.
        prop_assert!(min_eig(&m).unwrap() >= -default_tolerance(&m));
        let scaled = PickProblem::scalar(nodes, targets.iter().map(|w| w * s).collect(), KernelSpec::Szego).unwrap();
        let (n1, ns) = (pick_norm(&p).unwrap(), pick_norm(&scaled).unwrap());
        prop_assert!((ns - s * n1).abs() <= 1e-8 * (1.0 + s));
    }
}
