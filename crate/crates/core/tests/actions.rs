use proptest::prelude::*;
use thurston4::complex::{
    compatibility_residual, d_omega_residual, enumerate_candidates, kahler_scan,
};
use thurston4::isometry::{
    invariance_report, jacobian_fd_residual, left_translation, order_residual,
    stabilizer_generators, IsometryKind, SOL40_ROTATION_ANGLES,
};
use thurston4::sampling::{random_group_element, random_point, random_spec, rng};
use thurston4::spaces::{GeometryKind, GeometrySpec, Point};
use thurston4::Execution;

#[test]
fn every_geometry_is_invariant() {
    let mut r = rng(501);
    for kind in GeometryKind::ALL {
        for _ in 0..3 {
            let spec = random_spec(kind, &mut r);
            let report = invariance_report(&spec, 40, 17).unwrap();
            assert!(report.passes(1e-9), "{kind}: {report:?}");
        }
    }
}

#[test]
fn jacobians_match_fd_at_random_points() {
    let mut r = rng(502);
    for kind in GeometryKind::ALL {
        let spec = random_spec(kind, &mut r);
        for _ in 0..10 {
            let p = random_point(kind, &mut r);
            let mut maps = stabilizer_generators(&spec, &SOL40_ROTATION_ANGLES);
            maps.push(left_translation(&spec, &random_group_element(kind, &mut r)).unwrap());
            for phi in maps {
                let res = jacobian_fd_residual(&phi, &p, 1e-3).unwrap();
                let scale = phi.jacobian(&p).unwrap().amax().max(1.0);
                assert!(res < 1e-7 * scale, "{kind} {}: {res}", phi.label());
            }
        }
    }
}

#[test]
fn sol41_dihedral_relations() {
    let spec = GeometrySpec::sol41(0.7, 2.3).unwrap();
    let gens = stabilizer_generators(&spec, &[]);
    let s = gens
        .iter()
        .find(|g| g.kind() == IsometryKind::Sol41S)
        .unwrap();
    let rr = gens
        .iter()
        .find(|g| g.kind() == IsometryKind::Sol41R)
        .unwrap();
    let mut r = rng(503);
    for _ in 0..20 {
        let p = random_point(GeometryKind::Sol41, &mut r);
        assert!(order_residual(rr, 4, &p).unwrap() < 1e-12 * p.to_vec().amax().max(1.0));
        assert_eq!(order_residual(s, 2, &p).unwrap(), 0.0);
        // s r s = r⁻¹, so (s r)² = id
        let mut q = p;
        for _ in 0..2 {
            q = s.apply(&rr.apply(&q).unwrap()).unwrap();
        }
        assert!(q.chart_distance(&p) < 1e-12 * p.to_vec().amax().max(1.0));
    }
}

#[test]
fn translations_compose() {
    let mut r = rng(504);
    for kind in GeometryKind::ALL {
        let spec = random_spec(kind, &mut r);
        let g = random_group_element(kind, &mut r);
        let h = random_group_element(kind, &mut r);
        let p = random_point(kind, &mut r);
        let lg = left_translation(&spec, &g).unwrap();
        let lh = left_translation(&spec, &h).unwrap();
        let lgh = left_translation(&spec, &spec.multiply(&g, &h).unwrap()).unwrap();
        let a = lg.apply(&lh.apply(&p).unwrap()).unwrap();
        let b = lgh.apply(&p).unwrap();
        assert!(
            a.chart_distance(&b) < 1e-10 * a.to_vec().amax().max(1.0),
            "{kind}"
        );
        let ja = lg.jacobian(&lh.apply(&p).unwrap()).unwrap() * lh.jacobian(&p).unwrap();
        assert!((ja - lgh.jacobian(&p).unwrap()).amax() < 1e-10 * ja.amax().max(1.0));
    }
}

#[test]
fn kahler_scan_shape() {
    let sol40 = kahler_scan(&GeometrySpec::sol40(), 30, 3, Execution::default()).unwrap();
    assert_eq!(sol40.candidates.len(), 12);
    let best = sol40.best_at(1).unwrap();
    assert!(best.rescaled < 1e-8);
    assert!(best.unscaled > 1e-2);

    let mn = kahler_scan(
        &GeometrySpec::sol4mn(5.0, 6.0).unwrap(),
        30,
        3,
        Execution::default(),
    )
    .unwrap();
    assert!(mn.best_residual > 1e-3, "{}", mn.best_residual);
}

#[test]
fn candidates_are_compatible_everywhere() {
    let mut r = rng(505);
    for kind in GeometryKind::ALL {
        let spec = random_spec(kind, &mut r);
        let pts: Vec<Point> = (0..20).map(|_| random_point(kind, &mut r)).collect();
        for c in enumerate_candidates() {
            assert!(
                compatibility_residual(&spec, &c.j, &pts).unwrap() < 1e-12,
                "{kind}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sol40_winning_structure_closes_everywhere(
        t in -2.0f64..2.0, x in -2.0f64..2.0, y in -2.0f64..2.0, z in -2.0f64..2.0
    ) {
        let spec = GeometrySpec::sol40();
        let j = enumerate_candidates()
            .into_iter()
            .find(|c| c.label == "e1->+e4,e2->+e3")
            .unwrap()
            .j;
        let r = d_omega_residual(&spec, &j, 1.0, &[Point::new(t, x, y, z)]).unwrap();
        prop_assert!(r < 1e-8);
    }
}
