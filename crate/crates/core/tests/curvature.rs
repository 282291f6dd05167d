use thurston4::connection::{
    christoffel_fd, christoffel_from_frame, riemann_fd, riemann_fd_in_frame, riemann_frame,
    sectional, FdOptions,
};
use thurston4::metric::{MetricField, ScaledMetric};
use thurston4::sampling::{random_point, random_spec, rng};
use thurston4::spaces::{GeometryKind, GeometrySpec, Point, TangentVector};
use thurston4::Vec4;

fn unit(i: usize) -> Vec4 {
    let mut v = Vec4::zeros();
    v[i] = 1.0;
    v
}

#[test]
fn fd_and_koszul_agree() {
    let mut r = rng(301);
    for kind in GeometryKind::ALL {
        let spec = random_spec(kind, &mut r);
        let frame = riemann_frame(&spec);
        for _ in 0..10 {
            let p = random_point(kind, &mut r);
            let fd = riemann_fd_in_frame(&spec, &p, &FdOptions::default()).unwrap();
            let diff = fd.max_abs_diff(&frame);
            assert!(diff < 1e-6, "{kind} at {p:?}: {diff}");
        }
    }
}

#[test]
fn exact_christoffels_match_fd() {
    let mut r = rng(302);
    for kind in GeometryKind::ALL {
        let spec = random_spec(kind, &mut r);
        for _ in 0..10 {
            let p = random_point(kind, &mut r);
            let exact = christoffel_from_frame(&spec, &p).unwrap();
            let fd = christoffel_fd(&spec, &p, &FdOptions::default()).unwrap();
            let scale = exact
                .gamma
                .iter()
                .flatten()
                .flatten()
                .fold(1.0_f64, |a, b| a.max(b.abs()));
            assert!(exact.max_abs_diff(&fd) < 1e-7 * scale, "{kind}");
            assert!(exact.symmetry_residual() < 1e-12 * scale);
        }
    }
}

#[test]
fn symmetries_and_bianchi() {
    let mut r = rng(303);
    for kind in GeometryKind::ALL {
        let spec = random_spec(kind, &mut r);
        let t = riemann_frame(&spec);
        assert!(t.symmetry_residual() < 1e-8, "{kind}");
        assert!(t.bianchi_residual() < 1e-8, "{kind}");
        let conn = spec.frame_connection();
        assert!(conn.compatibility_residual() < 1e-12, "{kind}");
        assert!(conn.torsion_residual() < 1e-12, "{kind}");
    }
}

#[test]
fn invariants_are_point_independent() {
    let mut r = rng(304);
    for kind in GeometryKind::ALL {
        let spec = random_spec(kind, &mut r);
        let reference = riemann_frame(&spec);
        let (s0, ric0, riem0) = (
            reference.scalar(),
            reference.ricci_norm(),
            reference.riemann_norm(),
        );
        for _ in 0..10 {
            let p = random_point(kind, &mut r);
            let t = thurston4::connection::riemann_frame_at(&spec, &p).unwrap();
            let scale = riem0.max(1.0);
            assert!((t.scalar() - s0).abs() < 1e-8 * scale, "{kind}");
            assert!((t.ricci_norm() - ric0).abs() < 1e-8 * scale, "{kind}");
            assert!((t.riemann_norm() - riem0).abs() < 1e-8 * scale, "{kind}");
        }
    }
}

#[test]
fn sol40_golden_values() {
    let spec = GeometrySpec::sol40();
    let frame = riemann_frame(&spec);
    assert!((frame.scalar() + 6.0).abs() < 1e-12);
    let p = Point::new(0.0, 0.0, 0.0, 0.0);
    let at = |u: Vec4| TangentVector::new(p, u);
    assert!((sectional(&spec, &at(unit(0)), &at(unit(3))).unwrap() + 4.0).abs() < 1e-12);
    assert!((sectional(&spec, &at(unit(1)), &at(unit(3))).unwrap() - 2.0).abs() < 1e-12);
    let fd = riemann_fd(
        &spec,
        &Point::new(0.3, -1.0, 0.5, 0.2),
        &FdOptions::default(),
    )
    .unwrap();
    assert!((fd.scalar() + 6.0).abs() < 1e-6);
}

#[test]
fn homothety_scales_curvature() {
    let mut r = rng(305);
    for kind in GeometryKind::ALL {
        let spec = random_spec(kind, &mut r);
        let p = random_point(kind, &mut r);
        let base = riemann_fd(&spec, &p, &FdOptions::default()).unwrap();
        let scaled_metric = ScaledMetric {
            inner: &spec,
            factor: 4.0,
        };
        assert!(scaled_metric.metric(&p).is_ok());
        let scaled = riemann_fd(&scaled_metric, &p, &FdOptions::default()).unwrap();
        // g ↦ 4g leaves R^l_ijk fixed, multiplies R_ijkl by 4 and divides K by 4
        let k = base.sectional(&unit(0), &unit(1)).unwrap();
        let k4 = scaled.sectional(&unit(0), &unit(1)).unwrap();
        assert!(
            (k4 - k / 4.0).abs() < 1e-8 * k.abs().max(1.0),
            "{kind}: {k} {k4}"
        );
        assert!(
            (scaled.scalar() - base.scalar() / 4.0).abs() < 1e-8 * base.scalar().abs().max(1.0)
        );
    }
}
