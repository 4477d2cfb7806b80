use std::f64::consts::{PI, SQRT_2};

use dspin::catalog::{build_curve, default_curve, CurveId, CurveParams};
use dspin::{Error, Vector3};

#[test]
fn arclength_examples() {
    let c1 = default_curve::<f64>(CurveId::HelixConst).unwrap();
    assert!((c1.length() - 2.0 * PI * SQRT_2).abs() < 1e-10);

    let line = default_curve::<f64>(CurveId::StraightLine).unwrap();
    assert!((line.length() - 1.0).abs() < 1e-14);
    assert!((line.s_of_t(0.37).unwrap() - 0.37).abs() < 1e-14);

    let viv = default_curve::<f64>(CurveId::VivianiOnCylinder).unwrap();
    assert!((viv.speed(0.0).unwrap() - SQRT_2).abs() < 1e-12);
    let viv_s = default_curve::<f64>(CurveId::VivianiOnSphere).unwrap();
    assert!((viv_s.speed(0.0).unwrap() - SQRT_2).abs() < 1e-12);
    assert!((viv.length() - viv_s.length()).abs() < 1e-9);
}

#[test]
fn arclength_inverse_roundtrip() {
    let c = default_curve::<f64>(CurveId::HelixExp).unwrap();
    for &t in &[0.1, 1.3, 4.0, 6.2] {
        let s = c.s_of_t(t).unwrap();
        assert!((c.t_of_s(s).unwrap() - t).abs() < 1e-9);
    }
}

#[test]
fn helix_frenet_example() {
    let c1 = default_curve::<f64>(CurveId::HelixConst).unwrap();
    let f = c1.frenet_sample(1.0).unwrap();
    assert!((f.kappa - 0.5).abs() < 1e-10);
    assert!((f.tau - 0.5).abs() < 1e-10);
    // Frenet normal points at the axis.
    let p = c1.darboux_sample(1.0).unwrap().position;
    let radial = Vector3::new(p.x, p.y, 0.0).normalize();
    assert!((f.frame.n + radial).norm() < 1e-9);
}

#[test]
fn straight_line_has_no_frenet_frame() {
    let line = default_curve::<f64>(CurveId::StraightLine).unwrap();
    assert!(matches!(line.frenet_sample(0.5), Err(Error::VanishingCurvature { .. })));
    let d = line.darboux_sample(0.5).unwrap();
    assert_eq!((d.kappa_g, d.kappa_n, d.tau_g), (0.0, 0.0, 0.0));
}

#[test]
fn darboux_examples() {
    let c1 = default_curve::<f64>(CurveId::HelixConst).unwrap();
    let d = c1.darboux_sample(2.0).unwrap();
    assert!(d.kappa_g.abs() < 1e-10);
    assert!((d.kappa_n.abs() - 0.5).abs() < 1e-10);
    assert!((d.tau_g.abs() - 0.5).abs() < 1e-10);

    let lat = default_curve::<f64>(CurveId::LatitudeCircle).unwrap();
    let alpha = PI / 3.0;
    let d = lat.darboux_sample(0.4).unwrap();
    assert!((d.kappa_g.abs() - alpha.cos() / (2.0 * alpha.sin())).abs() < 1e-10);
    assert!((d.kappa_n.abs() - 0.5).abs() < 1e-10);
    assert!(d.tau_g.abs() < 1e-10);

    let circ = default_curve::<f64>(CurveId::PlanarCircle).unwrap();
    let d = circ.darboux_sample(1.0).unwrap();
    assert!((d.kappa_g.abs() - 1.0).abs() < 1e-10 && d.kappa_n.abs() < 1e-12 && d.tau_g.abs() < 1e-12);
}

#[test]
fn frames_are_orthonormal_with_b_equal_t_cross_n() {
    for id in CurveId::ALL {
        let c = default_curve::<f64>(id).unwrap();
        for d in c.darboux_samples(33).unwrap() {
            assert!(d.frame.orthonormality_defect() < 1e-10, "{id:?}");
            assert!((d.frame.t.cross(d.frame.n) - d.frame.b).norm() < 1e-10);
        }
    }
}

#[test]
fn curvature_splits_into_geodesic_and_normal_parts() {
    for id in [CurveId::HelixConst, CurveId::HelixExp, CurveId::HelixLog, CurveId::VivianiOnCylinder, CurveId::VivianiOnSphere, CurveId::LatitudeCircle] {
        let c = default_curve::<f64>(id).unwrap();
        for d in c.darboux_samples(17).unwrap().iter().skip(1) {
            let k = c.frenet_sample(d.s).unwrap().kappa;
            assert!((d.kappa_squared() - k * k).abs() < 1e-8, "{id:?} at {}", d.s);
        }
    }
}

/// Darboux equations checked against centered differences of the frame.
#[test]
fn darboux_equations_hold_by_finite_differences() {
    for id in [CurveId::HelixExp, CurveId::VivianiOnCylinder, CurveId::VivianiOnSphere, CurveId::LatitudeCircle] {
        let c = default_curve::<f64>(id).unwrap();
        let h = 1e-5;
        for &s in &[0.7, 2.1, 3.9] {
            let d = c.darboux_sample(s).unwrap();
            let (a, b) = (c.darboux_sample(s - h).unwrap().frame, c.darboux_sample(s + h).unwrap().frame);
            let dt = (b.t - a.t) / (2.0 * h);
            let dn = (b.n - a.n) / (2.0 * h);
            let db = (b.b - a.b) / (2.0 * h);
            let f = d.frame;
            let rt = dt - (f.b * d.kappa_g + f.n * d.kappa_n);
            let rn = dn - (f.t * -d.kappa_n + f.b * -d.tau_g);
            let rb = db - (f.t * -d.kappa_g + f.n * d.tau_g);
            for r in [rt, rn, rb] {
                assert!(r.norm() < 1e-6, "{id:?} s = {s}: {}", r.norm());
            }
        }
    }
}

#[test]
fn sphere_curves_have_constant_normal_curvature_and_no_geodesic_torsion() {
    let p = CurveParams { rho: 0.8, ..CurveParams::default() };
    let viv = build_curve::<f64>(CurveId::VivianiOnSphere, &p).unwrap();
    for d in viv.darboux_samples(41).unwrap() {
        assert!((d.kappa_n.abs() - 1.0 / 1.6).abs() < 1e-9);
        assert!(d.tau_g.abs() < 1e-9);
    }
}

#[test]
fn invariants_do_not_depend_on_parameterization_speed() {
    // Same helix traversed over a shifted parameter window: values at equal arclength agree.
    let a = build_curve::<f64>(CurveId::HelixConst, &CurveParams { range: Some((0.0, 4.0)), ..CurveParams::default() }).unwrap();
    let b = build_curve::<f64>(CurveId::HelixConst, &CurveParams { range: Some((1.0, 4.0)), ..CurveParams::default() }).unwrap();
    let sa = a.s_of_t(2.5).unwrap();
    let sb = b.s_of_t(2.5).unwrap();
    let (da, db) = (a.darboux_sample(sa).unwrap(), b.darboux_sample(sb).unwrap());
    assert!((da.position - db.position).norm() < 1e-10);
    assert!((da.kappa_n - db.kappa_n).abs() < 1e-10 && (da.tau_g - db.tau_g).abs() < 1e-10);
}
