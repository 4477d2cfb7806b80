use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use dspin::catalog::{default_curve, CurveId};
use dspin::su2::su2_exp_vec;
use dspin::transport::{direction_independence_check, precession_residual, Direction, InitialState};
use dspin::{
    adiabatic_propagator, evolve_spin_texture, ode_propagator_oracle, path_ordered_propagator, su2_exp, wilson_loop, Curve,
    FieldCoupling, FieldOptions, Operator, Spinor, Vector3,
};
use proptest::prelude::*;

fn none() -> FieldOptions<f64> {
    FieldOptions::none()
}

#[test]
fn su2_exp_examples() {
    let u = su2_exp(Vector3::e_z(), PI).unwrap();
    assert!(u.m[0][0].re.abs() < 1e-15 && (u.m[0][0].im - 1.0).abs() < 1e-15);
    assert!(u.m[1][1].re.abs() < 1e-15 && (u.m[1][1].im + 1.0).abs() < 1e-15);
    assert!(u.trace().norm() < 1e-15);
    assert_eq!(su2_exp(Vector3::e_y(), 0.0).unwrap(), Operator::identity());
    assert!(su2_exp(Vector3::e_x(), 2.0 * PI).unwrap().distance(&Operator::identity().neg()) < 1e-15);
}

#[test]
fn wilson_loop_examples() {
    assert!((wilson_loop(&su2_exp(Vector3::e_x(), 0.0).unwrap()).re - 2.0).abs() < 1e-15);
    assert!((wilson_loop(&su2_exp(Vector3::e_x(), 2.0 * PI).unwrap()).re + 2.0).abs() < 1e-15);
    let c1 = default_curve::<f64>(CurveId::HelixConst).unwrap();
    let (u, _) = adiabatic_propagator(&c1, 0.0, SQRT_2 * PI, 256).unwrap();
    assert!(wilson_loop(&u).norm() < 1e-12);
}

#[test]
fn c1_product_is_a_single_exponential() {
    let c1 = default_curve::<f64>(CurveId::HelixConst).unwrap();
    for (s1, s2) in [(0.0, 4.0), (6.0, 1.0)] {
        let expect = su2_exp(-Vector3::e_z(), FRAC_1_SQRT_2 * (s2 - s1)).unwrap();
        for n in [1, 10, 333] {
            assert!(path_ordered_propagator(&c1, s1, s2, n, &none()).unwrap().distance(&expect) < 1e-10);
        }
    }
    assert_eq!(path_ordered_propagator(&c1, 2.0, 2.0, 10, &none()).unwrap(), Operator::identity());
}

#[test]
fn midpoint_product_converges_at_second_order() {
    let c = default_curve::<f64>(CurveId::VivianiOnCylinder).unwrap();
    let l = c.length();
    let reference = path_ordered_propagator(&c, 0.0, l, 64_000, &none()).unwrap();
    let err = |n| path_ordered_propagator(&c, 0.0, l, n, &none()).unwrap().distance(&reference);
    let (e1, e2) = (err(500), err(1000));
    let order = (e1 / e2).log2();
    assert!((order - 2.0).abs() < 0.2, "order {order}");
}

#[test]
fn product_matches_ode_oracle_on_viviani_loops() {
    for id in [CurveId::VivianiOnCylinder, CurveId::VivianiOnSphere] {
        let c = default_curve::<f64>(id).unwrap();
        let l = c.length();
        let p = path_ordered_propagator(&c, 0.0, l, 100_000, &none()).unwrap();
        let o = ode_propagator_oracle(&c, 0.0, l, 1e-12, &none()).unwrap();
        assert!(p.distance(&o) < 1e-6, "{id:?}: {}", p.distance(&o));
    }
}

#[test]
fn oracle_of_zero_field_is_identity() {
    let line = default_curve::<f64>(CurveId::StraightLine).unwrap();
    assert!(ode_propagator_oracle(&line, 0.2, 0.9, 1e-10, &none()).unwrap().distance(&Operator::identity()) < 1e-14);
}

#[test]
fn adiabatic_c1_half_turn() {
    let c1 = default_curve::<f64>(CurveId::HelixConst).unwrap();
    let (u, sum) = adiabatic_propagator(&c1, 0.0, SQRT_2 * PI, 512).unwrap();
    assert!((sum.phi_total - PI).abs() < 1e-12);
    assert!((sum.phi_s + PI / SQRT_2).abs() < 1e-12 && (sum.phi_q - PI / SQRT_2).abs() < 1e-12);
    assert!((sum.h - Vector3::new(-FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2)).norm() < 1e-12);
    assert!((u.trace().re - 2.0 * (sum.phi_total / 2.0).cos()).abs() < 1e-12);

    let frame0 = c1.darboux_sample(0.0).unwrap().frame;
    let axis = sum.lab_axis(&frame0);
    assert!((axis + Vector3::e_z()).norm() < 1e-12);
    // The lab propagator commutes with rotations about the adiabatic axis.
    let lab = path_ordered_propagator(&c1, 0.0, SQRT_2 * PI, 100, &none()).unwrap();
    let r = su2_exp(axis, 0.83).unwrap();
    assert!((lab * r).distance(&(r * lab)) < 1e-8);
    assert!(lab.distance(&su2_exp(axis, sum.phi_total).unwrap()) < 1e-10);
}

#[test]
fn adiabatic_trace_identity_on_catalog() {
    for id in CurveId::ALL {
        let c = default_curve::<f64>(id).unwrap();
        let (u, sum) = adiabatic_propagator(&c, 0.0, c.length(), 256).unwrap();
        assert!((wilson_loop(&u).re - 2.0 * (sum.phi_total / 2.0).cos()).abs() < 1e-12, "{id:?}");
        assert!(wilson_loop(&u).im.abs() < 1e-12);
    }
}

#[test]
fn latitude_geodesic_rotation() {
    for alpha in [PI / 6.0, PI / 3.0, PI / 2.0] {
        let p = dspin::CurveParams { r: 1.0, alpha, ..Default::default() };
        let c = dspin::build_curve::<f64>(CurveId::LatitudeCircle, &p).unwrap();
        let (_, sum) = adiabatic_propagator(&c, 0.0, c.length(), 256).unwrap();
        assert!((sum.phi_n.abs() - 2.0 * PI * alpha.cos()).abs() < 1e-9, "alpha {alpha}");
    }
}

#[test]
fn c1_texture_examples() {
    let c1 = default_curve::<f64>(CurveId::HelixConst).unwrap();
    let tex = evolve_spin_texture(&c1, InitialState::FrameAxis(1), 512, 4, Direction::Forward, &none()).unwrap();
    assert_eq!(tex.records.len(), 513);
    let k = tex.records.iter().position(|r| (r.s - SQRT_2 * PI).abs() < 1e-9).unwrap();
    assert!((tex.records[k].m_lab - Vector3::new(-1.0, 0.0, 0.0)).norm() < 1e-9);
    for r in &tex.records {
        // Constant Darboux components for C1.
        assert!((r.m_darboux - tex.records[0].m_darboux).norm() < 1e-8);
        assert!((r.m_darboux - r.frame.project(r.m_lab)).norm() < 1e-12);
    }
    let res = precession_residual(&tex).unwrap();
    assert!(res.r1 < 1e-6 && res.r2 > 1e-2, "{res:?}");

    let still = evolve_spin_texture(&c1, InitialState::Bloch(-Vector3::e_z()), 128, 1, Direction::Forward, &none()).unwrap();
    assert!(still.records.iter().all(|r| (r.m_lab + Vector3::e_z()).norm() < 1e-12));
}

#[test]
fn viviani_sphere_precession_law() {
    let c = default_curve::<f64>(CurveId::VivianiOnSphere).unwrap();
    let tex = evolve_spin_texture(&c, InitialState::FrameAxis(1), 4096, 4, Direction::Forward, &none()).unwrap();
    let res = precession_residual(&tex).unwrap();
    assert!(res.r1 < 1e-5, "{res:?}");
    assert!(res.r2.is_finite());
}

#[test]
fn viviani_direction_independence() {
    for id in [CurveId::VivianiOnCylinder, CurveId::VivianiOnSphere] {
        let c = default_curve::<f64>(id).unwrap();
        let rep = direction_independence_check(&c, Vector3::e_x(), 2000, 8, &none()).unwrap();
        assert!(rep.max_deviation < 1e-6 && rep.closure() < 1e-6, "{id:?}: {rep:?}");
        let extra = FieldOptions::with_extra(Vector3::new(0.0, 0.0, 5.0), FieldCoupling::Connection);
        let rep = direction_independence_check(&c, Vector3::e_x(), 2000, 8, &extra).unwrap();
        assert!(rep.max_deviation > 1e-2 && rep.closure() > 1e-2, "{id:?}: {rep:?}");
    }
}

fn viviani() -> Curve {
    default_curve::<f64>(CurveId::VivianiOnSphere).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exponentials_are_special_unitary(x in -3.0..3.0f64, y in -3.0..3.0f64, z in -3.0..3.0f64) {
        let u = su2_exp_vec(Vector3::new(x, y, z));
        prop_assert!(u.unitarity_defect() < 1e-12);
        prop_assert!((u.det().re - 1.0).abs() < 1e-12 && u.det().im.abs() < 1e-12);
    }

    #[test]
    fn products_stay_special_unitary(a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let c = viviani();
        let l = c.length();
        let u = path_ordered_propagator(&c, a * l, b * l, 10_000, &none()).unwrap();
        prop_assert!(u.unitarity_defect() < 1e-9);
        prop_assert!((u.det() - num_complex::Complex::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn composition(a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64) {
        let curve = viviani();
        let l = curve.length();
        let (s1, s2, s3) = (a * l, b * l, c * l);
        let direct = ode_propagator_oracle(&curve, s1, s3, 1e-12, &none()).unwrap();
        let split = ode_propagator_oracle(&curve, s2, s3, 1e-12, &none()).unwrap() * ode_propagator_oracle(&curve, s1, s2, 1e-12, &none()).unwrap();
        prop_assert!(direct.distance(&split) < 1e-9, "{}", direct.distance(&split));
    }

    #[test]
    fn composition_of_aligned_products(a in 0.0..0.5f64, k in 1usize..300, j in 1usize..300) {
        let curve = viviani();
        let h = curve.length() / 2048.0;
        let (s1, s2, s3) = (a, a + k as f64 * h, a + (k + j) as f64 * h);
        let direct = path_ordered_propagator(&curve, s1, s3, k + j, &none()).unwrap();
        let split = path_ordered_propagator(&curve, s2, s3, j, &none()).unwrap() * path_ordered_propagator(&curve, s1, s2, k, &none()).unwrap();
        prop_assert!(direct.distance(&split) < 1e-9);
    }

    #[test]
    fn reversal(a in 0.0..1.0f64, b in 0.0..1.0f64, n in 1usize..400) {
        let c = viviani();
        let l = c.length();
        let fwd = path_ordered_propagator(&c, a * l, b * l, n, &none()).unwrap();
        let back = path_ordered_propagator(&c, b * l, a * l, n, &none()).unwrap();
        prop_assert!(back.distance(&fwd.adjoint()) < 1e-9);
    }

    #[test]
    fn c1_propagators_commute_with_z_rotations(a in 0.0..8.8f64, b in 0.0..8.8f64, n in 1usize..200, angle in -7.0..7.0f64) {
        let c1 = default_curve::<f64>(CurveId::HelixConst).unwrap();
        let u = path_ordered_propagator(&c1, a, b, n, &none()).unwrap();
        let r = su2_exp(Vector3::e_z(), angle).unwrap();
        prop_assert!((u * r).distance(&(r * u)) < 1e-9);
    }

    #[test]
    fn bloch_norm_is_preserved(theta in 0.0..PI, phi in -PI..PI) {
        let m0 = Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
        let tex = evolve_spin_texture(&viviani(), InitialState::Bloch(m0), 256, 2, Direction::Forward, &none()).unwrap();
        for r in &tex.records {
            prop_assert!((r.m_lab.norm() - 1.0).abs() < 1e-9);
        }
        let s = Spinor::from_bloch(m0).unwrap();
        prop_assert!((s.norm_squared() - 1.0).abs() < 1e-12);
        prop_assert!((s.bloch() - m0).norm() < 1e-12);
    }
}
