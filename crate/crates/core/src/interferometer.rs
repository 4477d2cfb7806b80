//! Two-arm ring interferometer on a closed curve.
//!
//! A spinor injected at `φ_in` splits into a counter-clockwise arm (increasing
//! arclength) and a clockwise arm, which recombine at `φ_out`. With
//! `T = (U_ccw e^{iχ_ccw} + U_cw e^{iχ_cw}) / 2` the conductance is `G = Tr(T†T)`
//! in units of `e²/h`.

use rayon::prelude::*;

use crate::curve::CurveOnSurface;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::su2::{SU2Operator, C};
use crate::transport::{ode_propagator_oracle, path_ordered_propagator, FieldOptions};

pub const DEFAULT_ARM_STEPS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerSpec<T> {
    /// Injection point, in curve-parameter units.
    pub phi_in: T,
    /// Product segments per arm.
    pub n_steps: usize,
    pub include_dynamical_phase: bool,
    /// Wavenumber used for the dynamical phase `k ℓ` of an arm of length `ℓ`.
    pub k: T,
    pub field: FieldOptions<T>,
}

impl<T: Real> InterferometerSpec<T> {
    pub fn new(phi_in: T) -> Self {
        Self { phi_in, n_steps: DEFAULT_ARM_STEPS, include_dynamical_phase: false, k: T::one(), field: FieldOptions::none() }
    }
}

/// Arclength endpoints of both arms for detection at `phi_out`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arms<T> {
    pub s_in: T,
    /// Detector position in `(s_in, s_in + L]`.
    pub s_out: T,
    pub ccw_length: T,
    pub cw_length: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmission<T> {
    pub phi_out: T,
    pub arms: Arms<T>,
    pub u_ccw: SU2Operator<T>,
    pub u_cw: SU2Operator<T>,
    pub t: [[C<T>; 2]; 2],
    pub conductance: T,
}

/// Arm geometry; `phi_out` is reduced so the detector lies in `(s_in, s_in + L]`.
pub fn arms<T: Real>(curve: &CurveOnSurface<T>, phi_in: T, phi_out: T) -> Result<Arms<T>> {
    if !curve.closed {
        return Err(Error::NotClosed);
    }
    let l = curve.length();
    let s_in = curve.s_of_t(reduce_param(curve, phi_in))?;
    let mut s_out = curve.s_of_t(reduce_param(curve, phi_out))?;
    while s_out <= s_in {
        s_out = s_out + l;
    }
    while s_out > s_in + l {
        s_out = s_out - l;
    }
    Ok(Arms { s_in, s_out, ccw_length: s_out - s_in, cw_length: s_in + l - s_out })
}

fn reduce_param<T: Real>(curve: &CurveOnSurface<T>, phi: T) -> T {
    let period = curve.t1 - curve.t0;
    let r = phi - curve.t0 - ((phi - curve.t0) / period).floor() * period;
    curve.t0 + r
}

/// `T = (U_ccw e^{iχ_ccw} + U_cw e^{iχ_cw}) / 2` and `G = Tr(T†T)`.
pub fn combine_arms<T: Real>(u_ccw: &SU2Operator<T>, u_cw: &SU2Operator<T>, chi_ccw: T, chi_cw: T) -> ([[C<T>; 2]; 2], T) {
    let (p_ccw, p_cw) = (C::from_polar(T::one(), chi_ccw), C::from_polar(T::one(), chi_cw));
    let mut t = [[C::new(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            t[i][j] = (u_ccw.m[i][j] * p_ccw + u_cw.m[i][j] * p_cw) / T::two();
        }
    }
    let g = t.iter().flatten().map(|x| x.norm_sqr()).fold(T::zero(), |a, b| a + b);
    (t, g)
}

/// `1 + Re tr(U_cw† U_ccw) / 2`, equal to `G` when dynamical phases are off.
pub fn loop_conductance<T: Real>(u_ccw: &SU2Operator<T>, u_cw: &SU2Operator<T>) -> T {
    T::one() + (u_cw.adjoint() * *u_ccw).trace().re / T::two()
}

fn combine<T: Real>(spec: &InterferometerSpec<T>, a: &Arms<T>, u_ccw: SU2Operator<T>, u_cw: SU2Operator<T>, phi_out: T) -> Transmission<T> {
    let (chi_ccw, chi_cw) =
        if spec.include_dynamical_phase { (spec.k * a.ccw_length, spec.k * a.cw_length) } else { (T::zero(), T::zero()) };
    let (t, conductance) = combine_arms(&u_ccw, &u_cw, chi_ccw, chi_cw);
    Transmission { phi_out, arms: *a, u_ccw, u_cw, t, conductance }
}

/// Transmission with both arms from the midpoint product.
pub fn transmission_matrix<T: Real>(curve: &CurveOnSurface<T>, spec: &InterferometerSpec<T>, phi_out: T) -> Result<Transmission<T>> {
    let a = arms(curve, spec.phi_in, phi_out)?;
    let l = curve.length();
    let u_ccw = path_ordered_propagator(curve, a.s_in, a.s_out, spec.n_steps, &spec.field)?;
    let u_cw = path_ordered_propagator(curve, a.s_in + l, a.s_out, spec.n_steps, &spec.field)?;
    Ok(combine(spec, &a, u_ccw, u_cw, phi_out))
}

/// Transmission with both arms from the adaptive ODE oracle.
pub fn transmission_matrix_ode<T: Real>(curve: &CurveOnSurface<T>, spec: &InterferometerSpec<T>, phi_out: T, tol: T) -> Result<Transmission<T>> {
    let a = arms(curve, spec.phi_in, phi_out)?;
    let l = curve.length();
    let u_ccw = ode_propagator_oracle(curve, a.s_in, a.s_out, tol, &spec.field)?;
    let u_cw = ode_propagator_oracle(curve, a.s_in + l, a.s_out, tol, &spec.field)?;
    Ok(combine(spec, &a, u_ccw, u_cw, phi_out))
}

/// `G(φ_out)` over the given detector positions, evaluated in parallel.
pub fn conductance_sweep<T: Real>(curve: &CurveOnSurface<T>, spec: &InterferometerSpec<T>, phi_out: &[T]) -> Result<Vec<Transmission<T>>> {
    phi_out.par_iter().map(|&p| transmission_matrix(curve, spec, p)).collect()
}

/// `n` evenly spaced detector positions over one period after `φ_in`, excluding `φ_in`.
pub fn sweep_grid<T: Real>(curve: &CurveOnSurface<T>, phi_in: T, n: usize) -> Vec<T> {
    let period = curve.t1 - curve.t0;
    (1..=n).map(|i| phi_in + period * T::from_usize_exact(i) / T::from_usize_exact(n)).collect()
}

/// `max G - min G` over a sweep.
pub fn sweep_amplitude<T: Real>(sweep: &[Transmission<T>]) -> T {
    let (lo, hi) = sweep.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), x| (lo.min(x.conductance), hi.max(x.conductance)));
    hi - lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{default_curve, CurveId};
    use crate::transport::FieldCoupling;
    use crate::vec3::Vec3;
    use std::f64::consts::PI;

    #[test]
    fn conductance_is_flat_under_connection_coupling() {
        let c = default_curve::<f64>(CurveId::VivianiOnCylinder).unwrap();
        let spec = InterferometerSpec::new(0.0);
        let sweep = conductance_sweep(&c, &spec, &sweep_grid(&c, 0.0, 16)).unwrap();
        let loop_u = path_ordered_propagator(&c, 0.0, c.length(), 20_000, &FieldOptions::none()).unwrap();
        let expected = 1.0 + loop_u.trace().re / 2.0;
        for x in &sweep {
            assert!((0.0..=2.0).contains(&x.conductance));
            assert!((x.conductance - expected).abs() < 1e-5, "{} vs {expected}", x.conductance);
        }
    }

    #[test]
    fn zeeman_field_adds_detector_dependence() {
        let c = default_curve::<f64>(CurveId::VivianiOnSphere).unwrap();
        let mut spec = InterferometerSpec::new(0.0);
        let grid = sweep_grid(&c, 0.0, 24);
        let flat = sweep_amplitude(&conductance_sweep(&c, &spec, &grid).unwrap());
        spec.field = FieldOptions::with_extra(Vec3::new(0.0, 0.0, 5.0), FieldCoupling::Zeeman);
        let driven = sweep_amplitude(&conductance_sweep(&c, &spec, &grid).unwrap());
        assert!(flat < 1e-6 && driven > flat + 0.1, "{flat} {driven}");
    }

    #[test]
    fn detector_positions_are_periodic() {
        let c = default_curve::<f64>(CurveId::VivianiOnSphere).unwrap();
        let spec = InterferometerSpec::new(0.3);
        let a = transmission_matrix(&c, &spec, 1.7).unwrap();
        let b = transmission_matrix(&c, &spec, 1.7 + 2.0 * PI).unwrap();
        assert!((a.conductance - b.conductance).abs() < 1e-12);
        assert!((a.arms.ccw_length + a.arms.cw_length - c.length()).abs() < 1e-12);
    }

    #[test]
    fn product_agrees_with_ode_oracle() {
        let c = default_curve::<f64>(CurveId::VivianiOnCylinder).unwrap();
        let mut spec = InterferometerSpec::new(0.5);
        spec.include_dynamical_phase = true;
        spec.n_steps = 40_000;
        let p = transmission_matrix(&c, &spec, 2.0).unwrap();
        let o = transmission_matrix_ode(&c, &spec, 2.0, 1e-11).unwrap();
        assert!(p.u_ccw.distance(&o.u_ccw) < 1e-7 && p.u_cw.distance(&o.u_cw) < 1e-7);
        assert!((p.conductance - o.conductance).abs() < 1e-7);
    }

    #[test]
    fn combiner_limits() {
        let id = SU2Operator::<f64>::identity();
        assert!((combine_arms(&id, &id, 0.0, 0.0).1 - 2.0).abs() < 1e-15);
        assert!(combine_arms(&id, &id.neg(), 0.0, 0.0).1.abs() < 1e-15);
        assert!(combine_arms(&id, &id, 0.0, PI).1.abs() < 1e-15);
    }

    #[test]
    fn conductance_matches_loop_identity() {
        let c = default_curve::<f64>(CurveId::VivianiOnSphere).unwrap();
        let t = transmission_matrix(&c, &InterferometerSpec::new(0.0), PI).unwrap();
        assert!((t.conductance - loop_conductance(&t.u_ccw, &t.u_cw)).abs() < 1e-12);
    }

    #[test]
    fn open_curves_are_rejected() {
        let c = default_curve::<f64>(CurveId::HelixConst).unwrap();
        assert!(matches!(transmission_matrix(&c, &InterferometerSpec::new(0.0), 1.0), Err(Error::NotClosed)));
    }
}
