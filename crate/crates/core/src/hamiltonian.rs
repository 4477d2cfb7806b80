//! Gauge field and scalar potentials of the effective 1D Hamiltonian.
//!
//! `β = (τ_g, κ_g, -κ_n)` in Darboux order `(t, N, B)`; its lab image is
//! `b = τ_g t + κ_g N - κ_n B`. The gauge term is `Ω_s = -(i/2) β·σ`.
//! Potentials are in units `ħ = 1`, `2m = 1`.

use num_complex::Complex;

use crate::curve::CurveOnSurface;
use crate::error::Result;
use crate::frames::DarbouxSample;
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Magnitudes below this are printed as exact zeros in summaries.
pub const ZERO_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSample<T> {
    pub s: T,
    /// `(τ_g, κ_g, -κ_n)`.
    pub beta_darboux: Vec3<T>,
    pub b_lab: Vec3<T>,
    /// `√(κ² + τ_g²)`.
    pub magnitude: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSample<T> {
    pub s: T,
    pub v_g: T,
    pub v_sg: T,
}

pub fn beta_from_sample<T: Real>(d: &DarbouxSample<T>) -> BetaSample<T> {
    let beta = Vec3::new(d.tau_g, d.kappa_g, -d.kappa_n);
    let b_lab = d.frame.compose(beta);
    let magnitude = (d.kappa_squared() + d.tau_g * d.tau_g).sqrt();
    BetaSample { s: d.s, beta_darboux: beta, b_lab, magnitude }
}

pub fn potentials_from_sample<T: Real>(d: &DarbouxSample<T>) -> PotentialSample<T> {
    let v_g = -(d.mean * d.mean - d.gaussian);
    let v_sg = -(d.kappa_g * d.kappa_g + T::two() * d.gaussian) / T::lit(4.0);
    PotentialSample { s: d.s, v_g, v_sg }
}

/// Coefficients of `(σ_s, σ_N, σ_q)` in `Ω_s`.
pub fn gauge_coefficients<T: Real>(beta: &BetaSample<T>) -> [Complex<T>; 3] {
    let k = Complex::new(T::zero(), -T::half());
    [k * beta.beta_darboux.x, k * beta.beta_darboux.y, k * beta.beta_darboux.z]
}

/// Replaces values below [`ZERO_THRESHOLD`] in magnitude by `0`.
pub fn snap_zero<T: Real>(x: T) -> T {
    if x.abs() < T::lit(ZERO_THRESHOLD) {
        T::zero()
    } else {
        x
    }
}

impl<T: Real> CurveOnSurface<T> {
    pub fn beta_field(&self, s: T) -> Result<BetaSample<T>> {
        Ok(beta_from_sample(&self.darboux_sample(s)?))
    }

    pub fn potentials(&self, s: T) -> Result<PotentialSample<T>> {
        Ok(potentials_from_sample(&self.darboux_sample(s)?))
    }

    /// `|d(β/‖β‖)/ds|` in Darboux components; zero where `β` vanishes.
    pub fn adiabaticity(&self, s: T) -> Result<T> {
        let l = self.length();
        let h = T::lit(1e-4) * (T::one() + s.abs());
        let (a, b) = if self.closed { (s - h, s + h) } else { ((s - h).max(T::zero()), (s + h).min(l)) };
        let unit = |x: T| -> Result<Option<Vec3<T>>> {
            let beta = self.beta_field(x)?;
            Ok((beta.magnitude > T::lit(ZERO_THRESHOLD)).then(|| beta.beta_darboux / beta.magnitude))
        };
        match (unit(a)?, unit(b)?) {
            (Some(ua), Some(ub)) => Ok(((ub - ua) / (b - a)).norm()),
            _ => Ok(T::zero()),
        }
    }
}
