//! Frenet and Darboux frames along a curve on a surface.
//!
//! Orientation convention: `B := t × N`, and the Darboux invariants are read
//! off the rows of the frame equations,
//!
//! ```text
//! dt/ds =            κ_n N + κ_g B
//! dN/ds = -κ_n t           - τ_g B
//! dB/ds = -κ_g t + τ_g N
//! ```
//!
//! so `κ_n = t'·N`, `κ_g = t'·B` and `τ_g = -N'·B`. With the Frenet angle
//! `θ` defined by `cos θ = n·N`, `sin θ = -b·N`, this gives `κ_g = κ sin θ`,
//! `κ_n = κ cos θ` and `τ_g = -(τ - θ')`.

use crate::curve::{CurveOnSurface, LocalGeometry};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::surface::{inverse, matmul, Mat2};
use crate::vec3::{Frame, Vec3};

/// Threshold below which the Frenet normal is considered undefined.
pub const VANISHING_CURVATURE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetSample<T> {
    pub s: T,
    pub frame: Frame<T>,
    pub kappa: T,
    pub tau: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxSample<T> {
    pub s: T,
    /// Curve parameter at `s`.
    pub param: T,
    pub position: Vec3<T>,
    /// `(t, N, B)`.
    pub frame: Frame<T>,
    /// Angle from the Frenet normal to `N` in `(-π, π]`; `None` where `κ` vanishes.
    pub theta: Option<T>,
    pub kappa_g: T,
    pub kappa_n: T,
    pub tau_g: T,
    pub gaussian: T,
    pub mean: T,
}

impl<T: Real> DarbouxSample<T> {
    /// `κ² = κ_g² + κ_n²`.
    pub fn kappa_squared(&self) -> T {
        self.kappa_g * self.kappa_g + self.kappa_n * self.kappa_n
    }
}

/// Chart components `(a, b)` of a tangent vector `x = a ∂u + b ∂v`.
fn chart_components<T: Real>(g_inv: Mat2<T>, local: &LocalGeometry<T>, x: Vec3<T>) -> [T; 2] {
    let d = &local.surface;
    let rhs = [x.dot(d.pu), x.dot(d.pv)];
    [g_inv[0][0] * rhs[0] + g_inv[0][1] * rhs[1], g_inv[1][0] * rhs[0] + g_inv[1][1] * rhs[1]]
}

fn bilinear<T: Real>(m: Mat2<T>, a: [T; 2], b: [T; 2]) -> T {
    a[0] * (m[0][0] * b[0] + m[0][1] * b[1]) + a[1] * (m[1][0] * b[0] + m[1][1] * b[1])
}

impl<T: Real> CurveOnSurface<T> {
    /// Darboux data at curve parameter `t` with a known arclength `s`.
    pub fn darboux_at_param_with_s(&self, t: T, s: T) -> Result<DarbouxSample<T>> {
        let local = self.local(t)?;
        let speed = local.speed();
        let n_surf = local.normal;
        let tv = local.r1 / speed;
        let bv = tv.cross(n_surf);
        let speed2 = speed * speed;
        let accel = (local.r2 - tv * local.r2.dot(tv)) / speed2;
        let kappa_n = accel.dot(n_surf);
        let kappa_g = accel.dot(bv);

        let (first, second) = self.surface.forms_from(&local.surface, n_surf);
        let g_inv = inverse(first).ok_or(Error::SingularMetric {
            u: local.u.as_f64(),
            v: local.v.as_f64(),
            det: crate::surface::det(first).as_f64(),
        })?;
        let tc = chart_components(g_inv, &local, tv);
        let bc = chart_components(g_inv, &local, bv);
        // -dN(t)·B = II(t, B) under dN = -S dR.
        let tau_g = bilinear(second, tc, bc);
        let shape = matmul(g_inv, second);
        let gaussian = shape[0][0] * shape[1][1] - shape[0][1] * shape[1][0];
        let mean = (shape[0][0] + shape[1][1]) / T::two();

        let kappa = accel.norm();
        let theta = if kappa > T::lit(VANISHING_CURVATURE) {
            let n = accel / kappa;
            let b = tv.cross(n);
            Some((-b.dot(n_surf)).atan2(n.dot(n_surf)))
        } else {
            None
        };
        Ok(DarbouxSample {
            s,
            param: t,
            position: local.r,
            frame: Frame { t: tv, n: n_surf, b: bv },
            theta,
            kappa_g,
            kappa_n,
            tau_g,
            gaussian,
            mean,
        })
    }

    pub fn darboux_at_param(&self, t: T) -> Result<DarbouxSample<T>> {
        let s = self.s_of_t(t)?;
        self.darboux_at_param_with_s(t, s)
    }

    pub fn darboux_sample(&self, s: T) -> Result<DarbouxSample<T>> {
        let s = self.normalize_s(s)?;
        let t = self.t_of_s(s)?;
        self.darboux_at_param_with_s(t, s)
    }

    /// Frenet frame, curvature and torsion at arclength `s`.
    pub fn frenet_sample(&self, s: T) -> Result<FrenetSample<T>> {
        let s = self.normalize_s(s)?;
        let t = self.t_of_s(s)?;
        self.frenet_at_param_with_s(t, s)
    }

    pub fn frenet_at_param_with_s(&self, t: T, s: T) -> Result<FrenetSample<T>> {
        let local = self.local(t)?;
        let r1 = local.r1;
        let r2 = local.r2;
        let c = r1.cross(r2);
        let speed = r1.norm();
        let kappa = c.norm() / (speed * speed * speed);
        if kappa <= T::lit(VANISHING_CURVATURE) {
            return Err(Error::VanishingCurvature { s: s.as_f64(), kappa: kappa.as_f64() });
        }
        let r3 = self.third_derivative(t)?;
        let tau = c.dot(r3) / c.norm_squared();
        let tv = r1 / speed;
        let bv = c / c.norm();
        let nv = bv.cross(tv);
        Ok(FrenetSample { s, frame: Frame { t: tv, n: nv, b: bv }, kappa, tau })
    }

    /// `d³r/dt³` by central differences of the analytic second derivative.
    fn third_derivative(&self, t: T) -> Result<Vec3<T>> {
        let h = T::lit(1e-3) * (T::one() + t.abs());
        let d = |h: T| -> Result<Vec3<T>> { Ok((self.local(t + h)?.r2 - self.local(t - h)?.r2) / (T::two() * h)) };
        let coarse = d(h)?;
        let fine = d(h / T::two())?;
        Ok((fine * T::lit(4.0) - coarse) / T::lit(3.0))
    }

    /// Samples `n + 1` equally spaced points in arclength, unwrapping `θ` continuously.
    pub fn darboux_samples(&self, n: usize) -> Result<Vec<DarbouxSample<T>>> {
        let l = self.length();
        let mut out: Vec<DarbouxSample<T>> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let s = l * T::from_usize_exact(i) / T::from_usize_exact(n.max(1));
            out.push(self.darboux_sample(s)?);
        }
        unwrap_theta(&mut out);
        Ok(out)
    }

    /// Frame mismatch between the two ends of a closed curve; zero for smooth closed curves.
    pub fn seam_mismatch(&self) -> Result<T> {
        if !self.closed {
            return Err(Error::NotClosed);
        }
        let a = self.darboux_at_param_with_s(self.t0, T::zero())?.frame;
        let b = self.darboux_at_param_with_s(self.t1, self.length())?.frame;
        Ok([(a.t - b.t).norm(), (a.n - b.n).norm(), (a.b - b.b).norm()].into_iter().fold(T::zero(), T::max))
    }

    /// Signed tangent turning at the seam of a closed curve, in the `κ_g` sign convention
    /// (positive when the tangent turns toward `B`).
    pub fn seam_turning_angle(&self) -> Result<T> {
        if !self.closed {
            return Err(Error::NotClosed);
        }
        let start = self.darboux_at_param_with_s(self.t0, T::zero())?.frame;
        let end = self.darboux_at_param_with_s(self.t1, self.length())?.frame;
        let sin = end.t.cross(start.t).dot(start.n);
        let cos = end.t.dot(start.t);
        Ok(-sin.atan2(cos))
    }
}

/// Largest residuals of the two candidate Frenet relations `τ_g = ∓(τ - θ')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchResiduals<T> {
    /// `max |τ_g + (τ - θ')|`.
    pub minus: T,
    /// `max |τ_g - (τ - θ')|`.
    pub plus: T,
    /// Samples where both frames exist.
    pub samples: usize,
}

impl<T: Real> CurveOnSurface<T> {
    /// Evaluates both branches at `n` interior points, with `θ'` by central differences.
    /// Points where the Frenet frame is undefined are skipped.
    pub fn torsion_branch_residuals(&self, n: usize) -> Result<BranchResiduals<T>> {
        let l = self.length();
        let two_pi = T::two() * T::PI();
        let mut out = BranchResiduals { minus: T::zero(), plus: T::zero(), samples: 0 };
        for i in 0..n {
            let s = l * (T::from_usize_exact(i) + T::half()) / T::from_usize_exact(n);
            let h = T::lit(1e-5) * (T::one() + l);
            let (Some(a), Some(b)) = (self.darboux_sample(s - h)?.theta, self.darboux_sample(s + h)?.theta) else {
                continue;
            };
            let fr = match self.frenet_sample(s) {
                Ok(f) => f,
                Err(Error::VanishingCurvature { .. }) => continue,
                Err(e) => return Err(e),
            };
            let mut d = b - a;
            d = d - two_pi * (d / two_pi).round();
            let dtheta = d / (T::two() * h);
            let tau_g = self.darboux_sample(s)?.tau_g;
            out.minus = out.minus.max((tau_g + (fr.tau - dtheta)).abs());
            out.plus = out.plus.max((tau_g - (fr.tau - dtheta)).abs());
            out.samples += 1;
        }
        Ok(out)
    }
}

/// Makes `θ` continuous along a sample sequence; the first value stays in `(-π, π]`.
pub fn unwrap_theta<T: Real>(samples: &mut [DarbouxSample<T>]) {
    let two_pi = T::two() * T::PI();
    let mut prev: Option<T> = None;
    for smp in samples.iter_mut() {
        if let Some(th) = smp.theta {
            if let Some(p) = prev {
                let mut d = th - p;
                d = d - two_pi * (d / two_pi).round();
                let new = p + d;
                smp.theta = Some(new);
                prev = Some(new);
            } else {
                prev = Some(th);
            }
        }
    }
}
