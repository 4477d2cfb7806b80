//! Geodesic shooting and the numerically constructed Fermi metric `g_ss(s, q)`.
//!
//! `P(s, q)` is the end point of the surface geodesic leaving `C(s)` along
//! `B(s)` with length `q`. Its second-order model is
//! `g_ss ≈ 1 - 2κ_g q + (κ_g² - K) q²`.

use crate::curve::CurveOnSurface;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::surface::{christoffel_from, inverse, SurfacePatch};
use crate::vec3::Vec3;

/// Polar distance (radians) below which a sphere shot switches to a rotated chart.
pub const POLE_SWITCH: f64 = 1e-3;
const MIN_STEP: f64 = 1e-4;
const ENERGY_DRIFT: f64 = 1e-6;
/// Residuals below this are treated as exact zeros by the order fit.
pub const RESIDUAL_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState<T> {
    pub u: T,
    pub v: T,
    pub du: T,
    pub dv: T,
    /// Geodesic arclength travelled so far.
    pub q: T,
}

/// Where a shot ended, expressed in the chart that was active at the end.
#[derive(Debug, Clone)]
pub struct GeodesicEnd<T> {
    pub state: GeodesicState<T>,
    pub surface: SurfacePatch<T>,
    pub point: Vec3<T>,
    /// Largest `|g(u̇, u̇) - 1|` seen along the way.
    pub energy_drift: T,
    pub chart_switches: usize,
}

fn metric_speed2<T: Real>(surface: &SurfacePatch<T>, u: T, v: T, du: T, dv: T) -> T {
    let d = surface.derivatives_unchecked(u, v);
    (d.pu * du + d.pv * dv).norm_squared()
}

/// Chart components of the tangent vector `w` at `(u, v)`.
fn tangent_components<T: Real>(surface: &SurfacePatch<T>, u: T, v: T, w: Vec3<T>) -> Result<(T, T)> {
    let d = surface.derivatives(u, v)?;
    let g = [[d.pu.dot(d.pu), d.pu.dot(d.pv)], [d.pu.dot(d.pv), d.pv.dot(d.pv)]];
    let gi = inverse(g).ok_or(Error::SingularMetric { u: u.as_f64(), v: v.as_f64(), det: crate::surface::det(g).as_f64() })?;
    let r = [w.dot(d.pu), w.dot(d.pv)];
    Ok((gi[0][0] * r[0] + gi[0][1] * r[1], gi[1][0] * r[0] + gi[1][1] * r[1]))
}

/// Re-expresses a state in the rotated chart of a sphere.
fn switch_chart<T: Real>(surface: &SurfacePatch<T>, st: GeodesicState<T>) -> Result<(SurfacePatch<T>, GeodesicState<T>)> {
    let next = surface.rotated_chart().ok_or(Error::LeftChartDomain { q: st.q.as_f64() })?;
    let d = surface.derivatives_unchecked(st.u, st.v);
    let vel = d.pu * st.du + d.pv * st.dv;
    let (u, v) = next.invert(d.p).ok_or(Error::LeftChartDomain { q: st.q.as_f64() })?;
    let (du, dv) = tangent_components(&next, u, v, vel)?;
    Ok((next, GeodesicState { u, v, du, dv, q: st.q }))
}

type Deriv<T> = [T; 4];

fn rhs<T: Real>(surface: &SurfacePatch<T>, y: Deriv<T>, q: T) -> Result<Deriv<T>> {
    let (u, v, du, dv) = (y[0], y[1], y[2], y[3]);
    if !surface.domain().contains(u, v) {
        return Err(Error::LeftChartDomain { q: q.as_f64() });
    }
    let d = surface.derivatives_unchecked(u, v);
    let g = christoffel_from(&d).ok_or(Error::LeftChartDomain { q: q.as_f64() })?;
    let vel = [du, dv];
    let mut acc = [T::zero(); 2];
    for (a, acc_a) in acc.iter_mut().enumerate() {
        for b in 0..2 {
            for c in 0..2 {
                *acc_a = *acc_a - g[a][b][c] * vel[b] * vel[c];
            }
        }
    }
    Ok([du, dv, acc[0], acc[1]])
}

fn near_pole<T: Real>(surface: &SurfacePatch<T>, st: &GeodesicState<T>, h: T) -> bool {
    let dist = surface.singularity_distance(st.u, st.v);
    dist.is_finite() && dist - T::two() * h * st.du.abs() < T::lit(POLE_SWITCH)
}

/// Integrates the geodesic equation from `start` with unit chart velocity `direction`
/// for signed length `q` (negative `q` runs backwards), using fixed-step RK4.
pub fn geodesic_shoot<T: Real>(surface: &SurfacePatch<T>, start: (T, T), direction: (T, T), q: T) -> Result<GeodesicEnd<T>> {
    let (u, v) = start;
    surface.derivatives(u, v)?;
    let e0 = metric_speed2(surface, u, v, direction.0, direction.1);
    if (e0 - T::one()).abs() > T::lit(1e-8) {
        return Err(Error::InvalidInput(format!("direction has metric norm² {e0}, expected 1")));
    }
    let sign = if q < T::zero() { -T::one() } else { T::one() };
    let len = q.abs();
    let mut st = GeodesicState { u, v, du: direction.0 * sign, dv: direction.1 * sign, q: T::zero() };
    let mut patch = surface.clone();
    let mut switches = 0;
    let mut drift = T::zero();

    let nominal = (len / T::lit(64.0)).max(T::lit(MIN_STEP));
    let steps = if len > T::zero() { (len / nominal).ceil().to_usize().unwrap_or(1).max(1) } else { 0 };
    let h = if steps > 0 { len / T::from_usize_exact(steps) } else { T::zero() };

    for _ in 0..steps {
        if near_pole(&patch, &st, h) {
            let (p, s) = switch_chart(&patch, st)?;
            patch = p;
            st = s;
            switches += 1;
        }
        let y = [st.u, st.v, st.du, st.dv];
        let add = |a: Deriv<T>, k: Deriv<T>, w: T| [a[0] + k[0] * w, a[1] + k[1] * w, a[2] + k[2] * w, a[3] + k[3] * w];
        let half = h / T::two();
        let k1 = rhs(&patch, y, st.q)?;
        let k2 = rhs(&patch, add(y, k1, half), st.q)?;
        let k3 = rhs(&patch, add(y, k2, half), st.q)?;
        let k4 = rhs(&patch, add(y, k3, h), st.q)?;
        let six = T::lit(6.0);
        let mut next = [T::zero(); 4];
        for i in 0..4 {
            next[i] = y[i] + h * (k1[i] + T::two() * (k2[i] + k3[i]) + k4[i]) / six;
        }
        st = GeodesicState { u: next[0], v: next[1], du: next[2], dv: next[3], q: st.q + h };
        if !patch.domain().contains(st.u, st.v) {
            return Err(Error::LeftChartDomain { q: st.q.as_f64() });
        }
        drift = drift.max((metric_speed2(&patch, st.u, st.v, st.du, st.dv) - T::one()).abs());
        if drift > T::lit(ENERGY_DRIFT) {
            return Err(Error::StepTooLarge { drift: drift.as_f64() });
        }
    }
    st.q = st.q * sign;
    let point = patch.point(st.u, st.v);
    Ok(GeodesicEnd { state: st, surface: patch, point, energy_drift: drift, chart_switches: switches })
}

/// Shoots from chart point `(u, v)` along the 3D tangent vector `dir` (normalized internally).
pub fn shoot_along<T: Real>(surface: &SurfacePatch<T>, u: T, v: T, dir: Vec3<T>, q: T) -> Result<GeodesicEnd<T>> {
    let mut patch = surface.clone();
    let (mut u, mut v) = (u, v);
    if patch.singularity_distance(u, v) < T::lit(POLE_SWITCH) {
        let p = patch.point(u, v);
        patch = patch.rotated_chart().ok_or(Error::LeftChartDomain { q: 0.0 })?;
        (u, v) = patch.invert(p).ok_or(Error::LeftChartDomain { q: 0.0 })?;
    }
    let (du, dv) = tangent_components(&patch, u, v, dir.normalize())?;
    geodesic_shoot(&patch, (u, v), (du, dv), q)
}

impl<T: Real> CurveOnSurface<T> {
    /// `P(s, q)`: end of the geodesic of length `q` leaving `C(s)` along `B(s)`.
    pub fn fermi_point(&self, s: T, q: T) -> Result<Vec3<T>> {
        let smp = self.darboux_sample(s)?;
        if q == T::zero() {
            return Ok(smp.position);
        }
        let (u, v) = self.chart_point(smp.param);
        Ok(shoot_along(&self.surface, u, v, smp.frame.b, q)?.point)
    }
}

/// Default `∂_s` step. Geodesic end points carry ~1e-13 of rounding noise, so
/// smaller steps lose more to cancellation than Richardson gains.
pub fn default_fd_step<T: Real>(_s: T) -> T {
    T::lit(5e-3)
}

fn richardson<T: Real>(f: impl Fn(T) -> Result<Vec3<T>>, h: T) -> Result<Vec3<T>> {
    let d = |h: T| -> Result<Vec3<T>> { Ok((f(h)? - f(-h)?) / (T::two() * h)) };
    let coarse = d(h)?;
    let fine = d(h / T::two())?;
    Ok((fine * T::lit(4.0) - coarse) / T::lit(3.0))
}

/// `∂_s P(s, q)` by Richardson-extrapolated central differences.
pub fn fermi_ds<T: Real>(curve: &CurveOnSurface<T>, s: T, q: T, fd_step: T) -> Result<Vec3<T>> {
    richardson(|h| curve.fermi_point(s + h, q), fd_step)
}

/// `g_ss(s, q) = ‖∂_s P‖²`.
pub fn fermi_metric_gss<T: Real>(curve: &CurveOnSurface<T>, s: T, q: T, fd_step: T) -> Result<T> {
    Ok(fermi_ds(curve, s, q, fd_step)?.norm_squared())
}

/// `|∂_s P · ∂_q P|` at `(s, q)`; vanishes in a Fermi chart.
pub fn fermi_cross_term<T: Real>(curve: &CurveOnSurface<T>, s: T, q: T, fd_step: T) -> Result<T> {
    let ds = fermi_ds(curve, s, q, fd_step)?;
    let dq = richardson(|h| curve.fermi_point(s, q + h), default_fd_step(s))?;
    Ok(ds.dot(dq).abs())
}

/// Fermi-chart `Γ^q_{ss} = -½ ∂_q g_ss` at `q = 0`, by central differences in `q`.
pub fn fermi_christoffel_q_ss<T: Real>(curve: &CurveOnSurface<T>, s: T, q_step: T) -> Result<T> {
    let fd = default_fd_step(s);
    let g = |q: T| fermi_metric_gss(curve, s, q, fd);
    let d = |h: T| -> Result<T> { Ok((g(h)? - g(-h)?) / (T::two() * h)) };
    let coarse = d(q_step)?;
    let fine = d(q_step / T::two())?;
    Ok(-(T::lit(4.0) * fine - coarse) / T::lit(3.0) / T::two())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermiPoint<T> {
    pub s: T,
    pub q: T,
    pub gss_numeric: T,
    pub gss_series: T,
    pub residual: T,
}

/// Second-order model `1 - 2κ_g q + (κ_g² - K) q²` at arclength `s`.
pub fn gss_series<T: Real>(kappa_g: T, gaussian: T, q: T) -> T {
    T::one() - T::two() * kappa_g * q + (kappa_g * kappa_g - gaussian) * q * q
}

/// Numeric `g_ss` against the second-order model on a `q` grid.
pub fn expansion_residuals<T: Real>(curve: &CurveOnSurface<T>, s: T, q_grid: &[T]) -> Result<Vec<FermiPoint<T>>> {
    let smp = curve.darboux_sample(s)?;
    let fd = default_fd_step(s);
    q_grid
        .iter()
        .map(|&q| {
            let num = fermi_metric_gss(curve, s, q, fd)?;
            let ser = gss_series(smp.kappa_g, smp.gaussian, q);
            Ok(FermiPoint { s, q, gss_numeric: num, gss_series: ser, residual: (num - ser).abs() })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit<T> {
    pub slope: T,
    pub intercept: T,
    pub points: Vec<FermiPoint<T>>,
}

/// Least-squares slope of `log r` against `log q`; points at the rounding floor are skipped.
pub fn fit_order<T: Real>(points: &[FermiPoint<T>]) -> Result<(T, T)> {
    let usable: Vec<(T, T)> = points
        .iter()
        .filter(|p| p.residual > T::lit(RESIDUAL_FLOOR) && p.q != T::zero())
        .map(|p| (p.q.abs().ln(), p.residual.ln()))
        .collect();
    if usable.len() < 2 {
        let worst = points.iter().map(|p| p.residual).fold(T::zero(), T::max);
        return Err(Error::FitFailed {
            reason: format!("{} of {} residuals above the floor (max residual {:e})", usable.len(), points.len(), worst.as_f64()),
        });
    }
    let n = T::from_usize_exact(usable.len());
    let mx = usable.iter().map(|p| p.0).sum::<T>() / n;
    let my = usable.iter().map(|p| p.1).sum::<T>() / n;
    let sxx = usable.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<T>();
    let sxy = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<T>();
    if sxx == T::zero() {
        return Err(Error::FitFailed { reason: "q grid has a single distinct value".into() });
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Geometric `q` grid from `0.16` down to `0.01`.
pub fn default_q_grid<T: Real>() -> Vec<T> {
    [0.16, 0.08, 0.04, 0.02, 0.01].iter().map(|&q| T::lit(q)).collect()
}

/// Fits the order of the truncation error of the second-order model.
pub fn expansion_order_check<T: Real>(curve: &CurveOnSurface<T>, s: T, q_grid: &[T]) -> Result<OrderFit<T>> {
    let points = expansion_residuals(curve, s, q_grid)?;
    let (slope, intercept) = fit_order(&points)?;
    Ok(OrderFit { slope, intercept, points })
}
