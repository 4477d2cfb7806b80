//! Curves drawn in the chart of a host surface, with their arclength table.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre8;
use crate::scalar::{Jet, Real, Smooth};
use crate::surface::{ChartDerivatives, SurfacePatch};
use crate::vec3::Vec3;

pub type PathFn<T> = Arc<dyn Fn(T) -> (T, T) + Send + Sync>;

/// `t ↦ (u(t), v(t))` in the host chart.
#[derive(Clone)]
pub enum ChartPath<T> {
    /// Cylinder chart `(φ, z)`: `z = c φ`.
    HelixConst { c: T },
    /// `z = c f (exp(φ/f) - 1)`.
    HelixExp { c: T, f: T },
    /// `z = c f ln(φ/f + 1)`.
    HelixLog { c: T, f: T },
    /// Cylinder of radius `rho` with axis through `(rho, 0)`: `z = 2 rho sin(φ/2)`.
    VivianiCylinder { rho: T },
    /// Sphere of radius `2 rho` with a `y`-pole chart, parameterized by the cylinder angle `φ`.
    VivianiSphere,
    /// Sphere chart `(θ, ψ) = (alpha, -t)`; the cap `θ < alpha` lies on the `B` side.
    Latitude { alpha: T },
    /// Plane chart, clockwise circle so the enclosed disk lies on the `B` side.
    PlanarCircle { radius: T },
    /// Straight chart segment `origin + t·direction`.
    Line { origin: (T, T), direction: (T, T) },
    /// User path; derivatives by finite differences.
    Custom(PathFn<T>),
}

impl<T: fmt::Debug> fmt::Debug for ChartPath<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartPath::HelixConst { c } => write!(f, "HelixConst {{ c: {c:?} }}"),
            ChartPath::HelixExp { c, f: ff } => write!(f, "HelixExp {{ c: {c:?}, f: {ff:?} }}"),
            ChartPath::HelixLog { c, f: ff } => write!(f, "HelixLog {{ c: {c:?}, f: {ff:?} }}"),
            ChartPath::VivianiCylinder { rho } => write!(f, "VivianiCylinder {{ rho: {rho:?} }}"),
            ChartPath::VivianiSphere => write!(f, "VivianiSphere"),
            ChartPath::Latitude { alpha } => write!(f, "Latitude {{ alpha: {alpha:?} }}"),
            ChartPath::PlanarCircle { radius } => write!(f, "PlanarCircle {{ radius: {radius:?} }}"),
            ChartPath::Line { origin, direction } => write!(f, "Line {{ origin: {origin:?}, direction: {direction:?} }}"),
            ChartPath::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl<T: Real> ChartPath<T> {
    fn eval_smooth<S: Smooth<T>>(&self, t: S) -> Option<(S, S)> {
        let k = S::cst;
        Some(match self {
            ChartPath::HelixConst { c } => (t, t.scale(*c)),
            ChartPath::HelixExp { c, f } => (t, ((t / k(*f)).exp() - k(T::one())).scale(*c * *f)),
            ChartPath::HelixLog { c, f } => (t, (t / k(*f) + k(T::one())).ln().scale(*c * *f)),
            ChartPath::VivianiCylinder { rho } => (t, t.scale(T::half()).sin().scale(T::two() * *rho)),
            ChartPath::VivianiSphere => {
                let half = t.scale(T::half());
                let c = half.cos();
                ((t.sin().scale(T::half())).acos(), (c * c).atan2(half.sin()))
            }
            ChartPath::Latitude { alpha } => (k(*alpha), -t),
            ChartPath::PlanarCircle { radius } => (t.cos().scale(*radius), -t.sin().scale(*radius)),
            ChartPath::Line { origin, direction } => (k(origin.0) + t.scale(direction.0), k(origin.1) + t.scale(direction.1)),
            ChartPath::Custom(_) => return None,
        })
    }

    pub fn eval(&self, t: T) -> (T, T) {
        match self {
            ChartPath::Custom(f) => f(t),
            _ => self.eval_smooth(t).expect("catalog path"),
        }
    }

    /// `(u, v)` with first and second derivatives in `t`.
    pub fn jets(&self, t: T) -> (Jet<T>, Jet<T>) {
        if let Some(j) = self.eval_smooth(Jet::var(t)) {
            return j;
        }
        let h = T::lit(1e-4);
        let f = |x: T| self.eval(x);
        let (u0, v0) = f(t);
        let d = |h: T| {
            let (up, vp) = f(t + h);
            let (um, vm) = f(t - h);
            let two_h = T::two() * h;
            ((up - um) / two_h, (vp - vm) / two_h, (up - T::two() * u0 + um) / (h * h), (vp - T::two() * v0 + vm) / (h * h))
        };
        let c = d(h);
        let fi = d(h / T::two());
        let r = |a: T, b: T| (T::lit(4.0) * b - a) / T::lit(3.0);
        (
            Jet { v: u0, d1: r(c.0, fi.0), d2: r(c.2, fi.2) },
            Jet { v: v0, d1: r(c.1, fi.1), d2: r(c.3, fi.3) },
        )
    }
}

/// Embedding derivatives at one curve parameter.
#[derive(Debug, Clone, Copy)]
pub struct LocalGeometry<T> {
    pub t: T,
    pub u: T,
    pub v: T,
    /// Chart-coordinate velocity and acceleration `(u', v')`, `(u'', v'')`.
    pub chart_vel: (T, T),
    pub chart_acc: (T, T),
    pub surface: ChartDerivatives<T>,
    pub normal: Vec3<T>,
    pub r: Vec3<T>,
    pub r1: Vec3<T>,
    pub r2: Vec3<T>,
}

impl<T: Real> LocalGeometry<T> {
    pub fn speed(&self) -> T {
        self.r1.norm()
    }
}

/// Monotone table `t ↔ s` built by 8-point Gauss–Legendre on each interval.
#[derive(Debug, Clone)]
pub struct ArclengthTable<T> {
    pub t: Vec<T>,
    pub s: Vec<T>,
}

impl<T: Real> ArclengthTable<T> {
    pub fn length(&self) -> T {
        *self.s.last().expect("non-empty table")
    }

    fn interval_of_t(&self, t: T) -> usize {
        let n = self.t.len() - 1;
        match self.t.binary_search_by(|x| x.partial_cmp(&t).expect("finite parameter")) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }

    fn interval_of_s(&self, s: T) -> usize {
        let n = self.s.len() - 1;
        match self.s.binary_search_by(|x| x.partial_cmp(&s).expect("finite arclength")) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }
}

/// A channel curve on a host surface.
#[derive(Clone, Debug)]
pub struct CurveOnSurface<T> {
    pub surface: SurfacePatch<T>,
    pub path: ChartPath<T>,
    pub t0: T,
    pub t1: T,
    pub closed: bool,
    table: ArclengthTable<T>,
}

const IRREGULAR_SPEED: f64 = 1e-12;
pub const DEFAULT_TABLE_SAMPLES: usize = 512;

impl<T: Real> CurveOnSurface<T> {
    pub fn new(surface: SurfacePatch<T>, path: ChartPath<T>, t0: T, t1: T, closed: bool) -> Result<Self> {
        Self::with_samples(surface, path, t0, t1, closed, DEFAULT_TABLE_SAMPLES)
    }

    pub fn with_samples(
        surface: SurfacePatch<T>,
        path: ChartPath<T>,
        t0: T,
        t1: T,
        closed: bool,
        n_samples: usize,
    ) -> Result<Self> {
        if !(t1 > t0) {
            return Err(Error::InvalidInput(format!("parameter range [{t0}, {t1}] is empty")));
        }
        let mut curve = Self { surface, path, t0, t1, closed, table: ArclengthTable { t: vec![], s: vec![] } };
        curve.table = curve.arclength_param(n_samples)?;
        if closed {
            let gap = (curve.position(t1)? - curve.position(t0)?).norm();
            if gap > T::lit(1e-8) * (T::one() + curve.length()) {
                return Err(Error::NotClosed);
            }
        }
        Ok(curve)
    }

    pub fn table(&self) -> &ArclengthTable<T> {
        &self.table
    }

    pub fn length(&self) -> T {
        self.table.length()
    }

    /// Builds the arclength table with `n_samples` intervals.
    pub fn arclength_param(&self, n_samples: usize) -> Result<ArclengthTable<T>> {
        if n_samples < 16 {
            return Err(Error::InvalidInput(format!("n_samples = {n_samples} < 16")));
        }
        let dt = (self.t1 - self.t0) / T::from_usize_exact(n_samples);
        let mut ts = Vec::with_capacity(n_samples + 1);
        let mut ss = Vec::with_capacity(n_samples + 1);
        let mut acc = T::zero();
        let mut failure = None;
        ts.push(self.t0);
        ss.push(acc);
        self.check_speed(self.t0)?;
        for i in 0..n_samples {
            let a = self.t0 + dt * T::from_usize_exact(i);
            let b = if i + 1 == n_samples { self.t1 } else { a + dt };
            acc = acc
                + gauss_legendre8(a, b, |t| match self.speed(t) {
                    Ok(v) if v >= T::lit(IRREGULAR_SPEED) => v,
                    Ok(v) => {
                        failure.get_or_insert(Error::IrregularCurve { t: t.as_f64(), speed: v.as_f64() });
                        v
                    }
                    Err(e) => {
                        failure.get_or_insert(e);
                        T::zero()
                    }
                });
            self.check_speed(b)?;
            ts.push(b);
            ss.push(acc);
        }
        match failure {
            Some(e) => Err(e),
            None => Ok(ArclengthTable { t: ts, s: ss }),
        }
    }

    fn check_speed(&self, t: T) -> Result<()> {
        let v = self.speed(t)?;
        if v < T::lit(IRREGULAR_SPEED) {
            return Err(Error::IrregularCurve { t: t.as_f64(), speed: v.as_f64() });
        }
        Ok(())
    }

    pub fn chart_point(&self, t: T) -> (T, T) {
        self.path.eval(t)
    }

    pub fn position(&self, t: T) -> Result<Vec3<T>> {
        let (u, v) = self.path.eval(t);
        self.surface.chart_eval(u, v).map(|p| p.point)
    }

    /// `ds/dt`.
    pub fn speed(&self, t: T) -> Result<T> {
        let (u, v) = self.path.jets(t);
        let d = self.surface.derivatives(u.v, v.v)?;
        Ok((d.pu * u.d1 + d.pv * v.d1).norm())
    }

    pub fn local(&self, t: T) -> Result<LocalGeometry<T>> {
        let (u, v) = self.path.jets(t);
        let d = self.surface.derivatives(u.v, v.v)?;
        let normal = self.surface.normal_from(&d, u.v, v.v)?;
        let r1 = d.pu * u.d1 + d.pv * v.d1;
        let r2 = d.puu * (u.d1 * u.d1) + d.puv * (T::two() * u.d1 * v.d1) + d.pvv * (v.d1 * v.d1) + d.pu * u.d2 + d.pv * v.d2;
        Ok(LocalGeometry {
            t,
            u: u.v,
            v: v.v,
            chart_vel: (u.d1, v.d1),
            chart_acc: (u.d2, v.d2),
            surface: d,
            normal,
            r: d.p,
            r1,
            r2,
        })
    }

    /// Arclength from `t0` to `t`.
    pub fn s_of_t(&self, t: T) -> Result<T> {
        let k = self.table.interval_of_t(t);
        let mut err = None;
        let partial = gauss_legendre8(self.table.t[k], t, |x| {
            self.speed(x).unwrap_or_else(|e| {
                err.get_or_insert(e);
                T::zero()
            })
        });
        match err {
            Some(e) => Err(e),
            None => Ok(self.table.s[k] + partial),
        }
    }

    /// Reduces `s` into `[0, L]`: periodic for closed curves, clamped within round-off otherwise.
    pub fn normalize_s(&self, s: T) -> Result<T> {
        let l = self.length();
        if self.closed {
            if s >= T::zero() && s <= l {
                return Ok(s);
            }
            let r = s - (s / l).floor() * l;
            return Ok(r.max(T::zero()).min(l));
        }
        let slack = T::lit(1e-9) * (T::one() + l);
        if s < -slack || s > l + slack {
            return Err(Error::InvalidInput(format!("arclength {s} outside [0, {l}]")));
        }
        Ok(s.max(T::zero()).min(l))
    }

    /// Parameter at arclength `s`, by table bisection, interpolation and Newton polish.
    pub fn t_of_s(&self, s: T) -> Result<T> {
        let s = self.normalize_s(s)?;
        let k = self.table.interval_of_s(s);
        let (ta, tb) = (self.table.t[k], self.table.t[k + 1]);
        let (sa, sb) = (self.table.s[k], self.table.s[k + 1]);
        let mut t = ta + (tb - ta) * (s - sa) / (sb - sa);
        let tol = T::lit(1e-14) * (T::one() + self.length());
        for _ in 0..12 {
            let mut err = None;
            let here = sa + gauss_legendre8(ta, t, |x| {
                self.speed(x).unwrap_or_else(|e| {
                    err.get_or_insert(e);
                    T::one()
                })
            });
            if let Some(e) = err {
                return Err(e);
            }
            let resid = here - s;
            if resid.abs() <= tol {
                break;
            }
            t = (t - resid / self.speed(t)?).max(ta).min(tb);
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    fn helix() -> CurveOnSurface<f64> {
        CurveOnSurface::new(SurfacePatch::cylinder(1.0, 0.0, 0.0), ChartPath::HelixConst { c: 1.0 }, 0.0, 2.0 * PI, false)
            .unwrap()
    }

    #[test]
    fn helix_length() {
        assert!((helix().length() - 2.0 * PI * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn straight_segment_arclength_is_parameter() {
        let line = CurveOnSurface::new(
            SurfacePatch::plane(),
            ChartPath::Line { origin: (0.0, 0.0), direction: (1.0, 0.0) },
            0.0,
            1.0,
            false,
        )
        .unwrap();
        for &s in &[0.0_f64, 0.1, 0.5, 0.77, 1.0] {
            assert!((line.t_of_s(s).unwrap() - s).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_lookup_is_accurate_on_viviani() {
        let c = CurveOnSurface::new(
            SurfacePatch::cylinder(1.0, 1.0, 0.0),
            ChartPath::VivianiCylinder { rho: 1.0 },
            0.0,
            2.0 * PI,
            true,
        )
        .unwrap();
        let l = c.length();
        for i in 0..=40 {
            let s = l * i as f64 / 40.0;
            let t = c.t_of_s(s).unwrap();
            assert!((c.s_of_t(t).unwrap() - s).abs() < l * 1e-8);
        }
    }

    #[test]
    fn too_few_samples_and_irregular_curves_rejected() {
        let cyl = SurfacePatch::cylinder(1.0, 0.0, 0.0);
        let err = CurveOnSurface::with_samples(cyl.clone(), ChartPath::HelixConst { c: 1.0 }, 0.0, 1.0, false, 8);
        assert!(matches!(err, Err(Error::InvalidInput(_))));
        let stall = CurveOnSurface::new(
            SurfacePatch::plane(),
            ChartPath::Custom(Arc::new(|t: f64| (t * t * t, 0.0))),
            -1.0,
            1.0,
            false,
        );
        assert!(matches!(stall, Err(Error::IrregularCurve { .. })));
    }

    #[test]
    fn open_curve_cannot_be_declared_closed() {
        let r = CurveOnSurface::new(SurfacePatch::cylinder(1.0, 0.0, 0.0), ChartPath::HelixConst { c: 1.0 }, 0.0, 1.0, true);
        assert!(matches!(r, Err(Error::NotClosed)));
    }
}
