//! Parametric host surfaces: chart evaluation, fundamental forms, curvature
//! and chart Christoffel symbols.
//!
//! Curvature follows the Weingarten convention `dN = -S dR`, so with an
//! outward normal a sphere of radius `r` has `M = -1/r` and `K = 1/r²`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Which side of the surface the unit normal points to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// Along `∂u × ∂v` of the catalog chart (outward for cylinders and spheres, `+z` for planes).
    #[default]
    Outward,
    Inward,
}

impl Orientation {
    fn sign<T: Real>(self) -> T {
        match self {
            Orientation::Outward => T::one(),
            Orientation::Inward => -T::one(),
        }
    }
}

/// How chart derivatives are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeMode {
    /// Closed-form derivatives when the chart provides them, finite differences otherwise.
    #[default]
    Analytic,
    FiniteDifference,
}

/// Symmetry axis used by a spherical chart; the chart poles sit on this axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PoleAxis {
    X,
    Y,
    #[default]
    Z,
}

impl PoleAxis {
    /// Right-handed basis `(e1, e2, e3)` with `e3` along the pole.
    fn basis<T: Real>(self) -> [Vec3<T>; 3] {
        let (x, y, z) = (Vec3::e_x(), Vec3::e_y(), Vec3::e_z());
        match self {
            PoleAxis::Z => [x, y, z],
            PoleAxis::Y => [z, x, y],
            PoleAxis::X => [y, z, x],
        }
    }

    /// A different axis, used to escape chart poles.
    pub fn rotated(self) -> Self {
        match self {
            PoleAxis::Z => PoleAxis::X,
            PoleAxis::X => PoleAxis::Y,
            PoleAxis::Y => PoleAxis::Z,
        }
    }
}

/// Rectangle `[u_min, u_max] × [v_min, v_max]` in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain<T> {
    pub u_min: T,
    pub u_max: T,
    pub v_min: T,
    pub v_max: T,
}

impl<T: Real> Domain<T> {
    pub fn contains(&self, u: T, v: T) -> bool {
        u >= self.u_min && u <= self.u_max && v >= self.v_min && v <= self.v_max
    }
}

pub type ChartFn<T> = Arc<dyn Fn(T, T) -> Vec3<T> + Send + Sync>;

/// The chart map of a host surface.
#[derive(Clone)]
pub enum Chart<T> {
    /// `(u, v) ↦ (u, v, 0)`.
    Plane,
    /// Axis parallel to `z` through `(center_x, center_y)`; chart `(φ, z)`.
    Cylinder { radius: T, center_x: T, center_y: T },
    /// Chart `(θ, φ)` with polar angle measured from `pole`.
    Sphere { radius: T, center: Vec3<T>, pole: PoleAxis },
    /// User chart; derivatives by finite differences.
    Custom { map: ChartFn<T>, domain: Domain<T> },
}

impl<T: fmt::Debug> fmt::Debug for Chart<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chart::Plane => write!(f, "Plane"),
            Chart::Cylinder { radius, center_x, center_y } => {
                write!(f, "Cylinder {{ radius: {radius:?}, center: ({center_x:?}, {center_y:?}) }}")
            }
            Chart::Sphere { radius, center, pole } => {
                write!(f, "Sphere {{ radius: {radius:?}, center: {center:?}, pole: {pole:?} }}")
            }
            Chart::Custom { domain, .. } => write!(f, "Custom {{ domain: {domain:?} }}"),
        }
    }
}

/// Position and chart derivatives up to second order at one chart point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartDerivatives<T> {
    pub p: Vec3<T>,
    pub pu: Vec3<T>,
    pub pv: Vec3<T>,
    pub puu: Vec3<T>,
    pub puv: Vec3<T>,
    pub pvv: Vec3<T>,
}

/// Result of [`SurfacePatch::chart_eval`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint<T> {
    pub point: Vec3<T>,
    pub du: Vec3<T>,
    pub dv: Vec3<T>,
    pub normal: Vec3<T>,
}

/// Symmetric 2×2 form stored as `[[a, b], [b, c]]`.
pub type Mat2<T> = [[T; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport<T> {
    pub first_form: Mat2<T>,
    pub second_form: Mat2<T>,
    pub shape_operator: Mat2<T>,
    /// Gaussian curvature.
    pub gaussian: T,
    /// Mean curvature.
    pub mean: T,
}

impl<T: Real> CurvatureReport<T> {
    /// Geometric potential `-(M² - K)` in units `ħ²/2m = 1`.
    pub fn geometric_potential(&self) -> T {
        -(self.mean * self.mean - self.gaussian)
    }

    /// Eigenvalues of the shape operator (principal curvatures), ascending.
    pub fn principal_curvatures(&self) -> (T, T) {
        let s = self.shape_operator;
        let tr = s[0][0] + s[1][1];
        let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
        let disc = (tr * tr / T::lit(4.0) - det).max(T::zero()).sqrt();
        let mid = tr / T::two();
        (mid - disc, mid + disc)
    }
}

/// `Γ[a][b][c]` = Γ^a_{bc}.
pub type Christoffel<T> = [[[T; 2]; 2]; 2];

/// A host surface: chart, normal orientation and derivative policy.
#[derive(Clone, Debug)]
pub struct SurfacePatch<T> {
    pub chart: Chart<T>,
    pub orientation: Orientation,
    pub derivative_mode: DerivativeMode,
}

const DEGENERATE_CROSS: f64 = 1e-12;
const SINGULAR_METRIC: f64 = 1e-14;
const FD_STEP_FIRST: f64 = 1e-5;
const FD_STEP_SECOND: f64 = 1e-4;

impl<T: Real> SurfacePatch<T> {
    pub fn new(chart: Chart<T>) -> Self {
        Self { chart, orientation: Orientation::Outward, derivative_mode: DerivativeMode::Analytic }
    }

    pub fn plane() -> Self {
        Self::new(Chart::Plane)
    }

    pub fn cylinder(radius: T, center_x: T, center_y: T) -> Self {
        Self::new(Chart::Cylinder { radius, center_x, center_y })
    }

    pub fn sphere(radius: T, center: Vec3<T>, pole: PoleAxis) -> Self {
        Self::new(Chart::Sphere { radius, center, pole })
    }

    pub fn custom(map: ChartFn<T>, domain: Domain<T>) -> Self {
        Self::new(Chart::Custom { map, domain })
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn with_derivative_mode(mut self, mode: DerivativeMode) -> Self {
        self.derivative_mode = mode;
        self
    }

    pub fn domain(&self) -> Domain<T> {
        let big = T::lit(1e6);
        let turns = T::lit(8.0) * T::PI();
        match &self.chart {
            Chart::Plane => Domain { u_min: -big, u_max: big, v_min: -big, v_max: big },
            Chart::Cylinder { .. } => Domain { u_min: -turns, u_max: turns, v_min: -big, v_max: big },
            Chart::Sphere { .. } => Domain { u_min: T::zero(), u_max: T::PI(), v_min: -turns, v_max: turns },
            Chart::Custom { domain, .. } => *domain,
        }
    }

    /// Distance-like measure to the nearest coordinate singularity (`sin θ` for spheres).
    pub fn singularity_distance(&self, u: T, _v: T) -> T {
        match &self.chart {
            Chart::Sphere { .. } => u.sin().abs(),
            _ => T::infinity(),
        }
    }

    /// The same surface described by a chart whose singularities lie elsewhere.
    pub fn rotated_chart(&self) -> Option<Self> {
        match &self.chart {
            Chart::Sphere { radius, center, pole } => Some(Self {
                chart: Chart::Sphere { radius: *radius, center: *center, pole: pole.rotated() },
                ..self.clone()
            }),
            _ => None,
        }
    }

    /// Inverse chart for catalog surfaces. Points are assumed to lie on the surface.
    pub fn invert(&self, p: Vec3<T>) -> Option<(T, T)> {
        match &self.chart {
            Chart::Plane => Some((p.x, p.y)),
            Chart::Cylinder { center_x, center_y, .. } => Some(((p.y - *center_y).atan2(p.x - *center_x), p.z)),
            Chart::Sphere { radius, center, pole } => {
                let [e1, e2, e3] = pole.basis::<T>();
                let d = (p - *center) / *radius;
                let c = d.dot(e3).max(-T::one()).min(T::one());
                Some((c.acos(), d.dot(e2).atan2(d.dot(e1))))
            }
            Chart::Custom { .. } => None,
        }
    }

    /// Raw chart map without domain checks.
    pub fn point(&self, u: T, v: T) -> Vec3<T> {
        match &self.chart {
            Chart::Plane => Vec3::new(u, v, T::zero()),
            Chart::Cylinder { radius, center_x, center_y } => {
                let (s, c) = u.sin_cos();
                Vec3::new(*center_x + *radius * c, *center_y + *radius * s, v)
            }
            Chart::Sphere { radius, center, pole } => {
                let [e1, e2, e3] = pole.basis();
                let (st, ct) = u.sin_cos();
                let (sp, cp) = v.sin_cos();
                *center + (e1 * (st * cp) + e2 * (st * sp) + e3 * ct) * *radius
            }
            Chart::Custom { map, .. } => map(u, v),
        }
    }

    fn analytic_derivatives(&self, u: T, v: T) -> Option<ChartDerivatives<T>> {
        let zero = Vec3::zero();
        match &self.chart {
            Chart::Plane => Some(ChartDerivatives {
                p: self.point(u, v),
                pu: Vec3::e_x(),
                pv: Vec3::e_y(),
                puu: zero,
                puv: zero,
                pvv: zero,
            }),
            Chart::Cylinder { radius, .. } => {
                let (s, c) = u.sin_cos();
                let r = *radius;
                Some(ChartDerivatives {
                    p: self.point(u, v),
                    pu: Vec3::new(-r * s, r * c, T::zero()),
                    pv: Vec3::e_z(),
                    puu: Vec3::new(-r * c, -r * s, T::zero()),
                    puv: zero,
                    pvv: zero,
                })
            }
            Chart::Sphere { radius, center, pole } => {
                let [e1, e2, e3] = pole.basis();
                let r = *radius;
                let (st, ct) = u.sin_cos();
                let (sp, cp) = v.sin_cos();
                let radial = e1 * (st * cp) + e2 * (st * sp) + e3 * ct;
                Some(ChartDerivatives {
                    p: *center + radial * r,
                    pu: (e1 * (ct * cp) + e2 * (ct * sp) - e3 * st) * r,
                    pv: (e1 * (-st * sp) + e2 * (st * cp)) * r,
                    puu: -radial * r,
                    puv: (e1 * (-ct * sp) + e2 * (ct * cp)) * r,
                    pvv: (e1 * (-st * cp) + e2 * (-st * sp)) * r,
                })
            }
            Chart::Custom { .. } => None,
        }
    }

    /// Central differences with one Richardson level.
    fn fd_derivatives(&self, u: T, v: T) -> ChartDerivatives<T> {
        let f = |a: T, b: T| self.point(a, b);
        let four = T::lit(4.0);
        let three = T::lit(3.0);
        let rich = |coarse: Vec3<T>, fine: Vec3<T>| (fine * four - coarse) / three;

        let first = |h: T| {
            let du = (f(u + h, v) - f(u - h, v)) / (T::two() * h);
            let dv = (f(u, v + h) - f(u, v - h)) / (T::two() * h);
            (du, dv)
        };
        let h1 = T::lit(FD_STEP_FIRST);
        let (du_c, dv_c) = first(h1);
        let (du_f, dv_f) = first(h1 / T::two());

        let p = f(u, v);
        let second = |h: T| {
            let h2 = h * h;
            let uu = (f(u + h, v) - p * T::two() + f(u - h, v)) / h2;
            let vv = (f(u, v + h) - p * T::two() + f(u, v - h)) / h2;
            let uv = (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (four * h2);
            (uu, uv, vv)
        };
        let h2 = T::lit(FD_STEP_SECOND);
        let (uu_c, uv_c, vv_c) = second(h2);
        let (uu_f, uv_f, vv_f) = second(h2 / T::two());

        ChartDerivatives {
            p,
            pu: rich(du_c, du_f),
            pv: rich(dv_c, dv_f),
            puu: rich(uu_c, uu_f),
            puv: rich(uv_c, uv_f),
            pvv: rich(vv_c, vv_f),
        }
    }

    /// Chart derivatives under the configured [`DerivativeMode`], without domain checks.
    pub fn derivatives_unchecked(&self, u: T, v: T) -> ChartDerivatives<T> {
        match self.derivative_mode {
            DerivativeMode::Analytic => self.analytic_derivatives(u, v).unwrap_or_else(|| self.fd_derivatives(u, v)),
            DerivativeMode::FiniteDifference => self.fd_derivatives(u, v),
        }
    }

    fn check_domain(&self, u: T, v: T) -> Result<()> {
        if self.domain().contains(u, v) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { u: u.as_f64(), v: v.as_f64() })
        }
    }

    pub fn derivatives(&self, u: T, v: T) -> Result<ChartDerivatives<T>> {
        self.check_domain(u, v)?;
        Ok(self.derivatives_unchecked(u, v))
    }

    /// Oriented unit normal from precomputed derivatives.
    pub fn normal_from(&self, d: &ChartDerivatives<T>, u: T, v: T) -> Result<Vec3<T>> {
        let c = d.pu.cross(d.pv);
        let n = c.norm();
        if n < T::lit(DEGENERATE_CROSS) {
            return Err(Error::DegenerateChart { u: u.as_f64(), v: v.as_f64(), cross_norm: n.as_f64() });
        }
        Ok(c * (self.orientation.sign::<T>() / n))
    }

    pub fn chart_eval(&self, u: T, v: T) -> Result<ChartPoint<T>> {
        let d = self.derivatives(u, v)?;
        let normal = self.normal_from(&d, u, v)?;
        Ok(ChartPoint { point: d.p, du: d.pu, dv: d.pv, normal })
    }

    /// First and second fundamental forms from precomputed derivatives.
    pub fn forms_from(&self, d: &ChartDerivatives<T>, normal: Vec3<T>) -> (Mat2<T>, Mat2<T>) {
        let e = d.pu.dot(d.pu);
        let f = d.pu.dot(d.pv);
        let g = d.pv.dot(d.pv);
        let l = d.puu.dot(normal);
        let m = d.puv.dot(normal);
        let n = d.pvv.dot(normal);
        ([[e, f], [f, g]], [[l, m], [m, n]])
    }

    pub fn curvature_report(&self, u: T, v: T) -> Result<CurvatureReport<T>> {
        let d = self.derivatives(u, v)?;
        let normal = self.normal_from(&d, u, v)?;
        let (first, second) = self.forms_from(&d, normal);
        let inv = inverse(first).ok_or(Error::SingularMetric { u: u.as_f64(), v: v.as_f64(), det: det(first).as_f64() })?;
        let shape = matmul(inv, second);
        let gaussian = det(shape);
        let mean = (shape[0][0] + shape[1][1]) / T::two();
        Ok(CurvatureReport { first_form: first, second_form: second, shape_operator: shape, gaussian, mean })
    }

    /// `Γ^a_{bc} = g^{ad} (∂_b∂_c R · ∂_d R)`.
    pub fn christoffel_symbols(&self, u: T, v: T) -> Result<Christoffel<T>> {
        let d = self.derivatives(u, v)?;
        Ok(christoffel_from(&d).ok_or_else(|| {
            let g = [[d.pu.dot(d.pu), d.pu.dot(d.pv)], [d.pu.dot(d.pv), d.pv.dot(d.pv)]];
            Error::SingularMetric { u: u.as_f64(), v: v.as_f64(), det: det(g).as_f64() }
        })?)
    }
}

pub(crate) fn christoffel_from<T: Real>(d: &ChartDerivatives<T>) -> Option<Christoffel<T>> {
    let g = [[d.pu.dot(d.pu), d.pu.dot(d.pv)], [d.pu.dot(d.pv), d.pv.dot(d.pv)]];
    let ginv = inverse(g)?;
    let second = [[d.puu, d.puv], [d.puv, d.pvv]];
    let tangents = [d.pu, d.pv];
    let mut out = [[[T::zero(); 2]; 2]; 2];
    for (a, out_a) in out.iter_mut().enumerate() {
        for b in 0..2 {
            for c in 0..2 {
                out_a[b][c] = (0..2).map(|k| ginv[a][k] * second[b][c].dot(tangents[k])).fold(T::zero(), |x, y| x + y);
            }
        }
    }
    Some(out)
}

pub fn det<T: Real>(m: Mat2<T>) -> T {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Inverse of a 2×2 matrix, `None` when `det < 1e-14` in magnitude.
pub fn inverse<T: Real>(m: Mat2<T>) -> Option<Mat2<T>> {
    let d = det(m);
    if d.abs() < T::lit(SINGULAR_METRIC) {
        return None;
    }
    Some([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
}

pub fn matmul<T: Real>(a: Mat2<T>, b: Mat2<T>) -> Mat2<T> {
    let mut out = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}
