//! Catalog of host surfaces and channel curves used by the worked examples.

use std::fmt;
use std::str::FromStr;

use crate::curve::{ChartPath, CurveOnSurface};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::surface::{PoleAxis, SurfacePatch};
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveId {
    HelixConst,
    HelixExp,
    HelixLog,
    VivianiOnCylinder,
    VivianiOnSphere,
    LatitudeCircle,
    PlanarCircle,
    StraightLine,
}

impl CurveId {
    pub const ALL: [CurveId; 8] = [
        CurveId::HelixConst,
        CurveId::HelixExp,
        CurveId::HelixLog,
        CurveId::VivianiOnCylinder,
        CurveId::VivianiOnSphere,
        CurveId::LatitudeCircle,
        CurveId::PlanarCircle,
        CurveId::StraightLine,
    ];

    /// Curves with printed closed-form references.
    pub const REFERENCED: [CurveId; 5] =
        [CurveId::HelixConst, CurveId::HelixExp, CurveId::HelixLog, CurveId::VivianiOnCylinder, CurveId::VivianiOnSphere];

    pub fn as_str(self) -> &'static str {
        match self {
            CurveId::HelixConst => "helix_const",
            CurveId::HelixExp => "helix_exp",
            CurveId::HelixLog => "helix_log",
            CurveId::VivianiOnCylinder => "viviani_on_cylinder",
            CurveId::VivianiOnSphere => "viviani_on_sphere",
            CurveId::LatitudeCircle => "latitude_circle",
            CurveId::PlanarCircle => "planar_circle",
            CurveId::StraightLine => "straight_line",
        }
    }

    /// Short label used in reports (`C1`…`C3` for the helices).
    pub fn label(self) -> &'static str {
        match self {
            CurveId::HelixConst => "C1",
            CurveId::HelixExp => "C2",
            CurveId::HelixLog => "C3",
            CurveId::VivianiOnCylinder => "viviani-cylinder",
            CurveId::VivianiOnSphere => "viviani-sphere",
            CurveId::LatitudeCircle => "latitude",
            CurveId::PlanarCircle => "planar-circle",
            CurveId::StraightLine => "line",
        }
    }
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CurveId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CurveId::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| Error::UnknownCurve(s.to_string()))
    }
}

/// Catalog parameters; defaults `c = ρ = 1`, `f = 5`, `r = 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveParams<T> {
    pub rho: T,
    pub c: T,
    pub f: T,
    /// Sphere radius (latitude circles); Viviani's sphere radius is always `2ρ`.
    pub r: T,
    /// Polar angle of a latitude circle.
    pub alpha: T,
    /// Straight-line length.
    pub length: T,
    /// Optional parameter range override `(t0, t1)`.
    pub range: Option<(T, T)>,
}

impl<T: Real> Default for CurveParams<T> {
    fn default() -> Self {
        Self {
            rho: T::one(),
            c: T::one(),
            f: T::lit(5.0),
            r: T::two(),
            alpha: T::PI() / T::lit(3.0),
            length: T::one(),
            range: None,
        }
    }
}

/// Builds a catalog curve together with its host surface.
pub fn build_curve<T: Real>(id: CurveId, p: &CurveParams<T>) -> Result<CurveOnSurface<T>> {
    let two_pi = T::two() * T::PI();
    let positive = |name: &str, x: T| {
        if x > T::zero() && x.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("{name} must be positive, got {x}")))
        }
    };
    let (surface, path, default_range, closed) = match id {
        CurveId::HelixConst | CurveId::HelixExp | CurveId::HelixLog => {
            positive("rho", p.rho)?;
            if id != CurveId::HelixConst {
                positive("f", p.f)?;
            }
            let path = match id {
                CurveId::HelixConst => ChartPath::HelixConst { c: p.c },
                CurveId::HelixExp => ChartPath::HelixExp { c: p.c, f: p.f },
                _ => ChartPath::HelixLog { c: p.c, f: p.f },
            };
            (SurfacePatch::cylinder(p.rho, T::zero(), T::zero()), path, (T::zero(), two_pi), false)
        }
        CurveId::VivianiOnCylinder => {
            positive("rho", p.rho)?;
            (SurfacePatch::cylinder(p.rho, p.rho, T::zero()), ChartPath::VivianiCylinder { rho: p.rho }, (T::zero(), two_pi), true)
        }
        CurveId::VivianiOnSphere => {
            positive("rho", p.rho)?;
            (
                SurfacePatch::sphere(T::two() * p.rho, Vec3::zero(), PoleAxis::Y),
                ChartPath::VivianiSphere,
                (T::zero(), two_pi),
                true,
            )
        }
        CurveId::LatitudeCircle => {
            positive("r", p.r)?;
            if !(p.alpha > T::zero() && p.alpha < T::PI()) {
                return Err(Error::InvalidInput(format!("alpha must lie in (0, π), got {}", p.alpha)));
            }
            (SurfacePatch::sphere(p.r, Vec3::zero(), PoleAxis::Z), ChartPath::Latitude { alpha: p.alpha }, (T::zero(), two_pi), true)
        }
        CurveId::PlanarCircle => {
            positive("rho", p.rho)?;
            (SurfacePatch::plane(), ChartPath::PlanarCircle { radius: p.rho }, (T::zero(), two_pi), true)
        }
        CurveId::StraightLine => {
            positive("length", p.length)?;
            (
                SurfacePatch::plane(),
                ChartPath::Line { origin: (T::zero(), T::zero()), direction: (T::one(), T::zero()) },
                (T::zero(), p.length),
                false,
            )
        }
    };
    let (t0, t1) = p.range.unwrap_or(default_range);
    let closed = closed && p.range.is_none();
    CurveOnSurface::new(surface, path, t0, t1, closed)
}

pub fn default_curve<T: Real>(id: CurveId) -> Result<CurveOnSurface<T>> {
    build_curve(id, &CurveParams::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ids_roundtrip_through_strings() {
        for id in CurveId::ALL {
            assert_eq!(id.as_str().parse::<CurveId>().unwrap(), id);
        }
        assert!(matches!("trefoil".parse::<CurveId>(), Err(Error::UnknownCurve(_))));
    }

    #[test]
    fn viviani_embeddings_agree_on_both_hosts() {
        let cyl = default_curve::<f64>(CurveId::VivianiOnCylinder).unwrap();
        let sph = default_curve::<f64>(CurveId::VivianiOnSphere).unwrap();
        for i in 0..=32 {
            let phi = 2.0 * PI * i as f64 / 32.0;
            let expect = Vec3::new(1.0 + phi.cos(), phi.sin(), 2.0 * (phi / 2.0).sin());
            assert!((cyl.position(phi).unwrap() - expect).norm() < 1e-12);
            assert!((sph.position(phi).unwrap() - expect).norm() < 1e-12, "phi={phi}");
        }
    }

    #[test]
    fn viviani_speed_at_start() {
        let c = default_curve::<f64>(CurveId::VivianiOnCylinder).unwrap();
        assert!((c.speed(0.0).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        let s = default_curve::<f64>(CurveId::VivianiOnSphere).unwrap();
        assert!((s.speed(0.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters_rejected() {
        let p = CurveParams { alpha: 0.0, ..CurveParams::<f64>::default() };
        assert!(build_curve(CurveId::LatitudeCircle, &p).is_err());
        let p = CurveParams { rho: -1.0, ..CurveParams::<f64>::default() };
        assert!(build_curve(CurveId::HelixConst, &p).is_err());
    }
}
