//! Boundary rotation angle, Gauss–Bonnet closure and pseudo-magnetic flux.
//!
//! A region is a set of chart cells selected by winding number against a
//! closed chart polygon; the cells whose winding number equals that of an
//! interior seed are integrated.

use rayon::prelude::*;

use crate::curve::CurveOnSurface;
use crate::error::{Error, Result};
use crate::quadrature::simpson_samples;
use crate::scalar::{pairwise_sum, Real};
use crate::surface::{det, Domain, SurfacePatch};

/// Reduced Planck constant, J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE_SI: f64 = 1.602_176_634e-19;
/// Default number of cells per chart axis.
pub const DEFAULT_GRID: usize = 2048;
const MAX_BOUNDARY_FRACTION: f64 = 0.01;

/// `∮κ_g ds` by composite Simpson over the arclength of a closed curve.
pub fn boundary_rotation_angle<T: Real>(curve: &CurveOnSurface<T>, quad_n: usize) -> Result<T> {
    if !curve.closed {
        return Err(Error::NotClosed);
    }
    if quad_n < 128 {
        return Err(Error::InvalidInput(format!("quad_n = {quad_n} < 128")));
    }
    let n = quad_n + quad_n % 2;
    let l = curve.length();
    let h = l / T::from_usize_exact(n);
    let kg: Vec<T> = (0..=n)
        .into_par_iter()
        .map(|i| curve.darboux_sample(if i == n { l } else { h * T::from_usize_exact(i) }).map(|d| d.kappa_g))
        .collect::<Result<_>>()?;
    Ok(simpson_samples(&kg, h))
}

/// How the chart image of a curve is closed into a polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChartClosure {
    /// Straight chart segment from the last point back to the first.
    #[default]
    Straight,
    /// Through the `u = u_min` edge of the chart domain (sphere caps around the chart pole).
    ViaUMin,
    /// Through the `u = u_max` edge of the chart domain.
    ViaUMax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region<T> {
    /// Closed chart polygon; `None` selects every cell of `bounds`.
    pub polygon: Option<Vec<(T, T)>>,
    /// Rectangle scanned by the grid.
    pub bounds: Domain<T>,
    /// Cells with the seed's winding number are included.
    pub seed: (T, T),
}

impl<T: Real> Region<T> {
    pub fn full(bounds: Domain<T>) -> Self {
        let seed = ((bounds.u_min + bounds.u_max) / T::two(), (bounds.v_min + bounds.v_max) / T::two());
        Self { polygon: None, bounds, seed }
    }

    /// Polygon from `n_vertices` samples of the curve's chart image plus the closure path;
    /// the bounds are the polygon's bounding box.
    pub fn from_curve(curve: &CurveOnSurface<T>, n_vertices: usize, closure: ChartClosure, seed: (T, T)) -> Result<Self> {
        if n_vertices < 16 {
            return Err(Error::InvalidInput(format!("n_vertices = {n_vertices} < 16")));
        }
        let span = curve.t1 - curve.t0;
        let mut poly: Vec<(T, T)> = (0..=n_vertices)
            .map(|i| curve.chart_point(curve.t0 + span * T::from_usize_exact(i) / T::from_usize_exact(n_vertices)))
            .collect();
        let (first, last) = (poly[0], poly[n_vertices]);
        let dom = curve.surface.domain();
        match closure {
            ChartClosure::Straight => {}
            ChartClosure::ViaUMin => poly.extend([(dom.u_min, last.1), (dom.u_min, first.1)]),
            ChartClosure::ViaUMax => poly.extend([(dom.u_max, last.1), (dom.u_max, first.1)]),
        }
        let bounds = bounding_box(&poly);
        Ok(Self { polygon: Some(poly), bounds, seed })
    }

    /// Winding number of `p` against the polygon; `1` everywhere without one.
    pub fn winding(&self, p: (T, T)) -> i32 {
        Scan::new(self, p.1).winding(p.0)
    }
}

fn bounding_box<T: Real>(poly: &[(T, T)]) -> Domain<T> {
    let init = Domain { u_min: T::infinity(), u_max: T::neg_infinity(), v_min: T::infinity(), v_max: T::neg_infinity() };
    poly.iter().fold(init, |d, &(u, v)| Domain {
        u_min: d.u_min.min(u),
        u_max: d.u_max.max(u),
        v_min: d.v_min.min(v),
        v_max: d.v_max.max(v),
    })
}

fn edges<T: Real>(poly: &[(T, T)]) -> impl Iterator<Item = ((T, T), (T, T))> + '_ {
    (0..poly.len()).map(move |i| (poly[i], poly[(i + 1) % poly.len()]))
}

/// Crossing of edge `a → b` with the horizontal line `v = y`: `(u, ±1)` for upward/downward edges.
fn crossing<T: Real>(a: (T, T), b: (T, T), y: T) -> Option<(T, i32)> {
    let up = a.1 <= y && b.1 > y;
    let down = b.1 <= y && a.1 > y;
    if !(up || down) {
        return None;
    }
    let x = a.0 + (y - a.1) * (b.0 - a.0) / (b.1 - a.1);
    Some((x, if up { 1 } else { -1 }))
}

/// Sorted crossings of the polygon with one horizontal line.
struct Scan<T> {
    xs: Vec<T>,
    /// `suffix[k]` is the summed sign of crossings `k..`.
    suffix: Vec<i32>,
    full: bool,
}

impl<T: Real> Scan<T> {
    fn new(region: &Region<T>, y: T) -> Self {
        let Some(poly) = &region.polygon else {
            return Self { xs: Vec::new(), suffix: vec![0], full: true };
        };
        let mut cross: Vec<(T, i32)> = edges(poly).filter_map(|(a, c)| crossing(a, c, y)).collect();
        cross.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite crossing"));
        let mut suffix = vec![0; cross.len() + 1];
        for k in (0..cross.len()).rev() {
            suffix[k] = suffix[k + 1] + cross[k].1;
        }
        Self { xs: cross.into_iter().map(|c| c.0).collect(), suffix, full: false }
    }

    fn winding(&self, x: T) -> i32 {
        if self.full {
            return 1;
        }
        self.suffix[self.xs.partition_point(|&c| c <= x)]
    }
}

/// Sutherland–Hodgman clip of a closed polygon against one half-plane `side(p) >= 0`.
fn clip_half<T: Real>(poly: &[(T, T)], side: impl Fn((T, T)) -> T) -> Vec<(T, T)> {
    let mut out = Vec::with_capacity(poly.len());
    for (a, b) in edges(poly) {
        let (sa, sb) = (side(a), side(b));
        if sa >= T::zero() {
            out.push(a);
        }
        if (sa >= T::zero()) != (sb >= T::zero()) {
            let t = sa / (sa - sb);
            out.push((a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t));
        }
    }
    out
}

/// Drops interior points of runs lying on one of the lines `v = lo`, `v = hi`; such runs
/// contribute only through their end points to the signed area.
fn merge_runs<T: Real>(poly: Vec<(T, T)>, lo: T, hi: T) -> Vec<(T, T)> {
    let on = |p: (T, T)| p.1 == lo || p.1 == hi;
    let n = poly.len();
    (0..n)
        .filter(|&i| {
            let (prev, cur, next) = (poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]);
            !(n > 3 && on(cur) && prev.1 == cur.1 && next.1 == cur.1)
        })
        .map(|i| poly[i])
        .collect()
}

fn signed_area<T: Real>(poly: &[(T, T)]) -> T {
    edges(poly).fold(T::zero(), |acc, (a, b)| acc + a.0 * b.1 - b.0 * a.1) / T::two()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionIntegral<T> {
    pub value: T,
    pub cells_inside: usize,
    pub cells_boundary: usize,
}

/// `∬ K √g du dv` over the region; see [`region_integral`].
pub fn region_curvature_integral<T: Real>(surface: &SurfacePatch<T>, region: &Region<T>, grid: usize) -> Result<RegionIntegral<T>> {
    region_integral(region, grid, |u, v| {
        let rep = surface.curvature_report(u, v)?;
        Ok(rep.gaussian * det(rep.first_form).max(T::zero()).sqrt())
    })
}

/// `∬ f du dv` over the region by midpoint quadrature on a `grid × grid` cell lattice.
/// Cells crossed by the boundary are weighted by the exact fraction of the cell the
/// polygon covers with the selected winding number.
pub fn region_integral<T: Real>(
    region: &Region<T>,
    grid: usize,
    density: impl Fn(T, T) -> Result<T> + Sync,
) -> Result<RegionIntegral<T>> {
    if grid < 256 {
        return Err(Error::InvalidInput(format!("grid = {grid} < 256")));
    }
    let b = region.bounds;
    let du = (b.u_max - b.u_min) / T::from_usize_exact(grid);
    let dv = (b.v_max - b.v_min) / T::from_usize_exact(grid);
    if !(du > T::zero() && dv > T::zero()) {
        return Err(Error::InvalidInput("region bounds are empty".into()));
    }
    let target = region.winding(region.seed);
    if region.polygon.is_some() && (target == 0 || !b.contains(region.seed.0, region.seed.1)) {
        return Err(Error::InvalidInput(format!(
            "seed ({}, {}) is not enclosed by the region polygon",
            region.seed.0, region.seed.1
        )));
    }
    let at = |i: usize, step: T, lo: T| lo + step * (T::from_usize_exact(i) + T::half());

    // Centre classification and cells holding a crossing of their centre line.
    let rows: Vec<(Vec<bool>, Vec<bool>)> = (0..grid)
        .into_par_iter()
        .map(|j| {
            let scan = Scan::new(region, at(j, dv, b.v_min));
            let inside = (0..grid).map(|i| scan.winding(at(i, du, b.u_min)) == target).collect();
            let mut crossed = vec![false; grid];
            for &x in &scan.xs {
                let k = ((x - b.u_min) / du).floor();
                if k >= T::zero() && k < T::from_usize_exact(grid) {
                    crossed[k.to_usize().unwrap_or(0)] = true;
                }
            }
            (inside, crossed)
        })
        .collect();
    let is_boundary = |i: usize, j: usize| {
        let c = rows[j].0[i];
        let near = |a: usize, n: usize| a.saturating_sub(1)..=(a + 1).min(n - 1);
        let rim = i == 0 || j == 0 || i + 1 == grid || j + 1 == grid;
        rows[j].1[i] || (rim && c) || near(j, grid).any(|jj| near(i, grid).any(|ii| rows[jj].0[ii] != c))
    };
    let cell_area = du * dv;
    let tgt = T::lit(target as f64);

    let sums: Vec<(T, usize, usize)> = (0..grid)
        .into_par_iter()
        .map(|j| -> Result<(T, usize, usize)> {
            let v = at(j, dv, b.v_min);
            let flags: Vec<bool> = (0..grid).map(|i| is_boundary(i, j)).collect();
            let band = match (&region.polygon, flags.iter().any(|&f| f)) {
                (Some(poly), true) => {
                    let lo = b.v_min + dv * T::from_usize_exact(j);
                    let hi = lo + dv;
                    let clipped = clip_half(&clip_half(poly, |p| p.1 - lo), |p| hi - p.1);
                    merge_runs(clipped, lo, hi)
                }
                _ => Vec::new(),
            };
            let mut vals = Vec::new();
            let (mut inside, mut edge) = (0, 0);
            for i in 0..grid {
                let u = at(i, du, b.u_min);
                let weight = if flags[i] && !band.is_empty() {
                    let lo = b.u_min + du * T::from_usize_exact(i);
                    let hi = lo + du;
                    let cell = clip_half(&clip_half(&band, |p| p.0 - lo), |p| hi - p.0);
                    let w = (signed_area(&cell) / (tgt * cell_area)).max(T::zero()).min(T::one());
                    if w > T::lit(1e-12) && w < T::one() - T::lit(1e-12) {
                        edge += 1;
                    }
                    w
                } else if rows[j].0[i] {
                    T::one()
                } else {
                    T::zero()
                };
                if weight > T::zero() {
                    inside += 1;
                    vals.push(weight * density(u, v)?);
                }
            }
            Ok((pairwise_sum(&vals), inside, edge))
        })
        .collect::<Result<_>>()?;
    let row_sums: Vec<T> = sums.iter().map(|r| r.0).collect();
    let cells_inside = sums.iter().map(|r| r.1).sum::<usize>();
    let cells_boundary = sums.iter().map(|r| r.2).sum::<usize>();
    if cells_inside == 0 {
        return Err(Error::RegionNotResolved { fraction: 1.0 });
    }
    let fraction = cells_boundary as f64 / cells_inside as f64;
    if fraction > MAX_BOUNDARY_FRACTION {
        return Err(Error::RegionNotResolved { fraction });
    }
    Ok(RegionIntegral { value: pairwise_sum(&row_sums) * du * dv, cells_inside, cells_boundary })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxReport<T> {
    /// `∮κ_g ds` along the smooth part of the curve.
    pub phi_n: T,
    /// Tangent turning at the seam of a curve with a corner there (zero for smooth loops).
    pub corner_turning: T,
    pub area_integral_k: T,
    pub euler_chi: i32,
    /// `+1` when the region lies on the `B` side of the curve, `-1` otherwise.
    pub orientation: i32,
    /// `orientation·(φ_N + corner) + ∬K - 2πχ`.
    pub gb_residual: T,
    /// `∬K / 2π`.
    pub flux_over_phi0: T,
    /// The same flux from `ℬ = ħK/2e` and `Φ₀ = h/2e` in SI units.
    pub flux_si_over_phi0: T,
    /// `χ - orientation·(φ_N + corner)/2π`.
    pub flux_gauss_bonnet: T,
    pub cells_inside: usize,
    pub cells_boundary: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxOptions {
    pub quad_n: usize,
    pub grid: usize,
}

impl Default for FluxOptions {
    fn default() -> Self {
        Self { quad_n: 4096, grid: DEFAULT_GRID }
    }
}

/// Which side of the curve the region lies on, probed a short chart step along `±B`.
fn region_side<T: Real>(curve: &CurveOnSurface<T>, region: &Region<T>) -> Result<i32> {
    let target = region.winding(region.seed);
    let b = region.bounds;
    let eps = T::lit(1e-3) * ((b.u_max - b.u_min).max(b.v_max - b.v_min));
    let mut votes = 0;
    for frac in [0.2, 0.4, 0.6, 0.8] {
        let s = curve.length() * T::lit(frac);
        let smp = curve.darboux_sample(s)?;
        let (u, v) = curve.chart_point(smp.param);
        let d = curve.surface.derivatives(u, v)?;
        let g = [[d.pu.dot(d.pu), d.pu.dot(d.pv)], [d.pu.dot(d.pv), d.pv.dot(d.pv)]];
        let gi = crate::surface::inverse(g).ok_or(Error::SingularMetric { u: u.as_f64(), v: v.as_f64(), det: det(g).as_f64() })?;
        let r = [smp.frame.b.dot(d.pu), smp.frame.b.dot(d.pv)];
        let c = (gi[0][0] * r[0] + gi[0][1] * r[1], gi[1][0] * r[0] + gi[1][1] * r[1]);
        let n = (c.0 * c.0 + c.1 * c.1).sqrt();
        let step = (c.0 / n * eps, c.1 / n * eps);
        let plus = region.winding((u + step.0, v + step.1)) == target;
        let minus = region.winding((u - step.0, v - step.1)) == target;
        votes += match (plus, minus) {
            (true, false) => 1,
            (false, true) => -1,
            _ => 0,
        };
    }
    match votes {
        v if v > 0 => Ok(1),
        v if v < 0 => Ok(-1),
        _ => Err(Error::OrientationMismatch),
    }
}

pub fn gauss_bonnet_and_flux<T: Real>(
    curve: &CurveOnSurface<T>,
    region: &Region<T>,
    euler_chi: i32,
    opts: FluxOptions,
) -> Result<FluxReport<T>> {
    let phi_n = boundary_rotation_angle(curve, opts.quad_n)?;
    let corner_turning = curve.seam_turning_angle()?;
    let integral = region_curvature_integral(&curve.surface, region, opts.grid)?;
    let orientation = region_side(curve, region)?;
    let two_pi = T::two() * T::PI();
    let sign = if orientation > 0 { T::one() } else { -T::one() };
    let chi = T::lit(euler_chi as f64);
    let boundary = sign * (phi_n + corner_turning);
    let k = integral.value;
    let hbar = T::lit(HBAR_SI);
    let e = T::lit(ELEMENTARY_CHARGE_SI);
    let flux_si = hbar / (T::two() * e) * k;
    let phi0 = two_pi * hbar / (T::two() * e);
    Ok(FluxReport {
        phi_n,
        corner_turning,
        area_integral_k: k,
        euler_chi,
        orientation,
        gb_residual: boundary + k - two_pi * chi,
        flux_over_phi0: k / two_pi,
        flux_si_over_phi0: flux_si / phi0,
        flux_gauss_bonnet: chi - boundary / two_pi,
        cells_inside: integral.cells_inside,
        cells_boundary: integral.cells_boundary,
    })
}
