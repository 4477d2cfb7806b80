//! SU(2) spin transport along a curve.
//!
//! The lab-frame generator is `dU/ds = (i/2)(σ·b(s)) U` with `b = τ_g t + κ_g N - κ_n B`,
//! so Bloch vectors obey `dm/ds = m × b`. Products are ordered with later
//! arclength on the left.

use rayon::prelude::*;

use crate::curve::CurveOnSurface;
use crate::error::{Error, Result};
use crate::frames::DarbouxSample;
use crate::hamiltonian::beta_from_sample;
use crate::quadrature::simpson_samples;
use crate::scalar::Real;
use crate::su2::{project_su2, su2_exp_vec, Spinor, SU2Operator, C};
use crate::vec3::{Frame, Vec3};

/// How a constant lab-fixed extra field enters the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldCoupling {
    /// Adds to `b` per unit signed arclength, like the geometric field itself.
    #[default]
    Connection,
    /// Accrues per unit travelled distance, independent of traversal direction.
    Zeeman,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldOptions<T> {
    pub extra_field: Option<Vec3<T>>,
    pub coupling: FieldCoupling,
}

impl<T: Real> FieldOptions<T> {
    pub fn none() -> Self {
        Self { extra_field: None, coupling: FieldCoupling::Connection }
    }

    pub fn with_extra(field: Vec3<T>, coupling: FieldCoupling) -> Self {
        Self { extra_field: Some(field), coupling }
    }

    /// Generator per unit signed arclength when travelling with sign `dir` (±1).
    pub fn generator(&self, b_lab: Vec3<T>, dir: T) -> Vec3<T> {
        match (self.extra_field, self.coupling) {
            (None, _) => b_lab,
            (Some(e), FieldCoupling::Connection) => b_lab + e,
            (Some(e), FieldCoupling::Zeeman) => b_lab + e * dir,
        }
    }
}

fn sign_of<T: Real>(x: T) -> T {
    if x < T::zero() {
        -T::one()
    } else {
        T::one()
    }
}

fn b_lab_at<T: Real>(curve: &CurveOnSurface<T>, s: T) -> Result<Vec3<T>> {
    Ok(curve.beta_field(s)?.b_lab)
}

/// Midpoint product over `n` equal segments from `s1` to `s2`.
pub fn path_ordered_propagator<T: Real>(
    curve: &CurveOnSurface<T>,
    s1: T,
    s2: T,
    n: usize,
    opts: &FieldOptions<T>,
) -> Result<SU2Operator<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("segment count must be at least 1".into()));
    }
    if s1 == s2 {
        return Ok(SU2Operator::identity());
    }
    let ds = (s2 - s1) / T::from_usize_exact(n);
    let dir = sign_of(ds);
    let fields: Vec<Vec3<T>> = (0..n)
        .into_par_iter()
        .map(|j| b_lab_at(curve, s1 + ds * (T::from_usize_exact(j) + T::half())))
        .collect::<Result<_>>()?;
    Ok(fields.iter().fold(SU2Operator::identity(), |u, &b| su2_exp_vec(opts.generator(b, dir) * ds) * u))
}

type M8<T> = [T; 8];

fn to_m8<T: Real>(u: &SU2Operator<T>) -> M8<T> {
    let m = u.m;
    [m[0][0].re, m[0][0].im, m[0][1].re, m[0][1].im, m[1][0].re, m[1][0].im, m[1][1].re, m[1][1].im]
}

fn from_m8<T: Real>(x: &M8<T>) -> SU2Operator<T> {
    SU2Operator { m: [[C::new(x[0], x[1]), C::new(x[2], x[3])], [C::new(x[4], x[5]), C::new(x[6], x[7])]] }
}

/// `(i/2)(σ·w) U` in packed form.
fn generator_times<T: Real>(w: Vec3<T>, x: &M8<T>) -> M8<T> {
    let h = T::half();
    let i = C::new(T::zero(), h);
    let a = SU2Operator { m: [[i * w.z, i * C::new(w.x, -w.y)], [i * C::new(w.x, w.y), -(i * w.z)]] };
    to_m8(&(a * from_m8(x)))
}

const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];
const ODE_MAX_STEPS: usize = 2_000_000;

fn integrate_piece<T: Real>(
    curve: &CurveOnSurface<T>,
    a: T,
    b: T,
    tol: T,
    opts: &FieldOptions<T>,
    dir: T,
    mut u: SU2Operator<T>,
) -> Result<SU2Operator<T>> {
    let span = b - a;
    if span == T::zero() {
        return Ok(u);
    }
    let field = |s: T| -> Result<Vec3<T>> { Ok(opts.generator(b_lab_at(curve, s)?, dir)) };
    let mut s = a;
    let mut h = span / T::lit(64.0);
    let mut steps = 0;
    while (b - s) * dir > T::zero() {
        if (h.abs()) > (b - s).abs() {
            h = b - s;
        }
        if h.abs() < T::lit(1e-14) * (T::one() + span.abs()) {
            return Err(Error::ToleranceNotMet { tol: tol.as_f64() });
        }
        let y = to_m8(&u);
        let mut k: [M8<T>; 7] = [[T::zero(); 8]; 7];
        for st in 0..7 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(st) {
                let aij = T::lit(DP_A[st][j]);
                if aij != T::zero() {
                    for q in 0..8 {
                        yi[q] = yi[q] + h * aij * kj[q];
                    }
                }
            }
            k[st] = generator_times(field(s + h * T::lit(DP_C[st]))?, &yi);
        }
        let mut y5 = y;
        let mut err = T::zero();
        for q in 0..8 {
            let mut d5 = T::zero();
            let mut d4 = T::zero();
            for st in 0..7 {
                d5 = d5 + T::lit(DP_B5[st]) * k[st][q];
                d4 = d4 + T::lit(DP_B4[st]) * k[st][q];
            }
            y5[q] = y[q] + h * d5;
            err = err.max((h * (d5 - d4)).abs());
        }
        if err <= tol {
            s = s + h;
            u = project_su2(&from_m8(&y5));
        }
        let factor = if err == T::zero() { T::lit(5.0) } else { T::lit(0.9) * (tol / err).powf(T::lit(0.2)) };
        h = h * factor.max(T::lit(0.2)).min(T::lit(5.0));
        steps += 1;
        if steps > ODE_MAX_STEPS {
            return Err(Error::ToleranceNotMet { tol: tol.as_f64() });
        }
    }
    Ok(u)
}

/// Adaptive Dormand–Prince integration of the propagator with SU(2) re-projection after
/// every accepted step. Closed curves are split at the seam.
pub fn ode_propagator_oracle<T: Real>(
    curve: &CurveOnSurface<T>,
    s1: T,
    s2: T,
    tol: T,
    opts: &FieldOptions<T>,
) -> Result<SU2Operator<T>> {
    if !(tol >= T::lit(1e-12)) {
        return Err(Error::InvalidInput(format!("tolerance {tol} below 1e-12")));
    }
    let dir = sign_of(s2 - s1);
    let mut cuts = vec![s1];
    if curve.closed {
        let l = curve.length();
        let (lo, hi) = if s1 < s2 { (s1, s2) } else { (s2, s1) };
        let mut k = (lo / l).floor() + T::one();
        let mut inner = Vec::new();
        while k * l < hi {
            inner.push(k * l);
            k = k + T::one();
        }
        if dir < T::zero() {
            inner.reverse();
        }
        cuts.extend(inner);
    }
    cuts.push(s2);
    let mut u = SU2Operator::identity();
    for w in cuts.windows(2) {
        u = integrate_piece(curve, w[0], w[1], tol, opts, dir, u)?;
    }
    Ok(u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticSummary<T> {
    /// Total rotation angle `Φ`.
    pub phi_total: T,
    /// `∫κ_g ds`.
    pub phi_n: T,
    /// `-∫κ_n ds`.
    pub phi_q: T,
    /// `∫τ_g ds`.
    pub phi_s: T,
    /// `(φ_s, φ_N, φ_q)/Φ` in Darboux order; zero when `Φ = 0`.
    pub h: Vec3<T>,
}

impl<T: Real> AdiabaticSummary<T> {
    /// The rotation axis expressed in lab axes using the frame at one point.
    pub fn lab_axis(&self, frame: &Frame<T>) -> Vec3<T> {
        frame.compose(self.h)
    }
}

/// Adiabatic propagator `cos(Φ/2) I + i sin(Φ/2) σ·h` in the abstract basis
/// `(σ₁, σ₂, σ₃) ↔ (σ_s, σ_N, σ_q)`.
pub fn adiabatic_propagator<T: Real>(
    curve: &CurveOnSurface<T>,
    s1: T,
    s2: T,
    quad_n: usize,
) -> Result<(SU2Operator<T>, AdiabaticSummary<T>)> {
    if quad_n < 64 {
        return Err(Error::InvalidInput(format!("quad_n = {quad_n} < 64")));
    }
    if s1 == s2 {
        let zero = T::zero();
        return Ok((SU2Operator::identity(), AdiabaticSummary { phi_total: zero, phi_n: zero, phi_q: zero, phi_s: zero, h: Vec3::zero() }));
    }
    let n = quad_n + quad_n % 2;
    let hstep = (s2 - s1) / T::from_usize_exact(n);
    let samples: Vec<DarbouxSample<T>> =
        (0..=n).into_par_iter().map(|i| curve.darboux_sample(s1 + hstep * T::from_usize_exact(i))).collect::<Result<_>>()?;
    let integrate = |f: &dyn Fn(&DarbouxSample<T>) -> T| -> T {
        let vals: Vec<T> = samples.iter().map(f).collect();
        simpson_samples(&vals, hstep)
    };
    let phi_n = integrate(&|d| d.kappa_g);
    let phi_q = integrate(&|d| -d.kappa_n);
    let phi_s = integrate(&|d| d.tau_g);
    let v = Vec3::new(phi_s, phi_n, phi_q);
    let phi_total = v.norm();
    let h = if phi_total > T::zero() { v / phi_total } else { Vec3::zero() };
    let (sn, cs) = (phi_total / T::two()).sin_cos();
    let u = SU2Operator::from_quaternion(cs, sn * h.x, sn * h.y, sn * h.z);
    Ok((u, AdiabaticSummary { phi_total, phi_n, phi_q, phi_s, h }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Forward,
    Reverse,
}

/// Initial spin state of a texture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState<T> {
    Bloch(Vec3<T>),
    Spinor(Spinor<T>),
    /// Along `t`, `N` or `B` (index 0, 1, 2) at the starting point.
    FrameAxis(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextureRecord<T> {
    pub s: T,
    /// Curve parameter at `s`.
    pub phi: T,
    pub position: Vec3<T>,
    pub frame: Frame<T>,
    pub m_lab: Vec3<T>,
    pub m_darboux: Vec3<T>,
    /// `β` in Darboux order.
    pub beta_darboux: Vec3<T>,
    /// Generator per unit signed arclength, lab axes.
    pub field_lab: Vec3<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinTexture<T> {
    pub direction: Direction,
    pub records: Vec<TextureRecord<T>>,
}

/// Cumulative lab-frame propagation sampled at `grid_n + 1` equally spaced points, with
/// `substeps` midpoint factors between neighbouring records.
pub fn evolve_spin_texture<T: Real>(
    curve: &CurveOnSurface<T>,
    initial: InitialState<T>,
    grid_n: usize,
    substeps: usize,
    direction: Direction,
    opts: &FieldOptions<T>,
) -> Result<SpinTexture<T>> {
    if grid_n < 2 {
        return Err(Error::InvalidInput(format!("grid_n = {grid_n} < 2")));
    }
    let substeps = substeps.max(1);
    let l = curve.length();
    let (start, dir) = match direction {
        Direction::Forward => (T::zero(), T::one()),
        Direction::Reverse => (l, -T::one()),
    };
    let step = l / T::from_usize_exact(grid_n) * dir;
    let at = |k: usize| if k == grid_n { start + l * dir } else { start + step * T::from_usize_exact(k) };
    let samples: Vec<DarbouxSample<T>> = (0..=grid_n).into_par_iter().map(|k| curve.darboux_sample(at(k))).collect::<Result<_>>()?;
    let sub = step / T::from_usize_exact(substeps);
    let total = grid_n * substeps;
    let fields: Vec<Vec3<T>> = (0..total)
        .into_par_iter()
        .map(|j| {
            let (k, i) = (j / substeps, j % substeps);
            b_lab_at(curve, at(k) + sub * (T::from_usize_exact(i) + T::half()))
        })
        .collect::<Result<_>>()?;

    let psi0 = match initial {
        InitialState::Bloch(m) => Spinor::from_bloch(m)?,
        InitialState::Spinor(s) => {
            if (s.norm_squared() - T::one()).abs() > T::lit(1e-12) {
                return Err(Error::InvalidInput("initial spinor is not normalized".into()));
            }
            s
        }
        InitialState::FrameAxis(i) => {
            let f = samples[0].frame;
            let axis = match i {
                0 => f.t,
                1 => f.n,
                2 => f.b,
                _ => return Err(Error::InvalidInput(format!("frame axis index {i} out of range"))),
            };
            Spinor::from_bloch(axis)?
        }
    };

    let mut u = SU2Operator::identity();
    let mut records = Vec::with_capacity(grid_n + 1);
    for (k, smp) in samples.iter().enumerate() {
        if k > 0 {
            for b in &fields[(k - 1) * substeps..k * substeps] {
                u = su2_exp_vec(opts.generator(*b, dir) * sub) * u;
            }
        }
        let m_lab = u.apply(&psi0).bloch();
        let beta = beta_from_sample(smp);
        records.push(TextureRecord {
            s: at(k),
            phi: smp.param,
            position: smp.position,
            frame: smp.frame,
            m_lab,
            m_darboux: smp.frame.project(m_lab),
            beta_darboux: beta.beta_darboux,
            field_lab: opts.generator(beta.b_lab, dir),
        });
    }
    Ok(SpinTexture { direction, records })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecessionResidual<T> {
    /// `max ‖dm_lab/ds - m_lab × b‖`.
    pub r1: T,
    /// `max ‖dm_D/ds - 2 β × m_D‖`.
    pub r2: T,
}

/// Largest rotation per record spacing for which the 4th-order difference is trusted.
const MAX_ROTATION_PER_STEP: f64 = 0.05;

/// Compares the texture against the two candidate precession laws with 4th-order
/// central differences on interior records.
pub fn precession_residual<T: Real>(texture: &SpinTexture<T>) -> Result<PrecessionResidual<T>> {
    let r = &texture.records;
    if r.len() < 5 {
        return Err(Error::GridTooCoarse { reason: format!("{} records, need at least 5", r.len()) });
    }
    let h = r[1].s - r[0].s;
    let peak = r.iter().map(|x| x.field_lab.norm()).fold(T::zero(), T::max);
    if peak * h.abs() > T::lit(MAX_ROTATION_PER_STEP) {
        return Err(Error::GridTooCoarse {
            reason: format!("rotation per record {:e} exceeds {MAX_ROTATION_PER_STEP}", (peak * h.abs()).as_f64()),
        });
    }
    let d = |f: &dyn Fn(&TextureRecord<T>) -> Vec3<T>, i: usize| -> Vec3<T> {
        (f(&r[i - 2]) - f(&r[i - 1]) * T::lit(8.0) + f(&r[i + 1]) * T::lit(8.0) - f(&r[i + 2])) / (T::lit(12.0) * h)
    };
    let mut r1 = T::zero();
    let mut r2 = T::zero();
    for i in 2..r.len() - 2 {
        let x = &r[i];
        r1 = r1.max((d(&|y| y.m_lab, i) - x.m_lab.cross(x.field_lab)).norm());
        r2 = r2.max((d(&|y| y.m_darboux, i) - x.beta_darboux.cross(x.m_darboux) * T::two()).norm());
    }
    Ok(PrecessionResidual { r1, r2 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionReport<T> {
    /// `max_φ ‖m_ccw(φ) - m_cw(φ)‖`.
    pub max_deviation: T,
    /// `‖m_ccw(L) - m_ccw(0)‖`.
    pub closure_ccw: T,
    /// `‖m_cw(0) - m_cw(L)‖`.
    pub closure_cw: T,
}

impl<T: Real> DirectionReport<T> {
    pub fn closure(&self) -> T {
        self.closure_ccw.max(self.closure_cw)
    }
}

/// Propagates the same initial lab state forward from `s = 0` and backward from `s = L`.
pub fn direction_independence_check<T: Real>(
    curve: &CurveOnSurface<T>,
    initial: Vec3<T>,
    grid_n: usize,
    substeps: usize,
    opts: &FieldOptions<T>,
) -> Result<DirectionReport<T>> {
    if !curve.closed {
        return Err(Error::NotClosed);
    }
    let (fwd, rev) = rayon::join(
        || evolve_spin_texture(curve, InitialState::Bloch(initial), grid_n, substeps, Direction::Forward, opts),
        || evolve_spin_texture(curve, InitialState::Bloch(initial), grid_n, substeps, Direction::Reverse, opts),
    );
    let (fwd, rev) = (fwd?, rev?);
    let n = grid_n;
    let max_deviation =
        (0..=n).map(|k| (fwd.records[k].m_lab - rev.records[n - k].m_lab).norm()).fold(T::zero(), T::max);
    Ok(DirectionReport {
        max_deviation,
        closure_ccw: (fwd.records[n].m_lab - fwd.records[0].m_lab).norm(),
        closure_cw: (rev.records[n].m_lab - rev.records[0].m_lab).norm(),
    })
}
