//! Spinors and SU(2) operators.

use std::ops::Mul;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

pub type C<T> = Complex<T>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor<T> {
    pub a: C<T>,
    pub b: C<T>,
}

impl<T: Real> Spinor<T> {
    pub fn new(a: C<T>, b: C<T>) -> Self {
        Self { a, b }
    }

    pub fn up() -> Self {
        Self { a: C::new(T::one(), T::zero()), b: C::new(T::zero(), T::zero()) }
    }

    pub fn norm_squared(&self) -> T {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn normalize(self) -> Self {
        let n = self.norm_squared().sqrt();
        Self { a: self.a / n, b: self.b / n }
    }

    /// Spin-up state along the unit Bloch vector `m`, with the first nonzero
    /// amplitude real and positive.
    pub fn from_bloch(m: Vec3<T>) -> Result<Self> {
        let n = m.norm();
        if !(n > T::zero()) {
            return Err(Error::InvalidInput("Bloch vector must be nonzero".into()));
        }
        let m = m / n;
        let half_theta = m.z.max(-T::one()).min(T::one()).acos() / T::two();
        let phi = m.y.atan2(m.x);
        let a = half_theta.cos();
        let s = half_theta.sin();
        if a > T::lit(1e-15) {
            Ok(Self { a: C::new(a, T::zero()), b: C::from_polar(s, phi) })
        } else {
            Ok(Self { a: C::new(T::zero(), T::zero()), b: C::new(T::one(), T::zero()) })
        }
    }

    /// `⟨σ⟩`.
    pub fn bloch(&self) -> Vec3<T> {
        let ab = self.a.conj() * self.b;
        Vec3::new(T::two() * ab.re, T::two() * ab.im, self.a.norm_sqr() - self.b.norm_sqr())
    }
}

/// 2×2 complex matrix intended to lie in SU(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SU2Operator<T> {
    pub m: [[C<T>; 2]; 2],
}

fn c<T: Real>(re: T, im: T) -> C<T> {
    C::new(re, im)
}

impl<T: Real> SU2Operator<T> {
    pub fn identity() -> Self {
        let (o, z) = (c(T::one(), T::zero()), c(T::zero(), T::zero()));
        Self { m: [[o, z], [z, o]] }
    }

    /// `α I + i (x σ_x + y σ_y + z σ_z)` with real `α`.
    pub fn from_quaternion(w: T, x: T, y: T, z: T) -> Self {
        Self { m: [[c(w, z), c(y, x)], [c(-y, x), c(w, -z)]] }
    }

    pub fn neg(&self) -> Self {
        Self { m: self.m.map(|r| r.map(|x| -x)) }
    }

    pub fn adjoint(&self) -> Self {
        let m = self.m;
        Self { m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]] }
    }

    pub fn trace(&self) -> C<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> C<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply(&self, s: &Spinor<T>) -> Spinor<T> {
        Spinor { a: self.m[0][0] * s.a + self.m[0][1] * s.b, b: self.m[1][0] * s.a + self.m[1][1] * s.b }
    }

    pub fn sub(&self, o: &Self) -> [[C<T>; 2]; 2] {
        let mut d = self.m;
        for i in 0..2 {
            for j in 0..2 {
                d[i][j] = d[i][j] - o.m[i][j];
            }
        }
        d
    }

    /// Largest entry of `U†U - I` together with `|det U - 1|`.
    pub fn unitarity_defect(&self) -> T {
        let p = self.adjoint() * *self;
        let d = p.sub(&Self::identity());
        let gram = d.iter().flatten().map(|x| x.norm()).fold(T::zero(), T::max);
        gram.max((self.det() - c(T::one(), T::zero())).norm())
    }

    /// Spectral-norm distance `‖self - other‖₂`.
    pub fn distance(&self, other: &Self) -> T {
        operator_norm(self.sub(other))
    }

    /// `(w, x, y, z)` such that `U = w I + i (x σ_x + y σ_y + z σ_z)` for exact SU(2) input.
    pub fn quaternion(&self) -> [T; 4] {
        let m = self.m;
        let alpha = (m[0][0] + m[1][1].conj()) / T::two();
        let beta = (m[0][1] - m[1][0].conj()) / T::two();
        [alpha.re, beta.im, beta.re, alpha.im]
    }

    /// Rotation angle in `[0, 2π]` and axis of `U = cos(a/2) + i sin(a/2) σ·n`; the axis is
    /// zero when `U = ±I`.
    pub fn axis_angle(&self) -> (Vec3<T>, T) {
        let [w, x, y, z] = self.quaternion();
        let v = Vec3::new(x, y, z);
        let s = v.norm();
        let angle = T::two() * s.atan2(w);
        if s > T::zero() {
            (v / s, angle)
        } else {
            (Vec3::zero(), angle)
        }
    }

    /// Rotation of Bloch vectors induced by `ψ ↦ Uψ`.
    pub fn rotate_bloch(&self, m: Vec3<T>) -> Vec3<T> {
        let [w, x, y, z] = self.quaternion();
        // U = w + i q·σ acts on m as a rotation by -2 atan2(|q|, w) about q.
        let q = Vec3::new(-x, -y, -z);
        let t = q.cross(m) * T::two();
        m + t * w + q.cross(t)
    }
}

impl<T: Real> Mul for SU2Operator<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self.m, o.m);
        let mut m = [[c(T::zero(), T::zero()); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self { m }
    }
}

/// Largest singular value of a 2×2 complex matrix.
pub fn operator_norm<T: Real>(m: [[C<T>; 2]; 2]) -> T {
    // Eigenvalues of the Hermitian A†A from its trace and determinant.
    let p = m[0][0].norm_sqr() + m[1][0].norm_sqr();
    let q = m[0][1].norm_sqr() + m[1][1].norm_sqr();
    let r = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
    let tr = p + q;
    let det = p * q - r.norm_sqr();
    let disc = (tr * tr / T::lit(4.0) - det).max(T::zero()).sqrt();
    (tr / T::two() + disc).max(T::zero()).sqrt()
}

/// `cos(a/2) I + i sin(a/2) σ·n̂`.
pub fn su2_exp<T: Real>(axis: Vec3<T>, angle: T) -> Result<SU2Operator<T>> {
    let n = axis.norm();
    if n == T::zero() {
        if angle == T::zero() {
            return Ok(SU2Operator::identity());
        }
        return Err(Error::ZeroAxis { angle: angle.as_f64() });
    }
    let (s, co) = (angle / T::two()).sin_cos();
    let k = s / n;
    Ok(SU2Operator::from_quaternion(co, axis.x * k, axis.y * k, axis.z * k))
}

/// `exp(i σ·w / 2)`; identity for `w = 0`.
pub fn su2_exp_vec<T: Real>(w: Vec3<T>) -> SU2Operator<T> {
    let a = w.norm();
    if a == T::zero() {
        return SU2Operator::identity();
    }
    let (s, co) = (a / T::two()).sin_cos();
    let k = s / a;
    SU2Operator::from_quaternion(co, w.x * k, w.y * k, w.z * k)
}

/// Nearest SU(2) element in the Frobenius norm: projection onto the quaternion
/// subspace followed by normalization.
pub fn project_su2<T: Real>(u: &SU2Operator<T>) -> SU2Operator<T> {
    let [w, x, y, z] = u.quaternion();
    let n = (w * w + x * x + y * y + z * z).sqrt();
    SU2Operator::from_quaternion(w / n, x / n, y / n, z / n)
}

/// `tr U`.
pub fn wilson_loop<T: Real>(u: &SU2Operator<T>) -> C<T> {
    u.trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exp_about_z_by_pi() {
        let u = su2_exp(Vec3::e_z(), PI).unwrap();
        assert!((u.m[0][0] - C::new(0.0, 1.0)).norm() < 1e-15);
        assert!((u.m[1][1] - C::new(0.0, -1.0)).norm() < 1e-15);
        assert!(u.trace().norm() < 1e-15);
    }

    #[test]
    fn exp_identity_and_double_cover() {
        assert_eq!(su2_exp(Vec3::new(0.3, 0.1, 0.0), 0.0).unwrap(), SU2Operator::identity());
        let u = su2_exp(Vec3::e_x(), 2.0 * PI).unwrap();
        assert!(u.distance(&SU2Operator::identity().neg()) < 1e-15);
        assert!(matches!(su2_exp(Vec3::zero(), 1.0), Err(Error::ZeroAxis { .. })));
    }

    #[test]
    fn bloch_roundtrip_and_phase_convention() {
        for m in [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 0.0, -1.0), Vec3::new(0.3, -0.4, 0.866_025_403_784_438_6)] {
            let s = Spinor::from_bloch(m).unwrap();
            assert!((s.bloch() - m.normalize()).norm() < 1e-14);
            assert!(s.a.im == 0.0 && s.a.re >= 0.0);
        }
        let down = Spinor::<f64>::from_bloch(-Vec3::e_z()).unwrap();
        assert_eq!(down.b, C::new(1.0, 0.0));
    }

    #[test]
    fn rotate_bloch_matches_conjugation() {
        let u = su2_exp(Vec3::new(0.2, -0.7, 0.4), 1.3).unwrap();
        let m = Vec3::new(0.6, 0.0, 0.8);
        let via_spinor = u.apply(&Spinor::from_bloch(m).unwrap()).bloch();
        assert!((u.rotate_bloch(m) - via_spinor).norm() < 1e-14);
    }

    #[test]
    fn positive_angle_rotates_bloch_clockwise() {
        let u = su2_exp(Vec3::e_z(), 0.5).unwrap();
        let m = u.rotate_bloch(Vec3::e_x());
        assert!((m - Vec3::new(0.5f64.cos(), -(0.5f64).sin(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn axis_angle_roundtrip() {
        let axis = Vec3::new(1.0, 2.0, -2.0).normalize();
        let (a, ang): (Vec3<f64>, f64) = su2_exp(axis, 2.5).unwrap().axis_angle();
        assert!((a - axis).norm() < 1e-14 && (ang - 2.5).abs() < 1e-14);
    }

    #[test]
    fn projection_restores_su2() {
        let mut u = su2_exp(Vec3::new(0.3, 0.4, 0.5), 0.9).unwrap();
        u.m[0][1] = u.m[0][1] + C::new(1e-6, -2e-6);
        u.m[1][1] = u.m[1][1] * 1.00001;
        let p = project_su2(&u);
        assert!(p.unitarity_defect() < 1e-15);
        assert!(p.distance(&u) < 1e-4);
    }

    #[test]
    fn operator_norm_of_diagonal() {
        let m: [[C<f64>; 2]; 2] = [[C::new(3.0, 0.0), C::new(0.0, 0.0)], [C::new(0.0, 0.0), C::new(0.0, -4.0)]];
        assert!((operator_norm(m) - 4.0).abs() < 1e-14);
    }
}
