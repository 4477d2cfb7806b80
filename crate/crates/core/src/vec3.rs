use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use crate::scalar::Real;

/// A point or direction in the embedding space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn e_x() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    pub fn e_y() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    pub fn e_z() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction; the zero vector is returned unchanged.
    pub fn normalize(self) -> Self {
        let n = self.norm();
        if n == T::zero() {
            self
        } else {
            self / n
        }
    }

    pub fn map(self, f: impl Fn(T) -> T) -> Self {
        Self::new(f(self.x), f(self.y), f(self.z))
    }

    pub fn cast<U: Real>(self) -> Vec3<U> {
        Vec3::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()), U::lit(self.z.as_f64()))
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

impl<T: Real> Div<T> for Vec3<T> {
    type Output = Self;
    fn div(self, k: T) -> Self {
        Self::new(self.x / k, self.y / k, self.z / k)
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

/// Right-handed orthonormal triad `(t, N, B)` or `(t, n, b)` stored as rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame<T> {
    pub t: Vec3<T>,
    pub n: Vec3<T>,
    pub b: Vec3<T>,
}

impl<T: Real> Frame<T> {
    /// Components of `v` along the frame axes.
    pub fn project(&self, v: Vec3<T>) -> Vec3<T> {
        Vec3::new(v.dot(self.t), v.dot(self.n), v.dot(self.b))
    }

    /// Lab vector with the given frame components.
    pub fn compose(&self, c: Vec3<T>) -> Vec3<T> {
        self.t * c.x + self.n * c.y + self.b * c.z
    }

    /// Largest deviation of the Gram matrix from identity, plus the handedness defect.
    pub fn orthonormality_defect(&self) -> T {
        let one = T::one();
        let checks = [
            (self.t.dot(self.t) - one).abs(),
            (self.n.dot(self.n) - one).abs(),
            (self.b.dot(self.b) - one).abs(),
            self.t.dot(self.n).abs(),
            self.t.dot(self.b).abs(),
            self.n.dot(self.b).abs(),
            (self.t.cross(self.n) - self.b).norm(),
        ];
        checks.into_iter().fold(T::zero(), T::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_is_right_handed() {
        let x = Vec3::<f64>::e_x();
        let y = Vec3::e_y();
        assert_eq!(x.cross(y), Vec3::e_z());
        assert_eq!(y.cross(x), -Vec3::e_z());
    }

    #[test]
    fn frame_projection_roundtrip() {
        let s = 0.5_f64.sqrt();
        let f = Frame {
            t: Vec3::new(0.0, s, s),
            n: Vec3::e_x(),
            b: Vec3::new(0.0, s, -s),
        };
        assert!(f.orthonormality_defect() < 1e-15);
        let v = Vec3::new(0.3, -1.2, 2.0);
        assert!((f.compose(f.project(v)) - v).norm() < 1e-15);
    }
}
