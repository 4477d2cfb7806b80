//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! Geometry and transport code is written against [`Real`], which is
//! implemented for `f32` and `f64`. Chart curves are additionally written
//! against [`Smooth`] so they can be evaluated on plain scalars or on
//! [`Jet`]s, which carry exact first and second derivatives.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar usable throughout the engine.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal; every literal used by the engine is representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Minimal elementary-function interface used to write chart curves once and
/// evaluate them on scalars or jets.
pub trait Smooth<T: Real>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn cst(x: T) -> Self;
    fn value(self) -> T;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn acos(self) -> Self;
    fn atan2(self, other: Self) -> Self;

    fn scale(self, k: T) -> Self {
        self * Self::cst(k)
    }
}

impl<T: Real> Smooth<T> for T {
    fn cst(x: T) -> Self {
        x
    }
    fn value(self) -> T {
        self
    }
    fn sin(self) -> Self {
        Float::sin(self)
    }
    fn cos(self) -> Self {
        Float::cos(self)
    }
    fn exp(self) -> Self {
        Float::exp(self)
    }
    fn ln(self) -> Self {
        Float::ln(self)
    }
    fn sqrt(self) -> Self {
        Float::sqrt(self)
    }
    fn acos(self) -> Self {
        Float::acos(self)
    }
    fn atan2(self, other: Self) -> Self {
        Float::atan2(self, other)
    }
}

/// Truncated Taylor jet `(f, f', f'')` in a single variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    pub v: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Real> Jet<T> {
    /// The independent variable at `x`.
    pub fn var(x: T) -> Self {
        Self { v: x, d1: T::one(), d2: T::zero() }
    }

    /// Applies a scalar function given its value and first two derivatives at `self.v`.
    #[inline]
    fn chain(self, f: T, df: T, ddf: T) -> Self {
        Self {
            v: f,
            d1: df * self.d1,
            d2: ddf * self.d1 * self.d1 + df * self.d2,
        }
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { v: self.v - o.v, d1: self.d1 - o.d1, d2: self.d2 - o.d2 }
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + T::two() * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

impl<T: Real> Div for Jet<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.chain(T::one() / o.v, -T::one() / (o.v * o.v), T::two() / (o.v * o.v * o.v));
        self * inv
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { v: -self.v, d1: -self.d1, d2: -self.d2 }
    }
}

impl<T: Real> Smooth<T> for Jet<T> {
    fn cst(x: T) -> Self {
        Self { v: x, d1: T::zero(), d2: T::zero() }
    }
    fn value(self) -> T {
        self.v
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let x = self.v;
        self.chain(x.ln(), T::one() / x, -T::one() / (x * x))
    }
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        let d = T::half() / r;
        self.chain(r, d, -d / (T::two() * self.v))
    }
    fn acos(self) -> Self {
        let x = self.v;
        let w = T::one() - x * x;
        let d = -T::one() / w.sqrt();
        self.chain(x.acos(), d, d * x / w)
    }
    fn atan2(self, other: Self) -> Self {
        // atan2(y, x) has gradient (x, -y)/(x²+y²); expand the composite explicitly.
        let (y, x) = (self, other);
        let r2 = x.v * x.v + y.v * y.v;
        let d1 = (x.v * y.d1 - y.v * x.d1) / r2;
        let num_d = x.d1 * y.d1 + x.v * y.d2 - y.d1 * x.d1 - y.v * x.d2;
        let r2_d = T::two() * (x.v * x.d1 + y.v * y.d1);
        let d2 = (num_d * r2 - (x.v * y.d1 - y.v * x.d1) * r2_d) / (r2 * r2);
        Self { v: y.v.atan2(x.v), d1, d2 }
    }
}

/// Pairwise (cascade) summation; deterministic for a fixed input order.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    match xs.len() {
        0 => T::zero(),
        n if n <= 8 => xs.iter().copied().fold(T::zero(), |a, b| a + b),
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}
