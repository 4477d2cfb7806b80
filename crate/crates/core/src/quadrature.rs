//! Fixed quadrature rules.

use crate::scalar::Real;

/// Nodes and weights of 8-point Gauss–Legendre on `[-1, 1]`.
const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_48),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_48),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

/// 8-point Gauss–Legendre over `[a, b]`.
pub fn gauss_legendre8<T: Real>(a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
    let half = (b - a) / T::two();
    let mid = (a + b) / T::two();
    GL8.iter().map(|&(x, w)| T::lit(w) * f(mid + half * T::lit(x))).fold(T::zero(), |acc, v| acc + v) * half
}

/// Composite Simpson over `[a, b]` with `panels` subintervals (rounded up to even).
pub fn simpson<T: Real>(a: T, b: T, panels: usize, mut f: impl FnMut(T) -> T) -> T {
    let n = panels.max(2) + panels % 2;
    let h = (b - a) / T::from_usize_exact(n);
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { T::lit(4.0) } else { T::two() };
        acc = acc + w * f(a + h * T::from_usize_exact(i));
    }
    acc * h / T::lit(3.0)
}

/// Composite Simpson over equally spaced samples `f(a + i h)`, `i = 0..=n` with `n` even.
pub fn simpson_samples<T: Real>(values: &[T], h: T) -> T {
    let n = values.len() - 1;
    debug_assert!(n >= 2 && n % 2 == 0, "Simpson needs an even panel count");
    let acc = values.iter().enumerate().fold(T::zero(), |acc, (i, &v)| {
        let w = if i == 0 || i == n { T::one() } else if i % 2 == 1 { T::lit(4.0) } else { T::two() };
        acc + w * v
    });
    acc * h / T::lit(3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_samples_is_exact_for_cubics() {
        let n = 8;
        let h = 2.0 / n as f64;
        let v: Vec<f64> = (0..=n).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson_samples(&v, h) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_is_exact_for_degree_fifteen() {
        let v = gauss_legendre8(0.0_f64, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
    }

    #[test]
    fn simpson_is_exact_for_cubics_and_handles_odd_panels() {
        let v = simpson(-1.0_f64, 3.0, 7, |x| x * x * x - x);
        assert!((v - (81.0 / 4.0 - 9.0 / 2.0 - (0.25 - 0.5))).abs() < 1e-12);
    }
}
