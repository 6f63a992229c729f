//! Helpers for complex vectors stored as plain slices.

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

pub fn zeros<T: Real>(n: usize) -> Vec<Complex<T>> {
    vec![Complex::zero(); n]
}

pub fn basis<T: Real>(n: usize, k: usize) -> Vec<Complex<T>> {
    let mut v = zeros(n);
    v[k] = Complex::new(T::one(), T::zero());
    v
}

pub fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// `⟨a, b⟩ = aᴴ b`.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn add<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn sub<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn scale<T: Real>(a: &[Complex<T>], s: Complex<T>) -> Vec<Complex<T>> {
    a.iter().map(|&x| x * s).collect()
}

/// `y += s·x`.
pub fn axpy<T: Real>(y: &mut [Complex<T>], s: Complex<T>, x: &[Complex<T>]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn from_real<T: Real>(xs: &[f64]) -> Vec<Complex<T>> {
    xs.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect()
}
