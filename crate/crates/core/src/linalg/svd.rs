//! One-sided (Hestenes) Jacobi SVD for small dense complex matrices.

use num_complex::Complex;
use num_traits::Zero;

use super::{vector, ComplexMatrix};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 80;

/// `A = U·diag(σ)·Vᴴ` with singular values in descending order.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: ComplexMatrix<T>,
    pub singular_values: Vec<T>,
    pub v: ComplexMatrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn max(&self) -> T {
        self.singular_values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn min(&self) -> T {
        self.singular_values.last().copied().unwrap_or_else(T::zero)
    }

    /// Right singular vectors whose singular value is at most `rank_tol·σ_max`.
    /// A zero matrix has every direction in its kernel.
    pub fn null_space(&self, rank_tol: T) -> Vec<Vec<Complex<T>>> {
        let smax = self.max();
        let threshold = rank_tol * smax;
        self.singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| smax == T::zero() || s <= threshold)
            .map(|(j, _)| self.v.column(j))
            .collect()
    }

    pub fn rank(&self, rank_tol: T) -> usize {
        self.singular_values.len() - self.null_space(rank_tol).len()
    }
}

pub fn svd<T: Real>(a: &ComplexMatrix<T>) -> Svd<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut cols = a.columns();
    let mut v: Vec<Vec<Complex<T>>> = (0..n).map(|j| vector::basis(n, j)).collect();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: T = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = vector::inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (g + g);
                let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, phase, c, s);
                rotate(&mut v, p, q, phase, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(usize, T)> = cols.iter().map(|c| vector::norm(c)).enumerate().collect();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));

    let singular_values: Vec<T> = order.iter().map(|&(_, s)| s).collect();
    let u_cols: Vec<Vec<Complex<T>>> = order
        .iter()
        .map(|&(j, s)| {
            if s > T::zero() {
                vector::scale(&cols[j], Complex::new(s.recip(), T::zero()))
            } else {
                vec![Complex::zero(); m]
            }
        })
        .collect();
    let v_cols: Vec<Vec<Complex<T>>> = order.iter().map(|&(j, _)| v[j].clone()).collect();

    Svd {
        u: ComplexMatrix::from_columns(&u_cols).unwrap_or_else(|_| ComplexMatrix::zeros(m, 0)),
        singular_values,
        v: ComplexMatrix::from_columns(&v_cols).unwrap_or_else(|_| ComplexMatrix::zeros(n, 0)),
    }
}

// x' = c·x − s·ỹ, ỹ' = s·x + c·ỹ with ỹ = e^{−iφ}·y; the phase is restored afterwards.
fn rotate<T: Real>(cols: &mut [Vec<Complex<T>>], p: usize, q: usize, phase: Complex<T>, c: T, s: T) {
    let unphase = phase.conj();
    let (left, right) = cols.split_at_mut(q);
    let x = &mut left[p];
    let y = &mut right[0];
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let a = *xi;
        let b = *yi * unphase;
        *xi = a.scale(c) - b.scale(s);
        *yi = (a.scale(s) + b.scale(c)) * phase;
    }
}

pub fn singular_values<T: Real>(a: &ComplexMatrix<T>) -> Vec<T> {
    svd(a).singular_values
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn reconstruct(s: &Svd<f64>) -> M {
        let sig = M::from_diagonal(
            &s.singular_values
                .iter()
                .map(|&x| Complex::new(x, 0.0))
                .collect::<Vec<_>>(),
        );
        s.u.matmul(&sig).matmul(&s.v.adjoint())
    }

    #[test]
    fn reconstructs_complex_matrix() {
        let a = M::from_rows(&[
            vec![Complex::new(1.0, 2.0), Complex::new(0.5, -1.0), Complex::new(0.0, 0.3)],
            vec![Complex::new(-2.0, 0.0), Complex::new(1.0, 1.0), Complex::new(3.0, 0.0)],
            vec![Complex::new(0.1, 0.1), Complex::new(0.0, -2.0), Complex::new(1.0, -1.0)],
        ])
        .unwrap();
        let s = svd(&a);
        assert!((reconstruct(&s) - a.clone()).frobenius_norm() < 1e-12 * a.frobenius_norm());
        let vhv = s.v.adjoint().matmul(&s.v);
        assert!((vhv - M::identity(3)).frobenius_norm() < 1e-12);
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rank_deficient_kernel() {
        // [[1, i], [i, -1]] has rank one with kernel spanned by (−i, 1)/√2.
        let a = M::from_rows(&[
            vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)],
            vec![Complex::new(0.0, 1.0), Complex::new(-1.0, 0.0)],
        ])
        .unwrap();
        let s = svd(&a);
        let ker = s.null_space(1e-8);
        assert_eq!(ker.len(), 1);
        let r = a.mul_vec(&ker[0]);
        assert!(vector::norm(&r) < 1e-12);
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let s = svd(&M::zeros(3, 3));
        assert_eq!(s.null_space(1e-8).len(), 3);
    }
}
