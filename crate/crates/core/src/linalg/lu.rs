//! Partially pivoted LU factorization: solves, inverses, determinants.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default condition-number ceiling above which [`invert`] reports `Singular`.
pub const DEFAULT_COND_LIMIT: f64 = 1e12;

/// `P·A = L·U` with unit lower-triangular `L` packed below the diagonal of `lu`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: ComplexMatrix<T>,
    perm: Vec<usize>,
    swaps: usize,
    zero_pivot: bool,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &ComplexMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: a.cols(),
            });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut zero_pivot = false;
        for k in 0..n {
            let (p, best) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold((k, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == T::zero() {
                zero_pivot = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            swaps,
            zero_pivot,
        })
    }

    pub fn is_singular(&self) -> bool {
        self.zero_pivot
    }

    pub fn determinant(&self) -> Complex<T> {
        if self.zero_pivot {
            return Complex::zero();
        }
        let d: Complex<T> = self.lu.diagonal().into_iter().fold(Complex::one(), |a, b| a * b);
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let n = self.lu.rows();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        if self.zero_pivot {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu[(i, i)];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<ComplexMatrix<T>> {
        let n = self.lu.rows();
        let cols = (0..n)
            .map(|j| self.solve(&super::vector::basis(n, j)))
            .collect::<Result<Vec<_>>>()?;
        ComplexMatrix::from_columns(&cols)
    }
}

/// Inverse with a condition-number gate (`κ₁ = ‖M‖₁·‖M⁻¹‖₁`).
pub fn invert<T: Real>(m: &ComplexMatrix<T>, cond_limit: T) -> Result<ComplexMatrix<T>> {
    let lu = Lu::factor(m)?;
    if lu.is_singular() {
        return Err(Error::Singular {
            condition: f64::INFINITY,
        });
    }
    let inv = lu.inverse()?;
    if !inv.is_finite() {
        return Err(Error::Singular {
            condition: f64::INFINITY,
        });
    }
    let cond = m.norm_1() * inv.norm_1();
    if !(cond <= cond_limit) {
        return Err(Error::Singular {
            condition: cond.as_f64(),
        });
    }
    Ok(inv)
}

pub fn solve<T: Real>(m: &ComplexMatrix<T>, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    Lu::factor(m)?.solve(b)
}

pub fn determinant<T: Real>(m: &ComplexMatrix<T>) -> Result<Complex<T>> {
    Ok(Lu::factor(m)?.determinant())
}
