//! Complex Schur form via Householder Hessenberg reduction followed by
//! single-shift (Wilkinson) implicit QR on the Hessenberg matrix.

use num_complex::Complex;
use num_traits::Zero;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `M = Q·T·Qᴴ`, `Q` unitary, `T` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur<T> {
    pub q: ComplexMatrix<T>,
    pub t: ComplexMatrix<T>,
}

impl<T: Real> Schur<T> {
    pub fn eigenvalues(&self) -> Vec<Complex<T>> {
        self.t.diagonal()
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.q.matmul(&self.t).matmul(&self.q.adjoint())
    }
}

pub fn schur_decompose<T: Real>(m: &ComplexMatrix<T>) -> Result<Schur<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(Error::InvalidArgument("Schur input has non-finite entries".into()));
    }
    let n = m.rows();
    let mut h = m.clone();
    let mut q = ComplexMatrix::identity(n);
    hessenberg(&mut h, &mut q);
    hessenberg_qr(&mut h, &mut q)?;
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = Complex::zero();
        }
    }
    Ok(Schur { q, t: h })
}

fn hessenberg<T: Real>(h: &mut ComplexMatrix<T>, q: &mut ComplexMatrix<T>) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let tail: T = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == T::zero() {
            continue;
        }
        let xnorm = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0].is_zero() {
            Complex::new(T::one(), T::zero())
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let beta = T::lit(2.0) / v.iter().map(|z| z.norm_sqr()).sum::<T>();

        // H ← (I − βvvᴴ)·H
        for j in 0..n {
            let s: Complex<T> = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= vi.scale(beta) * s;
            }
        }
        // H ← H·(I − βvvᴴ), Q ← Q·(I − βvvᴴ)
        for mat in [&mut *h, &mut *q] {
            for i in 0..n {
                let s: Complex<T> = v.iter().enumerate().map(|(j, vj)| mat[(i, k + 1 + j)] * vj).sum();
                for (j, vj) in v.iter().enumerate() {
                    mat[(i, k + 1 + j)] -= s * vj.conj().scale(beta);
                }
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = Complex::zero();
        }
    }
}

/// `G = [[c, s], [−s̄, c]]` with `G·(x, y)ᵀ = (r, 0)ᵀ`.
fn givens<T: Real>(x: Complex<T>, y: Complex<T>) -> (T, Complex<T>) {
    if y.is_zero() {
        return (T::one(), Complex::zero());
    }
    if x.is_zero() {
        return (T::zero(), y.conj() / y.norm());
    }
    let ax = x.norm();
    let nrm = ax.hypot(y.norm());
    (ax / nrm, (x / ax) * y.conj() / nrm)
}

fn rotate_rows<T: Real>(h: &mut ComplexMatrix<T>, i: usize, c: T, s: Complex<T>, cols: std::ops::Range<usize>) {
    for j in cols {
        let a = h[(i, j)];
        let b = h[(i + 1, j)];
        h[(i, j)] = a.scale(c) + s * b;
        h[(i + 1, j)] = b.scale(c) - s.conj() * a;
    }
}

fn rotate_cols<T: Real>(h: &mut ComplexMatrix<T>, k: usize, c: T, s: Complex<T>, rows: std::ops::Range<usize>) {
    for i in rows {
        let x1 = h[(i, k)];
        let x2 = h[(i, k + 1)];
        h[(i, k)] = x1.scale(c) + s.conj() * x2;
        h[(i, k + 1)] = x2.scale(c) - s * x1;
    }
}

/// Eigenvalue of the trailing 2×2 block closest to its last diagonal entry.
fn wilkinson_shift<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let p = (a - d).scale(half);
    let bc = b * c;
    if bc.is_zero() {
        return d;
    }
    let disc = (p * p + bc).sqrt();
    let denom = if (p + disc).norm() >= (p - disc).norm() {
        p + disc
    } else {
        p - disc
    };
    if denom.is_zero() {
        d
    } else {
        d - bc / denom
    }
}

fn hessenberg_qr<T: Real>(h: &mut ComplexMatrix<T>, q: &mut ComplexMatrix<T>) -> Result<()> {
    let n = h.rows();
    if n < 2 {
        return Ok(());
    }
    let eps = T::epsilon();
    let max_sweeps = 50 * n * n;
    let scale = h.frobenius_norm();
    let mut sweeps = 0;
    let mut its = 0;
    let mut hi = n - 1;

    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut tst = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if tst == T::zero() {
                tst = scale;
            }
            if h[(l, l - 1)].norm() <= eps * tst {
                h[(l, l - 1)] = Complex::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            its = 0;
            continue;
        }

        sweeps += 1;
        its += 1;
        if sweeps > max_sweeps {
            return Err(Error::NonConvergence { sweeps: max_sweeps });
        }

        let shift = if its % 10 == 0 {
            h[(hi, hi)] + Complex::new(T::lit(0.75) * h[(hi, hi - 1)].norm(), T::zero())
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in l..hi {
            let (x, y) = if k == l {
                (h[(l, l)] - shift, h[(l + 1, l)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let first_col = if k == l { k } else { k - 1 };
            rotate_rows(h, k, c, s, first_col..n);
            rotate_cols(h, k, c, s, 0..(k + 3).min(hi + 1));
            rotate_cols(q, k, c, s, 0..n);
            if k > l {
                h[(k + 1, k - 1)] = Complex::zero();
            }
        }
    }
    Ok(())
}
