//! Clustered spectra and generalized eigenspaces.

use std::cmp::Ordering;

use num_complex::Complex;

use super::schur::schur_decompose;
use super::svd::svd;
use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{arg_0_2pi, Real};

/// Default relative clustering tolerance for coincident eigenvalues.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-7;
/// Default relative threshold below which singular values count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue<T> {
    pub value: Complex<T>,
    pub multiplicity: usize,
}

/// Distinct eigenvalues with algebraic multiplicities, sorted by ascending
/// modulus and then by argument in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<Eigenvalue<T>>,
    /// Absolute merge distance actually used.
    pub cluster_tolerance: T,
}

impl<T: Real> Spectrum<T> {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }

    pub fn distinct(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn moduli(&self) -> Vec<T> {
        self.eigenvalues.iter().map(|e| e.value.norm()).collect()
    }

    pub fn spectral_radius(&self) -> T {
        self.moduli().into_iter().fold(T::zero(), T::max)
    }

    /// Distance from `z` to the nearest eigenvalue.
    pub fn distance_to(&self, z: Complex<T>) -> T {
        self.eigenvalues
            .iter()
            .map(|e| (e.value - z).norm())
            .fold(T::infinity(), T::min)
    }
}

/// A set of linearly independent vectors in `ℂ^m`, optionally tied to an eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis<T> {
    pub ambient_dim: usize,
    pub vectors: Vec<Vec<Complex<T>>>,
    pub eigenvalue: Option<Complex<T>>,
}

impl<T: Real> SubspaceBasis<T> {
    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            vectors: Vec::new(),
            eigenvalue: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Columns as an `m × dim` matrix (`None` when empty).
    pub fn matrix(&self) -> Option<ComplexMatrix<T>> {
        if self.vectors.is_empty() {
            None
        } else {
            ComplexMatrix::from_columns(&self.vectors).ok()
        }
    }

    /// Direct sum of several bases (concatenated columns).
    pub fn direct_sum<'a>(ambient_dim: usize, parts: impl IntoIterator<Item = &'a SubspaceBasis<T>>) -> Self {
        let vectors = parts.into_iter().flat_map(|p| p.vectors.iter().cloned()).collect();
        Self {
            ambient_dim,
            vectors,
            eigenvalue: None,
        }
    }

    /// Smallest singular value of the basis matrix (0 for an empty basis).
    pub fn min_singular_value(&self) -> T {
        self.matrix().map_or(T::zero(), |m| svd(&m).min())
    }
}

/// Eigenvalues of `m`, merging roots closer than `cluster_tol·max(1, ‖M‖_F)`.
pub fn eigenvalues<T: Real>(m: &ComplexMatrix<T>, cluster_tol: T) -> Result<Spectrum<T>> {
    let raw = schur_decompose(m)?.eigenvalues();
    let tol = cluster_tol * T::one().max(m.frobenius_norm());
    Ok(cluster(&raw, tol))
}

pub fn spectral_radius<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    Ok(eigenvalues(m, T::lit(DEFAULT_CLUSTER_TOL))?.spectral_radius())
}

fn cluster<T: Real>(raw: &[Complex<T>], tol: T) -> Spectrum<T> {
    // Single-linkage grouping via union-find.
    let n = raw.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut i = i;
        while p[i] != r {
            let next = p[i];
            p[i] = r;
            i = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (raw[i] - raw[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex<T>>)> = Vec::new();
    for (i, &z) in raw.iter().enumerate() {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, members)) => members.push(z),
            None => groups.push((root, vec![z])),
        }
    }
    let mut eigenvalues: Vec<Eigenvalue<T>> = groups
        .into_iter()
        .map(|(_, members)| {
            let k = members.len();
            let sum: Complex<T> = members.into_iter().sum();
            Eigenvalue {
                value: sum.unscale(T::from_usize_lossy(k)),
                multiplicity: k,
            }
        })
        .collect();

    // Ascending modulus; moduli within `tol` form a tie group ordered by argument.
    eigenvalues.sort_by(|a, b| a.value.norm().partial_cmp(&b.value.norm()).unwrap_or(Ordering::Equal));
    let mut start = 0;
    while start < eigenvalues.len() {
        let base = eigenvalues[start].value.norm();
        let mut end = start + 1;
        while end < eigenvalues.len() && eigenvalues[end].value.norm() - base <= tol {
            end += 1;
        }
        eigenvalues[start..end].sort_by(|a, b| {
            arg_0_2pi(a.value)
                .partial_cmp(&arg_0_2pi(b.value))
                .unwrap_or(Ordering::Equal)
        });
        start = end;
    }

    Spectrum {
        eigenvalues,
        cluster_tolerance: tol,
    }
}

/// Basis of `ker (M − λI)^k` computed from the SVD of the matrix power.
pub fn generalized_eigenspace<T: Real>(
    m: &ComplexMatrix<T>,
    lambda: Complex<T>,
    multiplicity: usize,
    rank_tol: T,
) -> Result<SubspaceBasis<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    // Scale so that a numerically tiny power is not mistaken for a full-rank one.
    let scale = T::one().max(m.frobenius_norm());
    let power = m.shifted(lambda).scale_real(scale.recip()).pow(multiplicity as u32);
    let dec = svd(&power);
    let cut = rank_tol * dec.max().max(T::one());
    let kernel: Vec<Vec<Complex<T>>> = dec
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cut)
        .map(|(k, _)| dec.v.column(k))
        .collect();
    if kernel.len() != multiplicity {
        return Err(Error::DimensionMismatch {
            expected: multiplicity,
            found: kernel.len(),
        });
    }
    Ok(SubspaceBasis {
        ambient_dim: m.rows(),
        vectors: kernel,
        eigenvalue: Some(lambda),
    })
}
