//! Dense complex linear algebra: products, LU, SVD, Schur form and spectra.

mod eigen;
mod lu;
mod matrix;
mod schur;
mod svd;
pub mod vector;

pub use eigen::{
    eigenvalues, generalized_eigenspace, spectral_radius, Eigenvalue, Spectrum, SubspaceBasis, DEFAULT_CLUSTER_TOL,
    DEFAULT_RANK_TOL,
};
pub use lu::{determinant, invert, solve, Lu, DEFAULT_COND_LIMIT};
pub use matrix::ComplexMatrix;
pub use schur::{schur_decompose, Schur};
pub use svd::{singular_values, svd, Svd};
