//! Classification of the Poincaré map, the stable/unstable splitting and the dichotomy projection.

mod growth;

use num_complex::Complex;
use serde::Serialize;

pub use growth::{
    decay_horizon, growth_profile, inverse_decay_check, inverse_decay_on, restricted_operator, stability_envelope,
    ComponentGrowth, DecayReport, GrowthProfile, StabilityEnvelope,
};

use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, generalized_eigenspace, invert, svd, ComplexMatrix, Eigenvalue, Spectrum, SubspaceBasis,
    DEFAULT_CLUSTER_TOL, DEFAULT_RANK_TOL,
};
use crate::propagator::Propagation;
use crate::scalar::Real;

pub const DEFAULT_CIRCLE_TOL: f64 = 1e-6;
/// Relative size of `σ_min(L − λ̂I)` that certifies a unit-modulus eigenvalue `λ̂`.
pub const CIRCLE_RESIDUAL_TOL: f64 = 1e-8;
/// Condition limit for the change of basis `[X1 | X2]`.
pub const BASIS_COND_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DichotomyClass {
    Stable,
    Expansive,
    Dichotomic,
    NonDichotomic,
    Indeterminate,
}

impl DichotomyClass {
    /// Circle-free: stable and expansive maps are the degenerate dichotomies.
    pub fn is_dichotomic(self) -> bool {
        matches!(self, Self::Stable | Self::Expansive | Self::Dichotomic)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Stable => "Stable",
            Self::Expansive => "Expansive",
            Self::Dichotomic => "Dichotomic",
            Self::NonDichotomic => "NonDichotomic",
            Self::Indeterminate => "Indeterminate",
        }
    }
}

impl std::fmt::Display for DichotomyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct DichotomyVerdict<T> {
    pub class: DichotomyClass,
    pub circle_tol: T,
    pub moduli: Vec<T>,
    /// `σ_min(L − (λ/|λ|)I)/max(1, ‖L‖_F)` for each eigenvalue in the circle band.
    pub circle_residuals: Vec<T>,
}

fn in_band<T: Real>(z: Complex<T>, tol: T) -> bool {
    (z.norm() - T::one()).abs() <= tol
}

pub fn classify<T: Real>(l: &ComplexMatrix<T>, circle_tol: T) -> Result<DichotomyVerdict<T>> {
    let spectrum = eigenvalues(l, T::lit(DEFAULT_CLUSTER_TOL))?;
    Ok(classify_spectrum(l, &spectrum, circle_tol))
}

fn classify_spectrum<T: Real>(l: &ComplexMatrix<T>, spectrum: &Spectrum<T>, circle_tol: T) -> DichotomyVerdict<T> {
    let moduli = spectrum.moduli();
    let scale = T::one().max(l.frobenius_norm());
    let circle_residuals: Vec<T> = spectrum
        .eigenvalues
        .iter()
        .filter(|e| in_band(e.value, circle_tol))
        .map(|e| {
            let on_circle = if e.value.norm() > T::zero() {
                e.value.unscale(e.value.norm())
            } else {
                Complex::new(T::one(), T::zero())
            };
            svd(&l.shifted(on_circle)).min() / scale
        })
        .collect();
    let class = if !circle_residuals.is_empty() {
        if circle_residuals.iter().any(|&r| r <= T::lit(CIRCLE_RESIDUAL_TOL)) {
            DichotomyClass::NonDichotomic
        } else {
            DichotomyClass::Indeterminate
        }
    } else {
        let inside = moduli.iter().filter(|&&r| r < T::one()).count();
        match (inside, moduli.len() - inside) {
            (_, 0) => DichotomyClass::Stable,
            (0, _) => DichotomyClass::Expansive,
            _ => DichotomyClass::Dichotomic,
        }
    };
    DichotomyVerdict {
        class,
        circle_tol,
        moduli,
        circle_residuals,
    }
}

/// The splitting `ℂ^m = X1 ⊕ (circle band) ⊕ X2`.
#[derive(Debug, Clone)]
pub struct SpectralSplit<T> {
    pub spectrum: Spectrum<T>,
    /// Number of distinct eigenvalues strictly inside the band's inner edge.
    pub eta: usize,
    pub x1: SubspaceBasis<T>,
    pub x2: SubspaceBasis<T>,
    /// Generalized eigenspace of the circle band eigenvalues (empty when circle-free).
    pub circle: SubspaceBasis<T>,
    pub circle_band: Vec<Eigenvalue<T>>,
    /// One `Y_j` per distinct eigenvalue, in spectrum order.
    pub components: Vec<SubspaceBasis<T>>,
    pub circle_tol: T,
}

impl<T: Real> SpectralSplit<T> {
    pub fn dimension(&self) -> usize {
        self.x1.ambient_dim
    }

    pub fn is_circle_free(&self) -> bool {
        self.circle_band.is_empty()
    }

    /// Smallest singular value of the stacked `[Y_1 | … | Y_k]` basis.
    pub fn basis_min_singular_value(&self) -> T {
        SubspaceBasis::direct_sum(self.dimension(), self.components.iter()).min_singular_value()
    }
}

pub fn spectral_split<T: Real>(l: &ComplexMatrix<T>, circle_tol: T, rank_tol: T) -> Result<SpectralSplit<T>> {
    let spectrum = eigenvalues(l, T::lit(DEFAULT_CLUSTER_TOL))?;
    let m = l.rows();
    let mut components = Vec::with_capacity(spectrum.eigenvalues.len());
    for e in &spectrum.eigenvalues {
        components.push(generalized_eigenspace(l, e.value, e.multiplicity, rank_tol)?);
    }
    let inner = T::one() - circle_tol;
    let outer = T::one() + circle_tol;
    let pick = |keep: &dyn Fn(T) -> bool| {
        let parts: Vec<&SubspaceBasis<T>> = spectrum
            .eigenvalues
            .iter()
            .zip(&components)
            .filter(|(e, _)| keep(e.value.norm()))
            .map(|(_, c)| c)
            .collect();
        SubspaceBasis::direct_sum(m, parts)
    };
    let x1 = pick(&|r| r < inner);
    let x2 = pick(&|r| r > outer);
    let circle = pick(&|r| r >= inner && r <= outer);
    let circle_band: Vec<Eigenvalue<T>> = spectrum
        .eigenvalues
        .iter()
        .filter(|e| in_band(e.value, circle_tol))
        .cloned()
        .collect();
    let eta = spectrum.eigenvalues.iter().filter(|e| e.value.norm() < inner).count();
    Ok(SpectralSplit {
        spectrum,
        eta,
        x1,
        x2,
        circle,
        circle_band,
        components,
        circle_tol,
    })
}

pub fn spectral_split_default<T: Real>(l: &ComplexMatrix<T>) -> Result<SpectralSplit<T>> {
    spectral_split(l, T::lit(DEFAULT_CIRCLE_TOL), T::lit(DEFAULT_RANK_TOL))
}

/// Projection onto `range` along `kernel`, `P = V·diag(I, 0)·V⁻¹` with `V = [range | kernel]`.
pub fn projection_onto<T: Real>(range: &SubspaceBasis<T>, kernel: &SubspaceBasis<T>) -> Result<ComplexMatrix<T>> {
    let m = range.ambient_dim;
    if range.dim() + kernel.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: range.dim() + kernel.dim(),
        });
    }
    if kernel.is_empty() {
        return Ok(ComplexMatrix::identity(m));
    }
    if range.is_empty() {
        return Ok(ComplexMatrix::zeros(m, m));
    }
    let v = SubspaceBasis::direct_sum(m, [range, kernel])
        .matrix()
        .expect("nonempty basis");
    let vinv = invert(&v, T::lit(BASIS_COND_LIMIT))?;
    let mut d = ComplexMatrix::zeros(m, m);
    for k in 0..range.dim() {
        d[(k, k)] = Complex::new(T::one(), T::zero());
    }
    Ok(v.matmul(&d).matmul(&vinv))
}

/// Spectral projection onto `X1` along `X2`; requires a circle-free split.
pub fn dichotomy_projection<T: Real>(split: &SpectralSplit<T>) -> Result<ComplexMatrix<T>> {
    if !split.is_circle_free() {
        return Err(Error::NotDichotomic(split.circle_band.len()));
    }
    projection_onto(&split.x1, &split.x2)
}

/// Projection onto `X1 ⊕ (circle band)` along `X2`; equals the dichotomy projection when circle-free.
pub fn weak_projection<T: Real>(split: &SpectralSplit<T>) -> Result<ComplexMatrix<T>> {
    let range = SubspaceBasis::direct_sum(split.dimension(), [&split.x1, &split.circle]);
    projection_onto(&range, &split.x2)
}

/// `Φ_μ(q)` and `Ψ_μ(q)` at one frequency.
#[derive(Debug, Clone)]
pub struct ForcedPair<T> {
    pub mu: T,
    pub phi: ComplexMatrix<T>,
    pub psi: ComplexMatrix<T>,
}

/// `{0, π/q, 2π/q, 1}`.
pub fn default_commutation_mus<T: Real>(q: T) -> Vec<T> {
    vec![T::zero(), T::PI() / q, T::TAU() / q, T::one()]
}

pub fn sample_forced_pairs<T: Real>(propagation: &Propagation<T>, mus: &[T]) -> Result<Vec<ForcedPair<T>>> {
    let q = propagation.period();
    mus.iter()
        .map(|&mu| {
            Ok(ForcedPair {
                mu,
                phi: propagation.forced_forward_matrix(mu, q)?,
                psi: propagation.forced_adjoint_matrix(mu, q)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ProjectionReport<T> {
    pub p: ComplexMatrix<T>,
    pub rank: usize,
    /// `‖P² − P‖_F`.
    pub idempotency_residual: T,
    /// `‖PL − LP‖_F`.
    pub commutation_l: T,
    /// `max_μ ‖PΦ_μ(q) − Φ_μ(q)P‖_F`.
    pub commutation_phi: T,
    /// `max_μ ‖PΨ_μ(q) − Ψ_μ(q)P‖_F`.
    pub commutation_psi: T,
    pub sampled_mu: Vec<T>,
}

pub fn projection_report<T: Real>(
    p: &ComplexMatrix<T>,
    l: &ComplexMatrix<T>,
    forced: &[ForcedPair<T>],
) -> ProjectionReport<T> {
    let idempotency_residual = (p.matmul(p) - p.clone()).frobenius_norm();
    let worst = |f: &dyn Fn(&ForcedPair<T>) -> &ComplexMatrix<T>| {
        forced
            .iter()
            .map(|s| p.commutator_norm(f(s)))
            .fold(T::zero(), |a, b| a.max(b))
    };
    ProjectionReport {
        p: p.clone(),
        rank: svd(p).rank(T::lit(DEFAULT_RANK_TOL)),
        idempotency_residual,
        commutation_l: p.commutator_norm(l),
        commutation_phi: worst(&|s| &s.phi),
        commutation_psi: worst(&|s| &s.psi),
        sampled_mu: forced.iter().map(|s| s.mu).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Invertibility {
    Invertible,
    Singular,
}

#[derive(Debug, Clone, Copy)]
pub struct InvertibilityCheck<T> {
    pub verdict: Invertibility,
    /// `max(σ_max, scale)/σ_min` (infinite for an exactly singular matrix).
    pub condition: T,
    pub sigma_min: T,
    pub sigma_max: T,
}

impl<T: Real> InvertibilityCheck<T> {
    pub fn is_invertible(&self) -> bool {
        self.verdict == Invertibility::Invertible
    }
}

/// Singular iff `σ_min < m·ε·σ_max` or `σ_max/σ_min > cond_limit`.
pub fn invertibility_check<T: Real>(m: &ComplexMatrix<T>, cond_limit: T) -> InvertibilityCheck<T> {
    invertibility_check_against(m, cond_limit, T::zero())
}

/// As [`invertibility_check`], measuring `σ_min` against `max(σ_max, scale)`.
///
/// A computed `Φ_μ(q)` that vanishes in exact arithmetic is pure integration noise, so its own
/// `σ_max` is no reference; `scale` supplies the size the matrix would have without cancellation.
pub fn invertibility_check_against<T: Real>(m: &ComplexMatrix<T>, cond_limit: T, scale: T) -> InvertibilityCheck<T> {
    let sv = svd(m);
    let (smax, smin) = (sv.max(), sv.min());
    let reference = smax.max(scale);
    let condition = if smin > T::zero() {
        reference / smin
    } else {
        T::infinity()
    };
    let floor = T::from_usize_lossy(m.rows()) * T::epsilon() * reference;
    let singular = reference == T::zero() || smin < floor || !(condition <= cond_limit);
    InvertibilityCheck {
        verdict: if singular {
            Invertibility::Singular
        } else {
            Invertibility::Invertible
        },
        condition,
        sigma_min: smin,
        sigma_max: smax,
    }
}
