//! Power-iteration diagnostics: per-eigenspace growth, inverse decay on `X2`, and stability envelopes.

use num_complex::Complex;

use super::SpectralSplit;
use crate::error::{Error, Result};
use crate::linalg::{invert, singular_values, solve, vector, ComplexMatrix, Lu, SubspaceBasis};
use crate::scalar::Real;
use crate::stats::{linear_fit, LinearFit};

type C<T> = Complex<T>;

/// `B` with `L·V = V·B` for a basis `V` of an `L`-invariant subspace.
pub fn restricted_operator<T: Real>(l: &ComplexMatrix<T>, basis: &SubspaceBasis<T>) -> Result<ComplexMatrix<T>> {
    let v = basis
        .matrix()
        .ok_or_else(|| Error::InvalidArgument("empty subspace has no restriction".into()))?;
    let vh = v.adjoint();
    let gram_inv = invert(&vh.matmul(&v), T::lit(1e14))?;
    Ok(gram_inv.matmul(&vh).matmul(&l.matmul(&v)))
}

#[derive(Debug, Clone)]
pub struct ComponentGrowth<T> {
    pub eigenvalue: C<T>,
    pub multiplicity: usize,
    /// `Lⁿy_j` for `n = 0…N`.
    pub iterates: Vec<Vec<C<T>>>,
    pub norms: Vec<T>,
    /// `exp` of the fitted log-slope; `None` when `y_j = 0`.
    pub fitted_modulus: Option<T>,
    /// Fitted polynomial degree `d ≤ m_j − 1`.
    pub degree: Option<usize>,
    pub log_coefficient: Option<T>,
}

#[derive(Debug, Clone)]
pub struct GrowthProfile<T> {
    pub n_max: usize,
    pub components: Vec<ComponentGrowth<T>>,
    /// `‖z − Σ y_j‖ / max(‖z‖, tiny)`.
    pub decomposition_residual: T,
}

impl<T: Real> GrowthProfile<T> {
    /// `Σ_j Lⁿy_j`.
    pub fn recombined(&self, n: usize) -> Vec<C<T>> {
        let m = self.components.first().map_or(0, |c| c.iterates[0].len());
        let mut acc = vector::zeros(m);
        for c in &self.components {
            vector::axpy(&mut acc, C::new(T::one(), T::zero()), &c.iterates[n]);
        }
        acc
    }
}

/// Decomposes `z = Σ y_j` over the generalized eigenspaces and tracks `‖Lⁿy_j‖ ≈ C|λ_j|ⁿnᵈ`.
///
/// Each `Lⁿy_j` is iterated through the restriction of `L` to `Y_j`, so rounding cannot leak
/// into faster-growing eigenspaces.
pub fn growth_profile<T: Real>(
    l: &ComplexMatrix<T>,
    z: &[C<T>],
    n_max: usize,
    split: &SpectralSplit<T>,
) -> Result<GrowthProfile<T>> {
    let m = l.rows();
    if z.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: z.len(),
        });
    }
    if n_max < 2 * m {
        return Err(Error::InvalidArgument(format!(
            "N = {n_max} must be at least 2m = {}",
            2 * m
        )));
    }
    let all = SubspaceBasis::direct_sum(m, split.components.iter());
    let v = all.matrix().expect("components span the space");
    let coords = solve(&v, z)?;

    let mut components = Vec::with_capacity(split.components.len());
    let mut offset = 0;
    let mut total = vector::zeros::<T>(m);
    for (eig, basis) in split.spectrum.eigenvalues.iter().zip(&split.components) {
        let k = basis.dim();
        let vj = basis.matrix().expect("nonempty eigenspace");
        let bj = restricted_operator(l, basis)?;
        let mut c = coords[offset..offset + k].to_vec();
        offset += k;
        let mut iterates = Vec::with_capacity(n_max + 1);
        for _ in 0..=n_max {
            iterates.push(vj.mul_vec(&c));
            c = bj.mul_vec(&c);
        }
        vector::axpy(&mut total, C::new(T::one(), T::zero()), &iterates[0]);
        let norms: Vec<T> = iterates.iter().map(|y| vector::norm(y)).collect();
        let fit = fit_power_law(&norms, eig.multiplicity);
        components.push(ComponentGrowth {
            eigenvalue: eig.value,
            multiplicity: eig.multiplicity,
            iterates,
            norms,
            fitted_modulus: fit.map(|f| f.0),
            degree: fit.map(|f| f.1),
            log_coefficient: fit.map(|f| f.2),
        });
    }
    let zn = vector::norm(z).max(T::min_positive_value());
    Ok(GrowthProfile {
        n_max,
        decomposition_residual: vector::norm(&vector::sub(z, &total)) / zn,
        components,
    })
}

/// Integer-degree fit of `log a_n = n·log r + d·log n + log C` on the tail `n ∈ [N/2, N]`.
fn fit_power_law<T: Real>(norms: &[T], multiplicity: usize) -> Option<(T, usize, T)> {
    let n_max = norms.len() - 1;
    let start = (n_max / 2).max(1);
    let tail: Vec<(T, T)> = (start..=n_max)
        .filter(|&n| norms[n] > T::zero() && norms[n].is_finite())
        .map(|n| (T::from_usize_lossy(n), norms[n].ln()))
        .collect();
    if tail.len() < 2 {
        return None;
    }
    let mut best: Option<(T, usize, T, T)> = None;
    let mut fits = Vec::with_capacity(multiplicity);
    for d in 0..multiplicity.max(1) {
        let dd = T::from_usize_lossy(d);
        let pts: Vec<(T, T)> = tail.iter().map(|&(n, y)| (n, y - dd * n.ln())).collect();
        let LinearFit {
            slope, intercept, rss, ..
        } = linear_fit(&pts);
        fits.push((slope, d, intercept, rss));
    }
    let min_rss = fits.iter().map(|f| f.3).fold(T::infinity(), |a, b| a.min(b));
    let slack = min_rss * T::lit(1e-3) + T::lit(1e-12) * T::from_usize_lossy(tail.len());
    for f in fits {
        if f.3 <= min_rss + slack {
            best = Some(f);
            break;
        }
    }
    best.map(|(slope, d, intercept, _)| (slope.exp(), d, intercept))
}

#[derive(Debug, Clone)]
pub struct DecayReport<T> {
    /// `‖L⁻ⁿx‖` for `n = 0…N`.
    pub norms: Vec<T>,
    /// Final norm is at most `1e-6` of the initial one and the last quarter is non-increasing.
    pub passed: bool,
}

fn decay_verdict<T: Real>(norms: Vec<T>) -> DecayReport<T> {
    let first = norms[0];
    let last = *norms.last().expect("at least one norm");
    let n = norms.len();
    let tail_start = n - (n / 4).max(1);
    let monotone = norms[tail_start..]
        .windows(2)
        .all(|w| w[1] <= w[0] * (T::one() + T::lit(1e-12)));
    let passed = first == T::zero() || (last <= T::lit(1e-6) * first && monotone);
    DecayReport { norms, passed }
}

/// `‖L⁻ⁿx‖` by repeated LU solves.
pub fn inverse_decay_check<T: Real>(l: &ComplexMatrix<T>, x: &[C<T>], n_max: usize) -> Result<DecayReport<T>> {
    let lu = Lu::factor(l)?;
    if lu.is_singular() {
        return Err(Error::Singular {
            condition: f64::INFINITY,
        });
    }
    let mut w = x.to_vec();
    let mut norms = Vec::with_capacity(n_max + 1);
    norms.push(vector::norm(&w));
    for _ in 0..n_max {
        w = lu.solve(&w)?;
        norms.push(vector::norm(&w));
    }
    Ok(decay_verdict(norms))
}

/// As [`inverse_decay_check`], iterating inside `X2` through the restricted operator.
pub fn inverse_decay_on<T: Real>(
    split: &SpectralSplit<T>,
    l: &ComplexMatrix<T>,
    x: &[C<T>],
    n_max: usize,
) -> Result<DecayReport<T>> {
    if split.x2.is_empty() {
        return Ok(decay_verdict(vec![vector::norm(x); n_max + 1]));
    }
    let v = split.x2.matrix().expect("nonempty");
    let b = restricted_operator(l, &split.x2)?;
    let vh = v.adjoint();
    let mut c = solve(&vh.matmul(&v), &vh.mul_vec(x))?;
    let back = v.mul_vec(&c);
    let xn = vector::norm(x);
    if vector::norm(&vector::sub(&back, x)) > T::lit(1e-8) * xn.max(T::one()) {
        return Err(Error::InvalidArgument("vector does not lie in X2".into()));
    }
    let lu = Lu::factor(&b)?;
    let mut norms = Vec::with_capacity(n_max + 1);
    norms.push(xn);
    for _ in 0..n_max {
        c = lu.solve(&c)?;
        norms.push(vector::norm(&v.mul_vec(&c)));
    }
    Ok(decay_verdict(norms))
}

/// Smallest `N` with `N^{ρ−1}·α^{−N} ≤ 1e-8`, where `α` is the smallest modulus in `X2` and `ρ`
/// the largest multiplicity there.
pub fn decay_horizon<T: Real>(split: &SpectralSplit<T>) -> usize {
    let outer = T::one() + split.circle_tol;
    let x2: Vec<_> = split
        .spectrum
        .eigenvalues
        .iter()
        .filter(|e| e.value.norm() > outer)
        .collect();
    let Some(alpha) = x2.iter().map(|e| e.value.norm()).reduce(|a, b| a.min(b)) else {
        return 1;
    };
    let rho = x2.iter().map(|e| e.multiplicity).max().unwrap_or(1);
    let target = T::lit(1e-8).ln();
    (1..=100_000usize)
        .find(|&n| {
            let nn = T::from_usize_lossy(n);
            T::from_usize_lossy(rho - 1) * nn.ln() - nn * alpha.ln() <= target
        })
        .unwrap_or(100_000)
}

/// `‖Lⁿ‖ ≤ N·e^{−Tn}` on `n ≤ n_max`.
#[derive(Debug, Clone)]
pub struct StabilityEnvelope<T> {
    pub n_const: T,
    pub rate: T,
    pub norms: Vec<T>,
}

impl<T: Real> StabilityEnvelope<T> {
    pub fn bound(&self, n: usize) -> T {
        self.n_const * (-self.rate * T::from_usize_lossy(n)).exp()
    }
}

/// Fits the envelope from sampled `‖Lⁿ‖₂`; `None` when the sampled norms do not decay.
pub fn stability_envelope<T: Real>(l: &ComplexMatrix<T>, n_max: usize) -> Option<StabilityEnvelope<T>> {
    let mut power = ComplexMatrix::identity(l.rows());
    let mut norms = Vec::with_capacity(n_max + 1);
    for _ in 0..=n_max {
        norms.push(singular_values(&power)[0]);
        power = power.matmul(l);
    }
    let floor = T::min_positive_value();
    let pts: Vec<(T, T)> = norms
        .iter()
        .enumerate()
        .map(|(n, &a)| (T::from_usize_lossy(n), a.max(floor).ln()))
        .collect();
    let slope = linear_fit(&pts).slope;
    let rate = -slope;
    if !(rate > T::zero()) {
        return None;
    }
    let n_const = norms
        .iter()
        .enumerate()
        .map(|(n, &a)| a * (rate * T::from_usize_lossy(n)).exp())
        .fold(T::one(), |a, b| a.max(b));
    Some(StabilityEnvelope { n_const, rate, norms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::spectral_split_default;

    type M = ComplexMatrix<f64>;
    const E: f64 = std::f64::consts::E;

    fn cv(xs: &[f64]) -> Vec<C<f64>> {
        vector::from_real(xs)
    }

    #[test]
    fn identity_profile_is_flat() {
        let l = M::identity(2);
        let s = spectral_split_default(&l).unwrap();
        let g = growth_profile(&l, &cv(&[1.0, 2.0]), 10, &s).unwrap();
        assert_eq!(g.components.len(), 1);
        assert_eq!(g.components[0].degree, Some(0));
        assert!((g.components[0].fitted_modulus.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jordan_profile_is_linear() {
        let l = M::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let s = spectral_split_default(&l).unwrap();
        let g = growth_profile(&l, &cv(&[0.0, 1.0]), 50, &s).unwrap();
        assert_eq!(g.components[0].degree, Some(1));
        assert!((g.components[0].fitted_modulus.unwrap() - 1.0).abs() < 1e-3);
        let y = &g.components[0].iterates[7];
        assert!((y[0].re - 7.0).abs() < 1e-12 && (y[1].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_profile_separates() {
        let l = M::from_real_diagonal(&[1.0 / E, E]);
        let s = spectral_split_default(&l).unwrap();
        let g = growth_profile(&l, &cv(&[1.0, 1.0]), 50, &s).unwrap();
        for (c, want) in g.components.iter().zip([1.0 / E, E]) {
            assert_eq!(c.degree, Some(0));
            assert!((c.fitted_modulus.unwrap() / want - 1.0).abs() < 1e-9);
            assert!((c.norms[5] / want.powi(5) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn inverse_decay_examples() {
        let l = M::from_real_diagonal(&[1.0 / E, E]);
        let r = inverse_decay_check(&l, &cv(&[0.0, 1.0]), 20).unwrap();
        assert!((r.norms[20] - (-20.0f64).exp()).abs() < 1e-20);
        assert!(r.passed);
        let j = M::from_real_rows(&[&[2.0, 1.0], &[0.0, 2.0]]).unwrap();
        let r = inverse_decay_check(&j, &cv(&[0.0, 1.0]), 30).unwrap();
        // L⁻ⁿ(0,1) = (−n·2^{−n−1}, 2^{−n}).
        for n in 0..=30 {
            let a = -(n as f64) * 2f64.powi(-(n as i32) - 1);
            let b = 2f64.powi(-(n as i32));
            assert!((r.norms[n] - (a * a + b * b).sqrt()).abs() < 1e-14);
        }
        let r = inverse_decay_check(&l, &cv(&[0.0, 0.0]), 5).unwrap();
        assert!(r.norms.iter().all(|&x| x == 0.0) && r.passed);
        assert!(matches!(
            inverse_decay_check(&M::zeros(2, 2), &cv(&[1.0, 0.0]), 3),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn horizon_and_restricted_decay() {
        let l = M::from_real_rows(&[&[0.5, 1.0], &[0.0, 2.0]]).unwrap();
        let s = spectral_split_default(&l).unwrap();
        let n = decay_horizon(&s);
        assert!(2f64.powi(-(n as i32)) <= 1e-8 && 2f64.powi(-(n as i32) + 1) > 1e-8);
        let x = s.x2.vectors[0].clone();
        assert!(inverse_decay_on(&s, &l, &x, n).unwrap().passed);
        assert!(inverse_decay_on(&s, &l, &cv(&[1.0, 0.0]), n).is_err());
    }

    #[test]
    fn envelope_for_stable_map() {
        let l = M::from_real_rows(&[&[0.5, 3.0], &[0.0, 0.9]]).unwrap();
        let env = stability_envelope(&l, 100).unwrap();
        assert!(env.rate > 0.0);
        for (n, &a) in env.norms.iter().enumerate() {
            assert!(a <= env.bound(n) * (1.0 + 1e-12));
        }
        assert!(stability_envelope(&M::identity(2), 50).is_none());
    }
}
