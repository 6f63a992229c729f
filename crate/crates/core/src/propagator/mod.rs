//! Fundamental solutions, the evolution family `U(t,s) = Φ(t)Φ⁻¹(s)` and the forced integrals
//! `Φ_μ(t) = ∫₀ᵗ U(t,s)e^{iμs} ds`, `Ψ_μ(t) = ∫₀ᵗ U(t,s)⁻¹e^{iμs} ds`.

mod integrator;

use num_complex::Complex;

pub use integrator::{IntegratorSettings, Method};

use crate::error::{Error, Result};
use crate::linalg::{invert, singular_values, ComplexMatrix, DEFAULT_COND_LIMIT};
use crate::scalar::{unit_phase, Real};
use crate::system::PeriodicSystem;
use integrator::{integrate, left_mul, neg_right_mul};

type C<T> = Complex<T>;

/// `‖U(t,s)‖ ≤ M e^{ω(t−s)}` for `t ≥ s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthConstants<T> {
    pub m: T,
    pub omega: T,
}

impl<T: Real> GrowthConstants<T> {
    pub fn bound(&self, elapsed: T) -> T {
        self.m * (self.omega * elapsed).exp()
    }
}

fn identity_state<T: Real>(m: usize) -> Vec<C<T>> {
    ComplexMatrix::<T>::identity(m).into_data()
}

fn to_matrix<T: Real>(m: usize, data: Vec<C<T>>) -> ComplexMatrix<T> {
    ComplexMatrix::new(m, m, data).expect("state has m² entries")
}

/// `Φ(t)`: solution of `X' = A(t)X`, `X(0) = I` (integrated backwards for `t < 0`).
pub fn fundamental_solution<T: Real>(
    system: &PeriodicSystem<T>,
    t: T,
    settings: &IntegratorSettings<T>,
) -> Result<ComplexMatrix<T>> {
    fundamental_between(system, T::zero(), t, identity_state(system.dimension), settings)
}

fn fundamental_between<T: Real>(
    system: &PeriodicSystem<T>,
    t0: T,
    t1: T,
    mut y: Vec<C<T>>,
    settings: &IntegratorSettings<T>,
) -> Result<ComplexMatrix<T>> {
    integrate(system, settings, t0, t1, &mut y, |_, a, y, dy| left_mul(a, y, dy))?;
    Ok(to_matrix(system.dimension, y))
}

/// `Φ⁻¹(t)`: solution of `X' = −X·A(t)`, `X(0) = I`.
pub fn inverse_fundamental<T: Real>(
    system: &PeriodicSystem<T>,
    t: T,
    settings: &IntegratorSettings<T>,
) -> Result<ComplexMatrix<T>> {
    inverse_between(system, T::zero(), t, identity_state(system.dimension), settings)
}

fn inverse_between<T: Real>(
    system: &PeriodicSystem<T>,
    t0: T,
    t1: T,
    mut y: Vec<C<T>>,
    settings: &IntegratorSettings<T>,
) -> Result<ComplexMatrix<T>> {
    integrate(system, settings, t0, t1, &mut y, |_, a, y, dy| neg_right_mul(a, y, dy))?;
    Ok(to_matrix(system.dimension, y))
}

/// Poincaré map `L = U(q, 0) = Φ(q)`.
pub fn monodromy<T: Real>(system: &PeriodicSystem<T>, settings: &IntegratorSettings<T>) -> Result<ComplexMatrix<T>> {
    fundamental_solution(system, system.period, settings)
}

/// `U(t,s)`; builds a [`Propagation`], so prefer that type for repeated queries.
pub fn evolution<T: Real>(
    system: &PeriodicSystem<T>,
    t: T,
    s: T,
    settings: &IntegratorSettings<T>,
) -> Result<ComplexMatrix<T>> {
    Propagation::new(system.clone(), settings.clone())?.evolution(t, s)
}

/// `Φ_μ(t)c`, the solution of `x' = A(t)x + e^{iμt}c`, `x(0) = 0`.
pub fn forced_integral_forward<T: Real>(
    system: &PeriodicSystem<T>,
    mu: T,
    c: &[C<T>],
    t: T,
    settings: &IntegratorSettings<T>,
) -> Result<Vec<C<T>>> {
    check_len(system.dimension, c.len())?;
    let mut y = vec![C::new(T::zero(), T::zero()); c.len()];
    integrate(system, settings, T::zero(), t, &mut y, |tau, a, y, dy| {
        left_mul(a, y, dy);
        let e = unit_phase(mu * tau);
        for (d, &ci) in dy.iter_mut().zip(c) {
            *d += e * ci;
        }
    })?;
    Ok(y)
}

/// `Φ_μ(t)` as a matrix: `X' = A(t)X + e^{iμt}I`, `X(0) = 0`.
pub fn forced_matrix_forward<T: Real>(
    system: &PeriodicSystem<T>,
    mu: T,
    t: T,
    settings: &IntegratorSettings<T>,
) -> Result<ComplexMatrix<T>> {
    let m = system.dimension;
    let mut y = vec![C::new(T::zero(), T::zero()); m * m];
    integrate(system, settings, T::zero(), t, &mut y, |tau, a, y, dy| {
        left_mul(a, y, dy);
        let e = unit_phase(mu * tau);
        for i in 0..m {
            dy[i * m + i] += e;
        }
    })?;
    Ok(to_matrix(m, y))
}

/// `Ψ_μ(t)`: `Y' = −Y·A(t) + e^{iμt}I`, `Y(0) = 0`.
pub fn forced_matrix_adjoint<T: Real>(
    system: &PeriodicSystem<T>,
    mu: T,
    t: T,
    settings: &IntegratorSettings<T>,
) -> Result<ComplexMatrix<T>> {
    let m = system.dimension;
    let mut y = vec![C::new(T::zero(), T::zero()); m * m];
    integrate(system, settings, T::zero(), t, &mut y, |tau, a, y, dy| {
        neg_right_mul(a, y, dy);
        let e = unit_phase(mu * tau);
        for i in 0..m {
            dy[i * m + i] += e;
        }
    })?;
    Ok(to_matrix(m, y))
}

/// `Ψ_μ(t)c`.
pub fn forced_integral_adjoint<T: Real>(
    system: &PeriodicSystem<T>,
    mu: T,
    c: &[C<T>],
    t: T,
    settings: &IntegratorSettings<T>,
) -> Result<Vec<C<T>>> {
    check_len(system.dimension, c.len())?;
    Ok(forced_matrix_adjoint(system, mu, t, settings)?.mul_vec(c))
}

fn check_increasing<T: Real>(prev: T, t: T) -> Result<()> {
    if t < prev {
        Err(Error::InvalidArgument(
            "path times must be non-negative and increasing".into(),
        ))
    } else {
        Ok(())
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Splits `t = nq + r` with `r ∈ [0, q)`.
pub fn split_period<T: Real>(t: T, q: T) -> (i64, T) {
    let mut n = (t / q).floor();
    let mut r = t - n * q;
    if r < T::zero() {
        r += q;
        n -= T::one();
    }
    if r >= q {
        r -= q;
        n += T::one();
    }
    (n.to_i64().expect("period count fits i64"), r)
}

const GROWTH_GRID: usize = 20;

/// A system with its monodromy, inverse monodromy and growth data cached.
/// All queries take `&self` and may run concurrently.
#[derive(Debug, Clone)]
pub struct Propagation<T> {
    system: PeriodicSystem<T>,
    settings: IntegratorSettings<T>,
    monodromy: ComplexMatrix<T>,
    monodromy_inverse: ComplexMatrix<T>,
    growth: GrowthConstants<T>,
    forward_scale: T,
    adjoint_scale: T,
}

impl<T: Real> Propagation<T> {
    pub fn new(system: PeriodicSystem<T>, settings: IntegratorSettings<T>) -> Result<Self> {
        settings.validate(system.period)?;
        let q = system.period;
        let m = system.dimension;
        let nodes: Vec<T> = (0..GROWTH_GRID)
            .map(|k| q * T::from_usize_lossy(k) / T::from_usize_lossy(GROWTH_GRID - 1))
            .collect();
        let mut phi = Vec::with_capacity(GROWTH_GRID);
        let mut phi_inv = Vec::with_capacity(GROWTH_GRID);
        let (mut y, mut z) = (identity_state::<T>(m), identity_state::<T>(m));
        let mut prev = T::zero();
        for &t in &nodes {
            let a = fundamental_between(&system, prev, t, y, &settings)?;
            let b = inverse_between(&system, prev, t, z, &settings)?;
            y = a.data().to_vec();
            z = b.data().to_vec();
            phi.push(a);
            phi_inv.push(b);
            prev = t;
        }
        let monodromy = phi[GROWTH_GRID - 1].clone();
        let monodromy_inverse = phi_inv[GROWTH_GRID - 1].clone();
        invert(&monodromy, T::lit(DEFAULT_COND_LIMIT))?;

        let norm2 = |a: &ComplexMatrix<T>| singular_values(a)[0];
        let mut samples = Vec::new();
        for i in 0..GROWTH_GRID {
            for j in 0..=i {
                let u = phi[i].matmul(&phi_inv[j]);
                samples.push((nodes[i] - nodes[j], norm2(&u)));
            }
        }
        let growth = fit_growth(&samples);

        let h = q / T::from_usize_lossy(GROWTH_GRID - 1);
        let trap = |vals: Vec<T>| {
            let n = vals.len();
            let inner: T = vals[1..n - 1].iter().copied().sum();
            h * (inner + (vals[0] + vals[n - 1]) * T::lit(0.5))
        };
        let forward_scale = trap(phi_inv.iter().map(|p| norm2(&monodromy.matmul(p))).collect());
        let adjoint_scale = trap(phi.iter().map(|p| norm2(&p.matmul(&monodromy_inverse))).collect());

        Ok(Self {
            system,
            settings,
            monodromy,
            monodromy_inverse,
            growth,
            forward_scale,
            adjoint_scale,
        })
    }

    pub fn system(&self) -> &PeriodicSystem<T> {
        &self.system
    }

    pub fn settings(&self) -> &IntegratorSettings<T> {
        &self.settings
    }

    pub fn period(&self) -> T {
        self.system.period
    }

    pub fn dimension(&self) -> usize {
        self.system.dimension
    }

    /// `L = U(q, 0)`.
    pub fn monodromy(&self) -> &ComplexMatrix<T> {
        &self.monodromy
    }

    /// `L⁻¹ = Φ⁻¹(q)`, integrated directly rather than by inversion.
    pub fn monodromy_inverse(&self) -> &ComplexMatrix<T> {
        &self.monodromy_inverse
    }

    pub fn growth_constants(&self) -> GrowthConstants<T> {
        self.growth
    }

    /// Quadrature of `‖U(q,s)‖` over one period: the natural size of `Φ_μ(q)`.
    pub fn forward_scale(&self) -> T {
        self.forward_scale
    }

    /// Quadrature of `‖U(q,s)⁻¹‖` over one period: the natural size of `Ψ_μ(q)`.
    pub fn adjoint_scale(&self) -> T {
        self.adjoint_scale
    }

    /// `Lⁿ` for any integer `n`.
    pub fn monodromy_power(&self, n: i64) -> ComplexMatrix<T> {
        let e = u32::try_from(n.unsigned_abs()).expect("period count fits u32");
        if n >= 0 {
            self.monodromy.pow(e)
        } else {
            self.monodromy_inverse.pow(e)
        }
    }

    /// `Φ(r)` for `r ∈ [0, q]`, integrated directly.
    pub fn fundamental_in_period(&self, r: T) -> Result<ComplexMatrix<T>> {
        fundamental_solution(&self.system, r, &self.settings)
    }

    /// `Φ⁻¹(r)` for `r ∈ [0, q]`, integrated directly.
    pub fn inverse_in_period(&self, r: T) -> Result<ComplexMatrix<T>> {
        inverse_fundamental(&self.system, r, &self.settings)
    }

    /// `Φ(t_k)` at increasing times `0 ≤ t_0 ≤ t_1 ≤ …`, integrating once along the path.
    pub fn fundamental_path(&self, times: &[T]) -> Result<Vec<ComplexMatrix<T>>> {
        self.path(times, false)
    }

    /// `Φ⁻¹(t_k)` at increasing times, integrating once along the path.
    pub fn inverse_path(&self, times: &[T]) -> Result<Vec<ComplexMatrix<T>>> {
        self.path(times, true)
    }

    fn path(&self, times: &[T], inverse: bool) -> Result<Vec<ComplexMatrix<T>>> {
        let m = self.dimension();
        let mut state = identity_state::<T>(m);
        let mut prev = T::zero();
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            check_increasing(prev, t)?;
            let x = if inverse {
                inverse_between(&self.system, prev, t, state, &self.settings)?
            } else {
                fundamental_between(&self.system, prev, t, state, &self.settings)?
            };
            state = x.data().to_vec();
            out.push(x);
            prev = t;
        }
        Ok(out)
    }

    /// `Φ(t) = Φ(r)Lⁿ`.
    pub fn fundamental(&self, t: T) -> Result<ComplexMatrix<T>> {
        let (n, r) = split_period(t, self.period());
        Ok(self.fundamental_in_period(r)?.matmul(&self.monodromy_power(n)))
    }

    /// `Φ⁻¹(t) = L⁻ⁿΦ⁻¹(r)`.
    pub fn inverse_fundamental(&self, t: T) -> Result<ComplexMatrix<T>> {
        let (n, r) = split_period(t, self.period());
        Ok(self.monodromy_power(-n).matmul(&self.inverse_in_period(r)?))
    }

    /// `U(t,s) = Φ(r_t) L^{n_t − n_s} Φ⁻¹(r_s)`.
    pub fn evolution(&self, t: T, s: T) -> Result<ComplexMatrix<T>> {
        let q = self.period();
        let (nt, rt) = split_period(t, q);
        let (ns, rs) = split_period(s, q);
        let left = self.fundamental_in_period(rt)?;
        let right = self.inverse_in_period(rs)?;
        Ok(left.matmul(&self.monodromy_power(nt - ns)).matmul(&right))
    }

    /// `V(t,s) = U(t,s)⁻¹ = U(s,t)`.
    pub fn inverse_evolution(&self, t: T, s: T) -> Result<ComplexMatrix<T>> {
        self.evolution(s, t)
    }

    pub fn forced_forward(&self, mu: T, c: &[C<T>], t: T) -> Result<Vec<C<T>>> {
        forced_integral_forward(&self.system, mu, c, t, &self.settings)
    }

    pub fn forced_adjoint(&self, mu: T, c: &[C<T>], t: T) -> Result<Vec<C<T>>> {
        forced_integral_adjoint(&self.system, mu, c, t, &self.settings)
    }

    pub fn forced_forward_matrix(&self, mu: T, t: T) -> Result<ComplexMatrix<T>> {
        forced_matrix_forward(&self.system, mu, t, &self.settings)
    }

    pub fn forced_adjoint_matrix(&self, mu: T, t: T) -> Result<ComplexMatrix<T>> {
        forced_matrix_adjoint(&self.system, mu, t, &self.settings)
    }

    /// `Φ_μ(t_k)c` at increasing times `0 ≤ t_0 ≤ t_1 ≤ …`.
    pub fn forced_forward_path(&self, mu: T, c: &[C<T>], times: &[T]) -> Result<Vec<Vec<C<T>>>> {
        check_len(self.dimension(), c.len())?;
        let mut y = vec![C::new(T::zero(), T::zero()); c.len()];
        let mut prev = T::zero();
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            check_increasing(prev, t)?;
            integrate(&self.system, &self.settings, prev, t, &mut y, |tau, a, y, dy| {
                left_mul(a, y, dy);
                let e = unit_phase(mu * tau);
                for (d, &ci) in dy.iter_mut().zip(c) {
                    *d += e * ci;
                }
            })?;
            out.push(y.clone());
            prev = t;
        }
        Ok(out)
    }

    /// `Ψ_μ(t_k)c` at increasing times.
    pub fn forced_adjoint_path(&self, mu: T, c: &[C<T>], times: &[T]) -> Result<Vec<Vec<C<T>>>> {
        check_len(self.dimension(), c.len())?;
        let m = self.dimension();
        let mut y = vec![C::new(T::zero(), T::zero()); m * m];
        let mut prev = T::zero();
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            check_increasing(prev, t)?;
            integrate(&self.system, &self.settings, prev, t, &mut y, |tau, a, y, dy| {
                neg_right_mul(a, y, dy);
                let e = unit_phase(mu * tau);
                for i in 0..m {
                    dy[i * m + i] += e;
                }
            })?;
            out.push(to_matrix(m, y.clone()).mul_vec(c));
            prev = t;
        }
        Ok(out)
    }

    /// `max ‖[Φ(t), Φ⁻¹(s)]‖_F / max(1, ‖Φ(t)‖_F‖Φ⁻¹(s)‖_F)` over the pairs.
    pub fn commutation_residual(&self, pairs: &[(T, T)]) -> Result<T> {
        let mut worst = T::zero();
        for &(t, s) in pairs {
            let a = self.fundamental(t)?;
            let b = self.inverse_fundamental(s)?;
            let scale = (a.frobenius_norm() * b.frobenius_norm()).max(T::one());
            worst = worst.max(a.commutator_norm(&b) / scale);
        }
        Ok(worst)
    }

    /// Deterministic pairs on `[0, q]²` used when no sample set is supplied.
    pub fn default_commutation_pairs(&self) -> Vec<(T, T)> {
        let q = self.period();
        let fr = [0.0, 0.13, 0.29, 0.5, 0.71, 0.87, 1.0];
        let mut out = Vec::new();
        for &a in &fr {
            for &b in &fr {
                out.push((q * T::lit(a), q * T::lit(b)));
            }
        }
        out
    }
}

/// Least-squares fit of `log‖U‖ ≈ log M + ω(t−s)`, with `M` then raised to cover every sample.
fn fit_growth<T: Real>(samples: &[(T, T)]) -> GrowthConstants<T> {
    let tiny = T::min_positive_value();
    let pts: Vec<(T, T)> = samples.iter().map(|&(d, n)| (d, n.max(tiny).ln())).collect();
    let k = T::from_usize_lossy(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / k;
    let my = pts.iter().map(|p| p.1).sum::<T>() / k;
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let omega = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    let log_m = pts
        .iter()
        .map(|&(d, y)| y - omega * d)
        .fold(my - omega * mx, |a, b| a.max(b));
    GrowthConstants {
        m: log_m.exp().max(T::one()),
        omega,
    }
}
