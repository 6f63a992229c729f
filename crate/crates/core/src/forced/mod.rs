//! Forced responses `X(t) = ∫₀ᵗ U(t,s)e^{iμs}Pb ds` and `Y(t) = ∫₀ᵗ U(t,s)⁻¹e^{iμs}(I−P)b ds`:
//! direct sampling, the periodic decomposition, boundedness probes and μ sweeps.

mod export;
mod periodic;
mod probe;

use num_complex::Complex;

pub use export::{
    read_period_sup_csv, read_sweep_csv, read_trace_csv, write_period_sup_csv, write_sweep_csv, write_trace_csv,
    SweepRow,
};
pub use periodic::{
    effective_vector, eval_periodic_decomposition, geometric_sum_closed, Offset, PeriodicEvaluator, PURGE_TOL,
    RESONANCE_TOL,
};
pub use probe::{
    boundedness_probe, boundedness_probe_adaptive, classify_sequence, mu_grid, uniform_bound_sweep, BoundednessStatus,
    BoundednessVerdict, MuGridSpec, SweepResult, DEFAULT_HORIZON, MAX_HORIZON,
};

use crate::error::{Error, Result};
use crate::linalg::{vector, ComplexMatrix};
use crate::propagator::Propagation;
use crate::scalar::Real;
use crate::system::{ForcingSpec, Side};

/// A sampled forced trajectory starting from `X(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcedTrace<T> {
    pub sample_times: Vec<T>,
    pub values: Vec<Vec<Complex<T>>>,
    pub sup_norm: T,
    /// Max of `‖x‖` over samples in `[kq, (k+1)q]`, one entry per period.
    pub per_period_sup: Vec<T>,
}

impl<T: Real> ForcedTrace<T> {
    pub fn from_samples(times: Vec<T>, values: Vec<Vec<Complex<T>>>, period: T) -> Self {
        let norms: Vec<T> = values.iter().map(|v| vector::norm(v)).collect();
        let sup_norm = norms.iter().copied().fold(T::zero(), |a, b| a.max(b));
        let mut per_period_sup: Vec<T> = Vec::new();
        let eps = period * T::lit(1e-9);
        for (&t, &x) in times.iter().zip(&norms) {
            // Samples on a period boundary count for both adjacent windows.
            let k = ((t + eps) / period).floor().to_usize().unwrap_or(0);
            let lo = ((t - eps) / period).floor().max(T::zero()).to_usize().unwrap_or(0);
            for w in lo..=k {
                if per_period_sup.len() <= w {
                    per_period_sup.resize(w + 1, T::zero());
                }
                per_period_sup[w] = per_period_sup[w].max(x);
            }
        }
        let full = ((*times.last().unwrap_or(&T::zero()) + eps) / period)
            .floor()
            .to_usize()
            .unwrap_or(0);
        per_period_sup.truncate(full.max(1));
        Self {
            sample_times: times,
            values,
            sup_norm,
            per_period_sup,
        }
    }

    pub fn norms(&self) -> Vec<T> {
        self.values.iter().map(|v| vector::norm(v)).collect()
    }
}

/// Integrates the forced problem directly on `[0, t_max]`, sampled `samples_per_period` times per period.
pub fn eval_direct<T: Real>(
    prop: &Propagation<T>,
    forcing: &ForcingSpec<T>,
    p: &ComplexMatrix<T>,
    t_max: T,
    samples_per_period: usize,
) -> Result<ForcedTrace<T>> {
    let q = prop.period();
    if t_max < q {
        return Err(Error::InvalidArgument(format!(
            "t_max {t_max} shorter than one period {q}"
        )));
    }
    if samples_per_period == 0 {
        return Err(Error::InvalidArgument("samples_per_period must be positive".into()));
    }
    let c = effective_vector(p, forcing)?;
    let h = q / T::from_usize_lossy(samples_per_period);
    let count = (t_max / h + T::lit(1e-9))
        .floor()
        .to_usize()
        .expect("finite sample count");
    let mut times: Vec<T> = (0..=count).map(|k| h * T::from_usize_lossy(k)).collect();
    if *times.last().expect("nonempty") < t_max * (T::one() - T::lit(1e-12)) {
        times.push(t_max);
    }
    let values = match forcing.side {
        Side::Forward => prop.forced_forward_path(forcing.mu, &c, &times)?,
        Side::Adjoint => prop.forced_adjoint_path(forcing.mu, &c, &times)?,
    };
    Ok(ForcedTrace::from_samples(times, values, q))
}
