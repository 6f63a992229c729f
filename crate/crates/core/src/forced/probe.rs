use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::periodic::PeriodicEvaluator;
use crate::error::Result;
use crate::linalg::{vector, ComplexMatrix};
use crate::propagator::Propagation;
use crate::scalar::{arg_0_2pi, Real};
use crate::spectral::SpectralSplit;
use crate::stats::linear_fit;
use crate::system::{ForcingSpec, Side};

pub const DEFAULT_HORIZON: usize = 100;
pub const MAX_HORIZON: usize = 400;
const MIN_HORIZON: usize = 20;
const BOUNDED_DRIFT: f64 = 1e-3;
const GROWTH_RATIO: f64 = 10.0;
const SLOPE_SIGMAS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BoundednessStatus {
    Bounded,
    LinearGrowth,
    Inconclusive,
}

impl BoundednessStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Bounded => "Bounded",
            Self::LinearGrowth => "LinearGrowth",
            Self::Inconclusive => "Inconclusive",
        }
    }
}

impl std::str::FromStr for BoundednessStatus {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Bounded" => Ok(Self::Bounded),
            "LinearGrowth" => Ok(Self::LinearGrowth),
            "Inconclusive" => Ok(Self::Inconclusive),
            other => Err(crate::Error::Parse(format!("unknown verdict `{other}`"))),
        }
    }
}

impl std::fmt::Display for BoundednessStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct BoundednessVerdict<T> {
    pub status: BoundednessStatus,
    pub horizon_periods: usize,
    /// Least-squares slope of the per-period sup against `n`.
    pub slope: T,
    /// 95% half-width of the slope (`1.96` standard errors).
    pub slope_ci: T,
    /// `R_N / R_1`.
    pub growth_ratio: T,
    /// `(M_N − M_{N/2}) / M_N` for the running max `M`.
    pub drift: T,
    /// `R_n = max_r ‖X(nq + r)‖` for `n = 1…N`.
    pub per_period_sup: Vec<T>,
    pub sup: T,
}

/// Verdict for a per-period sup sequence `R_1…R_N`.
pub fn classify_sequence<T: Real>(sups: &[T]) -> BoundednessVerdict<T> {
    let n = sups.len();
    let finite = sups.iter().all(|x| x.is_finite());
    let sup = sups.iter().copied().fold(T::zero(), |a, b| a.max(b));
    if !finite {
        return BoundednessVerdict {
            status: BoundednessStatus::LinearGrowth,
            horizon_periods: n,
            slope: T::infinity(),
            slope_ci: T::zero(),
            growth_ratio: T::infinity(),
            drift: T::one(),
            per_period_sup: sups.to_vec(),
            sup: T::infinity(),
        };
    }
    let pts: Vec<(T, T)> = sups
        .iter()
        .enumerate()
        .map(|(k, &r)| (T::from_usize_lossy(k + 1), r))
        .collect();
    let fit = linear_fit(&pts);
    let slope = fit.slope;
    let slope_ci = T::lit(1.96) * fit.slope_se;
    let first = sups[0];
    let last = sups[n - 1];
    let growth_ratio = if first > T::zero() {
        last / first
    } else if last > T::zero() {
        T::infinity()
    } else {
        T::one()
    };
    let mut running = Vec::with_capacity(n);
    let mut acc = T::zero();
    for &r in sups {
        acc = acc.max(r);
        running.push(acc);
    }
    let m_end = running[n - 1];
    let m_half = running[(n / 2).saturating_sub(1)];
    let drift = if m_end > T::zero() {
        (m_end - m_half) / m_end
    } else {
        T::zero()
    };
    let status = if slope > T::zero() && slope > T::lit(SLOPE_SIGMAS) * slope_ci && growth_ratio > T::lit(GROWTH_RATIO)
    {
        BoundednessStatus::LinearGrowth
    } else if drift < T::lit(BOUNDED_DRIFT) {
        BoundednessStatus::Bounded
    } else {
        BoundednessStatus::Inconclusive
    };
    BoundednessVerdict {
        status,
        horizon_periods: n,
        slope,
        slope_ci,
        growth_ratio,
        drift,
        per_period_sup: sups.to_vec(),
        sup,
    }
}

/// Per-period sup over `r ∈ {0, q/4, q/2, 3q/4}` for `n = 1…N`, then [`classify_sequence`].
pub fn boundedness_probe<T: Real>(
    prop: &Propagation<T>,
    forcing: &ForcingSpec<T>,
    p: &ComplexMatrix<T>,
    n_periods: usize,
    split: Option<&SpectralSplit<T>>,
) -> Result<BoundednessVerdict<T>> {
    let n_periods = n_periods.max(MIN_HORIZON);
    let eval = PeriodicEvaluator::new(prop, forcing, p, split)?;
    let q = prop.period();
    let offsets = (0..4)
        .map(|k| eval.offset(q * T::from_usize_lossy(k) / T::lit(4.0)))
        .collect::<Result<Vec<_>>>()?;
    let mut sups = Vec::with_capacity(n_periods);
    for n in 1..=n_periods as u64 {
        let mut best = T::zero();
        for off in &offsets {
            let x = eval.eval_at(off, n)?;
            let v = vector::norm(&x);
            best = if v.is_nan() { T::infinity() } else { best.max(v) };
        }
        sups.push(best);
    }
    Ok(classify_sequence(&sups))
}

/// Starts at [`DEFAULT_HORIZON`] periods and doubles up to [`MAX_HORIZON`] while inconclusive.
pub fn boundedness_probe_adaptive<T: Real>(
    prop: &Propagation<T>,
    forcing: &ForcingSpec<T>,
    p: &ComplexMatrix<T>,
    split: Option<&SpectralSplit<T>>,
) -> Result<BoundednessVerdict<T>> {
    let mut n = DEFAULT_HORIZON;
    loop {
        let v = boundedness_probe(prop, forcing, p, n, split)?;
        if v.status != BoundednessStatus::Inconclusive || n >= MAX_HORIZON {
            return Ok(v);
        }
        n = (n * 2).min(MAX_HORIZON);
    }
}

/// Frequencies probed by a sweep.
#[derive(Debug, Clone)]
pub struct MuGridSpec<T> {
    /// Uniform points on `[0, 2π/q)`.
    pub points: usize,
    pub extra: Vec<T>,
    /// Add `arg(λ)/q` for eigenvalues within this distance of the unit circle.
    pub near_circle: T,
}

impl<T: Real> Default for MuGridSpec<T> {
    fn default() -> Self {
        Self {
            points: 64,
            extra: Vec::new(),
            near_circle: T::lit(1e-3),
        }
    }
}

/// Uniform grid on `[0, 2π/q)`, the resonant set `{0, 2π/q}`, near-circle eigenvalue phases and extras,
/// sorted and de-duplicated.
pub fn mu_grid<T: Real>(q: T, spec: &MuGridSpec<T>, split: Option<&SpectralSplit<T>>) -> Vec<T> {
    let span = T::TAU() / q;
    let mut grid: Vec<T> = (0..spec.points)
        .map(|k| span * T::from_usize_lossy(k) / T::from_usize_lossy(spec.points))
        .collect();
    grid.push(T::zero());
    grid.push(span);
    if let Some(s) = split {
        for e in &s.spectrum.eigenvalues {
            if (e.value.norm() - T::one()).abs() <= spec.near_circle {
                grid.push(arg_0_2pi(e.value) / q);
            }
        }
    }
    grid.extend(spec.extra.iter().copied());
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    let tol = span * T::lit(1e-12);
    grid.dedup_by(|a, b| (*a - *b).abs() <= tol);
    grid
}

#[derive(Debug, Clone)]
pub struct SweepResult<T> {
    pub side: Side,
    pub mu_grid: Vec<T>,
    pub sups: Vec<T>,
    pub statuses: Vec<BoundednessStatus>,
    pub horizons: Vec<usize>,
    pub k_estimate: T,
    pub argmax_mu: T,
    /// Frequencies whose probe reported growth.
    pub unbounded_at: Vec<T>,
}

impl<T: Real> SweepResult<T> {
    pub fn all_bounded(&self) -> bool {
        self.statuses.iter().all(|&s| s == BoundednessStatus::Bounded)
    }
}

/// Boundedness probes for every `μ` in the grid, in parallel; results keep grid order.
#[allow(clippy::too_many_arguments)]
pub fn uniform_bound_sweep<T: Real>(
    prop: &Propagation<T>,
    b: &[Complex<T>],
    p: &ComplexMatrix<T>,
    side: Side,
    grid: &[T],
    n_periods: Option<usize>,
    split: Option<&SpectralSplit<T>>,
) -> Result<SweepResult<T>> {
    let verdicts = grid
        .par_iter()
        .map(|&mu| {
            let forcing = ForcingSpec::new(mu, b.to_vec(), side);
            match n_periods {
                Some(n) => boundedness_probe(prop, &forcing, p, n, split),
                None => boundedness_probe_adaptive(prop, &forcing, p, split),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let sups: Vec<T> = verdicts.iter().map(|v| v.sup).collect();
    let (mut k_estimate, mut argmax_mu) = (T::zero(), grid.first().copied().unwrap_or_else(T::zero));
    for (&mu, &s) in grid.iter().zip(&sups) {
        if s > k_estimate || s.is_nan() {
            k_estimate = s;
            argmax_mu = mu;
        }
    }
    Ok(SweepResult {
        side,
        mu_grid: grid.to_vec(),
        statuses: verdicts.iter().map(|v| v.status).collect(),
        horizons: verdicts.iter().map(|v| v.horizon_periods).collect(),
        unbounded_at: grid
            .iter()
            .zip(&verdicts)
            .filter(|(_, v)| v.status == BoundednessStatus::LinearGrowth)
            .map(|(&mu, _)| mu)
            .collect(),
        sups,
        k_estimate,
        argmax_mu,
    })
}
