use floquet_core::forced::{mu_grid, uniform_bound_sweep, MuGridSpec};
use floquet_core::linalg::{vector, DEFAULT_RANK_TOL};
use floquet_core::propagator::Propagation;
use floquet_core::spectral::{
    classify, dichotomy_projection, spectral_split, weak_projection, DichotomyVerdict, DEFAULT_CIRCLE_TOL,
};
use floquet_core::system::Side;
use floquet_core::{Matrix, Propagator, Result, Settings, Split, System, C64};

use crate::report::SweepSummary;

pub const DEFAULT_SEED: u64 = 0xF10C;
/// Condition limit for `Φ_μ(q)`, `Ψ_μ(q)` in the invertibility hypotheses.
pub const HARNESS_COND_LIMIT: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub settings: Settings,
    pub circle_tol: f64,
    pub seed: u64,
    /// Forcing vectors; `None` means the standard basis plus the all-ones vector.
    pub b_set: Option<Vec<Vec<C64>>>,
    /// Uniform points of the base `μ` grid; refinement checks double it.
    pub mu_points: usize,
    /// Probe horizon in periods; `None` starts at 100 and doubles while inconclusive.
    pub horizon: Option<usize>,
    pub cond_limit: f64,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            settings: Settings::default(),
            circle_tol: DEFAULT_CIRCLE_TOL,
            seed: DEFAULT_SEED,
            b_set: None,
            mu_points: 64,
            horizon: None,
            cond_limit: HARNESS_COND_LIMIT,
        }
    }
}

/// Propagation, spectral split and projection of one system.
#[derive(Debug, Clone)]
pub struct SystemAnalysis {
    pub label: String,
    pub propagation: Propagator,
    pub verdict: DichotomyVerdict<f64>,
    pub split: Split,
    /// Dichotomy projection when the spectrum avoids the circle band, otherwise the
    /// projection onto the non-expanding part.
    pub projection: Matrix,
}

impl SystemAnalysis {
    pub fn new(system: System, cfg: &HarnessConfig) -> Result<Self> {
        let label = system.label.clone();
        let propagation = Propagation::new(system, cfg.settings.clone())?;
        Self::from_propagation(label, propagation, cfg)
    }

    pub fn from_propagation(label: String, propagation: Propagator, cfg: &HarnessConfig) -> Result<Self> {
        let l = propagation.monodromy();
        let verdict = classify(l, cfg.circle_tol)?;
        let split = spectral_split(l, cfg.circle_tol, DEFAULT_RANK_TOL)?;
        let projection = if split.is_circle_free() {
            dichotomy_projection(&split)?
        } else {
            weak_projection(&split)?
        };
        Ok(Self {
            label,
            propagation,
            verdict,
            split,
            projection,
        })
    }

    pub fn dimension(&self) -> usize {
        self.propagation.dimension()
    }

    pub fn period(&self) -> f64 {
        self.propagation.period()
    }

    pub fn b_set(&self, cfg: &HarnessConfig) -> Vec<Vec<C64>> {
        if let Some(b) = &cfg.b_set {
            return b.clone();
        }
        let m = self.dimension();
        let mut out: Vec<Vec<C64>> = (0..m).map(|k| vector::basis(m, k)).collect();
        if m > 1 {
            out.push(vec![C64::new(1.0, 0.0); m]);
        }
        out
    }

    /// Uniform grid on `[0, 2π/q)` plus resonant and near-circle frequencies.
    pub fn mu_grid(&self, points: usize) -> Vec<f64> {
        let spec = MuGridSpec {
            points,
            ..MuGridSpec::default()
        };
        mu_grid(self.period(), &spec, Some(&self.split))
    }

    /// Smallest `| |λ| − 1 |` over the spectrum.
    pub fn circle_gap(&self) -> f64 {
        self.verdict
            .moduli
            .iter()
            .map(|r| (r - 1.0).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn sweeps(
        &self,
        p: &Matrix,
        b_set: &[Vec<C64>],
        sides: &[Side],
        grid: &[f64],
        cfg: &HarnessConfig,
    ) -> Result<Vec<SweepSummary>> {
        let mut out = Vec::with_capacity(b_set.len() * sides.len());
        for (k, b) in b_set.iter().enumerate() {
            for &side in sides {
                let sweep = uniform_bound_sweep(&self.propagation, b, p, side, grid, cfg.horizon, Some(&self.split))?;
                out.push(SweepSummary::new(format!("b{k}"), sweep));
            }
        }
        Ok(out)
    }
}
