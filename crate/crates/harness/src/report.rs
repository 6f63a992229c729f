use std::collections::BTreeMap;

use floquet_core::forced::BoundednessStatus;
use floquet_core::spectral::DichotomyClass;
use floquet_core::system::Side;
use floquet_core::{Error, Sweep, Verdict};
use serde::Serialize;

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TheoremId {
    T3_2,
    T3_3,
    T3_5,
    T3_4_stability,
    Example3_6,
    T2_1_growth,
}

impl TheoremId {
    pub const ALL: [TheoremId; 6] = [
        TheoremId::T3_2,
        TheoremId::T3_3,
        TheoremId::T3_5,
        TheoremId::T3_4_stability,
        TheoremId::Example3_6,
        TheoremId::T2_1_growth,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T3_2 => "T3_2",
            TheoremId::T3_3 => "T3_3",
            TheoremId::T3_5 => "T3_5",
            TheoremId::T3_4_stability => "T3_4_stability",
            TheoremId::Example3_6 => "Example3_6",
            TheoremId::T2_1_growth => "T2_1_growth",
        }
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TheoremId {
    type Err = Error;

    /// Accepts the canonical id, case-insensitively, with `.` or `_` separators and an optional
    /// `_stability`/`_growth` suffix left off.
    fn from_str(s: &str) -> Result<Self, Error> {
        let key = s.to_ascii_lowercase().replace('.', "_");
        let id = match key.as_str() {
            "t3_2" => TheoremId::T3_2,
            "t3_3" => TheoremId::T3_3,
            "t3_5" => TheoremId::T3_5,
            "t3_4" | "t3_4_stability" => TheoremId::T3_4_stability,
            "example3_6" | "example_3_6" | "e3_6" => TheoremId::Example3_6,
            "t2_1" | "t2_1_growth" => TheoremId::T2_1_growth,
            _ => return Err(Error::Parse(format!("unknown theorem id `{s}`"))),
        };
        Ok(id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Pass,
    Fail,
    Vacuous,
}

#[derive(Debug, Clone, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    pub evidence: f64,
}

impl Hypothesis {
    pub fn new(name: &str, holds: bool, evidence: f64) -> Self {
        Self {
            name: name.to_string(),
            holds,
            evidence,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Conclusion {
    pub expected: String,
    pub observed: String,
    pub consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRecord {
    pub label: String,
    pub side: Side,
    pub mu: f64,
    pub status: BoundednessStatus,
    pub horizon_periods: usize,
    pub sup: f64,
    pub slope: f64,
    pub slope_ci: f64,
    pub growth_ratio: f64,
    pub drift: f64,
    #[serde(skip)]
    pub per_period_sup: Vec<f64>,
}

impl ProbeRecord {
    pub fn new(label: impl Into<String>, side: Side, mu: f64, v: &Verdict) -> Self {
        Self {
            label: label.into(),
            side,
            mu,
            status: v.status,
            horizon_periods: v.horizon_periods,
            sup: v.sup,
            slope: v.slope,
            slope_ci: v.slope_ci,
            growth_ratio: v.growth_ratio,
            drift: v.drift,
            per_period_sup: v.per_period_sup.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub label: String,
    pub side: Side,
    pub grid_points: usize,
    pub k_estimate: f64,
    pub argmax_mu: f64,
    pub bounded: usize,
    pub linear_growth: usize,
    pub inconclusive: usize,
    pub unbounded_at: Vec<f64>,
    #[serde(skip)]
    pub result: Sweep,
}

impl SweepSummary {
    pub fn new(label: impl Into<String>, sweep: Sweep) -> Self {
        let count = |s| sweep.statuses.iter().filter(|&&x| x == s).count();
        Self {
            label: label.into(),
            side: sweep.side,
            grid_points: sweep.mu_grid.len(),
            k_estimate: sweep.k_estimate,
            argmax_mu: sweep.argmax_mu,
            bounded: count(BoundednessStatus::Bounded),
            linear_growth: count(BoundednessStatus::LinearGrowth),
            inconclusive: count(BoundednessStatus::Inconclusive),
            unbounded_at: sweep.unbounded_at.clone(),
            result: sweep,
        }
    }

    pub fn all_bounded(&self) -> bool {
        self.bounded == self.grid_points
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub theorem_id: TheoremId,
    pub system: String,
    pub classification: Option<DichotomyClass>,
    pub hypotheses_status: Vec<Hypothesis>,
    pub conclusion_status: Conclusion,
    pub outcome: Outcome,
    pub metrics: BTreeMap<String, f64>,
    pub probes: Vec<ProbeRecord>,
    pub sweeps: Vec<SweepSummary>,
    /// Paths of files written for this report, filled in by the caller.
    pub artifacts: Vec<String>,
}

impl TheoremReport {
    /// Vacuous when any hypothesis fails, otherwise pass iff the conclusion is consistent.
    pub fn assemble(
        theorem_id: TheoremId,
        system: &str,
        classification: Option<DichotomyClass>,
        hypotheses: Vec<Hypothesis>,
        conclusion: Conclusion,
    ) -> Self {
        let outcome = if hypotheses.iter().any(|h| !h.holds) {
            Outcome::Vacuous
        } else if conclusion.consistent {
            Outcome::Pass
        } else {
            Outcome::Fail
        };
        Self {
            theorem_id,
            system: system.to_string(),
            classification,
            hypotheses_status: hypotheses,
            conclusion_status: conclusion,
            outcome,
            metrics: BTreeMap::new(),
            probes: Vec::new(),
            sweeps: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn consistent(&self) -> bool {
        self.outcome != Outcome::Fail
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }
}
