//! Numerical verification of the boundedness/dichotomy theorems for periodic linear systems.
//!
//! Every check works on a [`SystemAnalysis`] built once per system and never mutates it.

mod analysis;
mod checks;
mod counterexample;
pub mod report;

pub use analysis::{HarnessConfig, SystemAnalysis, DEFAULT_SEED, HARNESS_COND_LIMIT};
pub use checks::{
    default_growth_fixtures, verify, verify_t2_1, verify_t3_2, verify_t3_3, verify_t3_4_stability, verify_t3_5,
    COMMUTATION_TOL, K_REFINEMENT_TOL,
};
pub use counterexample::reproduce_example_3_6;
pub use report::{Conclusion, Hypothesis, Outcome, ProbeRecord, SweepSummary, TheoremId, TheoremReport};
