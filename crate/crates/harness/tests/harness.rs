use std::sync::OnceLock;

use floquet_core::forced::BoundednessStatus;
use floquet_core::spectral::{classify, DichotomyClass};
use floquet_core::system::{builtin, Side};
use floquet_core::Matrix;
use floquet_harness::{
    default_growth_fixtures, reproduce_example_3_6, verify, verify_t2_1, HarnessConfig, Outcome, SystemAnalysis,
    TheoremId, TheoremReport,
};

fn analysis(name: &'static str) -> &'static SystemAnalysis {
    static CACHE: OnceLock<Vec<(&'static str, SystemAnalysis)>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        ["hyperbolic-diag", "scalar-zero", "rotation", "damped"]
            .into_iter()
            .map(|n| {
                let sys = builtin::<f64>(n).unwrap().system;
                (n, SystemAnalysis::new(sys, &HarnessConfig::default()).unwrap())
            })
            .collect()
    });
    &all.iter().find(|(n, _)| *n == name).unwrap().1
}

fn run(name: &'static str, id: TheoremId) -> TheoremReport {
    verify(analysis(name), id, &HarnessConfig::default()).unwrap()
}

#[test]
fn t3_2_examples() {
    let r = run("hyperbolic-diag", TheoremId::T3_2);
    assert_eq!(r.outcome, Outcome::Pass, "{:?}", r.conclusion_status);
    assert!(r.hypotheses_status.iter().all(|h| h.holds));
    for h in r.hypotheses_status.iter().filter(|h| h.name.starts_with("P_commutes")) {
        assert!(h.evidence <= 1e-8, "{} = {}", h.name, h.evidence);
    }
    assert!(r.sweeps.iter().all(|s| s.all_bounded()));

    assert_eq!(run("rotation", TheoremId::T3_2).outcome, Outcome::Vacuous);

    let r = run("damped", TheoremId::T3_2);
    assert_eq!(r.outcome, Outcome::Pass);
    assert_eq!(r.metric("P_rank"), Some(2.0));
}

#[test]
fn t3_3_examples() {
    let r = run("scalar-zero", TheoremId::T3_3);
    assert_eq!(r.outcome, Outcome::Pass, "{:?}", r.conclusion_status);
    assert_eq!(r.metric("resonant_mu"), Some(0.0));
    let slope = r.metric("b1_slope").unwrap();
    assert!((slope - 1.0).abs() < 1e-3, "{slope}");
    assert_eq!(r.probes[0].status, BoundednessStatus::LinearGrowth);

    let r = run("rotation", TheoremId::T3_3);
    assert_eq!(r.outcome, Outcome::Vacuous);
    assert!(r.hypotheses_status.iter().any(|h| !h.holds));

    let r = run("hyperbolic-diag", TheoremId::T3_3);
    assert_eq!(r.outcome, Outcome::Pass);
}

#[test]
fn t3_5_examples() {
    let r = run("hyperbolic-diag", TheoremId::T3_5);
    assert_eq!(r.outcome, Outcome::Pass, "{:?}", r.conclusion_status);
    assert!(r.metric("K_max_relative_change").unwrap() < 0.05);
    assert!(r.metric("K_P_coarse").unwrap().is_finite());
    assert!(r.metric("K_I_minus_P_fine").unwrap().is_finite());

    let r = run("scalar-zero", TheoremId::T3_5);
    assert_eq!(r.outcome, Outcome::Pass);
    assert!(r
        .sweeps
        .iter()
        .any(|s| s.side == Side::Forward && s.unbounded_at.contains(&0.0)));

    let r = run("damped", TheoremId::T3_5);
    assert_eq!(r.outcome, Outcome::Pass);
}

#[test]
fn t3_4_examples() {
    assert_eq!(run("damped", TheoremId::T3_4_stability).outcome, Outcome::Pass);
    let r = run("hyperbolic-diag", TheoremId::T3_4_stability);
    assert_eq!(r.outcome, Outcome::Pass, "{:?}", r.conclusion_status);
}

#[test]
fn t2_1_fixtures() {
    let r = verify_t2_1(&default_growth_fixtures(), &HarnessConfig::default()).unwrap();
    assert_eq!(r.outcome, Outcome::Pass, "{:?}", r.conclusion_status);
    assert_eq!(r.metric("identity.residual"), Some(0.0));
    assert_eq!(r.metric("jordan.max_degree"), Some(1.0));
    assert_eq!(r.metric("jordan.components"), Some(1.0));
    assert_eq!(r.metric("diag-e.max_degree"), Some(0.0));
    assert_eq!(r.metric("diag-e.components"), Some(2.0));
}

#[test]
fn example_reproduction() {
    let r = reproduce_example_3_6(&HarnessConfig::default()).unwrap();
    for h in &r.hypotheses_status {
        assert!(h.holds, "{} ({})", h.name, h.evidence);
    }
    assert_eq!(r.classification, Some(DichotomyClass::NonDichotomic));
    for p in &r.probes {
        let resonant = (p.mu - 1.0).abs() < 1e-12;
        let want = if resonant {
            BoundednessStatus::LinearGrowth
        } else {
            BoundednessStatus::Bounded
        };
        assert_eq!(p.status, want, "{} {:?} mu={}", p.label, p.side, p.mu);
    }
    assert_eq!(r.outcome, Outcome::Fail);
}

#[test]
fn reports_are_reproducible_and_pure() {
    let a = analysis("hyperbolic-diag");
    let before = classify(a.propagation.monodromy(), 1e-6).unwrap();
    let l_before: Matrix = a.propagation.monodromy().clone();
    let cfg = HarnessConfig::default();
    let first = serde_json::to_string(&verify(a, TheoremId::T3_5, &cfg).unwrap()).unwrap();
    let second = serde_json::to_string(&verify(a, TheoremId::T3_5, &cfg).unwrap()).unwrap();
    assert_eq!(first, second);
    let g1 = serde_json::to_string(&verify(a, TheoremId::T2_1_growth, &cfg).unwrap()).unwrap();
    let g2 = serde_json::to_string(&verify(a, TheoremId::T2_1_growth, &cfg).unwrap()).unwrap();
    assert_eq!(g1, g2);
    let after = classify(a.propagation.monodromy(), 1e-6).unwrap();
    assert_eq!(before.class, after.class);
    assert_eq!(before.moduli, after.moduli);
    assert_eq!(&l_before, a.propagation.monodromy());
}

#[test]
fn theorem_ids_parse() {
    for id in TheoremId::ALL {
        assert_eq!(id.as_str().parse::<TheoremId>().unwrap(), id);
    }
    assert_eq!("t3.4".parse::<TheoremId>().unwrap(), TheoremId::T3_4_stability);
    assert!("T9_9".parse::<TheoremId>().is_err());
}
