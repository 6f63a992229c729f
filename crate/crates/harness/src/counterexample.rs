use floquet_core::forced::{boundedness_probe, geometric_sum_closed, BoundednessStatus, DEFAULT_HORIZON};
use floquet_core::linalg::vector;
use floquet_core::spectral::{classify, invertibility_check_against, DichotomyClass};
use floquet_core::system::{builtin, Side};
use floquet_core::{Error, Forcing, Matrix, Result, C64};

use crate::analysis::{HarnessConfig, SystemAnalysis};
use crate::report::{Conclusion, Hypothesis, Outcome, ProbeRecord, TheoremId, TheoremReport};

const VANISH_TOL: f64 = 1e-7;
const PARTIAL_SUM_TERMS: u32 = 200;

/// The rotation `A = [[0, 1], [−1, 0]]`, `q = 2π`: `L = I`, `Φ_0(2π) = Ψ_0(2π) = 0`, and the forced
/// problems stay bounded although the monodromy is not dichotomic.
///
/// Forward probes use `P = I` and adjoint probes `P = 0`, so both drive the full vector `b`.
pub fn reproduce_example_3_6(cfg: &HarnessConfig) -> Result<TheoremReport> {
    let example =
        builtin::<f64>("rotation").ok_or_else(|| Error::InvalidArgument("rotation builtin missing".into()))?;
    let a = SystemAnalysis::new(example.system, cfg)?;
    let prop = &a.propagation;
    let q = a.period();
    let m = a.dimension();
    let identity = Matrix::identity(m);

    let l_err = (prop.monodromy().clone() - identity.clone()).frobenius_norm();
    let phi0 = prop.forced_forward_matrix(0.0, q)?;
    let psi0 = prop.forced_adjoint_matrix(0.0, q)?;
    let phi_check = invertibility_check_against(&phi0, cfg.cond_limit, prop.forward_scale());
    let class = classify(prop.monodromy(), cfg.circle_tol)?.class;

    let z = C64::from_polar(1.0, 0.5 * q);
    let off_resonant_bound = 2.0 / (C64::new(1.0, 0.0) - z).norm();
    let worst_partial = (1..=PARTIAL_SUM_TERMS)
        .map(|n| geometric_sum_closed(&Matrix::identity(1), z, n).map(|s| s[(0, 0)].norm()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let hyps = vec![
        Hypothesis::new("monodromy_is_identity", l_err <= VANISH_TOL, l_err),
        Hypothesis::new(
            "Phi_0_vanishes",
            phi0.frobenius_norm() <= VANISH_TOL,
            phi0.frobenius_norm(),
        ),
        Hypothesis::new("Phi_0_singular", !phi_check.is_invertible(), phi_check.condition),
        Hypothesis::new(
            "Psi_0_vanishes",
            psi0.frobenius_norm() <= VANISH_TOL,
            psi0.frobenius_norm(),
        ),
        Hypothesis::new("non_dichotomic", class == DichotomyClass::NonDichotomic, a.circle_gap()),
        Hypothesis::new(
            "off_resonant_partial_sums_bounded",
            worst_partial <= off_resonant_bound * (1.0 + 1e-12),
            worst_partial / off_resonant_bound,
        ),
    ];

    let span = std::f64::consts::TAU / q;
    let mut mus = vec![0.0, 0.5, 1.0, span];
    mus.sort_by(f64::total_cmp);
    mus.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * span);
    let horizon = cfg.horizon.unwrap_or(DEFAULT_HORIZON);
    let zero = Matrix::zeros(m, m);
    let mut probes = Vec::new();
    for &mu in &mus {
        for k in 0..m {
            for (side, p) in [(Side::Forward, &identity), (Side::Adjoint, &zero)] {
                let forcing = Forcing::new(mu, vector::basis(m, k), side);
                let v = boundedness_probe(prop, &forcing, p, horizon, Some(&a.split))?;
                probes.push(ProbeRecord::new(format!("e{k}"), side, mu, &v));
            }
        }
    }
    let unbounded: Vec<String> = probes
        .iter()
        .filter(|p| p.status != BoundednessStatus::Bounded)
        .map(|p| format!("{} {} mu={} {}", p.label, p.side.as_str(), p.mu, p.status))
        .collect();
    let all_bounded = unbounded.is_empty();
    let conclusion = Conclusion {
        expected: "boundedness without dichotomy: every probe Bounded while the invertibility hypothesis fails".into(),
        observed: if all_bounded {
            format!("all {} probes Bounded; monodromy {class}", probes.len())
        } else {
            format!(
                "{} of {} probes not Bounded: {}",
                unbounded.len(),
                probes.len(),
                unbounded.join("; ")
            )
        },
        consistent: all_bounded,
    };
    let assertions_hold = hyps.iter().all(|h| h.holds);
    let mut report = TheoremReport::assemble(TheoremId::Example3_6, &a.label, Some(class), hyps, conclusion);
    report.outcome = if assertions_hold && all_bounded {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    report.metrics.insert("monodromy_minus_identity".into(), l_err);
    report.metrics.insert("Phi_0_norm".into(), phi0.frobenius_norm());
    report.metrics.insert("Psi_0_norm".into(), psi0.frobenius_norm());
    report.metrics.insert("Phi_0_condition".into(), phi_check.condition);
    report.metrics.insert("partial_sum_bound".into(), off_resonant_bound);
    report.metrics.insert("partial_sum_max".into(), worst_partial);
    report.probes = probes;
    Ok(report)
}
