use floquet_core::forced::{boundedness_probe, BoundednessStatus, DEFAULT_HORIZON};
use floquet_core::linalg::{solve, svd, vector, DEFAULT_RANK_TOL};
use floquet_core::scalar::arg_0_2pi;
use floquet_core::spectral::{
    default_commutation_mus, growth_profile, invertibility_check_against, projection_report, sample_forced_pairs,
    spectral_split, DichotomyClass,
};
use floquet_core::system::Side;
use floquet_core::{Forcing, Matrix, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{HarnessConfig, SystemAnalysis};
use crate::counterexample::reproduce_example_3_6;
use crate::report::{Conclusion, Hypothesis, ProbeRecord, SweepSummary, TheoremId, TheoremReport};

/// Relative size of `‖PX − XP‖_F` accepted as commuting.
pub const COMMUTATION_TOL: f64 = 1e-8;
/// Largest relative change of a `K` estimate under grid refinement.
pub const K_REFINEMENT_TOL: f64 = 0.05;
const GROWTH_HORIZON: usize = 50;
const GROWTH_SAMPLES: usize = 20;
const DECOMPOSITION_TOL: f64 = 1e-8;

const BOTH: [Side; 2] = [Side::Forward, Side::Adjoint];

fn status_counts(sweeps: &[SweepSummary]) -> (usize, usize, usize) {
    sweeps.iter().fold((0, 0, 0), |(b, g, i), s| {
        (b + s.bounded, g + s.linear_growth, i + s.inconclusive)
    })
}

fn describe_counts(sweeps: &[SweepSummary]) -> String {
    let (b, g, i) = status_counts(sweeps);
    format!("{} probes: {b} Bounded, {g} LinearGrowth, {i} Inconclusive", b + g + i)
}

fn max_k(sweeps: &[SweepSummary], side: Side) -> f64 {
    sweeps
        .iter()
        .filter(|s| s.side == side)
        .map(|s| s.k_estimate)
        .fold(0.0, f64::max)
}

fn relative_change(coarse: f64, fine: f64) -> f64 {
    let scale = coarse.abs().max(fine.abs());
    if scale == 0.0 {
        0.0
    } else if !scale.is_finite() {
        f64::INFINITY
    } else {
        (fine - coarse).abs() / scale
    }
}

/// Forward and adjoint problems driven through the dichotomy projection stay bounded.
pub fn verify_t3_2(a: &SystemAnalysis, b_set: &[Vec<C64>], grid: &[f64], cfg: &HarnessConfig) -> Result<TheoremReport> {
    let class = a.verdict.class;
    let mut hyps = vec![Hypothesis::new("dichotomic", class.is_dichotomic(), a.circle_gap())];
    let expected = "forced solutions bounded for every sampled b and mu on both sides".to_string();
    if !class.is_dichotomic() {
        let conclusion = Conclusion {
            expected,
            observed: format!("not evaluated: monodromy is {class}"),
            consistent: true,
        };
        return Ok(TheoremReport::assemble(
            TheoremId::T3_2,
            &a.label,
            Some(class),
            hyps,
            conclusion,
        ));
    }

    let prop = &a.propagation;
    let p = &a.projection;
    let pairs = sample_forced_pairs(prop, &default_commutation_mus(a.period()))?;
    let rep = projection_report(p, prop.monodromy(), &pairs);
    let l_scale = prop.monodromy().frobenius_norm().max(1.0);
    let phi_scale = prop.forward_scale().max(1.0);
    let psi_scale = prop.adjoint_scale().max(1.0);
    hyps.push(Hypothesis::new(
        "P_commutes_with_L",
        rep.commutation_l <= COMMUTATION_TOL * l_scale,
        rep.commutation_l,
    ));
    hyps.push(Hypothesis::new(
        "P_commutes_with_Phi_mu",
        rep.commutation_phi <= COMMUTATION_TOL * phi_scale,
        rep.commutation_phi,
    ));
    hyps.push(Hypothesis::new(
        "P_commutes_with_Psi_mu",
        rep.commutation_psi <= COMMUTATION_TOL * psi_scale,
        rep.commutation_psi,
    ));

    let sweeps = a.sweeps(p, b_set, &BOTH, grid, cfg)?;
    let all_bounded = sweeps.iter().all(SweepSummary::all_bounded);
    let conclusion = Conclusion {
        expected,
        observed: describe_counts(&sweeps),
        consistent: all_bounded,
    };
    let mut report = TheoremReport::assemble(TheoremId::T3_2, &a.label, Some(class), hyps, conclusion);
    report.metrics.insert("P_rank".into(), rep.rank as f64);
    report
        .metrics
        .insert("P_idempotency_residual".into(), rep.idempotency_residual);
    report.metrics.insert(
        "evolution_commutation_residual".into(),
        prop.commutation_residual(&prop.default_commutation_pairs())?,
    );
    report.metrics.insert("K_P".into(), max_k(&sweeps, Side::Forward));
    report
        .metrics
        .insert("K_I_minus_P".into(), max_k(&sweeps, Side::Adjoint));
    report.sweeps = sweeps;
    Ok(report)
}

/// Frequencies `μ ∈ [0, 2π/q]` with `e^{iμq} = λ`.
fn resonant_mus(lambda: C64, q: f64) -> Vec<f64> {
    let base = arg_0_2pi(lambda) / q;
    let span = std::f64::consts::TAU / q;
    let mut out = vec![base];
    if base <= span * 1e-9 {
        out.push(span);
    }
    out
}

/// Unit vector spanning the (numerical) kernel of `L − λI`.
fn eigenvector(l: &Matrix, lambda: C64) -> Vec<C64> {
    let s = svd(&l.shifted(lambda));
    s.v.column(s.v.cols() - 1)
}

/// Boundedness with invertible `Φ_μ(q)`, `Ψ_μ(q)` forces a dichotomic monodromy; on a map with a
/// unit-circle eigenvalue the forcing `b₁ = Φ_μ(q)⁻¹y` must produce linear growth.
pub fn verify_t3_3(a: &SystemAnalysis, b_set: &[Vec<C64>], grid: &[f64], cfg: &HarnessConfig) -> Result<TheoremReport> {
    let class = a.verdict.class;
    let prop = &a.propagation;
    let q = a.period();
    let check = |mu: f64| -> Result<(f64, f64)> {
        let phi = invertibility_check_against(
            &prop.forced_forward_matrix(mu, q)?,
            cfg.cond_limit,
            prop.forward_scale(),
        );
        let psi = invertibility_check_against(
            &prop.forced_adjoint_matrix(mu, q)?,
            cfg.cond_limit,
            prop.adjoint_scale(),
        );
        Ok((phi.condition, psi.condition))
    };
    let invertible = |(cp, cq): (f64, f64)| cp <= cfg.cond_limit && cq <= cfg.cond_limit;

    let sweeps = a.sweeps(&a.projection, b_set, &BOTH, grid, cfg)?;
    let observed_sweeps = describe_counts(&sweeps);
    let mut hyps = Vec::new();
    let mut probes = Vec::new();
    let mut metrics = std::collections::BTreeMap::new();

    let conclusion = if class.is_dichotomic() {
        let mut worst = (0.0f64, 0.0f64);
        for &mu in grid {
            let c = check(mu)?;
            worst = (worst.0.max(c.0), worst.1.max(c.1));
        }
        hyps.push(Hypothesis::new(
            "Phi_mu_invertible_on_grid",
            worst.0 <= cfg.cond_limit,
            worst.0,
        ));
        hyps.push(Hypothesis::new(
            "Psi_mu_invertible_on_grid",
            worst.1 <= cfg.cond_limit,
            worst.1,
        ));
        Conclusion {
            expected: "monodromy dichotomic".into(),
            observed: format!("monodromy {class}; {observed_sweeps}"),
            consistent: true,
        }
    } else {
        let mut candidates = Vec::new();
        for eig in &a.split.circle_band {
            for mu in resonant_mus(eig.value, q) {
                candidates.push((eig.value, mu, check(mu)?));
            }
        }
        let best = candidates.iter().copied().find(|&(_, _, c)| invertible(c)).or_else(|| {
            candidates
                .iter()
                .copied()
                .min_by(|x, y| x.2 .0.max(x.2 .1).total_cmp(&y.2 .0.max(y.2 .1)))
        });
        let Some((lambda, mu1, conds)) = best else {
            return Err(floquet_core::Error::InvalidArgument(
                "non-dichotomic monodromy without a circle-band eigenvalue".into(),
            ));
        };
        hyps.push(Hypothesis::new(
            "Phi_mu_invertible_at_resonance",
            conds.0 <= cfg.cond_limit,
            conds.0,
        ));
        hyps.push(Hypothesis::new(
            "Psi_mu_invertible_at_resonance",
            conds.1 <= cfg.cond_limit,
            conds.1,
        ));
        metrics.insert("resonant_mu".into(), mu1);
        if invertible(conds) {
            let y = eigenvector(prop.monodromy(), lambda);
            let b1 = solve(&prop.forced_forward_matrix(mu1, q)?, &y)?;
            let forcing = Forcing::new(mu1, b1, Side::Forward);
            let horizon = cfg.horizon.unwrap_or(DEFAULT_HORIZON);
            let v = boundedness_probe(prop, &forcing, &a.projection, horizon, Some(&a.split))?;
            metrics.insert("b1_slope".into(), v.slope);
            let grew = v.status == BoundednessStatus::LinearGrowth;
            probes.push(ProbeRecord::new("b1", Side::Forward, mu1, &v));
            Conclusion {
                expected: "some forced solution unbounded (monodromy not dichotomic)".into(),
                observed: format!(
                    "probe at mu = {mu1} with b1 = Phi_mu(q)^-1 y: {}; {observed_sweeps}",
                    v.status
                ),
                consistent: grew,
            }
        } else {
            Conclusion {
                expected: "some forced solution unbounded (monodromy not dichotomic)".into(),
                observed: format!(
                    "Phi_mu(q) or Psi_mu(q) singular at every resonant frequency; invertibility hypothesis fails, \
                     boundedness need not imply dichotomy; {observed_sweeps}"
                ),
                consistent: true,
            }
        }
    };
    let mut report = TheoremReport::assemble(TheoremId::T3_3, &a.label, Some(class), hyps, conclusion);
    report.metrics = metrics;
    report.probes = probes;
    report.sweeps = sweeps;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn refinement_report(
    id: TheoremId,
    a: &SystemAnalysis,
    p: &Matrix,
    b_set: &[Vec<C64>],
    sides: &[Side],
    cfg: &HarnessConfig,
    expect_bounded: bool,
    expected: &str,
) -> Result<TheoremReport> {
    let coarse = a.sweeps(p, b_set, sides, &a.mu_grid(cfg.mu_points), cfg)?;
    let fine = a.sweeps(p, b_set, sides, &a.mu_grid(2 * cfg.mu_points), cfg)?;
    let unbounded: Vec<f64> = coarse
        .iter()
        .chain(&fine)
        .flat_map(|s| s.unbounded_at.iter().copied())
        .collect();
    let worst_change = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| relative_change(c.k_estimate, f.k_estimate))
        .fold(0.0, f64::max);
    let all_bounded = coarse.iter().chain(&fine).all(SweepSummary::all_bounded);
    let bounded = all_bounded && worst_change < K_REFINEMENT_TOL;
    let mut first_unbounded = unbounded.clone();
    first_unbounded.sort_by(f64::total_cmp);
    first_unbounded.dedup();
    let observed = if bounded {
        format!("uniformly bounded: K stable to {:.2e} under refinement", worst_change)
    } else if !first_unbounded.is_empty() {
        format!("unbounded at mu = {first_unbounded:?}")
    } else {
        format!(
            "not uniformly bounded: {} (K relative change {:.2e})",
            describe_counts(&fine),
            worst_change
        )
    };
    let class = a.verdict.class;
    let conclusion = Conclusion {
        expected: expected.to_string(),
        observed: format!("monodromy {class}; {observed}"),
        consistent: expect_bounded == bounded,
    };
    let mut report = TheoremReport::assemble(id, &a.label, Some(class), Vec::new(), conclusion);
    for &side in sides {
        let key = match side {
            Side::Forward => "K_P",
            Side::Adjoint => "K_I_minus_P",
        };
        report.metrics.insert(format!("{key}_coarse"), max_k(&coarse, side));
        report.metrics.insert(format!("{key}_fine"), max_k(&fine, side));
    }
    report.metrics.insert("K_max_relative_change".into(), worst_change);
    report.sweeps = coarse.into_iter().chain(fine).collect();
    Ok(report)
}

/// Uniform boundedness over the `μ` grid on both sides holds exactly for circle-free monodromies.
pub fn verify_t3_5(a: &SystemAnalysis, b_set: &[Vec<C64>], cfg: &HarnessConfig) -> Result<TheoremReport> {
    refinement_report(
        TheoremId::T3_5,
        a,
        &a.projection,
        b_set,
        &BOTH,
        cfg,
        a.verdict.class.is_dichotomic(),
        "uniformly bounded on both sides iff the monodromy is dichotomic",
    )
}

/// With `P = I`, forward uniform boundedness holds exactly for a stable monodromy.
pub fn verify_t3_4_stability(a: &SystemAnalysis, b_set: &[Vec<C64>], cfg: &HarnessConfig) -> Result<TheoremReport> {
    let identity = Matrix::identity(a.dimension());
    refinement_report(
        TheoremId::T3_4_stability,
        a,
        &identity,
        b_set,
        &[Side::Forward],
        cfg,
        a.verdict.class == DichotomyClass::Stable,
        "forward problem with P = I uniformly bounded iff the monodromy is stable",
    )
}

/// `I`, the 2×2 Jordan block at 1, and `diag(e⁻¹, e)`.
pub fn default_growth_fixtures() -> Vec<(String, Matrix)> {
    let e = std::f64::consts::E;
    vec![
        ("identity".into(), Matrix::identity(2)),
        (
            "jordan".into(),
            Matrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).expect("2x2"),
        ),
        ("diag-e".into(), Matrix::from_real_diagonal(&[1.0 / e, e])),
    ]
}

/// Generalized-eigenspace decomposition of random vectors reproduces `Lⁿz`, and every component grows
/// at most polynomially with degree below its multiplicity.
pub fn verify_t2_1(fixtures: &[(String, Matrix)], cfg: &HarnessConfig) -> Result<TheoremReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst_residual = 0.0f64;
    let mut degrees_ok = true;
    let mut metrics = std::collections::BTreeMap::new();
    for (name, l) in fixtures {
        let m = l.rows();
        let split = spectral_split(l, cfg.circle_tol, DEFAULT_RANK_TOL)?;
        let mut max_degree = 0usize;
        let mut fixture_residual = 0.0f64;
        for _ in 0..GROWTH_SAMPLES {
            let z: Vec<C64> = (0..m)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let profile = growth_profile(l, &z, GROWTH_HORIZON, &split)?;
            let mut lnz = z.clone();
            for n in 0..=GROWTH_HORIZON {
                let diff = vector::norm(&vector::sub(&lnz, &profile.recombined(n)));
                let rel = diff / vector::norm(&lnz).max(f64::MIN_POSITIVE);
                fixture_residual = fixture_residual.max(rel);
                lnz = l.mul_vec(&lnz);
            }
            for c in &profile.components {
                if let Some(d) = c.degree {
                    max_degree = max_degree.max(d);
                    degrees_ok &= d < c.multiplicity;
                }
            }
        }
        worst_residual = worst_residual.max(fixture_residual);
        metrics.insert(format!("{name}.residual"), fixture_residual);
        metrics.insert(format!("{name}.max_degree"), max_degree as f64);
        metrics.insert(format!("{name}.components"), split.components.len() as f64);
    }
    let consistent = worst_residual <= DECOMPOSITION_TOL && degrees_ok;
    let conclusion = Conclusion {
        expected: format!("residual <= {DECOMPOSITION_TOL:e} and degree <= multiplicity - 1 for n <= {GROWTH_HORIZON}"),
        observed: format!(
            "worst relative residual {worst_residual:.3e}; degrees {}",
            if degrees_ok {
                "within bounds"
            } else {
                "exceed multiplicity"
            }
        ),
        consistent,
    };
    let label = fixtures.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(",");
    let mut report = TheoremReport::assemble(TheoremId::T2_1_growth, &label, None, Vec::new(), conclusion);
    report.metrics = metrics;
    Ok(report)
}

/// Runs one check on an analysed system with the configured forcing set and grid.
pub fn verify(a: &SystemAnalysis, id: TheoremId, cfg: &HarnessConfig) -> Result<TheoremReport> {
    let b_set = a.b_set(cfg);
    match id {
        TheoremId::T3_2 => verify_t3_2(a, &b_set, &a.mu_grid(cfg.mu_points), cfg),
        TheoremId::T3_3 => verify_t3_3(a, &b_set, &a.mu_grid(cfg.mu_points), cfg),
        TheoremId::T3_5 => verify_t3_5(a, &b_set, cfg),
        TheoremId::T3_4_stability => verify_t3_4_stability(a, &b_set, cfg),
        TheoremId::T2_1_growth => {
            let mut fixtures = default_growth_fixtures();
            fixtures.push(("monodromy".into(), a.propagation.monodromy().clone()));
            verify_t2_1(&fixtures, cfg)
        }
        TheoremId::Example3_6 => reproduce_example_3_6(cfg),
    }
}
