//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::time::Instant;

use floquet_core::forced::{effective_vector, geometric_sum_closed, PeriodicEvaluator};
use floquet_core::linalg::{eigenvalues, vector, DEFAULT_CLUSTER_TOL, DEFAULT_RANK_TOL};
use floquet_core::propagator::{fundamental_solution, IntegratorSettings, Propagation};
use floquet_core::scalar::unit_phase;
use floquet_core::spectral::{
    classify, dichotomy_projection, invertibility_check_against, spectral_split, spectral_split_default, DichotomyClass,
};
use floquet_core::system::{builtin, builtin_examples, Side};
use floquet_core::{Forcing, Matrix, C64};
use floquet_harness::{
    default_growth_fixtures, reproduce_example_3_6, verify_t2_1, verify_t3_2, verify_t3_3, verify_t3_5, HarnessConfig,
    Outcome, SystemAnalysis,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Line {
    ok: bool,
    detail: String,
}

fn line(ok: bool, detail: impl Into<String>) -> Line {
    Line {
        ok,
        detail: detail.into(),
    }
}

fn analysis(name: &str, horizon: Option<usize>) -> SystemAnalysis {
    let cfg = HarnessConfig {
        horizon,
        ..HarnessConfig::default()
    };
    SystemAnalysis::new(builtin::<f64>(name).unwrap().system, &cfg).unwrap()
}

fn criterion_1() -> Line {
    let start = Instant::now();
    let cfg = HarnessConfig {
        horizon: Some(100),
        ..HarnessConfig::default()
    };
    let r = reproduce_example_3_6(&cfg).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let failed_hyps: Vec<String> = r
        .hypotheses_status
        .iter()
        .filter(|h| !h.holds)
        .map(|h| format!("{} ({:.2e})", h.name, h.evidence))
        .collect();
    let ok = r.outcome == Outcome::Pass && secs < 30.0;
    line(
        ok,
        format!(
            "|L-I|={:.1e} |Phi_0|={:.1e} |Psi_0|={:.1e} class={:?} failed_checks={:?}; {}; {secs:.1}s",
            r.metric("monodromy_minus_identity").unwrap(),
            r.metric("Phi_0_norm").unwrap(),
            r.metric("Psi_0_norm").unwrap(),
            r.classification.unwrap(),
            failed_hyps,
            r.conclusion_status.observed
        ),
    )
}

fn criterion_2() -> Line {
    let a = analysis("hyperbolic-diag", Some(100));
    let cfg = HarnessConfig {
        horizon: Some(100),
        ..HarnessConfig::default()
    };
    let r = verify_t3_2(&a, &a.b_set(&cfg), &a.mu_grid(64), &cfg).unwrap();
    let p_err = (a.projection.clone() - Matrix::from_real_diagonal(&[1.0, 0.0])).frobenius_norm();
    let worst_comm = r
        .hypotheses_status
        .iter()
        .filter(|h| h.name.starts_with("P_commutes"))
        .map(|h| h.evidence)
        .fold(0.0, f64::max);
    let all_bounded = r.sweeps.iter().all(|s| s.all_bounded());
    let ok = a.verdict.class == DichotomyClass::Dichotomic
        && p_err <= 1e-10
        && worst_comm <= 1e-8
        && all_bounded
        && r.outcome == Outcome::Pass;
    line(
        ok,
        format!(
            "class={} |P-diag(1,0)|={p_err:.1e} max commutation={worst_comm:.1e}; {}",
            a.verdict.class, r.conclusion_status.observed
        ),
    )
}

fn criterion_3() -> Line {
    let a = analysis("scalar-zero", Some(100));
    let prop = &a.propagation;
    let phi0 = prop.forced_forward_matrix(0.0, 1.0).unwrap();
    let inv = invertibility_check_against(&phi0, 1e8, prop.forward_scale());
    let cfg = HarnessConfig {
        horizon: Some(100),
        ..HarnessConfig::default()
    };
    let r = verify_t3_3(&a, &a.b_set(&cfg), &a.mu_grid(64), &cfg).unwrap();
    let slope = r.metric("b1_slope").unwrap_or(f64::NAN);
    let dir = tempfile::tempdir().unwrap();
    let code = floquet_cli::run(&[
        "floquet",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "verify",
        "scalar-zero",
        "T3_3",
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let consistent = report["consistent"] == serde_json::Value::Bool(true);
    let ok = inv.is_invertible()
        && (phi0[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-9
        && (slope - 1.0).abs() <= 1e-3
        && r.probes.first().map(|p| p.status) == Some(floquet_core::forced::BoundednessStatus::LinearGrowth)
        && code == 0
        && consistent;
    line(
        ok,
        format!(
            "Phi_0(1)={:.6} invertible={} slope={slope:.6} exit={code} consistent={consistent}",
            phi0[(0, 0)].re,
            inv.is_invertible()
        ),
    )
}

fn criterion_4() -> Line {
    let cfg = HarnessConfig::default();
    let a = analysis("hyperbolic-diag", None);
    let r = verify_t3_5(&a, &a.b_set(&cfg), &cfg).unwrap();
    let change = r.metric("K_max_relative_change").unwrap();
    let z = analysis("scalar-zero", None);
    let rz = verify_t3_5(&z, &z.b_set(&cfg), &cfg).unwrap();
    let flagged = rz
        .sweeps
        .iter()
        .any(|s| s.side == Side::Forward && s.unbounded_at.contains(&0.0));
    let ok = change < 0.05 && r.outcome == Outcome::Pass && flagged;
    line(
        ok,
        format!(
            "K_P {:.6}->{:.6}, K_I-P {:.6}->{:.6}, max change {change:.2e}; scalar-zero unbounded at mu=0: {flagged}",
            r.metric("K_P_coarse").unwrap(),
            r.metric("K_P_fine").unwrap(),
            r.metric("K_I_minus_P_coarse").unwrap(),
            r.metric("K_I_minus_P_fine").unwrap()
        ),
    )
}

/// Trapezoid rule for `∫₀^q U(q,s)e^{iμs}c ds`, with the integrand mass `∫₀^q ‖U(q,s)c‖ ds`.
fn trapezoid(p: &Propagation<f64>, mu: f64, c: &[C64], nodes: usize) -> (Vec<C64>, f64) {
    let q = p.period();
    let h = q / nodes as f64;
    let times: Vec<f64> = (0..=nodes).map(|k| h * k as f64).collect();
    let inv = p.inverse_path(&times).unwrap();
    let mut acc = vector::zeros::<f64>(c.len());
    let mut mass = 0.0;
    for (k, &s) in times.iter().enumerate() {
        let w = if k == 0 || k == nodes { 0.5 * h } else { h };
        let v = p.monodromy().matmul(&inv[k]).mul_vec(c);
        mass += w * vector::norm(&v);
        vector::axpy(&mut acc, unit_phase(mu * s) * w, &v);
    }
    (acc, mass)
}

fn criterion_5() -> Line {
    let mut worst_quad = 0.0f64;
    let mut worst_name = String::new();
    for ex in builtin_examples::<f64>() {
        let p = Propagation::new(ex.system, IntegratorSettings::default()).unwrap();
        let m = p.dimension();
        let c: Vec<C64> = (0..m).map(|k| C64::new(1.0, 0.5 * k as f64)).collect();
        for mu in [0.0, 1.0, 1.7] {
            let ode = p.forced_forward(mu, &c, p.period()).unwrap();
            let (quad, mass) = trapezoid(&p, mu, &c, 2000);
            let rel = vector::norm(&vector::sub(&ode, &quad)) / mass;
            if rel > worst_quad {
                worst_quad = rel;
                worst_name = format!("{} mu={mu}", ex.name);
            }
        }
    }

    let fixtures = [
        "hyperbolic-diag",
        "damped",
        "expansive",
        "modulated-hyperbolic",
        "noncommuting-fourier",
        "switched",
    ];
    let props: Vec<_> = fixtures
        .iter()
        .map(|n| Propagation::new(builtin::<f64>(n).unwrap().system, IntegratorSettings::default()).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xF10C);
    let mut worst_dec = 0.0f64;
    for _ in 0..50 {
        let p = &props[rng.gen_range(0..props.len())];
        let split = spectral_split_default(p.monodromy()).unwrap();
        let proj = dichotomy_projection(&split).unwrap();
        let side = if rng.gen_bool(0.5) {
            Side::Forward
        } else {
            Side::Adjoint
        };
        let mu = rng.gen_range(-3.0..9.0);
        let n: u64 = rng.gen_range(0..=30);
        let r = rng.gen_range(0.0..1.0) * p.period();
        let b: Vec<C64> = (0..p.dimension())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), 0.0))
            .collect();
        let f = Forcing::new(mu, b, side);
        let x = PeriodicEvaluator::new(p, &f, &proj, Some(&split))
            .unwrap()
            .eval(n, r)
            .unwrap();
        let c = effective_vector(&proj, &f).unwrap();
        let t = [n as f64 * p.period() + r];
        let direct = match side {
            Side::Forward => p.forced_forward_path(mu, &c, &t).unwrap(),
            Side::Adjoint => p.forced_adjoint_path(mu, &c, &t).unwrap(),
        };
        let sup = vector::norm(&direct[0]);
        worst_dec = worst_dec.max(vector::norm(&vector::sub(&x, &direct[0])) / (1.0 + sup));
    }
    line(
        worst_quad <= 1e-6 && worst_dec <= 1e-6,
        format!("quadrature worst relative {worst_quad:.2e} ({worst_name}); decomposition worst {worst_dec:.2e}"),
    )
}

fn criterion_6() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF10C);
    let mut worst = 0.0f64;
    let mut tested = 0;
    while tested < 200 {
        let m = rng.gen_range(1..=4);
        let scale = if rng.gen_bool(0.5) {
            rng.gen_range(0.1..0.8)
        } else {
            rng.gen_range(1.3..2.0)
        };
        let raw = Matrix::from_fn(m, m, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let rho = floquet_core::linalg::spectral_radius(&raw).unwrap().max(1e-3);
        let l = raw.scale_real(scale / rho);
        if eigenvalues(&l, DEFAULT_CLUSTER_TOL)
            .unwrap()
            .moduli()
            .iter()
            .any(|r| (r - 1.0).abs() < 0.05)
        {
            continue;
        }
        tested += 1;
        let n = rng.gen_range(1..=20u32);
        let z = C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let closed = geometric_sum_closed(&l, z, n).unwrap();
        let mut brute = Matrix::zeros(m, m);
        let mut norm_sum = 0.0;
        for k in 0..n {
            let lk = l.pow(k);
            norm_sum += lk.frobenius_norm();
            brute += &lk.scale(z.powu(n - 1 - k));
        }
        worst = worst.max((closed - brute).frobenius_norm() / norm_sum);
    }
    line(
        worst <= 1e-8,
        format!("200 matrices, worst relative discrepancy {worst:.2e}"),
    )
}

fn criterion_7() -> Line {
    let s = builtin::<f64>("hyperbolic-diag").unwrap().system;
    let e = std::f64::consts::E;
    let exact = Matrix::from_real_diagonal(&[1.0 / e, e]);
    let err =
        |h: f64| (fundamental_solution(&s, 1.0, &IntegratorSettings::rk4(h)).unwrap() - exact.clone()).frobenius_norm();
    let ratio = err(1.0 / 50.0) / err(1.0 / 100.0);
    line((12.0..=20.0).contains(&ratio), format!("error ratio {ratio:.3}"))
}

fn criterion_8() -> Line {
    let r = verify_t2_1(&default_growth_fixtures(), &HarnessConfig::default()).unwrap();
    line(
        r.outcome == Outcome::Pass,
        format!(
            "{}; jordan degree {}, diag degree {}",
            r.conclusion_status.observed,
            r.metric("jordan.max_degree").unwrap(),
            r.metric("diag-e.max_degree").unwrap()
        ),
    )
}

fn criterion_9() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF10C);
    let mut worst_trace = 0.0f64;
    for _ in 0..1000 {
        let m = rng.gen_range(1..=6);
        let a = Matrix::from_fn(m, m, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let spec = eigenvalues(&a, 1e-7).unwrap();
        let sum: C64 = spec.eigenvalues.iter().map(|e| e.value * e.multiplicity as f64).sum();
        let tr = a.trace();
        worst_trace = worst_trace.max((sum - tr).norm() / tr.norm().max(1.0));
    }
    let mut full_rank = true;
    let mut worst_idem = 0.0f64;
    let mut checked = 0;
    for ex in builtin_examples::<f64>() {
        let p = Propagation::new(ex.system, IntegratorSettings::default()).unwrap();
        if !classify(p.monodromy(), 1e-6).unwrap().class.is_dichotomic() {
            continue;
        }
        checked += 1;
        let split = spectral_split(p.monodromy(), 1e-6, DEFAULT_RANK_TOL).unwrap();
        full_rank &=
            split.x1.dim() + split.x2.dim() == p.dimension() && split.basis_min_singular_value() > DEFAULT_RANK_TOL;
        let proj = dichotomy_projection(&split).unwrap();
        worst_idem = worst_idem.max((proj.matmul(&proj) - proj.clone()).frobenius_norm());
    }
    line(
        worst_trace <= 1e-9 && full_rank && worst_idem <= 1e-9,
        format!(
            "trace worst {worst_trace:.2e} over 1000; {checked} circle-free built-ins full rank: {full_rank}; |P^2-P| worst {worst_idem:.2e}"
        ),
    )
}

type Criterion = fn() -> Line;

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("counterexample reproduction", criterion_1),
        ("forward boundedness on diag(-1,1)", criterion_2),
        ("contrapositive on scalar-zero", criterion_3),
        ("uniform-bound sweep refinement", criterion_4),
        ("numerical oracle equivalence", criterion_5),
        ("geometric-sum identity", criterion_6),
        ("RK4 order", criterion_7),
        ("generalized-eigenspace growth", criterion_8),
        ("spectral suite", criterion_9),
    ];
    let mut failures = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let l = f();
        if !l.ok {
            failures += 1;
        }
        println!(
            "criterion {}: {} {name}: {}",
            k + 1,
            if l.ok { "PASS" } else { "FAIL" },
            l.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
