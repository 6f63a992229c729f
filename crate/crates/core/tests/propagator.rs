use std::sync::OnceLock;

use floquet_core::linalg::{invert, ComplexMatrix};
use floquet_core::propagator::{
    forced_integral_adjoint, forced_integral_forward, fundamental_solution, inverse_fundamental, monodromy,
    IntegratorSettings, Propagation,
};
use floquet_core::scalar::unit_phase;
use floquet_core::system::{builtin, builtin_examples, PeriodicSystem};
use num_complex::Complex64;
use proptest::prelude::*;

fn sys(name: &str) -> PeriodicSystem<f64> {
    builtin::<f64>(name).unwrap().system
}

fn prop(name: &'static str) -> &'static Propagation<f64> {
    static CACHE: OnceLock<Vec<(&'static str, Propagation<f64>)>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        ["rotation", "hyperbolic-diag", "noncommuting-fourier", "switched"]
            .into_iter()
            .map(|n| (n, Propagation::new(sys(n), IntegratorSettings::default()).unwrap()))
            .collect()
    });
    &all.iter().find(|(n, _)| *n == name).unwrap().1
}

fn basis(m: usize, k: usize) -> Vec<Complex64> {
    floquet_core::linalg::vector::basis(m, k)
}

#[test]
fn rotation_monodromy_is_identity() {
    let l = monodromy(&sys("rotation"), &IntegratorSettings::default()).unwrap();
    assert!((l - ComplexMatrix::identity(2)).frobenius_norm() < 1e-10);
}

#[test]
fn zero_system_is_trivial() {
    let s = sys("scalar-zero");
    let st = IntegratorSettings::default();
    assert_eq!(monodromy(&s, &st).unwrap(), ComplexMatrix::identity(1));
    assert_eq!(inverse_fundamental(&s, 0.7, &st).unwrap(), ComplexMatrix::identity(1));
    for mu in [0.5, 3.0, -2.0] {
        for t in [0.3, 1.0] {
            let want = (Complex64::new(0.0, mu * t).exp() - 1.0) / Complex64::new(0.0, mu);
            let f = forced_integral_forward(&s, mu, &basis(1, 0), t, &st).unwrap()[0];
            let a = forced_integral_adjoint(&s, mu, &basis(1, 0), t, &st).unwrap()[0];
            assert!((f - want).norm() < 1e-10, "{f} vs {want}");
            assert!((a - want).norm() < 1e-10, "{a} vs {want}");
        }
    }
}

#[test]
fn rotation_inverse_is_transpose() {
    let s = sys("rotation");
    let st = IntegratorSettings::default();
    for t in [0.4, 2.0, 5.5] {
        let phi = fundamental_solution(&s, t, &st).unwrap();
        let inv = inverse_fundamental(&s, t, &st).unwrap();
        assert!((inv - phi.transpose()).frobenius_norm() < 1e-10);
    }
}

#[test]
fn rotation_evolution_to_full_turn() {
    let p = prop("rotation");
    for s in [0.0, 0.9, 3.1, 6.0] {
        let u = p.evolution(std::f64::consts::TAU, s).unwrap();
        let want = ComplexMatrix::from_real_rows(&[&[s.cos(), -s.sin()], &[s.sin(), s.cos()]]).unwrap();
        assert!((u - want).frobenius_norm() < 1e-9);
    }
}

#[test]
fn rotation_forced_integrals_vanish_at_mu_zero() {
    let s = sys("rotation");
    let st = IntegratorSettings::default();
    for k in 0..2 {
        let f = forced_integral_forward(&s, 0.0, &basis(2, k), std::f64::consts::TAU, &st).unwrap();
        let a = forced_integral_adjoint(&s, 0.0, &basis(2, k), std::f64::consts::TAU, &st).unwrap();
        assert!(floquet_core::linalg::vector::norm(&f) < 1e-9);
        assert!(floquet_core::linalg::vector::norm(&a) < 1e-9);
    }
}

#[test]
fn rk4_is_fourth_order() {
    let s = sys("hyperbolic-diag");
    let e = std::f64::consts::E;
    let exact = ComplexMatrix::from_real_diagonal(&[1.0 / e, e]);
    let err =
        |h: f64| (fundamental_solution(&s, 1.0, &IntegratorSettings::rk4(h)).unwrap() - exact.clone()).frobenius_norm();
    let ratio = err(1.0 / 50.0) / err(1.0 / 100.0);
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn inverse_consistency_on_builtins() {
    let st = IntegratorSettings::default();
    for ex in builtin_examples::<f64>() {
        for frac in [0.37, 1.0] {
            let t = ex.system.period * frac;
            let phi = fundamental_solution(&ex.system, t, &st).unwrap();
            let inv = inverse_fundamental(&ex.system, t, &st).unwrap();
            let direct = invert(&phi, 1e12).unwrap();
            let rel = (inv - direct.clone()).frobenius_norm() / direct.frobenius_norm();
            assert!(rel < 1e-7, "{}: {rel}", ex.name);
        }
    }
}

fn trapezoid_forward(p: &Propagation<f64>, mu: f64, c: &[Complex64], nodes: usize) -> Vec<Complex64> {
    let q = p.period();
    let h = q / nodes as f64;
    let times: Vec<f64> = (0..=nodes).map(|k| h * k as f64).collect();
    let inv = p.inverse_path(&times).unwrap();
    let mut acc = vec![Complex64::new(0.0, 0.0); c.len()];
    for (k, &s) in times.iter().enumerate() {
        let w = if k == 0 || k == nodes { 0.5 * h } else { h };
        let v = p.monodromy().matmul(&inv[k]).mul_vec(c);
        let e = unit_phase(mu * s) * w;
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x * e;
        }
    }
    acc
}

#[test]
fn forced_integral_matches_quadrature() {
    for name in ["hyperbolic-diag", "noncommuting-fourier"] {
        let s = sys(name);
        let p = Propagation::new(s.clone(), IntegratorSettings::default()).unwrap();
        let c = vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, -1.0)];
        for mu in [0.0, 1.7] {
            let ode = p.forced_forward(mu, &c, p.period()).unwrap();
            let quad = trapezoid_forward(&p, mu, &c, 2000);
            let diff: f64 = ode
                .iter()
                .zip(&quad)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(diff < 1e-5, "{name} μ={mu}: {diff}");
        }
    }
}

#[test]
fn commutation_residual_separates_fixtures() {
    for name in ["rotation", "hyperbolic-diag", "switched"] {
        let p = prop_or_new(name);
        let r = p.commutation_residual(&p.default_commutation_pairs()).unwrap();
        assert!(r <= 1e-9, "{name}: {r}");
    }
    let p = prop("noncommuting-fourier");
    let r = p.commutation_residual(&p.default_commutation_pairs()).unwrap();
    assert!(r > 1e-3, "residual {r}");
}

fn prop_or_new(name: &'static str) -> Propagation<f64> {
    Propagation::new(sys(name), IntegratorSettings::default()).unwrap()
}

#[test]
fn growth_bound_holds_on_samples() {
    for name in ["rotation", "hyperbolic-diag", "noncommuting-fourier", "switched"] {
        let p = prop(name);
        let g = p.growth_constants();
        assert!(g.m >= 1.0);
        let q = p.period();
        for i in 0..20 {
            for j in 0..=i {
                let (t, s) = (q * i as f64 / 19.0, q * j as f64 / 19.0);
                let n = floquet_core::linalg::singular_values(&p.evolution(t, s).unwrap())[0];
                assert!(
                    n <= g.bound(t - s) * (1.0 + 1e-6),
                    "{name} ({t},{s}): {n} > {}",
                    g.bound(t - s)
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn identity_on_diagonal(t in -10.0f64..10.0, which in 0usize..4) {
        let name = ["rotation", "hyperbolic-diag", "noncommuting-fourier", "switched"][which];
        let u = prop(name).evolution(t, t).unwrap();
        prop_assert!((u - ComplexMatrix::identity(2)).frobenius_norm() <= 1e-10);
    }

    #[test]
    fn cocycle(t in -2.0f64..3.0, s in -2.0f64..3.0, r in -2.0f64..3.0, which in 0usize..4) {
        let name = ["rotation", "hyperbolic-diag", "noncommuting-fourier", "switched"][which];
        let p = prop(name);
        let q = p.period();
        let (t, s, r) = (t * q, s * q, r * q);
        let lhs = p.evolution(t, s).unwrap().matmul(&p.evolution(s, r).unwrap());
        let rhs = p.evolution(t, r).unwrap();
        let g = p.growth_constants();
        let scale = g.bound((t - s).abs()) * g.bound((s - r).abs());
        prop_assert!((lhs - rhs).frobenius_norm() <= 1e-7 * scale);
    }

    #[test]
    fn periodicity(t in -2.0f64..3.0, s in -2.0f64..3.0, which in 0usize..4) {
        let name = ["rotation", "hyperbolic-diag", "noncommuting-fourier", "switched"][which];
        let p = prop(name);
        let q = p.period();
        let (t, s) = (t * q, s * q);
        let a = p.evolution(t + q, s + q).unwrap();
        let b = p.evolution(t, s).unwrap();
        prop_assert!((a - b).frobenius_norm() <= 1e-8);
    }
}
