use floquet_core::linalg::{ComplexMatrix, DEFAULT_RANK_TOL};
use floquet_core::propagator::{monodromy, IntegratorSettings, Propagation};
use floquet_core::spectral::{
    classify, default_commutation_mus, dichotomy_projection, growth_profile, invertibility_check_against,
    projection_report, sample_forced_pairs, spectral_split, spectral_split_default, stability_envelope, DichotomyClass,
    Invertibility,
};
use floquet_core::system::{builtin, builtin_examples};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn builtins_classify_as_expected() {
    for ex in builtin_examples::<f64>() {
        let l = monodromy(&ex.system, &IntegratorSettings::default()).unwrap();
        let v = classify(&l, 1e-6).unwrap();
        assert_eq!(v.class.as_str(), ex.expected_classification, "{}", ex.name);
    }
}

#[test]
fn hyperbolic_projection_commutes_with_forced_integrals() {
    let p = Propagation::new(
        builtin::<f64>("hyperbolic-diag").unwrap().system,
        IntegratorSettings::default(),
    )
    .unwrap();
    let split = spectral_split_default(p.monodromy()).unwrap();
    let proj = dichotomy_projection(&split).unwrap();
    assert!((proj.clone() - ComplexMatrix::from_real_diagonal(&[1.0, 0.0])).frobenius_norm() < 1e-9);
    let pairs = sample_forced_pairs(&p, &default_commutation_mus(p.period())).unwrap();
    let rep = projection_report(&proj, p.monodromy(), &pairs);
    assert!(rep.idempotency_residual <= 1e-9);
    assert!(rep.commutation_l <= 1e-9 && rep.commutation_phi <= 1e-9 && rep.commutation_psi <= 1e-9);
    assert_eq!(rep.sampled_mu.len(), 4);
}

#[test]
fn rotation_forced_integral_is_singular() {
    let p = Propagation::new(
        builtin::<f64>("rotation").unwrap().system,
        IntegratorSettings::default(),
    )
    .unwrap();
    let phi = p.forced_forward_matrix(0.0, p.period()).unwrap();
    let check = invertibility_check_against(&phi, 1e8, p.forward_scale());
    assert_eq!(check.verdict, Invertibility::Singular);
    let psi = p.forced_adjoint_matrix(0.0, p.period()).unwrap();
    assert!(!invertibility_check_against(&psi, 1e8, p.adjoint_scale()).is_invertible());
    let q = Propagation::new(
        builtin::<f64>("scalar-zero").unwrap().system,
        IntegratorSettings::default(),
    )
    .unwrap();
    let phi = q.forced_forward_matrix(0.0, 1.0).unwrap();
    assert!(invertibility_check_against(&phi, 1e8, q.forward_scale()).is_invertible());
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(m, m, |_, _| {
        let r: f64 = rng.gen::<f64>().sqrt();
        let th: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
        Complex64::from_polar(r, th)
    })
}

#[test]
fn random_circle_free_splits() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF10C);
    let mut tested = 0;
    while tested < 200 {
        let m = rng.gen_range(1..=5);
        let l = random_matrix(&mut rng, m).scale_real(1.8);
        let v = classify(&l, 1e-6).unwrap();
        if v.moduli.iter().any(|r| (r - 1.0).abs() < 0.05) {
            continue;
        }
        tested += 1;
        let s = spectral_split(&l, 1e-6, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(s.x1.dim() + s.x2.dim(), m);
        assert!(s.basis_min_singular_value() > DEFAULT_RANK_TOL);
        let p = dichotomy_projection(&s).unwrap();
        let rep = projection_report(&p, &l, &[]);
        assert!(rep.idempotency_residual <= 1e-9, "{}", rep.idempotency_residual);
        assert!(
            rep.commutation_l <= 1e-8 * l.frobenius_norm().max(1.0),
            "{}",
            rep.commutation_l
        );
        assert_eq!(rep.rank, s.x1.dim());
    }
}

#[test]
fn growth_modulus_matches_eigenvalues() {
    let fixtures = [
        ComplexMatrix::identity(2),
        ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap(),
        ComplexMatrix::from_real_diagonal(&[(-1.0f64).exp(), 1.0f64.exp()]),
        ComplexMatrix::from_real_rows(&[&[0.5, 1.0, 0.0], &[0.0, 0.5, 0.0], &[0.0, 0.0, 1.5]]).unwrap(),
    ];
    for l in fixtures {
        let s = spectral_split_default(&l).unwrap();
        let g = growth_profile(&l, &vec![Complex64::new(1.0, 0.3); l.rows()], 50, &s).unwrap();
        for c in &g.components {
            let fitted = c.fitted_modulus.unwrap();
            assert!(
                (fitted / c.eigenvalue.norm() - 1.0).abs() < 1e-3,
                "{fitted} vs {}",
                c.eigenvalue
            );
            assert!(c.degree.unwrap() < c.multiplicity);
        }
    }
}

#[test]
fn damped_monodromy_has_envelope() {
    let l = monodromy(
        &builtin::<f64>("damped").unwrap().system,
        &IntegratorSettings::default(),
    )
    .unwrap();
    assert_eq!(classify(&l, 1e-6).unwrap().class, DichotomyClass::Stable);
    let env = stability_envelope(&l, 100).unwrap();
    assert!(env.rate > 0.0);
    for (n, &a) in env.norms.iter().enumerate() {
        assert!(a <= env.bound(n) * (1.0 + 1e-12));
    }
}

proptest! {
    #[test]
    fn classification_survives_small_perturbation(
        d in proptest::collection::vec(prop_oneof![0.05f64..0.95, 1.05f64..3.0], 1..5),
        seed in any::<u64>(),
    ) {
        let l = ComplexMatrix::from_real_diagonal(&d);
        let tol = 1e-6;
        let base = classify(&l, tol).unwrap().class;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dl = random_matrix(&mut rng, d.len());
        let scale = tol / 10.0 * l.frobenius_norm() / dl.frobenius_norm().max(1e-300);
        dl = dl.scale_real(scale);
        let perturbed = classify(&(l + dl), tol).unwrap().class;
        prop_assert_eq!(base, perturbed);
    }
}
