use super::{CoefficientSpec, FourierTerm, PeriodicSystem};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct BuiltinExample<T> {
    pub name: &'static str,
    pub system: PeriodicSystem<T>,
    pub expected_classification: &'static str,
    pub description: &'static str,
}

pub const BUILTIN_NAMES: &[&str] = &[
    "rotation",
    "hyperbolic-diag",
    "scalar-zero",
    "damped",
    "expansive",
    "modulated-hyperbolic",
    "noncommuting-fourier",
    "switched",
];

fn rows<T: Real>(r: &[&[f64]]) -> ComplexMatrix<T> {
    ComplexMatrix::from_real_rows(r).expect("well-formed builtin matrix")
}

fn diag<T: Real>(d: &[f64]) -> ComplexMatrix<T> {
    ComplexMatrix::from_real_diagonal(d)
}

fn make<T: Real>(name: &'static str) -> Option<BuiltinExample<T>> {
    let one = T::one();
    let (system, expected, description) = match name {
        "rotation" => (
            PeriodicSystem::constant(name, T::TAU(), rows(&[&[0.0, 1.0], &[-1.0, 0.0]])),
            "NonDichotomic",
            "x' = [[0,1],[-1,0]]x; monodromy over 2π is the identity",
        ),
        "hyperbolic-diag" => (
            PeriodicSystem::constant(name, one, diag(&[-1.0, 1.0])),
            "Dichotomic",
            "constant diag(-1, 1), one contracting and one expanding direction",
        ),
        "scalar-zero" => (
            PeriodicSystem::constant(name, one, diag(&[0.0])),
            "NonDichotomic",
            "x' = 0 in one dimension",
        ),
        "damped" => (
            PeriodicSystem::constant(name, one, diag(&[-1.0, -2.0])),
            "Stable",
            "constant diag(-1, -2)",
        ),
        "expansive" => (
            PeriodicSystem::constant(name, one, diag(&[1.0, 2.0])),
            "Expansive",
            "constant diag(1, 2)",
        ),
        "modulated-hyperbolic" => (
            PeriodicSystem::new(
                name,
                one,
                CoefficientSpec::Fourier(vec![
                    FourierTerm {
                        harmonic: 0,
                        cos: diag(&[-1.0, 1.0]),
                        sin: diag(&[0.0, 0.0]),
                    },
                    FourierTerm {
                        harmonic: 1,
                        cos: diag(&[-0.5, 0.5]),
                        sin: diag(&[0.0, 0.0]),
                    },
                ]),
            ),
            "Dichotomic",
            "diag(-1, 1) + diag(-0.5, 0.5)cos(2πt)",
        ),
        "noncommuting-fourier" => (
            PeriodicSystem::new(
                name,
                one,
                CoefficientSpec::Fourier(vec![
                    FourierTerm {
                        harmonic: 0,
                        cos: diag(&[1.0, -1.0]),
                        sin: diag(&[0.0, 0.0]),
                    },
                    FourierTerm {
                        harmonic: 1,
                        cos: rows(&[&[0.0, 1.0], &[0.0, 0.0]]),
                        sin: diag(&[0.0, 0.0]),
                    },
                ]),
            ),
            "Dichotomic",
            "diag(1, -1) + [[0,1],[0,0]]cos(2πt); A(t) and A(s) do not commute",
        ),
        "switched" => (
            PeriodicSystem::new(
                name,
                one,
                CoefficientSpec::PiecewiseConstant {
                    breakpoints: vec![T::zero(), T::lit(0.5), one],
                    matrices: vec![diag(&[-2.0, 0.0]), diag(&[0.0, 2.0])],
                },
            ),
            "Dichotomic",
            "diag(-2, 0) on [0, 1/2), diag(0, 2) on [1/2, 1)",
        ),
        _ => return None,
    };
    Some(BuiltinExample {
        name,
        system: system.expect("builtin system validates"),
        expected_classification: expected,
        description,
    })
}

pub fn builtin<T: Real>(name: &str) -> Option<BuiltinExample<T>> {
    BUILTIN_NAMES.iter().find(|&&n| n == name).and_then(|&n| make(n))
}

pub fn builtin_examples<T: Real>() -> Vec<BuiltinExample<T>> {
    BUILTIN_NAMES.iter().filter_map(|&n| make(n)).collect()
}
