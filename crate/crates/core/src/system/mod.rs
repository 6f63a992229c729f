//! q-periodic coefficient maps `t ↦ A(t)` and their forcing parameters.

mod builtin;
mod config;

use std::borrow::Cow;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

pub use builtin::{builtin, builtin_examples, BuiltinExample, BUILTIN_NAMES};
pub use config::{format_complex, parse_complex, parse_system, serialize_system};

#[derive(Debug, Clone, PartialEq)]
pub struct FourierTerm<T> {
    pub harmonic: u32,
    pub cos: ComplexMatrix<T>,
    pub sin: ComplexMatrix<T>,
}

/// How `A(t)` is specified over one period.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientSpec<T> {
    Constant(ComplexMatrix<T>),
    /// `A(t) = Σ C_h cos(2πht/q) + S_h sin(2πht/q)`.
    Fourier(Vec<FourierTerm<T>>),
    /// `A(t) = M_i` on `[t_i, t_{i+1})`, with `0 = t_0 < … < t_K = q`.
    PiecewiseConstant {
        breakpoints: Vec<T>,
        matrices: Vec<ComplexMatrix<T>>,
    },
}

impl<T: Real> CoefficientSpec<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            CoefficientSpec::Constant(_) => "constant",
            CoefficientSpec::Fourier(_) => "fourier",
            CoefficientSpec::PiecewiseConstant { .. } => "piecewise",
        }
    }

    fn matrices(&self) -> Vec<&ComplexMatrix<T>> {
        match self {
            CoefficientSpec::Constant(m) => vec![m],
            CoefficientSpec::Fourier(terms) => terms.iter().flat_map(|t| [&t.cos, &t.sin]).collect(),
            CoefficientSpec::PiecewiseConstant { matrices, .. } => matrices.iter().collect(),
        }
    }
}

/// Which forced Cauchy problem a probe drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `ẋ = A(t)x + e^{iμt}Pb`.
    Forward,
    /// `Ẏ = −Y·A(t) + e^{iμt}(I−P)b`, read through `V(t,s) = U(t,s)⁻¹`.
    Adjoint,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Forward => "forward",
            Side::Adjoint => "adjoint",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "forward" => Ok(Side::Forward),
            "adjoint" => Ok(Side::Adjoint),
            other => Err(Error::Parse(format!(
                "unknown side `{other}` (expected forward|adjoint)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForcingSpec<T> {
    /// Angular frequency of the `e^{iμt}` forcing.
    pub mu: T,
    pub b: Vec<Complex<T>>,
    pub side: Side,
}

impl<T: Real> ForcingSpec<T> {
    pub fn new(mu: T, b: Vec<Complex<T>>, side: Side) -> Self {
        Self { mu, b, side }
    }

    /// `μ = 0`, `b = (1, …, 1)`, forward side.
    pub fn default_for(dimension: usize) -> Self {
        Self {
            mu: T::zero(),
            b: vec![Complex::new(T::one(), T::zero()); dimension],
            side: Side::Forward,
        }
    }

    pub fn is_probe_ready(&self) -> bool {
        self.b.iter().any(|z| !z.is_zero())
    }
}

/// A sub-interval on which the coefficient is smooth; piecewise systems pin the
/// constant matrix so that evaluations at the right endpoint stay on this piece.
#[derive(Debug, Clone)]
pub struct SmoothInterval<T> {
    pub start: T,
    pub end: T,
    pub fixed: Option<ComplexMatrix<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSystem<T> {
    pub label: String,
    pub dimension: usize,
    pub period: T,
    pub coefficient: CoefficientSpec<T>,
}

impl<T: Real> PeriodicSystem<T> {
    /// Validates and builds a system; `dimension` is taken from the matrices.
    pub fn new(label: impl Into<String>, period: T, coefficient: CoefficientSpec<T>) -> Result<Self> {
        if !(period > T::zero()) || !period.is_finite() {
            return Err(Error::Validation(format!(
                "period must be positive and finite, got {period}"
            )));
        }
        let mats = coefficient.matrices();
        let first = mats
            .first()
            .ok_or_else(|| Error::Validation("coefficient has no matrices".into()))?;
        let m = first.rows();
        for (k, mat) in mats.iter().enumerate() {
            if !mat.is_square() || mat.rows() != m {
                return Err(Error::Validation(format!(
                    "coefficient matrix #{k} is {}x{}, expected {m}x{m}",
                    mat.rows(),
                    mat.cols()
                )));
            }
        }
        if let CoefficientSpec::PiecewiseConstant { breakpoints, matrices } = &coefficient {
            if breakpoints.len() != matrices.len() + 1 {
                return Err(Error::Validation(format!(
                    "piecewise spec needs {} breakpoints for {} matrices, got {}",
                    matrices.len() + 1,
                    matrices.len(),
                    breakpoints.len()
                )));
            }
            if breakpoints[0] != T::zero() || *breakpoints.last().unwrap() != period {
                return Err(Error::Validation(
                    "breakpoints must start at 0 and end at the period".into(),
                ));
            }
            if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::Validation("breakpoints must be strictly increasing".into()));
            }
        }
        Ok(Self {
            label: label.into(),
            dimension: m,
            period,
            coefficient,
        })
    }

    pub fn constant(label: impl Into<String>, period: T, a: ComplexMatrix<T>) -> Result<Self> {
        Self::new(label, period, CoefficientSpec::Constant(a))
    }

    /// `t mod q` in `[0, q)`.
    pub fn reduce(&self, t: T) -> T {
        let q = self.period;
        let mut r = t % q;
        if r < T::zero() {
            r += q;
        }
        if r >= q {
            r = T::zero();
        }
        r
    }

    /// `A(t)`, with `t` reduced modulo the period.
    pub fn eval_coefficient(&self, t: T) -> ComplexMatrix<T> {
        let tau = self.reduce(t);
        match &self.coefficient {
            CoefficientSpec::Constant(a) => a.clone(),
            CoefficientSpec::Fourier(terms) => {
                let mut acc = ComplexMatrix::zeros(self.dimension, self.dimension);
                let omega = T::TAU() / self.period;
                for term in terms {
                    let phase = omega * T::from_u32(term.harmonic).unwrap() * tau;
                    acc += &term.cos.scale_real(phase.cos());
                    if term.harmonic != 0 {
                        acc += &term.sin.scale_real(phase.sin());
                    }
                }
                acc
            }
            CoefficientSpec::PiecewiseConstant { breakpoints, matrices } => {
                let idx = breakpoints[1..]
                    .iter()
                    .position(|&b| tau < b)
                    .unwrap_or(matrices.len() - 1);
                matrices[idx].clone()
            }
        }
    }

    /// `A(t)` inside `interval`, borrowing whenever the value is constant there.
    pub fn coefficient_at<'a>(&'a self, interval: &'a SmoothInterval<T>, t: T) -> Cow<'a, ComplexMatrix<T>> {
        match (&interval.fixed, &self.coefficient) {
            (Some(m), _) => Cow::Borrowed(m),
            (None, CoefficientSpec::Constant(m)) => Cow::Borrowed(m),
            _ => Cow::Owned(self.eval_coefficient(t)),
        }
    }

    /// Splits `[t0, t1]` at the piece boundaries of a piecewise coefficient.
    pub fn smooth_intervals(&self, t0: T, t1: T) -> Vec<SmoothInterval<T>> {
        let CoefficientSpec::PiecewiseConstant { breakpoints, matrices } = &self.coefficient else {
            return vec![SmoothInterval {
                start: t0,
                end: t1,
                fixed: None,
            }];
        };
        let q = self.period;
        let mut out = Vec::new();
        let mut k = (t0 / q).floor();
        let mut start = t0;
        while start < t1 {
            let base = k * q;
            for (i, w) in breakpoints.windows(2).enumerate() {
                let (a, b) = (base + w[0], base + w[1]);
                if b <= start || a >= t1 {
                    continue;
                }
                let end = b.min(t1);
                if end > start {
                    out.push(SmoothInterval {
                        start,
                        end,
                        fixed: Some(matrices[i].clone()),
                    });
                    start = end;
                }
            }
            k += T::one();
            if base > t1 {
                break;
            }
        }
        out
    }

    /// True when every coefficient matrix is diagonal (handy for closed-form checks).
    pub fn is_diagonal(&self) -> bool {
        self.coefficient
            .matrices()
            .iter()
            .all(|m| (0..m.rows()).all(|i| (0..m.cols()).all(|j| i == j || m[(i, j)] == Complex::zero())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = PeriodicSystem<f64>;
    type M = ComplexMatrix<f64>;

    #[test]
    fn rotation_coefficient_is_constant() {
        let sys = builtin::<f64>("rotation").unwrap().system;
        for t in [0.0, 1.3, 7.9, -2.0] {
            let a = sys.eval_coefficient(t);
            let want = M::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
            assert_eq!(a, want);
        }
    }

    #[test]
    fn zero_system_evaluates_to_zero() {
        let sys = S::constant("zero", 1.0, M::zeros(1, 1)).unwrap();
        assert_eq!(sys.eval_coefficient(5.3), M::zeros(1, 1));
    }

    #[test]
    fn fourier_cosine_vanishes_at_quarter_period() {
        let sys = S::new(
            "cos",
            1.0,
            CoefficientSpec::Fourier(vec![FourierTerm {
                harmonic: 1,
                cos: M::identity(2),
                sin: M::zeros(2, 2),
            }]),
        )
        .unwrap();
        assert!(sys.eval_coefficient(0.25).frobenius_norm() < 1e-15);
        assert!((sys.eval_coefficient(0.0) - M::identity(2)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_period_and_shapes() {
        assert!(matches!(
            S::constant("bad", -1.0, M::identity(2)),
            Err(Error::Validation(_))
        ));
        let rect = M::zeros(2, 3);
        assert!(matches!(S::constant("bad", 1.0, rect), Err(Error::Validation(_))));
    }

    #[test]
    fn piecewise_selects_left_closed_pieces() {
        let sys = S::new(
            "pw",
            1.0,
            CoefficientSpec::PiecewiseConstant {
                breakpoints: vec![0.0, 0.5, 1.0],
                matrices: vec![M::from_real_diagonal(&[1.0]), M::from_real_diagonal(&[2.0])],
            },
        )
        .unwrap();
        assert_eq!(sys.eval_coefficient(0.49)[(0, 0)].re, 1.0);
        assert_eq!(sys.eval_coefficient(0.5)[(0, 0)].re, 2.0);
        assert_eq!(sys.eval_coefficient(1.0)[(0, 0)].re, 1.0);
        let iv = sys.smooth_intervals(0.25, 1.75);
        let ends: Vec<f64> = iv.iter().map(|i| i.end).collect();
        assert_eq!(ends, vec![0.5, 1.0, 1.5, 1.75]);
        assert_eq!(iv[1].fixed.as_ref().unwrap()[(0, 0)].re, 2.0);
    }

    #[test]
    fn piecewise_breakpoints_must_cover_period() {
        let r = S::new(
            "pw",
            1.0,
            CoefficientSpec::PiecewiseConstant {
                breakpoints: vec![0.0, 0.5, 0.9],
                matrices: vec![M::identity(1), M::identity(1)],
            },
        );
        assert!(matches!(r, Err(Error::Validation(_))));
    }
}
