//! TOML system definition files.
//!
//! ```toml
//! label = "rotation"
//! dimension = 2
//! period = 6.283185307179586
//!
//! [coefficient]
//! kind = "constant"            # or "fourier" / "piecewise"
//! matrix = [["0", "1"], ["-1", "0"]]
//!
//! [forcing]                    # optional
//! mu = 0.5
//! b = ["1", "0.5-2i"]
//! side = "forward"             # or "adjoint"
//! ```
//!
//! Fourier coefficients use `[[coefficient.terms]]` tables with `harmonic`,
//! `cos` and optional `sin` matrices. Piecewise coefficients list
//! `breakpoints = [0.0, …, period]` and one matrix per piece in `matrices`.
//! Matrix entries are complex literals (`"a+bi"`) or plain numbers.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{CoefficientSpec, ForcingSpec, FourierTerm, PeriodicSystem, Side};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    dimension: usize,
    period: f64,
    coefficient: RawCoefficient,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    forcing: Option<RawForcing>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawCoefficient {
    Constant {
        matrix: Vec<Vec<Entry>>,
    },
    Fourier {
        terms: Vec<RawTerm>,
    },
    Piecewise {
        breakpoints: Vec<f64>,
        matrices: Vec<Vec<Vec<Entry>>>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    harmonic: u32,
    cos: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sin: Option<Vec<Vec<Entry>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawForcing {
    #[serde(default)]
    mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    side: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Text(String),
    Number(f64),
}

impl Entry {
    fn value<T: Real>(&self, field: &str) -> Result<Complex<T>> {
        match self {
            Entry::Text(s) => parse_complex(s).map_err(|e| Error::Validation(format!("{field}: {e}"))),
            Entry::Number(x) => Ok(Complex::new(T::lit(*x), T::zero())),
        }
    }
}

/// Parses `"a"`, `"bi"`, `"a+bi"`, `"a-bi"`, `"i"`, `"-i"` (whitespace ignored, `j` accepted for `i`).
pub fn parse_complex<T: Real>(text: &str) -> Result<Complex<T>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("invalid complex literal `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    let num = |p: &str| -> Result<f64> {
        let v: f64 = p.parse().map_err(|_| bad())?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad())
        }
    };
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return Ok(Complex::new(T::lit(num(&s)?), T::zero()));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (num(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => num(other)?,
    };
    Ok(Complex::new(T::lit(re), T::lit(im)))
}

/// Shortest literal that [`parse_complex`] reads back to the same value.
pub fn format_complex<T: Real>(z: Complex<T>) -> String {
    let (re, im) = (z.re.as_f64(), z.im.as_f64());
    if im == 0.0 {
        format!("{re}")
    } else if re == 0.0 {
        format!("{im}i")
    } else if im < 0.0 {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

fn matrix<T: Real>(rows: &[Vec<Entry>], m: usize, field: &str) -> Result<ComplexMatrix<T>> {
    if rows.len() != m {
        return Err(Error::Validation(format!("{field}: {} rows, expected {m}", rows.len())));
    }
    let mut data = Vec::with_capacity(m * m);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != m {
            return Err(Error::Validation(format!(
                "{field}: row {i} has {} entries, expected {m}",
                row.len()
            )));
        }
        for (j, e) in row.iter().enumerate() {
            data.push(e.value(&format!("{field}[{i}][{j}]"))?);
        }
    }
    ComplexMatrix::new(m, m, data)
}

fn raw_matrix<T: Real>(a: &ComplexMatrix<T>) -> Vec<Vec<Entry>> {
    (0..a.rows())
        .map(|i| (0..a.cols()).map(|j| Entry::Text(format_complex(a[(i, j)]))).collect())
        .collect()
}

/// Reads a system definition; the forcing falls back to [`ForcingSpec::default_for`].
pub fn parse_system<T: Real>(text: &str) -> Result<(PeriodicSystem<T>, ForcingSpec<T>)> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let m = raw.dimension;
    if m == 0 {
        return Err(Error::Validation("dimension must be at least 1".into()));
    }
    if !raw.period.is_finite() || raw.period <= 0.0 {
        return Err(Error::Validation(format!(
            "period must be positive and finite, got {}",
            raw.period
        )));
    }
    let coefficient = match &raw.coefficient {
        RawCoefficient::Constant { matrix: rows } => CoefficientSpec::Constant(matrix(rows, m, "coefficient.matrix")?),
        RawCoefficient::Fourier { terms } => {
            if terms.is_empty() {
                return Err(Error::Validation(
                    "coefficient.terms: at least one term required".into(),
                ));
            }
            let mut out = Vec::with_capacity(terms.len());
            for (k, term) in terms.iter().enumerate() {
                let cos = matrix(&term.cos, m, &format!("coefficient.terms[{k}].cos"))?;
                let sin = match &term.sin {
                    Some(rows) => matrix(rows, m, &format!("coefficient.terms[{k}].sin"))?,
                    None => ComplexMatrix::zeros(m, m),
                };
                out.push(FourierTerm {
                    harmonic: term.harmonic,
                    cos,
                    sin,
                });
            }
            CoefficientSpec::Fourier(out)
        }
        RawCoefficient::Piecewise { breakpoints, matrices } => CoefficientSpec::PiecewiseConstant {
            breakpoints: breakpoints.iter().map(|&b| T::lit(b)).collect(),
            matrices: matrices
                .iter()
                .enumerate()
                .map(|(k, rows)| matrix(rows, m, &format!("coefficient.matrices[{k}]")))
                .collect::<Result<_>>()?,
        },
    };
    let label = raw.label.clone().unwrap_or_else(|| "unnamed".to_string());
    let system = PeriodicSystem::new(label, T::lit(raw.period), coefficient)?;

    let mut forcing = ForcingSpec::default_for(m);
    if let Some(f) = &raw.forcing {
        if !f.mu.is_finite() {
            return Err(Error::Validation("forcing.mu must be finite".into()));
        }
        forcing.mu = T::lit(f.mu);
        if let Some(b) = &f.b {
            if b.len() != m {
                return Err(Error::Validation(format!(
                    "forcing.b: {} entries, expected {m}",
                    b.len()
                )));
            }
            forcing.b = b
                .iter()
                .enumerate()
                .map(|(k, e)| e.value(&format!("forcing.b[{k}]")))
                .collect::<Result<_>>()?;
        }
        if let Some(side) = &f.side {
            forcing.side = side
                .parse::<Side>()
                .map_err(|e| Error::Validation(format!("forcing.side: {e}")))?;
        }
    }
    Ok((system, forcing))
}

/// Writes a definition that [`parse_system`] reads back to the same system.
pub fn serialize_system<T: Real>(system: &PeriodicSystem<T>, forcing: Option<&ForcingSpec<T>>) -> Result<String> {
    let coefficient = match &system.coefficient {
        CoefficientSpec::Constant(a) => RawCoefficient::Constant { matrix: raw_matrix(a) },
        CoefficientSpec::Fourier(terms) => RawCoefficient::Fourier {
            terms: terms
                .iter()
                .map(|t| RawTerm {
                    harmonic: t.harmonic,
                    cos: raw_matrix(&t.cos),
                    sin: Some(raw_matrix(&t.sin)),
                })
                .collect(),
        },
        CoefficientSpec::PiecewiseConstant { breakpoints, matrices } => RawCoefficient::Piecewise {
            breakpoints: breakpoints.iter().map(|b| b.as_f64()).collect(),
            matrices: matrices.iter().map(raw_matrix).collect(),
        },
    };
    let raw = RawConfig {
        label: Some(system.label.clone()),
        dimension: system.dimension,
        period: system.period.as_f64(),
        coefficient,
        forcing: forcing.map(|f| RawForcing {
            mu: f.mu.as_f64(),
            b: Some(f.b.iter().map(|&z| Entry::Text(format_complex(z))).collect()),
            side: Some(f.side.as_str().to_string()),
        }),
    };
    toml::to_string(&raw).map_err(|e| Error::Parse(e.to_string()))
}
