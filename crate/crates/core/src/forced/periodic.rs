//! Long-horizon evaluation through one-period data: with `t = nq + r` and `z = e^{iμq}`,
//!
//! * forward: `X(t) = zⁿΦ_μ(r)c + Φ(r)·Sₙ(L)·Φ_μ(q)c`,
//! * adjoint: `Y(t) = zⁿΨ_μ(r)c + Ψ_μ(q)·Sₙ(L⁻¹)·Φ⁻¹(r)c`,
//!
//! where `Sₙ(M) = Σ_{j<n} z^{n−1−j}Mʲ = (zI − M)⁻¹(zⁿI − Mⁿ)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{invert, singular_values, solve, vector, ComplexMatrix, Lu, SubspaceBasis};
use crate::propagator::Propagation;
use crate::scalar::{unit_phase, Real};
use crate::spectral::{restricted_operator, SpectralSplit};
use crate::system::{ForcingSpec, Side};

type C<T> = Complex<T>;

/// Resolvent form only when `dist(z, σ) > RESONANCE_TOL·‖M‖`.
pub const RESONANCE_TOL: f64 = 1e-6;
/// Components along expanding eigenspaces below this fraction of the vector are roundoff.
pub const PURGE_TOL: f64 = 1e-9;

/// `c = Pb` on the forward side, `c = (I − P)b` on the adjoint side.
pub fn effective_vector<T: Real>(p: &ComplexMatrix<T>, forcing: &ForcingSpec<T>) -> Result<Vec<C<T>>> {
    if forcing.b.len() != p.rows() {
        return Err(Error::DimensionMismatch {
            expected: p.rows(),
            found: forcing.b.len(),
        });
    }
    let pb = p.mul_vec(&forcing.b);
    Ok(match forcing.side {
        Side::Forward => pb,
        Side::Adjoint => vector::sub(&forcing.b, &pb),
    })
}

struct Block<T> {
    basis: ComplexMatrix<T>,
    op: ComplexMatrix<T>,
    expanding: bool,
}

/// `Sₙ(M)w` with `M = L` or `L⁻¹`, evaluated blockwise on the generalized eigenspaces when available.
struct GeometricSeries<T> {
    op: ComplexMatrix<T>,
    z: C<T>,
    resonant: bool,
    blocks: Option<(Vec<Block<T>>, ComplexMatrix<T>)>,
}

impl<T: Real> GeometricSeries<T> {
    fn new(l: &ComplexMatrix<T>, op: ComplexMatrix<T>, z: C<T>, side: Side, split: Option<&SpectralSplit<T>>) -> Self {
        let scale = singular_values(&op)[0];
        let blocks = split.and_then(|s| Self::blocks(l, s, side));
        let resonant = match split {
            Some(s) => s.spectrum.eigenvalues.iter().any(|e| {
                let lam = match side {
                    Side::Forward => e.value,
                    Side::Adjoint => e.value.inv(),
                };
                (lam - z).norm() <= T::lit(RESONANCE_TOL) * scale
            }),
            None => {
                let sv = singular_values(&op.shifted(z));
                *sv.last().expect("nonempty") <= T::lit(RESONANCE_TOL) * scale
            }
        };
        Self {
            op,
            z,
            resonant,
            blocks,
        }
    }

    fn blocks(l: &ComplexMatrix<T>, split: &SpectralSplit<T>, side: Side) -> Option<(Vec<Block<T>>, ComplexMatrix<T>)> {
        let m = l.rows();
        let all = SubspaceBasis::direct_sum(m, split.components.iter()).matrix()?;
        let coords = invert(&all, T::lit(1e10)).ok()?;
        let (inner, outer) = (T::one() - split.circle_tol, T::one() + split.circle_tol);
        let mut blocks = Vec::new();
        for (e, basis) in split.spectrum.eigenvalues.iter().zip(&split.components) {
            let b = restricted_operator(l, basis).ok()?;
            let (op, expanding) = match side {
                Side::Forward => (b, e.value.norm() > outer),
                Side::Adjoint => (invert(&b, T::lit(1e14)).ok()?, e.value.norm() < inner),
            };
            blocks.push(Block {
                basis: basis.matrix()?,
                op,
                expanding,
            });
        }
        Some((blocks, coords))
    }

    fn is_resonant(&self) -> bool {
        self.resonant
    }

    fn apply(&self, w: &[C<T>], n: u64) -> Result<Vec<C<T>>> {
        let Some((blocks, coords)) = &self.blocks else {
            return self.apply_dense(&self.op, w, n);
        };
        let c = coords.mul_vec(w);
        let wn = vector::norm(w);
        let mut out = vector::zeros(w.len());
        let mut offset = 0;
        for blk in blocks {
            let k = blk.op.rows();
            let cj = &c[offset..offset + k];
            offset += k;
            let part = blk.basis.mul_vec(cj);
            if blk.expanding && vector::norm(&part) <= T::lit(PURGE_TOL) * wn {
                continue;
            }
            let s = self.apply_dense(&blk.op, cj, n)?;
            vector::axpy(&mut out, C::new(T::one(), T::zero()), &blk.basis.mul_vec(&s));
        }
        Ok(out)
    }

    fn apply_dense(&self, op: &ComplexMatrix<T>, w: &[C<T>], n: u64) -> Result<Vec<C<T>>> {
        let z = self.z;
        if self.resonant {
            let mut s = vector::zeros(w.len());
            let mut zk = C::new(T::one(), T::zero());
            for _ in 0..n {
                s = op.mul_vec(&s);
                vector::axpy(&mut s, zk, w);
                zk *= z;
            }
            return Ok(s);
        }
        let e = u32::try_from(n).map_err(|_| Error::InvalidArgument(format!("period count {n} too large")))?;
        let zn = z.powu(e);
        let rhs = vector::sub(&vector::scale(w, zn), &op.pow(e).mul_vec(w));
        let shifted = op.shifted(z).scale_real(-T::one());
        solve(&shifted, &rhs)
    }
}

/// Per-offset data for a fixed `r ∈ [0, q)`.
pub struct Offset<T> {
    pub r: T,
    /// `Φ_μ(r)c` or `Ψ_μ(r)c`.
    head: Vec<C<T>>,
    /// Forward: `Φ(r)`.
    left: Option<ComplexMatrix<T>>,
    /// Adjoint: `Φ⁻¹(r)c`.
    seed: Option<Vec<C<T>>>,
}

/// Evaluates `X(nq + r)` (forward) or `Y(nq + r)` (adjoint) from one-period integrals.
pub struct PeriodicEvaluator<'a, T> {
    prop: &'a Propagation<T>,
    side: Side,
    mu: T,
    z: C<T>,
    c: Vec<C<T>>,
    series: GeometricSeries<T>,
    /// Forward: `Φ_μ(q)c`.
    tail_seed: Vec<C<T>>,
    /// Adjoint: `Ψ_μ(q)`.
    psi_q: Option<ComplexMatrix<T>>,
}

impl<'a, T: Real> PeriodicEvaluator<'a, T> {
    pub fn new(
        prop: &'a Propagation<T>,
        forcing: &ForcingSpec<T>,
        p: &ComplexMatrix<T>,
        split: Option<&SpectralSplit<T>>,
    ) -> Result<Self> {
        let c = effective_vector(p, forcing)?;
        let q = prop.period();
        let z = unit_phase(forcing.mu * q);
        let l = prop.monodromy();
        let (op, tail_seed, psi_q) = match forcing.side {
            Side::Forward => (l.clone(), prop.forced_forward(forcing.mu, &c, q)?, None),
            Side::Adjoint => (
                prop.monodromy_inverse().clone(),
                Vec::new(),
                Some(prop.forced_adjoint_matrix(forcing.mu, q)?),
            ),
        };
        let series = GeometricSeries::new(l, op, z, forcing.side, split);
        Ok(Self {
            prop,
            side: forcing.side,
            mu: forcing.mu,
            z,
            c,
            series,
            tail_seed,
            psi_q,
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn z(&self) -> C<T> {
        self.z
    }

    /// `z` lies within the resonance band of `σ(L)` (or `σ(L⁻¹)`), so explicit summation is used.
    pub fn is_resonant(&self) -> bool {
        self.series.is_resonant()
    }

    pub fn effective_vector(&self) -> &[C<T>] {
        &self.c
    }

    pub fn offset(&self, r: T) -> Result<Offset<T>> {
        let q = self.prop.period();
        if r < T::zero() || r >= q {
            return Err(Error::InvalidArgument(format!("offset {r} outside [0, {q})")));
        }
        Ok(match self.side {
            Side::Forward => Offset {
                r,
                head: self.prop.forced_forward(self.mu, &self.c, r)?,
                left: Some(self.prop.fundamental_in_period(r)?),
                seed: None,
            },
            Side::Adjoint => Offset {
                r,
                head: self.prop.forced_adjoint(self.mu, &self.c, r)?,
                left: None,
                seed: Some(self.prop.inverse_in_period(r)?.mul_vec(&self.c)),
            },
        })
    }

    /// The sub-period term `zⁿΦ_μ(r)c` (or `zⁿΨ_μ(r)c`).
    pub fn head(&self, offset: &Offset<T>, n: u64) -> Vec<C<T>> {
        vector::scale(&offset.head, self.zpow(n))
    }

    fn zpow(&self, n: u64) -> C<T> {
        unit_phase(self.mu * self.prop.period() * T::from_u64(n).expect("period count representable"))
    }

    pub fn eval_at(&self, offset: &Offset<T>, n: u64) -> Result<Vec<C<T>>> {
        let mut out = self.head(offset, n);
        if n == 0 {
            return Ok(out);
        }
        let tail = match self.side {
            Side::Forward => {
                let s = self.series.apply(&self.tail_seed, n)?;
                offset.left.as_ref().expect("forward offset").mul_vec(&s)
            }
            Side::Adjoint => {
                let s = self.series.apply(offset.seed.as_ref().expect("adjoint offset"), n)?;
                self.psi_q.as_ref().expect("adjoint evaluator").mul_vec(&s)
            }
        };
        vector::axpy(&mut out, C::new(T::one(), T::zero()), &tail);
        Ok(out)
    }

    pub fn eval(&self, n: u64, r: T) -> Result<Vec<C<T>>> {
        self.eval_at(&self.offset(r)?, n)
    }
}

/// `X(nq + r)` (or `Y(nq + r)`) for a single point; build a [`PeriodicEvaluator`] for repeated use.
pub fn eval_periodic_decomposition<T: Real>(
    prop: &Propagation<T>,
    forcing: &ForcingSpec<T>,
    p: &ComplexMatrix<T>,
    n: u64,
    r: T,
) -> Result<Vec<C<T>>> {
    PeriodicEvaluator::new(prop, forcing, p, None)?.eval(n, r)
}

/// `(zI − M)⁻¹(zⁿI − Mⁿ)` as a matrix (dense resolvent form).
pub fn geometric_sum_closed<T: Real>(m: &ComplexMatrix<T>, z: C<T>, n: u32) -> Result<ComplexMatrix<T>> {
    let k = m.rows();
    let lu = Lu::factor(&m.shifted(z).scale_real(-T::one()))?;
    if lu.is_singular() {
        return Err(Error::Singular {
            condition: f64::INFINITY,
        });
    }
    let rhs = ComplexMatrix::identity(k).scale(z.powu(n)) - m.pow(n);
    let cols = rhs.columns().iter().map(|c| lu.solve(c)).collect::<Result<Vec<_>>>()?;
    ComplexMatrix::from_columns(&cols)
}
