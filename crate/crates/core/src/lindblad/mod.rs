//! Liouvillian construction, steady states, time evolution and truncation
//! control.
//!
//! Density matrices are vectorized column-major (`ρ_ij` at `i + d j`), so
//! `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

mod converge;
mod evolve;
mod krylov;
mod steady;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::fock::{unvec, DensityMatrix, HilbertSpec, Operator};
use crate::model::{self, ModeOperators, ModelParams, TruncationSpec};
use crate::sparse::CsrMatrix;
use crate::C64;

pub use converge::{solve_converged, solve_converged_with, solve_model};
pub use evolve::{evolve, EvolveOptions};
pub use steady::{steadystate, steadystate_with, SolveMethod, SolverOptions, SteadyStateResult};

/// Sparse generator of the master equation acting on `vec(ρ)`.
#[derive(Clone, Debug)]
pub struct Superoperator {
    space: HilbertSpec,
    matrix: CsrMatrix,
}

impl Superoperator {
    pub fn from_matrix(space: HilbertSpec, matrix: CsrMatrix) -> Result<Self> {
        let n = space.total_dim().pow(2);
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows(),
            });
        }
        Ok(Superoperator { space, matrix })
    }

    pub fn space(&self) -> &HilbertSpec {
        &self.space
    }

    /// Hilbert-space dimension `d`; the matrix is `d² × d²`.
    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        self.matrix.mul_vec(v)
    }

    /// `dρ/dt` for the given state, as a matrix.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<Array2<C64>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(unvec(&self.apply_vec(&rho.to_vec()), self.dim()))
    }
}

/// A dissipator `rate · (c ρ c† − ½{c†c, ρ})`.
#[derive(Clone, Debug)]
pub struct CollapseTerm {
    pub rate: f64,
    pub op: Operator,
}

impl CollapseTerm {
    pub fn new(rate: f64, op: Operator) -> Self {
        CollapseTerm { rate, op }
    }
}

fn push_kron(out: &mut Vec<(usize, usize, C64)>, a: &CsrMatrix, b: &CsrMatrix, s: C64) {
    let (br, bc) = (b.nrows(), b.ncols());
    for (ra, ca, va) in a.iter() {
        let va = va * s;
        for (rb, cb, vb) in b.iter() {
            out.push((ra * br + rb, ca * bc + cb, va * vb));
        }
    }
}

/// `L vec(ρ) = vec(−i[H, ρ] + Σ rate (c ρ c† − ½{c†c, ρ}))`.
pub fn liouvillian(h: &Operator, collapse: &[CollapseTerm]) -> Result<Superoperator> {
    let d = h.dim();
    for term in collapse {
        if term.op.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: term.op.dim(),
            });
        }
        if !(term.rate >= 0.0) {
            return Err(Error::NegativeRate(term.rate));
        }
    }

    let id = CsrMatrix::identity(d);
    let hs = h.to_sparse();
    let i = C64::new(0.0, 1.0);
    let mut entries = Vec::new();
    push_kron(&mut entries, &id, &hs, -i);
    push_kron(&mut entries, &hs.transpose(), &id, i);
    for term in collapse.iter().filter(|t| t.rate > 0.0) {
        let c = term.op.to_sparse();
        let cdc = c.adjoint().matmul(&c);
        let r = C64::new(term.rate, 0.0);
        push_kron(&mut entries, &c.conj(), &c, r);
        push_kron(&mut entries, &id, &cdc, -0.5 * r);
        push_kron(&mut entries, &cdc.transpose(), &id, -0.5 * r);
    }
    let n = d * d;
    let mut matrix = CsrMatrix::from_triplets(n, n, entries);
    // drop cancellations such as the diagonal of I⊗H − Hᵀ⊗I
    matrix = CsrMatrix::from_triplets(n, n, matrix.iter().filter(|&(_, _, v)| v != C64::new(0.0, 0.0)));
    Superoperator::from_matrix(h.space().clone(), matrix)
}

/// Cavity decay `(γ, a)`, mechanical damping `(γ_m (n̄+1), b)` and thermal
/// pumping `(γ_m n̄, b†)`. The cavity bath is at zero temperature.
pub fn model_collapse_terms(params: &ModelParams, ops: &ModeOperators) -> Vec<CollapseTerm> {
    let nth = model::thermal_phonon_number(params);
    vec![
        CollapseTerm::new(params.gamma, ops.a.clone()),
        CollapseTerm::new(params.gamma_m * (nth + 1.0), ops.b.clone()),
        CollapseTerm::new(params.gamma_m * nth, ops.b.dagger()),
    ]
}

/// Full driven, damped cavity–mechanics Liouvillian in the probe frame.
pub fn model_liouvillian(params: &ModelParams, trunc: &TruncationSpec) -> Result<Superoperator> {
    params.validate()?;
    let ops = ModeOperators::new(trunc)?;
    let h = model::hamiltonian_rotating_with(&ops, params);
    liouvillian(&h, &model_collapse_terms(params, &ops))
}
