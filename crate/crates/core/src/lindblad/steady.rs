use faer::linalg::solvers::Solve;

use super::krylov::{gmres, SectorPreconditioner};
use super::Superoperator;
use crate::error::{Error, Result};
use crate::fock::{unvec, DensityMatrix, Operator};
use crate::model::TruncationSpec;
use crate::sparse::CsrMatrix;
use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Above this many unknowns (`d²`) the iterative solver replaces the
    /// sparse LU.
    pub krylov_threshold: usize,
    /// Accept when `‖L vec(ρ)‖₂ ≤ residual_tol · max(1, ‖L‖_∞)`.
    pub residual_tol: f64,
    /// Relative residual target of the Krylov iteration.
    pub krylov_tol: f64,
    pub gmres_restart: usize,
    pub gmres_max_iter: usize,
    /// Iterative refinement passes after the direct solve.
    pub refinement_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            krylov_threshold: 40_000,
            residual_tol: 1e-10,
            krylov_tol: 1e-14,
            gmres_restart: 60,
            gmres_max_iter: 2_000,
            refinement_steps: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveMethod {
    SparseLu,
    Gmres { iterations: usize },
}

#[derive(Clone, Debug)]
pub struct SteadyStateResult {
    pub rho: DensityMatrix,
    /// `‖L vec(ρ)‖₂` of the normalized state.
    pub residual: f64,
    /// Row of `L` replaced by the trace constraint.
    pub constraint_row: usize,
    pub method: SolveMethod,
    /// Set by the truncation-controlled solvers.
    pub truncation_used: Option<TruncationSpec>,
    pub converged: bool,
}

pub fn steadystate(l: &Superoperator) -> Result<SteadyStateResult> {
    steadystate_with(l, &SolverOptions::default())
}

/// Null vector of `L` with unit trace.
///
/// One population row of `L` (the one with the smallest diagonal magnitude)
/// is replaced by the trace functional and the resulting nonsingular system
/// is solved. Only population rows are eligible: they sum to zero, so
/// replacing any other row would leave the system singular.
pub fn steadystate_with(l: &Superoperator, opts: &SolverOptions) -> Result<SteadyStateResult> {
    let d = l.dim();
    let n = d * d;
    let mat = l.matrix();
    let diag = mat.diagonal();
    let constraint_row = (0..d)
        .map(|i| i + d * i)
        .min_by(|&a, &b| diag[a].norm().total_cmp(&diag[b].norm()))
        .expect("nonempty space");

    let trace_row: Vec<(usize, C64)> = (0..d).map(|i| (i + d * i, C64::new(1.0, 0.0))).collect();
    let system = mat.with_row_replaced(constraint_row, &trace_row);
    let mut rhs = vec![C64::new(0.0, 0.0); n];
    rhs[constraint_row] = C64::new(1.0, 0.0);

    let (x, method) = if n <= opts.krylov_threshold {
        (solve_direct(&system, &rhs, opts.refinement_steps)?, SolveMethod::SparseLu)
    } else {
        let pre = SectorPreconditioner::new(&system, l.space())?;
        let out = gmres(&system, &rhs, &pre, opts.krylov_tol, opts.gmres_restart, opts.gmres_max_iter);
        if !out.converged {
            return Err(Error::SolverFailure {
                residual: out.relative_residual,
            });
        }
        (out.x, SolveMethod::Gmres {
            iterations: out.iterations,
        })
    };

    let raw = Operator::from_dense(l.space().clone(), unvec(&x, d))?;
    let rho = DensityMatrix::from_unnormalized(raw)?;

    let lv = mat.mul_vec(&rho.to_vec());
    let residual = lv.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if !(residual <= opts.residual_tol * mat.norm_inf().max(1.0)) {
        return Err(Error::SolverFailure { residual });
    }

    Ok(SteadyStateResult {
        rho,
        residual,
        constraint_row,
        method,
        truncation_used: None,
        converged: true,
    })
}

fn solve_direct(system: &CsrMatrix, rhs: &[C64], refinement_steps: usize) -> Result<Vec<C64>> {
    let n = rhs.len();
    let lu = system
        .to_faer()
        .sp_lu()
        .map_err(|_| Error::SolverFailure { residual: f64::INFINITY })?;
    let solve = |b: &[C64]| -> Vec<C64> {
        let col = faer::Col::<C64>::from_fn(n, |i| b[i]);
        let sol = lu.solve(&col);
        (0..n).map(|i| sol[i]).collect()
    };
    let mut x = solve(rhs);
    for _ in 0..refinement_steps {
        let ax = system.mul_vec(&x);
        let r: Vec<C64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let dx = solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
    }
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::SolverFailure { residual: f64::INFINITY });
    }
    Ok(x)
}
