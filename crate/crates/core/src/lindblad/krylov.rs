//! Restarted GMRES with a block Gauss–Seidel preconditioner over photon
//! sectors.
//!
//! Unknowns `ρ_{(n,m),(n',m')}` are grouped by the first-mode index pair
//! `(n, n')`. Sectors are visited in descending `n + n'`, so every coupling
//! from a higher excitation sector (cavity decay, half of the drive terms)
//! sits below the block diagonal and is applied exactly; only the couplings
//! pointing the other way are dropped. Each diagonal block is factorized with
//! a sparse LU.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;

use crate::error::{Error, Result};
use crate::fock::HilbertSpec;
use crate::sparse::CsrMatrix;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

pub(crate) struct SectorPreconditioner {
    /// Sector ids in solve order.
    order: Vec<usize>,
    /// Global unknowns of each sector, in local order.
    members: Vec<Vec<usize>>,
    lu: Vec<Lu<usize, C64>>,
    /// Couplings into each sector from sectors solved earlier: local row,
    /// global column.
    lower: Vec<CsrMatrix>,
}

impl SectorPreconditioner {
    pub(crate) fn new(system: &CsrMatrix, space: &HilbertSpec) -> Result<Self> {
        let d = space.total_dim();
        let d0 = space.factor_dims()[0];
        let rest = d / d0;
        let n = d * d;
        let n_sectors = d0 * d0;

        let mut sector_of = vec![0usize; n];
        let mut local = vec![0usize; n];
        let mut members = vec![Vec::with_capacity(rest * rest); n_sectors];
        for k in 0..n {
            let (i, j) = (k % d, k / d);
            let s = (i / rest) * d0 + j / rest;
            local[k] = (i % rest) + rest * (j % rest);
            sector_of[k] = s;
            members[s].push(k);
        }
        for (s, list) in members.iter_mut().enumerate() {
            list.sort_unstable_by_key(|&k| local[k]);
            debug_assert!(list.iter().enumerate().all(|(l, &k)| local[k] == l), "sector {s}");
        }

        let mut order: Vec<usize> = (0..n_sectors).collect();
        order.sort_by_key(|&s| {
            let (p, q) = (s / d0, s % d0);
            (std::cmp::Reverse(p + q), std::cmp::Reverse(p))
        });
        let mut rank = vec![0usize; n_sectors];
        for (r, &s) in order.iter().enumerate() {
            rank[s] = r;
        }

        let mut lu = Vec::with_capacity(n_sectors);
        let mut lower = Vec::with_capacity(n_sectors);
        for list in &members {
            let size = list.len();
            let mut diag_entries = Vec::new();
            let mut low_entries = Vec::new();
            for (row_local, &k) in list.iter().enumerate() {
                let s = sector_of[k];
                for (c, v) in system.row(k) {
                    let t = sector_of[c];
                    if t == s {
                        diag_entries.push(faer::sparse::Triplet::new(row_local, local[c], v));
                    } else if rank[t] < rank[s] {
                        low_entries.push((row_local, c, v));
                    }
                }
            }
            let block = faer::sparse::SparseColMat::try_new_from_triplets(size, size, &diag_entries)
                .map_err(|_| Error::SolverFailure { residual: f64::INFINITY })?;
            lu.push(
                block
                    .sp_lu()
                    .map_err(|_| Error::SolverFailure { residual: f64::INFINITY })?,
            );
            lower.push(CsrMatrix::from_triplets(size, n, low_entries));
        }

        Ok(SectorPreconditioner {
            order,
            members,
            lu,
            lower,
        })
    }

    /// `z = M⁻¹ v`
    pub(crate) fn apply(&self, v: &[C64], z: &mut [C64]) {
        z.iter_mut().for_each(|x| *x = ZERO);
        for &s in &self.order {
            let list = &self.members[s];
            let low = &self.lower[s];
            let rhs = faer::Col::<C64>::from_fn(list.len(), |l| {
                let coupled: C64 = low.row(l).map(|(c, val)| val * z[c]).sum();
                v[list[l]] - coupled
            });
            let sol = self.lu[s].solve(&rhs);
            for (l, &k) in list.iter().enumerate() {
                z[k] = sol[l];
            }
        }
    }
}

pub(crate) struct GmresOutcome {
    pub x: Vec<C64>,
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Right-preconditioned restarted GMRES; stops when `‖b − A x‖ ≤ tol ‖b‖`.
pub(crate) fn gmres(
    a: &CsrMatrix,
    b: &[C64],
    pre: &SectorPreconditioner,
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> GmresOutcome {
    let n = b.len();
    let b_norm = norm(b).max(f64::MIN_POSITIVE);
    let mut x = vec![ZERO; n];
    let mut iterations = 0;
    let mut rel = 1.0;

    while iterations < max_iter {
        let ax = a.mul_vec(&x);
        let r: Vec<C64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm(&r);
        rel = beta / b_norm;
        if rel <= tol {
            return GmresOutcome {
                x,
                iterations,
                relative_residual: rel,
                converged: true,
            };
        }

        let m = restart.min(max_iter - iterations).max(1);
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
        let mut precond: Vec<Vec<C64>> = Vec::with_capacity(m);
        basis.push(r.iter().map(|v| v / beta).collect());
        // Hessenberg columns after Givens rotation
        let mut hess: Vec<Vec<C64>> = Vec::with_capacity(m);
        let mut rot: Vec<(C64, C64)> = Vec::with_capacity(m);
        let mut g = vec![ZERO; m + 1];
        g[0] = C64::new(beta, 0.0);
        let mut used = 0;

        for j in 0..m {
            let mut z = vec![ZERO; n];
            pre.apply(&basis[j], &mut z);
            let mut w = a.mul_vec(&z);
            precond.push(z);

            let mut h = vec![ZERO; j + 2];
            // modified Gram-Schmidt, applied twice
            for _ in 0..2 {
                for (i, q) in basis.iter().enumerate() {
                    let c = dot(q, &w);
                    h[i] += c;
                    w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
                }
            }
            let w_norm = norm(&w);
            h[j + 1] = C64::new(w_norm, 0.0);

            for (i, &(c, s)) in rot.iter().enumerate() {
                let (hi, hi1) = (h[i], h[i + 1]);
                h[i] = c.conj() * hi + s.conj() * hi1;
                h[i + 1] = -s * hi + c * hi1;
            }
            let (hj, hj1) = (h[j], h[j + 1]);
            let denom = (hj.norm_sqr() + hj1.norm_sqr()).sqrt();
            let (c, s) = if denom == 0.0 {
                (C64::new(1.0, 0.0), ZERO)
            } else {
                (hj / denom, hj1 / denom)
            };
            h[j] = c.conj() * hj + s.conj() * hj1;
            h[j + 1] = ZERO;
            let gj = g[j];
            g[j] = c.conj() * gj;
            g[j + 1] = -s * gj;
            rot.push((c, s));
            hess.push(h);
            used = j + 1;
            iterations += 1;

            rel = g[j + 1].norm() / b_norm;
            if rel <= tol || w_norm == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / w_norm).collect());
        }

        // back substitution for the least-squares coefficients
        let mut y = vec![ZERO; used];
        for i in (0..used).rev() {
            let mut acc = g[i];
            for k in i + 1..used {
                acc -= hess[k][i] * y[k];
            }
            y[i] = acc / hess[i][i];
        }
        for (yk, zk) in y.iter().zip(&precond) {
            x.iter_mut().zip(zk).for_each(|(xi, zi)| *xi += yk * zi);
        }
    }

    let ax = a.mul_vec(&x);
    let r: Vec<C64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    rel = rel.max(norm(&r) / b_norm);
    GmresOutcome {
        converged: norm(&r) / b_norm <= tol,
        x,
        iterations,
        relative_residual: rel,
    }
}
