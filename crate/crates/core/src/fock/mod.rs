//! Operators and states on truncated Fock spaces.
//!
//! A mode with cutoff `d` keeps the levels `0..d`; every truncation artifact
//! (for example the broken commutator `[a, a†]`) lives in the top level.
//! Composite spaces are ordered as written: in `tensor(A, B)` the factor of
//! `A` is the slow index.

mod linalg;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;
use crate::C64;

pub use linalg::{eig_hermitian, expm, expm_skew_hermitian, EigenDecomposition};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Cutoffs of the modes making up a (possibly composite) Hilbert space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HilbertSpec {
    factor_dims: Vec<usize>,
}

impl HilbertSpec {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() {
            return Err(Error::InvalidDimension("no factors".into()));
        }
        if let Some(pos) = factor_dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidDimension(format!("factor {pos} has dimension 0")));
        }
        Ok(HilbertSpec { factor_dims })
    }

    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn total_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    /// Space of `self ⊗ other`.
    pub fn concat(&self, other: &HilbertSpec) -> HilbertSpec {
        let mut factor_dims = self.factor_dims.clone();
        factor_dims.extend_from_slice(&other.factor_dims);
        HilbertSpec { factor_dims }
    }
}

impl fmt::Display for HilbertSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.factor_dims.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", dims.join("x"))
    }
}

#[derive(Clone, Debug)]
pub enum Storage {
    Dense(Array2<C64>),
    Sparse(CsrMatrix),
}

/// Square complex matrix acting on a truncated Hilbert space.
///
/// Dense and sparse storage are interchangeable: every operation gives the
/// same values for either layout. Binary operations keep sparse storage only
/// when both operands are sparse. Arithmetic operators panic on mismatched
/// dimensions, like `ndarray` does; the result carries the left operand's
/// space.
#[derive(Clone, Debug)]
pub struct Operator {
    space: HilbertSpec,
    storage: Storage,
}

impl Operator {
    pub fn from_dense(space: HilbertSpec, matrix: Array2<C64>) -> Result<Self> {
        let d = space.total_dim();
        if matrix.dim() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Operator {
            space,
            storage: Storage::Dense(matrix),
        })
    }

    pub fn from_sparse(space: HilbertSpec, matrix: CsrMatrix) -> Result<Self> {
        let d = space.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Operator {
            space,
            storage: Storage::Sparse(matrix),
        })
    }

    pub fn zeros(space: HilbertSpec) -> Self {
        let d = space.total_dim();
        Operator {
            space,
            storage: Storage::Sparse(CsrMatrix::zeros(d, d)),
        }
    }

    pub fn space(&self) -> &HilbertSpec {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn to_dense(&self) -> Array2<C64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(m) => m.to_dense(),
        }
    }

    pub fn to_sparse(&self) -> CsrMatrix {
        match &self.storage {
            Storage::Dense(m) => CsrMatrix::from_dense(m),
            Storage::Sparse(m) => m.clone(),
        }
    }

    /// Same operator with dense storage.
    pub fn dense(&self) -> Operator {
        Operator {
            space: self.space.clone(),
            storage: Storage::Dense(self.to_dense()),
        }
    }

    /// Same operator with sparse storage.
    pub fn sparse(&self) -> Operator {
        Operator {
            space: self.space.clone(),
            storage: Storage::Sparse(self.to_sparse()),
        }
    }

    /// Relabels the space without touching the elements.
    pub fn with_space(self, space: HilbertSpec) -> Result<Self> {
        if space.total_dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: space.total_dim(),
            });
        }
        Ok(Operator { space, ..self })
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m[[row, col]],
            Storage::Sparse(m) => m.get(row, col),
        }
    }

    pub fn trace(&self) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m.diag().sum(),
            Storage::Sparse(m) => m.trace(),
        }
    }

    pub fn dagger(&self) -> Operator {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m.t().mapv(|v| v.conj())),
            Storage::Sparse(m) => Storage::Sparse(m.adjoint()),
        };
        Operator {
            space: self.space.clone(),
            storage,
        }
    }

    /// Elementwise transpose (no conjugation).
    pub fn transpose(&self) -> Operator {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m.t().to_owned()),
            Storage::Sparse(m) => Storage::Sparse(m.transpose()),
        };
        Operator {
            space: self.space.clone(),
            storage,
        }
    }

    pub fn conj(&self) -> Operator {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m.mapv(|v| v.conj())),
            Storage::Sparse(m) => Storage::Sparse(m.conj()),
        };
        Operator {
            space: self.space.clone(),
            storage,
        }
    }

    pub fn scale(&self, s: C64) -> Operator {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m.mapv(|v| v * s)),
            Storage::Sparse(m) => Storage::Sparse(m.scale(s)),
        };
        Operator {
            space: self.space.clone(),
            storage,
        }
    }

    pub fn pow(&self, k: u32) -> Operator {
        let mut out = identity_on(self.space.clone());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    /// Largest elementwise `|self - other|`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.check_same_dim(other);
        let diff = (self - other).to_sparse();
        diff.values().iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise `|A - A†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn max_abs(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Storage::Sparse(m) => m.values().iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }

    /// `A |psi>`
    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        assert_eq!(psi.len(), self.dim(), "state dimension");
        match &self.storage {
            Storage::Dense(m) => m.dot(&ndarray::ArrayView1::from(psi)).to_vec(),
            Storage::Sparse(m) => m.mul_vec(psi),
        }
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
            Storage::Sparse(m) => m.norm_fro(),
        }
    }

    fn check_same_dim(&self, other: &Operator) {
        assert_eq!(
            self.dim(),
            other.dim(),
            "operator dimensions differ: {} vs {}",
            self.space,
            other.space
        );
    }

    fn combine(&self, other: &Operator, s: C64) -> Operator {
        self.check_same_dim(other);
        let storage = match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => Storage::Sparse(a.add_scaled(b, s)),
            _ => {
                let mut a = self.to_dense();
                a.scaled_add(s, &other.to_dense());
                Storage::Dense(a)
            }
        };
        Operator {
            space: self.space.clone(),
            storage,
        }
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.combine(rhs, ONE)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.combine(rhs, -ONE)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(-ONE)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.check_same_dim(rhs);
        let storage = match (&self.storage, &rhs.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => Storage::Sparse(a.matmul(b)),
            (Storage::Sparse(a), Storage::Dense(b)) => Storage::Dense(a.mul_dense(b)),
            (Storage::Dense(a), Storage::Sparse(b)) => {
                // (B^T A^T)^T
                let at = a.t().to_owned();
                Storage::Dense(b.transpose().mul_dense(&at).t().to_owned())
            }
            (Storage::Dense(a), Storage::Dense(b)) => Storage::Dense(a.dot(b)),
        };
        Operator {
            space: self.space.clone(),
            storage,
        }
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(C64::new(rhs, 0.0))
    }
}

/// Annihilation operator on levels `0..dim`: `a|k> = sqrt(k)|k-1>`.
pub fn destroy(dim: usize) -> Result<Operator> {
    let space = HilbertSpec::single(dim)?;
    let m = CsrMatrix::from_triplets(
        dim,
        dim,
        (1..dim).map(|k| (k - 1, k, C64::new((k as f64).sqrt(), 0.0))),
    );
    Operator::from_sparse(space, m)
}

/// Creation operator, the adjoint of [`destroy`].
pub fn create(dim: usize) -> Result<Operator> {
    Ok(destroy(dim)?.dagger())
}

/// Number operator `a†a = diag(0, 1, ..., dim-1)`.
pub fn number(dim: usize) -> Result<Operator> {
    let space = HilbertSpec::single(dim)?;
    let diag: Vec<C64> = (0..dim).map(|k| C64::new(k as f64, 0.0)).collect();
    Operator::from_sparse(space, CsrMatrix::from_diagonal(&diag))
}

pub fn identity(dim: usize) -> Result<Operator> {
    Ok(identity_on(HilbertSpec::single(dim)?))
}

pub fn identity_on(space: HilbertSpec) -> Operator {
    let d = space.total_dim();
    Operator {
        space,
        storage: Storage::Sparse(CsrMatrix::identity(d)),
    }
}

/// Kronecker product; the result lives on the concatenated space.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    let space = a.space.concat(&b.space);
    let storage = match (&a.storage, &b.storage) {
        (Storage::Sparse(x), Storage::Sparse(y)) => Storage::Sparse(x.kron(y)),
        _ => {
            let (x, y) = (a.to_dense(), b.to_dense());
            let (da, db) = (x.nrows(), y.nrows());
            let mut out = Array2::zeros((da * db, da * db));
            for ((i, j), &v) in x.indexed_iter() {
                if v != ZERO {
                    out.slice_mut(ndarray::s![i * db..(i + 1) * db, j * db..(j + 1) * db])
                        .assign(&y.mapv(|w| v * w));
                }
            }
            Storage::Dense(out)
        }
    };
    Operator { space, storage }
}

/// Kronecker product of a list of operators, left to right.
pub fn tensor_all(ops: &[&Operator]) -> Operator {
    let (first, rest) = ops.split_first().expect("at least one operator");
    rest.iter().fold((*first).clone(), |acc, op| tensor(&acc, op))
}

pub fn dagger(a: &Operator) -> Operator {
    a.dagger()
}

/// `Tr(rho A)`.
pub fn expect(rho: &DensityMatrix, a: &Operator) -> Result<C64> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: a.dim(),
        });
    }
    let r = rho.matrix();
    let value = match &a.storage {
        Storage::Sparse(m) => m.iter().map(|(j, i, v)| r[[i, j]] * v).sum(),
        Storage::Dense(m) => r.iter().zip(m.t().iter()).map(|(&x, &y)| x * y).sum(),
    };
    Ok(value)
}

/// Index of the product basis state `|n_0, n_1, ...>`.
pub fn basis_index(space: &HilbertSpec, levels: &[usize]) -> Result<usize> {
    if levels.len() != space.factor_dims().len() {
        return Err(Error::DimensionMismatch {
            expected: space.factor_dims().len(),
            found: levels.len(),
        });
    }
    let mut idx = 0;
    for (&l, &d) in levels.iter().zip(space.factor_dims()) {
        if l >= d {
            return Err(Error::InvalidDimension(format!("level {l} outside cutoff {d}")));
        }
        idx = idx * d + l;
    }
    Ok(idx)
}

/// Hermitian, unit-trace, positive semidefinite operator (dense storage).
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const EIGEN_TOL: f64 = 1e-8;

    /// Validates the state invariants; the operator is not modified.
    pub fn new(op: Operator) -> Result<Self> {
        let op = op.dense();
        let herm = op.hermiticity_deviation();
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = op.trace();
        if (tr - ONE).norm() > Self::TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_eig = eig_hermitian(&op)?.values[0];
        if min_eig < -Self::EIGEN_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(DensityMatrix { op })
    }

    /// Symmetrizes `(A + A†)/2`, divides by the trace, then validates.
    pub fn from_unnormalized(op: Operator) -> Result<Self> {
        let sym = (&op + &op.dagger()).scale(C64::new(0.5, 0.0)).dense();
        let tr = sym.trace().re;
        if !(tr.is_finite() && tr.abs() > 0.0) {
            return Err(Error::InvalidState(format!("cannot normalize trace {tr}")));
        }
        Self::new(sym.scale(C64::new(1.0 / tr, 0.0)))
    }

    /// `|psi><psi|` for a normalized vector.
    pub fn pure(space: HilbertSpec, psi: &[C64]) -> Result<Self> {
        if psi.len() != space.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.total_dim(),
                found: psi.len(),
            });
        }
        let col = ndarray::ArrayView2::from_shape((psi.len(), 1), psi).expect("column shape");
        let outer = col.dot(&col.t().mapv(|v| v.conj()));
        Self::new(Operator::from_dense(space, outer)?)
    }

    /// Product Fock state `|n_0, n_1, ...><n_0, n_1, ...|`.
    pub fn fock(space: HilbertSpec, levels: &[usize]) -> Result<Self> {
        let idx = basis_index(&space, levels)?;
        let d = space.total_dim();
        let mut m = Array2::zeros((d, d));
        m[[idx, idx]] = ONE;
        Ok(DensityMatrix {
            op: Operator::from_dense(space, m)?,
        })
    }

    /// Diagonal state with the given populations (normalized here).
    pub fn diagonal(space: HilbertSpec, populations: &[f64]) -> Result<Self> {
        let d = space.total_dim();
        if populations.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: populations.len(),
            });
        }
        let total: f64 = populations.iter().sum();
        let mut m = Array2::zeros((d, d));
        for (i, &p) in populations.iter().enumerate() {
            m[[i, i]] = C64::new(p / total, 0.0);
        }
        Self::new(Operator::from_dense(space, m)?)
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn matrix(&self) -> &Array2<C64> {
        match &self.op.storage {
            Storage::Dense(m) => m,
            Storage::Sparse(_) => unreachable!("density matrices are stored dense"),
        }
    }

    pub fn space(&self) -> &HilbertSpec {
        self.op.space()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Column-major vectorization: element `(i, j)` sits at `i + d * j`.
    pub fn to_vec(&self) -> Vec<C64> {
        self.matrix().t().iter().copied().collect()
    }

    /// `½ Σ |λ_k(ρ - σ)|`
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let diff = &self.op - &other.op;
        let eig = eig_hermitian(&diff)?;
        Ok(0.5 * eig.values.iter().map(|l| l.abs()).sum::<f64>())
    }
}

/// Inverse of [`DensityMatrix::to_vec`], without validation.
pub fn unvec(v: &[C64], dim: usize) -> Array2<C64> {
    assert_eq!(v.len(), dim * dim);
    Array2::from_shape_fn((dim, dim), |(i, j)| v[i + dim * j])
}
