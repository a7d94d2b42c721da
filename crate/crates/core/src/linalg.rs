//! Dense complex Hermitian numerics.
//!
//! All eigen computations go through [`eigh`], which returns eigenvalues in
//! descending order with a fixed phase convention on the eigenvectors so
//! that downstream factorizations are reproducible run to run.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Orthonormality tolerance for [`Subspace`] bases.
pub const ORTHONORMAL_TOL: f64 = 1e-12;

/// Dense complex self-adjoint matrix.
///
/// Construction symmetrizes the input as `(A + A^H) / 2`, so the stored
/// entries satisfy `a[i][j] == conj(a[j][i])` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: DMatrix<Complex64>,
}

impl HermitianMatrix {
    pub fn new(a: DMatrix<Complex64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Input(format!(
                "matrix must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Input("matrix has non-finite entries".into()));
        }
        let n = a.nrows();
        let mut data = DMatrix::zeros(n, n);
        for i in 0..n {
            data[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let v = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
                data[(i, j)] = v;
                data[(j, i)] = v.conj();
            }
        }
        Ok(Self { data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        Self::new(DMatrix::from_fn(n, n, f))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: DMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            data: &self.data * Complex64::new(s, 0.0),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Self::new(&self.data + &other.data)
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn principal(&self, idx: &[usize]) -> Self {
        let k = idx.len();
        Self {
            data: DMatrix::from_fn(k, k, |i, j| self.data[(idx[i], idx[j])]),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.data[(i, j)]).collect())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Result of [`psd_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdVerdict {
    pub is_psd: bool,
    pub min_eig: f64,
    pub tol_used: f64,
}

/// Eigenvalues sorted descending and the matching unit eigenvectors as
/// columns. Each eigenvector is rotated so that its first entry of largest
/// modulus is real and positive.
pub fn eigh(a: &HermitianMatrix) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = a.dim();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(a.data.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let mut pivot = 0;
        let mut best = -1.0;
        for (i, z) in v.iter().enumerate() {
            if z.norm() > best {
                best = z.norm();
                pivot = i;
            }
        }
        let phase = if best > 0.0 {
            v[pivot].conj() / best
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            vectors[(i, col)] = v[i] * phase;
        }
        vectors[(pivot, col)] = Complex64::new(vectors[(pivot, col)].norm(), 0.0);
    }
    (values, vectors)
}

/// Smallest eigenvalue; `+inf` for the empty matrix.
pub fn min_eigenvalue(a: &HermitianMatrix) -> f64 {
    if a.dim() == 0 {
        return f64::INFINITY;
    }
    SymmetricEigen::new(a.data.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn max_eigenvalue(a: &HermitianMatrix) -> f64 {
    if a.dim() == 0 {
        return f64::NEG_INFINITY;
    }
    SymmetricEigen::new(a.data.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// PSD certificate relative to the spectral scale: the matrix passes when
/// `min_eig >= -tol * max(1, max_eig)`.
pub fn psd_check(a: &HermitianMatrix, tol: f64) -> Result<PsdVerdict> {
    check_tol(tol)?;
    if a.dim() == 0 {
        return Ok(PsdVerdict {
            is_psd: true,
            min_eig: 0.0,
            tol_used: tol,
        });
    }
    let vals = SymmetricEigen::new(a.data.clone()).eigenvalues;
    let min_eig = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max_eig = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(PsdVerdict {
        is_psd: min_eig >= -tol * max_eig.max(1.0),
        min_eig,
        tol_used: tol,
    })
}

/// Rows `r_i` in `C^rank` with `<r_i, r_j> = a[i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdFactor {
    pub rows: Vec<Vec<Complex64>>,
    pub rank: usize,
}

impl PsdFactor {
    /// `max |<r_i, r_j> - a[i][j]|`.
    pub fn reconstruction_error(&self, a: &HermitianMatrix) -> f64 {
        let n = self.rows.len();
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                err = err.max((inner(&self.rows[i], &self.rows[j]) - a.get(i, j)).norm());
            }
        }
        err
    }
}

/// Eigen-based positive factorization. Eigenvalues above `tol * max_eig`
/// are kept; the factor columns follow the [`eigh`] ordering and phase
/// convention.
pub fn psd_factor(a: &HermitianMatrix, tol: f64) -> Result<PsdFactor> {
    let verdict = psd_check(a, tol)?;
    if !verdict.is_psd {
        return Err(Error::NotPsd {
            min_eig: verdict.min_eig,
        });
    }
    let n = a.dim();
    let (values, vectors) = eigh(a);
    let max_eig = values.first().copied().unwrap_or(0.0);
    let kept: Vec<usize> = (0..n)
        .filter(|&k| values[k] > tol * max_eig && values[k] > 0.0)
        .collect();
    let rows = (0..n)
        .map(|i| {
            kept.iter()
                .map(|&k| vectors[(i, k)] * values[k].sqrt())
                .collect()
        })
        .collect();
    Ok(PsdFactor {
        rows,
        rank: kept.len(),
    })
}

/// `<x, y> = sum x_k conj(y_k)`.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `T^H T - T T^H`.
pub fn self_commutator(t: &DMatrix<Complex64>) -> Result<HermitianMatrix> {
    let th = t.adjoint();
    HermitianMatrix::new(&th * t - t * &th)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Input(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// A subspace of `C^n` given by an orthonormal column basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: DMatrix<Complex64>,
}

impl Subspace {
    /// Wraps `basis`, checking orthonormality of its columns.
    pub fn new(basis: DMatrix<Complex64>) -> Result<Self> {
        let k = basis.ncols();
        if k > basis.nrows() {
            return Err(Error::Input(format!(
                "{k} basis columns exceed ambient dimension {}",
                basis.nrows()
            )));
        }
        let gram = basis.adjoint() * &basis;
        let dev = (gram - DMatrix::<Complex64>::identity(k, k))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > ORTHONORMAL_TOL {
            return Err(Error::Input(format!(
                "basis is not orthonormal (deviation {dev:e})"
            )));
        }
        Ok(Self {
            ambient_dim: basis.nrows(),
            basis,
        })
    }

    /// The whole space `C^n`.
    pub fn full(n: usize) -> Self {
        Self {
            ambient_dim: n,
            basis: DMatrix::identity(n, n),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            ambient_dim: n,
            basis: DMatrix::zeros(n, 0),
        }
    }

    /// Orthonormal basis for the span of the columns of `vectors`.
    ///
    /// Directions whose Gram eigenvalue falls below `tol * max_eig` are
    /// dropped; the result is re-orthonormalized by one Gram-Schmidt pass.
    pub fn from_spanning(vectors: &DMatrix<Complex64>, tol: f64) -> Result<Self> {
        check_tol(tol)?;
        let n = vectors.nrows();
        if vectors.ncols() == 0 {
            return Ok(Self::zero(n));
        }
        let gram = HermitianMatrix::new(vectors.adjoint() * vectors)?;
        let (values, evecs) = eigh(&gram);
        let max_eig = values[0];
        let mut cols: Vec<DVector<Complex64>> = Vec::new();
        for (k, &lambda) in values.iter().enumerate() {
            if lambda <= tol * max_eig || lambda <= 0.0 {
                break;
            }
            let v = vectors * evecs.column(k) / Complex64::new(lambda.sqrt(), 0.0);
            cols.push(v);
        }
        for k in 0..cols.len() {
            for prev in 0..k {
                let c = cols[prev].dotc(&cols[k]);
                let p = cols[prev].clone() * c;
                cols[k] -= p;
            }
            let nrm = cols[k].norm();
            cols[k] /= Complex64::new(nrm, 0.0);
        }
        let basis = if cols.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(&cols)
        };
        Ok(Self {
            ambient_dim: n,
            basis,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<Complex64> {
        &self.basis
    }

    pub fn project(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.basis * (self.basis.adjoint() * v)
    }

    /// `P_M T|_M` in the subspace basis.
    pub fn compress(&self, t: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        self.basis.adjoint() * t * &self.basis
    }

    /// Largest overlap `max |<q_i, p_j>|` between the two bases.
    pub fn overlap(&self, other: &Self) -> f64 {
        (self.basis.adjoint() * &other.basis)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Outcome of [`verify_hyponormal_closure`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosureCheck {
    pub norms_equal: bool,
    pub tf_in_m: bool,
}

/// Checks the two conditions of the hyponormal closure property for a
/// vector `f` of the subspace `m`: whether `||T* f|| = ||T f||`, and whether
/// `T f` lies in `m`. When the compression of `T` to `m` is hyponormal the
/// first implies the second.
pub fn verify_hyponormal_closure(
    t: &DMatrix<Complex64>,
    m: &Subspace,
    f: &DVector<Complex64>,
    tol: f64,
) -> Result<ClosureCheck> {
    check_tol(tol)?;
    let n = m.ambient_dim();
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            got: t.nrows(),
        });
    }
    if f.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: f.len(),
        });
    }
    let off = (f - m.project(f)).norm();
    if off > tol * f.norm().max(1.0) {
        return Err(Error::Precondition(format!(
            "f is not in the subspace (distance {off:e})"
        )));
    }
    let tf = t * f;
    let tsf = t.adjoint() * f;
    let scale = tf.norm().max(1.0);
    Ok(ClosureCheck {
        norms_equal: (tsf.norm() - tf.norm()).abs() <= tol * scale,
        tf_in_m: (&tf - m.project(&tf)).norm() <= tol * scale,
    })
}
