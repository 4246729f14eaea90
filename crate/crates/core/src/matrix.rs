//! Dense symmetric matrices.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// A dense `n x n` real matrix whose `(i, j)` and `(j, i)` entries are
/// bitwise equal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    /// Wraps `m`, replacing it by `(m + m^T) / 2`. The average is computed
    /// pairwise, so the result is exactly symmetric.
    pub fn symmetrize(mut m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Parameter(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        for j in 0..n {
            for i in (j + 1)..n {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(SymmetricMatrix(m))
    }

    /// Wraps `m` after checking exact symmetry.
    pub fn try_from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Parameter("matrix is not square".into()));
        }
        let n = m.nrows();
        for j in 0..n {
            for i in (j + 1)..n {
                if m[(i, j)].to_bits() != m[(j, i)].to_bits() {
                    return Err(Error::Parameter(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(SymmetricMatrix(m))
    }

    pub fn identity(n: usize) -> Self {
        SymmetricMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix(DMatrix::zeros(n, n))
    }

    /// `U diag(values) U^T`, with `U` given column-wise.
    pub fn from_spectral(basis: &DMatrix<f64>, values: &DVector<f64>) -> Self {
        let mut scaled = basis.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= values[k];
        }
        let m = &scaled * basis.transpose();
        // square by construction
        Self::symmetrize(m).expect("spectral assembly is square")
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn diagonal(&self) -> DVector<f64> {
        self.0.diagonal()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// `sum_ij self_ij * other_ij`, i.e. `tr(self * other)` for symmetric pairs.
    pub fn frobenius_dot(&self, other: &SymmetricMatrix) -> f64 {
        self.0.dot(&other.0)
    }

    /// `x^T self x`
    pub fn quadratic_form(&self, x: &DVector<f64>) -> f64 {
        (&self.0 * x).dot(x)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SymmetricMatrix(&self.0 * factor)
    }

    /// Adds `d` to the diagonal.
    pub fn add_diagonal(&self, d: &DVector<f64>) -> Self {
        let mut m = self.0.clone();
        for i in 0..self.n() {
            m[(i, i)] += d[i];
        }
        SymmetricMatrix(m)
    }

    /// Cholesky factorization; fails if the matrix is not numerically SPD.
    pub fn cholesky(&self) -> Result<Cholesky<f64, Dyn>> {
        Cholesky::new(self.0.clone())
            .ok_or_else(|| Error::Numerical("matrix is not positive definite".into()))
    }

    /// `ln det` via Cholesky.
    pub fn log_det_spd(&self) -> Result<f64> {
        Ok(log_det(&self.cholesky()?))
    }

    /// Inverse of an SPD matrix.
    pub fn inverse_spd(&self) -> Result<Self> {
        let inv = self.cholesky()?.inverse();
        Self::symmetrize(inv)
    }

    /// Conjugation `P^T self P` by a permutation, given as `perm[new] = old`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n();
        SymmetricMatrix(DMatrix::from_fn(n, n, |i, j| self.0[(perm[i], perm[j])]))
    }
}

impl AsRef<DMatrix<f64>> for SymmetricMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// `ln det A` from the Cholesky factor of `A`.
pub fn log_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}
