use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scalar::{CommutativeScalar, Quaternion, Scalar};
use crate::error::{Error, Result};
use crate::tolerance;

/// Square row-major matrix over a scalar field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<S> {
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![S::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Matrix { dim, data }
    }

    /// Build from row-major entries; `entries.len()` must be a perfect square.
    pub fn from_rows(entries: Vec<S>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() || dim == 0 {
            return Err(Error::config(format!(
                "{} entries do not form a nonempty square matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::config("matrix entries must be finite"));
        }
        Ok(Matrix { dim, data: entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|e| e.is_finite())
    }

    /// Left-to-right product `self * other`; quaternion order is respected.
    pub fn mul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == S::zero() {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn checked_mul(&self, other: &Matrix<S>) -> Result<Matrix<S>> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(self.mul(other))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix<S> {
        Matrix::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn sub(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> S {
        let mut t = S::zero();
        for i in 0..self.dim {
            t += self[(i, i)];
        }
        t
    }

    /// ‖A*A − I‖_F.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .mul(self)
            .sub(&Matrix::identity(self.dim))
            .frobenius_norm()
    }

    /// ‖A* J A − J‖_F with J = diag(−1, 1, …, 1).
    pub fn signature_defect(&self) -> f64 {
        let j = signature_form::<S>(self.dim);
        self.adjoint().mul(&j).mul(self).sub(&j).frobenius_norm()
    }

    /// Multiply column `j` on the right by `s`.
    pub fn scale_column_right(&mut self, j: usize, s: S) {
        for i in 0..self.dim {
            let v = self[(i, j)];
            self[(i, j)] = v * s;
        }
    }

    /// Block-diagonal `diag(head, tail)` with a 1×1 head.
    pub fn block_diag(head: S, tail: &Matrix<S>) -> Matrix<S> {
        let n = tail.dim + 1;
        Matrix::from_fn(n, |i, j| match (i, j) {
            (0, 0) => head,
            (0, _) | (_, 0) => S::zero(),
            _ => tail[(i - 1, j - 1)],
        })
    }
}

impl<S: CommutativeScalar> Matrix<S> {
    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> S {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = S::one();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| {
                    a[x * n + k]
                        .norm_sqr()
                        .partial_cmp(&a[y * n + k].norm_sqr())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(k);
            let pivot = a[p * n + k];
            if pivot == S::zero() {
                return S::zero();
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            det = det * pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f == S::zero() {
                    continue;
                }
                for j in k..n {
                    let v = a[k * n + j];
                    a[i * n + j] -= f * v;
                }
            }
        }
        det
    }
}

impl Matrix<Quaternion> {
    /// The 2n×2n complex matrix obtained by `alpha + beta j ↦ [[alpha, beta], [-conj(beta), conj(alpha)]]`.
    pub fn complex_view(&self) -> Matrix<Complex64> {
        let n = self.dim;
        let mut out = Matrix::zeros(2 * n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = self[(i, j)].to_complex_pair();
                out[(2 * i, 2 * j)] = a;
                out[(2 * i, 2 * j + 1)] = b;
                out[(2 * i + 1, 2 * j)] = -b.conj();
                out[(2 * i + 1, 2 * j + 1)] = a.conj();
            }
        }
        out
    }
}

pub(crate) fn signature_form<S: Scalar>(dim: usize) -> Matrix<S> {
    let mut j = Matrix::identity(dim);
    j[(0, 0)] = S::from_real(-1.0);
    j
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.dim + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.dim + j]
    }
}

/// Whether `a` and `b` agree to `tol` in Frobenius norm.
pub fn approx_eq<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>, tol: f64) -> bool {
    a.dim == b.dim && a.sub(b).frobenius_norm() <= tol
}

/// Whether `a` is unitary to the structural tolerance.
pub fn is_unitary<S: Scalar>(a: &Matrix<S>) -> bool {
    a.unitarity_defect() < tolerance::STRUCTURAL
}
