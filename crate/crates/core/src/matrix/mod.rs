//! Dense real/complex matrices and the validated `(Γ, P)` system.
//!
//! Storage is row-major. Dimensions are small (2n ≤ 64), so all algorithms
//! are unblocked.

mod io;
mod lu;
mod system;
pub mod vector;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Float, Zero};

use crate::scalar::{Entry, Real};

pub use io::{matrix_from_json, matrix_to_json, real_matrix_from_json};
pub use lu::{determinant, inverse, solve, Lu};
pub use system::{validate_system, ValidatedSystem, DEFAULT_SINGULAR_TOL};

/// Which matrix an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixRole {
    Gamma,
    P,
    Operand,
}

impl fmt::Display for MatrixRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixRole::Gamma => f.write_str("Gamma"),
            MatrixRole::P => f.write_str("P"),
            MatrixRole::Operand => f.write_str("matrix"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("system dimension must be even and at least 2, got {dim}")]
    OddDimension { dim: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("{which} is not symmetric at ({row}, {col})")]
    NotSymmetric {
        which: MatrixRole,
        row: usize,
        col: usize,
    },
    #[error("{which} is not skew-symmetric at ({row}, {col})")]
    NotSkewSymmetric {
        which: MatrixRole,
        row: usize,
        col: usize,
    },
    #[error("{which} is singular (|det| = {det:e} <= {threshold:e})")]
    Singular {
        which: MatrixRole,
        det: f64,
        threshold: f64,
    },
    #[error("malformed matrix: {0}")]
    Parse(String),
}

#[derive(Clone, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: fmt::Debug> fmt::Debug for Matrix<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<E: Entry> Matrix<E> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![E::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { E::one() } else { E::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Result<Self, MatrixError> {
        if rows * cols != data.len() {
            return Err(MatrixError::DimensionMismatch {
                op: "from_vec",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows(rows: &[Vec<E>]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(MatrixError::DimensionMismatch {
                    op: "from_rows",
                    left: (i, r.len()),
                    right: (0, cols),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<E>]) -> Result<Self, MatrixError> {
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(MatrixError::DimensionMismatch {
                op: "from_columns",
                left: (rows, 1),
                right: (bad.len(), 1),
            });
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    pub fn diagonal(diag: &[E]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { E::zero() })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[E] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn map<F: Entry>(&self, f: impl Fn(E) -> F) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&e| f(e)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conjugate(&self) -> Self {
        self.map(Entry::conj)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: E) -> Self {
        self.map(|e| e * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(E, E) -> E,
    ) -> Result<Self, MatrixError> {
        if self.shape() != other.shape() {
            return Err(MatrixError::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == E::zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[E]) -> Result<Vec<E>, MatrixError> {
        if self.cols != x.len() {
            return Err(MatrixError::DimensionMismatch {
                op: "matvec",
                left: self.shape(),
                right: (x.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(E::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Result<Self, MatrixError> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    pub fn trace(&self) -> E {
        (0..self.rows.min(self.cols)).fold(E::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Integer power by repeated squaring. Requires a square matrix.
    pub fn powi(&self, k: u32) -> Result<Self, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.matmul(&base)?;
            }
            base = base.matmul(&base)?;
            k >>= 1;
        }
        Ok(result)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> E::Real {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .fold(E::Real::zero(), |acc, e| acc + e.modulus())
            })
            .fold(E::Real::zero(), E::Real::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> E::Real {
        (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(E::Real::zero(), |acc, i| acc + self[(i, j)].modulus())
            })
            .fold(E::Real::zero(), E::Real::max)
    }

    pub fn norm_frobenius(&self) -> E::Real {
        self.data
            .iter()
            .fold(E::Real::zero(), |acc, e| {
                let m = e.modulus();
                acc + m * m
            })
            .sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> E::Real {
        self.data
            .iter()
            .map(|e| e.modulus())
            .fold(E::Real::zero(), E::Real::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|e| e.finite())
    }

    /// Largest `|m_ij − m_ji|`; zero for exactly symmetric matrices.
    pub fn symmetry_defect(&self) -> E::Real {
        let mut worst = E::Real::zero();
        for i in 0..self.rows {
            for j in 0..self.cols.min(self.rows) {
                worst = worst.max((self[(i, j)] - self[(j, i)]).modulus());
            }
        }
        worst
    }

    pub fn to_complex(&self) -> Matrix<Complex<E::Real>> {
        self.map(Entry::to_complex)
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn block_diagonal(blocks: &[Self]) -> Self {
        let rows = blocks.iter().map(Matrix::rows).sum();
        let cols = blocks.iter().map(Matrix::cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }
}

impl<T: Real> Matrix<Complex<T>> {
    pub fn real_part(&self) -> Matrix<T> {
        self.map(|z| z.re)
    }

    pub fn imag_part(&self) -> Matrix<T> {
        self.map(|z| z.im)
    }
}

impl<E> Index<(usize, usize)> for Matrix<E> {
    type Output = E;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &E {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Matrix<E> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape mismatch; the named methods return errors.

impl<E: Entry> Add for &Matrix<E> {
    type Output = Matrix<E>;
    fn add(self, rhs: Self) -> Matrix<E> {
        Matrix::add(self, rhs).expect("matrix add: shape mismatch")
    }
}

impl<E: Entry> Sub for &Matrix<E> {
    type Output = Matrix<E>;
    fn sub(self, rhs: Self) -> Matrix<E> {
        Matrix::sub(self, rhs).expect("matrix sub: shape mismatch")
    }
}

impl<E: Entry> Mul for &Matrix<E> {
    type Output = Matrix<E>;
    fn mul(self, rhs: Self) -> Matrix<E> {
        self.matmul(rhs).expect("matmul: shape mismatch")
    }
}

impl<E: Entry> Neg for &Matrix<E> {
    type Output = Matrix<E>;
    fn neg(self) -> Matrix<E> {
        self.map(|e| -e)
    }
}
