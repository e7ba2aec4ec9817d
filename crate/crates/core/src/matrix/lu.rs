//! LU factorization with partial pivoting.

use num_traits::{One, Zero};

use super::{Matrix, MatrixError, MatrixRole};
use crate::scalar::{Entry, Real};

/// `P·A = L·U` with unit lower-triangular `L` stored below the diagonal.
#[derive(Debug, Clone)]
pub struct Lu<E> {
    lu: Matrix<E>,
    perm: Vec<usize>,
    swaps: usize,
}

impl<E: Entry> Lu<E> {
    pub fn factor(m: &Matrix<E>) -> Result<Self, MatrixError> {
        Self::factor_with_floor(m, E::Real::zero())
    }

    /// Like [`Lu::factor`], but any pivot with modulus below `floor` is
    /// replaced by `floor` (keeping its phase). Used by inverse iteration,
    /// where the shifted matrix is singular on purpose.
    pub fn factor_with_floor(m: &Matrix<E>, floor: E::Real) -> Result<Self, MatrixError> {
        if !m.is_square() {
            return Err(MatrixError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, _) = (k..n)
                .map(|i| (i, lu[(i, k)].modulus()))
                .fold((k, E::Real::zero() - E::Real::one()), |best, cur| {
                    if cur.1 > best.1 {
                        cur
                    } else {
                        best
                    }
                });
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let mut pivot = lu[(k, k)];
            if pivot.modulus() < floor {
                pivot = if pivot == E::zero() {
                    E::from_real(floor)
                } else {
                    pivot * E::from_real(floor / pivot.modulus())
                };
                lu[(k, k)] = pivot;
            }
            if pivot == E::zero() {
                continue;
            }
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor == E::zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Self { lu, perm, swaps })
    }

    pub fn determinant(&self) -> E {
        let n = self.lu.rows();
        let mut det = (0..n).fold(E::one(), |acc, i| acc * self.lu[(i, i)]);
        if self.swaps % 2 == 1 {
            det = -det;
        }
        det
    }

    pub fn is_singular(&self) -> bool {
        (0..self.lu.rows()).any(|i| self.lu[(i, i)] == E::zero())
    }

    pub fn solve(&self, b: &[E]) -> Result<Vec<E>, MatrixError> {
        let n = self.lu.rows();
        if b.len() != n {
            return Err(MatrixError::DimensionMismatch {
                op: "lu_solve",
                left: (n, n),
                right: (b.len(), 1),
            });
        }
        if self.is_singular() {
            return Err(MatrixError::Singular {
                which: MatrixRole::Operand,
                det: 0.0,
                threshold: 0.0,
            });
        }
        let mut x: Vec<E> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                let xk = x[k];
                x[i] -= l * xk;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                let xk = x[k];
                x[i] -= u * xk;
            }
            x[i] /= self.lu[(i, i)];
        }
        Ok(x)
    }

    pub fn solve_matrix(&self, b: &Matrix<E>) -> Result<Matrix<E>, MatrixError> {
        let cols: Result<Vec<Vec<E>>, _> =
            (0..b.cols()).map(|j| self.solve(&b.column(j))).collect();
        Matrix::from_columns(&cols?)
    }
}

/// Determinant via LU with partial pivoting; exactly zero for singular input.
pub fn determinant<E: Entry>(m: &Matrix<E>) -> Result<E, MatrixError> {
    Ok(Lu::factor(m)?.determinant())
}

/// Inverse of `m`; fails with `Singular` when `|det m| <= tol`.
pub fn inverse<E: Entry>(m: &Matrix<E>, tol: E::Real) -> Result<Matrix<E>, MatrixError> {
    let lu = Lu::factor(m)?;
    let det = lu.determinant().modulus();
    if det <= tol || lu.is_singular() {
        return Err(MatrixError::Singular {
            which: MatrixRole::Operand,
            det: det.as_f64(),
            threshold: tol.as_f64(),
        });
    }
    lu.solve_matrix(&Matrix::identity(m.rows()))
}

/// Solves `m·x = b`.
pub fn solve<E: Entry>(m: &Matrix<E>, b: &[E]) -> Result<Vec<E>, MatrixError> {
    Lu::factor(m)?.solve(b)
}
