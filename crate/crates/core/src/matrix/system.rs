use num_complex::Complex;

use super::lu::{inverse, Lu};
use super::{Matrix, MatrixError, MatrixRole};
use crate::scalar::Real;

/// Relative singularity threshold; scaled by `max(1, ‖M‖∞)`.
pub const DEFAULT_SINGULAR_TOL: f64 = 1e-12;

/// A checked pair `(Γ, P)` for the system `Γẋ = −Px`.
///
/// `Γ` is exactly skew-symmetric, `P` exactly symmetric, both nonsingular
/// and of size `2n × 2n`. The inverses and `PΓ⁻¹` are cached.
#[derive(Debug, Clone)]
pub struct ValidatedSystem<T> {
    gamma: Matrix<T>,
    p: Matrix<T>,
    n: usize,
    gamma_inv: Matrix<T>,
    p_inv: Matrix<T>,
    p_gamma_inv: Matrix<T>,
}

/// Validates `(Γ, P)`.
///
/// Symmetry checks are exact entry comparisons. A matrix is reported
/// singular when `|det| <= tol · max(1, ‖M‖∞)`.
pub fn validate_system<T: Real>(
    gamma: Matrix<T>,
    p: Matrix<T>,
    tol: T,
) -> Result<ValidatedSystem<T>, MatrixError> {
    for (m, _) in [(&gamma, MatrixRole::Gamma), (&p, MatrixRole::P)] {
        if !m.is_square() {
            return Err(MatrixError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
    }
    if gamma.shape() != p.shape() {
        return Err(MatrixError::DimensionMismatch {
            op: "validate_system",
            left: gamma.shape(),
            right: p.shape(),
        });
    }
    let dim = gamma.rows();
    if dim < 2 || !dim.is_multiple_of(2) {
        return Err(MatrixError::OddDimension { dim });
    }
    for m in [&gamma, &p] {
        for i in 0..dim {
            for j in 0..dim {
                if !m[(i, j)].is_finite() {
                    return Err(MatrixError::NonFinite { row: i, col: j });
                }
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            if gamma[(i, j)] != -gamma[(j, i)] {
                return Err(MatrixError::NotSkewSymmetric {
                    which: MatrixRole::Gamma,
                    row: i,
                    col: j,
                });
            }
        }
    }
    for i in 0..dim {
        for j in i + 1..dim {
            if p[(i, j)] != p[(j, i)] {
                return Err(MatrixError::NotSymmetric {
                    which: MatrixRole::P,
                    row: i,
                    col: j,
                });
            }
        }
    }

    let gamma_inv = checked_inverse(&gamma, MatrixRole::Gamma, tol)?;
    let p_inv = checked_inverse(&p, MatrixRole::P, tol)?;

    let residual = (&(&gamma * &gamma_inv) - &Matrix::identity(dim)).max_abs();
    if residual > T::lit(1e-8) {
        return Err(MatrixError::Singular {
            which: MatrixRole::Gamma,
            det: Lu::factor(&gamma)?.determinant().as_f64(),
            threshold: tol.as_f64(),
        });
    }

    let p_gamma_inv = &p * &gamma_inv;
    Ok(ValidatedSystem {
        gamma,
        p,
        n: dim / 2,
        gamma_inv,
        p_inv,
        p_gamma_inv,
    })
}

fn checked_inverse<T: Real>(
    m: &Matrix<T>,
    which: MatrixRole,
    tol: T,
) -> Result<Matrix<T>, MatrixError> {
    let threshold = tol * T::one().max(m.norm_inf());
    inverse(m, threshold).map_err(|e| match e {
        MatrixError::Singular { det, threshold, .. } => MatrixError::Singular {
            which,
            det,
            threshold,
        },
        other => other,
    })
}

impl<T: Real> ValidatedSystem<T> {
    /// Validates with the default singularity tolerance.
    pub fn new(gamma: Matrix<T>, p: Matrix<T>) -> Result<Self, MatrixError> {
        validate_system(gamma, p, T::lit(DEFAULT_SINGULAR_TOL))
    }

    pub fn gamma(&self) -> &Matrix<T> {
        &self.gamma
    }

    pub fn p(&self) -> &Matrix<T> {
        &self.p
    }

    pub fn gamma_inv(&self) -> &Matrix<T> {
        &self.gamma_inv
    }

    pub fn p_inv(&self) -> &Matrix<T> {
        &self.p_inv
    }

    /// Half-dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// State dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// `PΓ⁻¹`.
    pub fn p_gamma_inv(&self) -> &Matrix<T> {
        &self.p_gamma_inv
    }

    pub fn p_gamma_inv_complex(&self) -> Matrix<Complex<T>> {
        self.p_gamma_inv.to_complex()
    }

    /// Generator of the flow, `−Γ⁻¹P`, so that `ẋ = Gx`.
    pub fn generator(&self) -> Matrix<T> {
        -&(&self.gamma_inv * &self.p)
    }

    /// `H(x) = ½xᵀPx`.
    pub fn hamiltonian(&self, x: &[T]) -> T {
        let px = self.p.matvec(x).expect("state dimension");
        T::lit(0.5) * super::vector::dot(x, &px)
    }

    pub fn det_gamma(&self) -> T {
        Lu::factor(&self.gamma)
            .map(|lu| lu.determinant())
            .unwrap_or_else(|_| T::zero())
    }

    pub fn det_p(&self) -> T {
        Lu::factor(&self.p)
            .map(|lu| lu.determinant())
            .unwrap_or_else(|_| T::zero())
    }

    /// Spectral radius proxy `‖PΓ⁻¹‖∞` used to scale tolerances.
    pub fn scale(&self) -> T {
        self.p_gamma_inv.norm_inf()
    }

    /// The standard `2×2` symplectic unit `[[0, 1], [−1, 0]]`.
    pub fn standard_j() -> Matrix<T> {
        Matrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => T::one(),
            (1, 0) => -T::one(),
            _ => T::zero(),
        })
    }
}
