//! Lax pairs `(B, L(x))` for `Γẋ = −Px` and the quadratic first integrals
//! `I(x) = Tr L(x)²` they produce.
//!
//! `L` is linear in the state, so a model stores one covector per entry of
//! `L`; `B` is constant.

mod build;
mod family;
mod real_form;

use std::fmt;

use num_complex::{Complex, Complex64};
use num_traits::Zero;

use crate::matrix::vector::dot;
use crate::matrix::{Matrix, MatrixError};
use crate::scalar::{complexify, Real};
use crate::spectral::SpectralError;

pub use build::{
    block_lax_2n, build_lax2, covector_rank, factorized_integral, integral_of_pair, normalize_n1, same_lambda_block_lax,
    sqrt_lax_n1, symmetric_sqrt_2x2, trace_power, SqrtRoot, SymmetricFilling,
};
pub use family::{admissible_pairs, integral_family, integral_family_with, FamilyOptions, IntegralFamily};
pub use real_form::{real_form_lax, real_imag_split, real_block_matrix, RealFormModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LaxError {
    #[error("construction needs n = 1, got n = {n}")]
    NotN1 { n: usize },
    #[error("w^T Gamma P Gamma^-1 w vanishes ({value:e}); cannot normalize")]
    DegenerateForm { value: f64 },
    #[error("normalization check w^T P^-1 w = 1 failed (residual {residual:e})")]
    NormalizationCheck { residual: f64 },
    #[error("square root of P is singular (det T = {det:e})")]
    SingularRoot { det: f64 },
    #[error("identity Gamma T = det T T^-1 Gamma fails (residual {residual:e})")]
    RootIdentity { residual: f64 },
    #[error("pairs {first} and {second} share lambda^2")]
    DuplicateLambdaSq { first: usize, second: usize },
    #[error("expected {expected} pairs, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("covectors have rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("vector at ({row}, {col}) is not in V_lambda (residual {residual:e})")]
    VectorNotInVLambda { row: usize, col: usize, residual: f64 },
    #[error("filling entry ({row}, {col}) is an eigenvector of P Gamma^-1")]
    EigenvectorEntry { row: usize, col: usize },
    #[error("filling is not symmetric or not square")]
    BadFilling,
    #[error("lambda = {lambda} has no conjugate partner among the pairs")]
    NotConjugateClosed { lambda: Complex64 },
    #[error("integrals are not a conjugate pair (mismatch {mismatch:e})")]
    NotConjugatePair { mismatch: f64 },
    #[error("spectrum of P Gamma^-1 is not simple")]
    RepeatedSpectrum,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// How a model was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaxKind {
    /// `2×2` pair from one admissible pair.
    Dim2,
    /// `2×2` pair from a square root of `P` (`n = 1`).
    SqrtN1,
    /// Block-diagonal direct sum of `2×2` pairs.
    BlockDiag,
    /// `[[A, D], [D, −A]]` with all entries built from one `λ`.
    SameLambda,
    /// Conjugated so that `B` is real.
    RealForm,
}

impl fmt::Display for LaxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LaxKind::Dim2 => "dim2",
            LaxKind::SqrtN1 => "sqrt_n1",
            LaxKind::BlockDiag => "block_diag",
            LaxKind::SameLambda => "same_lambda",
            LaxKind::RealForm => "real_form",
        })
    }
}

/// A constant `k×k` matrix `B` and a linear map `x ↦ L(x)`, stored as `k²`
/// covectors: `L(x)_ij = c_ijᵀx`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxPairModel<T> {
    b: Matrix<Complex<T>>,
    covectors: Vec<Vec<Complex<T>>>,
    k: usize,
    dim: usize,
    kind: LaxKind,
}

impl<T: Real> LaxPairModel<T> {
    /// `covectors` is row-major, `k²` entries of length `dim`.
    pub fn new(b: Matrix<Complex<T>>, covectors: Vec<Vec<Complex<T>>>, kind: LaxKind) -> Result<Self, MatrixError> {
        let k = b.rows();
        if !b.is_square() {
            return Err(MatrixError::NotSquare {
                rows: b.rows(),
                cols: b.cols(),
            });
        }
        if covectors.len() != k * k {
            return Err(MatrixError::DimensionMismatch {
                op: "lax covectors",
                left: (k, k),
                right: (covectors.len(), 1),
            });
        }
        let dim = covectors.first().map_or(0, Vec::len);
        if let Some(bad) = covectors.iter().find(|c| c.len() != dim) {
            return Err(MatrixError::DimensionMismatch {
                op: "lax covectors",
                left: (dim, 1),
                right: (bad.len(), 1),
            });
        }
        Ok(Self {
            b,
            covectors,
            k,
            dim,
            kind,
        })
    }

    pub fn b(&self) -> &Matrix<Complex<T>> {
        &self.b
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Dimension `2n` of the state.
    pub fn state_dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> LaxKind {
        self.kind
    }

    pub fn covector(&self, i: usize, j: usize) -> &[Complex<T>] {
        &self.covectors[i * self.k + j]
    }

    pub fn covectors(&self) -> &[Vec<Complex<T>>] {
        &self.covectors
    }

    pub fn l_at(&self, x: &[T]) -> Matrix<Complex<T>> {
        self.l_at_complex(&complexify(x))
    }

    pub fn l_at_complex(&self, x: &[Complex<T>]) -> Matrix<Complex<T>> {
        Matrix::from_fn(self.k, self.k, |i, j| dot(self.covector(i, j), x))
    }

    /// Block-diagonal sum of the models.
    pub fn direct_sum(models: &[Self], kind: LaxKind) -> Result<Self, MatrixError> {
        let k: usize = models.iter().map(|m| m.k).sum();
        let dim = models.first().map_or(0, |m| m.dim);
        let b = Matrix::block_diagonal(&models.iter().map(|m| m.b.clone()).collect::<Vec<_>>());
        let mut covectors = vec![vec![Complex::zero(); dim]; k * k];
        let mut off = 0;
        for m in models {
            if m.dim != dim {
                return Err(MatrixError::DimensionMismatch {
                    op: "direct_sum",
                    left: (dim, 1),
                    right: (m.dim, 1),
                });
            }
            for i in 0..m.k {
                for j in 0..m.k {
                    covectors[(off + i) * k + off + j] = m.covector(i, j).to_vec();
                }
            }
            off += m.k;
        }
        Self::new(b, covectors, kind)
    }

    /// `S·L·S⁻¹` and `S·B·S⁻¹` for an invertible `S`.
    pub fn conjugated(&self, s: &Matrix<Complex<T>>, s_inv: &Matrix<Complex<T>>, kind: LaxKind) -> Self {
        let b = &(s * &self.b) * s_inv;
        let k = self.k;
        let mut covectors = vec![vec![Complex::zero(); self.dim]; k * k];
        for i in 0..k {
            for j in 0..k {
                let out = &mut covectors[i * k + j];
                for p in 0..k {
                    let sip = s[(i, p)];
                    if sip == Complex::zero() {
                        continue;
                    }
                    for q in 0..k {
                        let f = sip * s_inv[(q, j)];
                        if f == Complex::zero() {
                            continue;
                        }
                        for (o, &c) in out.iter_mut().zip(self.covector(p, q)) {
                            *o += f * c;
                        }
                    }
                }
            }
        }
        Self {
            b,
            covectors,
            k,
            dim: self.dim,
            kind,
        }
    }

    /// Residual of `L̇ = [B, L]` as covectors, identically in `x`: with
    /// `ẋ = Gx`, `L̇_ij = (Gᵀc_ij)ᵀx`, and `[B, L]_ij` is a combination of
    /// the `c`'s. Returns the largest covector entry of the difference.
    pub fn lax_defect(&self, generator: &Matrix<T>) -> T {
        let gt = generator.transpose().to_complex();
        let k = self.k;
        let mut worst = T::zero();
        for i in 0..k {
            for j in 0..k {
                let mut r = gt.matvec(self.covector(i, j)).expect("state dimension");
                for m in 0..k {
                    let bim = self.b[(i, m)];
                    let bmj = self.b[(m, j)];
                    for (t, (&cmj, &cim)) in self.covector(m, j).iter().zip(self.covector(i, m)).enumerate() {
                        r[t] -= bim * cmj - cim * bmj;
                    }
                }
                for z in r {
                    worst = worst.max(z.norm());
                }
            }
        }
        worst
    }
}

/// `I(x) = xᵀSx` for a complex symmetric `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticIntegral<T> {
    s: Matrix<Complex<T>>,
    label: String,
}

impl<T: Real> QuadraticIntegral<T> {
    /// Symmetrizes `s` exactly by averaging with its transpose.
    pub fn new(s: Matrix<Complex<T>>, label: impl Into<String>) -> Self {
        let half = Complex::from(T::lit(0.5));
        let s = Matrix::from_fn(s.rows(), s.cols(), |i, j| {
            if i == j {
                s[(i, i)]
            } else {
                (s[(i, j)] + s[(j, i)]) * half
            }
        });
        Self { s, label: label.into() }
    }

    pub fn from_real(s: &Matrix<T>, label: impl Into<String>) -> Self {
        Self::new(s.to_complex(), label)
    }

    pub fn s(&self) -> &Matrix<Complex<T>> {
        &self.s
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: &[T]) -> Complex<T> {
        self.eval_complex(&complexify(x))
    }

    pub fn eval_complex(&self, x: &[Complex<T>]) -> Complex<T> {
        dot(x, &self.s.matvec(x).expect("state dimension"))
    }

    /// Gradient `2Sx`.
    pub fn gradient(&self, x: &[T]) -> Vec<Complex<T>> {
        let two = Complex::from(T::lit(2.0));
        self.s
            .matvec(&complexify(x))
            .expect("state dimension")
            .into_iter()
            .map(|z| z * two)
            .collect()
    }

    pub fn is_real(&self) -> bool {
        self.s.as_slice().iter().all(|z| z.im == T::zero())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}
