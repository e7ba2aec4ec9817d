//! Lax pairs and quadratic first integrals for linear Hamiltonian systems
//! `Γẋ = −Px` with `P` symmetric and `Γ` skew-symmetric and nonsingular.
//!
//! Floating-point code is generic over [`scalar::Real`] (`f32` or `f64`);
//! the [`groebner`] module works over exact rationals.

pub mod dynamics;
pub mod groebner;
pub mod laxpair;
pub mod matrix;
pub mod poisson;
pub mod sampling;
pub mod scalar;
pub mod spectral;

use num_complex::{Complex32, Complex64};

pub type RealMatrix = matrix::Matrix<f64>;
pub type ComplexMatrix = matrix::Matrix<Complex64>;
pub type RealMatrix32 = matrix::Matrix<f32>;
pub type ComplexMatrix32 = matrix::Matrix<Complex32>;
pub type System = matrix::ValidatedSystem<f64>;
pub type System32 = matrix::ValidatedSystem<f32>;
pub type Spectrum = spectral::SpectralData<f64>;
pub type Pair = spectral::AdmissiblePair<f64>;
pub type LaxModel = laxpair::LaxPairModel<f64>;
pub type Integral = laxpair::QuadraticIntegral<f64>;
pub type Rational = groebner::Rational;
pub type RationalPoly = groebner::MultiPoly<groebner::Rational>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Matrix(#[from] matrix::MatrixError),
    #[error(transparent)]
    Spectral(#[from] spectral::SpectralError),
    #[error(transparent)]
    Lax(#[from] laxpair::LaxError),
    #[error(transparent)]
    Poisson(#[from] poisson::PoissonError),
    #[error(transparent)]
    Dynamics(#[from] dynamics::DynamicsError),
    #[error(transparent)]
    Groebner(#[from] groebner::GroebnerError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
