//! Exact multivariate polynomials, Buchberger's algorithm, and the
//! 2×2 Lax ansatz for planar systems `ẋ = Γ̃Px`.

mod ansatz;
mod buchberger;
mod poly;

use num_rational::BigRational;

pub use ansatz::{
    basis_element_membership, build_ansatz_system, degenerate_family_check, denominator_identities,
    displayed_basis_element, verify_general_solution, AnsatzSystem, DegenerateReport, DenominatorIdentities,
    GeneralSolution, GeneralSolutionReport, MembershipReport, PValues, ANSATZ_VARIABLES,
};
pub use buchberger::{buchberger, buchberger_with_budget, is_groebner_basis, GroebnerBasis};
pub use poly::{
    degree, divides, integer, lcm, rational, reduce, reduce_with_budget, s_polynomial, Budget, Field, Monomial,
    MonomialOrder, MultiPoly, Ring,
};

/// Exact rational coefficient; numerator and denominator are kept coprime
/// with a positive denominator.
pub type Rational = BigRational;
/// Gaussian rationals `ℚ(i)`.
pub type GaussianRational = num_complex::Complex<BigRational>;

pub const DEFAULT_MAX_PAIRS: u64 = 200_000;
pub const DEFAULT_MAX_TERM_OPS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroebnerError {
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("budget exhausted after {pairs} pairs and {term_ops} term operations")]
    ResourceExceeded { pairs: u64, term_ops: u64 },
    #[error("denominator {which} vanishes")]
    DenominatorZero { which: &'static str },
    #[error("post-hoc check failed: {what}")]
    PostCheckFailed { what: String },
    #[error("symmetric ansatz requires p3 = p2")]
    NotSymmetricP,
    #[error("parameters violate the family's constraints: {what}")]
    BadParameters { what: &'static str },
}
