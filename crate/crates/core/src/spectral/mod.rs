//! Eigenstructure of `A = PΓ⁻¹`, the subspaces `V_λ = ker(A² − λ²E)`,
//! admissible pairs `(λ, w)`, and the spectral identities of the system:
//! the spectrum is closed under `λ ↦ −λ` and `λ ↦ λ̄`, eigenvectors of `A²`
//! with different eigenvalues are `Γ⁻¹`-orthogonal, and `vᵀΓ⁻¹Av ≠ 0`.

pub mod eigen;
pub mod svd;

use std::fmt;

use num_complex::{Complex, Complex64};
use num_traits::Float;

use crate::matrix::vector::{dot, dot_h, norm2};
use crate::matrix::{Matrix, ValidatedSystem};
use crate::scalar::{imag_unit, Real};

pub use eigen::NoConvergence;
pub use svd::{condition_number, null_space, numerical_rank, svd, Svd};

pub const DEFAULT_PAIRING_TOL: f64 = 1e-6;
pub const DEFAULT_GAP_TOL: f64 = 1e-9;
/// Single-precision counterparts of the two tolerances above.
pub const SINGLE_PAIRING_TOL: f64 = 1e-3;
pub const SINGLE_GAP_TOL: f64 = 1e-4;

/// Whether `T` has roughly single precision.
pub fn is_single_precision<T: Real>() -> bool {
    T::epsilon().as_f64() > 1e-10
}

/// `(pairing, gap)` tolerances suited to `T`.
pub fn spectrum_tolerances<T: Real>() -> (f64, f64) {
    if is_single_precision::<T>() {
        (SINGLE_PAIRING_TOL, SINGLE_GAP_TOL)
    } else {
        (DEFAULT_PAIRING_TOL, DEFAULT_GAP_TOL)
    }
}
/// Relative threshold for deciding that `λ` lies on an axis.
pub const CLASS_TOL: f64 = 1e-9;
/// Singular-value threshold for `V_λ`, relative to `max(1, σ_max)`.
pub const DEFAULT_V_LAMBDA_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("QR iteration did not converge after {} steps ({} eigenvalues found)", .0.iterations, .0.found.len())]
    NoConvergence(NoConvergence),
    #[error("spectral symmetry violated: partner {partner} of eigenvalue {lambda} missing")]
    SymmetryViolation { lambda: Complex64, partner: Complex64 },
    #[error("V_lambda has dimension {dim}, expected at least 2")]
    DimensionTooSmall { dim: usize },
    #[error("{lambda} is not an eigenvalue (smallest singular value {sigma:e})")]
    NotAnEigenvalue { lambda: Complex64, sigma: f64 },
    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error("cannot make w real: imaginary residual {residual:e}")]
    SelectionFailure { residual: f64 },
    #[error("eigenvectors for lambda and -lambda are numerically parallel")]
    EigenvectorDegenerate,
    #[error("w is not in V_lambda (residual {residual:e})")]
    NotInVLambda { residual: f64 },
    #[error("w is an eigenvector of P Gamma^-1 (sine of angle {sine:e})")]
    IsEigenvector { sine: f64 },
    #[error("w has length {got}, expected {expected}")]
    WrongLength { got: usize, expected: usize },
}

impl From<NoConvergence> for SpectralError {
    fn from(e: NoConvergence) -> Self {
        SpectralError::NoConvergence(e)
    }
}

fn c64<T: Real>(z: Complex<T>) -> Complex64 {
    Complex64::new(z.re.as_f64(), z.im.as_f64())
}

/// Eigen decomposition of `PΓ⁻¹` or any square complex matrix.
#[derive(Debug, Clone)]
pub struct SpectralData<T> {
    pub eigenvalues: Vec<Complex<T>>,
    /// Unit 2-norm eigenvectors, one per eigenvalue.
    pub eigenvectors: Vec<Vec<Complex<T>>>,
    /// `‖Av − λv‖` per eigenpair.
    pub residuals: Vec<T>,
}

impl<T: Real> SpectralData<T> {
    pub fn spectral_radius(&self) -> T {
        self.eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), Float::max)
    }

    pub fn max_residual(&self) -> T {
        self.residuals.iter().copied().fold(T::zero(), Float::max)
    }
}

/// Full eigen decomposition by Hessenberg reduction, shifted QR and inverse
/// iteration. `tol` is the relative distance below which eigenvalues are
/// treated as one cluster when computing eigenvectors.
pub fn eigen_decompose<T: Real>(m: &Matrix<Complex<T>>, tol: T) -> Result<SpectralData<T>, SpectralError> {
    let (eigenvalues, eigenvectors, residuals) = eigen::eigen_pairs(m, tol)?;
    Ok(SpectralData {
        eigenvalues,
        eigenvectors,
        residuals,
    })
}

/// Eigen decomposition of `PΓ⁻¹` with the default cluster tolerance.
pub fn system_spectrum<T: Real>(sys: &ValidatedSystem<T>) -> Result<SpectralData<T>, SpectralError> {
    eigen_decompose(&sys.p_gamma_inv_complex(), T::lit(1e-8))
}

/// Which axis, if any, `λ` lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LambdaClass {
    /// `λ ∈ iℝ`
    PureImaginary,
    /// `λ ∈ ℝ`
    Real,
    /// `λ² ∉ ℝ`
    GenuinelyComplex,
}

impl LambdaClass {
    pub fn of<T: Real>(lambda: Complex<T>) -> Self {
        let r = lambda.norm() * T::lit(CLASS_TOL);
        if lambda.re.abs() < r {
            LambdaClass::PureImaginary
        } else if lambda.im.abs() < r {
            LambdaClass::Real
        } else {
            LambdaClass::GenuinelyComplex
        }
    }

    /// Moves `λ` exactly onto its axis.
    pub fn snap<T: Real>(self, lambda: Complex<T>) -> Complex<T> {
        match self {
            LambdaClass::PureImaginary => Complex::new(T::zero(), lambda.im),
            LambdaClass::Real => Complex::new(lambda.re, T::zero()),
            LambdaClass::GenuinelyComplex => lambda,
        }
    }

    pub fn is_squared_real(self) -> bool {
        self != LambdaClass::GenuinelyComplex
    }
}

impl fmt::Display for LambdaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LambdaClass::PureImaginary => "pure_imaginary",
            LambdaClass::Real => "real",
            LambdaClass::GenuinelyComplex => "genuinely_complex",
        })
    }
}

/// Indices of one orbit `{λ, λ̄, −λ, −λ̄}` of the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGroup {
    pub indices: Vec<usize>,
    /// `true` for four distinct values, `false` for a `±λ` pair.
    pub is_quadruple: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub groups: Vec<SpectralGroup>,
    /// Largest distance between a required partner and its match.
    pub max_mismatch: f64,
}

impl SymmetryReport {
    pub fn quadruples(&self) -> usize {
        self.groups.iter().filter(|g| g.is_quadruple).count()
    }

    pub fn pairs(&self) -> usize {
        self.groups.len() - self.quadruples()
    }
}

/// Checks that `λ̄`, `−λ` and `−λ̄` are eigenvalues whenever `λ` is.
///
/// Matching is within `pairing_tol · max(1, ρ)` for spectral radius `ρ`,
/// and respects multiplicity: every eigenvalue is used in exactly one orbit.
pub fn quadruple_symmetry_check<T: Real>(
    s: &SpectralData<T>,
    pairing_tol: T,
) -> Result<SymmetryReport, SpectralError> {
    let vals: Vec<Complex64> = s.eigenvalues.iter().map(|&z| c64(z)).collect();
    let tol = pairing_tol.as_f64() * s.spectral_radius().as_f64().max(1.0);
    let mut used = vec![false; vals.len()];
    let mut groups = Vec::new();
    let mut max_mismatch = 0.0f64;
    for i in 0..vals.len() {
        if used[i] {
            continue;
        }
        let lam = vals[i];
        used[i] = true;
        let mut orbit = vec![lam];
        for partner in [lam.conj(), -lam, -lam.conj()] {
            if orbit.iter().any(|o| (o - partner).norm() <= tol) {
                continue;
            }
            orbit.push(partner);
        }
        let mut indices = vec![i];
        for &partner in &orbit[1..] {
            let best = (0..vals.len())
                .filter(|&j| !used[j])
                .map(|j| (j, (vals[j] - partner).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((j, d)) if d <= tol => {
                    used[j] = true;
                    indices.push(j);
                    max_mismatch = max_mismatch.max(d);
                }
                _ => return Err(SpectralError::SymmetryViolation { lambda: lam, partner }),
            }
        }
        groups.push(SpectralGroup {
            is_quadruple: orbit.len() == 4,
            indices,
        });
    }
    Ok(SymmetryReport {
        groups,
        max_mismatch,
    })
}

/// True iff the smallest pairwise eigenvalue distance exceeds
/// `gap_tol · ρ`.
pub fn is_simple_spectrum<T: Real>(s: &SpectralData<T>, gap_tol: T) -> bool {
    let rho = s.spectral_radius();
    let ev = &s.eigenvalues;
    for i in 0..ev.len() {
        for j in i + 1..ev.len() {
            if (ev[i] - ev[j]).norm() <= gap_tol * rho {
                return false;
            }
        }
    }
    true
}

/// `(PΓ⁻¹)² − λ²E` as a complex matrix.
fn shifted_square<T: Real>(sys: &ValidatedSystem<T>, lambda: Complex<T>) -> Matrix<Complex<T>> {
    let a = sys.p_gamma_inv_complex();
    let a2 = &a * &a;
    let l2 = lambda * lambda;
    Matrix::from_fn(a2.rows(), a2.cols(), |i, j| if i == j { a2[(i, j)] - l2 } else { a2[(i, j)] })
}

fn require_eigenvalue<T: Real>(sys: &ValidatedSystem<T>, lambda: Complex<T>, tol: T) -> Result<(), SpectralError> {
    if lambda.norm() == T::zero() {
        return Err(SpectralError::ZeroLambda);
    }
    let a = sys.p_gamma_inv_complex();
    let shifted = Matrix::from_fn(a.rows(), a.cols(), |i, j| if i == j { a[(i, j)] - lambda } else { a[(i, j)] });
    let sv = svd(&shifted).singular_values;
    let smin = sv.last().copied().unwrap_or_else(T::zero);
    let thr = tol * sv.first().copied().unwrap_or_else(T::zero).max(T::one());
    if smin > thr {
        return Err(SpectralError::NotAnEigenvalue {
            lambda: c64(lambda),
            sigma: smin.as_f64(),
        });
    }
    Ok(())
}

/// Orthonormal basis of `V_λ = ker((PΓ⁻¹)² − λ²E)` by singular-value
/// thresholding at `tol · max(1, σ_max)`.
pub fn v_lambda_basis<T: Real>(
    sys: &ValidatedSystem<T>,
    lambda: Complex<T>,
    tol: T,
) -> Result<Vec<Vec<Complex<T>>>, SpectralError> {
    require_eigenvalue(sys, lambda, tol)?;
    let basis = null_space(&shifted_square(sys, lambda), tol);
    if basis.len() < 2 {
        return Err(SpectralError::DimensionTooSmall { dim: basis.len() });
    }
    Ok(basis)
}

/// Tolerances used when accepting an admissible pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTolerances {
    /// `‖A²w − λ²w‖ ≤ v_lambda · max(1, ‖A‖²∞) · ‖w‖`
    pub v_lambda: f64,
    /// Minimum sine of the angle between `Aw` and `w`.
    pub angle: f64,
    /// Allowed `‖Im w‖ / ‖w‖` before `w` counts as non-real.
    pub realness: f64,
}

impl Default for PairTolerances {
    fn default() -> Self {
        Self {
            v_lambda: 1e-8,
            angle: 1e-6,
            realness: 1e-8,
        }
    }
}

impl PairTolerances {
    /// The defaults, loosened for single precision.
    pub fn for_scalar<T: Real>() -> Self {
        if is_single_precision::<T>() {
            Self {
                v_lambda: 1e-4,
                angle: 1e-3,
                realness: 1e-4,
            }
        } else {
            Self::default()
        }
    }
}

/// An eigenvalue `λ` of `A = PΓ⁻¹` with `w ∈ V_λ` not an eigenvector of `A`,
/// and `ŵ = iλ⁻¹Aw`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissiblePair<T> {
    lambda: Complex<T>,
    w: Vec<Complex<T>>,
    w_hat: Vec<Complex<T>>,
    class: LambdaClass,
}

impl<T: Real> AdmissiblePair<T> {
    /// Builds a pair without any validation. Only for experiments that need
    /// invalid input, e.g. `w` an eigenvector of `A`.
    pub fn new_unchecked(sys: &ValidatedSystem<T>, lambda: Complex<T>, w: Vec<Complex<T>>) -> Self {
        let w_hat = hat(sys, lambda, &w);
        Self {
            lambda,
            w,
            w_hat,
            class: LambdaClass::of(lambda),
        }
    }

    pub fn lambda(&self) -> Complex<T> {
        self.lambda
    }

    pub fn w(&self) -> &[Complex<T>] {
        &self.w
    }

    pub fn w_hat(&self) -> &[Complex<T>] {
        &self.w_hat
    }

    pub fn class(&self) -> LambdaClass {
        self.class
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// The same pair with `w` replaced by `c·w` (so `ŵ ↦ c·ŵ`).
    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self {
            lambda: self.lambda,
            w: self.w.iter().map(|&z| z * c).collect(),
            w_hat: self.w_hat.iter().map(|&z| z * c).collect(),
            class: self.class,
        }
    }

    /// `(λ̄, w̄)`, which is admissible whenever `(λ, w)` is. Its hat is
    /// `−conj(ŵ)` because conjugation flips the `i` in `iλ⁻¹Aw`.
    pub fn conjugate(&self) -> Self {
        Self {
            lambda: self.lambda.conj(),
            w: self.w.iter().map(|z| z.conj()).collect(),
            w_hat: self.w_hat.iter().map(|z| -z.conj()).collect(),
            class: self.class,
        }
    }
}

/// `iλ⁻¹PΓ⁻¹w`.
pub fn hat<T: Real>(sys: &ValidatedSystem<T>, lambda: Complex<T>, w: &[Complex<T>]) -> Vec<Complex<T>> {
    let aw = sys.p_gamma_inv_complex().matvec(w).expect("dimension checked");
    let f = imag_unit::<T>() / lambda;
    aw.into_iter().map(|z| z * f).collect()
}

/// Sine of the angle between `u` and `v`; 0 when either vanishes.
fn sine_between<T: Real>(u: &[Complex<T>], v: &[Complex<T>]) -> T {
    let (nu, nv) = (norm2(u), norm2(v));
    if nu == T::zero() || nv == T::zero() {
        return T::zero();
    }
    let c = (dot_h(u, v).norm() / (nu * nv)).min(T::one());
    (T::one() - c * c).max(T::zero()).sqrt()
}

/// Multiplies by `e^{iθ}` with `θ = −½ arg(vᵀv)`, which minimizes `‖Im v‖`.
fn realize_phase<T: Real>(v: &[Complex<T>]) -> Vec<Complex<T>> {
    let q = dot(v, v);
    if q.norm() == T::zero() {
        return v.to_vec();
    }
    let theta = -q.arg() / T::lit(2.0);
    let rot = Complex::from_polar(T::one(), theta);
    v.iter().map(|&z| z * rot).collect()
}

fn imag_ratio<T: Real>(v: &[Complex<T>]) -> T {
    let im: Vec<T> = v.iter().map(|z| z.im).collect();
    let n = norm2(v);
    if n == T::zero() {
        T::zero()
    } else {
        norm2(&im) / n
    }
}

fn drop_imag<T: Real>(v: &[Complex<T>]) -> Vec<Complex<T>> {
    v.iter().map(|z| Complex::new(z.re, T::zero())).collect()
}

/// Picks an admissible pair for `λ`.
///
/// Without a candidate, `w = v₊ + v₋` for unit eigenvectors of `PΓ⁻¹` at
/// `λ` and `−λ`. For `λ² ∈ ℝ` the eigenvectors are phase-aligned first
/// (for `λ ∈ iℝ`, `v₋ = v̄₊`), and `w` is rotated by the closed-form phase
/// to make it real; leftover imaginary part above tolerance is an error.
///
/// With a candidate, `w` is only validated: it must lie in `V_λ`, must not
/// be an eigenvector, and must be real when `λ² ∈ ℝ`.
pub fn select_admissible_pair<T: Real>(
    sys: &ValidatedSystem<T>,
    lambda: Complex<T>,
    candidate: Option<&[Complex<T>]>,
    tol: &PairTolerances,
) -> Result<AdmissiblePair<T>, SpectralError> {
    if lambda.norm() == T::zero() {
        return Err(SpectralError::ZeroLambda);
    }
    let class = LambdaClass::of(lambda);
    let lambda = class.snap(lambda);
    let a = sys.p_gamma_inv_complex();
    let dim = sys.dim();
    let w = match candidate {
        Some(w) => {
            if w.len() != dim {
                return Err(SpectralError::WrongLength {
                    got: w.len(),
                    expected: dim,
                });
            }
            if class.is_squared_real() {
                let r = imag_ratio(w);
                if r > T::lit(tol.realness) {
                    return Err(SpectralError::SelectionFailure { residual: r.as_f64() });
                }
                drop_imag(w)
            } else {
                w.to_vec()
            }
        }
        None => {
            let v_plus = eigen::inverse_iteration(&a, lambda, &[], 0);
            let v_minus = match class {
                LambdaClass::PureImaginary => v_plus.iter().map(|z| z.conj()).collect(),
                _ => eigen::inverse_iteration(&a, -lambda, &[], 1),
            };
            let (v_plus, v_minus) = if class == LambdaClass::Real {
                (realize_phase(&v_plus), realize_phase(&v_minus))
            } else {
                (v_plus, v_minus)
            };
            if sine_between(&v_plus, &v_minus) < T::lit(tol.angle) {
                return Err(SpectralError::EigenvectorDegenerate);
            }
            let w: Vec<Complex<T>> = v_plus.iter().zip(&v_minus).map(|(&p, &m)| p + m).collect();
            if class.is_squared_real() {
                let w = realize_phase(&w);
                let r = imag_ratio(&w);
                if r > T::lit(tol.realness) {
                    return Err(SpectralError::SelectionFailure { residual: r.as_f64() });
                }
                drop_imag(&w)
            } else {
                w
            }
        }
    };
    validate_pair_vector(&a, lambda, &w, tol)?;
    let w_hat = hat(sys, lambda, &w);
    Ok(AdmissiblePair {
        lambda,
        w,
        w_hat,
        class,
    })
}

fn validate_pair_vector<T: Real>(
    a: &Matrix<Complex<T>>,
    lambda: Complex<T>,
    w: &[Complex<T>],
    tol: &PairTolerances,
) -> Result<(), SpectralError> {
    let aw = a.matvec(w).expect("dimension checked");
    let a2w = a.matvec(&aw).expect("dimension checked");
    let l2 = lambda * lambda;
    let r: Vec<Complex<T>> = a2w.iter().zip(w).map(|(&x, &y)| x - l2 * y).collect();
    let scale = a.norm_inf().max(T::one());
    let residual = norm2(&r) / norm2(w).max(T::min_positive_value());
    if residual > T::lit(tol.v_lambda) * scale * scale {
        return Err(SpectralError::NotInVLambda {
            residual: residual.as_f64(),
        });
    }
    let sine = sine_between(w, &aw);
    if sine <= T::lit(tol.angle) {
        return Err(SpectralError::IsEigenvector { sine: sine.as_f64() });
    }
    Ok(())
}

/// Result of the `Γ⁻¹`-orthogonality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orthogonality {
    /// `|v₁ᵀΓ⁻¹v₂|`
    pub value: f64,
    /// Whether `λ₁² ≠ λ₂²`, i.e. whether the vanishing claim applies.
    pub covered: bool,
}

/// `|v₁ᵀΓ⁻¹v₂|` for eigenvectors of `(PΓ⁻¹)²`. The value is returned even
/// when `λ₁² = λ₂²`, where it need not vanish.
pub fn orthogonality_check<T: Real>(
    sys: &ValidatedSystem<T>,
    v1: &[Complex<T>],
    v2: &[Complex<T>],
    lam1_sq: Complex<T>,
    lam2_sq: Complex<T>,
) -> Orthogonality {
    let gi = sys.gamma_inv().to_complex();
    let value = dot(v1, &gi.matvec(v2).expect("dimension")).norm();
    let gap = (lam1_sq - lam2_sq).norm();
    let scale = lam1_sq.norm().max(lam2_sq.norm()).max(T::one());
    Orthogonality {
        value: value.as_f64(),
        covered: gap > T::lit(CLASS_TOL) * scale,
    }
}

/// `vᵀΓ⁻¹(PΓ⁻¹v)`, nonzero for `v ∈ V_λ` that is not an eigenvector.
pub fn nondegeneracy_check<T: Real>(sys: &ValidatedSystem<T>, v: &[Complex<T>]) -> Complex<T> {
    let a = sys.p_gamma_inv_complex();
    let gi = sys.gamma_inv().to_complex();
    let av = a.matvec(v).expect("dimension");
    dot(v, &gi.matvec(&av).expect("dimension"))
}

/// One representative `λ` per `±λ` pair, in spectrum order: the first
/// member of each group, plus `−λ̄` for quadruples.
pub fn pair_representatives<T: Real>(s: &SpectralData<T>, report: &SymmetryReport) -> Vec<Complex<T>> {
    let mut reps = Vec::new();
    for g in &report.groups {
        let lam = s.eigenvalues[g.indices[0]];
        reps.push(lam);
        if g.is_quadruple {
            // λ and λ̄ give distinct λ²
            reps.push(lam.conj());
        }
    }
    reps
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn j2() -> Matrix<f64> {
        ValidatedSystem::<f64>::standard_j()
    }

    fn example_48() -> ValidatedSystem<f64> {
        let (a, b) = (1.0, 2.0);
        let p = Matrix::from_rows(&[
            vec![0.0, a, 0.0, b],
            vec![a, 0.0, -b, 0.0],
            vec![0.0, -b, 0.0, a],
            vec![b, 0.0, a, 0.0],
        ])
        .unwrap();
        ValidatedSystem::new(Matrix::block_diagonal(&[j2(), j2()]), p).unwrap()
    }

    fn oscillator() -> ValidatedSystem<f64> {
        ValidatedSystem::new(j2(), Matrix::identity(2)).unwrap()
    }

    fn cv(parts: &[(f64, f64)]) -> Vec<C> {
        parts.iter().map(|&(r, i)| C::new(r, i)).collect()
    }

    fn synthetic(values: &[C]) -> SpectralData<f64> {
        SpectralData {
            eigenvalues: values.to_vec(),
            eigenvectors: vec![vec![]; values.len()],
            residuals: vec![0.0; values.len()],
        }
    }

    #[test]
    fn oscillator_spectrum_is_plus_minus_i() {
        let s = system_spectrum(&oscillator()).unwrap();
        let mut ims: Vec<f64> = s.eigenvalues.iter().map(|z| z.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-14 && (ims[1] - 1.0).abs() < 1e-14);
        assert!(s.eigenvalues.iter().all(|z| z.re.abs() < 1e-14));
        assert!(s.max_residual() < 1e-14);
    }

    /// Characteristic polynomial coefficients by Faddeev–LeVerrier,
    /// highest degree first.
    fn char_poly(a: &Matrix<f64>) -> Vec<f64> {
        let n = a.rows();
        let mut coeffs = vec![1.0];
        let mut m = Matrix::<f64>::zeros(n, n);
        let mut c = 1.0;
        for k in 1..=n {
            m = &(a * &m) + &Matrix::identity(n).scale(c);
            c = -(a * &m).trace() / k as f64;
            coeffs.push(c);
        }
        coeffs
    }

    #[test]
    fn example_spectrum_matches_characteristic_roots() {
        let sys = example_48();
        let poly = char_poly(sys.p_gamma_inv());
        let s = system_spectrum(&sys).unwrap();
        for &z in &s.eigenvalues {
            let val = poly.iter().fold(C::new(0.0, 0.0), |acc, &c| acc * z + c);
            assert!(val.norm() < 1e-10, "p({z}) = {val}");
        }
        for target in [C::new(1.0, 2.0), C::new(1.0, -2.0), C::new(-1.0, 2.0), C::new(-1.0, -2.0)] {
            assert!(
                s.eigenvalues.iter().any(|z| (z - target).norm() < 1e-12),
                "{target} missing from {:?}",
                s.eigenvalues
            );
        }
        assert!(is_simple_spectrum(&s, DEFAULT_GAP_TOL));
        let rep = quadruple_symmetry_check(&s, DEFAULT_PAIRING_TOL).unwrap();
        assert_eq!(rep.quadruples(), 1);
        assert_eq!(rep.pairs(), 0);
    }

    #[test]
    fn diagonal_spectrum_and_vectors() {
        let m = Matrix::<C>::diagonal(&[C::new(3.0, 0.0), C::new(-3.0, 0.0)]);
        let s = eigen_decompose(&m, 1e-8).unwrap();
        for (lam, v) in s.eigenvalues.iter().zip(&s.eigenvectors) {
            let k = if lam.re > 0.0 { 0 } else { 1 };
            assert!((v[k] - C::new(1.0, 0.0)).norm() < 1e-14);
            assert!(v[1 - k].norm() < 1e-14);
        }
    }

    #[test]
    fn symmetry_check_on_synthetic_spectra() {
        let pair = synthetic(&[C::new(0.0, 1.0), C::new(0.0, -1.0)]);
        let rep = quadruple_symmetry_check(&pair, 1e-6).unwrap();
        assert_eq!(rep.groups.len(), 1);
        assert!(!rep.groups[0].is_quadruple);
        let broken = synthetic(&[C::new(1.0, 0.0), C::new(2.0, 0.0)]);
        assert!(matches!(
            quadruple_symmetry_check(&broken, 1e-6),
            Err(SpectralError::SymmetryViolation { .. })
        ));
    }

    #[test]
    fn repeated_spectrum_is_not_simple() {
        let s = synthetic(&cv(&[(0.0, 1.0), (0.0, 1.0), (0.0, -1.0), (0.0, -1.0)]));
        assert!(!is_simple_spectrum(&s, 1e-9));
        assert!(is_simple_spectrum(&synthetic(&cv(&[(0.0, 1.0), (0.0, -1.0)])), 1e-9));
        let rep = quadruple_symmetry_check(&s, 1e-6).unwrap();
        assert_eq!(rep.groups.len(), 2);
    }

    #[test]
    fn v_lambda_of_oscillator_is_everything() {
        let basis = v_lambda_basis(&oscillator(), C::new(0.0, 1.0), 1e-8).unwrap();
        assert_eq!(basis.len(), 2);
    }

    #[test]
    fn v_lambda_contains_example_vector() {
        let sys = example_48();
        let basis = v_lambda_basis(&sys, C::new(1.0, 2.0), 1e-8).unwrap();
        assert_eq!(basis.len(), 2);
        let w = cv(&[(1.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]);
        // residual of projecting w onto the orthonormal basis
        let mut r = w.clone();
        for b in &basis {
            let c = dot_h(b, &w);
            for (ri, &bi) in r.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
        assert!(norm2(&r) < 1e-10);
    }

    #[test]
    fn non_eigenvalue_is_rejected() {
        assert!(matches!(
            v_lambda_basis(&oscillator(), C::new(0.0, 2.0), 1e-8),
            Err(SpectralError::NotAnEigenvalue { .. })
        ));
    }

    #[test]
    fn oscillator_pair_is_real_and_admissible() {
        let sys = oscillator();
        let pair = select_admissible_pair(&sys, C::new(0.0, 1.0), None, &PairTolerances::default()).unwrap();
        assert_eq!(pair.class(), LambdaClass::PureImaginary);
        assert!(pair.w().iter().all(|z| z.im == 0.0));
        let a = sys.p_gamma_inv_complex();
        let aw = a.matvec(pair.w()).unwrap();
        let a2w = a.matvec(&aw).unwrap();
        for (x, y) in a2w.iter().zip(pair.w()) {
            assert!((x + y).norm() < 1e-13);
        }
        assert!(sine_between(pair.w(), &aw) > 0.5);
    }

    #[test]
    fn example_override_reproduces_w_hat() {
        let sys = example_48();
        let w = cv(&[(1.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]);
        let pair = select_admissible_pair(&sys, C::new(1.0, 2.0), Some(&w), &PairTolerances::default()).unwrap();
        let expect = cv(&[(0.0, 1.0), (0.0, -1.0), (-1.0, 0.0), (-1.0, 0.0)]);
        for (x, y) in pair.w_hat().iter().zip(&expect) {
            assert!((x - y).norm() < 1e-14);
        }
        assert_eq!(pair.class(), LambdaClass::GenuinelyComplex);
    }

    #[test]
    fn zero_lambda_is_rejected() {
        assert_eq!(
            select_admissible_pair(&oscillator(), C::new(0.0, 0.0), None, &PairTolerances::default()),
            Err(SpectralError::ZeroLambda)
        );
    }

    #[test]
    fn eigenvector_candidate_is_rejected() {
        let sys = oscillator();
        let s = system_spectrum(&sys).unwrap();
        let k = s.eigenvalues.iter().position(|z| z.im > 0.0).unwrap();
        // complex eigenvector of a pure-imaginary λ fails the realness test
        let res = select_admissible_pair(&sys, s.eigenvalues[k], Some(&s.eigenvectors[k]), &PairTolerances::default());
        assert!(res.is_err());
        let ex = example_48();
        let s = system_spectrum(&ex).unwrap();
        let k = s.eigenvalues.iter().position(|z| (z - C::new(1.0, 2.0)).norm() < 1e-9).unwrap();
        assert!(matches!(
            select_admissible_pair(&ex, s.eigenvalues[k], Some(&s.eigenvectors[k]), &PairTolerances::default()),
            Err(SpectralError::IsEigenvector { .. })
        ));
    }

    #[test]
    fn real_lambda_pair_is_real() {
        // Γ = J, P = diag(1, −1): A = PΓ⁻¹ has eigenvalues ±1
        let p = Matrix::diagonal(&[1.0, -1.0]);
        let sys = ValidatedSystem::new(j2(), p).unwrap();
        let s = system_spectrum(&sys).unwrap();
        let lam = s.eigenvalues[0];
        let pair = select_admissible_pair(&sys, lam, None, &PairTolerances::default()).unwrap();
        assert_eq!(pair.class(), LambdaClass::Real);
        assert!(pair.w().iter().all(|z| z.im == 0.0));
        assert!(pair.lambda().im == 0.0);
    }

    #[test]
    fn example_orthogonality_and_nondegeneracy() {
        let sys = example_48();
        let w = cv(&[(1.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]);
        let wbar: Vec<C> = w.iter().map(|z| z.conj()).collect();
        let l = C::new(1.0, 2.0);
        let o = orthogonality_check(&sys, &w, &wbar, l * l, (l * l).conj());
        assert!(o.covered);
        assert!(o.value < 1e-12);
        let same = orthogonality_check(&sys, &w, &w, l * l, l * l);
        assert!(!same.covered);
        assert!(nondegeneracy_check(&sys, &w).norm() > 1.0);
    }

    #[test]
    fn oscillator_nondegeneracy_by_hand() {
        // Γ⁻¹ = [[0,−1],[1,0]] = PΓ⁻¹; v = e₁: Γ⁻¹v = (0,1), Γ⁻¹Γ⁻¹v = (−1,0), vᵀ·that = −1
        let v = cv(&[(1.0, 0.0), (0.0, 0.0)]);
        assert!((nondegeneracy_check(&oscillator(), &v) - C::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn class_boundaries() {
        assert_eq!(LambdaClass::of(C::new(1e-12, 1.0)), LambdaClass::PureImaginary);
        assert_eq!(LambdaClass::of(C::new(2.0, -1e-11)), LambdaClass::Real);
        assert_eq!(LambdaClass::of(C::new(1e-6, 1.0)), LambdaClass::GenuinelyComplex);
        assert_eq!(LambdaClass::PureImaginary.snap(C::new(1e-12, 1.0)), C::new(0.0, 1.0));
    }
}
