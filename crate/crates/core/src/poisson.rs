//! Poisson brackets `{f, g} = ∇fᵀW⁻¹∇g` with `W = −Γ`, involutivity of the
//! quadratic integrals, and the maps to the small symplectic spaces built
//! from one admissible pair.
//!
//! Target structures follow one convention throughout: the stored matrix
//! plays the role of `W` on the target, so the coordinate brackets there are
//! the entries of its inverse.

use std::fmt;

use num_complex::Complex;

use crate::laxpair::QuadraticIntegral;
use crate::matrix::vector::{dot, norm2};
use crate::matrix::{inverse, Matrix, MatrixError, ValidatedSystem};
use crate::scalar::{complexify, imag_unit, Real};
use crate::spectral::{numerical_rank, AdmissiblePair, LambdaClass, CLASS_TOL};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PoissonError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("operand is not symmetric (defect {defect:e})")]
    NotSymmetric { defect: f64 },
    #[error("W^-1 is not skew-symmetric (defect {defect:e})")]
    NotSkew { defect: f64 },
    #[error("K vanishes (|K| = {value:e})")]
    DegenerateK { value: f64 },
    #[error("the three forms of K disagree (residual {residual:e})")]
    KFormsDisagree { residual: f64 },
    #[error("{class} lambda but K = {re:e}{im:+e}i has the wrong reality")]
    CaseMismatch { class: LambdaClass, re: f64, im: f64 },
    #[error("pushed-forward system is not Hamiltonian (residual {residual:e})")]
    NotHamiltonian { residual: f64 },
    #[error("pairs {first} and {second} violate lambda_1^2 != lambda_2^2, conj(lambda_2^2)")]
    HypothesisViolation { first: usize, second: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// The matrix `W⁻¹` of a constant Poisson structure.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonStructure<T> {
    w_inv: Matrix<T>,
}

impl<T: Real> PoissonStructure<T> {
    pub fn new(w_inv: Matrix<T>) -> Result<Self, PoissonError> {
        if !w_inv.is_square() {
            return Err(MatrixError::NotSquare {
                rows: w_inv.rows(),
                cols: w_inv.cols(),
            }
            .into());
        }
        let defect = (&w_inv + &w_inv.transpose()).max_abs();
        if defect > T::lit(1e-12) * w_inv.max_abs().max(T::one()) {
            return Err(PoissonError::NotSkew {
                defect: defect.as_f64(),
            });
        }
        Ok(Self { w_inv })
    }

    /// `W = −Γ`, so `W⁻¹ = −Γ⁻¹`.
    pub fn of_system(sys: &ValidatedSystem<T>) -> Self {
        Self {
            w_inv: -sys.gamma_inv(),
        }
    }

    pub fn w_inv(&self) -> &Matrix<T> {
        &self.w_inv
    }

    pub fn dim(&self) -> usize {
        self.w_inv.rows()
    }

    fn check(&self, v: &[impl Sized]) -> Result<(), PoissonError> {
        if v.len() != self.dim() {
            return Err(PoissonError::DimensionMismatch {
                left: self.dim(),
                right: v.len(),
            });
        }
        Ok(())
    }

    /// Bracket of two linear forms with complex covectors.
    pub fn bracket_linear(&self, u: &[Complex<T>], v: &[Complex<T>]) -> Result<Complex<T>, PoissonError> {
        self.check(u)?;
        self.check(v)?;
        let wv = self.w_inv.to_complex().matvec(v)?;
        Ok(dot(u, &wv))
    }
}

/// `∇fᵀ W⁻¹ ∇g`.
pub fn bracket_functions<T: Real>(ps: &PoissonStructure<T>, grad_f: &[T], grad_g: &[T]) -> Result<T, PoissonError> {
    ps.check(grad_f)?;
    ps.check(grad_g)?;
    Ok(dot(grad_f, &ps.w_inv.matvec(grad_g)?))
}

/// `W⁻¹ ∇h`.
pub fn hamiltonian_vector_field<T: Real>(ps: &PoissonStructure<T>, grad_h: &[T]) -> Result<Vec<T>, PoissonError> {
    ps.check(grad_h)?;
    Ok(ps.w_inv.matvec(grad_h)?)
}

fn require_symmetric<T: Real>(m: &Matrix<Complex<T>>) -> Result<(), PoissonError> {
    let defect = m.symmetry_defect();
    if defect > T::lit(1e-12) * m.max_abs().max(T::one()) {
        return Err(PoissonError::NotSymmetric {
            defect: defect.as_f64(),
        });
    }
    Ok(())
}

/// `−2(MΓ⁻¹N − NΓ⁻¹M)`, the matrix of the bracket of `xᵀMx` and `xᵀNx`.
pub fn quadratic_bracket<T: Real>(
    m: &Matrix<Complex<T>>,
    n: &Matrix<Complex<T>>,
    sys: &ValidatedSystem<T>,
) -> Result<Matrix<Complex<T>>, PoissonError> {
    require_symmetric(m)?;
    require_symmetric(n)?;
    if m.rows() != sys.dim() || n.rows() != sys.dim() {
        return Err(PoissonError::DimensionMismatch {
            left: m.rows(),
            right: n.rows(),
        });
    }
    let gi = sys.gamma_inv().to_complex();
    let mgn = &(m * &gi) * n;
    let ngm = &(n * &gi) * m;
    Ok((&mgn - &ngm).scale(Complex::from(T::lit(-2.0))))
}

/// `‖{S₁, S₂}‖∞ / (‖S₁‖∞‖S₂‖∞)`; zero exactly when the integrals commute
/// identically in `x`.
pub fn involution_check<T: Real>(
    i1: &QuadraticIntegral<T>,
    i2: &QuadraticIntegral<T>,
    sys: &ValidatedSystem<T>,
) -> Result<T, PoissonError> {
    let b = quadratic_bracket(i1.s(), i2.s(), sys)?;
    let denom = i1.s().norm_inf() * i2.s().norm_inf();
    if denom == T::zero() {
        return Ok(T::zero());
    }
    Ok(b.norm_inf() / denom)
}

/// Numerical rank of the gradients `2S_jx` at each sample point.
pub fn gradient_ranks<T: Real>(integrals: &[QuadraticIntegral<T>], points: &[Vec<T>]) -> Vec<usize> {
    points
        .iter()
        .map(|x| {
            if integrals.is_empty() {
                return 0;
            }
            let rows: Vec<Vec<Complex<T>>> = integrals.iter().map(|i| i.gradient(x)).collect();
            let m = Matrix::from_fn(rows.len(), x.len(), |r, c| rows[r][c]);
            numerical_rank(&m, T::lit(1e-9))
        })
        .collect()
}

/// Smallest gradient rank over the sample points.
pub fn independence_check<T: Real>(integrals: &[QuadraticIntegral<T>], points: &[Vec<T>]) -> usize {
    gradient_ranks(integrals, points).into_iter().min().unwrap_or(0)
}

/// Residuals of the gradient identities for `I_{λ,w}` at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheck<T> {
    /// `‖2Sx − (g₁E − g₂A)w‖ / max(1, ‖2Sx‖)`.
    pub formula: T,
    /// `‖A²g − λ²g‖ / ‖g‖`, zero when `g = 0`.
    pub eigen: T,
}

/// Compares `∇I = 2Sx` with `(g₁E − g₂A)w`, `g₁ = 4xᵀw`, `g₂ = 4λ⁻²xᵀAw`,
/// and checks that the gradient lies in `V_λ`.
pub fn gradient_formula_check<T: Real>(
    pair: &AdmissiblePair<T>,
    sys: &ValidatedSystem<T>,
    x: &[T],
) -> GradientCheck<T> {
    let s = crate::laxpair::integral_of_pair(pair);
    let g = s.gradient(x);
    let a = sys.p_gamma_inv_complex();
    let w = pair.w();
    let aw = a.matvec(w).expect("dimension");
    let xc = complexify(x);
    let four = Complex::from(T::lit(4.0));
    let lam = pair.lambda();
    let g1 = four * dot(&xc, w);
    let g2 = four * dot(&xc, &aw) / (lam * lam);
    let other: Vec<Complex<T>> = w.iter().zip(&aw).map(|(&u, &v)| g1 * u - g2 * v).collect();
    let diff: Vec<Complex<T>> = g.iter().zip(&other).map(|(&p, &q)| p - q).collect();
    let gn = norm2(&g);
    let formula = norm2(&diff) / gn.max(T::one());
    let eigen = if gn == T::zero() {
        T::zero()
    } else {
        let ag = a.matvec(&g).expect("dimension");
        let aag = a.matvec(&ag).expect("dimension");
        let r: Vec<Complex<T>> = aag.iter().zip(&g).map(|(&p, &q)| p - lam * lam * q).collect();
        norm2(&r) / gn
    };
    GradientCheck { formula, eigen }
}

/// `K = −wᵀΓ⁻¹ŵ`, `−iλ⁻¹wᵀΓ⁻¹PΓ⁻¹w` and `−iλwᵀP⁻¹w`.
pub fn k_forms<T: Real>(pair: &AdmissiblePair<T>, sys: &ValidatedSystem<T>) -> [Complex<T>; 3] {
    let gi = sys.gamma_inv().to_complex();
    let w = pair.w();
    let lam = pair.lambda();
    let i = imag_unit::<T>();
    let k1 = -dot(w, &gi.matvec(pair.w_hat()).expect("dimension"));
    let gpg = &(&gi * &sys.p().to_complex()) * &gi;
    let k2 = -i / lam * dot(w, &gpg.matvec(w).expect("dimension"));
    let k3 = -i * lam * dot(w, &sys.p_inv().to_complex().matvec(w).expect("dimension"));
    [k1, k2, k3]
}

/// `K_{λ,w} = −wᵀΓ⁻¹ŵ`, cross-checked against its two other forms.
pub fn k_constant<T: Real>(pair: &AdmissiblePair<T>, sys: &ValidatedSystem<T>) -> Result<Complex<T>, PoissonError> {
    let [k1, k2, k3] = k_forms(pair, sys);
    let wn = norm2(pair.w());
    let bound = wn * wn * sys.gamma_inv().norm_inf().max(T::one()) * sys.scale().max(T::one())
        / pair.lambda().norm().min(T::one());
    let scale = k1.norm().max(bound);
    let residual = (k1 - k2).norm().max((k1 - k3).norm()) / scale;
    if residual > T::lit(1e-10) {
        return Err(PoissonError::KFormsDisagree {
            residual: residual.as_f64(),
        });
    }
    if k1.norm() <= T::lit(1e-12) * bound {
        return Err(PoissonError::DegenerateK {
            value: k1.norm().as_f64(),
        });
    }
    Ok(k1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetCase {
    /// `λ ∈ iℝ`: coordinates `(z₁, z₃) = (xᵀw, xᵀŵ)`.
    PureImaginary,
    /// `λ ∈ ℝ`: coordinates `(z₁, z₄) = (xᵀw, xᵀ(−iŵ))`.
    Real,
    /// Otherwise: `(Re xᵀw, Im xᵀw, Re xᵀŵ, Im xᵀŵ)`.
    Complex,
}

impl fmt::Display for TargetCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetCase::PureImaginary => "case1_pure_imag",
            TargetCase::Real => "case2_real",
            TargetCase::Complex => "case3_complex",
        })
    }
}

/// Symplectic structure on the image of the coordinate map of one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetStructure<T> {
    pub case: TargetCase,
    /// `Γ_{λ,w}`, `Γ̃_{λ,w}` or `Y⁻¹`.
    pub matrix: Matrix<T>,
    pub k: Complex<T>,
    /// `R`, only in the complex case.
    pub r: Option<Matrix<T>>,
}

impl<T: Real> TargetStructure<T> {
    /// Real covectors of the coordinate functions, stored as complex.
    pub fn coordinates(&self, pair: &AdmissiblePair<T>) -> Vec<Vec<Complex<T>>> {
        let w = pair.w().to_vec();
        let wh = pair.w_hat().to_vec();
        let re = |v: &[Complex<T>]| v.iter().map(|z| Complex::from(z.re)).collect::<Vec<_>>();
        let im = |v: &[Complex<T>]| v.iter().map(|z| Complex::from(z.im)).collect::<Vec<_>>();
        match self.case {
            TargetCase::PureImaginary => vec![w, wh],
            TargetCase::Real => {
                let mi = -imag_unit::<T>();
                vec![w, wh.iter().map(|&z| z * mi).collect()]
            }
            TargetCase::Complex => vec![re(&w), im(&w), re(&wh), im(&wh)],
        }
    }

    /// The coordinate dynamics `ż = Dz` induced by `ẋ = −Γ⁻¹Px`.
    pub fn coordinate_dynamics(&self, lambda: Complex<T>) -> Matrix<T> {
        let z = T::zero();
        match self.case {
            // ż₁ = −iλz₃, ż₃ = iλz₁
            TargetCase::PureImaginary => Matrix::from_rows(&[vec![z, lambda.im], vec![-lambda.im, z]]).expect("2x2"),
            // ż₁ = λz₄, ż₄ = λz₁
            TargetCase::Real => Matrix::from_rows(&[vec![z, lambda.re], vec![lambda.re, z]]).expect("2x2"),
            TargetCase::Complex => {
                let (a1, a2) = (lambda.re, lambda.im);
                let f = Matrix::from_rows(&[vec![a2, a1], vec![-a1, a2]]).expect("2x2");
                let mut c = Matrix::zeros(4, 4);
                c.set_block(0, 2, &f);
                c.set_block(2, 0, &-&f);
                c
            }
        }
    }
}

fn case_of(class: LambdaClass) -> TargetCase {
    match class {
        LambdaClass::PureImaginary => TargetCase::PureImaginary,
        LambdaClass::Real => TargetCase::Real,
        LambdaClass::GenuinelyComplex => TargetCase::Complex,
    }
}

/// Builds the target structure for the pair's class from `K`.
pub fn target_structure<T: Real>(
    pair: &AdmissiblePair<T>,
    sys: &ValidatedSystem<T>,
) -> Result<TargetStructure<T>, PoissonError> {
    let k = k_constant(pair, sys)?;
    let case = case_of(pair.class());
    let mismatch = || PoissonError::CaseMismatch {
        class: pair.class(),
        re: k.re.as_f64(),
        im: k.im.as_f64(),
    };
    let reality_tol = T::lit(1e-9) * k.norm();
    let z = T::zero();
    let (matrix, r) = match case {
        TargetCase::PureImaginary => {
            if k.im.abs() > reality_tol {
                return Err(mismatch());
            }
            let kinv = T::one() / k.re;
            (Matrix::from_rows(&[vec![z, -kinv], vec![kinv, z]])?, None)
        }
        TargetCase::Real => {
            if k.re.abs() > reality_tol {
                return Err(mismatch());
            }
            // iK⁻¹ = i/(iκ) = 1/κ
            let ikinv = T::one() / k.im;
            (Matrix::from_rows(&[vec![z, -ikinv], vec![ikinv, z]])?, None)
        }
        TargetCase::Complex => {
            let half = T::lit(0.5);
            let r = Matrix::from_rows(&[vec![half * k.re, half * k.im], vec![half * k.im, -half * k.re]])?;
            let mut y = Matrix::zeros(4, 4);
            y.set_block(0, 2, &r);
            y.set_block(2, 0, &-&r);
            (inverse(&y, T::zero())?, Some(r))
        }
    };
    Ok(TargetStructure { case, matrix, k, r })
}

/// Largest entrywise difference between the source brackets of the
/// coordinate pullbacks and the inverse of the stored target matrix.
pub fn poisson_map_check<T: Real>(
    pair: &AdmissiblePair<T>,
    sys: &ValidatedSystem<T>,
    ts: &TargetStructure<T>,
) -> Result<T, PoissonError> {
    let ps = PoissonStructure::of_system(sys);
    let coords = ts.coordinates(pair);
    let expect = inverse(&ts.matrix, T::zero())?;
    let mut worst = T::zero();
    for (i, u) in coords.iter().enumerate() {
        for (j, v) in coords.iter().enumerate() {
            let b = ps.bracket_linear(u, v)?;
            worst = worst.max((b - Complex::from(expect[(i, j)])).norm());
        }
    }
    Ok(worst)
}

/// Residuals showing that `Γ_t ż = −P_t z` with `P_t` real symmetric of the
/// expected form.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianReport<T> {
    pub case: TargetCase,
    /// `P_t = −Γ_t D`.
    pub p_matrix: Matrix<T>,
    /// `iλK⁻¹`; real in the first two cases.
    pub scalar: Complex<T>,
    pub symmetry_defect: T,
    /// Largest imaginary part of the complex-arithmetic prediction.
    pub reality_defect: T,
    /// Distance of `P_t` from its expected shape.
    pub structure_residual: T,
    /// `det M` for `Y⁻¹C = diag(M, M)`, complex case only.
    pub det_m: Option<T>,
}

impl<T: Real> HamiltonianReport<T> {
    pub fn max_residual(&self) -> T {
        self.symmetry_defect.max(self.reality_defect).max(self.structure_residual)
    }
}

/// Pushes the flow forward to the target coordinates and checks that it is
/// Hamiltonian there with a constant symmetric `P_t`: a scalar matrix for
/// `λ ∈ iℝ`, `diag(iλK⁻¹, −iλK⁻¹)` for `λ ∈ ℝ`, and `−diag(M, M)` with `M`
/// symmetric traceless in the complex case.
pub fn pushforward_hamiltonian_check<T: Real>(
    pair: &AdmissiblePair<T>,
    ts: &TargetStructure<T>,
) -> Result<HamiltonianReport<T>, PoissonError> {
    let lam = pair.lambda();
    let d = ts.coordinate_dynamics(lam);
    let p = -&(&ts.matrix * &d);
    let scalar = imag_unit::<T>() * lam / ts.k;
    let symmetry_defect = p.symmetry_defect();
    let scale = p.max_abs().max(T::one());
    let mut det_m = None;
    let (reality_defect, structure_residual) = match ts.case {
        TargetCase::PureImaginary => {
            let expect = Matrix::identity(2).scale(scalar.re);
            (scalar.im.abs(), (&p - &expect).max_abs())
        }
        TargetCase::Real => {
            let expect = Matrix::diagonal(&[scalar.re, -scalar.re]);
            (scalar.im.abs(), (&p - &expect).max_abs())
        }
        TargetCase::Complex => {
            let q = -&p;
            let m = q.block(0, 0, 2, 2);
            let off = q.block(0, 2, 2, 2).max_abs().max(q.block(2, 0, 2, 2).max_abs());
            let same = (&q.block(2, 2, 2, 2) - &m).max_abs();
            let traceless = (m[(0, 0)] + m[(1, 1)]).abs();
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            det_m = Some(det);
            (T::zero(), off.max(same).max(traceless))
        }
    };
    let report = HamiltonianReport {
        case: ts.case,
        p_matrix: p,
        scalar,
        symmetry_defect,
        reality_defect,
        structure_residual,
        det_m,
    };
    let tol = T::lit(1e-9) * scale;
    let degenerate = det_m.is_some_and(|det| det.abs() <= T::lit(1e-12) * scale * scale);
    if report.max_residual() > tol || degenerate {
        return Err(PoissonError::NotHamiltonian {
            residual: report.max_residual().as_f64(),
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductReport<T> {
    /// Largest bracket between coordinates of different pairs.
    pub cross_max: T,
    /// `poisson_map_check` per pair.
    pub block_residuals: Vec<T>,
    /// Block-diagonal target matrix.
    pub target: Matrix<T>,
}

/// Checks that the product of the coordinate maps is Poisson for the
/// block-diagonal target. Pairs need `λ₁² ≠ λ₂²` and `λ₁² ≠ conj(λ₂²)`.
pub fn product_poisson_check<T: Real>(
    pairs: &[AdmissiblePair<T>],
    sys: &ValidatedSystem<T>,
) -> Result<ProductReport<T>, PoissonError> {
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let (a, b) = (pairs[i].lambda(), pairs[j].lambda());
            let (a2, b2) = (a * a, b * b);
            let tol = T::lit(CLASS_TOL) * a2.norm().max(b2.norm()).max(T::one());
            if (a2 - b2).norm() <= tol || (a2 - b2.conj()).norm() <= tol {
                return Err(PoissonError::HypothesisViolation { first: i, second: j });
            }
        }
    }
    let ps = PoissonStructure::of_system(sys);
    let mut targets = Vec::new();
    let mut coords = Vec::new();
    let mut block_residuals = Vec::new();
    for pair in pairs {
        let ts = target_structure(pair, sys)?;
        block_residuals.push(poisson_map_check(pair, sys, &ts)?);
        coords.push(ts.coordinates(pair));
        targets.push(ts.matrix);
    }
    let mut cross_max = T::zero();
    for (i, ci) in coords.iter().enumerate() {
        for cj in &coords[i + 1..] {
            for u in ci {
                for v in cj {
                    cross_max = cross_max.max(ps.bracket_linear(u, v)?.norm());
                }
            }
        }
    }
    Ok(ProductReport {
        cross_max,
        block_residuals,
        target: Matrix::block_diagonal(&targets),
    })
}

/// Whether `M·F` is symmetric and traceless for `F = [[α₂, α₁], [−α₁, α₂]]`;
/// returns the largest defect.
pub fn symmetric_traceless_product_defect<T: Real>(m: &Matrix<T>, alpha1: T, alpha2: T) -> T {
    let f = Matrix::from_rows(&[vec![alpha2, alpha1], vec![-alpha1, alpha2]]).expect("2x2");
    let mf = m * &f;
    mf.symmetry_defect().max((mf[(0, 0)] + mf[(1, 1)]).abs())
}
