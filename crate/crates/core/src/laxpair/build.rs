use num_complex::Complex;
use num_traits::{One, Zero};

use super::{LaxError, LaxKind, LaxPairModel, QuadraticIntegral};
use crate::matrix::vector::{dot, dot_h, norm2};
use crate::matrix::{inverse, Matrix, ValidatedSystem};
use crate::scalar::{complexify, imag_unit, Real};
use crate::spectral::{numerical_rank, AdmissiblePair, CLASS_TOL};

/// `B = −(iλ/2)·J` and `L(x) = [[a, d], [d, −a]]` with `a = xᵀw`, `d = xᵀŵ`.
pub fn build_lax2<T: Real>(pair: &AdmissiblePair<T>) -> LaxPairModel<T> {
    let h = -imag_unit::<T>() * pair.lambda() / Complex::from(T::lit(2.0));
    let b = Matrix::from_rows(&[vec![Complex::zero(), h], vec![-h, Complex::zero()]]).expect("2x2");
    let w = pair.w().to_vec();
    let wh = pair.w_hat().to_vec();
    let neg_w = w.iter().map(|&z| -z).collect();
    LaxPairModel::new(b, vec![w, wh.clone(), wh, neg_w], LaxKind::Dim2).expect("consistent covectors")
}

/// `S = 2(wwᵀ + ŵŵᵀ)`, so that `xᵀSx = Tr L(x)²` for [`build_lax2`].
pub fn integral_of_pair<T: Real>(pair: &AdmissiblePair<T>) -> QuadraticIntegral<T> {
    let (w, wh) = (pair.w(), pair.w_hat());
    let two = Complex::from(T::lit(2.0));
    let n = w.len();
    let s = Matrix::from_fn(n, n, |i, j| two * (w[i] * w[j] + wh[i] * wh[j]));
    let lam = pair.lambda();
    QuadraticIntegral::new(s, format!("I[{:.6}{:+.6}i]", lam.re.as_f64(), lam.im.as_f64()))
}

/// `2·(xᵀ(E − λ⁻¹A)w)·(xᵀ(E + λ⁻¹A)w)` with `A = PΓ⁻¹`.
pub fn factorized_integral<T: Real>(pair: &AdmissiblePair<T>, sys: &ValidatedSystem<T>, x: &[T]) -> Complex<T> {
    let a = sys.p_gamma_inv_complex();
    let w = pair.w();
    let aw = a.matvec(w).expect("state dimension");
    let inv = Complex::<T>::one() / pair.lambda();
    let minus: Vec<Complex<T>> = w.iter().zip(&aw).map(|(&u, &v)| u - inv * v).collect();
    let plus: Vec<Complex<T>> = w.iter().zip(&aw).map(|(&u, &v)| u + inv * v).collect();
    let xc = complexify(x);
    Complex::from(T::lit(2.0)) * dot(&xc, &minus) * dot(&xc, &plus)
}

/// `Tr Lᵏ`. For a `2×2` symmetric traceless `L = [[g, h], [h, −g]]` this uses
/// `L² = (g² + h²)E`; any other input falls back to repeated products.
pub fn trace_power<T: Real>(l: &Matrix<Complex<T>>, k: u32) -> Complex<T> {
    if l.shape() == (2, 2) && l[(0, 1)] == l[(1, 0)] && l[(0, 0)] == -l[(1, 1)] {
        if k % 2 == 1 {
            return Complex::zero();
        }
        let (g, h) = (l[(0, 0)], l[(0, 1)]);
        let q = g * g + h * h;
        return Complex::from(T::lit(2.0)) * q.powu(k / 2);
    }
    l.powi(k).expect("square").trace()
}

/// Rescales `w` by `c` with `c² = det P / (wᵀΓPΓ⁻¹w)`, choosing
/// `arg c ∈ (−π/2, π/2]`. Afterwards `wᵀP⁻¹w = 1` and `I = 4H`.
///
/// When `P` is negative definite, `c` is imaginary and so is the new `w`.
pub fn normalize_n1<T: Real>(pair: &AdmissiblePair<T>, sys: &ValidatedSystem<T>) -> Result<AdmissiblePair<T>, LaxError> {
    if sys.n() != 1 {
        return Err(LaxError::NotN1 { n: sys.n() });
    }
    let g = sys.gamma().to_complex();
    let gpg = &(&g * &sys.p().to_complex()) * &sys.gamma_inv().to_complex();
    let w = pair.w();
    let q = dot(w, &gpg.matvec(w).expect("dimension"));
    let wn = norm2(w);
    let scale = gpg.norm_inf().max(T::one()) * wn * wn;
    if q.norm() <= T::lit(1e-12) * scale {
        return Err(LaxError::DegenerateForm { value: q.norm().as_f64() });
    }
    let c2 = Complex::from(sys.det_p()) / q;
    let mut c = c2.sqrt();
    if c.re < T::zero() || (c.re == T::zero() && c.im < T::zero()) {
        c = -c;
    }
    let out = pair.scaled(c);
    let pinv = sys.p_inv().to_complex();
    let check = dot(out.w(), &pinv.matvec(out.w()).expect("dimension"));
    let residual = (check - Complex::one()).norm();
    if residual > T::lit(1e-8) {
        return Err(LaxError::NormalizationCheck {
            residual: residual.as_f64(),
        });
    }
    Ok(out)
}

/// Principal square root of a real symmetric `2×2` matrix: an orthogonal
/// diagonalization, then `√μ` per eigenvalue with `i√|μ|` for `μ < 0`.
pub fn symmetric_sqrt_2x2<T: Real>(p: &Matrix<T>) -> Matrix<Complex<T>> {
    let (p1, p2, p4) = (p[(0, 0)], p[(0, 1)], p[(1, 1)]);
    let theta = (T::lit(2.0) * p2).atan2(p1 - p4) / T::lit(2.0);
    let (s, c) = theta.sin_cos();
    let mu1 = p1 * c * c + T::lit(2.0) * p2 * s * c + p4 * s * s;
    let mu2 = p1 * s * s - T::lit(2.0) * p2 * s * c + p4 * c * c;
    let root = |mu: T| {
        if mu >= T::zero() {
            Complex::new(mu.sqrt(), T::zero())
        } else {
            Complex::new(T::zero(), (-mu).sqrt())
        }
    };
    let (r1, r2) = (root(mu1), root(mu2));
    let q1 = [c, s];
    let q2 = [-s, c];
    Matrix::from_fn(2, 2, |i, j| r1 * Complex::from(q1[i] * q1[j]) + r2 * Complex::from(q2[i] * q2[j]))
}

/// A symmetric square root of `P` together with its consistency data.
#[derive(Debug, Clone)]
pub struct SqrtRoot<T> {
    pub t: Matrix<Complex<T>>,
    pub det_t: Complex<T>,
    /// `‖ΓT − det T·T⁻¹Γ‖`
    pub identity_residual: T,
}

impl<T: Real> SqrtRoot<T> {
    pub fn of(sys: &ValidatedSystem<T>) -> Result<Self, LaxError> {
        if sys.n() != 1 {
            return Err(LaxError::NotN1 { n: sys.n() });
        }
        let t = symmetric_sqrt_2x2(sys.p());
        let det_t = t[(0, 0)] * t[(1, 1)] - t[(0, 1)] * t[(1, 0)];
        let tn = t.norm_inf().max(T::one());
        if det_t.norm() <= T::lit(1e-12) * tn * tn {
            return Err(LaxError::SingularRoot {
                det: det_t.norm().as_f64(),
            });
        }
        let t_inv = inverse(&t, T::zero())?;
        let g = sys.gamma().to_complex();
        let lhs = &g * &t;
        let rhs = (&t_inv * &g).scale(det_t);
        let identity_residual = (&lhs - &rhs).max_abs();
        Ok(Self {
            t,
            det_t,
            identity_residual,
        })
    }
}

/// The `n = 1` pair `L = TZ − Γ⁻¹TZΓ`, `B = −(det T/2)Γ⁻¹` with `T² = P`,
/// `Z = [[x₁, 0], [x₂, 0]]`.
pub fn sqrt_lax_n1<T: Real>(sys: &ValidatedSystem<T>) -> Result<LaxPairModel<T>, LaxError> {
    let root = SqrtRoot::of(sys)?;
    let scale = sys.gamma().norm_inf().max(T::one()) * root.t.norm_inf().max(T::one());
    if root.identity_residual > T::lit(1e-10) * scale {
        return Err(LaxError::RootIdentity {
            residual: root.identity_residual.as_f64(),
        });
    }
    let g = sys.gamma().to_complex();
    let gi = sys.gamma_inv().to_complex();
    let l_of = |m: usize| {
        let z = Matrix::from_fn(2, 2, |i, j| if j == 0 && i == m { Complex::one() } else { Complex::zero() });
        let tz = &root.t * &z;
        &tz - &(&(&gi * &tz) * &g)
    };
    let (l0, l1) = (l_of(0), l_of(1));
    let covectors = (0..4).map(|idx| vec![l0[(idx / 2, idx % 2)], l1[(idx / 2, idx % 2)]]).collect();
    let b = gi.scale(-root.det_t / Complex::from(T::lit(2.0)));
    Ok(LaxPairModel::new(b, covectors, LaxKind::SqrtN1)?)
}

fn lambda_sq_clash<T: Real>(a: Complex<T>, b: Complex<T>) -> bool {
    let (a2, b2) = (a * a, b * b);
    let scale = a2.norm().max(b2.norm()).max(T::one());
    (a2 - b2).norm() <= T::lit(CLASS_TOL) * scale
}

/// Block-diagonal `2n×2n` pair from `n` admissible pairs with distinct `λ²`.
/// The `2n` covectors `w_j, ŵ_j` must have full rank.
pub fn block_lax_2n<T: Real>(pairs: &[AdmissiblePair<T>]) -> Result<LaxPairModel<T>, LaxError> {
    let dim = pairs.first().map_or(0, AdmissiblePair::dim);
    let n = dim / 2;
    if pairs.len() != n || n == 0 {
        return Err(LaxError::WrongCount {
            expected: n,
            got: pairs.len(),
        });
    }
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            if lambda_sq_clash(pairs[i].lambda(), pairs[j].lambda()) {
                return Err(LaxError::DuplicateLambdaSq { first: i, second: j });
            }
        }
    }
    let rank = covector_rank(pairs);
    if rank < dim {
        return Err(LaxError::RankDeficient { rank, expected: dim });
    }
    let blocks: Vec<LaxPairModel<T>> = pairs.iter().map(build_lax2).collect();
    Ok(LaxPairModel::direct_sum(&blocks, LaxKind::BlockDiag)?)
}

/// Numerical rank of the stacked rows `w_1, ŵ_1, …, w_n, ŵ_n`.
pub fn covector_rank<T: Real>(pairs: &[AdmissiblePair<T>]) -> usize {
    let dim = pairs.first().map_or(0, AdmissiblePair::dim);
    let rows: Vec<Vec<Complex<T>>> = pairs
        .iter()
        .flat_map(|p| [p.w().to_vec(), p.w_hat().to_vec()])
        .collect();
    if rows.is_empty() {
        return 0;
    }
    let m = Matrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    numerical_rank(&m, T::lit(1e-10))
}

/// Symmetric `m×m` table of vectors in `V_λ`; an empty slot gives a zero
/// entry in both `A` and `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricFilling<T> {
    m: usize,
    slots: Vec<Option<Vec<Complex<T>>>>,
}

impl<T: Real> SymmetricFilling<T> {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            slots: vec![None; m * m],
        }
    }

    /// Vectors on the diagonal, zero elsewhere.
    pub fn diagonal(ws: &[Vec<Complex<T>>]) -> Self {
        let mut f = Self::new(ws.len());
        for (k, w) in ws.iter().enumerate() {
            f.set(k, k, w.clone());
        }
        f
    }

    /// Sets slots `(k, l)` and `(l, k)`.
    pub fn set(&mut self, k: usize, l: usize, w: Vec<Complex<T>>) {
        self.slots[k * self.m + l] = Some(w.clone());
        self.slots[l * self.m + k] = Some(w);
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn get(&self, k: usize, l: usize) -> Option<&[Complex<T>]> {
        self.slots[k * self.m + l].as_deref()
    }
}

/// `B = −(iλ/2)[[0, E], [−E, 0]]`, `L = [[A, D], [D, −A]]` where
/// `A_kl = xᵀw_kl` and `D_kl = xᵀŵ_kl` for the vectors of `filling`.
pub fn same_lambda_block_lax<T: Real>(
    sys: &ValidatedSystem<T>,
    lambda: Complex<T>,
    filling: &SymmetricFilling<T>,
) -> Result<LaxPairModel<T>, LaxError> {
    let m = filling.size();
    let dim = sys.dim();
    let a = sys.p_gamma_inv_complex();
    let scale = a.norm_inf().max(T::one());
    let l2 = lambda * lambda;
    let hat_factor = imag_unit::<T>() / lambda;
    let zero = vec![Complex::zero(); dim];
    let mut a_cov = vec![zero.clone(); m * m];
    let mut d_cov = vec![zero.clone(); m * m];
    for k in 0..m {
        for l in 0..m {
            let Some(w) = filling.get(k, l) else { continue };
            if w.len() != dim {
                return Err(LaxError::BadFilling);
            }
            let aw = a.matvec(w)?;
            let a2w = a.matvec(&aw)?;
            let r: Vec<Complex<T>> = a2w.iter().zip(w).map(|(&u, &v)| u - l2 * v).collect();
            let wn = norm2(w);
            let residual = norm2(&r) / wn.max(T::min_positive_value());
            if residual > T::lit(1e-8) * scale * scale {
                return Err(LaxError::VectorNotInVLambda {
                    row: k,
                    col: l,
                    residual: residual.as_f64(),
                });
            }
            let awn = norm2(&aw);
            let cosine = dot_h(w, &aw).norm() / (wn * awn).max(T::min_positive_value());
            if T::one() - cosine * cosine <= T::lit(1e-12) {
                return Err(LaxError::EigenvectorEntry { row: k, col: l });
            }
            a_cov[k * m + l] = w.to_vec();
            d_cov[k * m + l] = aw.iter().map(|&z| z * hat_factor).collect();
        }
    }
    let k2 = 2 * m;
    let h = -imag_unit::<T>() * lambda / Complex::from(T::lit(2.0));
    let b = Matrix::from_fn(k2, k2, |i, j| {
        if i < m && j == i + m {
            h
        } else if i >= m && j + m == i {
            -h
        } else {
            Complex::zero()
        }
    });
    let mut covectors = vec![zero; k2 * k2];
    for k in 0..m {
        for l in 0..m {
            let av = &a_cov[k * m + l];
            let dv = &d_cov[k * m + l];
            covectors[k * k2 + l] = av.clone();
            covectors[k * k2 + l + m] = dv.clone();
            covectors[(k + m) * k2 + l] = dv.clone();
            covectors[(k + m) * k2 + l + m] = av.iter().map(|&z| -z).collect();
        }
    }
    Ok(LaxPairModel::new(b, covectors, LaxKind::SameLambda)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{example_system, random_simple_system, random_vector, rng};
    use crate::spectral::{select_admissible_pair, PairTolerances};
    use num_complex::Complex64 as C;

    fn oscillator() -> ValidatedSystem<f64> {
        ValidatedSystem::new(ValidatedSystem::standard_j(), Matrix::identity(2)).unwrap()
    }

    fn example_pair() -> (ValidatedSystem<f64>, AdmissiblePair<f64>) {
        let sys = example_system(1.0, 2.0);
        let w = vec![C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(0.0, -1.0)];
        let pair = select_admissible_pair(&sys, C::new(1.0, 2.0), Some(&w), &PairTolerances::default()).unwrap();
        (sys, pair)
    }

    #[test]
    fn oscillator_b_by_hand() {
        // λ = i: −(i·i/2) J = J/2
        let sys = oscillator();
        let w = vec![C::new(1.0, 0.0), C::new(0.0, 0.0)];
        let pair = select_admissible_pair(&sys, C::new(0.0, 1.0), Some(&w), &PairTolerances::default()).unwrap();
        let model = build_lax2(&pair);
        assert_eq!(model.b()[(0, 1)], C::new(0.5, 0.0));
        assert_eq!(model.b()[(1, 0)], C::new(-0.5, 0.0));
        assert_eq!(model.b()[(0, 0)], C::new(0.0, 0.0));
        assert!(model.lax_defect(&sys.generator()) < 1e-15);
    }

    #[test]
    fn lax2_at_zero_is_zero() {
        let (_, pair) = example_pair();
        let l = build_lax2(&pair).l_at(&[0.0; 4]);
        assert_eq!(l.max_abs(), 0.0);
    }

    #[test]
    fn example_entries_are_the_two_linear_forms() {
        let (_, pair) = example_pair();
        let model = build_lax2(&pair);
        let x = [0.3, -1.2, 0.7, 2.0];
        let l = model.l_at(&x);
        // a = x₁ + x₂ + i x₃ − i x₄, d = i x₁ − i x₂ − x₃ − x₄
        let a = C::new(x[0] + x[1], x[2] - x[3]);
        let d = C::new(-x[2] - x[3], x[0] - x[1]);
        assert!((l[(0, 0)] - a).norm() < 1e-15);
        assert!((l[(0, 1)] - d).norm() < 1e-15);
        assert!((l[(1, 1)] + a).norm() < 1e-15);
    }

    #[test]
    fn integral_equals_trace_of_square() {
        let mut r = rng(5);
        let (sys, s) = random_simple_system::<f64, _>(&mut r, 2);
        let pair = select_admissible_pair(&sys, s.eigenvalues[0], None, &PairTolerances::default()).unwrap();
        let model = build_lax2(&pair);
        let integral = integral_of_pair(&pair);
        for _ in 0..20 {
            let x = random_vector::<f64, _>(&mut r, 4);
            let l = model.l_at(&x);
            let tr = (&l * &l).trace();
            let direct = {
                let a = dot(&complexify(&x), pair.w());
                let d = dot(&complexify(&x), pair.w_hat());
                (a * a + d * d) * 2.0
            };
            let v = integral.eval(&x);
            assert!((tr - v).norm() <= 1e-12 * v.norm().max(1.0));
            assert!((direct - v).norm() <= 1e-12 * v.norm().max(1.0));
            let f = factorized_integral(&pair, &sys, &x);
            assert!((f - v).norm() <= 1e-10 * v.norm().max(1.0));
        }
    }

    #[test]
    fn eigenvector_w_gives_zero_integral() {
        let sys = example_system(1.0, 2.0);
        let s = crate::spectral::system_spectrum(&sys).unwrap();
        let pair = AdmissiblePair::new_unchecked(&sys, s.eigenvalues[0], s.eigenvectors[0].clone());
        let i = integral_of_pair(&pair);
        assert!(i.s().max_abs() < 1e-12);
        let x = [0.4, 0.1, -0.3, 0.9];
        assert!(factorized_integral(&pair, &sys, &x).norm() < 1e-12);
    }

    #[test]
    fn factorized_integral_at_origin() {
        let (sys, pair) = example_pair();
        assert_eq!(factorized_integral(&pair, &sys, &[0.0; 4]), C::new(0.0, 0.0));
    }

    #[test]
    fn trace_power_closed_form_and_products() {
        let l = Matrix::from_rows(&[vec![C::new(1.0, 0.0), C::new(0.0, 0.0)], vec![C::new(0.0, 0.0), C::new(-1.0, 0.0)]]).unwrap();
        assert_eq!(trace_power(&l, 4), C::new(2.0, 0.0));
        assert_eq!(trace_power(&l, 3), C::new(0.0, 0.0));
        let (g, h) = (C::new(0.3, -0.7), C::new(1.1, 0.2));
        let l = Matrix::from_rows(&[vec![g, h], vec![h, -g]]).unwrap();
        let direct = (&(&(&l * &l) * &(&l * &l)) * &(&l * &l)).trace();
        assert!((trace_power(&l, 6) - direct).norm() < 1e-12);
        let i = (g * g + h * h) * 2.0;
        assert!((trace_power(&l, 6) - 2.0 * (i / 2.0).powu(3)).norm() < 1e-12);
    }

    #[test]
    fn normalized_oscillator_integral_is_twice_p() {
        let sys = oscillator();
        let pair = select_admissible_pair(&sys, C::new(0.0, 1.0), None, &PairTolerances::default()).unwrap();
        let norm = normalize_n1(&pair, &sys).unwrap();
        let s = integral_of_pair(&norm);
        let two_p = sys.p().to_complex().scale(C::new(2.0, 0.0));
        assert!((s.s() - &two_p).max_abs() < 1e-12);
        // scaling first does not matter
        let scaled = normalize_n1(&pair.scaled(C::new(5.0, 0.0)), &sys).unwrap();
        assert!((integral_of_pair(&scaled).s() - s.s()).max_abs() < 1e-12);
    }

    #[test]
    fn normalize_rejects_n2() {
        let (sys, pair) = example_pair();
        assert_eq!(normalize_n1(&pair, &sys), Err(LaxError::NotN1 { n: 2 }));
    }

    #[test]
    fn sqrt_pair_for_diagonal_p() {
        let p = Matrix::diagonal(&[4.0, 9.0]);
        let sys = ValidatedSystem::new(ValidatedSystem::standard_j(), p).unwrap();
        let root = SqrtRoot::of(&sys).unwrap();
        assert!((root.t[(0, 0)] - C::new(2.0, 0.0)).norm() < 1e-15);
        assert!((root.t[(1, 1)] - C::new(3.0, 0.0)).norm() < 1e-15);
        assert!(root.t[(0, 1)].norm() < 1e-15);
        let model = sqrt_lax_n1(&sys).unwrap();
        let expect_b = sys.gamma_inv().to_complex().scale(C::new(-3.0, 0.0));
        assert!((model.b() - &expect_b).max_abs() < 1e-14);
        assert!(model.lax_defect(&sys.generator()) < 1e-13);
    }

    #[test]
    fn sqrt_pair_identity_p_and_explicit_form() {
        let sys = oscillator();
        let model = sqrt_lax_n1(&sys).unwrap();
        let x = [0.25, -1.5];
        let l = model.l_at(&x);
        let expect = Matrix::from_rows(&[vec![x[0], x[1]], vec![x[1], -x[0]]]).unwrap().to_complex();
        assert!((&l - &expect).max_abs() < 1e-15);

        // general T = [[a, c], [c, b]]: L = [[ax₁+cx₂, cx₁+bx₂], [cx₁+bx₂, −ax₁−cx₂]]
        let p = Matrix::from_rows(&[vec![2.0, 0.5], vec![0.5, -1.0]]).unwrap();
        let sys = ValidatedSystem::new(ValidatedSystem::standard_j().scale(3.0), p).unwrap();
        let t = SqrtRoot::of(&sys).unwrap().t;
        let (a, b, c) = (t[(0, 0)], t[(1, 1)], t[(0, 1)]);
        let (x1, x2) = (C::new(0.7, 0.0), C::new(-0.4, 0.0));
        let l = sqrt_lax_n1(&sys).unwrap().l_at(&[0.7, -0.4]);
        let g = a * x1 + c * x2;
        let h = c * x1 + b * x2;
        assert!((l[(0, 0)] - g).norm() < 1e-14 && (l[(0, 1)] - h).norm() < 1e-14);
        assert!((l[(1, 0)] - h).norm() < 1e-14 && (l[(1, 1)] + g).norm() < 1e-14);
        assert!(sqrt_lax_n1(&sys).unwrap().lax_defect(&sys.generator()) < 1e-13);
    }

    #[test]
    fn block_model_of_example() {
        let (sys, pair) = example_pair();
        let conj = pair.conjugate();
        let model = block_lax_2n(&[pair.clone(), conj.clone()]).unwrap();
        assert_eq!(model.k(), 4);
        assert_eq!(model.kind(), LaxKind::BlockDiag);
        assert!(model.lax_defect(&sys.generator()) < 1e-13);
        let x = [0.5, -0.25, 1.5, 0.75];
        let l = model.l_at(&x);
        let h1 = x[0] * x[1] + x[2] * x[3];
        assert!(((&l * &l).trace() - C::new(16.0 * h1, 0.0)).norm() < 1e-12);
        assert!(matches!(
            block_lax_2n(&[pair.clone(), pair.clone()]),
            Err(LaxError::DuplicateLambdaSq { .. })
        ));
        assert!(matches!(block_lax_2n(&[pair]), Err(LaxError::WrongCount { .. })));
    }

    #[test]
    fn block_model_n1_is_lax2() {
        let sys = oscillator();
        let pair = select_admissible_pair(&sys, C::new(0.0, 1.0), None, &PairTolerances::default()).unwrap();
        let block = block_lax_2n(std::slice::from_ref(&pair)).unwrap();
        let single = build_lax2(&pair);
        assert_eq!(block.b(), single.b());
        assert_eq!(block.covectors(), single.covectors());
    }

    #[test]
    fn example_same_lambda_reproduces_displayed_l() {
        let (sys, pair) = example_pair();
        let w = pair.w().to_vec();
        let w_tilde: Vec<C> = pair.w_hat().iter().map(|&z| -z).collect();
        let filling = SymmetricFilling::diagonal(&[w.clone(), w_tilde]);
        let model = same_lambda_block_lax(&sys, pair.lambda(), &filling).unwrap();
        let x = [0.9, -0.1, 0.3, 1.7];
        let xc = complexify(&x);
        let (a, d) = (dot(&xc, pair.w()), dot(&xc, pair.w_hat()));
        let z = C::new(0.0, 0.0);
        let expect = Matrix::from_rows(&[
            vec![a, z, d, z],
            vec![z, -d, z, a],
            vec![d, z, -a, z],
            vec![z, a, z, d],
        ])
        .unwrap();
        let l = model.l_at(&x);
        assert!((&l - &expect).max_abs() < 1e-14);
        let h = C::new(0.0, -1.0) * pair.lambda() / 2.0;
        assert!((model.b()[(0, 2)] - h).norm() < 1e-15);
        assert!((model.b()[(3, 1)] + h).norm() < 1e-15);
        assert!(model.lax_defect(&sys.generator()) < 1e-13);
    }

    #[test]
    fn same_w_in_both_diagonal_slots_doubles_integral() {
        let (sys, pair) = example_pair();
        let filling = SymmetricFilling::diagonal(&[pair.w().to_vec(), pair.w().to_vec()]);
        let model = same_lambda_block_lax(&sys, pair.lambda(), &filling).unwrap();
        let x = [0.2, 0.4, -0.6, 0.8];
        let l = model.l_at(&x);
        let i = integral_of_pair(&pair).eval(&x);
        assert!(((&l * &l).trace() - i * 2.0).norm() < 1e-12);
        assert_eq!(model.l_at(&[0.0; 4]).max_abs(), 0.0);
    }

    #[test]
    fn same_lambda_rejects_foreign_vector() {
        let (sys, pair) = example_pair();
        let other: Vec<C> = pair.w().iter().map(|z| z.conj()).collect();
        let filling = SymmetricFilling::diagonal(&[other]);
        assert!(matches!(
            same_lambda_block_lax(&sys, pair.lambda(), &filling),
            Err(LaxError::VectorNotInVLambda { .. })
        ));
    }
}
