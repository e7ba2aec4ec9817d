use num_complex::Complex;
use num_traits::{One, Zero};

use super::{build_lax2, LaxError, LaxKind, LaxPairModel, QuadraticIntegral};
use crate::matrix::{inverse, Matrix};
use crate::scalar::{imag_unit, Real};
use crate::spectral::{AdmissiblePair, LambdaClass};

/// A Lax pair with real `B`, and its entrywise real and imaginary parts.
/// Each part is a real Lax pair with the same `B`.
#[derive(Debug, Clone)]
pub struct RealFormModel<T> {
    pub model: LaxPairModel<T>,
    pub real_part: LaxPairModel<T>,
    pub imag_part: LaxPairModel<T>,
    /// Largest imaginary part of `B` before it was zeroed.
    pub b_imag_defect: T,
}

/// `½[[0, N₁], [N₂, 0]]` with `N₁ = [[a, b], [b, −a]]`, `N₂ = [[a, −b], [−b, −a]]`.
/// Its eigenvalues are `±λ/2, ±λ̄/2` for `λ = a + bi`, matching the
/// block `diag(B_λ, B_λ̄)`.
pub fn real_block_matrix<T: Real>(a: T, b: T) -> Matrix<T> {
    let h = T::lit(0.5);
    let z = T::zero();
    Matrix::from_rows(&[
        vec![z, z, h * a, h * b],
        vec![z, z, h * b, -h * a],
        vec![h * a, -h * b, z, z],
        vec![-h * b, -h * a, z, z],
    ])
    .expect("4x4")
}

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// `S` with `S·diag(B_λ, B_λ̄)·S⁻¹ = real_block_matrix(a, b)`: the quotient of
/// matched eigenvector bases.
fn complex_block_transform<T: Real>(lambda: Complex<T>) -> Result<(Matrix<Complex<T>>, Matrix<Complex<T>>), LaxError> {
    let n2 = real_block_matrix(lambda.re, lambda.im).block(2, 0, 2, 2).to_complex();
    let two = Complex::from(T::lit(2.0));
    let n2 = n2.scale(two);
    let p = vec![c::<T>(1.0, 0.0), c(0.0, -1.0)];
    let pc = vec![c::<T>(1.0, 0.0), c(0.0, 1.0)];
    let n2p = n2.matvec(&p)?;
    let n2pc = n2.matvec(&pc)?;
    let lc = lambda.conj();
    let col = |top: &[Complex<T>], bottom: &[Complex<T>], f: Complex<T>| {
        let mut v = top.to_vec();
        v.extend(bottom.iter().map(|&z| z * f));
        v
    };
    let one = Complex::<T>::one();
    let vr = Matrix::from_columns(&[
        col(&p, &n2p, one / lambda),
        col(&p, &n2p, -one / lambda),
        col(&pc, &n2pc, one / lc),
        col(&pc, &n2pc, -one / lc),
    ])?;
    let (o, z, i) = (c::<T>(1.0, 0.0), Complex::zero(), imag_unit::<T>());
    let vb = Matrix::from_columns(&[vec![o, i, z, z], vec![o, -i, z, z], vec![z, z, o, i], vec![z, z, o, -i]])?;
    let vb_inv = inverse(&vb, T::zero())?;
    let vr_inv = inverse(&vr, T::zero())?;
    Ok((&vr * &vb_inv, &vb * &vr_inv))
}

fn partner_of<T: Real>(pairs: &[AdmissiblePair<T>], used: &[bool], idx: usize) -> Option<usize> {
    let target = pairs[idx].lambda().conj();
    let tol = T::lit(1e-8) * target.norm().max(T::one());
    (0..pairs.len()).find(|&k| k != idx && !used[k] && (pairs[k].lambda() - target).norm() <= tol)
}

/// Conjugates the block-diagonal pair so that `B` is real: pure imaginary
/// `λ` blocks pass through, real `λ` blocks become `diag(λ/2, −λ/2)`, and a
/// genuinely complex `λ` is paired with its conjugate into the real `4×4`
/// block of [`real_block_matrix`].
pub fn real_form_lax<T: Real>(pairs: &[AdmissiblePair<T>]) -> Result<RealFormModel<T>, LaxError> {
    let mut used = vec![false; pairs.len()];
    let mut blocks = Vec::new();
    for idx in 0..pairs.len() {
        if used[idx] {
            continue;
        }
        used[idx] = true;
        let pair = &pairs[idx];
        let lax = build_lax2(pair);
        let block = match pair.class() {
            LambdaClass::PureImaginary => lax,
            LambdaClass::Real => {
                let i = imag_unit::<T>();
                let o = Complex::one();
                let v = Matrix::from_rows(&[vec![o, o], vec![i, -i]])?;
                let half = Complex::from(T::lit(0.5));
                let v_inv = Matrix::from_rows(&[vec![half, -i * half], vec![half, i * half]])?;
                lax.conjugated(&v_inv, &v, LaxKind::RealForm)
            }
            LambdaClass::GenuinelyComplex => {
                let Some(k) = partner_of(pairs, &used, idx) else {
                    let l = pair.lambda();
                    return Err(LaxError::NotConjugateClosed {
                        lambda: Complex::new(l.re.as_f64(), l.im.as_f64()),
                    });
                };
                used[k] = true;
                let both = LaxPairModel::direct_sum(&[lax, build_lax2(&pairs[k])], LaxKind::BlockDiag)?;
                let (s, s_inv) = complex_block_transform(pair.lambda())?;
                both.conjugated(&s, &s_inv, LaxKind::RealForm)
            }
        };
        blocks.push(block);
    }
    let joined = LaxPairModel::direct_sum(&blocks, LaxKind::RealForm)?;
    let b_imag_defect = joined.b().imag_part().max_abs();
    let b_real = joined.b().real_part().to_complex();
    let model = LaxPairModel::new(b_real.clone(), joined.covectors().to_vec(), LaxKind::RealForm)?;
    let part = |f: fn(Complex<T>) -> T| -> Result<LaxPairModel<T>, LaxError> {
        let cov = model
            .covectors()
            .iter()
            .map(|v| v.iter().map(|&z| Complex::from(f(z))).collect())
            .collect();
        Ok(LaxPairModel::new(b_real.clone(), cov, LaxKind::RealForm)?)
    };
    let real_part = part(|z| z.re)?;
    let imag_part = part(|z| z.im)?;
    Ok(RealFormModel {
        model,
        real_part,
        imag_part,
        b_imag_defect,
    })
}

/// `(½(s₁ + s₂), (1/2i)(s₁ − s₂))` for integrals of conjugate pairs, with
/// the leftover imaginary parts set to zero.
pub fn real_imag_split<T: Real>(
    i1: &QuadraticIntegral<T>,
    i2: &QuadraticIntegral<T>,
) -> Result<(QuadraticIntegral<T>, QuadraticIntegral<T>), LaxError> {
    let (s1, s2) = (i1.s(), i2.s());
    if s1.shape() != s2.shape() {
        return Err(LaxError::NotConjugatePair { mismatch: f64::INFINITY });
    }
    let mismatch = (s2 - &s1.conjugate()).max_abs();
    if mismatch > T::lit(1e-10) * s1.max_abs().max(T::one()) {
        return Err(LaxError::NotConjugatePair {
            mismatch: mismatch.as_f64(),
        });
    }
    let half = Complex::from(T::lit(0.5));
    let re = (s1 + s2).scale(half).real_part();
    let im = (s1 - s2).scale(half / imag_unit::<T>()).real_part();
    Ok((
        QuadraticIntegral::from_real(&re, format!("Re {}", i1.label())),
        QuadraticIntegral::from_real(&im, format!("Im {}", i1.label())),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laxpair::integral_of_pair;
    use crate::matrix::ValidatedSystem;
    use crate::sampling::{example_system, random_system_of_class, random_vector, rng};
    use crate::spectral::{eigen_decompose, select_admissible_pair, system_spectrum, PairTolerances};
    use num_complex::Complex64 as C;

    fn example_pairs() -> (ValidatedSystem<f64>, AdmissiblePair<f64>) {
        let sys = example_system(1.0, 2.0);
        let w = vec![C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(0.0, -1.0)];
        let pair = select_admissible_pair(&sys, C::new(1.0, 2.0), Some(&w), &PairTolerances::default()).unwrap();
        (sys, pair)
    }

    #[test]
    fn real_block_has_displayed_blocks() {
        let r = real_block_matrix(1.0, 2.0).scale(2.0);
        let n1 = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, -1.0]]).unwrap();
        let n2 = Matrix::from_rows(&[vec![1.0, -2.0], vec![-2.0, -1.0]]).unwrap();
        assert_eq!(r.block(0, 2, 2, 2), n1);
        assert_eq!(r.block(2, 0, 2, 2), n2);
        assert_eq!(r.block(0, 0, 2, 2).max_abs(), 0.0);
    }

    #[test]
    fn real_block_eigenvalues_match_complex_blocks() {
        let (a, b) = (0.7, -1.3);
        let lam = C::new(a, b);
        let ev = eigen_decompose(&real_block_matrix(a, b).to_complex(), 1e-8).unwrap().eigenvalues;
        for y in [lam / 2.0, -lam / 2.0, lam.conj() / 2.0, -lam.conj() / 2.0] {
            assert!(ev.iter().any(|x| (x - y).norm() < 1e-12), "{y} not in {ev:?}");
        }
    }

    #[test]
    fn example_real_form_is_real_and_lax() {
        let (sys, pair) = example_pairs();
        let rf = real_form_lax(&[pair.clone(), pair.conjugate()]).unwrap();
        assert!(rf.b_imag_defect < 1e-12);
        assert!((&rf.model.b().real_part() - &real_block_matrix(1.0, 2.0)).max_abs() < 1e-12);
        let g = sys.generator();
        assert!(rf.model.lax_defect(&g) < 1e-12);
        assert!(rf.real_part.lax_defect(&g) < 1e-12);
        assert!(rf.imag_part.lax_defect(&g) < 1e-12);
        // exact conjugate partner gives a real L
        assert!(rf.imag_part.covectors().iter().flatten().all(|z| z.norm() < 1e-12));
        let x = [0.3, 0.9, -0.4, 1.1];
        let l = rf.model.l_at(&x);
        let h1 = x[0] * x[1] + x[2] * x[3];
        assert!(((&l * &l).trace() - C::new(16.0 * h1, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn split_parts_carry_real_and_imaginary_traces() {
        let (sys, pair) = example_pairs();
        // partner in V_λ̄ that is not w̄ makes L complex
        let other = pair.conjugate().scaled(C::new(0.6, 0.8));
        let rf = real_form_lax(&[pair.clone(), other.clone()]).unwrap();
        assert!(rf.model.lax_defect(&sys.generator()) < 1e-12);
        let x = [1.0, -0.5, 0.25, 0.75];
        let l = rf.model.l_at(&x);
        let lr = rf.real_part.l_at(&x);
        let li = rf.imag_part.l_at(&x);
        let full = (&l * &l).trace();
        let re = (&lr * &lr).trace() - (&li * &li).trace();
        let im = (&lr * &li).trace() * 2.0;
        assert!((full.re - re.re).abs() < 1e-12 && (full.im - im.re).abs() < 1e-12);
        let expect = integral_of_pair(&pair).eval(&x) + integral_of_pair(&other).eval(&x);
        assert!((full - expect).norm() < 1e-12);
    }

    #[test]
    fn missing_partner_is_rejected() {
        let (_, pair) = example_pairs();
        assert!(matches!(real_form_lax(&[pair]), Err(LaxError::NotConjugateClosed { .. })));
    }

    #[test]
    fn squared_real_classes_give_real_b() {
        let mut r = rng(9);
        for class in [LambdaClass::PureImaginary, LambdaClass::Real] {
            let sys = random_system_of_class::<f64, _>(&mut r, class);
            let lam = system_spectrum(&sys).unwrap().eigenvalues[0];
            let pair = select_admissible_pair(&sys, lam, None, &PairTolerances::default()).unwrap();
            let rf = real_form_lax(std::slice::from_ref(&pair)).unwrap();
            assert!(rf.b_imag_defect < 1e-12, "{class}");
            assert!(rf.model.lax_defect(&sys.generator()) < 1e-12);
            let x = random_vector::<f64, _>(&mut r, 2);
            let l = rf.model.l_at(&x);
            assert!(l.imag_part().max_abs() < 1e-12, "{class}");
            let i = integral_of_pair(&pair).eval(&x);
            assert!(((&l * &l).trace() - i).norm() < 1e-12 * i.norm().max(1.0));
        }
    }

    #[test]
    fn split_of_example_integrals() {
        let (_, pair) = example_pairs();
        let i1 = integral_of_pair(&pair);
        let i2 = integral_of_pair(&pair.conjugate());
        let (re, im) = real_imag_split(&i1, &i2).unwrap();
        assert!(re.is_real() && im.is_real());
        let x = [0.2, -0.7, 1.3, 0.4];
        let h1 = x[0] * x[1] + x[2] * x[3];
        let h2 = x[0] * x[3] - x[1] * x[2];
        assert!((re.eval(&x).re - 8.0 * h1).abs() < 1e-12);
        assert!((im.eval(&x).re + 8.0 * h2).abs() < 1e-12);
        let direct = i1.eval(&x);
        assert!((re.eval(&x).re - direct.re).abs() < 1e-12);
        assert!((im.eval(&x).re - direct.im).abs() < 1e-12);
        assert!(matches!(real_imag_split(&i1, &i1), Err(LaxError::NotConjugatePair { .. })));
    }

    #[test]
    fn self_conjugate_split_is_identity_and_zero() {
        let sys = ValidatedSystem::new(ValidatedSystem::standard_j(), Matrix::identity(2)).unwrap();
        let pair = select_admissible_pair(&sys, C::new(0.0, 1.0), None, &PairTolerances::default()).unwrap();
        let i = integral_of_pair(&pair);
        let (re, im) = real_imag_split(&i, &i).unwrap();
        assert!((re.s() - i.s()).max_abs() < 1e-15);
        assert_eq!(im.s().max_abs(), 0.0);
    }
}
