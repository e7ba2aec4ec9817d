//! One-sided (Hestenes) Jacobi SVD for complex matrices, used for ranks and
//! null spaces.

use num_complex::Complex;
use num_traits::Zero;

use crate::matrix::vector::{dot_h, norm2};
use crate::matrix::Matrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 80;

/// Singular values (descending) and the matching right singular vectors.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub singular_values: Vec<T>,
    /// Columns are right singular vectors, ordered like `singular_values`.
    pub v: Vec<Vec<Complex<T>>>,
}

pub fn svd<T: Real>(m: &Matrix<Complex<T>>) -> Svd<T> {
    let ncols = m.cols();
    let mut cols: Vec<Vec<Complex<T>>> = (0..ncols).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<Complex<T>>> = (0..ncols)
        .map(|j| {
            (0..ncols)
                .map(|i| if i == j { Complex::from(T::one()) } else { Complex::zero() })
                .collect()
        })
        .collect();
    let eps = T::epsilon();
    // columns below eps²‖M‖ are numerically zero; rotating them only
    // underflows
    let big = cols.iter().map(|c| norm2(c)).fold(T::zero(), T::max);
    let tiny = (eps * eps * big).powi(2) + T::min_positive_value();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..ncols {
            for q in p + 1..ncols {
                let alpha = norm2(&cols[p]).powi(2);
                let beta = norm2(&cols[q]).powi(2);
                let gamma = dot_h(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || alpha <= tiny || beta <= tiny {
                    continue;
                }
                rotated = true;
                let e = gamma / Complex::from(g);
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s, e);
                rotate(&mut v, p, q, c, s, e);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(T, usize)> = cols.iter().enumerate().map(|(j, c)| (norm2(c), j)).collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    Svd {
        singular_values: order.iter().map(|&(s, _)| s).collect(),
        v: order.iter().map(|&(_, j)| v[j].clone()).collect(),
    }
}

fn rotate<T: Real>(
    cols: &mut [Vec<Complex<T>>],
    p: usize,
    q: usize,
    c: T,
    s: T,
    e: Complex<T>,
) {
    let (cc, ss) = (Complex::from(c), Complex::from(s));
    let ec = e.conj();
    for i in 0..cols[p].len() {
        let x = cols[p][i];
        let y = cols[q][i];
        cols[p][i] = cc * x - ss * ec * y;
        cols[q][i] = ss * e * x + cc * y;
    }
}

fn threshold<T: Real>(sv: &[T], rel_tol: T) -> T {
    let smax = sv.first().copied().unwrap_or_else(T::zero);
    rel_tol * smax.max(T::one())
}

/// Number of singular values above `rel_tol · max(1, σ_max)`.
pub fn numerical_rank<T: Real>(m: &Matrix<Complex<T>>, rel_tol: T) -> usize {
    let s = svd(m);
    let thr = threshold(&s.singular_values, rel_tol);
    s.singular_values.iter().filter(|&&x| x > thr).count()
}

/// Orthonormal basis of the numerical null space, with the same threshold
/// as [`numerical_rank`].
pub fn null_space<T: Real>(m: &Matrix<Complex<T>>, rel_tol: T) -> Vec<Vec<Complex<T>>> {
    let s = svd(m);
    let thr = threshold(&s.singular_values, rel_tol);
    s.singular_values
        .iter()
        .zip(s.v)
        .filter(|(&x, _)| x <= thr)
        .map(|(_, v)| v)
        .collect()
}

/// Ratio `σ_max / σ_min`; infinite when the smallest singular value is zero.
pub fn condition_number<T: Real>(m: &Matrix<Complex<T>>) -> T {
    let s = svd(m);
    match (s.singular_values.first(), s.singular_values.last()) {
        (Some(&hi), Some(&lo)) if lo > T::zero() => hi / lo,
        _ => T::infinity(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    #[test]
    fn singular_values_of_diagonal() {
        let m = Matrix::<C>::diagonal(&[C::new(3.0, 0.0), C::new(0.0, -5.0), C::new(1.0, 0.0)]);
        let s = svd(&m);
        let expect = [5.0, 3.0, 1.0];
        for (a, b) in s.singular_values.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rank_and_null_space_of_outer_product() {
        let u = [C::new(1.0, 1.0), C::new(2.0, 0.0), C::new(0.0, -1.0)];
        let w = [C::new(0.5, 0.0), C::new(-1.0, 2.0), C::new(3.0, 0.0)];
        let m = Matrix::from_fn(3, 3, |i, j| u[i] * w[j]);
        assert_eq!(numerical_rank(&m, 1e-10), 1);
        let ns = null_space(&m, 1e-10);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(norm2(&m.matvec(v).unwrap()) < 1e-12);
            assert!((norm2(v) - 1.0).abs() < 1e-12);
        }
        assert!(dot_h(&ns[0], &ns[1]).norm() < 1e-12);
    }

    #[test]
    fn singular_values_reproduce_frobenius_norm() {
        let m = Matrix::from_fn(4, 3, |i, j| C::new((i + 2 * j) as f64 - 2.0, (i * j) as f64 * 0.5));
        let s = svd(&m);
        let fro: f64 = s.singular_values.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((fro - m.norm_frobenius()).abs() < 1e-12);
    }

    #[test]
    fn wide_matrix_has_null_space() {
        let m = Matrix::from_fn(2, 4, |i, j| C::new(if i == j { 1.0 } else { 0.0 }, 0.0));
        assert_eq!(numerical_rank(&m, 1e-10), 2);
        assert_eq!(null_space(&m, 1e-10).len(), 2);
        assert!(condition_number(&m).is_infinite());
    }
}
