//! Complex eigenvalue solver: Householder reduction to Hessenberg form,
//! single-shift QR with Wilkinson shifts, then inverse iteration on the
//! original matrix for the eigenvectors.

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};

use crate::matrix::vector::{dot_h, norm2, normalized};
use crate::matrix::{Lu, Matrix};
use crate::scalar::Real;

/// Iteration cap per eigenvalue; the total cap is this times the dimension.
const ITERS_PER_EIGENVALUE: usize = 60;

/// QR iteration ran out of steps. `found` holds the eigenvalues that had
/// already deflated.
#[derive(Debug, Clone, PartialEq)]
pub struct NoConvergence {
    pub iterations: usize,
    pub found: Vec<Complex64>,
}

/// Reduces `a` to upper Hessenberg form by unitary similarity.
pub fn hessenberg<T: Real>(a: &Matrix<Complex<T>>) -> Matrix<Complex<T>> {
    let n = a.rows();
    let mut h = a.clone();
    if n < 3 {
        return h;
    }
    for k in 0..n - 2 {
        let x: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = norm2(&x);
        if xnorm == T::zero() {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == T::zero() {
            Complex::one()
        } else {
            x0 / Complex::from(x0.norm())
        };
        let alpha = -phase * Complex::from(xnorm);
        let mut v = x;
        v[0] -= alpha;
        let v = normalized(&v);
        if norm2(&v) == T::zero() {
            continue;
        }
        let two = Complex::from(T::lit(2.0));
        // H ← (I − 2vvᴴ) H
        for j in 0..n {
            let s = (0..v.len()).fold(Complex::zero(), |acc, r| acc + v[r].conj() * h[(k + 1 + r, j)]);
            for r in 0..v.len() {
                h[(k + 1 + r, j)] -= two * v[r] * s;
            }
        }
        // H ← H (I − 2vvᴴ)
        for i in 0..n {
            let s = (0..v.len()).fold(Complex::zero(), |acc, c| acc + h[(i, k + 1 + c)] * v[c]);
            for c in 0..v.len() {
                h[(i, k + 1 + c)] -= two * s * v[c].conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex::zero();
        }
    }
    h
}

/// Unitary rotation `[[c, s], [−s̄, c]]` that maps `(a, b)` to `(r, 0)`.
fn givens<T: Real>(a: Complex<T>, b: Complex<T>) -> (T, Complex<T>) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == T::zero() {
        return (T::one(), Complex::zero());
    }
    if na == T::zero() {
        return (T::zero(), b.conj() / Complex::from(nb));
    }
    let rho = na.hypot(nb);
    let c = na / rho;
    let s = (a / Complex::from(na)) * b.conj() / Complex::from(rho);
    (c, s)
}

fn wilkinson_shift<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let half = Complex::from(T::lit(0.5));
    let mean = (a + d) * half;
    let diff = (a - d) * half;
    let disc = (diff * diff + b * c).sqrt();
    let (m1, m2) = (mean + disc, mean - disc);
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// Eigenvalues of a complex square matrix, in deflation order.
pub fn eigenvalues<T: Real>(a: &Matrix<Complex<T>>) -> Result<Vec<Complex<T>>, NoConvergence> {
    let n = a.rows();
    let mut h = hessenberg(a);
    let mut values = vec![Complex::zero(); n];
    if n == 0 {
        return Ok(values);
    }
    let eps = T::epsilon();
    let cap = ITERS_PER_EIGENVALUE * n.max(1);
    let mut total = 0;
    let mut since_deflation = 0;
    let mut hi = n - 1;
    let mut deflated = Vec::new();
    loop {
        if hi == 0 {
            values[0] = h[(0, 0)];
            deflated.push(0);
            break;
        }
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let scale = if diag == T::zero() { h.norm_inf() } else { diag };
            if sub <= eps * scale {
                h[(l, l - 1)] = Complex::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            values[hi] = h[(hi, hi)];
            deflated.push(hi);
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > cap {
            return Err(NoConvergence {
                iterations: total,
                found: deflated
                    .iter()
                    .map(|&i| Complex64::new(values[i].re.as_f64(), values[i].im.as_f64()))
                    .collect(),
            });
        }
        let mu = if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex::from(T::lit(0.75) * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_step(&mut h, l, hi, mu);
    }
    Ok(values)
}

/// One shifted QR step `H − μI = QR`, `H ← RQ + μI` on the window `l..=hi`.
fn qr_step<T: Real>(h: &mut Matrix<Complex<T>>, l: usize, hi: usize, mu: Complex<T>) {
    for k in l..=hi {
        h[(k, k)] -= mu;
    }
    let mut rotations = Vec::with_capacity(hi - l);
    for k in l..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        let cc = Complex::from(c);
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = cc * x + s * y;
            h[(k + 1, j)] = -s.conj() * x + cc * y;
        }
        h[(k + 1, k)] = Complex::zero();
        rotations.push((c, s));
    }
    for (idx, &(c, s)) in rotations.iter().enumerate() {
        let k = l + idx;
        let cc = Complex::from(c);
        for i in l..=(k + 1).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * cc + y * s.conj();
            h[(i, k + 1)] = -x * s + y * cc;
        }
    }
    for k in l..=hi {
        h[(k, k)] += mu;
    }
}

/// Deterministic, generic start vector for inverse iteration.
fn start_vector<T: Real>(n: usize, salt: usize) -> Vec<Complex<T>> {
    (0..n)
        .map(|i| {
            let t = ((i + 1) * (salt + 3)) as f64;
            Complex::new(T::lit(1.0 + 0.37 * (t * 0.61).sin()), T::lit(0.29 * (t * 1.3).cos()))
        })
        .collect()
}

/// Rotates `v` so that its largest-modulus component is real and positive.
pub fn fix_phase<T: Real>(v: &mut [Complex<T>]) {
    let Some(k) = (0..v.len()).max_by(|&i, &j| {
        v[i].norm()
            .partial_cmp(&v[j].norm())
            .unwrap_or(std::cmp::Ordering::Equal)
    }) else {
        return;
    };
    let m = v[k].norm();
    if m == T::zero() {
        return;
    }
    let rot = v[k].conj() / Complex::from(m);
    for z in v.iter_mut() {
        *z *= rot;
    }
}

fn orthogonalize<T: Real>(x: &mut [Complex<T>], against: &[&Vec<Complex<T>>]) {
    for _ in 0..2 {
        for u in against {
            let c = dot_h(u, x);
            for (xi, &ui) in x.iter_mut().zip(u.iter()) {
                *xi -= c * ui;
            }
        }
    }
}

/// Unit eigenvector of `a` for the (approximate) eigenvalue `mu` by inverse
/// iteration. Vectors in `against` are projected out at every step, which
/// separates eigenvectors of a repeated eigenvalue.
pub fn inverse_iteration<T: Real>(
    a: &Matrix<Complex<T>>,
    mu: Complex<T>,
    against: &[&Vec<Complex<T>>],
    salt: usize,
) -> Vec<Complex<T>> {
    let n = a.rows();
    let scale = a.norm_inf().max(T::one());
    let shifted = Matrix::from_fn(n, n, |i, j| if i == j { a[(i, j)] - mu } else { a[(i, j)] });
    let floor = T::epsilon() * scale;
    let lu = Lu::factor_with_floor(&shifted, floor).expect("square by construction");
    let mut x = start_vector::<T>(n, salt);
    orthogonalize(&mut x, against);
    x = normalized(&x);
    for _ in 0..4 {
        let Ok(mut y) = lu.solve(&x) else { break };
        if !y.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            break;
        }
        orthogonalize(&mut y, against);
        let ny = norm2(&y);
        if ny == T::zero() {
            break;
        }
        x = normalized(&y);
    }
    fix_phase(&mut x);
    x
}

/// Eigenvalues, unit eigenvectors and residuals `‖Av − λv‖`.
///
/// Eigenvalues closer than `cluster_tol · max(1, ‖A‖∞)` are treated as one
/// cluster; their eigenvectors are made mutually orthogonal.
pub fn eigen_pairs<T: Real>(
    a: &Matrix<Complex<T>>,
    cluster_tol: T,
) -> Result<(Vec<Complex<T>>, Vec<Vec<Complex<T>>>, Vec<T>), NoConvergence> {
    let values = eigenvalues(a)?;
    let scale = a.norm_inf().max(T::one());
    let mut vectors: Vec<Vec<Complex<T>>> = Vec::with_capacity(values.len());
    for (j, &mu) in values.iter().enumerate() {
        let cluster: Vec<&Vec<Complex<T>>> = values[..j]
            .iter()
            .zip(&vectors)
            .filter(|(&m, _)| (m - mu).norm() <= cluster_tol * scale)
            .map(|(_, v)| v)
            .collect();
        let v = inverse_iteration(a, mu, &cluster, j);
        vectors.push(v);
    }
    let residuals = values
        .iter()
        .zip(&vectors)
        .map(|(&lam, v)| {
            let av = a.matvec(v).expect("square");
            let r: Vec<Complex<T>> = av.iter().zip(v).map(|(&x, &y)| x - lam * y).collect();
            norm2(&r)
        })
        .collect();
    Ok((values, vectors, residuals))
}
