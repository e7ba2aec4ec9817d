//! Seeded generators for random systems and states.
//!
//! Random systems are rejection-sampled so that the spectrum of `PΓ⁻¹` is
//! simple with a comfortable gap and every eigenvalue sits clearly on or
//! off the axes. That keeps the numerical checks well conditioned.

use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::matrix::{Matrix, ValidatedSystem};
use crate::scalar::Real;
use crate::spectral::{system_spectrum, LambdaClass, SpectralData};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform<T: Real, R: Rng>(rng: &mut R, lo: f64, hi: f64) -> T {
    T::lit(rng.gen_range(lo..hi))
}

pub fn random_vector<T: Real, R: Rng>(rng: &mut R, dim: usize) -> Vec<T> {
    (0..dim).map(|_| uniform(rng, -1.0, 1.0)).collect()
}

pub fn random_complex_vector<T: Real, R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex<T>> {
    (0..dim)
        .map(|_| Complex::new(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)))
        .collect()
}

pub fn random_skew<T: Real, R: Rng>(rng: &mut R, dim: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i + 1..dim {
            let v: T = uniform(rng, -1.0, 1.0);
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
    }
    m
}

pub fn random_symmetric<T: Real, R: Rng>(rng: &mut R, dim: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v: T = uniform(rng, -1.0, 1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Relative spectral gap below which a sample is rejected.
const MIN_GAP: f64 = 0.02;
/// Eigenvalues with `|Re λ|` or `|Im λ|` in `(1e−9, MARGIN)·|λ|` are
/// rejected as too close to an axis to classify robustly.
const AXIS_MARGIN: f64 = 1e-3;

/// Whether a spectrum is simple with relative gap `MIN_GAP` and has no
/// eigenvalue near, but not on, an axis.
pub fn is_well_separated<T: Real>(s: &SpectralData<T>) -> bool {
    let rho = s.spectral_radius().as_f64();
    if rho == 0.0 {
        return false;
    }
    let ev: Vec<Complex<f64>> = s
        .eigenvalues
        .iter()
        .map(|z| Complex::new(z.re.as_f64(), z.im.as_f64()))
        .collect();
    for (i, a) in ev.iter().enumerate() {
        let m = a.norm();
        if m < MIN_GAP * rho {
            return false;
        }
        for part in [a.re.abs(), a.im.abs()] {
            if part > 1e-9 * m && part < AXIS_MARGIN * m {
                return false;
            }
        }
        for b in &ev[i + 1..] {
            if (a - b).norm() < MIN_GAP * rho {
                return false;
            }
        }
    }
    let tol = (1e3 * T::epsilon().as_f64()).max(1e-10);
    s.max_residual().as_f64() < tol * rho.max(1.0)
}

/// A random validated system of half-dimension `n` with a well-separated
/// simple spectrum, together with that spectrum.
pub fn random_simple_system<T: Real, R: Rng>(rng: &mut R, n: usize) -> (ValidatedSystem<T>, SpectralData<T>) {
    loop {
        let dim = 2 * n;
        let g = random_skew::<T, _>(rng, dim);
        let p = random_symmetric::<T, _>(rng, dim);
        let Ok(sys) = ValidatedSystem::new(g, p) else {
            continue;
        };
        if sys.det_gamma().abs().as_f64() < 1e-2 || sys.det_p().abs().as_f64() < 1e-3 {
            continue;
        }
        let Ok(s) = system_spectrum(&sys) else {
            continue;
        };
        if is_well_separated(&s) {
            return (sys, s);
        }
    }
}

/// A random system with positive definite `P`, so the whole spectrum lies
/// on the imaginary axis and every trajectory stays bounded.
pub fn random_stable_system<T: Real, R: Rng>(rng: &mut R, n: usize) -> (ValidatedSystem<T>, SpectralData<T>) {
    loop {
        let dim = 2 * n;
        let g = random_skew::<T, _>(rng, dim);
        let q = random_symmetric::<T, _>(rng, dim);
        let p = &(&q * &q) + &Matrix::identity(dim).scale(T::lit(0.2));
        let Ok(sys) = ValidatedSystem::new(g, p) else {
            continue;
        };
        if sys.det_gamma().abs().as_f64() < 1e-2 {
            continue;
        }
        let Ok(s) = system_spectrum(&sys) else {
            continue;
        };
        if is_well_separated(&s) {
            return (sys, s);
        }
    }
}

/// A random `n = 1` system whose eigenvalues have the requested class.
/// `GenuinelyComplex` is impossible for `n = 1`, so that request yields a
/// two-parameter family like the four-dimensional example instead.
pub fn random_system_of_class<T: Real, R: Rng>(rng: &mut R, class: LambdaClass) -> ValidatedSystem<T> {
    loop {
        let sys = match class {
            LambdaClass::PureImaginary | LambdaClass::Real => {
                let g = random_skew::<T, _>(rng, 2);
                let p = random_symmetric::<T, _>(rng, 2);
                let Ok(sys) = ValidatedSystem::new(g, p) else { continue };
                // λ² = −det P / det Γ for n = 1
                let want_positive_det = class == LambdaClass::PureImaginary;
                if (sys.det_p() > T::zero()) != want_positive_det {
                    continue;
                }
                sys
            }
            LambdaClass::GenuinelyComplex => {
                let a: T = uniform(rng, 0.3, 2.0);
                let b: T = uniform(rng, 0.3, 2.0);
                example_system(a, b)
            }
        };
        if sys.det_gamma().abs().as_f64() < 1e-2 || sys.det_p().abs().as_f64() < 1e-3 {
            continue;
        }
        match system_spectrum(&sys) {
            Ok(s) if is_well_separated(&s) => return sys,
            _ => continue,
        }
    }
}

/// The four-dimensional system with `Γ = diag(J, J)` and
/// `P = [[0,a,0,b],[a,0,−b,0],[0,−b,0,a],[b,0,a,0]]`, whose spectrum is
/// `±a ± bi`.
pub fn example_system<T: Real>(a: T, b: T) -> ValidatedSystem<T> {
    let z = T::zero();
    let p = Matrix::from_rows(&[
        vec![z, a, z, b],
        vec![a, z, -b, z],
        vec![z, -b, z, a],
        vec![b, z, a, z],
    ])
    .expect("4x4");
    let j = ValidatedSystem::<T>::standard_j();
    ValidatedSystem::new(Matrix::block_diagonal(&[j.clone(), j]), p).expect("example system is valid")
}
