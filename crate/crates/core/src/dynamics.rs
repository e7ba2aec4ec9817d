//! Exact flows of `ẋ = −Γ⁻¹Px` through the matrix exponential, Lax
//! residuals along them, and drift of the integrals.

use num_complex::Complex;

use crate::laxpair::{LaxPairModel, QuadraticIntegral};
use crate::matrix::{Lu, Matrix, MatrixError, ValidatedSystem};
use crate::scalar::Real;
use crate::spectral::{condition_number, numerical_rank};

/// Default time grid `[0, 10]` with 101 samples.
pub const DEFAULT_TIMES: (f64, f64, usize) = (0.0, 10.0, 101);
/// Default step of the central difference.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Denominator floor for relative drift.
pub const DRIFT_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("state has length {got}, system needs {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("times must be strictly increasing (index {index})")]
    TimesNotIncreasing { index: usize },
    #[error("covectors have rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn lin<T: Real>(terms: &[(f64, &Matrix<T>)], n: usize) -> Matrix<T> {
    let mut out = Matrix::zeros(n, n);
    for &(c, m) in terms {
        out = &out + &m.scale(T::lit(c));
    }
    out
}

/// `exp(A)` by scaling and squaring with the degree-13 Padé approximant.
pub fn expm<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    let n = a.rows();
    let norm = a.norm_one().as_f64();
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale(T::lit(2f64.powi(-s)));
    let b = &PADE13;
    let id = Matrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &(&a6 * &lin(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], n))
        + &lin(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &id)], n);
    let u = &a * &u_inner;
    let v = &(&a6 * &lin(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], n))
        + &lin(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &id)], n);
    let lu = Lu::factor(&(&v - &u)).expect("Pade denominator is nonsingular after scaling");
    let mut r = lu.solve_matrix(&(&v + &u)).expect("square");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Samples `x(t_k) = exp(t_k G)x₀` of the exact flow, `G = −Γ⁻¹P`.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    times: Vec<T>,
    states: Vec<Vec<T>>,
    generator: Matrix<T>,
    propagators: Vec<Matrix<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<T>] {
        &self.states
    }

    pub fn generator(&self) -> &Matrix<T> {
        &self.generator
    }

    /// `exp(t_k G)`.
    pub fn propagator(&self, k: usize) -> &Matrix<T> {
        &self.propagators[k]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `ẋ(t_k) = Gx(t_k)`.
    pub fn velocity(&self, k: usize) -> Vec<T> {
        self.generator.matvec(&self.states[k]).expect("state dimension")
    }

    /// State at an arbitrary offset `h` from sample `k`.
    pub fn state_near(&self, k: usize, h: T) -> Vec<T> {
        expm(&self.generator.scale(h)).matvec(&self.states[k]).expect("state dimension")
    }

    /// Largest `‖x(t_k) − exp(t_k G)x₀‖ / max(1, ‖x₀‖)`, recomputed from
    /// scratch.
    pub fn recheck(&self) -> T {
        let x0 = &self.states[0];
        let n0 = crate::matrix::vector::norm2(x0).max(T::one());
        let t0 = self.times[0];
        self.times
            .iter()
            .zip(&self.states)
            .map(|(&t, x)| {
                let fresh = expm(&self.generator.scale(t - t0)).matvec(x0).expect("dimension");
                crate::matrix::vector::norm2(&crate::matrix::vector::sub(x, &fresh)) / n0
            })
            .fold(T::zero(), T::max)
    }
}

/// `count` evenly spaced points on `[t0, t1]`.
pub fn time_grid<T: Real>(t0: T, t1: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..count)
            .map(|k| t0 + (t1 - t0) * T::lit(k as f64) / T::lit((count - 1) as f64))
            .collect(),
    }
}

/// Propagates `x0` (given at `times[0]`) exactly to every time in `times`.
pub fn propagate<T: Real>(sys: &ValidatedSystem<T>, x0: &[T], times: &[T]) -> Result<Trajectory<T>, DynamicsError> {
    if x0.len() != sys.dim() {
        return Err(DynamicsError::DimensionMismatch {
            expected: sys.dim(),
            got: x0.len(),
        });
    }
    if let Some(index) = (1..times.len()).find(|&k| times[k] <= times[k - 1]) {
        return Err(DynamicsError::TimesNotIncreasing { index });
    }
    let generator = sys.generator();
    let t0 = times.first().copied().unwrap_or_else(T::zero);
    let propagators: Vec<Matrix<T>> = times.iter().map(|&t| expm(&generator.scale(t - t0))).collect();
    let states = propagators.iter().map(|m| m.matvec(x0).expect("dimension")).collect();
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        generator,
        propagators,
    })
}

/// `‖EᵀΓE − Γ‖∞ / ‖Γ‖∞` for `E = exp(tG)`.
pub fn symplectic_defect<T: Real>(sys: &ValidatedSystem<T>, propagator: &Matrix<T>) -> T {
    let g = sys.gamma();
    let lhs = &(&propagator.transpose() * g) * propagator;
    (&lhs - g).norm_inf() / g.norm_inf()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaxResidual<T> {
    /// `max ‖L(Gx) − [B, L(x)]‖∞ / ‖L(x)‖∞` over samples with `L(x) ≠ 0`.
    pub exact: T,
    /// `max ‖(L(x(t+h)) − L(x(t−h)))/2h − [B, L(x)]‖∞`.
    pub finite_difference: T,
    /// `max ‖(L(x(t+h)) − L(x(t−h)))/2h − L(Gx)‖∞`, the pure
    /// discretization error.
    pub fd_gap: T,
    pub h: T,
}

/// Lax residuals of `model` along `traj`.
pub fn lax_equation_residual<T: Real>(model: &LaxPairModel<T>, traj: &Trajectory<T>, h: T) -> LaxResidual<T> {
    let g = traj.generator();
    let plus = expm(&g.scale(h));
    let minus = expm(&g.scale(-h));
    let inv_2h = Complex::from(T::one() / (T::lit(2.0) * h));
    let mut out = LaxResidual {
        exact: T::zero(),
        finite_difference: T::zero(),
        fd_gap: T::zero(),
        h,
    };
    for (k, x) in traj.states().iter().enumerate() {
        let l = model.l_at(x);
        let comm = model.b().commutator(&l).expect("square");
        let ldot = model.l_at(&traj.velocity(k));
        let ln = l.norm_inf();
        if ln > T::zero() {
            out.exact = out.exact.max((&ldot - &comm).norm_inf() / ln);
        }
        let lp = model.l_at(&plus.matvec(x).expect("dimension"));
        let lm = model.l_at(&minus.matvec(x).expect("dimension"));
        let fd = (&lp - &lm).scale(inv_2h);
        out.finite_difference = out.finite_difference.max((&fd - &comm).norm_inf());
        out.fd_gap = out.fd_gap.max((&fd - &ldot).norm_inf());
    }
    out
}

/// Checks that the covectors `w_j, ŵ_j` of a block-diagonal model span
/// `ℂ^{2n}` and returns their condition number.
pub fn system_equivalence_check<T: Real>(model: &LaxPairModel<T>, sys: &ValidatedSystem<T>) -> Result<T, DynamicsError> {
    let dim = sys.dim();
    if model.state_dim() != dim {
        return Err(DynamicsError::DimensionMismatch {
            expected: dim,
            got: model.state_dim(),
        });
    }
    let mut rows = Vec::new();
    for j in 0..model.k() / 2 {
        rows.push(model.covector(2 * j, 2 * j).to_vec());
        rows.push(model.covector(2 * j, 2 * j + 1).to_vec());
    }
    let m = Matrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    let rank = numerical_rank(&m, T::lit(1e-10));
    if rank < dim || rows.len() != dim {
        return Err(DynamicsError::RankDeficient { rank, expected: dim });
    }
    Ok(condition_number(&m))
}

/// Per integral, `max_k |I(x_k) − I(x_0)| / max(|I(x_0)|, floor)`.
pub fn conservation_report<T: Real>(integrals: &[QuadraticIntegral<T>], traj: &Trajectory<T>) -> Vec<T> {
    integrals
        .iter()
        .map(|i| {
            let values: Vec<Complex<T>> = traj.states().iter().map(|x| i.eval(x)).collect();
            relative_drift(&values)
        })
        .collect()
}

/// `max_k |v_k − v_0| / max(|v_0|, floor)`.
pub fn relative_drift<T: Real>(values: &[Complex<T>]) -> T {
    let Some(&v0) = values.first() else {
        return T::zero();
    };
    let denom = v0.norm().max(T::lit(DRIFT_FLOOR));
    values.iter().map(|&v| (v - v0).norm() / denom).fold(T::zero(), T::max)
}

/// Relative drift of `Tr L(x(t))ᵏ` along the trajectory.
pub fn trace_power_drift<T: Real>(model: &LaxPairModel<T>, traj: &Trajectory<T>, k: u32) -> T {
    let values: Vec<Complex<T>> = traj
        .states()
        .iter()
        .map(|x| model.l_at(x).powi(k).expect("square").trace())
        .collect();
    relative_drift(&values)
}
