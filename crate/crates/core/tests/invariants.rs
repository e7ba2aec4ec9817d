//! Property tests over randomly drawn systems and states.

use laxforge_core::dynamics::{propagate, symplectic_defect, time_grid, trace_power_drift};
use laxforge_core::laxpair::{
    build_lax2, factorized_integral, integral_family, integral_of_pair, sqrt_lax_n1, SqrtRoot, IntegralFamily,
};
use laxforge_core::matrix::{determinant, inverse, Matrix, ValidatedSystem};
use laxforge_core::poisson::{
    bracket_functions, gradient_formula_check, involution_check, poisson_map_check, quadratic_bracket,
    target_structure, PoissonStructure,
};
use laxforge_core::sampling::{
    random_simple_system, random_stable_system, random_symmetric, random_system_of_class, random_vector, rng,
};
use laxforge_core::spectral::{
    hat, quadruple_symmetry_check, system_spectrum, v_lambda_basis, LambdaClass, PairTolerances,
    DEFAULT_PAIRING_TOL,
};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn family(sys: &ValidatedSystem<f64>) -> IntegralFamily<f64> {
    integral_family(sys, &PairTolerances::default(), false).unwrap()
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn p_gamma_inv_transpose_is_minus_gamma_inv_p(seed in any::<u64>(), n in 1usize..4) {
        let (sys, _) = random_simple_system::<f64, _>(&mut rng(seed), n);
        let lhs = sys.p_gamma_inv().transpose();
        let rhs = (sys.gamma_inv() * sys.p()).scale(-1.0);
        prop_assert!((&lhs - &rhs).max_abs() < 1e-12 * rhs.max_abs().max(1.0));
    }

    #[test]
    fn determinant_of_transpose(seed in any::<u64>()) {
        let mut r = rng(seed);
        let data: Vec<f64> = random_vector(&mut r, 36);
        let m = Matrix::from_vec(6, 6, data).unwrap();
        let a = determinant(&m).unwrap();
        let b = determinant(&m.transpose()).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-12));
    }

    #[test]
    fn inverse_of_inverse(seed in any::<u64>()) {
        let mut r = rng(seed);
        // diagonally dominant, so the condition number stays small
        let mut m = random_symmetric::<f64, _>(&mut r, 5);
        for i in 0..5 {
            m[(i, i)] += 6.0;
        }
        let back = inverse(&inverse(&m, 0.0).unwrap(), 0.0).unwrap();
        prop_assert!((&back - &m).max_abs() < 1e-9);
    }

    #[test]
    fn spectrum_is_closed_under_symmetries(seed in any::<u64>(), n in 1usize..4) {
        let (_, s) = random_simple_system::<f64, _>(&mut rng(seed), n);
        let rep = quadruple_symmetry_check(&s, DEFAULT_PAIRING_TOL).unwrap();
        prop_assert!(rep.max_mismatch < DEFAULT_PAIRING_TOL);
    }

    #[test]
    fn v_lambda_is_invariant(seed in any::<u64>(), n in 1usize..4) {
        let (sys, s) = random_simple_system::<f64, _>(&mut rng(seed), n);
        let a = sys.p_gamma_inv_complex();
        for &lam in &s.eigenvalues {
            let basis = v_lambda_basis(&sys, lam, 1e-8).unwrap();
            prop_assert_eq!(basis.len(), 2);
            for v in &basis {
                let av = a.matvec(v).unwrap();
                let aav = a.matvec(&av).unwrap();
                let res: f64 = aav.iter().zip(v).map(|(x, y)| (x - lam * lam * y).norm_sqr()).sum::<f64>().sqrt();
                prop_assert!(res < 1e-8 * a.norm_inf().powi(2).max(1.0));
                // Av stays in span(basis)
                let proj: Vec<C> = (0..av.len())
                    .map(|i| basis.iter().map(|b| {
                        let c: C = b.iter().zip(&av).map(|(p, q)| p.conj() * q).sum();
                        c * b[i]
                    }).sum())
                    .collect();
                let out: f64 = av.iter().zip(&proj).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
                prop_assert!(out < 1e-8 * a.norm_inf().max(1.0));
            }
        }
    }

    #[test]
    fn hat_twice_is_minus_identity(seed in any::<u64>(), n in 1usize..4) {
        let (sys, _) = random_simple_system::<f64, _>(&mut rng(seed), n);
        for p in family(&sys).pairs {
            let back = hat(&sys, p.lambda(), p.w_hat());
            let err: f64 = back.iter().zip(p.w()).map(|(x, y)| (x + y).norm()).fold(0.0, f64::max);
            let scale: f64 = p.w().iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(err < 1e-10 * scale.max(1.0));
        }
    }

    #[test]
    fn admissible_pairs_satisfy_invariants(seed in any::<u64>(), n in 1usize..4) {
        let (sys, _) = random_simple_system::<f64, _>(&mut rng(seed), n);
        let a = sys.p_gamma_inv_complex();
        for p in family(&sys).pairs {
            let lam = p.lambda();
            let aw = a.matvec(p.w()).unwrap();
            let aaw = a.matvec(&aw).unwrap();
            let wn: f64 = p.w().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let res: f64 = aaw.iter().zip(p.w()).map(|(x, y)| (x - lam * lam * y).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(res < 1e-8 * wn * a.norm_inf().powi(2).max(1.0));
            if p.class() != LambdaClass::GenuinelyComplex {
                prop_assert!(p.w().iter().all(|z| z.im == 0.0));
            }
            // not an eigenvector: ŵ is not parallel to w
            let dot: C = p.w().iter().zip(p.w_hat()).map(|(x, y)| x.conj() * y).sum();
            let hn: f64 = p.w_hat().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(dot.norm() < (1.0 - 1e-12) * wn * hn);
        }
    }

    #[test]
    fn trace_identities_for_dim2(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let (sys, _) = random_simple_system::<f64, _>(&mut r, n);
        let x: Vec<f64> = random_vector(&mut r, 2 * n);
        for p in family(&sys).pairs {
            let l = build_lax2(&p).l_at(&x);
            let i = integral_of_pair(&p);
            prop_assert!(rel((&l * &l).trace(), i.eval(&x)) < 1e-11);
            prop_assert!((&(&l * &l) * &l).trace().norm() < 1e-11 * i.s().max_abs().max(1.0));
            prop_assert!(i.s().max_abs() > 1e-10 * p.w().iter().map(|z| z.norm_sqr()).sum::<f64>());
            prop_assert!(rel(factorized_integral(&p, &sys, &x), i.eval(&x)) < 1e-9);
        }
    }

    #[test]
    fn square_root_identity(seed in any::<u64>(), imag in any::<bool>()) {
        let class = if imag { LambdaClass::PureImaginary } else { LambdaClass::Real };
        let sys = random_system_of_class::<f64, _>(&mut rng(seed), class);
        let root = SqrtRoot::of(&sys).unwrap();
        prop_assert!(root.identity_residual < 1e-10 * sys.gamma().norm_inf().max(1.0));
        prop_assert!(sqrt_lax_n1(&sys).is_ok());
    }

    #[test]
    fn brackets_are_bilinear_and_skew(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let (sys, _) = random_simple_system::<f64, _>(&mut r, n);
        let ps = PoissonStructure::of_system(&sys);
        let (f, g, h): (Vec<f64>, Vec<f64>, Vec<f64>) =
            (random_vector(&mut r, 2 * n), random_vector(&mut r, 2 * n), random_vector(&mut r, 2 * n));
        let fg = bracket_functions(&ps, &f, &g).unwrap();
        let gf = bracket_functions(&ps, &g, &f).unwrap();
        let scale = sys.gamma_inv().max_abs().max(1.0);
        prop_assert!((fg + gf).abs() < 1e-12 * scale);
        let fh = bracket_functions(&ps, &f, &h).unwrap();
        let sum: Vec<f64> = g.iter().zip(&h).map(|(a, b)| 2.0 * a + b).collect();
        let lin = bracket_functions(&ps, &f, &sum).unwrap();
        prop_assert!((lin - 2.0 * fg - fh).abs() < 1e-12 * scale * 4.0);
    }

    #[test]
    fn involution_and_bracket_consistency(seed in any::<u64>(), n in 1usize..4) {
        let (sys, _) = random_simple_system::<f64, _>(&mut rng(seed), n);
        let f = family(&sys);
        for a in &f.integrals {
            for b in &f.integrals {
                let m = quadratic_bracket(a.s(), b.s(), &sys).unwrap();
                prop_assert!(m.symmetry_defect() <= 1e-12 * m.max_abs().max(1.0));
                let res = involution_check(a, b, &sys).unwrap();
                prop_assert!(res < 1e-9);
            }
        }
    }

    #[test]
    fn gradients_live_in_v_lambda(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let (sys, _) = random_simple_system::<f64, _>(&mut r, n);
        let x: Vec<f64> = random_vector(&mut r, 2 * n);
        for p in family(&sys).pairs {
            let c = gradient_formula_check(&p, &sys, &x);
            prop_assert!(c.formula < 1e-9 && c.eigen < 1e-8, "{c:?}");
        }
    }

    #[test]
    fn coordinate_maps_are_poisson(seed in any::<u64>(), n in 1usize..4) {
        let (sys, _) = random_simple_system::<f64, _>(&mut rng(seed), n);
        for p in family(&sys).pairs {
            let ts = target_structure(&p, &sys).unwrap();
            let scale = ts.matrix.max_abs().recip().max(1.0);
            prop_assert!(poisson_map_check(&p, &sys, &ts).unwrap() < 1e-9 * scale);
        }
    }

    #[test]
    fn flow_preserves_structure_and_traces(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let (sys, _) = random_stable_system::<f64, _>(&mut r, n);
        let x0: Vec<f64> = random_vector(&mut r, 2 * n);
        let traj = propagate(&sys, &x0, &time_grid(0.0, 10.0, 21)).unwrap();
        for k in 0..traj.len() {
            prop_assert!(symplectic_defect(&sys, traj.propagator(k)) < 1e-8);
        }
        let model = family(&sys).model().unwrap();
        for l in 1..=3 {
            prop_assert!(trace_power_drift(&model, &traj, 2 * l) < 1e-8);
        }
    }
}

#[test]
fn sqrt_model_trace_is_four_h_along_trajectories() {
    let mut r = rng(99);
    for k in 0..10 {
        let class = if k % 2 == 0 { LambdaClass::PureImaginary } else { LambdaClass::Real };
        let sys = random_system_of_class::<f64, _>(&mut r, class);
        let s = system_spectrum(&sys).unwrap();
        // bounded flows only: unstable flows lose relative accuracy
        if s.eigenvalues.iter().any(|z| z.re.abs() > 1e-9 * z.norm()) {
            continue;
        }
        let model = sqrt_lax_n1(&sys).unwrap();
        let x0: Vec<f64> = random_vector(&mut r, 2);
        let traj = propagate(&sys, &x0, &time_grid(0.0, 10.0, 51)).unwrap();
        let h0 = sys.hamiltonian(&x0);
        for x in traj.states() {
            let l = model.l_at(x);
            let tr = (&l * &l).trace();
            assert!(rel(tr, C::new(4.0 * h0, 0.0)) < 1e-9);
        }
    }
}
