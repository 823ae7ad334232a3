use std::f64::consts::PI;

use parareal_waves::linalg::ComplexMatrix;
use parareal_waves::parareal::{
    error_matrix, fine_solution, max_singular_value, parareal_iterates, parareal_stability, PararealConfig,
};
use parareal_waves::propagators::{MethodKind, PropagatorSpec};
use parareal_waves::symbols::{PhysicsParams, SpatialSymbol};
use parareal_waves::Complex64;
use proptest::prelude::*;

fn method() -> impl Strategy<Value = MethodKind> {
    prop_oneof![
        Just(MethodKind::ExactIntegrator),
        Just(MethodKind::BackwardEuler),
        Just(MethodKind::TrapezoidalRule)
    ]
}

fn config() -> impl Strategy<Value = (PararealConfig, f64)> {
    (2usize..=16, method(), 1usize..=4, method(), 1usize..=20, prop_oneof![Just(0.0), Just(0.1)], 1e-3..PI).prop_map(
        |(p, cm, nc, fm, nf, nu, kappa)| {
            let sym = SpatialSymbol::exact(PhysicsParams::new(1.0, nu).unwrap());
            let cfg = PararealConfig::new(p, 0, PropagatorSpec::new(cm, nc, 1.0, sym), PropagatorSpec::new(fm, nf, 1.0, sym))
                .unwrap();
            (cfg, kappa)
        },
    )
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn error_contracts_by_sigma((cfg, kappa) in config()) {
        let sigma = max_singular_value(&error_matrix(&cfg, kappa).unwrap()).unwrap();
        prop_assume!(sigma < 1.0);
        let u0 = Complex64::new(1.0, 0.0);
        let fine = fine_solution(&cfg, kappa, u0).unwrap();
        let iterates = parareal_iterates(&cfg.with_iterations(cfg.p), kappa, u0).unwrap();
        let errors: Vec<f64> = iterates
            .iter()
            .map(|u| norm(&u.iter().zip(&fine).map(|(a, b)| a - b).collect::<Vec<_>>()))
            .collect();
        for w in errors.windows(2) {
            prop_assert!(w[1] <= sigma * w[0] + 1e-12, "{:?} sigma {}", errors, sigma);
        }
    }

    #[test]
    fn full_iterations_forget_the_coarse_method((cfg, kappa) in config()) {
        let full = cfg.with_iterations(cfg.p);
        let mut other = full.clone();
        other.coarse.method = match cfg.coarse.method {
            MethodKind::TrapezoidalRule => MethodKind::BackwardEuler,
            _ => MethodKind::TrapezoidalRule,
        };
        let a = parareal_stability(&full, kappa).unwrap();
        let b = parareal_stability(&other, kappa).unwrap();
        prop_assert!((a - b).norm() <= 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn error_matrix_entries_follow_the_closed_form((cfg, kappa) in config()) {
        // (F - G) G^(i - j - 1) below the diagonal, zero elsewhere
        let (f, g) = cfg.propagators(kappa).unwrap();
        let e = error_matrix(&cfg, kappa).unwrap();
        let n = cfg.p + 1;
        let mut expected = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..i {
                expected[(i, j)] = (f - g) * g.powu((i - j - 1) as u32);
            }
        }
        prop_assert!(e.sub(&expected).max_abs() <= 1e-13 * (1.0 + expected.max_abs()));
        // one power more than P annihilates it
        prop_assert!(e.pow(cfg.p + 1).max_abs() <= 1e-13 * (1.0 + e.max_abs()).powi(cfg.p as i32 + 1));
    }
}
