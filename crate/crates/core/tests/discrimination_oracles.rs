use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qseal::discrimination::{solve_ensemble, Ensemble, SolverConfig};
use qseal::qcore::{c, CMatrix, Cplx, DensityMatrix};
use qseal::sampling::{random_density_matrix, random_ket, random_povm, seeded_rng};
use qseal::seal::SealScheme;

/// `½(1 + ||η₀ρ₀ - η₁ρ₁||₁)` via singular values.
fn helstrom(eta0: f64, rho0: &CMatrix, rho1: &CMatrix) -> f64 {
    let diff = rho0 * c(eta0) - rho1 * c(1.0 - eta0);
    let trace_norm: f64 = diff.singular_values().iter().sum();
    0.5 * (1.0 + trace_norm)
}

#[test]
fn zero_and_plus() {
    let h = 0.5f64.sqrt();
    let s = SealScheme::from_public_states(
        vec![0.5, 0.5],
        vec![vec![c(1.0), c(0.0)], vec![c(h), c(h)]],
    )
    .unwrap();
    let sol = qseal::discrimination::solve_discrimination(&s, &SolverConfig::default()).unwrap();
    assert_abs_diff_eq!(sol.p_max, 0.5 + 0.5 * 0.5f64.sqrt(), epsilon = 1e-9);
    assert_abs_diff_eq!(sol.p_max, 0.853_553, epsilon = 1e-6);
    assert!(sol.report.passed);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn two_state_mixed_matches_helstrom(seed in any::<u64>(), dim in 2usize..=5, eta in 0.1f64..=0.9) {
        let mut rng = seeded_rng(seed);
        let r0 = random_density_matrix(&mut rng, dim, 1 + (seed % dim as u64) as usize);
        let r1 = random_density_matrix(&mut rng, dim, dim);
        let oracle = helstrom(eta, r0.matrix(), r1.matrix());
        let e = Ensemble::new(vec![eta, 1.0 - eta], vec![r0, r1]).unwrap();
        let sol = solve_ensemble(&e, &SolverConfig::default()).unwrap();
        prop_assert!((sol.p_max - oracle).abs() <= 1e-8, "{} vs {}", sol.p_max, oracle);
        prop_assert!(sol.report.passed);
    }

    #[test]
    fn no_povm_beats_solver(seed in any::<u64>(), n in 2usize..=4, dim in 2usize..=4) {
        let mut rng = seeded_rng(seed);
        let states: Vec<DensityMatrix> = (0..n)
            .map(|_| DensityMatrix::from_ket(&random_ket(&mut rng, dim)))
            .collect();
        let e = Ensemble::new(vec![1.0 / n as f64; n], states).unwrap();
        let sol = solve_ensemble(&e, &SolverConfig::default()).unwrap();
        prop_assert!(sol.report.passed);
        prop_assert!(sol.p_max <= sol.p_upper + 1e-9);
        for _ in 0..50 {
            let probe = random_povm(&mut rng, n, dim, 1 + dim / 2);
            prop_assert!(e.success_probability(&probe).unwrap() <= sol.p_max + 1e-6);
        }
    }
}

#[test]
fn pure_two_state_closed_form() {
    let mut rng = seeded_rng(5);
    for _ in 0..10 {
        let a = random_ket(&mut rng, 3);
        let b = random_ket(&mut rng, 3);
        let overlap: Cplx = a.inner(&b);
        let oracle = 0.5 * (1.0 + (1.0 - 4.0 * 0.3 * 0.7 * overlap.norm_sqr()).sqrt());
        let s = SealScheme::new(vec![0.3, 0.7], 3, 1, vec![a, b]).unwrap();
        let sol = qseal::discrimination::solve_discrimination(&s, &SolverConfig::default()).unwrap();
        assert_abs_diff_eq!(sol.p_max, oracle, epsilon = 1e-8);
    }
}
