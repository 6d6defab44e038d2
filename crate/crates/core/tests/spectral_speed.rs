use nalgebra::DMatrix;
use proptest::prelude::*;

use kpp_core::coefficients::PeriodicField;
use kpp_core::discretization::{assemble_lambda_operator, assemble_linearized, OperatorMatrix};
use kpp_core::spectral::{k_of_lambda, k_pair, principal_eigenpair, rho1, Sense};
use kpp_core::speed::{homogenized_speed, minimal_speed, speed_lower_bound, speed_sweep};
use kpp_core::{MeanSet, PeriodicCoefficient, PeriodicGrid, Preset, ReactionModel};

fn dense_eigenvalues(op: &OperatorMatrix) -> Vec<f64> {
    let rows = op.to_dense();
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .collect()
}

#[test]
fn presets_agree_with_dense_oracle() {
    // nalgebra's Schur iteration crawls on large circulants, so keep this small
    let grid = PeriodicGrid::new(32).unwrap();
    for name in Preset::builtin_names() {
        let p = Preset::builtin(name).unwrap();
        let (a, mu) = (p.diffusion(), p.reaction().mu());
        for (l, lambda) in [(1.0, 0.8), (0.25, 1.2)] {
            let op = assemble_lambda_operator(a, mu, grid, l, lambda).unwrap();
            let oracle = dense_eigenvalues(&op)
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            let k = k_of_lambda(a, mu, l, lambda, grid).unwrap();
            assert!((k - oracle).abs() < 1e-8, "{name} L={l}: {k} vs {oracle}");
        }
        let op = assemble_linearized(a, mu, grid, 0.5).unwrap();
        let rows = op.to_dense();
        let n = rows.len();
        let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (rows[i][j] + rows[j][i]));
        let oracle = sym
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let r = rho1(a, mu, 0.5, grid).unwrap();
        assert!((r - oracle).abs() < 1e-8, "{name}: {r} vs {oracle}");
    }
}

#[test]
fn min_sense_matches_negated_max() {
    let grid = PeriodicGrid::new(64).unwrap();
    let p = Preset::builtin("common-zero").unwrap();
    let op = assemble_linearized(p.diffusion(), p.reaction().mu(), grid, 0.3).unwrap();
    let min = principal_eigenpair(&op, Sense::Min).unwrap();
    let max = principal_eigenpair(&op.negated(), Sense::Max).unwrap();
    assert_eq!(min.value, -max.value);
    assert_eq!(min.eigenfunction, max.eigenfunction);
}

#[test]
fn rho1_monotone_limit_along_halving_periods() {
    let grid = PeriodicGrid::default();
    for name in ["het-mu", "common-zero", "cos-diffusion-09"] {
        let p = Preset::builtin(name).unwrap();
        let mean_mu = MeanSet::compute(p.diffusion(), p.reaction())
            .unwrap()
            .mu_arith;
        let gaps: Vec<f64> = (2..=7)
            .map(|k| {
                let l = 1.0 / f64::from(1u32 << k);
                (rho1(p.diffusion(), p.reaction().mu(), l, grid).unwrap() + mean_mu).abs()
            })
            .collect();
        for w in gaps.windows(2) {
            assert!(w[1] <= w[0], "{name}: {gaps:?}");
        }
    }
}

#[test]
fn k_grid_convergence_is_second_order() {
    let p = Preset::builtin("cos-diffusion-09").unwrap();
    let (a, mu) = (p.diffusion(), p.reaction().mu());
    let k = |n: usize| k_of_lambda(a, mu, 0.5, 1.0, PeriodicGrid::new(n).unwrap()).unwrap();
    let (k32, k64, k128) = (k(32), k(64), k(128));
    let ratio = (k32 - k64).abs() / (k64 - k128).abs();
    assert!(ratio > 3.5 && ratio < 4.5, "{ratio}");
}

#[test]
fn scaling_law_for_constant_diffusion() {
    let grid = PeriodicGrid::default();
    let r = ReactionModel::logistic(PeriodicField::constant(1.3), 1.0).unwrap();
    let a = PeriodicCoefficient::constant(0.7);
    let a2 = a.scaled(2.0);
    for l in [1.0, 0.125] {
        let s1 = minimal_speed(&a, &r, l, grid).unwrap();
        let s2 = minimal_speed(&a2, &r, l, grid).unwrap();
        assert!((s2.c_star - 2f64.sqrt() * s1.c_star).abs() < 1e-6);
        assert!((s2.lambda_star - s1.lambda_star / 2f64.sqrt()).abs() < 1e-6);
    }
}

#[test]
fn scaling_law_with_rescaled_period() {
    // doubling a at period L is the same cell problem as a at period L / sqrt 2
    let grid = PeriodicGrid::default();
    let p = Preset::builtin("cos-diffusion-05").unwrap();
    let (a, r) = (p.diffusion(), p.reaction());
    let a2 = a.scaled(2.0);
    for l in [1.0, 0.25] {
        let s2 = minimal_speed(&a2, r, l, grid).unwrap();
        let s1 = minimal_speed(a, r, l / 2f64.sqrt(), grid).unwrap();
        assert!(
            (s2.c_star - 2f64.sqrt() * s1.c_star).abs() < 1e-6,
            "{s1:?} {s2:?}"
        );
        assert!((s2.lambda_star - s1.lambda_star / 2f64.sqrt()).abs() < 1e-6);
    }
}

#[test]
fn constant_sweep_has_zero_gap() {
    let p = Preset::builtin("fisher-const").unwrap();
    let m = MeanSet::compute(p.diffusion(), p.reaction()).unwrap();
    let c_hom = homogenized_speed(&m);
    assert_eq!(c_hom, 2.0);
    let rows = speed_sweep(
        p.diffusion(),
        p.reaction(),
        &[0.25, 0.0625, 0.015625],
        PeriodicGrid::default(),
    );
    for row in rows {
        assert!(row.gap(c_hom).unwrap().abs() < 1e-8);
    }
}

#[test]
fn cosine_sweep_gap_shrinks() {
    let p = Preset::builtin("cos-diffusion-09").unwrap();
    let m = MeanSet::compute(p.diffusion(), p.reaction()).unwrap();
    let c_hom = homogenized_speed(&m);
    let ls = [0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125];
    let gaps: Vec<f64> = speed_sweep(p.diffusion(), p.reaction(), &ls, PeriodicGrid::default())
        .iter()
        .map(|row| row.gap(c_hom).unwrap().abs())
        .collect();
    assert!(gaps[5] < gaps[0] / 4.0, "{gaps:?}");
    assert!(gaps[5] < 1e-2);
}

fn coefficient() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
    (
        -0.6..0.6f64,
        -0.3..0.3f64,
        -0.8..0.8f64,
        0.3..2.0f64,
        0.05..1.0f64,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identity_positivity_and_bound((b1, b2, m1, m0, l) in coefficient()) {
        let grid = PeriodicGrid::new(64).unwrap();
        let a = PeriodicCoefficient::with_sampled_bounds(PeriodicField::series(1.0, vec![b1, b2], vec![]));
        let mu = PeriodicField::series(m0, vec![], vec![m1 * m0]);
        let r = ReactionModel::logistic(mu.clone(), 1.0).unwrap();

        let rho = rho1(&a, &mu, l, grid).unwrap();
        let k0 = k_of_lambda(&a, &mu, l, 0.0, grid).unwrap();
        prop_assert!((k0 + rho).abs() <= 1e-10);

        let pair = k_pair(&a, &mu, l, 0.9, grid).unwrap();
        prop_assert!(pair.eigenfunction.iter().all(|v| *v > 0.0));

        let m = MeanSet::compute(&a, &r).unwrap();
        let s = minimal_speed(&a, &r, l, grid).unwrap();
        prop_assert!(s.c_star >= speed_lower_bound(&a, &m) - 1e-6);
        let h = |lambda: f64| k_of_lambda(&a, &mu, l, lambda, grid).unwrap() / lambda;
        prop_assert!(h(s.lambda_star * (1.0 - 1e-3)) >= s.c_star - 1e-9);
        prop_assert!(h(s.lambda_star * (1.0 + 1e-3)) >= s.c_star - 1e-9);
    }

    #[test]
    fn k_is_convex_in_lambda((b1, b2, m1, m0, l) in coefficient()) {
        let grid = PeriodicGrid::new(64).unwrap();
        let a = PeriodicCoefficient::with_sampled_bounds(PeriodicField::series(1.0, vec![b1, b2], vec![]));
        let mu = PeriodicField::series(m0, vec![], vec![m1 * m0]);
        let k = |lambda: f64| k_of_lambda(&a, &mu, l, lambda, grid).unwrap();
        let (k1, k2, k3) = (k(0.5), k(1.0), k(1.5));
        prop_assert!(k1 + k3 - 2.0 * k2 >= -1e-8);
    }
}
