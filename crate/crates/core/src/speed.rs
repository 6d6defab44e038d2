//! Minimal speeds `c*_L = min_{lambda > 0} k(lambda, L) / lambda` and their homogenized limit.

use rayon::prelude::*;

use crate::coefficients::{MeanSet, PeriodicCoefficient, ReactionModel};
use crate::discretization::PeriodicGrid;
use crate::error::Result;
use crate::scalar::minimize_bracketed;
use crate::spectral::k_of_lambda;

pub const LAMBDA_MIN: f64 = 1e-4;
pub const LAMBDA_MAX: f64 = 1e4;
pub const LAMBDA_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedResult {
    pub c_star: f64,
    pub lambda_star: f64,
    pub l: f64,
    /// Number of `k(lambda, L)` evaluations.
    pub evaluations: usize,
    pub bracket: (f64, f64),
}

/// `c*_L` by bracketed minimization of `lambda -> k(lambda, L) / lambda`.
pub fn minimal_speed(
    a: &PeriodicCoefficient,
    r: &ReactionModel,
    l: f64,
    grid: PeriodicGrid,
) -> Result<SpeedResult> {
    let means = MeanSet::compute(a, r)?;
    let lambda0 = (means.mu_arith / means.a_harm)
        .sqrt()
        .clamp(LAMBDA_MIN, LAMBDA_MAX);
    let mu = r.mu();
    let m = minimize_bracketed(
        |lambda| Ok(k_of_lambda(a, mu, l, lambda, grid)? / lambda),
        lambda0,
        LAMBDA_MIN,
        LAMBDA_MAX,
        LAMBDA_TOL,
    )?;
    Ok(SpeedResult {
        c_star: m.value,
        lambda_star: m.x,
        l,
        evaluations: m.evaluations,
        bracket: m.bracket,
    })
}

/// `2 sqrt(<a>_H <mu>_A)`.
pub fn homogenized_speed(means: &MeanSet) -> f64 {
    2.0 * (means.a_harm * means.mu_arith).sqrt()
}

/// `2 sqrt(alpha1 <mu>_A)`, a lower bound for every `c*_L`.
pub fn speed_lower_bound(a: &PeriodicCoefficient, means: &MeanSet) -> f64 {
    2.0 * (a.alpha1() * means.mu_arith).sqrt()
}

#[derive(Debug)]
pub struct SpeedRow {
    pub l: f64,
    pub result: Result<SpeedResult>,
}

impl SpeedRow {
    /// `c*_L - c*_hom`, when the solve succeeded.
    pub fn gap(&self, c_hom: f64) -> Option<f64> {
        self.result.as_ref().ok().map(|s| s.c_star - c_hom)
    }
}

/// One row per `L`, in input order; failures stay in their row.
pub fn speed_sweep(
    a: &PeriodicCoefficient,
    r: &ReactionModel,
    ls: &[f64],
    grid: PeriodicGrid,
) -> Vec<SpeedRow> {
    ls.par_iter()
        .map(|&l| SpeedRow {
            l,
            result: minimal_speed(a, r, l, grid),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::PeriodicField;

    fn logistic(mu: PeriodicField) -> ReactionModel {
        ReactionModel::logistic(mu, 1.0).unwrap()
    }

    #[test]
    fn constant_coefficients() {
        let g = PeriodicGrid::default();
        let r = logistic(PeriodicField::constant(1.0));
        for (alpha, c, lambda) in [(1.0, 2.0, 1.0), (4.0, 4.0, 0.5)] {
            let a = PeriodicCoefficient::constant(alpha);
            let s = minimal_speed(&a, &r, 0.5, g).unwrap();
            assert!((s.c_star - c).abs() < 1e-12, "{s:?}");
            assert!((s.lambda_star - lambda).abs() < 1e-7, "{s:?}");
        }
    }

    #[test]
    fn homogenized_values() {
        let a =
            PeriodicCoefficient::with_sampled_bounds(PeriodicField::series(1.0, vec![0.5], vec![]));
        let m = MeanSet::compute(&a, &logistic(PeriodicField::constant(1.0))).unwrap();
        assert!((homogenized_speed(&m) - 1.86121).abs() < 1e-5);
        let a =
            PeriodicCoefficient::with_sampled_bounds(PeriodicField::series(1.0, vec![0.9], vec![]));
        let m = MeanSet::compute(&a, &logistic(PeriodicField::constant(2.0))).unwrap();
        assert!((homogenized_speed(&m) - 2.0 * (2.0 * 0.19f64.sqrt()).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn small_period_approaches_homogenized_speed() {
        let a =
            PeriodicCoefficient::with_sampled_bounds(PeriodicField::series(1.0, vec![0.5], vec![]));
        let r = logistic(PeriodicField::constant(1.0));
        let s = minimal_speed(&a, &r, 1.0 / 64.0, PeriodicGrid::default()).unwrap();
        let target = 2.0 * 0.75f64.powf(0.25);
        assert!((s.c_star - target).abs() < 1e-2, "{s:?}");
    }

    #[test]
    fn minimizer_is_local_minimum() {
        let g = PeriodicGrid::default();
        let a = PeriodicCoefficient::with_sampled_bounds(PeriodicField::series(
            1.0,
            vec![0.3],
            vec![0.2],
        ));
        let mu = PeriodicField::series(1.0, vec![], vec![0.5]);
        let r = logistic(mu.clone());
        let s = minimal_speed(&a, &r, 0.5, g).unwrap();
        let h = |lambda: f64| k_of_lambda(&a, &mu, 0.5, lambda, g).unwrap() / lambda;
        for factor in [1.0 - 1e-3, 1.0 + 1e-3] {
            assert!(h(s.lambda_star * factor) >= s.c_star - 1e-9);
        }
        let direct = h(s.lambda_star);
        assert!((direct - s.c_star).abs() < 1e-10);
    }

    #[test]
    fn sweep_keeps_order_and_bound() {
        let g = PeriodicGrid::new(64).unwrap();
        let a =
            PeriodicCoefficient::with_sampled_bounds(PeriodicField::series(1.0, vec![0.9], vec![]));
        let r = logistic(PeriodicField::constant(2.0));
        let m = MeanSet::compute(&a, &r).unwrap();
        let ls = [1.0, 0.5, 0.25];
        let rows = speed_sweep(&a, &r, &ls, g);
        for (row, l) in rows.iter().zip(ls) {
            assert_eq!(row.l, l);
            let s = row.result.as_ref().unwrap();
            assert!(s.c_star >= speed_lower_bound(&a, &m) - 1e-6);
        }
    }
}
