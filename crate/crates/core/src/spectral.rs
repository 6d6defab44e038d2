//! Principal (Perron) eigenpairs of the periodic cell operators.
//!
//! For an operator `B` with nonnegative off-diagonals, `B + sigma I` is a
//! nonnegative irreducible matrix for a large enough shift, so the eigenvalue
//! of largest real part is real and carries a positive eigenvector. We find it
//! by inverse iteration on `theta I - B` with `theta` kept strictly above the
//! Perron root: for any positive `v`, the Collatz-Wielandt ratios
//! `(B v)_i / v_i` bracket the root, so `theta = max ratio + gap` is always an
//! admissible shift, `(theta I - B)^-1` is entrywise positive and the iterates
//! stay positive. The bracket width doubles as the convergence test.

use crate::coefficients::{PeriodicCoefficient, PeriodicField};
use crate::discretization::{
    assemble_lambda_operator, assemble_linearized, OperatorMatrix, PeriodicGrid,
};
use crate::error::{Error, Result};
use crate::linalg::solve_cyclic;

pub const MAX_ITERATIONS: usize = 100_000;

/// Relative tolerance on the eigenvalue bracket and on Rayleigh-quotient increments.
pub const TOLERANCE: f64 = 1e-10;

/// Which end of the real spectrum carries the positive eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    /// Largest eigenvalue (operators with nonnegative off-diagonals).
    Max,
    /// Smallest eigenvalue (operators with nonpositive off-diagonals).
    Min,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Strictly positive, sup-norm one.
    pub eigenfunction: Vec<f64>,
    /// `||A v - value v||_inf`.
    pub residual: f64,
    pub iterations: usize,
}

fn ratio_bounds(v: &[f64], w: &[f64]) -> (f64, f64) {
    v.iter()
        .zip(w)
        .map(|(vi, wi)| wi / vi)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), q| {
            (lo.min(q), hi.max(q))
        })
}

fn normalize_sup(v: &mut [f64]) {
    let m = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    for x in v.iter_mut() {
        *x /= m;
    }
}

/// Principal eigenpair of `a` in the given sense.
pub fn principal_eigenpair(a: &OperatorMatrix, sense: Sense) -> Result<EigenPair> {
    let b = match sense {
        Sense::Max => a.clone(),
        Sense::Min => a.negated(),
    };
    if let Some((row, value)) = b.negative_off_diagonal() {
        return Err(Error::NotPerron { row, value });
    }
    let n = b.len();
    let scale = (0..n)
        .map(|i| b.upper()[i].abs() + b.lower()[i].abs() + b.row_sums()[i].abs())
        .fold(0.0, f64::max);
    // rounding floor of the bracket: the ratios cannot be resolved below a few
    // ulps of the largest row entries
    let floor = 64.0 * f64::EPSILON * scale;

    let mut v = vec![1.0; n];
    let mut previous = f64::NAN;
    let mut stalled = 0;
    let mut gap_boost = 1.0;
    let mut spread = f64::INFINITY;
    let mut value = f64::NAN;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        let w = b.apply(&v);
        let (lo, hi) = ratio_bounds(&v, &w);
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let vw: f64 = v.iter().zip(&w).map(|(x, y)| x * y).sum();
        value = (vw / vv).clamp(lo, hi);
        let tol = (TOLERANCE * value.abs().max(1.0)).max(floor);
        let new_spread = hi - lo;
        if new_spread <= tol {
            converged = true;
            break;
        }
        if (value - previous).abs() <= tol && new_spread > 0.5 * spread {
            stalled += 1;
            if stalled >= 3 {
                converged = true;
                break;
            }
        } else {
            stalled = 0;
        }
        spread = new_spread;
        previous = value;

        // theta strictly above the Perron root
        let mut accepted = None;
        for _ in 0..40 {
            let gap = (new_spread.max(tol)) * gap_boost;
            let theta = hi + gap;
            let diag: Vec<f64> = b.diagonal().iter().map(|d| theta - d).collect();
            let lower: Vec<f64> = b.lower().iter().map(|x| -x).collect();
            let upper: Vec<f64> = b.upper().iter().map(|x| -x).collect();
            match solve_cyclic(&lower, &diag, &upper, &v) {
                Ok(x)
                    if x.iter().all(|xi| xi.is_finite() && *xi > 0.0)
                        || x.iter().all(|xi| xi.is_finite() && *xi < 0.0) =>
                {
                    accepted = Some(x);
                    break;
                }
                _ => gap_boost *= 10.0,
            }
        }
        let Some(mut x) = accepted else {
            return Err(Error::EigenNotConverged {
                iterations,
                spread: new_spread,
            });
        };
        normalize_sup(&mut x);
        v = x;
        iterations += 1;
    }
    if !converged {
        return Err(Error::EigenNotConverged { iterations, spread });
    }
    if let Some(node) = v.iter().position(|x| !(*x > 0.0)) {
        return Err(Error::NonPositiveEigenvector { node });
    }
    let w = b.apply(&v);
    let residual = w
        .iter()
        .zip(&v)
        .map(|(wi, vi)| (wi - value * vi).abs())
        .fold(0.0, f64::max);
    let bound = 1e-9 * b.norm_inf();
    if residual > bound {
        return Err(Error::EigenResidual { residual, bound });
    }
    Ok(EigenPair {
        value: match sense {
            Sense::Max => value,
            Sense::Min => -value,
        },
        eigenfunction: v,
        residual,
        iterations,
    })
}

/// Principal eigenpair of the linearized operator (its value is `rho_{1,L}`).
pub fn rho1_pair(
    a: &PeriodicCoefficient,
    mu: &PeriodicField,
    l: f64,
    grid: PeriodicGrid,
) -> Result<EigenPair> {
    principal_eigenpair(&assemble_linearized(a, mu, grid, l)?, Sense::Min)
}

/// `rho_{1,L}`: smallest eigenvalue of `-(1/L^2)(a u')' - mu u` with a positive eigenfunction.
pub fn rho1(
    a: &PeriodicCoefficient,
    mu: &PeriodicField,
    l: f64,
    grid: PeriodicGrid,
) -> Result<f64> {
    rho1_pair(a, mu, l, grid).map(|p| p.value)
}

pub fn k_pair(
    a: &PeriodicCoefficient,
    mu: &PeriodicField,
    l: f64,
    lambda: f64,
    grid: PeriodicGrid,
) -> Result<EigenPair> {
    principal_eigenpair(
        &assemble_lambda_operator(a, mu, grid, l, lambda)?,
        Sense::Max,
    )
}

/// `k(lambda, L)`: principal eigenvalue of the lambda-weighted cell operator.
pub fn k_of_lambda(
    a: &PeriodicCoefficient,
    mu: &PeriodicField,
    l: f64,
    lambda: f64,
    grid: PeriodicGrid,
) -> Result<f64> {
    k_pair(a, mu, l, lambda, grid).map(|p| p.value)
}
