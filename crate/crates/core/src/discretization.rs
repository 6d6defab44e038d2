//! Discrete periodic operators on the unit cell.
//!
//! All problems are posed in the fast variable `y = x / L` on `[0, 1)`; `L`
//! only enters through the `1 / L^2` and `1 / L` prefactors. Operators are kept
//! in *difference form*
//!
//! ```text
//! (A u)_i = upper_i (u_{i+1} - u_i) + lower_i (u_{i-1} - u_i) + row_sum_i u_i
//! ```
//!
//! so row sums are stored exactly instead of being recovered from the
//! cancellation of `O(1 / (L h)^2)` entries.

use crate::coefficients::{PeriodicCoefficient, PeriodicField};
use crate::error::{Error, Result};

/// Smallest admissible grid.
pub const MIN_GRID_POINTS: usize = 16;

/// Default operator grid.
pub const DEFAULT_GRID_POINTS: usize = 256;

/// Uniform grid `y_i = i / N` on the unit cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicGrid {
    n: usize,
}

impl PeriodicGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_GRID_POINTS {
            return Err(Error::InvalidInput(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.n as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.node(i))
    }

    /// Values at cell midpoints `y_i + h / 2`.
    pub fn sample_midpoints(&self, field: &PeriodicField) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n)
            .map(|i| field.value(self.node(i) + 0.5 * h))
            .collect()
    }
}

impl Default for PeriodicGrid {
    fn default() -> Self {
        Self {
            n: DEFAULT_GRID_POINTS,
        }
    }
}

/// Cyclic tridiagonal operator in difference form.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    lower: Vec<f64>,
    upper: Vec<f64>,
    row_sum: Vec<f64>,
}

impl OperatorMatrix {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, row_sum: Vec<f64>) -> Self {
        assert!(
            lower.len() == upper.len() && upper.len() == row_sum.len(),
            "band length mismatch"
        );
        Self {
            lower,
            upper,
            row_sum,
        }
    }

    pub fn len(&self) -> usize {
        self.row_sum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row_sum.is_empty()
    }

    /// Coefficients of `u_{i-1}`.
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    /// Coefficients of `u_{i+1}`.
    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// `A * ones`, exact by construction.
    pub fn row_sums(&self) -> &[f64] {
        &self.row_sum
    }

    /// The ordinary main diagonal `row_sum - lower - upper`.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.row_sum[i] - self.lower[i] - self.upper[i])
            .collect()
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(u.len(), n);
        (0..n)
            .map(|i| {
                let prev = u[(i + n - 1) % n];
                let next = u[(i + 1) % n];
                self.upper[i] * (next - u[i])
                    + self.lower[i] * (prev - u[i])
                    + self.row_sum[i] * u[i]
            })
            .collect()
    }

    pub fn negated(&self) -> Self {
        Self {
            lower: self.lower.iter().map(|v| -v).collect(),
            upper: self.upper.iter().map(|v| -v).collect(),
            row_sum: self.row_sum.iter().map(|v| -v).collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            lower: self.lower.iter().map(|v| v * factor).collect(),
            upper: self.upper.iter().map(|v| v * factor).collect(),
            row_sum: self.row_sum.iter().map(|v| v * factor).collect(),
        }
    }

    /// Adds `diag(values)`.
    pub fn add_diagonal(&self, values: &[f64]) -> Self {
        let mut out = self.clone();
        for (r, v) in out.row_sum.iter_mut().zip(values) {
            *r += v;
        }
        out
    }

    /// Infinity norm of the standard matrix.
    pub fn norm_inf(&self) -> f64 {
        let diag = self.diagonal();
        (0..self.len())
            .map(|i| self.lower[i].abs() + self.upper[i].abs() + diag[i].abs())
            .fold(0.0, f64::max)
    }

    /// First row with a negative off-diagonal entry.
    pub fn negative_off_diagonal(&self) -> Option<(usize, f64)> {
        (0..self.len()).find_map(|i| {
            let v = self.lower[i].min(self.upper[i]);
            (v < 0.0).then_some((i, v))
        })
    }

    /// True when `A + shift I` is entrywise nonnegative.
    pub fn is_nonnegative_after_shift(&self, shift: f64) -> bool {
        self.negative_off_diagonal().is_none() && self.diagonal().iter().all(|d| d + shift >= 0.0)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let diag = self.diagonal();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] += diag[i];
            m[i][(i + n - 1) % n] += self.lower[i];
            m[i][(i + 1) % n] += self.upper[i];
        }
        m
    }
}

fn check_period(l: f64) -> Result<()> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::InvalidInput(format!(
            "period L must be positive, got {l}"
        )));
    }
    Ok(())
}

/// `u -> (1 / L^2) (a u')'` in conservative flux form.
pub fn assemble_diffusion(
    a: &PeriodicCoefficient,
    grid: PeriodicGrid,
    l: f64,
) -> Result<OperatorMatrix> {
    check_period(l)?;
    let n = grid.len();
    let h = grid.spacing();
    let scale = 1.0 / (l * l * h * h);
    let half = grid.sample_midpoints(a.field());
    let upper: Vec<f64> = half.iter().map(|v| v * scale).collect();
    let lower: Vec<f64> = (0..n).map(|i| upper[(i + n - 1) % n]).collect();
    Ok(OperatorMatrix::new(lower, upper, vec![0.0; n]))
}

/// The linearized operator `u -> -(1 / L^2)(a u')' - mu u`; its principal
/// (smallest) eigenvalue is `rho_{1,L}`.
pub fn assemble_linearized(
    a: &PeriodicCoefficient,
    mu: &PeriodicField,
    grid: PeriodicGrid,
    l: f64,
) -> Result<OperatorMatrix> {
    let diffusion = assemble_diffusion(a, grid, l)?;
    let mu_nodes: Vec<f64> = grid.nodes().map(|y| mu.value(y)).collect();
    Ok(diffusion.add_diagonal(&mu_nodes).negated())
}

/// Unit-cell form of `psi -> (a_L psi')' + 2 lambda a_L psi' + lambda a_L' psi + lambda^2 a_L psi + mu_L psi`,
/// i.e. `(1/L^2)(a psi')' + (lambda/L)[(a psi)' + a psi'] + lambda^2 a psi + mu psi`.
///
/// The first-order terms use centered differences of `a psi` and `psi`, so no
/// pointwise derivative of `a` is needed.
pub fn assemble_lambda_operator(
    a: &PeriodicCoefficient,
    mu: &PeriodicField,
    grid: PeriodicGrid,
    l: f64,
    lambda: f64,
) -> Result<OperatorMatrix> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidInput(format!(
            "lambda must be >= 0, got {lambda}"
        )));
    }
    let diffusion = assemble_diffusion(a, grid, l)?;
    let n = grid.len();
    let h = grid.spacing();
    let a_nodes: Vec<f64> = grid.nodes().map(|y| a.value(y)).collect();
    let drift = lambda / (l * 2.0 * h);
    let mut upper = diffusion.upper().to_vec();
    let mut lower = diffusion.lower().to_vec();
    let mut row_sum = vec![0.0; n];
    for i in 0..n {
        let (prev, next) = (a_nodes[(i + n - 1) % n], a_nodes[(i + 1) % n]);
        upper[i] += drift * (next + a_nodes[i]);
        lower[i] -= drift * (prev + a_nodes[i]);
        row_sum[i] = drift * (next - prev) + lambda * lambda * a_nodes[i] + mu.value(grid.node(i));
    }
    Ok(OperatorMatrix::new(lower, upper, row_sum))
}

/// Gershgorin-type shift `sigma` making `A + sigma I` nonnegative for the
/// operators above.
pub fn perron_shift(alpha2: f64, max_abs_mu: f64, grid: PeriodicGrid, l: f64, lambda: f64) -> f64 {
    let h = grid.spacing();
    lambda * (2.0 * alpha2 / (l * h))
        + lambda * lambda * alpha2
        + max_abs_mu
        + 2.0 * alpha2 / (l * l * h * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn cosine(beta: f64) -> PeriodicCoefficient {
        PeriodicCoefficient::with_sampled_bounds(PeriodicField::series(1.0, vec![beta], vec![]))
    }

    #[test]
    fn grid_limits() {
        assert!(PeriodicGrid::new(8).is_err());
        let g = PeriodicGrid::new(16).unwrap();
        let nodes: Vec<f64> = g.nodes().collect();
        assert_eq!(nodes.len(), 16);
        assert_eq!(nodes[0], 0.0);
        assert!(nodes.iter().all(|y| (0.0..1.0).contains(y)));
    }

    #[test]
    fn constants_in_kernel() {
        let g = PeriodicGrid::new(64).unwrap();
        let op = assemble_diffusion(&cosine(0.7), g, 0.3).unwrap();
        assert!(op.apply(&vec![1.0; 64]).iter().all(|v| *v == 0.0));
        assert!(assemble_diffusion(&cosine(0.7), g, 0.0).is_err());
        assert!(assemble_diffusion(&cosine(0.7), g, -1.0).is_err());
    }

    #[test]
    fn second_order_on_cosine() {
        // a = 1, L = 1 on cos(2 pi y): exact value -4 pi^2 cos
        let mut errors = Vec::new();
        for n in [32, 64, 128, 256] {
            let g = PeriodicGrid::new(n).unwrap();
            let op = assemble_diffusion(&PeriodicCoefficient::constant(1.0), g, 1.0).unwrap();
            let u: Vec<f64> = g.nodes().map(|y| (2.0 * PI * y).cos()).collect();
            let au = op.apply(&u);
            let err = au
                .iter()
                .zip(&u)
                .map(|(a, v)| (a + 4.0 * PI * PI * v).abs())
                .fold(0.0, f64::max);
            errors.push(err);
        }
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 4.0).abs() < 0.6, "ratio {ratio}");
        }
    }

    #[test]
    fn second_order_variable_coefficient() {
        // u = sin(2 pi y), a = 1 + 0.5 cos(2 pi y): (a u')' by hand
        let a = cosine(0.5);
        let exact = |y: f64| {
            let w = 2.0 * PI;
            let (s, c) = (w * y).sin_cos();
            let a = 1.0 + 0.5 * c;
            let da = -0.5 * w * s;
            da * w * c - a * w * w * s
        };
        let mut errors = Vec::new();
        for n in [64, 128, 256] {
            let g = PeriodicGrid::new(n).unwrap();
            let op = assemble_diffusion(&a, g, 1.0).unwrap();
            let u: Vec<f64> = g.nodes().map(|y| (2.0 * PI * y).sin()).collect();
            let err = op
                .apply(&u)
                .iter()
                .zip(g.nodes())
                .map(|(v, y)| (v - exact(y)).abs())
                .fold(0.0, f64::max);
            errors.push(err);
        }
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 4.0).abs() <= 0.6, "ratio {ratio}");
        }
    }

    #[test]
    fn lambda_zero_is_negated_linearized() {
        let g = PeriodicGrid::new(32).unwrap();
        let a = cosine(0.5);
        let mu = PeriodicField::series(1.0, vec![], vec![0.4]);
        for l in [1.0, 0.125, 1.0 / 64.0] {
            let k = assemble_lambda_operator(&a, &mu, g, l, 0.0).unwrap();
            let lin = assemble_linearized(&a, &mu, g, l).unwrap();
            assert_eq!(k, lin.negated());
        }
        assert!(assemble_lambda_operator(&a, &mu, g, 1.0, -0.1).is_err());
    }

    #[test]
    fn constant_coefficients_give_constant_eigenvector() {
        let g = PeriodicGrid::new(32).unwrap();
        let a = PeriodicCoefficient::constant(2.5);
        let mu = PeriodicField::constant(0.7);
        for (l, lambda) in [(1.0, 0.3), (0.01, 2.0), (3.0, 0.0)] {
            let op = assemble_lambda_operator(&a, &mu, g, l, lambda).unwrap();
            let expected = lambda * lambda * 2.5 + 0.7;
            for v in op.apply(&vec![1.0; 32]) {
                assert!((v - expected).abs() < 1e-15 * expected.max(1.0));
            }
        }
    }

    #[test]
    fn rescaling_coherence_for_constant_a() {
        let g = PeriodicGrid::new(32).unwrap();
        let a = PeriodicCoefficient::constant(1.7);
        let reference = assemble_diffusion(&a, g, 1.0).unwrap();
        for l in [0.5, 0.25, 1.0 / 128.0] {
            let op = assemble_diffusion(&a, g, l).unwrap().scaled(l * l);
            for (x, y) in op.upper().iter().zip(reference.upper()) {
                assert!((x - y).abs() <= 1e-14 * y.abs());
            }
            for (x, y) in op.lower().iter().zip(reference.lower()) {
                assert!((x - y).abs() <= 1e-14 * y.abs());
            }
        }
    }

    #[test]
    fn perron_structure_after_shift() {
        let g = PeriodicGrid::new(256).unwrap();
        let a = cosine(0.9);
        let mu = PeriodicField::series(1.0, vec![1.0], vec![]);
        for (l, lambda) in [(1.0, 0.0), (1.0, 1.5), (1.0 / 64.0, 1.0), (2.0, 3.0)] {
            let op = assemble_lambda_operator(&a, &mu, g, l, lambda).unwrap();
            let shift = perron_shift(a.alpha2(), 2.0, g, l, lambda);
            assert!(
                op.is_nonnegative_after_shift(shift),
                "L={l} lambda={lambda}"
            );
        }
    }

    proptest! {
        #[test]
        fn diffusion_conserves(c1 in -0.6f64..0.6, s1 in -0.3f64..0.3, l in 0.001f64..4.0) {
            let a = PeriodicCoefficient::with_sampled_bounds(PeriodicField::series(1.0, vec![c1], vec![s1]));
            let g = PeriodicGrid::new(48).unwrap();
            let op = assemble_diffusion(&a, g, l).unwrap();
            prop_assert!(op.apply(&vec![1.0; 48]).iter().all(|v| *v == 0.0));
            // the dense form telescopes to zero as well
            for row in op.to_dense() {
                let s: f64 = row.iter().sum();
                let scale: f64 = row.iter().map(|v| v.abs()).sum();
                prop_assert!(s.abs() <= 1e-14 * scale);
            }
        }
    }
}
