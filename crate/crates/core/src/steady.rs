//! Periodic stationary states `p_L` and the homogenized travelling front `U0`.
//!
//! The cell problem `(1/L^2)(a p')' + f(y, p) = 0` is solved for the deviation
//! `w = p - p0` from a constant base state. The diffusion matrix kills
//! constants exactly, and keeping `w` (small for small `L`) as the unknown
//! avoids the round-off floor that `p`-differences times `1/(L h)^2` would put
//! on the residual.

use rayon::prelude::*;

use crate::coefficients::{find_p0, MeanSet, PeriodicCoefficient, ReactionModel};
use crate::discretization::{assemble_diffusion, OperatorMatrix, PeriodicGrid};
use crate::error::{Error, Result};
use crate::linalg::{solve_cyclic, BandMatrix};
use crate::spectral::rho1;
use crate::speed::homogenized_speed;

pub const NEWTON_MAX_ITERATIONS: usize = 60;
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
const POLISH_STEPS: usize = 3;
const MARCH_MAX_STEPS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryState {
    /// `p_L` at the cell nodes `y_i = i / N`.
    pub values: Vec<f64>,
    /// Constant base state the deviation is measured from.
    pub base: f64,
    /// `values - base`, kept at full relative precision.
    pub deviation: Vec<f64>,
    pub l: f64,
    /// `||(1/L^2)(a p')' + f(y, p)||_inf` at the nodes.
    pub residual: f64,
    pub newton_iters: usize,
    /// Whether the time-marching fallback was needed.
    pub marched: bool,
    pub rho1: f64,
}

impl StationaryState {
    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `||p_L - p0||_inf`.
    pub fn sup_gap(&self, p0: f64) -> f64 {
        if p0 == self.base {
            return self.deviation.iter().fold(0.0, |m, w| m.max(w.abs()));
        }
        self.values.iter().fold(0.0, |m, p| m.max((p - p0).abs()))
    }

    /// Linear interpolation of the `L`-periodic extension at physical position `x`.
    pub fn at(&self, x: f64) -> f64 {
        let n = self.values.len();
        let s = (x / self.l).rem_euclid(1.0) * n as f64;
        let i = (s.floor() as usize).min(n - 1);
        let t = s - i as f64;
        if t == 0.0 {
            return self.values[i];
        }
        (1.0 - t) * self.values[i] + t * self.values[(i + 1) % n]
    }
}

struct CellProblem<'a> {
    r: &'a ReactionModel,
    diffusion: OperatorMatrix,
    ys: Vec<f64>,
    mus: Vec<f64>,
    base: f64,
    upper: f64,
    tolerance: f64,
}

impl CellProblem<'_> {
    fn residual(&self, w: &[f64]) -> Vec<f64> {
        let mut res = self.diffusion.apply(w);
        for (i, ri) in res.iter_mut().enumerate() {
            *ri += self
                .r
                .value_with_mu(self.mus[i], self.ys[i], self.base + w[i]);
        }
        res
    }

    fn admissible(&self, w: &[f64]) -> bool {
        w.iter().all(|wi| {
            let p = self.base + wi;
            p > 0.0 && p <= self.upper
        })
    }

    /// Damped Newton; returns the iterate, its residual norm, the iteration count and
    /// whether the tolerance was met.
    fn newton(&self, mut w: Vec<f64>) -> Result<(Vec<f64>, f64, usize, bool)> {
        let mut res = self.residual(&w);
        let mut norm = sup(&res);
        let lower: Vec<f64> = self.diffusion.lower().to_vec();
        let upper: Vec<f64> = self.diffusion.upper().to_vec();
        let dd = self.diffusion.diagonal();
        // once within tolerance, keep stepping while the residual still drops
        let mut polish = 0;
        for it in 0..NEWTON_MAX_ITERATIONS {
            if norm <= self.tolerance {
                if polish == POLISH_STEPS || norm == 0.0 {
                    return Ok((w, norm, it, true));
                }
                polish += 1;
            }
            let diag: Vec<f64> = (0..w.len())
                .map(|i| dd[i] + self.r.ds_with_mu(self.mus[i], self.ys[i], self.base + w[i]))
                .collect();
            let rhs: Vec<f64> = res.iter().map(|x| -x).collect();
            let delta = match solve_cyclic(&lower, &diag, &upper, &rhs) {
                Ok(d) if d.iter().all(|x| x.is_finite()) => d,
                _ => return Ok((w, norm, it, false)),
            };
            let mut t = 1.0;
            let mut accepted = false;
            while t >= 1.0 / 1024.0 {
                let trial: Vec<f64> = w.iter().zip(&delta).map(|(a, b)| a + t * b).collect();
                if self.admissible(&trial) {
                    let trial_res = self.residual(&trial);
                    let trial_norm = sup(&trial_res);
                    if trial_norm < norm || (polish == 0 && trial_norm <= self.tolerance) {
                        w = trial;
                        res = trial_res;
                        norm = trial_norm;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                return Ok((w, norm, it + 1, norm <= self.tolerance));
            }
        }
        Ok((w, norm, NEWTON_MAX_ITERATIONS, norm <= self.tolerance))
    }

    /// Linearly implicit Euler on the parabolic problem until the residual is small.
    fn march(&self, mut w: Vec<f64>, target: f64, dt: f64) -> Result<Vec<f64>> {
        let lower: Vec<f64> = self.diffusion.lower().iter().map(|x| -dt * x).collect();
        let upper: Vec<f64> = self.diffusion.upper().iter().map(|x| -dt * x).collect();
        let diag: Vec<f64> = self
            .diffusion
            .diagonal()
            .iter()
            .map(|d| 1.0 - dt * d)
            .collect();
        for step in 0..MARCH_MAX_STEPS {
            if step % 64 == 0 {
                let norm = sup(&self.residual(&w));
                if norm <= target {
                    return Ok(w);
                }
            }
            let rhs: Vec<f64> = (0..w.len())
                .map(|i| {
                    w[i] + dt
                        * self
                            .r
                            .value_with_mu(self.mus[i], self.ys[i], self.base + w[i])
                })
                .collect();
            w = solve_cyclic(&lower, &diag, &upper, &rhs)?;
            if let Some(node) = w
                .iter()
                .position(|wi| !(self.base + wi > 0.0) || self.base + wi > self.upper)
            {
                return Err(Error::LeftAdmissibleRange {
                    node,
                    value: self.base + w[node],
                    upper: self.upper,
                });
            }
        }
        Err(Error::NotConverged {
            what: "stationary time marching",
            residual: sup(&self.residual(&w)),
            iterations: MARCH_MAX_STEPS,
        })
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Sampled `max |f(y, s)|` over the cell and `s in [0, M]`, the residual scale.
fn reaction_scale(r: &ReactionModel, ys: &[f64], mus: &[f64]) -> f64 {
    let m = r.saturation();
    let mut scale: f64 = 0.0;
    for k in 0..=16 {
        let s = m * k as f64 / 16.0;
        for (y, mu) in ys.iter().zip(mus) {
            scale = scale.max(r.value_with_mu(*mu, *y, s).abs());
        }
    }
    scale
}

fn max_slope(r: &ReactionModel, ys: &[f64], mus: &[f64]) -> f64 {
    let m = r.saturation();
    let mut slope: f64 = 0.0;
    for k in 0..=32 {
        let s = 2.0 * m * k as f64 / 32.0;
        for (y, mu) in ys.iter().zip(mus) {
            slope = slope.max(r.ds_with_mu(*mu, *y, s).abs());
        }
    }
    slope
}

/// The positive periodic stationary state, Newton from `p = p0`.
pub fn stationary_state(
    a: &PeriodicCoefficient,
    r: &ReactionModel,
    l: f64,
    grid: PeriodicGrid,
) -> Result<StationaryState> {
    solve_stationary(a, r, l, grid, None)
}

/// As [`stationary_state`], starting Newton from the given nodal values.
pub fn stationary_state_from(
    a: &PeriodicCoefficient,
    r: &ReactionModel,
    l: f64,
    grid: PeriodicGrid,
    initial: &[f64],
) -> Result<StationaryState> {
    if initial.len() != grid.len() {
        return Err(Error::InvalidInput(format!(
            "initial guess has {} values, grid has {}",
            initial.len(),
            grid.len()
        )));
    }
    solve_stationary(a, r, l, grid, Some(initial))
}

fn solve_stationary(
    a: &PeriodicCoefficient,
    r: &ReactionModel,
    l: f64,
    grid: PeriodicGrid,
    initial: Option<&[f64]>,
) -> Result<StationaryState> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::InvalidInput(format!(
            "period L must be positive, got {l}"
        )));
    }
    let rho = rho1(a, r.mu(), l, grid)?;
    if rho >= 0.0 {
        return Err(Error::NoStationaryState { rho1: rho });
    }
    let base = find_p0(r)?;
    let ys: Vec<f64> = grid.nodes().collect();
    let mus: Vec<f64> = ys.iter().map(|y| r.mu().value(*y)).collect();
    let m = r.saturation();
    let problem = CellProblem {
        r,
        diffusion: assemble_diffusion(a, grid, l)?,
        tolerance: RESIDUAL_TOLERANCE * reaction_scale(r, &ys, &mus).max(1.0),
        ys,
        mus,
        base,
        upper: 2.0 * m,
    };
    let w0: Vec<f64> = match initial {
        Some(p) => p.iter().map(|pi| pi - base).collect(),
        None => vec![0.0; grid.len()],
    };
    if let Some(node) = w0
        .iter()
        .position(|w| !(base + w > 0.0) || base + w > problem.upper)
    {
        return Err(Error::LeftAdmissibleRange {
            node,
            value: base + w0[node],
            upper: problem.upper,
        });
    }

    let (mut w, mut norm, mut iters, converged) = problem.newton(w0)?;
    let mut marched = false;
    if !converged {
        marched = true;
        let dt = 0.5 / max_slope(r, &problem.ys, &problem.mus).max(1e-12);
        let target = (1e-3 * problem.tolerance / RESIDUAL_TOLERANCE).max(problem.tolerance);
        let w_marched = problem.march(w, target, dt)?;
        let (w_polished, n2, it2, ok) = problem.newton(w_marched)?;
        if !ok {
            return Err(Error::NotConverged {
                what: "stationary Newton",
                residual: n2,
                iterations: iters + it2,
            });
        }
        w = w_polished;
        norm = n2;
        iters += it2;
    }
    let values: Vec<f64> = w.iter().map(|wi| base + wi).collect();
    if let Some(node) = values
        .iter()
        .position(|p| !(*p > 0.0) || *p > m * (1.0 + 1e-12))
    {
        return Err(Error::LeftAdmissibleRange {
            node,
            value: values[node],
            upper: m,
        });
    }
    Ok(StationaryState {
        values,
        base,
        deviation: w,
        l,
        residual: norm,
        newton_iters: iters,
        marched,
        rho1: rho,
    })
}

#[derive(Debug)]
pub struct StationaryRow {
    pub l: f64,
    pub result: Result<StationaryState>,
}

/// One row per `L`, in input order; failures stay in their row.
pub fn stationary_sweep(
    a: &PeriodicCoefficient,
    r: &ReactionModel,
    ls: &[f64],
    grid: PeriodicGrid,
) -> Vec<StationaryRow> {
    ls.par_iter()
        .map(|&l| StationaryRow {
            l,
            result: stationary_state(a, r, l, grid),
        })
        .collect()
}

pub const DEFAULT_LINE_POINTS: usize = 4096;

/// Default truncation half-width: forty decay lengths of the minimal front.
pub fn default_half_width(means: &MeanSet, r: &ReactionModel) -> f64 {
    let g0 = r.g_prime_unchecked(0.0);
    40.0 / (g0 / means.a_harm).sqrt()
}

/// Travelling front `U0` of `<a>_H U'' - c U' + g(U) = 0` on `[-X, X]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontProfile {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub c: f64,
    pub p0: f64,
    pub residual: f64,
}

impl FrontProfile {
    pub fn half_width(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    /// Linear interpolation, continued by `values[0]` on the left and `p0` on the right.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len() - 1;
        let x0 = self.xs[0];
        let h = (self.xs[n] - x0) / n as f64;
        if x <= x0 {
            return self.values[0];
        }
        if x >= self.xs[n] {
            return self.p0;
        }
        let s = (x - x0) / h;
        let j = (s.floor() as usize).min(n - 1);
        let t = s - j as f64;
        (1.0 - t) * self.values[j] + t * self.values[j + 1]
    }
}

/// Solves the homogenized travelling-front problem at speed `c`.
///
/// Unknowns are `U_0 .. U_{n-1}` with `U_n = p0`; the left end is left free
/// and the pin `U(0) = p0 / 2` closes the system. Ordering the pin row at the
/// middle keeps the Jacobian banded (one sub-, two super-diagonals).
pub fn homogenized_front(
    means: &MeanSet,
    r: &ReactionModel,
    c: f64,
    half_width: f64,
    n_line: usize,
) -> Result<FrontProfile> {
    let c_min = homogenized_speed(means);
    if !(c >= c_min - 1e-8 * c_min.max(1.0)) {
        return Err(Error::NoMonotoneConnection { c, c_min });
    }
    if n_line < 8 || n_line % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "line grid needs an even N >= 8, got {n_line}"
        )));
    }
    if !(half_width > 0.0) {
        return Err(Error::InvalidInput(format!(
            "half-width must be positive, got {half_width}"
        )));
    }
    let n = n_line;
    let mid = n / 2;
    let h = 2.0 * half_width / n as f64;
    let p0 = means.p0;
    let diff = means.a_harm / (h * h);
    let adv = c / (2.0 * h);
    let xs: Vec<f64> = (0..=n).map(|j| -half_width + j as f64 * h).collect();

    // slower root of <a>_H k^2 - c k + g'(0) = 0 sets the tanh steepness
    let g0 = r.g_prime_unchecked(0.0);
    let disc = (c * c - 4.0 * means.a_harm * g0).max(0.0);
    let kappa = (c - disc.sqrt()) / (2.0 * means.a_harm);
    let mut u: Vec<f64> = xs[..n]
        .iter()
        .map(|x| p0 / (1.0 + (-2.0 * kappa * x).exp()))
        .collect();
    u[mid] = 0.5 * p0;

    let at = |u: &[f64], j: usize| if j == n { p0 } else { u[j] };
    let residual = |u: &[f64]| -> Vec<f64> {
        let mut res = vec![0.0; n];
        for j in 1..n {
            let (um, uc, up) = (at(u, j - 1), u[j], at(u, j + 1));
            let row = if j <= mid { j - 1 } else { j };
            res[row] = diff * (up - 2.0 * uc + um) - adv * (up - um) + r.g_unchecked(uc);
        }
        res[mid] = u[mid] - 0.5 * p0;
        res
    };
    let scale = (0..=32)
        .map(|k| r.g_unchecked(p0 * k as f64 / 32.0).abs())
        .fold(0.0, f64::max)
        .max(1.0);
    let tol = RESIDUAL_TOLERANCE * scale;

    let mut res = residual(&u);
    let mut norm = sup(&res);
    let mut iterations = 0;
    while norm > tol {
        if iterations >= NEWTON_MAX_ITERATIONS {
            return Err(Error::NotConverged {
                what: "front Newton",
                residual: norm,
                iterations,
            });
        }
        iterations += 1;
        let mut jac = BandMatrix::zeros(n, 1, 2);
        for j in 1..n {
            let row = if j <= mid { j - 1 } else { j };
            jac.set(row, j - 1, diff + adv);
            jac.set(row, j, -2.0 * diff + r.g_prime_unchecked(u[j]));
            if j + 1 < n {
                jac.set(row, j + 1, diff - adv);
            }
        }
        jac.set(mid, mid, 1.0);
        let rhs: Vec<f64> = res.iter().map(|x| -x).collect();
        let delta = jac.solve(&rhs)?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, b)| a + t * b).collect();
            let trial_res = residual(&trial);
            let trial_norm = sup(&trial_res);
            if trial_norm < norm || t < 1e-4 {
                u = trial;
                res = trial_res;
                norm = trial_norm;
                break;
            }
            t *= 0.5;
        }
    }
    let mut values = u;
    values.push(p0);
    if let Some(node) = values.windows(2).position(|w| w[1] < w[0] - 1e-12 * p0) {
        return Err(Error::NonMonotoneProfile { node });
    }
    Ok(FrontProfile {
        xs,
        values,
        c,
        p0,
        residual: norm,
    })
}
