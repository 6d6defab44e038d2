//! Front simulations of `u_t = (a(x/L) u_x)_x + f(x/L, u)` on `[-X, X]` and the
//! measurements made on them: spreading speed, the pulsating relation,
//! phase normalization and the distance to the homogenized front.
//!
//! The grid is `x_i = -X + i h` with `h = L / N_cell` and `X` a multiple of `L`,
//! so every node sits on a cell node and the periodic stationary state tiles
//! the line exactly. Each step is backward Euler for diffusion and forward
//! Euler for the reaction. Both ends keep their initial values.

use std::sync::Arc;

use crate::coefficients::{find_p0, PeriodicCoefficient, ReactionModel};
use crate::discretization::{assemble_diffusion, PeriodicGrid, MIN_GRID_POINTS};
use crate::error::{Error, Result};
use crate::linalg::TridiagonalLu;
use crate::scalar::bisect;
use crate::steady::{stationary_state, FrontProfile, StationaryState};

/// Tolerance of the time-monotonicity flag.
pub const MONOTONE_TOLERANCE: f64 = 1e-12;
/// Lower bound below which `u` counts as having left the admissible range.
pub const NEGATIVE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub enum InitialCondition {
    /// `u = p_L(x)` for `x >= position`, zero elsewhere. With `position = X` only
    /// the right boundary node is nonzero and the front is fed from the boundary.
    Step { position: f64 },
    /// `u = p_L(x) (1 + tanh(steepness (x - position))) / 2`.
    Tanh { position: f64, steepness: f64 },
    /// `height * cos^2` bump supported in `|x - center| < radius`; both ends stay zero.
    Bump {
        center: f64,
        radius: f64,
        height: f64,
    },
    /// `min(U0(x - position), p_L(x))`.
    Profile {
        profile: Arc<FrontProfile>,
        position: f64,
    },
    /// `u = p_L`.
    Stationary,
}

impl InitialCondition {
    fn needs_stationary(&self) -> bool {
        !matches!(self, Self::Bump { .. })
    }
}

/// Which states are stored: every `every` steps from time `start` on, restricted
/// to the nodes inside `region` when given.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotPlan {
    pub every: usize,
    pub start: f64,
    pub region: Option<(f64, f64)>,
}

impl Default for SnapshotPlan {
    fn default() -> Self {
        Self {
            every: 10,
            start: 0.0,
            region: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub l: f64,
    /// `X`; rounded to the nearest multiple of `L`.
    pub half_width: f64,
    /// Grid points per period.
    pub cell_points: usize,
    pub dt: f64,
    pub t_final: f64,
    /// Level `theta p0` tracked by the front position.
    pub theta: f64,
    pub initial: InitialCondition,
    pub snapshots: SnapshotPlan,
    /// When set, `dt` is shortened so that `L / c` is a whole number of
    /// snapshot intervals.
    pub pulsating_speed: Option<f64>,
}

impl SimulationConfig {
    pub fn new(l: f64, half_width: f64, t_final: f64) -> Self {
        Self {
            l,
            half_width,
            cell_points: 32,
            dt: 0.01,
            t_final,
            theta: 0.5,
            initial: InitialCondition::Step { position: 0.0 },
            snapshots: SnapshotPlan::default(),
            pulsating_speed: None,
        }
    }

    /// Number of grid intervals on `[-X, X]`.
    pub fn intervals(&self) -> usize {
        2 * self.periods() * self.cell_points
    }

    fn periods(&self) -> usize {
        (self.half_width / self.l).round() as usize
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if !(self.l > 0.0) || !self.l.is_finite() {
            return bad(format!("period L must be positive, got {}", self.l));
        }
        let k = self.half_width / self.l;
        if !(k >= 1.0) || (k - k.round()).abs() > 1e-9 * k {
            return bad(format!(
                "half-width X = {} must be a positive multiple of L = {}",
                self.half_width, self.l
            ));
        }
        if self.cell_points < MIN_GRID_POINTS {
            return bad(format!(
                "need at least {} points per period, got {}",
                MIN_GRID_POINTS, self.cell_points
            ));
        }
        if !(self.dt > 0.0) || !(self.t_final > 0.0) {
            return bad(format!(
                "dt and T must be positive, got {} and {}",
                self.dt, self.t_final
            ));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return bad(format!("theta must lie in (0, 1), got {}", self.theta));
        }
        if self.snapshots.every == 0 {
            return bad("snapshot interval must be at least one step".into());
        }
        if let Some(c) = self.pulsating_speed {
            if !(c > 0.0) || !c.is_finite() {
                return bad(format!("pulsating speed must be positive, got {c}"));
            }
        }
        Ok(())
    }
}

/// Output of a simulation.
#[derive(Debug, Clone)]
pub struct FrontField {
    pub l: f64,
    pub half_width: f64,
    pub h: f64,
    pub dt: f64,
    pub steps: usize,
    pub snapshot_every: usize,
    /// `p0`, or the initial maximum when the reaction has no positive zero.
    pub p_ref: f64,
    pub theta: f64,
    /// Snapshot times.
    pub times: Vec<f64>,
    /// Positions of the stored nodes.
    pub xs: Vec<f64>,
    /// Index of `xs[0]` on the full grid.
    pub first_node: usize,
    /// `values[j][i] = u(times[j], xs[i])`.
    pub values: Vec<Vec<f64>>,
    /// Level-set trace, recorded at every step.
    pub trace_times: Vec<f64>,
    pub trace_positions: Vec<Option<f64>>,
    /// `u(t_{n+1}, x_i) >= u(t_n, x_i) - 1e-12` held at every node and step.
    pub monotone_in_t: bool,
    pub min_value: f64,
    pub max_value: f64,
    /// Full final state on `[-X, X]`.
    pub final_state: Vec<f64>,
}

impl FrontField {
    /// Node positions of the full grid.
    pub fn grid(&self) -> Vec<f64> {
        (0..self.final_state.len())
            .map(|i| -self.half_width + i as f64 * self.h)
            .collect()
    }

    pub fn final_time(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    /// The same field with every time reduced by `delta`.
    pub fn shifted_in_time(&self, delta: f64) -> Self {
        let mut out = self.clone();
        for t in out.times.iter_mut().chain(out.trace_times.iter_mut()) {
            *t -= delta;
        }
        out
    }
}

fn level_position(xs0: f64, h: f64, u: &[f64], level: f64) -> Option<f64> {
    let i = u.iter().position(|v| *v >= level)?;
    if i == 0 {
        return Some(xs0);
    }
    let (a, b) = (u[i - 1], u[i]);
    Some(xs0 + h * ((i - 1) as f64 + (level - a) / (b - a)))
}

/// Largest `|df/ds|` over the nodes of one cell and `s in [0, M]`.
pub fn reaction_slope_bound(r: &ReactionModel, cell_points: usize) -> f64 {
    let m = r.saturation();
    let mut bound: f64 = 0.0;
    for i in 0..cell_points {
        let y = i as f64 / cell_points as f64;
        let mu = r.mu().value(y);
        for k in 0..=64 {
            bound = bound.max(r.ds_with_mu(mu, y, m * k as f64 / 64.0).abs());
        }
    }
    bound
}

/// The stationary state on the simulation's cell grid.
pub fn cell_state(
    a: &PeriodicCoefficient,
    r: &ReactionModel,
    cfg: &SimulationConfig,
) -> Result<StationaryState> {
    stationary_state(a, r, cfg.l, PeriodicGrid::new(cfg.cell_points)?)
}

pub fn simulate(
    a: &PeriodicCoefficient,
    r: &ReactionModel,
    cfg: &SimulationConfig,
) -> Result<FrontField> {
    cfg.validate()?;
    let state = if cfg.initial.needs_stationary() {
        Some(cell_state(a, r, cfg)?)
    } else {
        None
    };
    run(a, r, cfg, state.as_ref())
}

/// As [`simulate`] with a precomputed stationary state (must come from
/// [`cell_state`] with the same period and points per period).
pub fn simulate_with_state(
    a: &PeriodicCoefficient,
    r: &ReactionModel,
    cfg: &SimulationConfig,
    state: &StationaryState,
) -> Result<FrontField> {
    cfg.validate()?;
    if state.values.len() != cfg.cell_points || state.l != cfg.l {
        return Err(Error::InvalidInput(format!(
            "stationary state has {} points at L = {}, simulation needs {} at L = {}",
            state.values.len(),
            state.l,
            cfg.cell_points,
            cfg.l
        )));
    }
    run(a, r, cfg, Some(state))
}

fn run(
    a: &PeriodicCoefficient,
    r: &ReactionModel,
    cfg: &SimulationConfig,
    state: Option<&StationaryState>,
) -> Result<FrontField> {
    let nc = cfg.cell_points;
    let periods = cfg.periods();
    let half_width = periods as f64 * cfg.l;
    let h = cfg.l / nc as f64;
    let n = 2 * periods * nc;
    let xs: Vec<f64> = (0..=n).map(|i| -half_width + i as f64 * h).collect();
    let cell = |i: usize| i % nc;

    let slope = reaction_slope_bound(r, nc);
    let bound = if slope > 0.0 {
        0.5 / slope
    } else {
        f64::INFINITY
    };
    if cfg.dt > bound {
        return Err(Error::StepTooLarge { dt: cfg.dt, bound });
    }
    let mut dt = cfg.dt;
    if let Some(c) = cfg.pulsating_speed {
        let tau = cfg.l / c;
        let every = cfg.snapshots.every as f64;
        let k = every * (tau / (dt * every) - 1e-9).ceil().max(1.0);
        dt = tau / k;
    }
    let steps = (cfg.t_final / dt - 1e-9).ceil().max(1.0) as usize;

    let p_cell = |i: usize| state.map(|s| s.values[cell(i)]).unwrap_or(0.0);
    let mut u: Vec<f64> = match &cfg.initial {
        InitialCondition::Step { position } => (0..=n)
            .map(|i| {
                if xs[i] >= *position - 1e-12 * h {
                    p_cell(i)
                } else {
                    0.0
                }
            })
            .collect(),
        InitialCondition::Tanh {
            position,
            steepness,
        } => (0..=n)
            .map(|i| p_cell(i) * 0.5 * (1.0 + (steepness * (xs[i] - position)).tanh()))
            .collect(),
        InitialCondition::Bump {
            center,
            radius,
            height,
        } => xs
            .iter()
            .map(|x| {
                let z = (x - center) / radius;
                if z.abs() < 1.0 {
                    height * (0.5 * std::f64::consts::PI * z).cos().powi(2)
                } else {
                    0.0
                }
            })
            .collect(),
        InitialCondition::Profile { profile, position } => (0..=n)
            .map(|i| profile.eval(xs[i] - position).max(0.0).min(p_cell(i)))
            .collect(),
        InitialCondition::Stationary => (0..=n).map(p_cell).collect(),
    };
    if !matches!(cfg.initial, InitialCondition::Bump { .. }) {
        u[0] = 0.0;
        u[n] = p_cell(n);
    }
    if matches!(cfg.initial, InitialCondition::Stationary) {
        u[0] = p_cell(0);
    }

    let p_ref = find_p0(r).unwrap_or_else(|_| u.iter().cloned().fold(0.0, f64::max));
    let level = cfg.theta * p_ref;
    let upper_bound = 2.0 * r.saturation();

    // cell coefficients tiled over the line
    let op = assemble_diffusion(a, PeriodicGrid::new(nc)?, cfg.l)?;
    let up_cell = op.upper().to_vec();
    let lo_cell = op.lower().to_vec();
    let m = n - 1;
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    for k in 0..m {
        let i = k + 1;
        let (up, lo) = (up_cell[cell(i)], lo_cell[cell(i)]);
        diag[k] = 1.0 + dt * (up + lo);
        if k > 0 {
            lower[k] = -dt * lo;
        }
        if k + 1 < m {
            upper[k] = -dt * up;
        }
    }
    let lu = TridiagonalLu::factor(&lower, &diag, &upper)?;
    let ys: Vec<f64> = (0..nc).map(|j| j as f64 / nc as f64).collect();
    let mus: Vec<f64> = ys.iter().map(|y| r.mu().value(*y)).collect();

    let (first_node, last_node) = match cfg.snapshots.region {
        Some((x_lo, x_hi)) => {
            let a_idx = ((x_lo + half_width) / h - 1e-9).floor().max(0.0) as usize;
            let b_idx = (((x_hi + half_width) / h + 1e-9).ceil() as usize).min(n);
            if a_idx > b_idx {
                return Err(Error::InvalidInput(format!(
                    "empty snapshot region [{x_lo}, {x_hi}]"
                )));
            }
            (a_idx, b_idx)
        }
        None => (0, n),
    };
    let start_step = (cfg.snapshots.start / dt - 1e-9).ceil().max(0.0) as usize;
    let every = cfg.snapshots.every;

    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut trace_times = Vec::with_capacity(steps + 1);
    let mut trace_positions = Vec::with_capacity(steps + 1);
    let mut monotone = true;
    let mut min_value = u.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut max_value = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut record = |step: usize, u: &[f64], times: &mut Vec<f64>, values: &mut Vec<Vec<f64>>| {
        let t = step as f64 * dt;
        trace_times.push(t);
        trace_positions.push(level_position(-half_width, h, u, level));
        if step >= start_step && (step - start_step) % every == 0 {
            times.push(t);
            values.push(u[first_node..=last_node].to_vec());
        }
    };
    record(0, &u, &mut times, &mut values);

    let mut rhs = vec![0.0; m];
    for step in 1..=steps {
        // increment form: (I - dt D) delta = dt (D u + f(u)), exact on constants
        for k in 0..m {
            let i = k + 1;
            let c = cell(i);
            let du = up_cell[c] * (u[i + 1] - u[i]) + lo_cell[c] * (u[i - 1] - u[i]);
            rhs[k] = dt * (du + r.value_with_mu(mus[c], ys[c], u[i]));
        }
        lu.solve_in_place(&mut rhs);
        let t = step as f64 * dt;
        for k in 0..m {
            let v = u[k + 1] + rhs[k];
            if !v.is_finite() {
                return Err(Error::NonFinite { time: t });
            }
            if v < -NEGATIVE_TOLERANCE || v > upper_bound {
                return Err(Error::OutOfBounds {
                    time: t,
                    value: v,
                    lo: -NEGATIVE_TOLERANCE,
                    hi: upper_bound,
                });
            }
            if v < u[k + 1] - MONOTONE_TOLERANCE {
                monotone = false;
            }
            min_value = min_value.min(v);
            max_value = max_value.max(v);
            u[k + 1] = v;
        }
        record(step, &u, &mut times, &mut values);
    }

    Ok(FrontField {
        l: cfg.l,
        half_width,
        h,
        dt,
        steps,
        snapshot_every: every,
        p_ref,
        theta: cfg.theta,
        times,
        xs: xs[first_node..=last_node].to_vec(),
        first_node,
        values,
        trace_times,
        trace_positions,
        monotone_in_t: monotone,
        min_value,
        max_value,
        final_state: u,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedEstimate {
    pub c_measured: f64,
    pub fit_window: (f64, f64),
    /// Largest deviation of the level-set trace from the fitted line.
    pub fit_residual: f64,
    /// Periods crossed during the fit window.
    pub crossings: f64,
}

pub const MIN_CROSSINGS: usize = 20;

/// Least-squares speed of the level set over `[T/2, T]`.
pub fn measure_speed(field: &FrontField) -> Result<SpeedEstimate> {
    let t_end = field.final_time();
    let t_start = 0.5 * t_end;
    let margin = 10.0 * field.l;
    let mut ts = Vec::new();
    let mut ps = Vec::new();
    for (t, p) in field.trace_times.iter().zip(&field.trace_positions) {
        if *t < t_start - 1e-12 {
            continue;
        }
        let Some(x) = p else {
            return Err(Error::NoPropagation);
        };
        let room = (x + field.half_width).min(field.half_width - x);
        if room < margin {
            return Err(Error::DomainTooSmall { margin: room });
        }
        ts.push(*t);
        ps.push(*x);
    }
    if ts.len() < 3 {
        return Err(Error::NoPropagation);
    }
    let displacement = (ps[ps.len() - 1] - ps[0]).abs();
    if displacement < field.l {
        return Err(Error::NoPropagation);
    }
    let crossings = displacement / field.l;
    if crossings < MIN_CROSSINGS as f64 {
        return Err(Error::ShortWindow {
            crossings,
            required: MIN_CROSSINGS,
        });
    }
    let n = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / n;
    let pm = ps.iter().sum::<f64>() / n;
    let stt: f64 = ts.iter().map(|t| (t - tm).powi(2)).sum();
    let stp: f64 = ts.iter().zip(&ps).map(|(t, p)| (t - tm) * (p - pm)).sum();
    let slope = stp / stt;
    let fit_residual = ts
        .iter()
        .zip(&ps)
        .map(|(t, p)| (p - pm - slope * (t - tm)).abs())
        .fold(0.0, f64::max);
    if fit_residual >= 0.05 * displacement {
        return Err(Error::PoorFit {
            residual: fit_residual,
            displacement,
        });
    }
    Ok(SpeedEstimate {
        c_measured: slope.abs(),
        fit_window: (ts[0], ts[ts.len() - 1]),
        fit_residual,
        crossings,
    })
}

/// `max ||u(t + L/c, x) - u(t, x + L)||` over stored snapshot pairs and `x` in `[-X/2, X/2]`.
pub fn pulsating_residual(field: &FrontField, l: f64, c: f64) -> Result<f64> {
    pulsating_residual_k(field, l, c, 1, None)
}

/// The relation `u(t + kL/c, x) = u(t, x + kL)`, optionally for pairs whose
/// first time lies in `window`.
pub fn pulsating_residual_k(
    field: &FrontField,
    l: f64,
    c: f64,
    k: usize,
    window: Option<(f64, f64)>,
) -> Result<f64> {
    let tau = k as f64 * l / c;
    let cadence = field.snapshot_every as f64 * field.dt;
    let ratio = tau / cadence;
    let lag = ratio.round();
    if lag < 1.0 || (ratio - lag).abs() > 1e-9 * ratio {
        return Err(Error::CadenceMisaligned {
            cadence,
            target: tau,
        });
    }
    let lag = lag as usize;
    let shift_ratio = k as f64 * l / field.h;
    let shift = shift_ratio.round() as usize;
    if (shift_ratio - shift as f64).abs() > 1e-9 * shift_ratio {
        return Err(Error::InvalidInput(format!(
            "shift {} is not a whole number of grid steps",
            k as f64 * l
        )));
    }
    let (x_lo, x_hi) = (-0.5 * field.half_width, 0.5 * field.half_width);
    let nodes: Vec<usize> = (0..field.xs.len())
        .filter(|&i| field.xs[i] >= x_lo - 1e-9 && field.xs[i] <= x_hi + 1e-9)
        .collect();
    if nodes.is_empty() || nodes[nodes.len() - 1] + shift >= field.xs.len() {
        return Err(Error::WindowOutOfRange {
            lo: x_lo,
            hi: x_hi + k as f64 * l,
        });
    }
    let mut worst: Option<f64> = None;
    for j in 0..field.times.len().saturating_sub(lag) {
        let t = field.times[j];
        if let Some((w0, w1)) = window {
            if t < w0 - 1e-9 || t > w1 + 1e-9 {
                continue;
            }
        }
        let later = &field.values[j + lag];
        let now = &field.values[j];
        let d = nodes
            .iter()
            .map(|&i| (later[i] - now[i + shift]).abs())
            .fold(0.0, f64::max);
        worst = Some(worst.map_or(d, |w: f64| w.max(d)));
    }
    worst.ok_or(Error::WindowOutOfRange {
        lo: field.times.first().copied().unwrap_or(0.0),
        hi: field.times.last().copied().unwrap_or(0.0),
    })
}

/// Exact integral over `[a, b]` of the piecewise-linear interpolant of `(xs, ys)`.
fn integrate_linear(xs: &[f64], ys: &[f64], a: f64, b: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..xs.len() - 1 {
        let (x0, x1) = (xs[i], xs[i + 1]);
        let lo = x0.max(a);
        let hi = x1.min(b);
        if hi <= lo {
            continue;
        }
        let slope = (ys[i + 1] - ys[i]) / (x1 - x0);
        let f = |x: f64| ys[i] + slope * (x - x0);
        total += 0.5 * (f(lo) + f(hi)) * (hi - lo);
    }
    total
}

fn cell_means(field: &FrontField) -> Result<Vec<f64>> {
    let (x0, x1) = (field.xs[0], field.xs[field.xs.len() - 1]);
    if x0 > 1e-9 || x1 < 1.0 - 1e-9 {
        return Err(Error::WindowOutOfRange { lo: 0.0, hi: 1.0 });
    }
    Ok(field
        .values
        .iter()
        .map(|row| integrate_linear(&field.xs, row, 0.0, 1.0))
        .collect())
}

/// `I(s) = int_s^{s+1} int_0^1 u(t, x) dx dt`, with `u` linear in time between snapshots.
pub fn phase_integral(field: &FrontField, s: f64) -> Result<f64> {
    let ts = &field.times;
    if ts.is_empty() || s < ts[0] - 1e-12 || s + 1.0 > ts[ts.len() - 1] + 1e-12 {
        return Err(Error::WindowOutOfRange { lo: s, hi: s + 1.0 });
    }
    Ok(integrate_linear(ts, &cell_means(field)?, s, s + 1.0))
}

/// `s*` with `I(s*) = p0 / 2` (see [`phase_integral`]), by bisection.
pub fn normalize_phase(field: &FrontField, p0: f64) -> Result<f64> {
    let means = cell_means(field)?;
    let target = 0.5 * p0;
    let ts = &field.times;
    if ts.len() < 2 || ts[ts.len() - 1] - ts[0] < 1.0 {
        return Err(Error::NoCrossing { target });
    }
    let flat = 1e-12 * p0.abs().max(1.0);
    if means.iter().all(|m| (m - means[0]).abs() <= flat) {
        if (means[0] - target).abs() <= flat {
            return Ok(0.0);
        }
        return Err(Error::NoCrossing { target });
    }
    let big_i = |s: f64| integrate_linear(ts, &means, s, s + 1.0) - target;
    let (lo, hi) = (ts[0], ts[ts.len() - 1] - 1.0);
    let (i_lo, i_hi) = (big_i(lo), big_i(hi));
    if i_lo > 0.0 || i_hi < 0.0 {
        return Err(Error::NoCrossing { target });
    }
    bisect(big_i, lo, hi, 1e-12 * (hi - lo).max(1.0)).map_err(|_| Error::NoCrossing { target })
}

/// `sigma` with `int_0^1 int_0^1 U0(x + c t + sigma) dx dt = p0 / 2`.
pub fn normalize_profile(profile: &FrontProfile) -> Result<f64> {
    let target = 0.5 * profile.p0;
    let quad = 64;
    let j = |sigma: f64| {
        let mut acc = 0.0;
        for a in 0..quad {
            for b in 0..quad {
                // midpoint rule on the unit square
                let x = (a as f64 + 0.5) / quad as f64;
                let t = (b as f64 + 0.5) / quad as f64;
                acc += profile.eval(x + profile.c * t + sigma);
            }
        }
        acc / (quad * quad) as f64 - target
    };
    let w = profile.half_width();
    bisect(j, -w, w - 1.0 - profile.c, 1e-12).map_err(|_| Error::NoCrossing { target })
}

/// L2 distance over `(0, 1) x window` between the phase-normalized field and
/// the phase-normalized `U0(x + c t)`. `window` is in normalized time.
pub fn profile_compare(
    field: &FrontField,
    profile: &FrontProfile,
    window: (f64, f64),
) -> Result<f64> {
    let s_star = normalize_phase(field, profile.p0)?;
    let sigma = normalize_profile(profile)?;
    let (w0, w1) = window;
    let ts = &field.times;
    if !(w1 > w0) || s_star + w0 < ts[0] - 1e-9 || s_star + w1 > ts[ts.len() - 1] + 1e-9 {
        return Err(Error::WindowOutOfRange { lo: w0, hi: w1 });
    }
    let mut t_nodes = Vec::new();
    let mut sq = Vec::new();
    for (j, t) in ts.iter().enumerate() {
        let tn = t - s_star;
        if tn < w0 - 1e-12 || tn > w1 + 1e-12 {
            continue;
        }
        let diff: Vec<f64> = field
            .xs
            .iter()
            .zip(&field.values[j])
            .map(|(x, u)| (u - profile.eval(x + profile.c * tn + sigma)).powi(2))
            .collect();
        t_nodes.push(tn);
        sq.push(integrate_linear(&field.xs, &diff, 0.0, 1.0));
    }
    if t_nodes.len() < 2 {
        return Err(Error::WindowOutOfRange { lo: w0, hi: w1 });
    }
    Ok(integrate_linear(&t_nodes, &sq, w0, w1).sqrt())
}

/// Settings of one homogenization comparison run.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareSettings {
    pub half_width: f64,
    /// Where the homogenized profile is placed at `t = 0`.
    pub start: f64,
    pub t_final: f64,
    pub cell_points: usize,
    pub dt: f64,
    pub theta: f64,
    /// Normalized-time window of the L2 distance.
    pub window: (f64, f64),
}

impl Default for CompareSettings {
    fn default() -> Self {
        Self {
            half_width: 20.0,
            start: 8.0,
            t_final: 10.0,
            cell_points: 16,
            dt: 0.002,
            theta: 0.5,
            window: (-2.0, 2.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub l: f64,
    pub c_measured: f64,
    pub phase_shift: f64,
    pub distance: f64,
}

/// Starts from the homogenized front, simulates at period `L`, and measures
/// the speed, the phase shift `s*` and the distance to `U0(x + c t)`.
pub fn compare_with_front(
    a: &PeriodicCoefficient,
    r: &ReactionModel,
    l: f64,
    front: &Arc<FrontProfile>,
    settings: &CompareSettings,
) -> Result<ConvergenceRow> {
    let mut cfg = SimulationConfig::new(l, settings.half_width, settings.t_final);
    cfg.cell_points = settings.cell_points;
    cfg.dt = settings.dt;
    cfg.theta = settings.theta;
    cfg.initial = InitialCondition::Profile {
        profile: Arc::clone(front),
        position: settings.start,
    };
    let h = l / settings.cell_points as f64;
    cfg.snapshots = SnapshotPlan {
        every: 1,
        start: 0.0,
        region: Some((-h, 1.0 + h)),
    };
    let field = simulate(a, r, &cfg)?;
    let speed = measure_speed(&field)?;
    let phase_shift = normalize_phase(&field, front.p0)?;
    let distance = profile_compare(&field, front, settings.window)?;
    Ok(ConvergenceRow {
        l,
        c_measured: speed.c_measured,
        phase_shift,
        distance,
    })
}
