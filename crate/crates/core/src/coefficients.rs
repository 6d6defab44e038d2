//! Periodic coefficients, the KPP reaction term and the homogenized scalars.
//!
//! Every field lives on the unit cell `[0, 1)` in the fast variable `y = x / L`.
//! Fields are stored as finite trigonometric series; uniformly sampled input is
//! converted to its trigonometric interpolant so that evaluation between nodes
//! and differentiation stay spectrally accurate.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Points of the composite trapezoid rule used for every cell average.
pub const QUADRATURE_POINTS: usize = 1024;

/// Points of the validation grid in `y` (four times the default operator grid).
pub const VALIDATION_POINTS: usize = 4 * 256;

/// Size of the geometric ladder in `s` used by the sampled KPP checks.
pub const LADDER_POINTS: usize = 64;

/// A real 1-periodic scalar field `c(y) = mean + sum_k cos_k cos(2 pi k y) + sin_k sin(2 pi k y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicField {
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
    samples: Option<Vec<f64>>,
}

impl PeriodicField {
    pub fn constant(value: f64) -> Self {
        Self::series(value, Vec::new(), Vec::new())
    }

    /// `cos[k-1]` and `sin[k-1]` multiply `cos(2 pi k y)` and `sin(2 pi k y)`.
    pub fn series(mean: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        let mut field = Self {
            mean,
            cos,
            sin,
            samples: None,
        };
        field.trim();
        field
    }

    /// Trigonometric interpolant of uniform samples `values[j] = c(j / N)`.
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 4 {
            return Err(Error::InvalidInput(format!(
                "sampled field needs at least 4 points, got {n}"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "sampled field has non-finite values".into(),
            ));
        }
        let nf = n as f64;
        let mean = values.iter().sum::<f64>() / nf;
        let half = n / 2;
        let mut cos = Vec::with_capacity(half);
        let mut sin = Vec::with_capacity(half);
        for k in 1..=half {
            let (mut ck, mut sk) = (0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                // reduce k*j mod n before scaling to keep the phase exact
                let phase = 2.0 * PI * ((k * j) % n) as f64 / nf;
                ck += v * phase.cos();
                sk += v * phase.sin();
            }
            if n % 2 == 0 && k == half {
                cos.push(ck / nf);
                sin.push(0.0);
            } else {
                cos.push(2.0 * ck / nf);
                sin.push(2.0 * sk / nf);
            }
        }
        let mut field = Self::series(mean, cos, sin);
        field.samples = Some(values.to_vec());
        Ok(field)
    }

    fn trim(&mut self) {
        while self.cos.last() == Some(&0.0) {
            self.cos.pop();
        }
        while self.sin.last() == Some(&0.0) {
            self.sin.pop();
        }
    }

    pub fn mean_coefficient(&self) -> f64 {
        self.mean
    }

    pub fn cos_coefficients(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coefficients(&self) -> &[f64] {
        &self.sin
    }

    /// The original samples when the field was built from them.
    pub fn samples(&self) -> Option<&[f64]> {
        self.samples.as_deref()
    }

    pub fn is_constant(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|c| *c == 0.0)
    }

    fn harmonics(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    pub fn value(&self, y: f64) -> f64 {
        let y = y.rem_euclid(1.0);
        let k_max = self.harmonics();
        if k_max == 0 {
            return self.mean;
        }
        let (s1, c1) = (2.0 * PI * y).sin_cos();
        let (mut sk, mut ck) = (s1, c1);
        let mut acc = self.mean;
        for k in 0..k_max {
            if let Some(a) = self.cos.get(k) {
                acc += a * ck;
            }
            if let Some(b) = self.sin.get(k) {
                acc += b * sk;
            }
            (sk, ck) = (sk * c1 + ck * s1, ck * c1 - sk * s1);
        }
        acc
    }

    pub fn derivative(&self, y: f64) -> f64 {
        let y = y.rem_euclid(1.0);
        let (s1, c1) = (2.0 * PI * y).sin_cos();
        let (mut sk, mut ck) = (s1, c1);
        let mut acc = 0.0;
        for k in 0..self.harmonics() {
            let w = 2.0 * PI * (k + 1) as f64;
            if let Some(a) = self.cos.get(k) {
                acc -= a * w * sk;
            }
            if let Some(b) = self.sin.get(k) {
                acc += b * w * ck;
            }
            (sk, ck) = (sk * c1 + ck * s1, ck * c1 - sk * s1);
        }
        acc
    }

    /// Values at the nodes `j / n`, `j = 0..n`.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.value(j as f64 / n as f64)).collect()
    }

    /// Multiplies the field pointwise by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mean: self.mean * factor,
            cos: self.cos.iter().map(|c| c * factor).collect(),
            sin: self.sin.iter().map(|c| c * factor).collect(),
            samples: self
                .samples
                .as_ref()
                .map(|s| s.iter().map(|v| v * factor).collect()),
        }
    }
}

/// Minimum and maximum of a field over the validation grid.
pub fn sampled_range(field: &PeriodicField) -> (f64, f64) {
    field
        .sample(VALIDATION_POINTS)
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

/// A diffusion coefficient with its declared bounds `alpha1 <= a <= alpha2`.
///
/// The bounds are not checked on construction so that invalid presets can be
/// represented and reported by [`validate_hypotheses`].
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicCoefficient {
    field: PeriodicField,
    alpha1: f64,
    alpha2: f64,
}

impl PeriodicCoefficient {
    pub fn new(field: PeriodicField, alpha1: f64, alpha2: f64) -> Self {
        Self {
            field,
            alpha1,
            alpha2,
        }
    }

    /// Uses the sampled minimum and maximum as bounds.
    pub fn with_sampled_bounds(field: PeriodicField) -> Self {
        let (lo, hi) = sampled_range(&field);
        Self::new(field, lo, hi)
    }

    pub fn constant(value: f64) -> Self {
        Self::new(PeriodicField::constant(value), value, value)
    }

    pub fn field(&self) -> &PeriodicField {
        &self.field
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    pub fn value(&self, y: f64) -> f64 {
        self.field.value(y)
    }

    /// First validation-grid node where the bounds fail, if any.
    pub fn bound_violation(&self) -> Option<Violation> {
        if !(self.alpha1 > 0.0) || !(self.alpha1 <= self.alpha2) {
            return Some(Violation {
                y: None,
                s: None,
                value: self.alpha1,
            });
        }
        let slack = 1e-12 * self.alpha2.abs();
        (0..VALIDATION_POINTS).find_map(|j| {
            let y = j as f64 / VALIDATION_POINTS as f64;
            let v = self.field.value(y);
            (v < self.alpha1 - slack || v > self.alpha2 + slack).then_some(Violation {
                y: Some(y),
                s: None,
                value: v,
            })
        })
    }

    /// Multiplies the coefficient (and its bounds) by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(
            self.field.scaled(factor),
            self.alpha1 * factor,
            self.alpha2 * factor,
        )
    }
}

/// User-supplied reaction `f(y, s)`.
pub type ReactionFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Functional form of the reaction term.
#[derive(Clone)]
pub enum ReactionKind {
    /// `f(y, s) = mu(y) s (1 - s / capacity)`; every `y` shares the zero `s = capacity`.
    Logistic { capacity: f64 },
    /// `f(y, s) = mu(y) s - nu s^2`.
    Crowding { nu: f64 },
    /// Black-box `f(y, s)`; `mu` must be supplied separately.
    Custom(ReactionFn),
}

impl fmt::Debug for ReactionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Logistic { capacity } => f
                .debug_struct("Logistic")
                .field("capacity", capacity)
                .finish(),
            Self::Crowding { nu } => f.debug_struct("Crowding").field("nu", nu).finish(),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// The nonlinearity `f(y, s)` together with its linearization `mu(y)` at `s = 0`,
/// the saturation bound `M` and an optional common zero `s0`.
#[derive(Debug, Clone)]
pub struct ReactionModel {
    kind: ReactionKind,
    mu: PeriodicField,
    saturation: f64,
    common_zero: Option<f64>,
    quad_mu: Arc<Vec<f64>>,
}

impl ReactionModel {
    pub fn new(
        kind: ReactionKind,
        mu: PeriodicField,
        saturation: f64,
        common_zero: Option<f64>,
    ) -> Result<Self> {
        if !(saturation > 0.0) || !saturation.is_finite() {
            return Err(Error::InvalidInput(format!(
                "saturation bound M must be positive, got {saturation}"
            )));
        }
        match kind {
            ReactionKind::Logistic { capacity } if !(capacity > 0.0) => {
                return Err(Error::InvalidInput(format!(
                    "logistic capacity must be positive, got {capacity}"
                )))
            }
            ReactionKind::Crowding { nu } if !(nu > 0.0) => {
                return Err(Error::InvalidInput(format!(
                    "crowding coefficient must be positive, got {nu}"
                )))
            }
            _ => {}
        }
        let quad_mu = Arc::new(mu.sample(QUADRATURE_POINTS));
        Ok(Self {
            kind,
            mu,
            saturation,
            common_zero,
            quad_mu,
        })
    }

    pub fn logistic(mu: PeriodicField, capacity: f64) -> Result<Self> {
        Self::new(
            ReactionKind::Logistic { capacity },
            mu,
            capacity,
            Some(capacity),
        )
    }

    /// `mu(y) s - nu s^2` with `M = max mu / nu`.
    pub fn crowding(mu: PeriodicField, nu: f64) -> Result<Self> {
        let (_, hi) = sampled_range(&mu);
        Self::new(
            ReactionKind::Crowding { nu },
            mu,
            hi.max(f64::MIN_POSITIVE) / nu,
            None,
        )
    }

    pub fn custom(
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        mu: PeriodicField,
        saturation: f64,
        common_zero: Option<f64>,
    ) -> Result<Self> {
        Self::new(
            ReactionKind::Custom(Arc::new(f)),
            mu,
            saturation,
            common_zero,
        )
    }

    pub fn kind(&self) -> &ReactionKind {
        &self.kind
    }

    pub fn mu(&self) -> &PeriodicField {
        &self.mu
    }

    /// The bound `M` beyond which `f <= 0`.
    pub fn saturation(&self) -> f64 {
        self.saturation
    }

    pub fn common_zero(&self) -> Option<f64> {
        self.common_zero
    }

    /// `f(y, s)`.
    pub fn value(&self, y: f64, s: f64) -> f64 {
        match &self.kind {
            ReactionKind::Custom(f) => f(y, s),
            _ => self.value_with_mu(self.mu.value(y), y, s),
        }
    }

    /// `f(y, s)` when `mu(y)` is already known.
    pub fn value_with_mu(&self, mu_y: f64, y: f64, s: f64) -> f64 {
        match &self.kind {
            ReactionKind::Logistic { capacity } => mu_y * s * (1.0 - s / capacity),
            ReactionKind::Crowding { nu } => mu_y * s - nu * s * s,
            ReactionKind::Custom(f) => f(y, s),
        }
    }

    /// `df/ds (y, s)`.
    pub fn ds(&self, y: f64, s: f64) -> f64 {
        self.ds_with_mu(self.mu.value(y), y, s)
    }

    pub fn ds_with_mu(&self, mu_y: f64, y: f64, s: f64) -> f64 {
        match &self.kind {
            ReactionKind::Logistic { capacity } => mu_y * (1.0 - 2.0 * s / capacity),
            ReactionKind::Crowding { nu } => mu_y - 2.0 * nu * s,
            ReactionKind::Custom(f) => {
                let step = 1e-6 * s.abs().max(1.0);
                (f(y, s + step) - f(y, s - step)) / (2.0 * step)
            }
        }
    }

    pub(crate) fn g_unchecked(&self, s: f64) -> f64 {
        let n = self.quad_mu.len() as f64;
        self.quad_mu
            .iter()
            .enumerate()
            .map(|(j, &m)| self.value_with_mu(m, j as f64 / n, s))
            .sum::<f64>()
            / n
    }

    pub(crate) fn g_prime_unchecked(&self, s: f64) -> f64 {
        let n = self.quad_mu.len() as f64;
        self.quad_mu
            .iter()
            .enumerate()
            .map(|(j, &m)| self.ds_with_mu(m, j as f64 / n, s))
            .sum::<f64>()
            / n
    }
}

/// Homogenized scalars of a preset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSet {
    pub a_arith: f64,
    pub a_harm: f64,
    pub mu_arith: f64,
    pub p0: f64,
    pub c_star_hom: f64,
}

impl MeanSet {
    pub fn compute(a: &PeriodicCoefficient, r: &ReactionModel) -> Result<Self> {
        let a_arith = arithmetic_mean(a.field());
        let a_harm = harmonic_mean(a)?;
        let mu_arith = arithmetic_mean(r.mu());
        let p0 = find_p0(r)?;
        Ok(Self {
            a_arith,
            a_harm,
            mu_arith,
            p0,
            c_star_hom: 2.0 * (a_harm * mu_arith).sqrt(),
        })
    }
}

/// Cell average: the constant term of the series, which is exact (and equals
/// the sample average for sampled fields).
pub fn arithmetic_mean(c: &PeriodicField) -> f64 {
    c.mean_coefficient()
}

/// `(int_0^1 1/c)^-1`; rejects coefficients that are not positive on the quadrature grid.
pub fn harmonic_mean(c: &PeriodicCoefficient) -> Result<f64> {
    let field = c.field();
    if field.is_constant() && field.mean_coefficient() > 0.0 {
        return Ok(field.mean_coefficient());
    }
    let samples = field.sample(QUADRATURE_POINTS);
    let mut acc = 0.0;
    for (j, v) in samples.iter().enumerate() {
        if !(*v > 0.0) {
            return Err(Error::InvalidInput(format!(
                "harmonic mean needs a positive coefficient; value {v} at y = {}",
                j as f64 / QUADRATURE_POINTS as f64
            )));
        }
        acc += 1.0 / v;
    }
    Ok(QUADRATURE_POINTS as f64 / acc)
}

/// `g(s) = int_0^1 f(y, s) dy`.
pub fn aggregate_g(r: &ReactionModel, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::InvalidInput(format!("g(s) needs s >= 0, got {s}")));
    }
    Ok(r.g_unchecked(s))
}

/// The unique positive zero `p0` of `g`.
pub fn find_p0(r: &ReactionModel) -> Result<f64> {
    let m = r.saturation();
    let upper = 2.0 * m;
    let g0 = r.g_prime_unchecked(0.0);
    let tol = 1e-12 * (g0.abs() * m).max(1.0);
    if let Some(s0) = r.common_zero() {
        if s0 > 0.0 && r.g_unchecked(s0).abs() <= tol && r.g_unchecked(0.5 * s0) > 0.0 {
            return Ok(s0);
        }
    }

    // geometric scan from a tiny positive s up to 2M
    let steps = 400;
    let start = 1e-9 * m;
    let ratio = (upper / start).powf(1.0 / steps as f64);
    let mut lo = start;
    let mut g_lo = r.g_unchecked(lo);
    if !(g_lo > 0.0) {
        return Err(Error::NoPositiveZero { upper });
    }
    let mut bracket = None;
    for k in 1..=steps {
        let s = if k == steps {
            upper
        } else {
            start * ratio.powi(k as i32)
        };
        let gs = r.g_unchecked(s);
        if gs <= 0.0 {
            bracket = Some((lo, s, g_lo, gs));
            break;
        }
        lo = s;
        g_lo = gs;
    }
    let (mut a, mut b, mut ga, mut gb) = bracket.ok_or(Error::NoPositiveZero { upper })?;
    if gb == 0.0 {
        return Ok(b);
    }
    // Illinois regula falsi, falling back to bisection when it stalls
    let mut side = 0i8;
    for _ in 0..300 {
        let mut x = (a * gb - b * ga) / (gb - ga);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let gx = r.g_unchecked(x);
        if gx.abs() <= tol || b - a <= 4.0 * f64::EPSILON * b {
            return Ok(x);
        }
        if gx > 0.0 {
            a = x;
            ga = gx;
            if side == 1 {
                gb *= 0.5;
            }
            side = 1;
        } else {
            b = x;
            gb = gx;
            if side == -1 {
                ga *= 0.5;
            }
            side = -1;
        }
    }
    Ok(0.5 * (a + b))
}

/// The sampled hypotheses on `a` and `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// `0 < alpha1 <= a(y) <= alpha2`.
    DiffusionBounds,
    /// `f(y, 0) = 0`.
    ZeroAtOrigin,
    /// `f(y, s) <= 0` for `s` in `[M, 2M]`.
    Saturation,
    /// `f(y, s) >= 0` for `s` in `(0, M)`; only the front results need it.
    Positivity,
    /// `s -> f(y, s) / s` strictly decreasing.
    KppMonotone,
    /// `<mu>_A > 0`.
    PositiveMeanGrowth,
    /// stored `mu(y)` matches `f(y, eps) / eps`.
    GrowthRateConsistency,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 7] = [
        Hypothesis::DiffusionBounds,
        Hypothesis::ZeroAtOrigin,
        Hypothesis::Saturation,
        Hypothesis::Positivity,
        Hypothesis::KppMonotone,
        Hypothesis::PositiveMeanGrowth,
        Hypothesis::GrowthRateConsistency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::DiffusionBounds => "diffusion-bounds",
            Hypothesis::ZeroAtOrigin => "zero-at-origin",
            Hypothesis::Saturation => "saturation",
            Hypothesis::Positivity => "positivity",
            Hypothesis::KppMonotone => "kpp-monotone",
            Hypothesis::PositiveMeanGrowth => "positive-mean-growth",
            Hypothesis::GrowthRateConsistency => "growth-rate-consistency",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Hypothesis::DiffusionBounds => "0 < alpha1 <= a(y) <= alpha2",
            Hypothesis::ZeroAtOrigin => "f(y,0) = 0",
            Hypothesis::Saturation => "f(y,s) <= 0 for s >= M",
            Hypothesis::Positivity => "f(y,s) >= 0 for 0 < s < M",
            Hypothesis::KppMonotone => "f(y,s)/s decreasing in s",
            Hypothesis::PositiveMeanGrowth => "<mu>_A > 0",
            Hypothesis::GrowthRateConsistency => "mu(y) = lim f(y,s)/s",
        }
    }

    /// Needed only for travelling fronts, not for the stationary-state results.
    pub fn fronts_only(self) -> bool {
        matches!(self, Hypothesis::Positivity)
    }
}

/// Sample point at which a hypothesis failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub y: Option<f64>,
    pub s: Option<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub violation: Option<Violation>,
}

impl HypothesisCheck {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub checks: Vec<HypothesisCheck>,
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(HypothesisCheck::passed)
    }

    /// Everything except the front-only hypotheses.
    pub fn stationary_passed(&self) -> bool {
        self.checks
            .iter()
            .all(|c| c.passed() || c.hypothesis.fronts_only())
    }

    pub fn passed(&self, h: Hypothesis) -> bool {
        self.checks
            .iter()
            .find(|c| c.hypothesis == h)
            .is_some_and(HypothesisCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &HypothesisCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for HypothesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let h = c.hypothesis;
            match &c.violation {
                None => writeln!(f, "  pass  {:<24} {}", h.name(), h.statement())?,
                Some(v) => {
                    write!(f, "  FAIL  {:<24} {}", h.name(), h.statement())?;
                    if let Some(y) = v.y {
                        write!(f, " at y = {y}")?;
                    }
                    if let Some(s) = v.s {
                        write!(f, ", s = {s}")?;
                    }
                    writeln!(f, " (value {:e})", v.value)?;
                }
            }
        }
        Ok(())
    }
}

/// Geometric ladder `0 < s_1 < ... < s_m = 2M`.
fn s_ladder(m: f64) -> Vec<f64> {
    let top = 2.0 * m;
    let bottom = 1e-6 * top;
    (0..LADDER_POINTS)
        .map(|k| bottom * (top / bottom).powf(k as f64 / (LADDER_POINTS - 1) as f64))
        .collect()
}

/// Checks every hypothesis on the validation grid and the `s` ladder.
pub fn validate_hypotheses(a: &PeriodicCoefficient, r: &ReactionModel) -> HypothesisReport {
    let ys: Vec<f64> = (0..VALIDATION_POINTS)
        .map(|j| j as f64 / VALIDATION_POINTS as f64)
        .collect();
    let m = r.saturation();
    let ladder = s_ladder(m);
    let saturation_samples: Vec<f64> = (0..=16).map(|k| m * (1.0 + k as f64 / 16.0)).collect();

    let zero_at_origin = ys.iter().find_map(|&y| {
        let v = r.value(y, 0.0);
        (v.abs() > 1e-14).then_some(Violation {
            y: Some(y),
            s: Some(0.0),
            value: v,
        })
    });

    let saturation = ys.iter().find_map(|&y| {
        saturation_samples
            .iter()
            .chain(ladder.iter().filter(|s| **s >= m))
            .find_map(|&s| {
                let v = r.value(y, s);
                (v > 0.0).then_some(Violation {
                    y: Some(y),
                    s: Some(s),
                    value: v,
                })
            })
    });

    let positivity = ys.iter().find_map(|&y| {
        ladder.iter().filter(|s| **s < m).find_map(|&s| {
            let v = r.value(y, s);
            (v < 0.0).then_some(Violation {
                y: Some(y),
                s: Some(s),
                value: v,
            })
        })
    });

    let kpp_monotone = ys.iter().find_map(|&y| {
        let ratios: Vec<f64> = ladder.iter().map(|&s| r.value(y, s) / s).collect();
        ratios.windows(2).zip(&ladder[1..]).find_map(|(w, &s)| {
            (w[1] >= w[0]).then_some(Violation {
                y: Some(y),
                s: Some(s),
                value: w[1] - w[0],
            })
        })
    });

    let mean_mu = arithmetic_mean(r.mu());
    let positive_mean_growth = (!(mean_mu > 0.0)).then_some(Violation {
        y: None,
        s: None,
        value: mean_mu,
    });

    let eps = 1e-8;
    let mu_scale = ys
        .iter()
        .map(|&y| r.mu().value(y).abs())
        .fold(0.0, f64::max);
    let growth_rate = ys.iter().find_map(|&y| {
        let mu = r.mu().value(y);
        let slope = r.value(y, eps) / eps;
        let tol = 1e-5 * mu.abs().max(mu_scale).max(f64::MIN_POSITIVE);
        ((slope - mu).abs() > tol).then_some(Violation {
            y: Some(y),
            s: Some(eps),
            value: slope - mu,
        })
    });

    let violations = [
        a.bound_violation(),
        zero_at_origin,
        saturation,
        positivity,
        kpp_monotone,
        positive_mean_growth,
        growth_rate,
    ];
    HypothesisReport {
        checks: Hypothesis::ALL
            .iter()
            .zip(violations)
            .map(|(&hypothesis, violation)| HypothesisCheck {
                hypothesis,
                violation,
            })
            .collect(),
    }
}
