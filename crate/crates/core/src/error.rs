use thiserror::Error;

use crate::coefficients::HypothesisReport;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("hypothesis validation failed:\n{0}")]
    Hypotheses(HypothesisReport),

    #[error("preset: {0}")]
    Preset(String),

    #[error("no sign change of g on (0, {upper}]: reaction violates the KPP hypotheses")]
    NoPositiveZero { upper: f64 },

    #[error("operator is not of Perron type: off-diagonal entry {value:e} < 0 in row {row}")]
    NotPerron { row: usize, value: f64 },

    #[error("eigen-solver did not converge after {iterations} iterations (spread {spread:e})")]
    EigenNotConverged { iterations: usize, spread: f64 },

    #[error("principal eigenvector has a nonpositive entry at node {node}")]
    NonPositiveEigenvector { node: usize },

    #[error("eigen residual {residual:e} exceeds bound {bound:e}")]
    EigenResidual { residual: f64, bound: f64 },

    #[error("no bracket with an interior minimum for k(lambda)/lambda in [{lo:e}, {hi:e}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("no positive bounded stationary state: rho1 = {rho1:e} >= 0")]
    NoStationaryState { rho1: f64 },

    #[error("iterate left (0, {upper}] at node {node} (value {value:e})")]
    LeftAdmissibleRange { node: usize, value: f64, upper: f64 },

    #[error("{what} did not converge: residual {residual:e} after {iterations} iterations")]
    NotConverged {
        what: &'static str,
        residual: f64,
        iterations: usize,
    },

    #[error("singular linear system (pivot {pivot:e} at row {row})")]
    Singular { row: usize, pivot: f64 },

    #[error("no monotone front connection below the minimal speed: c = {c} < {c_min}")]
    NoMonotoneConnection { c: f64, c_min: f64 },

    #[error("converged front profile is not monotone at node {node}")]
    NonMonotoneProfile { node: usize },

    #[error("time step {dt} exceeds the explicit reaction bound 0.5/max|f_u| = {bound}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("simulation produced a non-finite value at t = {time}")]
    NonFinite { time: f64 },

    #[error("solution left [{lo:e}, {hi:e}] at t = {time} (value {value:e})")]
    OutOfBounds {
        time: f64,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("no propagating level set in the fit window")]
    NoPropagation,

    #[error("front came within {margin} of the domain boundary during the fit window")]
    DomainTooSmall { margin: f64 },

    #[error("fit window holds {crossings:.1} period crossings, need at least {required}")]
    ShortWindow { crossings: f64, required: usize },

    #[error(
        "linear fit residual {residual:e} exceeds 5% of the front displacement {displacement:e}"
    )]
    PoorFit { residual: f64, displacement: f64 },

    #[error("snapshot cadence {cadence:e} is not aligned with L/c = {target:e}")]
    CadenceMisaligned { cadence: f64, target: f64 },

    #[error("phase integral does not cross {target} inside the simulated span")]
    NoCrossing { target: f64 },

    #[error("requested window [{lo}, {hi}] lies outside the stored data")]
    WindowOutOfRange { lo: f64, hi: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the input (preset, hypotheses, parameters) as
    /// opposed to numerical failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::Hypotheses(_)
                | Error::Preset(_)
                | Error::StepTooLarge { .. }
                | Error::NoPositiveZero { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
