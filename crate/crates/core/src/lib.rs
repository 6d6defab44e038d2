//! Pulsating fronts and stationary states of the 1-D periodic Fisher-KPP
//! equation `u_t = (a(x/L) u_x)_x + f(x/L, u)`, and their homogenized limit
//! as the period `L` shrinks.
//!
//! Modules, bottom up: [`coefficients`] (periodic fields, reaction term,
//! homogenized means and hypothesis checks), [`discretization`] (cell
//! operators), [`spectral`] (principal eigenvalues `rho_{1,L}` and
//! `k(lambda, L)`), [`speed`] (minimal speeds), [`steady`] (stationary states
//! and the homogenized front), [`propagation`] (time-dependent simulation and
//! its measurements) and [`io`] (tables).

pub mod coefficients;
pub mod discretization;
pub mod error;
pub mod io;
pub mod linalg;
pub mod preset;
pub mod propagation;
pub mod scalar;
pub mod spectral;
pub mod speed;
pub mod steady;

pub use coefficients::{
    validate_hypotheses, HypothesisReport, MeanSet, PeriodicCoefficient, PeriodicField,
    ReactionModel,
};
pub use discretization::PeriodicGrid;
pub use error::{Error, Result};
pub use preset::Preset;
