//! Behavioural parameter calibration and validation.
//!
//! The calibrated vector covers the seven parameters the simulated
//! stylised facts are most sensitive to. [`surrogate_search`] explores
//! the space with a gradient-boosted-tree surrogate over simulator
//! evaluations, [`grid_refine`] polishes the incumbent, and the
//! validation half checks the calibrated model with a bootstrap
//! p-value test and per-moment coverage ratios.

mod gbrt;
mod search;
mod sim_objective;
mod space;
mod validate;

pub use gbrt::{Gbrt, GbrtConfig};
pub use search::{
    grid_refine, surrogate_search, CalibrationReport, EvalRow, GridMode, Objective, SearchConfig,
};
pub use sim_objective::{SimDistanceObjective, SimMomentSampler};
pub use space::{halton_point, CalibrationSpace, CalibrationTheta, CALIBRATED_PARAMS};
pub use validate::{
    moment_coverage, p_value_test, MomentCoverage, MomentSampler, PValueReport, ValidationReport,
};

use std::fmt;

#[derive(Debug, Clone)]
pub enum CalibrationError {
    /// Simulator or statistics failure while evaluating a point.
    Eval(String),
    EmptyBudget,
    TooFewSamples { have: usize, need: usize },
    DegenerateMoment { moment: &'static str },
}

impl fmt::Display for CalibrationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CalibrationError::Eval(msg) => write!(f, "objective evaluation failed: {msg}"),
            CalibrationError::EmptyBudget => write!(f, "evaluation budget is zero"),
            CalibrationError::TooFewSamples { have, need } => {
                write!(f, "{have} Monte Carlo samples requested, need at least {need}")
            }
            CalibrationError::DegenerateMoment { moment } => {
                write!(f, "coverage moment `{moment}` has zero bootstrap deviation")
            }
        }
    }
}

impl std::error::Error for CalibrationError {}
