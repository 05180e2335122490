//! Flash crash and mini flash crash experiment harnesses.

mod crash;
mod mini;
mod sweep;

pub use crash::{crash_metrics, run_flash_crash_scenario, CrashMetrics};
pub use mini::{
    detect_mini_crashes, local_extrema, minute_return_sigma, peak_prominences, MiniCrashEvent,
    MiniCrashKind, MiniCrashParams,
};
pub use sweep::{quantile, spearman_rho, sweep, PointStats, SweepMode, SweepParam, SweepPoint, SweepResult};

use std::fmt;

#[derive(Debug, Clone)]
pub enum ScenarioError {
    /// The scenario requires an agent population the config lacks.
    MissingAgent(&'static str),
    ZeroSigma,
    Sim(String),
    Stats(crate::stylized::StatsError),
    EmptyGrid,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::MissingAgent(who) => {
                write!(f, "scenario requires {who} in the configuration")
            }
            ScenarioError::ZeroSigma => write!(f, "minute-level return deviation is zero"),
            ScenarioError::Sim(msg) => write!(f, "simulation failed: {msg}"),
            ScenarioError::Stats(e) => write!(f, "{e}"),
            ScenarioError::EmptyGrid => write!(f, "sweep grid is empty"),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl From<crate::stylized::StatsError> for ScenarioError {
    fn from(e: crate::stylized::StatsError) -> ScenarioError {
        ScenarioError::Stats(e)
    }
}
