//! Return-series stylised facts: summary moments and the weighted
//! distance used as the calibration loss.

mod bootstrap;
mod distance;
mod moments;
mod returns;

pub use bootstrap::{
    block_bootstrap_resample, bootstrap_weights, CoverageStat, DistanceWeights,
    DEFAULT_BLOCK_SIZE, DEFAULT_N_BOOT, DISTANCE_TERMS,
};
pub use distance::{distance, distance_components, distance_vectors, weighted_distance};
pub use moments::{
    acf, hill_estimator, moment_vector, MomentVector, COVERAGE_MOMENTS, HILL_TAIL_FRACTION,
    RETURN_ACF_LAGS, SQUARED_ACF_LAGS,
};
pub use returns::{per_second_mids, resample_returns, ReturnSeries};

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum StatsError {
    Empty,
    TooShort { len: usize, need: usize },
    AllMidsAbsent,
    ZeroVariance,
    InsufficientTail { have: usize, need: usize },
    DegenerateMoment { moment: &'static str },
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::Empty => write!(f, "empty series"),
            StatsError::TooShort { len, need } => {
                write!(f, "series of length {len} is too short, need {need}")
            }
            StatsError::AllMidsAbsent => write!(f, "no valid mid-price in the whole session"),
            StatsError::ZeroVariance => write!(f, "series has zero variance"),
            StatsError::InsufficientTail { have, need } => {
                write!(f, "tail has {have} usable observations, need {need}")
            }
            StatsError::DegenerateMoment { moment } => {
                write!(f, "bootstrap variance of moment `{moment}` is degenerate")
            }
        }
    }
}

impl std::error::Error for StatsError {}
