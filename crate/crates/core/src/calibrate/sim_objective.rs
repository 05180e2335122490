use super::validate::MomentSampler;
use super::{CalibrationError, CalibrationTheta, Objective};
use crate::sim::{run, SimConfig};
use crate::stylized::{
    distance_vectors, moment_vector, resample_returns, DistanceWeights, MomentVector,
};

/// Simulator-backed calibration objective: runs one day at the given
/// parameter vector and returns the stylised-facts distance to the
/// reference moments.
pub struct SimDistanceObjective {
    pub base_config: SimConfig,
    pub reference_moments: MomentVector,
    pub weights: DistanceWeights,
}

impl SimDistanceObjective {
    fn run_moments(&self, theta: &CalibrationTheta, seed: u64) -> Result<MomentVector, CalibrationError> {
        let mut config = self.base_config.with_theta(theta);
        config.seed = seed;
        let record = run(&config).map_err(|e| CalibrationError::Eval(e.to_string()))?;
        let returns = resample_returns(
            &record.mid,
            config.warmup_steps,
            config.steps_per_second(),
        )
        .map_err(|e| CalibrationError::Eval(e.to_string()))?;
        moment_vector(&returns).map_err(|e| CalibrationError::Eval(e.to_string()))
    }
}

impl Objective for SimDistanceObjective {
    fn eval(&self, theta: &CalibrationTheta, seed: u64) -> Result<f64, CalibrationError> {
        let moments = self.run_moments(theta, seed)?;
        Ok(distance_vectors(&moments, &self.reference_moments, &self.weights))
    }
}

/// Simulator-backed moment sampler at a fixed (calibrated) parameter
/// vector, for the validation tests.
pub struct SimMomentSampler {
    /// Configuration with the calibrated parameters already applied.
    pub config: SimConfig,
}

impl MomentSampler for SimMomentSampler {
    fn sample(&self, seed: u64) -> Result<MomentVector, CalibrationError> {
        let mut config = self.config.clone();
        config.seed = seed;
        let record = run(&config).map_err(|e| CalibrationError::Eval(e.to_string()))?;
        let returns = resample_returns(
            &record.mid,
            config.warmup_steps,
            config.steps_per_second(),
        )
        .map_err(|e| CalibrationError::Eval(e.to_string()))?;
        moment_vector(&returns).map_err(|e| CalibrationError::Eval(e.to_string()))
    }
}
