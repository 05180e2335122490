use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CalibrationError;
use crate::rng::mix_seed;
use crate::stylized::{
    distance_vectors, moment_vector, DistanceWeights, MomentVector, ReturnSeries, COVERAGE_MOMENTS,
};

/// Provides moment vectors of independent simulated days at a fixed
/// parameter vector.
pub trait MomentSampler: Sync {
    fn sample(&self, seed: u64) -> Result<MomentVector, CalibrationError>;
}

impl<F> MomentSampler for F
where
    F: Fn(u64) -> Result<MomentVector, CalibrationError> + Sync,
{
    fn sample(&self, seed: u64) -> Result<MomentVector, CalibrationError> {
        self(seed)
    }
}

const MIN_SAMPLES: usize = 20;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PValueReport {
    /// Fraction of simulated distances at or below the bootstrap
    /// critical value; small values reject the calibrated model.
    pub p_value: f64,
    /// 95th percentile of the bootstrap distance distribution.
    pub d_critical: f64,
    pub bootstrap_d: Vec<f64>,
    pub simulated_d: Vec<f64>,
}

/// Moment-specific statistical test of a calibrated model.
///
/// The bootstrap distance distribution stands in for sampling noise of
/// the reference data; its 95th percentile is the critical value. The
/// reported p-value is the percentile rank of that critical value
/// within the simulated distance distribution.
pub fn p_value_test<S: MomentSampler + ?Sized>(
    sampler: &S,
    hist: &ReturnSeries,
    weights: &DistanceWeights,
    n_samples: usize,
    seed: u64,
) -> Result<PValueReport, CalibrationError> {
    if n_samples < MIN_SAMPLES {
        return Err(CalibrationError::TooFewSamples {
            have: n_samples,
            need: MIN_SAMPLES,
        });
    }
    let mut bootstrap_d = weights
        .bootstrap_distances(hist)
        .map_err(|e| CalibrationError::Eval(e.to_string()))?;
    let hist_moments = moment_vector(hist).map_err(|e| CalibrationError::Eval(e.to_string()))?;

    let simulated = sample_moments(sampler, n_samples, seed)?;
    let simulated_d: Vec<f64> = simulated
        .iter()
        .map(|mv| distance_vectors(mv, &hist_moments, weights))
        .collect();

    bootstrap_d.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    let rank = ((0.95 * bootstrap_d.len() as f64).ceil() as usize).clamp(1, bootstrap_d.len());
    let d_critical = bootstrap_d[rank - 1];
    let below = simulated_d.iter().filter(|&&d| d <= d_critical).count();
    Ok(PValueReport {
        p_value: below as f64 / n_samples as f64,
        d_critical,
        bootstrap_d,
        simulated_d,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentCoverage {
    pub names: Vec<String>,
    /// Fraction of runs whose moment landed inside the 95% confidence
    /// interval of the empirical moment.
    pub ratios: [f64; 9],
    /// The confidence intervals themselves.
    pub intervals: [(f64, f64); 9],
    pub n_runs: usize,
}

/// Per-moment coverage ratios over independent simulation runs. The
/// confidence interval of each empirical moment is +-1.96 bootstrap
/// standard deviations around its value.
pub fn moment_coverage<S: MomentSampler + ?Sized>(
    sampler: &S,
    weights: &DistanceWeights,
    n_runs: usize,
    seed: u64,
) -> Result<MomentCoverage, CalibrationError> {
    if n_runs == 0 {
        return Err(CalibrationError::TooFewSamples { have: 0, need: 1 });
    }
    let mut intervals = [(0.0, 0.0); 9];
    for (m, stat) in weights.coverage.iter().enumerate() {
        if stat.sigma <= 0.0 || !stat.sigma.is_finite() {
            return Err(CalibrationError::DegenerateMoment {
                moment: COVERAGE_MOMENTS[m],
            });
        }
        intervals[m] = (stat.value - 1.96 * stat.sigma, stat.value + 1.96 * stat.sigma);
    }

    let samples = sample_moments(sampler, n_runs, seed)?;
    let mut ratios = [0.0; 9];
    for mv in &samples {
        let cov = mv.coverage_moments();
        for m in 0..9 {
            if cov[m] >= intervals[m].0 && cov[m] <= intervals[m].1 {
                ratios[m] += 1.0;
            }
        }
    }
    for r in &mut ratios {
        *r /= n_runs as f64;
    }
    Ok(MomentCoverage {
        names: COVERAGE_MOMENTS.iter().map(|s| s.to_string()).collect(),
        ratios,
        intervals,
        n_runs,
    })
}

/// Combined validation output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub p_value: PValueReport,
    pub coverage: MomentCoverage,
}

fn sample_moments<S: MomentSampler + ?Sized>(
    sampler: &S,
    n: usize,
    seed: u64,
) -> Result<Vec<MomentVector>, CalibrationError> {
    (0..n)
        .into_par_iter()
        .map(|i| sampler.sample(mix_seed(seed, 0xc0ffee + i as u64)))
        .collect()
}
