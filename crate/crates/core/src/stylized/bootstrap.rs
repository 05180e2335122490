use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::distance::distance_components;
use super::moments::{moment_vector, MomentVector};
use super::returns::ReturnSeries;
use super::StatsError;
use crate::rng::stream_rng;

/// Default block length in seconds, well above the longest (90 s)
/// autocorrelation lag so block re-ordering barely disturbs the ACF.
pub const DEFAULT_BLOCK_SIZE: usize = 1800;

/// Default number of bootstrap resamples.
pub const DEFAULT_N_BOOT: usize = 60;

/// Bootstrap summary of one coverage moment: its empirical value on
/// the original series and the sampling standard deviation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CoverageStat {
    pub value: f64,
    pub sigma: f64,
}

/// Distance weights `w_i = 1 / sigma_i^2`, estimated by block
/// bootstrap, plus the per-moment statistics reused for validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceWeights {
    pub weights: [f64; 4],
    /// Bootstrap sampling variance of each differential quantity.
    pub sigma2: [f64; 4],
    pub block_size: usize,
    pub n_boot: usize,
    /// Seed of the resample streams; reusing it reproduces the exact
    /// resamples (and therefore the bootstrap distance distribution).
    pub seed: u64,
    /// Empirical value and bootstrap deviation of the nine coverage
    /// moments.
    pub coverage: [CoverageStat; 9],
}

/// One circular block-bootstrap resample. Blocks start at multiples of
/// `block_size` (non-overlapping starts) and wrap around the end of
/// the series; the output has the length of the input.
pub fn block_bootstrap_resample(series: &[f64], block_size: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = series.len();
    let n_starts = n / block_size;
    debug_assert!(n_starts >= 2, "caller validates series length");
    let mut out = Vec::with_capacity(n + block_size);
    while out.len() < n {
        let start = rng.random_range(0..n_starts) * block_size;
        for i in 0..block_size {
            out.push(series[(start + i) % n]);
        }
    }
    out.truncate(n);
    out
}

/// Estimate the four distance weights (and the coverage moment
/// statistics) from a reference return series.
pub fn bootstrap_weights(
    hist: &ReturnSeries,
    block_size: usize,
    n_boot: usize,
    seed: u64,
) -> Result<DistanceWeights, StatsError> {
    let series = hist.as_slice();
    if series.len() < 2 * block_size {
        return Err(StatsError::TooShort {
            len: series.len(),
            need: 2 * block_size,
        });
    }
    let original = moment_vector(hist)?;
    let resampled = resampled_moments(series, &original, block_size, n_boot, seed)?;

    let mut sigma2 = [0.0; 4];
    for i in 0..4 {
        let deltas: Vec<f64> = resampled.iter().map(|(c, _)| c[i]).collect();
        sigma2[i] = sample_variance(&deltas);
        if sigma2[i] <= 0.0 || !sigma2[i].is_finite() {
            let moment = ["hill", "volatility", "return_acf", "squared_return_acf"][i];
            return Err(StatsError::DegenerateMoment { moment });
        }
    }

    let original_cov = original.coverage_moments();
    let mut coverage = [CoverageStat::default(); 9];
    for m in 0..9 {
        let values: Vec<f64> = resampled.iter().map(|(_, cov)| cov[m]).collect();
        coverage[m] = CoverageStat {
            value: original_cov[m],
            sigma: sample_variance(&values).sqrt(),
        };
    }

    Ok(DistanceWeights {
        weights: sigma2.map(|s| 1.0 / s),
        sigma2,
        block_size,
        n_boot,
        seed,
        coverage,
    })
}

impl DistanceWeights {
    /// Distance of every bootstrap resample from the original series,
    /// using these weights. Reproduces the exact resamples that the
    /// weights were estimated from.
    pub fn bootstrap_distances(&self, hist: &ReturnSeries) -> Result<Vec<f64>, StatsError> {
        let original = moment_vector(hist)?;
        let resampled = resampled_moments(
            hist.as_slice(),
            &original,
            self.block_size,
            self.n_boot,
            self.seed,
        )?;
        Ok(resampled
            .iter()
            .map(|(components, _)| {
                components
                    .iter()
                    .zip(&self.weights)
                    .map(|(c, w)| c * w)
                    .sum()
            })
            .collect())
    }
}

/// Distance components and coverage moments of each resample against
/// the original.
fn resampled_moments(
    series: &[f64],
    original: &MomentVector,
    block_size: usize,
    n_boot: usize,
    seed: u64,
) -> Result<Vec<([f64; 4], [f64; 9])>, StatsError> {
    (0..n_boot)
        .map(|b| {
            let mut rng = stream_rng(seed, b as u64);
            let resample = ReturnSeries(block_bootstrap_resample(series, block_size, &mut rng));
            let mv = moment_vector(&resample)?;
            Ok((distance_components(&mv, original), mv.coverage_moments()))
        })
        .collect()
}

fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
}

/// Names of the four weighted distance terms, aligned with
/// [`DistanceWeights::weights`].
pub const DISTANCE_TERMS: [&str; 4] = ["hill", "volatility", "return_acf", "squared_return_acf"];
