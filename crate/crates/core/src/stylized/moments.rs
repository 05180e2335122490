use serde::{Deserialize, Serialize};

use super::returns::ReturnSeries;
use super::StatsError;

/// Return autocorrelation lags entering the distance: lags 30, 60 and
/// 90, each smoothed by the three-lag average.
pub const RETURN_ACF_LAGS: [usize; 9] = [30, 31, 32, 60, 61, 62, 90, 91, 92];

/// Squared-return autocorrelation lags: lags 1, 30, 60, 90, three-lag
/// averaged.
pub const SQUARED_ACF_LAGS: [usize; 12] = [1, 2, 3, 30, 31, 32, 60, 61, 62, 90, 91, 92];

/// Fraction of the largest absolute returns entering the tail index.
pub const HILL_TAIL_FRACTION: f64 = 0.05;

const MIN_TAIL_OBSERVATIONS: usize = 20;

/// Names of the nine coverage moments, in report order.
pub const COVERAGE_MOMENTS: [&str; 9] = [
    "hill_inverse",
    "volatility",
    "return_acf_30",
    "return_acf_60",
    "return_acf_90",
    "squared_acf_1",
    "squared_acf_30",
    "squared_acf_60",
    "squared_acf_90",
];

/// Summary moments of a return series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    /// Hill tail estimate of the absolute returns (mean log-excess
    /// form: the reciprocal of the tail index).
    pub hill: f64,
    /// Sample standard deviation of the returns.
    pub volatility: f64,
    /// Return autocorrelations at [`RETURN_ACF_LAGS`].
    pub acf_returns: [f64; 9],
    /// Squared-return autocorrelations at [`SQUARED_ACF_LAGS`].
    pub acf_squared: [f64; 12],
}

impl MomentVector {
    /// The nine validation moments: inverse Hill, volatility, and the
    /// three-lag-averaged autocorrelation groups.
    pub fn coverage_moments(&self) -> [f64; 9] {
        let avg3 = |xs: &[f64]| (xs[0] + xs[1] + xs[2]) / 3.0;
        [
            1.0 / self.hill,
            self.volatility,
            avg3(&self.acf_returns[0..3]),
            avg3(&self.acf_returns[3..6]),
            avg3(&self.acf_returns[6..9]),
            avg3(&self.acf_squared[0..3]),
            avg3(&self.acf_squared[3..6]),
            avg3(&self.acf_squared[6..9]),
            avg3(&self.acf_squared[9..12]),
        ]
    }
}

/// Hill estimator over the top `tail_fraction` of the input magnitudes:
/// the mean of `ln(x_(i) / x_(k+1))` over the k largest observations.
pub fn hill_estimator(abs_values: &[f64], tail_fraction: f64) -> Result<f64, StatsError> {
    let n = abs_values.len();
    let k = (n as f64 * tail_fraction).floor() as usize;
    if k < MIN_TAIL_OBSERVATIONS || k + 1 > n {
        return Err(StatsError::InsufficientTail {
            have: k,
            need: MIN_TAIL_OBSERVATIONS,
        });
    }
    let mut sorted = abs_values.to_vec();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite values"));
    let threshold = sorted[k];
    if threshold <= 0.0 {
        return Err(StatsError::InsufficientTail {
            have: sorted.iter().take(k + 1).filter(|&&x| x > 0.0).count(),
            need: k + 1,
        });
    }
    let sum: f64 = sorted[..k].iter().map(|&x| (x / threshold).ln()).sum();
    Ok(sum / k as f64)
}

/// Sample autocorrelation at a lag, normalised by the global mean and
/// variance.
pub fn acf(series: &[f64], lag: usize) -> Result<f64, StatsError> {
    let n = series.len();
    if n < 2 || lag >= n / 2 {
        return Err(StatsError::TooShort {
            len: n,
            need: 2 * (lag + 1),
        });
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let denom: f64 = series.iter().map(|x| (x - mean) * (x - mean)).sum();
    if denom == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let num: f64 = series[..n - lag]
        .iter()
        .zip(&series[lag..])
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum();
    Ok(num / denom)
}

/// Sample standard deviation (ddof = 1).
pub fn std_dev(series: &[f64]) -> Result<f64, StatsError> {
    let n = series.len();
    if n < 2 {
        return Err(StatsError::TooShort { len: n, need: 2 });
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let var = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    Ok(var.sqrt())
}

/// Compute the full moment vector of a return series.
pub fn moment_vector(returns: &ReturnSeries) -> Result<MomentVector, StatsError> {
    let r = returns.as_slice();
    if r.is_empty() {
        return Err(StatsError::Empty);
    }
    let abs: Vec<f64> = r.iter().map(|x| x.abs()).collect();
    let squared: Vec<f64> = r.iter().map(|x| x * x).collect();
    let hill = hill_estimator(&abs, HILL_TAIL_FRACTION)?;
    let volatility = std_dev(r)?;
    let mut acf_returns = [0.0; 9];
    for (slot, &lag) in acf_returns.iter_mut().zip(RETURN_ACF_LAGS.iter()) {
        *slot = acf(r, lag)?;
    }
    let mut acf_squared = [0.0; 12];
    for (slot, &lag) in acf_squared.iter_mut().zip(SQUARED_ACF_LAGS.iter()) {
        *slot = acf(&squared, lag)?;
    }
    Ok(MomentVector {
        hill,
        volatility,
        acf_returns,
        acf_squared,
    })
}
