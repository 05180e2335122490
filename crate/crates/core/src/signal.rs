//! Fundamental value extraction from observed prices.
//!
//! The fundamental value is modelled as the hidden state of a scalar
//! local-level system: the state follows a random walk and observations
//! add white noise. Process and observation variances are fit by
//! expectation-maximization, then a forward filter plus backward (RTS)
//! smoothing pass produces the state mean series.

use std::fmt;

/// How a fundamental series was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesSource {
    Historical,
    Synthetic,
}

/// A per-second fundamental value series.
#[derive(Debug, Clone)]
pub struct FundamentalSeries {
    pub values: Vec<f64>,
    pub source: SeriesSource,
}

impl FundamentalSeries {
    /// Step-expand to simulation resolution (piecewise-constant hold
    /// within each second).
    pub fn to_steps(&self, steps_per_second: u32) -> Vec<f64> {
        expand_to_steps(&self.values, steps_per_second)
    }
}

/// Result of the smoother fit.
#[derive(Debug, Clone)]
pub struct KalmanFit {
    /// Smoothed state mean per observation.
    pub smoothed: Vec<f64>,
    /// Fitted process (state random walk) variance.
    pub process_var: f64,
    /// Fitted observation noise variance.
    pub obs_var: f64,
    /// Log-likelihood after each EM iteration.
    pub loglik_path: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SignalError {
    TooShort { len: usize, min: usize },
    NonFinite { index: usize },
}

impl fmt::Display for SignalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalError::TooShort { len, min } => {
                write!(f, "series has {len} observations, need at least {min}")
            }
            SignalError::NonFinite { index } => {
                write!(f, "non-finite observation at index {index}")
            }
        }
    }
}

impl std::error::Error for SignalError {}

const MIN_OBSERVATIONS: usize = 100;
const MAX_EM_ITERATIONS: usize = 50;
const EM_RELATIVE_TOLERANCE: f64 = 1e-6;

/// Extract the hidden fundamental value from an observed per-second
/// price series.
pub fn kalman_smooth(observed: &[f64]) -> Result<KalmanFit, SignalError> {
    if observed.len() < MIN_OBSERVATIONS {
        return Err(SignalError::TooShort {
            len: observed.len(),
            min: MIN_OBSERVATIONS,
        });
    }
    if let Some(index) = observed.iter().position(|v| !v.is_finite()) {
        return Err(SignalError::NonFinite { index });
    }

    let n = observed.len();
    let diff_var = variance(observed.windows(2).map(|w| w[1] - w[0]));
    if diff_var == 0.0 {
        // Constant input is its own fixed point.
        return Ok(KalmanFit {
            smoothed: observed.to_vec(),
            process_var: 0.0,
            obs_var: 0.0,
            loglik_path: Vec::new(),
        });
    }
    let floor = 1e-12 * diff_var;

    let mut obs_var = diff_var;
    let mut process_var = 0.1 * diff_var;
    let mut prior_mean = observed[0];
    let mut prior_var = diff_var;

    let mut filt_mean = vec![0.0; n];
    let mut filt_var = vec![0.0; n];
    let mut pred_mean = vec![0.0; n];
    let mut pred_var = vec![0.0; n];
    let mut smooth_mean = vec![0.0; n];
    let mut smooth_var = vec![0.0; n];
    let mut gain = vec![0.0; n];

    let mut loglik_path = Vec::new();
    let mut prev_ll = f64::NEG_INFINITY;

    for _ in 0..MAX_EM_ITERATIONS {
        // Forward filter.
        let mut ll = 0.0;
        for t in 0..n {
            let (pm, pv) = if t == 0 {
                (prior_mean, prior_var)
            } else {
                (filt_mean[t - 1], filt_var[t - 1] + process_var)
            };
            pred_mean[t] = pm;
            pred_var[t] = pv;
            let innovation = observed[t] - pm;
            let s = pv + obs_var;
            let k = pv / s;
            filt_mean[t] = pm + k * innovation;
            filt_var[t] = (1.0 - k) * pv;
            ll += -0.5 * ((2.0 * std::f64::consts::PI).ln() + s.ln() + innovation * innovation / s);
        }
        loglik_path.push(ll);

        // Backward (RTS) smoothing.
        smooth_mean[n - 1] = filt_mean[n - 1];
        smooth_var[n - 1] = filt_var[n - 1];
        for t in (0..n - 1).rev() {
            let j = filt_var[t] / pred_var[t + 1];
            gain[t] = j;
            smooth_mean[t] = filt_mean[t] + j * (smooth_mean[t + 1] - pred_mean[t + 1]);
            smooth_var[t] = filt_var[t] + j * j * (smooth_var[t + 1] - pred_var[t + 1]);
        }

        // M-step: closed-form variance updates from smoothed moments.
        let mut q_sum = 0.0;
        for t in 1..n {
            let cross = gain[t - 1] * smooth_var[t];
            let dm = smooth_mean[t] - smooth_mean[t - 1];
            q_sum += dm * dm + smooth_var[t] + smooth_var[t - 1] - 2.0 * cross;
        }
        process_var = (q_sum / (n - 1) as f64).max(floor);

        let mut r_sum = 0.0;
        for t in 0..n {
            let e = observed[t] - smooth_mean[t];
            r_sum += e * e + smooth_var[t];
        }
        obs_var = (r_sum / n as f64).max(floor);

        prior_mean = smooth_mean[0];
        prior_var = smooth_var[0].max(floor);

        if (ll - prev_ll).abs() < EM_RELATIVE_TOLERANCE * (1.0 + ll.abs()) {
            break;
        }
        prev_ll = ll;
    }

    Ok(KalmanFit {
        smoothed: smooth_mean,
        process_var,
        obs_var,
        loglik_path,
    })
}

/// Piecewise-constant hold of a per-second series at step resolution.
pub fn expand_to_steps(values: &[f64], steps_per_second: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len() * steps_per_second as usize);
    for &v in values {
        for _ in 0..steps_per_second {
            out.push(v);
        }
    }
    out
}

/// Last-value subsampling, the inverse of [`expand_to_steps`].
pub fn subsample_seconds(steps: &[f64], steps_per_second: u32) -> Vec<f64> {
    steps
        .chunks(steps_per_second as usize)
        .filter(|c| c.len() == steps_per_second as usize)
        .map(|c| c[c.len() - 1])
        .collect()
}

fn variance(values: impl Iterator<Item = f64>) -> f64 {
    let collected: Vec<f64> = values.collect();
    let n = collected.len();
    if n < 2 {
        return 0.0;
    }
    let mean = collected.iter().sum::<f64>() / n as f64;
    collected.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;
    use rand_distr::{Distribution, Normal};

    fn sample_var(values: &[f64]) -> f64 {
        variance(values.iter().copied())
    }

    #[test]
    fn constant_series_is_a_fixed_point() {
        let series = vec![1234.5; 500];
        let fit = kalman_smooth(&series).unwrap();
        assert_eq!(fit.smoothed, series);
    }

    #[test]
    fn rejects_short_and_non_finite_input() {
        assert!(matches!(
            kalman_smooth(&[1.0; 10]),
            Err(SignalError::TooShort { .. })
        ));
        let mut series = vec![1.0; 200];
        series[3] = f64::NAN;
        assert!(matches!(
            kalman_smooth(&series),
            Err(SignalError::NonFinite { index: 3 })
        ));
    }

    #[test]
    fn smoothing_a_noisy_ramp_reduces_rmse() {
        let mut rng = stream_rng(100, 0);
        let noise = Normal::new(0.0, 2.0).unwrap();
        let truth: Vec<f64> = (0..2000).map(|t| 1000.0 + 0.05 * t as f64).collect();
        let observed: Vec<f64> = truth.iter().map(|v| v + noise.sample(&mut rng)).collect();
        let fit = kalman_smooth(&observed).unwrap();
        let rmse = |xs: &[f64]| {
            (xs.iter()
                .zip(&truth)
                .map(|(x, t)| (x - t) * (x - t))
                .sum::<f64>()
                / truth.len() as f64)
                .sqrt()
        };
        assert!(rmse(&fit.smoothed) < rmse(&observed));
    }

    #[test]
    fn shift_equivariance() {
        let mut rng = stream_rng(101, 0);
        let observed: Vec<f64> = (0..300)
            .map(|t| 50.0 + (t as f64 * 0.1).sin() + rng.random::<f64>())
            .collect();
        let shifted: Vec<f64> = observed.iter().map(|v| v + 5.0).collect();
        let a = kalman_smooth(&observed).unwrap();
        let b = kalman_smooth(&shifted).unwrap();
        for (x, y) in a.smoothed.iter().zip(&b.smoothed) {
            assert!((y - x - 5.0).abs() < 1e-6, "{x} vs {y}");
        }
    }

    #[test]
    fn loglik_is_nondecreasing_and_variance_shrinks() {
        let mut rng = stream_rng(102, 0);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let mut level = 100.0f64;
        let observed: Vec<f64> = (0..1500)
            .map(|_| {
                level += 0.2 * noise.sample(&mut rng);
                level + noise.sample(&mut rng)
            })
            .collect();
        let fit = kalman_smooth(&observed).unwrap();
        for w in fit.loglik_path.windows(2) {
            assert!(w[1] >= w[0] - 1e-7, "log-likelihood decreased: {w:?}");
        }
        assert!(sample_var(&fit.smoothed) <= sample_var(&observed));
    }

    #[test]
    fn expansion_holds_values_and_round_trips() {
        let expanded = expand_to_steps(&[1.0, 2.0], 10);
        assert_eq!(expanded.len(), 20);
        assert!(expanded[..10].iter().all(|&v| v == 1.0));
        assert!(expanded[10..].iter().all(|&v| v == 2.0));

        let original = vec![3.0, 1.0, 4.0, 1.0, 5.0];
        assert_eq!(
            subsample_seconds(&expand_to_steps(&original, 10), 10),
            original
        );
    }
}
