use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::crash::crash_metrics;
use super::mini::{detect_mini_crashes, MiniCrashParams};
use super::ScenarioError;
use crate::rng::mix_seed;
use crate::sim::{run, SimConfig};
use crate::stylized::per_second_mids;

/// Model parameter swept across a condition grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    /// Institutional participation rate `r`.
    InsRate,
    /// Market maker inventory limit.
    MmInventoryLimit,
    /// Fundamental trader action interval, in steps.
    FtIntervalSteps,
}

impl SweepParam {
    pub fn label(self) -> &'static str {
        match self {
            SweepParam::InsRate => "ins_rate",
            SweepParam::MmInventoryLimit => "mm_inventory_limit",
            SweepParam::FtIntervalSteps => "ft_interval_steps",
        }
    }

    fn apply(self, base: &SimConfig, value: f64) -> Result<SimConfig, ScenarioError> {
        let mut config = base.clone();
        match self {
            SweepParam::InsRate => {
                let ins = config
                    .institutional
                    .as_mut()
                    .ok_or(ScenarioError::MissingAgent("an institutional trader"))?;
                ins.rate = value;
            }
            SweepParam::MmInventoryLimit => {
                config.market_makers.inventory_limit = value.round() as i64;
            }
            SweepParam::FtIntervalSteps => {
                config.fundamental_traders.interval_steps = (value.round() as u32).max(1);
            }
        }
        Ok(config)
    }
}

/// What a sweep measures per run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SweepMode {
    /// Flash crash amplitude quantiles.
    Flash,
    /// Mini crash event counts and prominence amplitudes at a
    /// detection threshold of `k` deviations.
    Mini { k: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum PointStats {
    Flash { q40: f64, q50: f64, q60: f64 },
    Mini { mean_count: f64, mean_amplitude: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    /// Runs that finished without error.
    pub completed_runs: u32,
    pub stats: PointStats,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub param: SweepParam,
    pub mode: SweepMode,
    pub n_runs: u32,
    pub points: Vec<SweepPoint>,
}

/// Monte Carlo condition sweep: for each grid value, run `n_runs`
/// independently seeded simulations with that single parameter changed
/// and aggregate the scenario measure. Deterministic in `seed`.
pub fn sweep(
    base: &SimConfig,
    param: SweepParam,
    grid: &[f64],
    n_runs: u32,
    mode: SweepMode,
    seed: u64,
) -> Result<SweepResult, ScenarioError> {
    if grid.is_empty() {
        return Err(ScenarioError::EmptyGrid);
    }
    if matches!(mode, SweepMode::Flash) && base.institutional.is_none() {
        return Err(ScenarioError::MissingAgent("an institutional trader"));
    }

    let mut points = Vec::with_capacity(grid.len());
    for (point_index, &value) in grid.iter().enumerate() {
        let config = param.apply(base, value)?;
        let run_seeds: Vec<u64> = (0..n_runs as u64)
            .map(|rep| mix_seed(seed, point_index as u64 * 1_000_003 + rep))
            .collect();
        let outcomes: Vec<Result<RunMeasure, ScenarioError>> = run_seeds
            .par_iter()
            .map(|&run_seed| {
                let mut config = config.clone();
                config.seed = run_seed;
                let record = run(&config).map_err(|e| ScenarioError::Sim(e.to_string()))?;
                match mode {
                    SweepMode::Flash => Ok(RunMeasure::Amplitude(crash_metrics(&record).amplitude)),
                    SweepMode::Mini { k } => {
                        let per_second =
                            per_second_mids(&record.mid, record.steps_per_second())?;
                        let warmup_seconds =
                            (record.warmup_steps / record.steps_per_second()) as usize;
                        let events = detect_mini_crashes(
                            &per_second[warmup_seconds.min(per_second.len())..],
                            &MiniCrashParams::with_k(k),
                        )?;
                        Ok(RunMeasure::Events {
                            count: events.len() as u64,
                            prominence_sum: events.iter().map(|e| e.prominence).sum(),
                        })
                    }
                }
            })
            .collect();

        let completed: Vec<&RunMeasure> = outcomes.iter().flatten().collect();
        let stats = match mode {
            SweepMode::Flash => {
                let mut amplitudes: Vec<f64> = completed
                    .iter()
                    .map(|m| match m {
                        RunMeasure::Amplitude(a) => *a,
                        RunMeasure::Events { .. } => unreachable!(),
                    })
                    .collect();
                amplitudes.sort_by(|a, b| a.partial_cmp(b).expect("finite amplitudes"));
                PointStats::Flash {
                    q40: quantile(&amplitudes, 0.40),
                    q50: quantile(&amplitudes, 0.50),
                    q60: quantile(&amplitudes, 0.60),
                }
            }
            SweepMode::Mini { .. } => {
                let (mut count, mut prominence) = (0u64, 0.0f64);
                for m in &completed {
                    if let RunMeasure::Events {
                        count: c,
                        prominence_sum,
                    } = m
                    {
                        count += c;
                        prominence += prominence_sum;
                    }
                }
                PointStats::Mini {
                    mean_count: if completed.is_empty() {
                        0.0
                    } else {
                        count as f64 / completed.len() as f64
                    },
                    mean_amplitude: if count == 0 { 0.0 } else { prominence / count as f64 },
                }
            }
        };
        points.push(SweepPoint {
            value,
            completed_runs: completed.len() as u32,
            stats,
        });
    }
    Ok(SweepResult {
        param,
        mode,
        n_runs,
        points,
    })
}

enum RunMeasure {
    Amplitude(f64),
    Events { count: u64, prominence_sum: f64 },
}

/// Linear-interpolation quantile of a sorted slice.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (h - lo as f64)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    pearson(&rx, &ry)
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let values = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&values, 0.5), 3.0);
        assert_eq!(quantile(&values, 0.0), 1.0);
        assert_eq!(quantile(&values, 1.0), 5.0);
        assert!((quantile(&values, 0.4) - 2.6).abs() < 1e-12);
    }

    #[test]
    fn spearman_detects_monotone_relations() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let up = [0.1, 0.5, 0.7, 2.0, 11.0];
        let down = [5.0, 4.0, 3.0, 2.0, 1.0];
        assert!((spearman_rho(&xs, &up) - 1.0).abs() < 1e-12);
        assert!((spearman_rho(&xs, &down) + 1.0).abs() < 1e-12);
        let flat = [1.0, 1.0, 1.0, 1.0, 1.0];
        assert_eq!(spearman_rho(&xs, &flat), 0.0);
    }

    #[test]
    fn spearman_handles_ties_with_average_ranks() {
        let xs = [1.0, 2.0, 2.0, 3.0];
        let ys = [1.0, 1.5, 1.5, 9.0];
        assert!((spearman_rho(&xs, &ys) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apply_patches_single_parameter() {
        let base = crate::sim::presets::flash2010(1);
        let patched = SweepParam::InsRate.apply(&base, 0.05).unwrap();
        assert_eq!(patched.institutional.unwrap().rate, 0.05);
        assert_eq!(
            patched.market_makers.inventory_limit,
            base.market_makers.inventory_limit
        );
        let patched = SweepParam::MmInventoryLimit.apply(&base, 9000.0).unwrap();
        assert_eq!(patched.market_makers.inventory_limit, 9000);
        let patched = SweepParam::FtIntervalSteps.apply(&base, 50.0).unwrap();
        assert_eq!(patched.fundamental_traders.interval_steps, 50);

        let no_ins = crate::sim::presets::calibration(1);
        assert!(SweepParam::InsRate.apply(&no_ins, 0.05).is_err());
    }

    #[test]
    fn empty_grid_is_rejected() {
        let base = crate::sim::presets::flash2010(1);
        assert!(matches!(
            sweep(&base, SweepParam::InsRate, &[], 5, SweepMode::Flash, 0),
            Err(ScenarioError::EmptyGrid)
        ));
    }
}
