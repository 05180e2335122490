use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::sim::{run, SimConfig, SimRecord};

/// Severity metrics of a flash crash day.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CrashMetrics {
    /// Time-weighted average mid over 14:00-14:05, at step resolution
    /// with last-valid-mid fill.
    pub twap_ref: f64,
    /// Lowest (filled) mid from 14:00 to the session end.
    pub p_min: f64,
    /// |twap_ref - p_min| / twap_ref.
    pub amplitude: f64,
    /// Seconds from the first institutional order to inventory
    /// exhaustion; `None` when the parent order never finished.
    pub sell_algo_duration_secs: Option<f64>,
}

const TWAP_START: u32 = 14 * 3600;
const TWAP_END: u32 = 14 * 3600 + 5 * 60;

/// Compute crash metrics from a finished record.
pub fn crash_metrics(record: &SimRecord) -> CrashMetrics {
    let filled = record.forward_filled_mid();
    let start = (record.step_of_time(TWAP_START) as usize).min(filled.len());
    let end = (record.step_of_time(TWAP_END) as usize).min(filled.len());
    let window = &filled[start..end];
    let twap_ref = if window.is_empty() {
        record.initial_price
    } else {
        window.iter().sum::<f64>() / window.len() as f64
    };
    let p_min = filled[start..]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let amplitude = ((twap_ref - p_min) / twap_ref).abs();
    let sell_algo_duration_secs = match (record.ins_first_order_step, record.ins_exhausted_step) {
        (Some(first), Some(done)) => {
            Some((done - first) as f64 * record.step_ms as f64 / 1000.0)
        }
        _ => None,
    };
    CrashMetrics {
        twap_ref,
        p_min,
        amplitude,
        sell_algo_duration_secs,
    }
}

/// Run a full crash-day simulation and compute its metrics. The
/// configuration must include the institutional seller.
pub fn run_flash_crash_scenario(
    config: &SimConfig,
) -> Result<(SimRecord, CrashMetrics), ScenarioError> {
    if config.institutional.is_none() {
        return Err(ScenarioError::MissingAgent("an institutional trader"));
    }
    let record = run(config).map_err(|e| ScenarioError::Sim(e.to_string()))?;
    let metrics = crash_metrics(&record);
    Ok((record, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::presets;

    /// A synthetic record: flat at a level, then a dip after 14:00.
    fn synthetic_record(level: f64, dip_to: f64) -> SimRecord {
        let total_steps = presets::FULL_DAY_STEPS;
        let mut mid = vec![Some(level); total_steps as usize];
        // Dip between 15:00 and 15:10.
        let dip_start = (7 * 3600 * 10) as usize;
        let dip_end = dip_start + 6000;
        for v in &mut mid[dip_start..dip_end] {
            *v = Some(dip_to);
        }
        SimRecord {
            total_steps,
            warmup_steps: presets::WARMUP_STEPS,
            step_ms: 100,
            session_start_secs: presets::SESSION_START_SECS,
            tick_size: presets::TICK_SIZE,
            initial_price: level,
            best_bid: vec![None; total_steps as usize],
            best_ask: vec![None; total_steps as usize],
            bid_depth: vec![0; total_steps as usize],
            ask_depth: vec![0; total_steps as usize],
            step_volume: vec![0; total_steps as usize],
            minute_volume: vec![0; total_steps as usize],
            trades: Vec::new(),
            inventories: crate::sim::InventorySeries::with_capacity(0),
            ins_first_order_step: None,
            ins_exhausted_step: None,
            mid,
        }
    }

    #[test]
    fn amplitude_of_flat_series_is_zero() {
        let record = synthetic_record(1100.0, 1100.0);
        let metrics = crash_metrics(&record);
        assert_eq!(metrics.amplitude, 0.0);
        assert_eq!(metrics.p_min, metrics.twap_ref);
    }

    #[test]
    fn amplitude_is_relative_drop_from_twap() {
        let record = synthetic_record(1100.0, 1053.5);
        let metrics = crash_metrics(&record);
        assert!((metrics.twap_ref - 1100.0).abs() < 1e-9);
        assert_eq!(metrics.p_min, 1053.5);
        assert!((metrics.amplitude - 46.5 / 1100.0).abs() < 1e-12);
        assert!((metrics.amplitude - 0.04227).abs() < 5e-5);
    }

    #[test]
    fn duration_comes_from_institutional_steps() {
        let mut record = synthetic_record(1100.0, 1090.0);
        record.ins_first_order_step = Some(234_120);
        record.ins_exhausted_step = Some(244_320);
        let metrics = crash_metrics(&record);
        assert_eq!(metrics.sell_algo_duration_secs, Some(1020.0));

        record.ins_exhausted_step = None;
        assert_eq!(crash_metrics(&record).sell_algo_duration_secs, None);
    }

    #[test]
    fn scenario_requires_institutional_trader() {
        let config = presets::calibration(1);
        assert!(matches!(
            run_flash_crash_scenario(&config),
            Err(ScenarioError::MissingAgent(_))
        ));
    }

    #[test]
    fn amplitude_is_scale_invariant() {
        let a = crash_metrics(&synthetic_record(1100.0, 1050.0));
        let b = crash_metrics(&synthetic_record(2200.0, 2100.0));
        assert!((a.amplitude - b.amplitude).abs() < 1e-12);
    }
}
