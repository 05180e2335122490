//! Canonical run configurations.
//!
//! Three presets cover the standard experiments: a full-day flash
//! crash scenario with an institutional seller, a morning session with
//! shock traders for mini crash studies, and a plain full-day market
//! used as the calibration baseline. Behavioural parameter values are
//! the calibrated defaults for an E-mini-like instrument (tick 0.25,
//! price level around 1150).

use std::sync::Arc;

use super::SimConfig;
use crate::agents::{
    CommonParams, FundamentalParams, InstitutionalParams, MarketMakerParams, MomentumParams,
    NoiseParams, SpikingParams,
};

pub const SESSION_START_SECS: u32 = 8 * 3600;
pub const FULL_DAY_STEPS: u32 = 324_000; // 9 hours at 100 ms
pub const MORNING_STEPS: u32 = 162_000; // 08:00 to 12:30
pub const WARMUP_STEPS: u32 = 3_000; // 5 minutes
pub const TICK_SIZE: f64 = 0.25;
pub const OPEN_PRICE: f64 = 1164.0;

/// Piecewise-linear fundamental path, one value per step.
///
/// `points` are (seconds after midnight, price) knots; values before
/// the first and after the last knot are held constant.
pub fn fundamental_segments(
    points: &[(u32, f64)],
    session_start_secs: u32,
    total_steps: u32,
    steps_per_second: u32,
) -> Arc<[f64]> {
    assert!(!points.is_empty(), "need at least one knot");
    let mut series = Vec::with_capacity(total_steps as usize);
    for step in 0..total_steps {
        let t = session_start_secs as f64 + step as f64 / steps_per_second as f64;
        let value = match points.iter().position(|&(ts, _)| ts as f64 > t) {
            Some(0) => points[0].1,
            Some(k) => {
                let (t0, v0) = points[k - 1];
                let (t1, v1) = points[k];
                let w = (t - t0 as f64) / (t1 - t0) as f64;
                v0 + w * (v1 - v0)
            }
            None => points[points.len() - 1].1,
        };
        series.push(value);
    }
    series.into()
}

fn base(seed: u64, total_steps: u32, fundamental: Arc<[f64]>) -> SimConfig {
    SimConfig {
        seed,
        step_ms: 100,
        total_steps,
        session_start_secs: SESSION_START_SECS,
        warmup_steps: WARMUP_STEPS,
        tick_size: TICK_SIZE,
        initial_price: OPEN_PRICE,
        fundamental,
        common: CommonParams {
            cancel_prob: 0.005,
            market_limit_ratio: 0.2,
            order_volume: 100,
            limit_dist_mu: 1.9349,
            limit_dist_sigma: 0.3,
        },
        fundamental_traders: FundamentalParams {
            n: 30,
            kappa1: 0.1390,
            kappa2: 0.4562,
            interval_steps: 100,
            phase: 0,
            staggered: false,
        },
        long_momentum: MomentumParams {
            n: 30,
            alpha: 0.001,
            beta: 0.3017,
            gamma: 10.0,
        },
        short_momentum: MomentumParams {
            n: 30,
            alpha: 0.9,
            beta: 0.1273,
            gamma: 10.0,
        },
        noise_traders: NoiseParams { n: 30, sigma: 0.3403 },
        market_makers: MarketMakerParams {
            n: 20,
            quote_prob: 0.6624,
            cancel_prob: 0.05,
            edge_max: 4.0,
            inventory_limit: 5000,
            inventory_safe: 101,
            rest_steps: 12_000,
            single_pair: false,
        },
        institutional: None,
        spiking: SpikingParams {
            n: 0,
            n_spike: 4,
            activation_prob: 0.005,
            volume: 100,
        },
        shuffle_agents: false,
    }
}

/// Fundamental path for the crash day: a morning-long decline of about
/// 2.6% flattening out in the afternoon.
pub fn crash_day_fundamental(total_steps: u32) -> Arc<[f64]> {
    fundamental_segments(
        &[
            (SESSION_START_SECS, OPEN_PRICE),
            (14 * 3600, 1134.0),
            (17 * 3600, 1132.0),
        ],
        SESSION_START_SECS,
        total_steps,
        10,
    )
}

/// Full-day scenario with an institutional seller working a 120,000
/// contract parent order from 14:30 at 9% participation.
pub fn flash2010(seed: u64) -> SimConfig {
    let mut config = base(seed, FULL_DAY_STEPS, crash_day_fundamental(FULL_DAY_STEPS));
    config.market_makers.inventory_limit = 7000;
    config.institutional = Some(InstitutionalParams {
        rate: 0.09,
        inventory: 120_000,
        interval_seconds: 12,
        start_secs: 14 * 3600 + 30 * 60,
    });
    config
}

/// Morning session with a thin market-maker population and two shock
/// traders; no institutional seller.
pub fn minicrash(seed: u64) -> SimConfig {
    let mut config = base(seed, MORNING_STEPS, crash_day_fundamental(MORNING_STEPS));
    config.market_makers.n = 5;
    config.market_makers.inventory_limit = 4000;
    config.spiking.n = 2;
    config
}

/// Full-day baseline without institutional or shock traders, used for
/// calibration and validation runs.
pub fn calibration(seed: u64) -> SimConfig {
    base(seed, FULL_DAY_STEPS, crash_day_fundamental(FULL_DAY_STEPS))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        flash2010(1).validate().unwrap();
        minicrash(2).validate().unwrap();
        calibration(3).validate().unwrap();
    }

    #[test]
    fn segment_interpolation_holds_ends_and_knots() {
        let series = fundamental_segments(
            &[(SESSION_START_SECS + 10, 100.0), (SESSION_START_SECS + 20, 110.0)],
            SESSION_START_SECS,
            300,
            10,
        );
        assert_eq!(series[0], 100.0); // held before the first knot
        assert_eq!(series[100], 100.0);
        assert!((series[150] - 105.0).abs() < 1e-9);
        assert_eq!(series[200], 110.0);
        assert_eq!(series[299], 110.0); // held after the last knot
    }

    #[test]
    fn census_counts_follow_preset() {
        let config = flash2010(1);
        assert_eq!(config.market_makers.n, 20);
        assert_eq!(config.market_makers.inventory_limit, 7000);
        assert!(config.institutional.is_some());
        assert_eq!(config.spiking.n, 0);

        let config = minicrash(1);
        assert_eq!(config.market_makers.n, 5);
        assert_eq!(config.market_makers.inventory_limit, 4000);
        assert!(config.institutional.is_none());
        assert_eq!(config.spiking.n, 2);
    }
}
