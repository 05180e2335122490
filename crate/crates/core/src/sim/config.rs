use std::fmt;
use std::sync::Arc;

use crate::agents::{
    CommonParams, FundamentalParams, InstitutionalParams, MarketMakerParams, MomentumParams,
    NoiseParams, SpikingParams,
};
use crate::calibrate::CalibrationTheta;

/// Full configuration of one simulation run. A `SimConfig` plus its
/// embedded seed determines the run output exactly.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub seed: u64,
    /// Step length in milliseconds; must divide 1000.
    pub step_ms: u32,
    pub total_steps: u32,
    /// Session open, seconds after midnight.
    pub session_start_secs: u32,
    /// Steps excluded from statistics while the book fills; only
    /// market makers and noise traders act during warm-up.
    pub warmup_steps: u32,
    pub tick_size: f64,
    /// Opening reference price; also the mid fallback while the book
    /// has not produced a two-sided quote yet.
    pub initial_price: f64,
    /// Exogenous fundamental value per step, length >= total_steps.
    pub fundamental: Arc<[f64]>,
    pub common: CommonParams,
    pub fundamental_traders: FundamentalParams,
    pub long_momentum: MomentumParams,
    pub short_momentum: MomentumParams,
    pub noise_traders: NoiseParams,
    pub market_makers: MarketMakerParams,
    pub institutional: Option<InstitutionalParams>,
    pub spiking: SpikingParams,
    /// Shuffle the per-step agent action order (default keeps
    /// registration order).
    pub shuffle_agents: bool,
}

impl SimConfig {
    pub fn steps_per_second(&self) -> u32 {
        1000 / self.step_ms
    }

    pub fn steps_per_minute(&self) -> u32 {
        60 * self.steps_per_second()
    }

    /// Wall-clock time of a step, milliseconds after midnight.
    pub fn step_time_ms(&self, step: u32) -> u64 {
        self.session_start_secs as u64 * 1000 + step as u64 * self.step_ms as u64
    }

    /// First step at or after a wall-clock time (seconds after midnight).
    pub fn step_of_time(&self, secs_of_day: u32) -> u32 {
        secs_of_day.saturating_sub(self.session_start_secs) * self.steps_per_second()
    }

    pub fn session_seconds(&self) -> u32 {
        self.total_steps / self.steps_per_second()
    }

    /// Copy of this configuration with the calibrated parameter vector
    /// substituted in.
    pub fn with_theta(&self, theta: &CalibrationTheta) -> SimConfig {
        let mut config = self.clone();
        config.common.limit_dist_mu = theta.mu_ell;
        config.noise_traders.sigma = theta.sigma_nt;
        config.fundamental_traders.kappa1 = theta.kappa1;
        config.fundamental_traders.kappa2 = theta.kappa2;
        config.long_momentum.beta = theta.beta_l;
        config.short_momentum.beta = theta.beta_s;
        config.market_makers.quote_prob = theta.theta_mm;
        config
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        fn err(field: &'static str, message: impl Into<String>) -> Result<(), ConfigError> {
            Err(ConfigError {
                field,
                message: message.into(),
            })
        }

        if self.step_ms == 0 || 1000 % self.step_ms != 0 {
            return err("step_ms", "must be a divisor of 1000");
        }
        if self.total_steps == 0 {
            return err("total_steps", "must be at least 1");
        }
        if self.warmup_steps >= self.total_steps {
            return err("warmup_steps", "must be smaller than total_steps");
        }
        if !(self.tick_size > 0.0) {
            return err("tick_size", "must be positive");
        }
        if !(self.initial_price > 0.0) || !self.initial_price.is_finite() {
            return err("initial_price", "must be positive and finite");
        }
        if self.fundamental.len() < self.total_steps as usize {
            return err(
                "fundamental",
                format!(
                    "series length {} shorter than total_steps {}",
                    self.fundamental.len(),
                    self.total_steps
                ),
            );
        }
        if self.fundamental.iter().any(|v| !v.is_finite()) {
            return err("fundamental", "series contains non-finite values");
        }

        let c = &self.common;
        if !(0.0..=1.0).contains(&c.cancel_prob) {
            return err("common.cancel_prob", "must lie in [0, 1]");
        }
        if c.market_limit_ratio < 0.0 {
            return err("common.market_limit_ratio", "must be non-negative");
        }
        if c.order_volume == 0 {
            return err("common.order_volume", "must be positive");
        }
        if !(c.limit_dist_sigma > 0.0) || !c.limit_dist_mu.is_finite() {
            return err("common.limit_dist", "log-normal parameters invalid");
        }

        let ft = &self.fundamental_traders;
        if ft.kappa1 < 0.0 || ft.kappa2 < 0.0 {
            return err("fundamental_traders.kappa", "must be non-negative");
        }
        if ft.interval_steps == 0 {
            return err("fundamental_traders.interval_steps", "must be at least 1");
        }

        for (field, m) in [
            ("long_momentum", &self.long_momentum),
            ("short_momentum", &self.short_momentum),
        ] {
            if !(m.alpha > 0.0 && m.alpha <= 1.0) {
                return err(field, "alpha must lie in (0, 1]");
            }
            if m.beta < 0.0 {
                return err(field, "beta must be non-negative");
            }
            if !(m.gamma > 0.0) {
                return err(field, "gamma must be positive");
            }
        }

        if self.noise_traders.sigma < 0.0 {
            return err("noise_traders.sigma", "must be non-negative");
        }

        let mm = &self.market_makers;
        if !(0.0..=1.0).contains(&mm.quote_prob) {
            return err("market_makers.quote_prob", "must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&mm.cancel_prob) {
            return err("market_makers.cancel_prob", "must lie in [0, 1]");
        }
        if !(mm.edge_max > 0.0) {
            return err("market_makers.edge_max", "must be positive");
        }
        if mm.inventory_safe < 0 || mm.inventory_safe >= mm.inventory_limit {
            return err(
                "market_makers.inventory_safe",
                "requires 0 <= inventory_safe < inventory_limit",
            );
        }

        if let Some(ins) = &self.institutional {
            if !(ins.rate > 0.0 && ins.rate < 1.0) {
                return err("institutional.rate", "must lie in (0, 1)");
            }
            if ins.interval_seconds == 0 {
                return err("institutional.interval_seconds", "must be at least 1");
            }
        }

        let st = &self.spiking;
        if st.n > 0 {
            if st.n_spike == 0 {
                return err("spiking.n_spike", "must be at least 1");
            }
            if !(0.0..=1.0).contains(&st.activation_prob) {
                return err("spiking.activation_prob", "must lie in [0, 1]");
            }
            if st.volume == 0 {
                return err("spiking.volume", "must be positive");
            }
        }
        Ok(())
    }
}

/// A configuration invariant violation, naming the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}
