use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::AgentAction;
use crate::market::Side;

/// Shock-trader parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikingParams {
    pub n: u32,
    /// Consecutive orders submitted per activation.
    pub n_spike: u32,
    /// Per-step activation probability while idle.
    pub activation_prob: f64,
    /// Contracts per order.
    pub volume: u32,
}

/// Creates one-sided price shocks: while idle it activates with a small
/// probability each step; once activated it submits `n_spike` market
/// orders of the same (fair-coin) direction on consecutive steps.
#[derive(Debug, Clone, Copy)]
pub struct SpikingTrader {
    params: SpikingParams,
    burst_remaining: u32,
    burst_side: Side,
}

impl SpikingTrader {
    pub fn new(params: SpikingParams) -> SpikingTrader {
        SpikingTrader {
            params,
            burst_remaining: 0,
            burst_side: Side::Sell,
        }
    }

    pub fn burst_remaining(&self) -> u32 {
        self.burst_remaining
    }

    pub fn step(&mut self, rng: &mut ChaCha8Rng, out: &mut Vec<AgentAction>) {
        if self.burst_remaining > 0 {
            out.push(AgentAction::SubmitMarket {
                side: self.burst_side,
                volume: self.params.volume,
            });
            self.burst_remaining -= 1;
        } else if rng.random::<f64>() < self.params.activation_prob {
            self.burst_side = if rng.random::<f64>() < 0.5 {
                Side::Sell
            } else {
                Side::Buy
            };
            self.burst_remaining = self.params.n_spike;
        }
    }
}
