use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{clamp_prob, AgentAction, CommonParams, MarketView};
use crate::market::Side;

/// Value-trader population parameters. Aggregated demand grows with
/// mispricing as `kappa1 * gap + kappa2 * gap^3`, split evenly over
/// `n` traders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalParams {
    pub n: u32,
    pub kappa1: f64,
    pub kappa2: f64,
    /// Steps between action attempts of the same trader.
    pub interval_steps: u32,
    /// Step offset of the action grid (0 synchronises the population).
    pub phase: u32,
    /// Spread the traders' action grids evenly across the interval
    /// instead of acting in unison.
    pub staggered: bool,
}

/// A single fundamental trader. Acts only on its interval grid, and
/// then submits a market order towards the fundamental value with a
/// probability proportional to its share of the aggregated demand.
#[derive(Debug, Clone, Copy)]
pub struct FundamentalTrader {
    params: FundamentalParams,
}

impl FundamentalTrader {
    pub fn new(params: FundamentalParams) -> FundamentalTrader {
        FundamentalTrader { params }
    }

    /// Per-trader market order probability for a given mispricing gap.
    pub fn order_probability(params: &FundamentalParams, gap: f64) -> f64 {
        let a = gap.abs();
        clamp_prob((params.kappa1 * a + params.kappa2 * a.powi(3)) / params.n as f64)
    }

    pub fn step(
        &mut self,
        view: &MarketView,
        common: &CommonParams,
        rng: &mut ChaCha8Rng,
        out: &mut Vec<AgentAction>,
    ) {
        let params = &self.params;
        let since_phase = view.step as i64 - params.phase as i64;
        if since_phase.rem_euclid(params.interval_steps as i64) != 0 {
            return;
        }
        let gap = view.fundamental - view.mid;
        if gap == 0.0 {
            return;
        }
        let mu = Self::order_probability(params, gap);
        if rng.random::<f64>() < mu {
            let side = if gap > 0.0 { Side::Buy } else { Side::Sell };
            out.push(AgentAction::SubmitMarket {
                side,
                volume: common.order_volume,
            });
        }
    }
}
