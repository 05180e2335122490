use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    cancellation_sweep, clamp_prob, fair_coin_side, limit_price_from_distance, AgentAction,
    CommonParams, MarketView, OwnView,
};

/// Noise-trader population parameters: `sigma` is the aggregated
/// activity level, split evenly over `n` traders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub n: u32,
    pub sigma: f64,
}

/// Uninformed trader. Submission rates are fixed before the simulation
/// starts; order sides are fair coin flips, so the cumulative noise
/// demand follows a random walk.
#[derive(Debug, Clone, Copy)]
pub struct NoiseTrader {
    theta: f64,
    mu: f64,
}

impl NoiseTrader {
    pub fn new(params: NoiseParams, market_limit_ratio: f64) -> NoiseTrader {
        let theta = clamp_prob(params.sigma / params.n as f64);
        NoiseTrader {
            theta,
            mu: clamp_prob(theta * market_limit_ratio),
        }
    }

    pub fn limit_probability(&self) -> f64 {
        self.theta
    }

    pub fn step(
        &mut self,
        view: &MarketView,
        own: &OwnView<'_>,
        common: &CommonParams,
        rng: &mut ChaCha8Rng,
        out: &mut Vec<AgentAction>,
    ) {
        cancellation_sweep(own, common.cancel_prob, rng, out);
        if rng.random::<f64>() < self.theta {
            let side = fair_coin_side(rng);
            let distance = common.limit_distance(rng);
            out.push(AgentAction::SubmitLimit {
                side,
                price: limit_price_from_distance(side, view.mid, distance, view.tick_size),
                volume: common.order_volume,
            });
        }
        if rng.random::<f64>() < self.mu {
            out.push(AgentAction::SubmitMarket {
                side: fair_coin_side(rng),
                volume: common.order_volume,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{test_common, test_view};
    use crate::market::Side;
    use crate::rng::stream_rng;

    #[test]
    fn submission_rate_is_sigma_over_n() {
        let trader = NoiseTrader::new(NoiseParams { n: 30, sigma: 0.3403 }, 0.2);
        assert!((trader.limit_probability() - 0.3403 / 30.0).abs() < 1e-15);
        assert!((trader.limit_probability() - 0.011343).abs() < 1e-6);
    }

    #[test]
    fn zero_sigma_never_trades() {
        let mut trader = NoiseTrader::new(NoiseParams { n: 30, sigma: 0.0 }, 0.2);
        let mut rng = stream_rng(9, 0);
        let mut out = Vec::new();
        let own = OwnView {
            resting: &[],
            position: 0,
        };
        for _ in 0..10_000 {
            trader.step(&test_view(1050.0), &own, &test_common(), &mut rng, &mut out);
        }
        assert!(out.is_empty());
    }

    #[test]
    fn buy_fraction_concentrates_on_half() {
        // Binomial concentration: over ~10^6 emitted orders the buy
        // fraction should be within a few standard errors of 0.5.
        let mut trader = NoiseTrader::new(NoiseParams { n: 1, sigma: 1.0 }, 0.2);
        let mut rng = stream_rng(10, 0);
        let mut out = Vec::new();
        let own = OwnView {
            resting: &[],
            position: 0,
        };
        let view = test_view(1050.0);
        let common = test_common();
        for _ in 0..1_000_000 {
            trader.step(&view, &own, &common, &mut rng, &mut out);
        }
        let (mut buys, mut total) = (0u64, 0u64);
        for action in &out {
            let side = match action {
                AgentAction::SubmitLimit { side, .. } => side,
                AgentAction::SubmitMarket { side, .. } => side,
                AgentAction::Cancel(_) => continue,
            };
            total += 1;
            if *side == Side::Buy {
                buys += 1;
            }
        }
        assert!(total > 1_000_000);
        let fraction = buys as f64 / total as f64;
        assert!((fraction - 0.5).abs() < 0.002, "buy fraction {fraction}");
    }

    #[test]
    fn market_to_limit_ratio_tracks_rho() {
        let rho = 0.2;
        let mut trader = NoiseTrader::new(NoiseParams { n: 1, sigma: 0.8 }, rho);
        let mut rng = stream_rng(11, 0);
        let mut out = Vec::new();
        let own = OwnView {
            resting: &[],
            position: 0,
        };
        let view = test_view(1050.0);
        let common = test_common();
        let opportunities = 200_000u32;
        for _ in 0..opportunities {
            trader.step(&view, &own, &common, &mut rng, &mut out);
        }
        let limits = out
            .iter()
            .filter(|a| matches!(a, AgentAction::SubmitLimit { .. }))
            .count() as f64;
        let markets = out
            .iter()
            .filter(|a| matches!(a, AgentAction::SubmitMarket { .. }))
            .count() as f64;
        let ratio = markets / limits;
        // Three standard errors of the ratio estimate.
        let p_market = 0.8 * rho;
        let se = (p_market * (1.0 - p_market) / (opportunities as f64)).sqrt() / 0.8 * 3.0;
        assert!(
            (ratio - rho).abs() < se.max(0.01),
            "ratio {ratio}, tolerance {se}"
        );
    }
}
