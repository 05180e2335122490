use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    cancellation_sweep, clamp_prob, limit_price_from_distance, AgentAction, CommonParams,
    MarketView, OwnView, TraderKind,
};
use crate::market::Side;

/// Trend-follower population parameters. The trend signal is an
/// exponentially weighted moving average of one-step mid-price changes
/// with decay `alpha`; demand is `beta * tanh(gamma * M)`, split over
/// `n` traders. Two populations coexist: a slow one (small `alpha`)
/// and a fast one (`alpha` close to 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumParams {
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct MomentumTrader {
    params: MomentumParams,
    kind: TraderKind,
    momentum: f64,
}

impl MomentumTrader {
    pub fn long_term(params: MomentumParams) -> MomentumTrader {
        MomentumTrader {
            params,
            kind: TraderKind::LongMomentum,
            momentum: 0.0,
        }
    }

    pub fn short_term(params: MomentumParams) -> MomentumTrader {
        MomentumTrader {
            params,
            kind: TraderKind::ShortMomentum,
            momentum: 0.0,
        }
    }

    pub fn kind(&self) -> TraderKind {
        self.kind
    }

    pub fn momentum(&self) -> f64 {
        self.momentum
    }

    /// EWMA update, applied only when a fresh mid was published.
    pub fn update_momentum(momentum: f64, alpha: f64, mid_delta: f64) -> f64 {
        (1.0 - alpha) * momentum + alpha * mid_delta
    }

    /// Per-trader limit order submission probability. The demand
    /// `beta * tanh(gamma * M)` carries the order side in its sign;
    /// the submission rate is its magnitude.
    pub fn submission_probability(params: &MomentumParams, momentum: f64) -> f64 {
        clamp_prob((params.beta * (params.gamma * momentum).tanh() / params.n as f64).abs())
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
        if let Some(delta) = view.mid_delta {
            self.momentum = Self::update_momentum(self.momentum, self.params.alpha, delta);
        }
        let theta = Self::submission_probability(&self.params, self.momentum);
        let mu = clamp_prob(theta * common.market_limit_ratio);
        let side = if self.momentum > 0.0 {
            Side::Buy
        } else {
            Side::Sell
        };
        if rng.random::<f64>() < theta {
            let distance = common.limit_distance(rng);
            out.push(AgentAction::SubmitLimit {
                side,
                price: limit_price_from_distance(side, view.mid, distance, view.tick_size),
                volume: common.order_volume,
            });
        }
        if rng.random::<f64>() < mu {
            out.push(AgentAction::SubmitMarket {
                side,
                volume: common.order_volume,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{test_common, test_view, OwnOrder};
    use crate::market::OrderId;
    use crate::rng::stream_rng;

    fn short_params() -> MomentumParams {
        MomentumParams {
            n: 30,
            alpha: 0.9,
            beta: 0.1273,
            gamma: 10.0,
        }
    }

    #[test]
    fn ewma_single_step() {
        let m = MomentumTrader::update_momentum(0.0, 0.9, 0.25);
        assert!((m - 0.225).abs() < 1e-12);
    }

    #[test]
    fn zero_momentum_never_submits() {
        let params = short_params();
        assert_eq!(MomentumTrader::submission_probability(&params, 0.0), 0.0);
        let mut trader = MomentumTrader::short_term(params);
        let mut rng = stream_rng(5, 0);
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
    fn submission_probability_matches_demand_formula() {
        // Direct evaluation of beta * tanh(gamma * M) / n at M = 0.225.
        let expected = 0.1273 * (10.0 * 0.225_f64).tanh() / 30.0;
        let got = MomentumTrader::submission_probability(&short_params(), 0.225);
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 4.1501e-3).abs() < 1e-6);
        // Sign is carried by the side, not the rate.
        let neg = MomentumTrader::submission_probability(&short_params(), -0.225);
        assert!((neg - expected).abs() < 1e-15);
    }

    #[test]
    fn probability_stays_clamped_for_any_parameters() {
        for beta in [0.0, 0.5, 7.0, 1e6] {
            for m in [-1e9, -0.3, 0.0, 0.2, 1e12] {
                let p = MomentumTrader::submission_probability(
                    &MomentumParams {
                        n: 1,
                        alpha: 0.9,
                        beta,
                        gamma: 10.0,
                    },
                    m,
                );
                assert!((0.0..=1.0).contains(&p));
            }
        }
    }

    #[test]
    fn negative_momentum_sells() {
        let mut trader = MomentumTrader::short_term(MomentumParams {
            beta: 1e9, // force certain submission after the update
            ..short_params()
        });
        let mut view = test_view(1050.0);
        view.mid_delta = Some(-0.25);
        let mut rng = stream_rng(6, 0);
        let mut out = Vec::new();
        let own = OwnView {
            resting: &[],
            position: 0,
        };
        trader.step(&view, &own, &test_common(), &mut rng, &mut out);
        assert!(trader.momentum() < 0.0);
        assert!(matches!(
            out[0],
            AgentAction::SubmitLimit {
                side: Side::Sell,
                ..
            }
        ));
    }

    #[test]
    fn buy_limits_priced_below_mid_sell_limits_above() {
        let mut trader = MomentumTrader::short_term(MomentumParams {
            beta: 1e9,
            ..short_params()
        });
        let common = test_common();
        let own = OwnView {
            resting: &[],
            position: 0,
        };
        let mut rng = stream_rng(7, 0);
        let mut out = Vec::new();
        let mut view = test_view(1050.0);
        for step in 0..200 {
            view.step = step;
            view.mid_delta = Some(if step % 2 == 0 { 0.25 } else { -0.25 });
            trader.step(&view, &own, &common, &mut rng, &mut out);
        }
        let mid_ticks = 1050.0 / view.tick_size;
        for action in &out {
            if let AgentAction::SubmitLimit { side, price, .. } = action {
                match side {
                    Side::Buy => assert!((*price as f64) < mid_ticks),
                    Side::Sell => assert!((*price as f64) > mid_ticks),
                }
            }
        }
    }

    #[test]
    fn resting_orders_cancelled_at_configured_rate() {
        let mut trader = MomentumTrader::short_term(short_params());
        let resting: Vec<OwnOrder> = (0..4)
            .map(|i| OwnOrder {
                id: OrderId(i),
                side: Side::Buy,
                price: 4200,
                remaining: 100,
            })
            .collect();
        let own = OwnView {
            resting: &resting,
            position: 0,
        };
        let mut common = test_common();
        common.cancel_prob = 1.0;
        let mut rng = stream_rng(8, 0);
        let mut out = Vec::new();
        trader.step(&test_view(1050.0), &own, &common, &mut rng, &mut out);
        let cancels: Vec<_> = out
            .iter()
            .filter(|a| matches!(a, AgentAction::Cancel(_)))
            .collect();
        assert_eq!(cancels.len(), 4);
        // Cancellations come before any submission in the action stream.
        assert!(matches!(out[0], AgentAction::Cancel(_)));
    }
}
