use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    cancellation_sweep, limit_price_from_distance, AgentAction, CommonParams, MarketView, OwnView,
};
use crate::market::Side;

/// Market maker population parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketMakerParams {
    pub n: u32,
    /// Per-step probability of submitting a fresh quote pair.
    pub quote_prob: f64,
    /// Per-step cancellation probability of each resting quote leg.
    pub cancel_prob: f64,
    /// Maximum half-spread; each quote leg's edge is uniform(0, edge_max)
    /// in price units, sampled independently per side.
    pub edge_max: f64,
    /// Position limit that triggers forced unwinding.
    pub inventory_limit: i64,
    /// Unwinding stops once |position| is back at this level.
    pub inventory_safe: i64,
    /// Steps of trading suspension after the limit was last breached.
    pub rest_steps: u32,
    /// Keep at most one working quote pair (cancel/replace as a unit)
    /// instead of letting quotes accumulate under the cancellation
    /// sweep.
    pub single_pair: bool,
}

/// Liquidity provider with inventory control.
///
/// In normal trading it submits two-sided quotes around the mid;
/// quotes accumulate and each resting leg is independently cancelled
/// at the (high) maker cancellation rate, so a maker keeps roughly
/// `quote_prob / cancel_prob` quote pairs working. Once its position
/// reaches `inventory_limit` it pulls all quotes and fires one market
/// order per step against the position sign until back inside
/// `inventory_safe`, then stays out of the market until `rest_steps`
/// after the last breach have passed.
#[derive(Debug, Clone, Copy)]
pub struct MarketMaker {
    params: MarketMakerParams,
    unwinding: bool,
    restart_step: u32,
}

impl MarketMaker {
    pub fn new(params: MarketMakerParams) -> MarketMaker {
        MarketMaker {
            params,
            unwinding: false,
            restart_step: 0,
        }
    }

    pub fn is_unwinding(&self) -> bool {
        self.unwinding
    }

    pub fn step(
        &mut self,
        view: &MarketView,
        own: &OwnView<'_>,
        common: &CommonParams,
        rng: &mut ChaCha8Rng,
        out: &mut Vec<AgentAction>,
    ) {
        let p = &self.params;
        if own.position.abs() >= p.inventory_limit {
            self.unwinding = true;
            self.restart_step = view.step.saturating_add(p.rest_steps);
        }
        if self.unwinding && own.position.abs() <= p.inventory_safe {
            self.unwinding = false;
        }
        if self.unwinding {
            for order in own.resting {
                out.push(AgentAction::Cancel(order.id));
            }
            let side = if own.position < 0 { Side::Buy } else { Side::Sell };
            out.push(AgentAction::SubmitMarket {
                side,
                volume: common.order_volume,
            });
        } else if view.step > self.restart_step {
            if p.single_pair {
                if rng.random::<f64>() < p.cancel_prob {
                    for order in own.resting {
                        out.push(AgentAction::Cancel(order.id));
                    }
                }
            } else {
                cancellation_sweep(own, p.cancel_prob, rng, out);
            }
            if rng.random::<f64>() < p.quote_prob {
                if p.single_pair {
                    // Replace the standing pair as a unit.
                    let already_pulled = out
                        .iter()
                        .any(|a| matches!(a, AgentAction::Cancel(_)));
                    if !already_pulled {
                        for order in own.resting {
                            out.push(AgentAction::Cancel(order.id));
                        }
                    }
                }
                let buy_edge = rng.random_range(0.0..p.edge_max);
                let sell_edge = rng.random_range(0.0..p.edge_max);
                out.push(AgentAction::SubmitLimit {
                    side: Side::Buy,
                    price: limit_price_from_distance(Side::Buy, view.mid, buy_edge, view.tick_size),
                    volume: common.order_volume,
                });
                out.push(AgentAction::SubmitLimit {
                    side: Side::Sell,
                    price: limit_price_from_distance(
                        Side::Sell,
                        view.mid,
                        sell_edge,
                        view.tick_size,
                    ),
                    volume: common.order_volume,
                });
            }
        }
    }
}
