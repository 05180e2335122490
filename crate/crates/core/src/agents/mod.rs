//! Trader behaviours.
//!
//! Every trader is a deterministic function of (own state, published
//! market view, private random stream) emitting order actions. The
//! simulation kernel owns order routing, fill accounting, and the
//! per-agent ledgers that the behaviours observe.

mod fundamental;
mod institutional;
mod market_maker;
mod momentum;
mod noise;
mod spiking;

pub use fundamental::{FundamentalParams, FundamentalTrader};
pub use institutional::{InstitutionalParams, InstitutionalTrader};
pub use market_maker::{MarketMaker, MarketMakerParams};
pub use momentum::{MomentumParams, MomentumTrader};
pub use noise::{NoiseParams, NoiseTrader};
pub use spiking::{SpikingParams, SpikingTrader};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use crate::market::{OrderId, Side, Ticks};

/// Behavioural parameters shared by all traders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommonParams {
    /// Per-step cancellation probability of each resting limit order
    /// (noise and momentum traders; market makers use their own rate).
    pub cancel_prob: f64,
    /// Ratio of market-order to limit-order submission probability.
    pub market_limit_ratio: f64,
    /// Contracts per order.
    pub order_volume: u32,
    /// Log-normal location of the limit price distance from mid, in
    /// price units.
    pub limit_dist_mu: f64,
    /// Log-normal scale of the limit price distance.
    pub limit_dist_sigma: f64,
}

impl CommonParams {
    pub fn limit_distance(&self, rng: &mut ChaCha8Rng) -> f64 {
        LogNormal::new(self.limit_dist_mu, self.limit_dist_sigma)
            .expect("limit distance parameters validated at config load")
            .sample(rng)
    }
}

/// Market state published to every agent at the start of a step. All
/// fields describe the book as of the end of the previous step.
#[derive(Debug, Clone, Copy)]
pub struct MarketView {
    pub step: u32,
    /// Last valid mid-price in price units (initial price before the
    /// first two-sided book).
    pub mid: f64,
    /// Change of the mid since the preceding published mid; `None`
    /// when the book was one-sided and no fresh mid was published.
    pub mid_delta: Option<f64>,
    /// Exogenous fundamental value at this step.
    pub fundamental: f64,
    /// Total contracts traded over the trailing minute.
    pub minute_volume: u64,
    pub tick_size: f64,
    pub steps_per_second: u32,
}

/// One of this agent's own resting orders.
#[derive(Debug, Clone, Copy)]
pub struct OwnOrder {
    pub id: OrderId,
    pub side: Side,
    pub price: Ticks,
    pub remaining: u32,
}

/// What an agent can see about itself.
#[derive(Debug, Clone, Copy)]
pub struct OwnView<'a> {
    pub resting: &'a [OwnOrder],
    /// Signed filled volume.
    pub position: i64,
}

/// An action emitted by an agent; the kernel applies actions in
/// emission order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AgentAction {
    Cancel(OrderId),
    SubmitLimit { side: Side, price: Ticks, volume: u32 },
    SubmitMarket { side: Side, volume: u32 },
}

/// Trader taxonomy used for inventory bucketing and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum TraderKind {
    Fundamental,
    LongMomentum,
    ShortMomentum,
    Noise,
    MarketMaker,
    Institutional,
    Spiking,
}

impl TraderKind {
    pub const ALL: [TraderKind; 7] = [
        TraderKind::Fundamental,
        TraderKind::LongMomentum,
        TraderKind::ShortMomentum,
        TraderKind::Noise,
        TraderKind::MarketMaker,
        TraderKind::Institutional,
        TraderKind::Spiking,
    ];

    pub fn index(self) -> usize {
        match self {
            TraderKind::Fundamental => 0,
            TraderKind::LongMomentum => 1,
            TraderKind::ShortMomentum => 2,
            TraderKind::Noise => 3,
            TraderKind::MarketMaker => 4,
            TraderKind::Institutional => 5,
            TraderKind::Spiking => 6,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TraderKind::Fundamental => "fundamental",
            TraderKind::LongMomentum => "long_momentum",
            TraderKind::ShortMomentum => "short_momentum",
            TraderKind::Noise => "noise",
            TraderKind::MarketMaker => "market_maker",
            TraderKind::Institutional => "institutional",
            TraderKind::Spiking => "spiking",
        }
    }
}

/// A concrete trader behaviour plus its evolving private state.
#[derive(Debug, Clone)]
pub enum Behavior {
    Fundamental(FundamentalTrader),
    Momentum(MomentumTrader),
    Noise(NoiseTrader),
    MarketMaker(MarketMaker),
    Institutional(InstitutionalTrader),
    Spiking(SpikingTrader),
}

impl Behavior {
    pub fn step(
        &mut self,
        view: &MarketView,
        own: &OwnView<'_>,
        common: &CommonParams,
        rng: &mut ChaCha8Rng,
        out: &mut Vec<AgentAction>,
    ) {
        match self {
            Behavior::Fundamental(t) => t.step(view, common, rng, out),
            Behavior::Momentum(t) => t.step(view, own, common, rng, out),
            Behavior::Noise(t) => t.step(view, own, common, rng, out),
            Behavior::MarketMaker(t) => t.step(view, own, common, rng, out),
            Behavior::Institutional(t) => t.step(view, out),
            Behavior::Spiking(t) => t.step(rng, out),
        }
    }

    pub fn kind(&self) -> TraderKind {
        match self {
            Behavior::Fundamental(_) => TraderKind::Fundamental,
            Behavior::Momentum(t) => t.kind(),
            Behavior::Noise(_) => TraderKind::Noise,
            Behavior::MarketMaker(_) => TraderKind::MarketMaker,
            Behavior::Institutional(_) => TraderKind::Institutional,
            Behavior::Spiking(_) => TraderKind::Spiking,
        }
    }
}

/// Clamp a derived submission rate into probability range.
pub fn clamp_prob(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Turn a sampled price distance into a tick-aligned limit price.
///
/// Buys land strictly below the mid and sells strictly above it; when
/// rounding degenerates onto the mid the price is pushed one tick away
/// so a trader can never lock the spread against itself.
pub fn limit_price_from_distance(side: Side, mid: f64, distance: f64, tick_size: f64) -> Ticks {
    let mid_ticks = mid / tick_size;
    let raw = match side {
        Side::Buy => mid - distance,
        Side::Sell => mid + distance,
    };
    let mut price = (raw / tick_size).round() as Ticks;
    match side {
        Side::Buy => {
            if price as f64 >= mid_ticks {
                price = mid_ticks.ceil() as Ticks - 1;
            }
        }
        Side::Sell => {
            if price as f64 <= mid_ticks {
                price = mid_ticks.floor() as Ticks + 1;
            }
        }
    }
    price.max(1)
}

/// Draw each resting order's independent cancellation.
fn cancellation_sweep(
    own: &OwnView<'_>,
    cancel_prob: f64,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<AgentAction>,
) {
    for order in own.resting {
        if rng.random::<f64>() < cancel_prob {
            out.push(AgentAction::Cancel(order.id));
        }
    }
}

fn fair_coin_side(rng: &mut ChaCha8Rng) -> Side {
    if rng.random::<f64>() < 0.5 {
        Side::Buy
    } else {
        Side::Sell
    }
}

#[cfg(test)]
pub(crate) fn test_view(mid: f64) -> MarketView {
    MarketView {
        step: 0,
        mid,
        mid_delta: None,
        fundamental: mid,
        minute_volume: 0,
        tick_size: 0.25,
        steps_per_second: 10,
    }
}

#[cfg(test)]
pub(crate) fn test_common() -> CommonParams {
    CommonParams {
        cancel_prob: 0.005,
        market_limit_ratio: 0.2,
        order_volume: 100,
        limit_dist_mu: 1.9349,
        limit_dist_sigma: 0.3,
    }
}
