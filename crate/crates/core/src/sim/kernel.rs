use std::fmt;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::config::{ConfigError, SimConfig};
use super::record::{InventorySeries, SimRecord};
use crate::agents::{
    AgentAction, Behavior, FundamentalTrader, InstitutionalTrader, MarketMaker, MarketView,
    MomentumTrader, NoiseTrader, OwnOrder, OwnView, SpikingTrader, TraderKind,
};
use crate::market::{AgentId, Order, OrderBook, OrderError, OrderId, Side, Trade};
use crate::rng::stream_rng;

/// Stream id offset for kernel-internal randomness, clear of agent ids.
const KERNEL_STREAM: u64 = u64::MAX;

#[derive(Debug)]
pub enum SimError {
    Config(ConfigError),
    /// An agent emitted an order the matching engine rejected; this is
    /// a bug in the emitting behaviour, surfaced instead of unwound.
    Order { agent: AgentId, source: OrderError },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Config(e) => write!(f, "{e}"),
            SimError::Order { agent, source } => {
                write!(f, "agent {agent} emitted a rejected order: {source}")
            }
        }
    }
}

impl std::error::Error for SimError {}

impl From<ConfigError> for SimError {
    fn from(e: ConfigError) -> SimError {
        SimError::Config(e)
    }
}

struct Ledger {
    resting: Vec<OwnOrder>,
    position: i64,
}

struct AgentSlot {
    behavior: Behavior,
    rng: ChaCha8Rng,
    active_from: u32,
    kind: TraderKind,
}

fn build_census(config: &SimConfig) -> Vec<AgentSlot> {
    let mut slots = Vec::new();
    let warmup = config.warmup_steps;
    for i in 0..config.fundamental_traders.n {
        let mut params = config.fundamental_traders;
        if params.staggered {
            params.phase =
                params.phase.wrapping_add(i * params.interval_steps / params.n.max(1));
        }
        slots.push((Behavior::Fundamental(FundamentalTrader::new(params)), warmup));
    }
    for _ in 0..config.long_momentum.n {
        slots.push((
            Behavior::Momentum(MomentumTrader::long_term(config.long_momentum)),
            warmup,
        ));
    }
    for _ in 0..config.short_momentum.n {
        slots.push((
            Behavior::Momentum(MomentumTrader::short_term(config.short_momentum)),
            warmup,
        ));
    }
    for _ in 0..config.noise_traders.n {
        slots.push((
            Behavior::Noise(NoiseTrader::new(
                config.noise_traders,
                config.common.market_limit_ratio,
            )),
            0,
        ));
    }
    for _ in 0..config.market_makers.n {
        slots.push((
            Behavior::MarketMaker(MarketMaker::new(config.market_makers)),
            0,
        ));
    }
    if let Some(ins) = config.institutional {
        slots.push((
            Behavior::Institutional(InstitutionalTrader::new(
                ins,
                config.session_start_secs,
                config.steps_per_second(),
            )),
            warmup,
        ));
    }
    for _ in 0..config.spiking.n {
        slots.push((Behavior::Spiking(SpikingTrader::new(config.spiking)), warmup));
    }

    slots
        .into_iter()
        .enumerate()
        .map(|(id, (behavior, active_from))| AgentSlot {
            kind: behavior.kind(),
            rng: stream_rng(config.seed, id as u64),
            behavior,
            active_from,
        })
        .collect()
}

/// Run one full simulation. Per step, every agent observes the state
/// published at the end of the previous step and emits actions; the
/// engine applies them in emission order; the resulting book state is
/// then published. Identical configurations produce identical records.
pub fn run(config: &SimConfig) -> Result<SimRecord, SimError> {
    config.validate()?;

    let mut agents = build_census(config);
    let n_agents = agents.len();
    let mut ledgers: Vec<Ledger> = (0..n_agents)
        .map(|_| Ledger {
            resting: Vec::new(),
            position: 0,
        })
        .collect();
    let mut kind_totals = [0i64; 7];
    let kinds: Vec<TraderKind> = agents.iter().map(|a| a.kind).collect();

    let total_steps = config.total_steps as usize;
    let mut record = SimRecord {
        total_steps: config.total_steps,
        warmup_steps: config.warmup_steps,
        step_ms: config.step_ms,
        session_start_secs: config.session_start_secs,
        tick_size: config.tick_size,
        initial_price: config.initial_price,
        mid: Vec::with_capacity(total_steps),
        best_bid: Vec::with_capacity(total_steps),
        best_ask: Vec::with_capacity(total_steps),
        bid_depth: Vec::with_capacity(total_steps),
        ask_depth: Vec::with_capacity(total_steps),
        step_volume: Vec::with_capacity(total_steps),
        minute_volume: Vec::with_capacity(total_steps),
        trades: Vec::new(),
        inventories: InventorySeries::with_capacity(total_steps),
        ins_first_order_step: None,
        ins_exhausted_step: None,
    };

    let mut book = OrderBook::new(config.tick_size);
    let mut next_order_id = 0u64;
    let mut published_mid = config.initial_price;
    let mut mid_delta: Option<f64> = None;

    let window = config.steps_per_minute() as usize;
    let mut minute_ring = vec![0u32; window];
    let mut minute_sum = 0u64;

    let mut kernel_rng = stream_rng(config.seed, KERNEL_STREAM);
    let mut order: Vec<usize> = (0..n_agents).collect();
    let mut actions: Vec<AgentAction> = Vec::with_capacity(16);

    for step in 0..config.total_steps {
        let view = MarketView {
            step,
            mid: published_mid,
            mid_delta,
            fundamental: config.fundamental[step as usize],
            minute_volume: minute_sum,
            tick_size: config.tick_size,
            steps_per_second: config.steps_per_second(),
        };
        if config.shuffle_agents {
            order.shuffle(&mut kernel_rng);
        }

        let mut step_volume = 0u32;
        for &i in &order {
            let slot = &mut agents[i];
            if step < slot.active_from {
                continue;
            }
            actions.clear();
            {
                let own = OwnView {
                    resting: &ledgers[i].resting,
                    position: ledgers[i].position,
                };
                slot.behavior
                    .step(&view, &own, &config.common, &mut slot.rng, &mut actions);
            }
            let agent_id = AgentId(i as u32);
            for action in &actions {
                match *action {
                    AgentAction::Cancel(id) => {
                        if book.cancel(id) {
                            let resting = &mut ledgers[i].resting;
                            if let Some(pos) = resting.iter().position(|o| o.id == id) {
                                resting.swap_remove(pos);
                            }
                        }
                    }
                    AgentAction::SubmitLimit {
                        side,
                        price,
                        volume,
                    } => {
                        next_order_id += 1;
                        let order =
                            Order::limit(OrderId(next_order_id), agent_id, side, price, volume, step);
                        let trades = book
                            .submit_limit(&order)
                            .map_err(|source| SimError::Order { agent: agent_id, source })?;
                        let filled = settle_trades(
                            &trades,
                            side,
                            i,
                            &kinds,
                            &mut ledgers,
                            &mut kind_totals,
                        );
                        step_volume += filled;
                        record.trades.extend_from_slice(&trades);
                        if filled < volume {
                            ledgers[i].resting.push(OwnOrder {
                                id: order.id,
                                side,
                                price,
                                remaining: volume - filled,
                            });
                        }
                    }
                    AgentAction::SubmitMarket { side, volume } => {
                        next_order_id += 1;
                        let order =
                            Order::market(OrderId(next_order_id), agent_id, side, volume, step);
                        let trades = book
                            .submit_market(&order)
                            .map_err(|source| SimError::Order { agent: agent_id, source })?;
                        let filled = settle_trades(
                            &trades,
                            side,
                            i,
                            &kinds,
                            &mut ledgers,
                            &mut kind_totals,
                        );
                        step_volume += filled;
                        record.trades.extend_from_slice(&trades);
                    }
                }
            }
        }

        let snap = book.snapshot(step);
        let slot = step as usize % window;
        minute_sum += step_volume as u64;
        minute_sum -= minute_ring[slot] as u64;
        minute_ring[slot] = step_volume;

        record.mid.push(snap.mid_price);
        record.best_bid.push(snap.best_bid);
        record.best_ask.push(snap.best_ask);
        record.bid_depth.push(snap.bid_depth);
        record.ask_depth.push(snap.ask_depth);
        record.step_volume.push(step_volume);
        record.minute_volume.push(minute_sum);
        record.inventories.push(&kind_totals);

        mid_delta = match snap.mid_price {
            Some(m) => {
                let delta = m - published_mid;
                published_mid = m;
                Some(delta)
            }
            None => None,
        };
    }

    for slot in &agents {
        if let Behavior::Institutional(ins) = &slot.behavior {
            record.ins_first_order_step = ins.first_order_at();
            record.ins_exhausted_step = ins.exhausted_at();
        }
    }
    Ok(record)
}

/// Book-keep a batch of fills belonging to one taker order. Returns the
/// total filled volume.
fn settle_trades(
    trades: &[Trade],
    taker_side: Side,
    taker_index: usize,
    kinds: &[TraderKind],
    ledgers: &mut [Ledger],
    kind_totals: &mut [i64; 7],
) -> u32 {
    let mut filled = 0u32;
    let sign = taker_side.sign();
    for trade in trades {
        let volume = trade.volume as i64;
        let maker_index = trade.maker_agent_id.0 as usize;
        ledgers[taker_index].position += sign * volume;
        ledgers[maker_index].position -= sign * volume;
        kind_totals[kinds[taker_index].index()] += sign * volume;
        kind_totals[kinds[maker_index].index()] -= sign * volume;
        let resting = &mut ledgers[maker_index].resting;
        if let Some(pos) = resting.iter().position(|o| o.id == trade.maker_order_id) {
            if resting[pos].remaining <= trade.volume {
                resting.swap_remove(pos);
            } else {
                resting[pos].remaining -= trade.volume;
            }
        }
        filled += trade.volume;
    }
    filled
}
