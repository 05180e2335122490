use std::collections::{BTreeMap, HashMap, VecDeque};

use super::types::{
    ticks_to_price, AgentId, Order, OrderError, OrderId, OrderKind, Side, Ticks, Trade,
};

/// Number of price levels per side aggregated into snapshot depth.
pub const DEPTH_LEVELS: usize = 10;

#[derive(Debug, Clone, Copy)]
struct Resting {
    id: OrderId,
    agent_id: AgentId,
    volume: u32,
}

/// Price-time-priority limit order book.
///
/// Each side is a map from price level to a FIFO queue of resting
/// orders. Incoming orders match against the opposite side best price
/// first, oldest order first within a level; crossing limit orders
/// execute immediately and never rest, so `best bid < best ask` holds
/// whenever both sides are populated.
#[derive(Debug, Clone)]
pub struct OrderBook {
    tick_size: f64,
    bids: BTreeMap<Ticks, VecDeque<Resting>>,
    asks: BTreeMap<Ticks, VecDeque<Resting>>,
    /// Resting order id -> (side, level) for O(log n) cancellation.
    index: HashMap<OrderId, (Side, Ticks)>,
}

/// Published book state at the end of a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BookSnapshot {
    pub step: u32,
    pub best_bid: Option<Ticks>,
    pub best_ask: Option<Ticks>,
    /// Mid-price in price units, present iff both sides are quoted.
    pub mid_price: Option<f64>,
    /// Total resting contracts over the best `DEPTH_LEVELS` bid levels.
    pub bid_depth: u32,
    /// Total resting contracts over the best `DEPTH_LEVELS` ask levels.
    pub ask_depth: u32,
}

impl OrderBook {
    pub fn new(tick_size: f64) -> OrderBook {
        OrderBook {
            tick_size,
            bids: BTreeMap::new(),
            asks: BTreeMap::new(),
            index: HashMap::new(),
        }
    }

    pub fn tick_size(&self) -> f64 {
        self.tick_size
    }

    pub fn best_bid(&self) -> Option<Ticks> {
        self.bids.last_key_value().map(|(&p, _)| p)
    }

    pub fn best_ask(&self) -> Option<Ticks> {
        self.asks.first_key_value().map(|(&p, _)| p)
    }

    /// Submit a limit order. Returns the trades generated while the
    /// order crossed the book, in execution order; any unfilled
    /// remainder rests at the limit price.
    pub fn submit_limit(&mut self, order: &Order) -> Result<Vec<Trade>, OrderError> {
        if order.kind != OrderKind::Limit {
            return Err(OrderError::WrongKind {
                id: order.id,
                expected: OrderKind::Limit,
            });
        }
        let price = order.price.ok_or(OrderError::MissingLimitPrice { id: order.id })?;
        if price <= 0 {
            return Err(OrderError::NonPositivePrice {
                id: order.id,
                price,
            });
        }
        if order.volume == 0 {
            return Err(OrderError::NonPositiveVolume { id: order.id });
        }

        let mut remaining = order.volume;
        let trades = self.match_against(order, Some(price), &mut remaining);
        if remaining > 0 {
            let book_side = match order.side {
                Side::Buy => &mut self.bids,
                Side::Sell => &mut self.asks,
            };
            book_side.entry(price).or_default().push_back(Resting {
                id: order.id,
                agent_id: order.agent_id,
                volume: remaining,
            });
            self.index.insert(order.id, (order.side, price));
        }
        debug_assert!(self.not_crossed());
        Ok(trades)
    }

    /// Submit a market order. Consumes the opposite side best price
    /// first; any remainder left when the opposite side empties is
    /// discarded (fill-and-kill).
    pub fn submit_market(&mut self, order: &Order) -> Result<Vec<Trade>, OrderError> {
        if order.kind != OrderKind::Market {
            return Err(OrderError::WrongKind {
                id: order.id,
                expected: OrderKind::Market,
            });
        }
        if order.volume == 0 {
            return Err(OrderError::NonPositiveVolume { id: order.id });
        }
        let mut remaining = order.volume;
        Ok(self.match_against(order, None, &mut remaining))
    }

    fn match_against(
        &mut self,
        order: &Order,
        limit: Option<Ticks>,
        remaining: &mut u32,
    ) -> Vec<Trade> {
        let mut trades = Vec::new();
        while *remaining > 0 {
            let entry = match order.side {
                Side::Buy => self.asks.first_entry(),
                Side::Sell => self.bids.last_entry(),
            };
            let Some(mut entry) = entry else { break };
            let level = *entry.key();
            let crosses = match (order.side, limit) {
                (_, None) => true,
                (Side::Buy, Some(p)) => level <= p,
                (Side::Sell, Some(p)) => level >= p,
            };
            if !crosses {
                break;
            }
            let queue = entry.get_mut();
            while *remaining > 0 {
                let Some(front) = queue.front_mut() else { break };
                let fill = front.volume.min(*remaining);
                trades.push(Trade {
                    step: order.submit_step,
                    price: level,
                    volume: fill,
                    maker_order_id: front.id,
                    taker_order_id: order.id,
                    maker_agent_id: front.agent_id,
                    taker_agent_id: order.agent_id,
                });
                front.volume -= fill;
                *remaining -= fill;
                if front.volume == 0 {
                    self.index.remove(&front.id);
                    queue.pop_front();
                }
            }
            if queue.is_empty() {
                entry.remove();
            }
        }
        trades
    }

    /// Remove a resting order. Returns whether the order was present;
    /// cancelling an already-filled or unknown id is not an error
    /// because cancellations race with fills.
    pub fn cancel(&mut self, id: OrderId) -> bool {
        let Some((side, level)) = self.index.remove(&id) else {
            return false;
        };
        let book_side = match side {
            Side::Buy => &mut self.bids,
            Side::Sell => &mut self.asks,
        };
        let queue = book_side
            .get_mut(&level)
            .expect("indexed order must have a level");
        let pos = queue
            .iter()
            .position(|r| r.id == id)
            .expect("indexed order must be in its level queue");
        queue.remove(pos);
        if queue.is_empty() {
            book_side.remove(&level);
        }
        true
    }

    pub fn snapshot(&self, step: u32) -> BookSnapshot {
        let best_bid = self.best_bid();
        let best_ask = self.best_ask();
        let mid_price = match (best_bid, best_ask) {
            (Some(b), Some(a)) => Some(ticks_to_price(b + a, self.tick_size) / 2.0),
            _ => None,
        };
        BookSnapshot {
            step,
            best_bid,
            best_ask,
            mid_price,
            bid_depth: Self::side_depth(self.bids.values().rev()),
            ask_depth: Self::side_depth(self.asks.values()),
        }
    }

    fn side_depth<'a>(levels: impl Iterator<Item = &'a VecDeque<Resting>>) -> u32 {
        levels
            .take(DEPTH_LEVELS)
            .flat_map(|q| q.iter())
            .map(|r| r.volume)
            .sum()
    }

    /// Remaining volume of a resting order, if still in the book.
    pub fn resting_volume(&self, id: OrderId) -> Option<u32> {
        let (side, level) = *self.index.get(&id)?;
        let book_side = match side {
            Side::Buy => &self.bids,
            Side::Sell => &self.asks,
        };
        book_side
            .get(&level)?
            .iter()
            .find(|r| r.id == id)
            .map(|r| r.volume)
    }

    fn not_crossed(&self) -> bool {
        match (self.best_bid(), self.best_ask()) {
            (Some(b), Some(a)) => b < a,
            _ => true,
        }
    }
}
