use serde::{Deserialize, Serialize};
use std::fmt;

/// Prices are held as signed integer tick counts so that matching and
/// price comparison are exact. `tick_size` converts to price units.
pub type Ticks = i64;

/// Convert a price in price units to ticks, rounding to the nearest tick.
pub fn price_to_ticks(price: f64, tick_size: f64) -> Ticks {
    (price / tick_size).round() as Ticks
}

/// Convert a tick count back to price units.
pub fn ticks_to_price(ticks: Ticks, tick_size: f64) -> f64 {
    ticks as f64 * tick_size
}

/// Check that a raw price is an exact multiple of the tick size
/// (within one part in 10^9 to absorb decimal representation error).
pub fn validate_tick_aligned(price: f64, tick_size: f64) -> Result<Ticks, OrderError> {
    let ticks = price / tick_size;
    if (ticks - ticks.round()).abs() > 1e-9 * ticks.abs().max(1.0) {
        return Err(OrderError::MisalignedPrice { price, tick_size });
    }
    Ok(ticks.round() as Ticks)
}

/// Order side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Buy => Side::Sell,
            Side::Sell => Side::Buy,
        }
    }

    /// +1 for buys, -1 for sells; used for signed inventory updates.
    pub fn sign(self) -> i64 {
        match self {
            Side::Buy => 1,
            Side::Sell => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderKind {
    Limit,
    Market,
}

/// Globally unique order sequence number. Assigned by the submission
/// counter, so ids strictly increase in submission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderId(pub u64);

impl fmt::Display for OrderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identifier of the trader that owns an order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Order {
    pub id: OrderId,
    pub agent_id: AgentId,
    pub side: Side,
    pub kind: OrderKind,
    /// Limit price in ticks; `None` for market orders.
    pub price: Option<Ticks>,
    /// Contracts, strictly positive.
    pub volume: u32,
    pub submit_step: u32,
}

impl Order {
    pub fn limit(
        id: OrderId,
        agent_id: AgentId,
        side: Side,
        price: Ticks,
        volume: u32,
        submit_step: u32,
    ) -> Order {
        Order {
            id,
            agent_id,
            side,
            kind: OrderKind::Limit,
            price: Some(price),
            volume,
            submit_step,
        }
    }

    pub fn market(
        id: OrderId,
        agent_id: AgentId,
        side: Side,
        volume: u32,
        submit_step: u32,
    ) -> Order {
        Order {
            id,
            agent_id,
            side,
            kind: OrderKind::Market,
            price: None,
            volume,
            submit_step,
        }
    }
}

/// One execution. `price` is always the resting (maker) order's price.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trade {
    pub step: u32,
    pub price: Ticks,
    pub volume: u32,
    pub maker_order_id: OrderId,
    pub taker_order_id: OrderId,
    pub maker_agent_id: AgentId,
    pub taker_agent_id: AgentId,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrderError {
    NonPositiveVolume { id: OrderId },
    NonPositivePrice { id: OrderId, price: Ticks },
    MissingLimitPrice { id: OrderId },
    MisalignedPrice { price: f64, tick_size: f64 },
    WrongKind { id: OrderId, expected: OrderKind },
}

impl fmt::Display for OrderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderError::NonPositiveVolume { id } => {
                write!(f, "order {id}: volume must be positive")
            }
            OrderError::NonPositivePrice { id, price } => {
                write!(f, "order {id}: price {price} ticks must be positive")
            }
            OrderError::MissingLimitPrice { id } => {
                write!(f, "order {id}: limit order without a price")
            }
            OrderError::MisalignedPrice { price, tick_size } => {
                write!(f, "price {price} is not a multiple of tick size {tick_size}")
            }
            OrderError::WrongKind { id, expected } => {
                write!(f, "order {id}: expected a {expected:?} order")
            }
        }
    }
}

impl std::error::Error for OrderError {}
