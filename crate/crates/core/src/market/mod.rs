//! Limit order book domain types and the matching engine.

mod book;
mod types;

pub use book::{BookSnapshot, OrderBook, DEPTH_LEVELS};
pub use types::{
    price_to_ticks, ticks_to_price, validate_tick_aligned, AgentId, Order, OrderError, OrderId,
    OrderKind, Side, Ticks, Trade,
};
