//! High-frequency agent-based market simulator.
//!
//! The crate simulates a single security traded on a central limit order
//! book at 100 ms resolution. Heterogeneous trader populations (value,
//! momentum, noise, market making, block execution, and shock traders)
//! interact through a price-time-priority matching engine, producing
//! realistic intraday price dynamics.
//!
//! On top of the simulator sit:
//! - [`stylized`]: return-series summary statistics (tail index,
//!   volatility, autocorrelation structure) and a weighted distance
//!   between simulated and reference data,
//! - [`calibrate`]: surrogate-assisted search plus grid refinement over
//!   the behavioural parameter space, with p-value and moment-coverage
//!   validation,
//! - [`scenarios`]: flash crash and mini flash crash experiment
//!   harnesses with Monte Carlo condition sweeps,
//! - [`signal`]: extraction of a fundamental value series from observed
//!   prices via a Kalman smoother.
//!
//! Simulation output is a pure function of the run configuration: the
//! same [`sim::SimConfig`] (seed included) always produces an identical
//! [`sim::SimRecord`].

pub mod agents;
pub mod calibrate;
pub mod market;
pub mod rng;
pub mod scenarios;
pub mod signal;
pub mod sim;
pub mod stylized;

pub use market::{Order, OrderBook, OrderId, Side, Trade};
pub use sim::{run, SimConfig, SimRecord};
