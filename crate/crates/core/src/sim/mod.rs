//! Deterministic step-loop simulation of one trading session.

mod config;
mod kernel;
pub mod presets;
mod record;

pub use config::{ConfigError, SimConfig};
pub use kernel::{run, SimError};
pub use record::{InventorySeries, SimRecord};

/// Format a time of day given in milliseconds after midnight.
pub fn format_time_ms(ms_of_day: u64) -> String {
    let ms = ms_of_day % 1000;
    let secs = ms_of_day / 1000;
    format!(
        "{:02}:{:02}:{:02}.{:03}",
        secs / 3600,
        (secs / 60) % 60,
        secs % 60,
        ms
    )
}
