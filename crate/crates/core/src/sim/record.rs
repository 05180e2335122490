use crate::agents::TraderKind;
use crate::market::{Ticks, Trade};

/// Per-step signed inventory (cumulative filled volume) of each trader
/// population.
#[derive(Debug, Clone, Default)]
pub struct InventorySeries {
    series: [Vec<i64>; 7],
}

impl InventorySeries {
    pub fn with_capacity(steps: usize) -> InventorySeries {
        InventorySeries {
            series: std::array::from_fn(|_| Vec::with_capacity(steps)),
        }
    }

    pub fn push(&mut self, totals: &[i64; 7]) {
        for (series, &value) in self.series.iter_mut().zip(totals) {
            series.push(value);
        }
    }

    pub fn of(&self, kind: TraderKind) -> &[i64] {
        &self.series[kind.index()]
    }
}

/// Complete recorded output of one simulation run.
#[derive(Debug, Clone)]
pub struct SimRecord {
    pub total_steps: u32,
    pub warmup_steps: u32,
    pub step_ms: u32,
    pub session_start_secs: u32,
    pub tick_size: f64,
    pub initial_price: f64,
    /// Snapshot mid per step; `None` while the book was one-sided.
    pub mid: Vec<Option<f64>>,
    pub best_bid: Vec<Option<Ticks>>,
    pub best_ask: Vec<Option<Ticks>>,
    pub bid_depth: Vec<u32>,
    pub ask_depth: Vec<u32>,
    /// Contracts traded within each step.
    pub step_volume: Vec<u32>,
    /// Trailing one-minute traded volume at the end of each step.
    pub minute_volume: Vec<u64>,
    pub trades: Vec<Trade>,
    pub inventories: InventorySeries,
    /// Step of the first institutional order, when one was configured.
    pub ins_first_order_step: Option<u32>,
    /// Step at which the institutional inventory hit zero.
    pub ins_exhausted_step: Option<u32>,
}

impl SimRecord {
    pub fn steps_per_second(&self) -> u32 {
        1000 / self.step_ms
    }

    /// Wall-clock time of a step, milliseconds after midnight.
    pub fn step_time_ms(&self, step: u32) -> u64 {
        self.session_start_secs as u64 * 1000 + step as u64 * self.step_ms as u64
    }

    /// First step at or after a wall-clock time (seconds after midnight).
    pub fn step_of_time(&self, secs_of_day: u32) -> u32 {
        secs_of_day.saturating_sub(self.session_start_secs) * self.steps_per_second()
    }

    /// Mid series with one-sided gaps carried forward from the last
    /// valid mid (the initial price before the first quote).
    pub fn forward_filled_mid(&self) -> Vec<f64> {
        let mut filled = Vec::with_capacity(self.mid.len());
        let mut last = self.initial_price;
        for mid in &self.mid {
            if let Some(m) = *mid {
                last = m;
            }
            filled.push(last);
        }
        filled
    }
}
