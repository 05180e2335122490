use super::{AgentAction, MarketView};
use crate::market::Side;

/// Block-execution (volume participation) algorithm parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstitutionalParams {
    /// Target execution rate as a fraction of the previous minute's
    /// traded volume.
    pub rate: f64,
    /// Contracts to sell.
    pub inventory: u64,
    /// Seconds between consecutive market orders.
    pub interval_seconds: u32,
    /// Activation wall-clock time, seconds after midnight.
    pub start_secs: u32,
}

/// Seller working a large parent order at a fixed participation rate.
///
/// After activation it submits one market sell every
/// `interval_seconds`, sized at `rate * minute_volume * interval / 60`
/// with a floor of one contract, until the inventory is gone. Price
/// and time never enter the sizing decision.
#[derive(Debug, Clone, Copy)]
pub struct InstitutionalTrader {
    rate: f64,
    remaining: u64,
    interval_seconds: u32,
    start_step: u32,
    exhausted_at: Option<u32>,
    first_order_at: Option<u32>,
}

impl InstitutionalTrader {
    pub fn new(params: InstitutionalParams, session_start_secs: u32, steps_per_second: u32) -> InstitutionalTrader {
        let start_step = params.start_secs.saturating_sub(session_start_secs) * steps_per_second;
        InstitutionalTrader {
            rate: params.rate,
            remaining: params.inventory,
            interval_seconds: params.interval_seconds,
            start_step,
            exhausted_at: None,
            first_order_at: None,
        }
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    /// Step at which the inventory hit zero, if it did.
    pub fn exhausted_at(&self) -> Option<u32> {
        self.exhausted_at
    }

    /// Step of the first submitted order, if any.
    pub fn first_order_at(&self) -> Option<u32> {
        self.first_order_at
    }

    /// Order size for a given trailing minute volume.
    pub fn order_volume(rate: f64, minute_volume: u64, interval_seconds: u32) -> u64 {
        let vol = (minute_volume as f64 * rate * interval_seconds as f64 / 60.0).floor() as u64;
        vol.max(1)
    }

    pub fn step(&mut self, view: &MarketView, out: &mut Vec<AgentAction>) {
        if view.step <= self.start_step || self.remaining == 0 {
            return;
        }
        let interval_steps = self.interval_seconds * view.steps_per_second;
        if view.step % interval_steps != 0 {
            return;
        }
        let vol = Self::order_volume(self.rate, view.minute_volume, self.interval_seconds);
        out.push(AgentAction::SubmitMarket {
            side: Side::Sell,
            volume: vol.min(u32::MAX as u64) as u32,
        });
        self.first_order_at.get_or_insert(view.step);
        self.remaining = self.remaining.saturating_sub(vol);
        if self.remaining == 0 {
            self.exhausted_at = Some(view.step);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::test_view;

    fn params() -> InstitutionalParams {
        InstitutionalParams {
            rate: 0.09,
            inventory: 120_000,
            interval_seconds: 12,
            start_secs: 14 * 3600 + 30 * 60,
        }
    }

    #[test]
    fn order_volume_tracks_participation_rate() {
        // 10_000 * 0.09 * 12 / 60 = 180
        assert_eq!(InstitutionalTrader::order_volume(0.09, 10_000, 12), 180);
        // Floored, with a minimum of one contract.
        assert_eq!(InstitutionalTrader::order_volume(0.09, 7, 12), 1);
        assert_eq!(InstitutionalTrader::order_volume(0.09, 0, 12), 1);
    }

    #[test]
    fn inactive_before_start_time_and_when_empty() {
        let mut ins = InstitutionalTrader::new(params(), 8 * 3600, 10);
        // 14:30 is 6.5 hours after the 8:00 open -> step 234_000.
        assert_eq!(ins.start_step, 234_000);
        let mut out = Vec::new();
        let mut view = test_view(1050.0);
        view.minute_volume = 10_000;
        // A multiple of the 120-step interval, but before activation.
        view.step = 233_880;
        ins.step(&view, &mut out);
        assert!(out.is_empty());
        // Exactly at the activation boundary: still inactive (strictly after).
        view.step = 234_000;
        ins.step(&view, &mut out);
        assert!(out.is_empty());
        // First interval boundary after activation fires.
        view.step = 234_120;
        ins.step(&view, &mut out);
        assert_eq!(
            out,
            vec![AgentAction::SubmitMarket {
                side: Side::Sell,
                volume: 180
            }]
        );
        assert_eq!(ins.remaining(), 120_000 - 180);

        // Drained inventory goes quiet.
        let mut ins = InstitutionalTrader::new(
            InstitutionalParams {
                inventory: 0,
                ..params()
            },
            8 * 3600,
            10,
        );
        out.clear();
        ins.step(&view, &mut out);
        assert!(out.is_empty());
    }

    #[test]
    fn fires_once_per_interval() {
        let mut ins = InstitutionalTrader::new(params(), 8 * 3600, 10);
        let mut out = Vec::new();
        let mut view = test_view(1050.0);
        view.minute_volume = 10_000;
        for step in 234_001..234_500 {
            view.step = step;
            ins.step(&view, &mut out);
        }
        // Interval boundaries in range: 234_120, 234_240, 234_360, 234_480.
        assert_eq!(out.len(), 4);
        assert_eq!(ins.first_order_at(), Some(234_120));
    }

    #[test]
    fn records_exhaustion_step() {
        let mut ins = InstitutionalTrader::new(
            InstitutionalParams {
                inventory: 200,
                ..params()
            },
            8 * 3600,
            10,
        );
        let mut out = Vec::new();
        let mut view = test_view(1050.0);
        view.minute_volume = 100_000; // order volume 1800 >> inventory
        view.step = 234_120;
        ins.step(&view, &mut out);
        assert_eq!(ins.remaining(), 0);
        assert_eq!(ins.exhausted_at(), Some(234_120));
        // No further orders once empty.
        out.clear();
        view.step = 234_240;
        ins.step(&view, &mut out);
        assert!(out.is_empty());
    }
}
