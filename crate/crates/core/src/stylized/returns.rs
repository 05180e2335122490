use super::StatsError;

/// Second-level simple returns of the mid-price, warm-up excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries(pub Vec<f64>);

impl ReturnSeries {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Collapse a per-step mid series to one value per second (the last
/// snapshot within the second), carrying the previous value forward
/// through seconds with no valid mid.
pub fn per_second_mids(
    mid: &[Option<f64>],
    steps_per_second: u32,
) -> Result<Vec<f64>, StatsError> {
    let sps = steps_per_second as usize;
    if mid.len() < sps {
        return Err(StatsError::TooShort {
            len: mid.len(),
            need: sps,
        });
    }
    let seconds = mid.len() / sps;
    let mut out = Vec::with_capacity(seconds);
    let mut last: Option<f64> = None;
    for s in 0..seconds {
        let window = &mid[s * sps..(s + 1) * sps];
        if let Some(value) = window.iter().rev().flatten().next() {
            last = Some(*value);
        }
        match last {
            Some(v) => out.push(v),
            // No mid so far in the session: backfill once one appears.
            None => out.push(f64::NAN),
        }
    }
    let first_valid = out
        .iter()
        .position(|v| !v.is_nan())
        .ok_or(StatsError::AllMidsAbsent)?;
    let fill = out[first_valid];
    for v in &mut out[..first_valid] {
        *v = fill;
    }
    Ok(out)
}

/// Resample a per-step mid series into second-level simple returns,
/// dropping the warm-up interval.
pub fn resample_returns(
    mid: &[Option<f64>],
    warmup_steps: u32,
    steps_per_second: u32,
) -> Result<ReturnSeries, StatsError> {
    let per_second = per_second_mids(mid, steps_per_second)?;
    let warmup_seconds = (warmup_steps / steps_per_second) as usize;
    if per_second.len() < warmup_seconds + 2 {
        return Err(StatsError::TooShort {
            len: per_second.len(),
            need: warmup_seconds + 2,
        });
    }
    let session = &per_second[warmup_seconds..];
    let returns = session
        .windows(2)
        .map(|w| w[1] / w[0] - 1.0)
        .collect::<Vec<f64>>();
    Ok(ReturnSeries(returns))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn steps_of(seconds: &[Option<f64>]) -> Vec<Option<f64>> {
        // One snapshot per step; the per-second value is the last one.
        seconds
            .iter()
            .flat_map(|&v| std::iter::repeat(v).take(10))
            .collect()
    }

    #[test]
    fn constant_mid_gives_zero_returns() {
        let mid = steps_of(&[Some(100.0); 30]);
        let r = resample_returns(&mid, 0, 10).unwrap();
        assert_eq!(r.len(), 29);
        assert!(r.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn simple_returns_are_price_ratios() {
        let mid = steps_of(&[Some(100.0), Some(101.0), Some(100.0)]);
        let r = resample_returns(&mid, 0, 10).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r.as_slice()[0] - 0.01).abs() < 1e-12);
        assert!((r.as_slice()[1] - (100.0 / 101.0 - 1.0)).abs() < 1e-12);
        assert!((r.as_slice()[1] + 0.009901).abs() < 1e-6);
    }

    #[test]
    fn last_snapshot_within_second_wins() {
        let mut mid = vec![Some(100.0); 10];
        mid.extend([None, Some(105.0), Some(106.0), None, None, None, None, None, None, None]);
        let per_second = per_second_mids(&mid, 10).unwrap();
        assert_eq!(per_second, vec![100.0, 106.0]);
    }

    #[test]
    fn gaps_carry_forward_and_leading_gap_backfills() {
        let mid = steps_of(&[None, Some(100.0), None, Some(102.0)]);
        let per_second = per_second_mids(&mid, 10).unwrap();
        assert_eq!(per_second, vec![100.0, 100.0, 100.0, 102.0]);
    }

    #[test]
    fn all_absent_is_an_error() {
        let mid = steps_of(&[None; 20]);
        assert_eq!(
            per_second_mids(&mid, 10).unwrap_err(),
            StatsError::AllMidsAbsent
        );
    }

    #[test]
    fn session_length_accounting() {
        // 9 hour session minus 5 minute warm-up: 32,400 - 300 seconds,
        // one fewer return than prices.
        let mid = vec![Some(1000.0); 324_000];
        let r = resample_returns(&mid, 3_000, 10).unwrap();
        assert_eq!(r.len(), 32_099);
    }
}
