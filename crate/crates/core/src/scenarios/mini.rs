use serde::{Deserialize, Serialize};

use super::ScenarioError;

/// Mini crash detector settings.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MiniCrashParams {
    /// Threshold in minute-level return standard deviations (2, 3 or 4
    /// in the standard experiments).
    pub k: f64,
    /// Event window in seconds: the move and its reversal must fit
    /// inside one window.
    pub window_secs: usize,
    /// Fraction of the move that must be retraced inside the window
    /// for the event to count as reversed.
    pub recovery_fraction: f64,
}

impl MiniCrashParams {
    pub fn with_k(k: f64) -> MiniCrashParams {
        MiniCrashParams {
            k,
            window_secs: 600,
            recovery_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MiniCrashKind {
    Crash,
    FlareUp,
}

/// One detected peak/trough event.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MiniCrashEvent {
    pub kind: MiniCrashKind,
    pub k: f64,
    /// Second index of the extremum within the analysed series.
    pub extremum_second: usize,
    /// Second index of the pre-extremum reference.
    pub reference_second: usize,
    /// Second index where the reversal threshold was first met.
    pub recovery_second: usize,
    /// Relative move from the reference to the extremum.
    pub move_fraction: f64,
    /// Topographic prominence of the extremum, in price units.
    pub prominence: f64,
    /// Minute-level return standard deviation used for the threshold.
    pub sigma_minute: f64,
}

/// Standard deviation of minute-level simple returns of a per-second
/// price series.
pub fn minute_return_sigma(per_second: &[f64]) -> Result<f64, ScenarioError> {
    let minutes: Vec<f64> = per_second
        .chunks(60)
        .filter(|c| c.len() == 60)
        .map(|c| c[59])
        .collect();
    if minutes.len() < 3 {
        return Err(ScenarioError::ZeroSigma);
    }
    let returns: Vec<f64> = minutes.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
    let n = returns.len();
    let mean = returns.iter().sum::<f64>() / n as f64;
    let var = returns.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1) as f64;
    let sigma = var.sqrt();
    if sigma == 0.0 || !sigma.is_finite() {
        return Err(ScenarioError::ZeroSigma);
    }
    Ok(sigma)
}

/// Turning points of a series. A maximum is the last index of a
/// (possibly flat) run before a strict down-move that reversed the
/// direction; minima mirror. The series start counts as the first
/// turning point.
pub fn local_extrema(series: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    let mut dir: i8 = 0;
    for t in 1..series.len() {
        let step = if series[t] > series[t - 1] {
            1
        } else if series[t] < series[t - 1] {
            -1
        } else {
            continue;
        };
        if step != dir {
            if step < 0 {
                maxima.push(t - 1);
            } else {
                minima.push(t - 1);
            }
            dir = step;
        }
    }
    (minima, maxima)
}

/// Topographic prominence of peaks: for each peak, extend left and
/// right until a strictly higher point (or the window edge); the peak
/// height above the higher of the two interval minima is its
/// prominence.
pub fn peak_prominences(series: &[f64], peaks: &[usize], radius: Option<usize>) -> Vec<f64> {
    peaks
        .iter()
        .map(|&peak| {
            let height = series[peak];
            let lo = radius.map_or(0, |r| peak.saturating_sub(r));
            let hi = radius.map_or(series.len() - 1, |r| (peak + r).min(series.len() - 1));

            let mut left_min = height;
            let mut i = peak;
            while i > lo && series[i - 1] <= height {
                i -= 1;
                left_min = left_min.min(series[i]);
            }

            let mut right_min = height;
            let mut j = peak;
            while j < hi && series[j + 1] <= height {
                j += 1;
                right_min = right_min.min(series[j]);
            }

            height - left_min.max(right_min)
        })
        .collect()
}

fn trough_prominences(series: &[f64], troughs: &[usize], radius: Option<usize>) -> Vec<f64> {
    let inverted: Vec<f64> = series.iter().map(|v| -v).collect();
    peak_prominences(&inverted, troughs, radius)
}

/// Detect mini flash crashes (and their upward mirror, flare-ups) in a
/// per-second mid series.
///
/// A crash is a trough whose relative move from the pre-trough
/// reference (the highest turning point inside the trailing window)
/// exceeds `k` minute-level return deviations, and which retraces at
/// least `recovery_fraction` of the move before the window anchored at
/// the reference closes. Its amplitude is the topographic prominence
/// of the trough within the window.
pub fn detect_mini_crashes(
    per_second: &[f64],
    params: &MiniCrashParams,
) -> Result<Vec<MiniCrashEvent>, ScenarioError> {
    let sigma = minute_return_sigma(per_second)?;
    let (minima, maxima) = local_extrema(per_second);
    let window = params.window_secs;

    let mut events = Vec::new();
    let mut scan = |candidates: &[usize], references: &[usize], kind: MiniCrashKind| {
        let prominences = match kind {
            MiniCrashKind::Crash => trough_prominences(per_second, candidates, Some(window)),
            MiniCrashKind::FlareUp => peak_prominences(per_second, candidates, Some(window)),
        };
        let mut suppressed_until = 0usize;
        for (&i, &prominence) in candidates.iter().zip(&prominences) {
            if i < suppressed_until {
                continue;
            }
            // Reference: best opposite turning point inside the window.
            let lo = i.saturating_sub(window);
            let mut reference: Option<usize> = None;
            for &j in references.iter().filter(|&&j| j >= lo && j < i) {
                let better = match (reference, kind) {
                    (None, _) => true,
                    (Some(r), MiniCrashKind::Crash) => per_second[j] >= per_second[r],
                    (Some(r), MiniCrashKind::FlareUp) => per_second[j] <= per_second[r],
                };
                if better {
                    reference = Some(j);
                }
            }
            let Some(j) = reference else { continue };
            let move_size = match kind {
                MiniCrashKind::Crash => per_second[j] - per_second[i],
                MiniCrashKind::FlareUp => per_second[i] - per_second[j],
            };
            let move_fraction = move_size / per_second[j];
            if move_fraction < params.k * sigma {
                continue;
            }
            // Reversal inside the window anchored at the reference.
            let deadline = (j + window).min(per_second.len() - 1);
            let target = params.recovery_fraction * move_size;
            let recovered = (i + 1..=deadline).find(|&l| match kind {
                MiniCrashKind::Crash => per_second[l] - per_second[i] >= target,
                MiniCrashKind::FlareUp => per_second[i] - per_second[l] >= target,
            });
            let Some(l) = recovered else { continue };
            events.push(MiniCrashEvent {
                kind,
                k: params.k,
                extremum_second: i,
                reference_second: j,
                recovery_second: l,
                move_fraction,
                prominence,
                sigma_minute: sigma,
            });
            suppressed_until = l;
        }
    };

    scan(&minima, &maxima, MiniCrashKind::Crash);
    scan(&maxima, &minima, MiniCrashKind::FlareUp);
    events.sort_by_key(|e| e.extremum_second);
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prominence_oracle() {
        let series = [1.0, 3.0, 2.0, 5.0, 1.0];
        let proms = peak_prominences(&series, &[1, 3], None);
        assert_eq!(proms, vec![1.0, 4.0]);
    }

    #[test]
    fn prominence_respects_window_radius() {
        let series = [9.0, 1.0, 1.0, 1.0, 3.0, 2.0, 2.5, 1.0, 1.0];
        let unbounded = peak_prominences(&series, &[4], None);
        assert_eq!(unbounded, vec![2.0]);
        // Inside a radius of 2 the right side only descends to 2.0.
        let windowed = peak_prominences(&series, &[4], Some(2));
        assert_eq!(windowed, vec![1.0]);
    }

    #[test]
    fn extrema_of_plateaued_series() {
        let series = [1.0, 2.0, 2.0, 1.0, 0.5, 0.5, 2.0];
        let (minima, maxima) = local_extrema(&series);
        // Maximum at the right edge of the [2.0, 2.0] plateau,
        // minimum at the right edge of the [0.5, 0.5] plateau; the
        // start counts as the initial minimum.
        assert_eq!(maxima, vec![2]);
        assert_eq!(minima, vec![0, 5]);
    }

    fn flat_session(len: usize, level: f64) -> Vec<f64> {
        vec![level; len]
    }

    /// Ambient noise so the minute sigma is small but non-zero.
    fn wavy_session(len: usize, level: f64, wave: f64) -> Vec<f64> {
        (0..len)
            .map(|t| level + wave * ((t as f64) * 0.05).sin())
            .collect()
    }

    #[test]
    fn monotone_series_has_no_events() {
        let series: Vec<f64> = (0..3600).map(|t| 1000.0 - t as f64 * 0.01).collect();
        let events = detect_mini_crashes(&series, &MiniCrashParams::with_k(2.0)).unwrap();
        assert!(events.is_empty());
    }

    #[test]
    fn flat_series_is_a_sigma_error() {
        let series = flat_session(3600, 1000.0);
        assert!(matches!(
            detect_mini_crashes(&series, &MiniCrashParams::with_k(2.0)),
            Err(ScenarioError::ZeroSigma)
        ));
    }

    #[test]
    fn v_shape_is_one_crash_for_all_k() {
        // 80 bp drop over 10 seconds, full recovery within 20 seconds,
        // embedded in a gently wavy hour.
        let mut series = wavy_session(3600, 1000.0, 0.02);
        let dip_start = 1800;
        for t in 0..10 {
            series[dip_start + t] = 1000.0 - 8.0 * (t as f64 + 1.0) / 10.0;
        }
        for t in 0..10 {
            series[dip_start + 10 + t] = 992.0 + 8.0 * (t as f64 + 1.0) / 10.0;
        }
        for k in [2.0, 3.0, 4.0] {
            let events = detect_mini_crashes(&series, &MiniCrashParams::with_k(k)).unwrap();
            let crashes: Vec<_> = events
                .iter()
                .filter(|e| e.kind == MiniCrashKind::Crash)
                .collect();
            assert_eq!(crashes.len(), 1, "k = {k}: {events:?}");
            let event = crashes[0];
            assert!(event.extremum_second.abs_diff(dip_start + 9) <= 1);
            assert!((event.prominence - 8.0).abs() < 0.1);
            assert!(event.move_fraction > 0.007 && event.move_fraction < 0.009);
        }
    }

    #[test]
    fn unrecovered_drop_is_not_an_event() {
        // Drop that stays down: no reversal, no event.
        let mut series = wavy_session(3600, 1000.0, 0.02);
        for t in 1800..3600 {
            series[t] -= 8.0;
        }
        // Smooth the cliff into a two-second ramp.
        series[1800] = 996.0;
        let events = detect_mini_crashes(&series, &MiniCrashParams::with_k(2.0)).unwrap();
        assert!(
            events.iter().all(|e| e.kind != MiniCrashKind::Crash),
            "{events:?}"
        );
    }

    #[test]
    fn mirroring_swaps_crashes_and_flare_ups() {
        let mut series = wavy_session(7200, 1000.0, 0.02);
        // One crash and one flare-up, well separated.
        for t in 0..20 {
            series[1000 + t] -= 6.0 * (1.0 - (t as f64 - 10.0).abs() / 10.0);
        }
        for t in 0..20 {
            series[4000 + t] += 9.0 * (1.0 - (t as f64 - 10.0).abs() / 10.0);
        }
        let params = MiniCrashParams::with_k(2.0);
        let events = detect_mini_crashes(&series, &params).unwrap();
        let crashes = events
            .iter()
            .filter(|e| e.kind == MiniCrashKind::Crash)
            .count();
        let flares = events
            .iter()
            .filter(|e| e.kind == MiniCrashKind::FlareUp)
            .count();
        assert_eq!((crashes, flares), (1, 1), "{events:?}");

        let mean = series.iter().sum::<f64>() / series.len() as f64;
        let mirrored: Vec<f64> = series.iter().map(|v| 2.0 * mean - v).collect();
        let mirrored_events = detect_mini_crashes(&mirrored, &params).unwrap();
        let m_crashes = mirrored_events
            .iter()
            .filter(|e| e.kind == MiniCrashKind::Crash)
            .count();
        let m_flares = mirrored_events
            .iter()
            .filter(|e| e.kind == MiniCrashKind::FlareUp)
            .count();
        assert_eq!((m_crashes, m_flares), (flares, crashes));
    }
}
