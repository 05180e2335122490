use super::bootstrap::DistanceWeights;
use super::moments::{moment_vector, MomentVector};
use super::returns::ReturnSeries;
use super::StatsError;

/// The four differential quantities between two moment vectors:
/// |Hill difference|, |volatility difference|, mean absolute return-ACF
/// difference over the nine lags, and mean absolute squared-return-ACF
/// difference over the twelve lags.
pub fn distance_components(a: &MomentVector, b: &MomentVector) -> [f64; 4] {
    let mean_abs_diff = |xs: &[f64], ys: &[f64]| {
        xs.iter()
            .zip(ys)
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>()
            / xs.len() as f64
    };
    [
        (a.hill - b.hill).abs(),
        (a.volatility - b.volatility).abs(),
        mean_abs_diff(&a.acf_returns, &b.acf_returns),
        mean_abs_diff(&a.acf_squared, &b.acf_squared),
    ]
}

/// Weighted sum of the four differentials.
pub fn weighted_distance(components: &[f64; 4], weights: &DistanceWeights) -> f64 {
    components
        .iter()
        .zip(&weights.weights)
        .map(|(c, w)| c * w)
        .sum()
}

/// Stylised facts distance between two moment vectors.
pub fn distance_vectors(sim: &MomentVector, hist: &MomentVector, weights: &DistanceWeights) -> f64 {
    weighted_distance(&distance_components(sim, hist), weights)
}

/// Stylised facts distance between a simulated and a reference return
/// series.
pub fn distance(
    sim: &ReturnSeries,
    hist: &ReturnSeries,
    weights: &DistanceWeights,
) -> Result<f64, StatsError> {
    Ok(distance_vectors(
        &moment_vector(sim)?,
        &moment_vector(hist)?,
        weights,
    ))
}
