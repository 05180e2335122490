use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gbrt::{Gbrt, GbrtConfig};
use super::space::{halton_point, CalibrationSpace, CalibrationTheta};
use super::CalibrationError;
use crate::rng::{mix_seed, stream_rng};

/// A black-box objective: mean stylised-facts distance of a simulated
/// day at `theta` under one seed. Implementations must be thread-safe;
/// replications are evaluated in parallel.
pub trait Objective: Sync {
    fn eval(&self, theta: &CalibrationTheta, seed: u64) -> Result<f64, CalibrationError>;
}

impl<F> Objective for F
where
    F: Fn(&CalibrationTheta, u64) -> Result<f64, CalibrationError> + Sync,
{
    fn eval(&self, theta: &CalibrationTheta, seed: u64) -> Result<f64, CalibrationError> {
        self(theta, seed)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    /// Total simulator evaluations (points, not replications).
    pub budget: usize,
    /// Independent seeds averaged per point. The same seed set is used
    /// at every point (common random numbers).
    pub n_rep: usize,
    /// Fraction of the budget spent on the space-filling design.
    pub init_fraction: f64,
    /// Points evaluated per surrogate iteration.
    pub batch_size: usize,
    /// Global low-discrepancy candidates ranked per iteration.
    pub pool_size: usize,
    /// Additional candidates sampled around the incumbent per
    /// iteration, at a cycle of shrinking scales.
    pub local_pool: usize,
    pub gbrt: GbrtConfig,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            budget: 500,
            n_rep: 3,
            init_fraction: 0.25,
            batch_size: 8,
            pool_size: 10_000,
            local_pool: 2_000,
            gbrt: GbrtConfig::default(),
        }
    }
}

/// Relative perturbation scale (fraction of each bound span) for the
/// local candidate cloud around the incumbent.
const LOCAL_CLOUD_SCALE: f64 = 0.08;

/// Coordinate line probe offsets, as fractions of the current radius.
const LINE_FRACTIONS: [f64; 4] = [-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0];
/// Initial line probe radius as a fraction of the bound span, halved
/// after every full coordinate sweep.
const LINE_RADIUS: f64 = 0.12;
const LINE_SHRINK: f64 = 0.5;

fn local_candidates(
    space: &CalibrationSpace,
    incumbent: &CalibrationTheta,
    count: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<CalibrationTheta> {
    use rand::Rng;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    (0..count)
        .map(|s| {
            let mut a = incumbent.to_array();
            if s % 3 == 0 {
                for d in 0..7 {
                    let span = space.upper[d] - space.lower[d];
                    a[d] += LOCAL_CLOUD_SCALE * span * normal.sample(rng);
                }
            } else {
                let d = rng.random_range(0..7);
                let span = space.upper[d] - space.lower[d];
                a[d] += LOCAL_CLOUD_SCALE * span * normal.sample(rng);
            }
            space.clamp(&CalibrationTheta::from_array(a))
        })
        .collect()
}

/// Deterministic line probe through the incumbent along one
/// coordinate, cycled per iteration with a shrinking radius.
fn line_probe(
    space: &CalibrationSpace,
    incumbent: &CalibrationTheta,
    iteration: u64,
) -> Vec<CalibrationTheta> {
    let dim = (iteration % 7) as usize;
    let sweep = (iteration / 7) as i32;
    let radius = LINE_RADIUS * LINE_SHRINK.powi(sweep) * (space.upper[dim] - space.lower[dim]);
    LINE_FRACTIONS
        .iter()
        .map(|f| {
            let mut a = incumbent.to_array();
            a[dim] = (a[dim] + f * radius).clamp(space.lower[dim], space.upper[dim]);
            CalibrationTheta::from_array(a)
        })
        .collect()
}

/// One objective evaluation (a single replication).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EvalRow {
    pub theta: CalibrationTheta,
    pub d: f64,
    pub seed: u64,
    pub replication: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub theta_hat: CalibrationTheta,
    /// Mean distance of the incumbent.
    pub d_hat: f64,
    pub eval_log: Vec<EvalRow>,
    /// Cross-validation RMSE of the last fitted surrogate, if any
    /// surrogate iteration ran.
    pub surrogate_cv_rmse: Option<f64>,
}

struct Evaluator<'a, O: Objective + ?Sized> {
    objective: &'a O,
    rep_seeds: Vec<u64>,
    eval_log: Vec<EvalRow>,
    /// Worst finite mean observed; failures are penalized with it.
    worst: f64,
}

impl<'a, O: Objective + ?Sized> Evaluator<'a, O> {
    fn new(objective: &'a O, seed: u64, n_rep: usize) -> Self {
        Evaluator {
            objective,
            rep_seeds: (0..n_rep as u64).map(|r| mix_seed(seed, 0x5eed + r)).collect(),
            eval_log: Vec::new(),
            worst: 1.0,
        }
    }

    /// Evaluate a batch of points in parallel; returns mean distances.
    fn eval_batch(&mut self, points: &[CalibrationTheta]) -> Vec<f64> {
        let jobs: Vec<(usize, CalibrationTheta, u32, u64)> = points
            .iter()
            .enumerate()
            .flat_map(|(i, &theta)| {
                self.rep_seeds
                    .iter()
                    .enumerate()
                    .map(move |(r, &s)| (i, theta, r as u32, s))
            })
            .collect();
        let results: Vec<(usize, CalibrationTheta, u32, u64, Result<f64, CalibrationError>)> =
            jobs.into_par_iter()
                .map(|(i, theta, rep, seed)| {
                    let r = self.objective.eval(&theta, seed);
                    (i, theta, rep, seed, r)
                })
                .collect();

        let mut means = vec![0.0; points.len()];
        let mut counts = vec![0usize; points.len()];
        let mut failed = vec![false; points.len()];
        for (i, theta, replication, seed, result) in results {
            let d = match result {
                Ok(d) if d.is_finite() => d,
                _ => {
                    failed[i] = true;
                    self.worst
                }
            };
            self.eval_log.push(EvalRow {
                theta,
                d,
                seed,
                replication,
            });
            means[i] += d;
            counts[i] += 1;
        }
        for i in 0..means.len() {
            means[i] /= counts[i] as f64;
            if failed[i] {
                means[i] = means[i].max(self.worst);
            } else {
                self.worst = self.worst.max(means[i]);
            }
        }
        means
    }
}

/// Surrogate-guided global search: a low-discrepancy initial design,
/// then repeated rounds of fitting a boosted-tree surrogate to the
/// evaluated points and spending a batch on (a) a coordinate line
/// probe through the incumbent and (b) the most promising candidates
/// of a large ranked pool, until the budget is spent.
pub fn surrogate_search<O: Objective + ?Sized>(
    space: &CalibrationSpace,
    objective: &O,
    config: &SearchConfig,
    seed: u64,
) -> Result<CalibrationReport, CalibrationError> {
    if config.budget == 0 {
        return Err(CalibrationError::EmptyBudget);
    }
    let design_size = ((config.budget as f64 * config.init_fraction).ceil() as usize)
        .clamp(1, config.budget);

    let mut evaluator = Evaluator::new(objective, seed, config.n_rep.max(1));
    let mut xs: Vec<[f64; 7]> = Vec::with_capacity(config.budget);
    let mut ys: Vec<f64> = Vec::with_capacity(config.budget);
    let mut points: Vec<CalibrationTheta> = Vec::with_capacity(config.budget);
    let mut halton_cursor = 0usize;

    let design: Vec<CalibrationTheta> = (0..design_size)
        .map(|i| space.scale(halton_point(i)))
        .collect();
    halton_cursor += design_size;
    let means = evaluator.eval_batch(&design);
    for (theta, mean) in design.into_iter().zip(means) {
        xs.push(theta.to_array());
        ys.push(mean);
        points.push(theta);
    }

    let mut cv_rmse = None;
    let mut iteration = 0u64;
    while points.len() < config.budget {
        let model = Gbrt::fit(&xs, &ys, &config.gbrt);
        cv_rmse = Some(model.cv_rmse);
        let incumbent = ys
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite distances"))
            .map(|(i, _)| points[i])
            .expect("design evaluated");

        let take = config
            .batch_size
            .max(1)
            .min(config.budget - points.len());

        // Refinement half: a coordinate line probe through the
        // incumbent; exploration half: best surrogate-ranked
        // candidates from the local cloud plus the global pool.
        let mut batch = line_probe(space, &incumbent, iteration);
        batch.truncate(take);
        if batch.len() < take {
            let mut local_rng = stream_rng(seed, 0x10ca1 ^ iteration);
            let mut pool = local_candidates(space, &incumbent, config.local_pool, &mut local_rng);
            pool.extend(
                (0..config.pool_size).map(|i| space.scale(halton_point(halton_cursor + i))),
            );
            pool.sort_by(|a, b| {
                model
                    .predict(&a.to_array())
                    .partial_cmp(&model.predict(&b.to_array()))
                    .expect("finite predictions")
            });
            batch.extend(pool.into_iter().take(take - batch.len()));
        }
        halton_cursor += config.pool_size;
        let means = evaluator.eval_batch(&batch);
        for (theta, mean) in batch.into_iter().zip(means) {
            xs.push(theta.to_array());
            ys.push(mean);
            points.push(theta);
        }
        iteration += 1;
    }

    let best = ys
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite distances"))
        .map(|(i, _)| i)
        .expect("budget is positive");
    Ok(CalibrationReport {
        theta_hat: points[best],
        d_hat: ys[best],
        eval_log: evaluator.eval_log,
        surrogate_cv_rmse: cv_rmse,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridMode {
    /// Axis-aligned scans through the center (7 * points_per_dim
    /// evaluations).
    CoordinateWise,
    /// Full cartesian product (points_per_dim^7 evaluations).
    FullFactorial,
}

/// Local grid search around an incumbent. The center itself is always
/// in the grid, so the refined optimum can never be worse than its
/// input.
pub fn grid_refine<O: Objective + ?Sized>(
    space: &CalibrationSpace,
    objective: &O,
    center: &CalibrationTheta,
    radii: &[f64; 7],
    points_per_dim: usize,
    mode: GridMode,
    n_rep: usize,
    seed: u64,
) -> Result<CalibrationReport, CalibrationError> {
    let center = space.clamp(center);
    let axes: Vec<Vec<f64>> = center
        .to_array()
        .iter()
        .enumerate()
        .map(|(d, &c)| {
            if points_per_dim <= 1 || radii[d] == 0.0 {
                return vec![c];
            }
            (0..points_per_dim)
                .map(|k| {
                    let w = k as f64 / (points_per_dim - 1) as f64;
                    (c - radii[d] + w * 2.0 * radii[d]).clamp(space.lower[d], space.upper[d])
                })
                .collect()
        })
        .collect();

    let mut grid: Vec<CalibrationTheta> = vec![center];
    match mode {
        GridMode::CoordinateWise => {
            for d in 0..7 {
                for &v in &axes[d] {
                    let mut a = center.to_array();
                    a[d] = v;
                    grid.push(CalibrationTheta::from_array(a));
                }
            }
        }
        GridMode::FullFactorial => {
            let mut combos: Vec<[f64; 7]> = vec![center.to_array()];
            let mut next = Vec::new();
            for d in 0..7 {
                next.clear();
                for combo in &combos {
                    for &v in &axes[d] {
                        let mut c = *combo;
                        c[d] = v;
                        next.push(c);
                    }
                }
                std::mem::swap(&mut combos, &mut next);
            }
            grid.extend(combos.into_iter().map(CalibrationTheta::from_array));
        }
    }
    grid.dedup_by(|a, b| a.to_array() == b.to_array());

    let mut evaluator = Evaluator::new(objective, seed, n_rep.max(1));
    let means = evaluator.eval_batch(&grid);
    let best = means
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite distances"))
        .map(|(i, _)| i)
        .expect("grid contains the center");
    Ok(CalibrationReport {
        theta_hat: grid[best],
        d_hat: means[best],
        eval_log: evaluator.eval_log,
        surrogate_cv_rmse: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_center() -> CalibrationTheta {
        CalibrationTheta::from_array([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5])
    }

    /// Deterministic convex objective with minimum at the box center.
    fn quadratic(theta: &CalibrationTheta, _seed: u64) -> Result<f64, CalibrationError> {
        let c = quadratic_center().to_array();
        Ok(theta
            .to_array()
            .iter()
            .zip(c)
            .map(|(x, c)| (x - c) * (x - c))
            .sum())
    }

    #[test]
    fn surrogate_finds_the_quadratic_minimum() {
        let space = CalibrationSpace::standard();
        let config = SearchConfig {
            budget: 200,
            n_rep: 1,
            ..SearchConfig::default()
        };
        let report = surrogate_search(&space, &quadratic, &config, 11).unwrap();
        let distance: f64 = report
            .theta_hat
            .to_array()
            .iter()
            .zip(quadratic_center().to_array())
            .map(|(x, c)| (x - c) * (x - c))
            .sum::<f64>()
            .sqrt();
        assert!(
            distance < 0.05 * space.diameter(),
            "incumbent {distance} of diameter {}",
            space.diameter()
        );
        assert!(report.surrogate_cv_rmse.is_some());
        assert_eq!(report.eval_log.len(), 200);
    }

    #[test]
    fn budget_equal_to_design_size_is_pure_random_search() {
        let space = CalibrationSpace::standard();
        let config = SearchConfig {
            budget: 40,
            n_rep: 1,
            init_fraction: 1.0,
            ..SearchConfig::default()
        };
        let report = surrogate_search(&space, &quadratic, &config, 3).unwrap();
        assert!(report.surrogate_cv_rmse.is_none());
        // Incumbent is the best of the Halton design points.
        let best_design = (0..40)
            .map(|i| quadratic(&space.scale(halton_point(i)), 0).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(report.d_hat, best_design);
    }

    #[test]
    fn search_is_deterministic_given_seed() {
        let space = CalibrationSpace::standard();
        let config = SearchConfig {
            budget: 60,
            n_rep: 2,
            ..SearchConfig::default()
        };
        let a = surrogate_search(&space, &quadratic, &config, 5).unwrap();
        let b = surrogate_search(&space, &quadratic, &config, 5).unwrap();
        assert_eq!(a.theta_hat.to_array(), b.theta_hat.to_array());
        assert_eq!(a.eval_log.len(), b.eval_log.len());
        for (x, y) in a.eval_log.iter().zip(&b.eval_log) {
            assert_eq!(x.theta.to_array(), y.theta.to_array());
            assert_eq!(x.d, y.d);
            assert_eq!(x.seed, y.seed);
        }
    }

    #[test]
    fn incumbent_is_nonincreasing_over_the_log() {
        let space = CalibrationSpace::standard();
        let config = SearchConfig {
            budget: 120,
            n_rep: 1,
            ..SearchConfig::default()
        };
        let report = surrogate_search(&space, &quadratic, &config, 9).unwrap();
        let mut incumbent = f64::INFINITY;
        let mut path = Vec::new();
        for row in &report.eval_log {
            incumbent = incumbent.min(row.d);
            path.push(incumbent);
        }
        for w in path.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert_eq!(*path.last().unwrap(), report.d_hat);
    }

    #[test]
    fn single_point_grid_returns_center() {
        let space = CalibrationSpace::standard();
        let center = CalibrationTheta::from_array([0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]);
        let report = grid_refine(
            &space,
            &quadratic,
            &center,
            &[0.1; 7],
            1,
            GridMode::CoordinateWise,
            1,
            0,
        )
        .unwrap();
        assert_eq!(report.theta_hat.to_array(), center.to_array());
    }

    #[test]
    fn grid_never_degrades_the_center() {
        let space = CalibrationSpace::standard();
        for mode in [GridMode::CoordinateWise, GridMode::FullFactorial] {
            let points = if mode == GridMode::FullFactorial { 3 } else { 5 };
            let center = CalibrationTheta::from_array([0.2, 1.8, 0.9, 1.1, 0.4, 1.5, 0.2]);
            let center_value = quadratic(&center, 0).unwrap();
            let report =
                grid_refine(&space, &quadratic, &center, &[0.2; 7], points, mode, 1, 0).unwrap();
            assert!(report.d_hat <= center_value);
        }
    }

    #[test]
    fn convex_grid_beats_offset_center() {
        let space = CalibrationSpace::standard();
        let center = CalibrationTheta::from_array([0.9, 0.9, 1.0, 1.0, 1.1, 1.1, 0.45]);
        let report = grid_refine(
            &space,
            &quadratic,
            &center,
            &[0.1; 7],
            5,
            GridMode::CoordinateWise,
            1,
            0,
        )
        .unwrap();
        assert!(report.d_hat < quadratic(&center, 0).unwrap());
    }

    #[test]
    fn failures_are_penalized_not_fatal() {
        let space = CalibrationSpace::standard();
        let flaky = |theta: &CalibrationTheta, _seed: u64| {
            if theta.kappa1 < 1.0 {
                Err(CalibrationError::Eval("boom".into()))
            } else {
                Ok(theta.kappa2)
            }
        };
        let config = SearchConfig {
            budget: 30,
            n_rep: 1,
            ..SearchConfig::default()
        };
        let report = surrogate_search(&space, &flaky, &config, 2).unwrap();
        assert!(report.theta_hat.kappa1 >= 1.0);
        assert_eq!(report.eval_log.len(), 30);
    }
}
