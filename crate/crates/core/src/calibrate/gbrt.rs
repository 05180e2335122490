//! Gradient-boosted regression trees for the calibration surrogate.
//!
//! Squared-loss boosting of shallow exact-split trees; the ensemble
//! size is chosen by k-fold cross-validation, which is the only
//! regularisation the small training sets here need.

#[derive(Debug, Clone, Copy)]
pub struct GbrtConfig {
    pub max_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_leaf: usize,
    pub cv_folds: usize,
}

impl Default for GbrtConfig {
    fn default() -> GbrtConfig {
        GbrtConfig {
            max_trees: 500,
            max_depth: 4,
            learning_rate: 0.1,
            min_leaf: 3,
            cv_folds: 5,
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    feature: usize,
    threshold: f64,
    /// Children indices; `usize::MAX` marks a leaf.
    left: usize,
    right: usize,
    value: f64,
}

const LEAF: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn fit(
        x: &[[f64; 7]],
        residuals: &[f64],
        indices: &mut [usize],
        max_depth: usize,
        min_leaf: usize,
    ) -> Tree {
        let mut tree = Tree { nodes: Vec::new() };
        tree.grow(x, residuals, indices, 0, max_depth, min_leaf);
        tree
    }

    fn grow(
        &mut self,
        x: &[[f64; 7]],
        residuals: &[f64],
        indices: &mut [usize],
        depth: usize,
        max_depth: usize,
        min_leaf: usize,
    ) -> usize {
        let n = indices.len();
        let sum: f64 = indices.iter().map(|&i| residuals[i]).sum();
        let mean = sum / n as f64;
        let node_index = self.nodes.len();
        self.nodes.push(Node {
            feature: 0,
            threshold: 0.0,
            left: LEAF,
            right: LEAF,
            value: mean,
        });
        if depth >= max_depth || n < 2 * min_leaf {
            return node_index;
        }
        let Some((feature, threshold)) = best_split(x, residuals, indices, min_leaf) else {
            return node_index;
        };
        let split_at = partition(x, indices, feature, threshold);
        // A degenerate split would recurse forever.
        if split_at == 0 || split_at == n {
            return node_index;
        }
        let (left_idx, right_idx) = indices.split_at_mut(split_at);
        let left = self.grow(x, residuals, left_idx, depth + 1, max_depth, min_leaf);
        let right = self.grow(x, residuals, right_idx, depth + 1, max_depth, min_leaf);
        self.nodes[node_index].feature = feature;
        self.nodes[node_index].threshold = threshold;
        self.nodes[node_index].left = left;
        self.nodes[node_index].right = right;
        node_index
    }

    fn predict(&self, x: &[f64; 7]) -> f64 {
        let mut node = &self.nodes[0];
        while node.left != LEAF {
            node = if x[node.feature] <= node.threshold {
                &self.nodes[node.left]
            } else {
                &self.nodes[node.right]
            };
        }
        node.value
    }
}

/// Exhaustive best SSE-reduction split over all features.
fn best_split(
    x: &[[f64; 7]],
    residuals: &[f64],
    indices: &[usize],
    min_leaf: usize,
) -> Option<(usize, f64)> {
    let n = indices.len();
    let total_sum: f64 = indices.iter().map(|&i| residuals[i]).sum();
    let mut best: Option<(usize, f64, f64)> = None;
    let mut sorted = indices.to_vec();
    for feature in 0..7 {
        sorted.sort_unstable_by(|&a, &b| {
            x[a][feature]
                .partial_cmp(&x[b][feature])
                .expect("finite features")
        });
        let mut left_sum = 0.0;
        for (count, window) in sorted.windows(2).enumerate() {
            let i = window[0];
            let j = window[1];
            left_sum += residuals[i];
            let left_n = count + 1;
            let right_n = n - left_n;
            if left_n < min_leaf || right_n < min_leaf {
                continue;
            }
            if x[i][feature] == x[j][feature] {
                continue;
            }
            // SSE reduction = left_sum^2/left_n + right_sum^2/right_n - total^2/n.
            let right_sum = total_sum - left_sum;
            let gain = left_sum * left_sum / left_n as f64
                + right_sum * right_sum / right_n as f64
                - total_sum * total_sum / n as f64;
            if best.map_or(true, |(_, _, g)| gain > g) && gain > 1e-12 {
                let threshold = 0.5 * (x[i][feature] + x[j][feature]);
                best = Some((feature, threshold, gain));
            }
        }
    }
    best.map(|(f, t, _)| (f, t))
}

fn partition(x: &[[f64; 7]], indices: &mut [usize], feature: usize, threshold: f64) -> usize {
    let mut split = 0;
    for i in 0..indices.len() {
        if x[indices[i]][feature] <= threshold {
            indices.swap(split, i);
            split += 1;
        }
    }
    split
}

/// Fitted boosted ensemble.
#[derive(Debug, Clone)]
pub struct Gbrt {
    base: f64,
    learning_rate: f64,
    trees: Vec<Tree>,
    /// Root-mean-square CV error at the selected ensemble size.
    pub cv_rmse: f64,
}

impl Gbrt {
    /// Fit with cross-validated ensemble size selection.
    pub fn fit(x: &[[f64; 7]], y: &[f64], config: &GbrtConfig) -> Gbrt {
        assert_eq!(x.len(), y.len());
        assert!(!x.is_empty());
        let folds = config.cv_folds.min(x.len()).max(2);
        let n_trees = if x.len() <= 2 * config.min_leaf {
            0
        } else {
            // Per-fold validation MSE path, averaged to pick the size.
            let mut path = vec![0.0f64; config.max_trees + 1];
            for fold in 0..folds {
                let (train_x, train_y, val_x, val_y) = split_fold(x, y, fold, folds);
                if train_x.is_empty() || val_x.is_empty() {
                    continue;
                }
                let fold_path =
                    boost_validation_path(&train_x, &train_y, &val_x, &val_y, config);
                for (acc, v) in path.iter_mut().zip(fold_path) {
                    *acc += v / folds as f64;
                }
            }
            path.iter()
                .enumerate()
                .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite mse"))
                .map(|(i, _)| i)
                .unwrap_or(0)
        };

        let cv_rmse = if n_trees == 0 {
            0.0
        } else {
            // Recompute the CV error at the chosen size for reporting.
            let mut mse = 0.0;
            for fold in 0..folds {
                let (train_x, train_y, val_x, val_y) = split_fold(x, y, fold, folds);
                if train_x.is_empty() || val_x.is_empty() {
                    continue;
                }
                let path = boost_validation_path(&train_x, &train_y, &val_x, &val_y, config);
                mse += path[n_trees.min(path.len() - 1)] / folds as f64;
            }
            mse.sqrt()
        };

        let mut model = Gbrt {
            base: y.iter().sum::<f64>() / y.len() as f64,
            learning_rate: config.learning_rate,
            trees: Vec::with_capacity(n_trees),
            cv_rmse,
        };
        let mut residuals: Vec<f64> = y.iter().map(|v| v - model.base).collect();
        let mut indices: Vec<usize> = (0..x.len()).collect();
        for _ in 0..n_trees {
            let tree = Tree::fit(x, &residuals, &mut indices, config.max_depth, config.min_leaf);
            for (i, r) in residuals.iter_mut().enumerate() {
                *r -= config.learning_rate * tree.predict(&x[i]);
            }
            model.trees.push(tree);
        }
        model
    }

    pub fn predict(&self, x: &[f64; 7]) -> f64 {
        self.base
            + self.learning_rate
                * self
                    .trees
                    .iter()
                    .map(|t| t.predict(x))
                    .sum::<f64>()
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}

/// Validation MSE after 0..=max_trees boosting rounds.
fn boost_validation_path(
    train_x: &[[f64; 7]],
    train_y: &[f64],
    val_x: &[[f64; 7]],
    val_y: &[f64],
    config: &GbrtConfig,
) -> Vec<f64> {
    let base = train_y.iter().sum::<f64>() / train_y.len() as f64;
    let mut residuals: Vec<f64> = train_y.iter().map(|v| v - base).collect();
    let mut val_pred = vec![base; val_x.len()];
    let mut indices: Vec<usize> = (0..train_x.len()).collect();
    let mse = |pred: &[f64]| {
        pred.iter()
            .zip(val_y)
            .map(|(p, y)| (p - y) * (p - y))
            .sum::<f64>()
            / val_y.len() as f64
    };
    let mut path = Vec::with_capacity(config.max_trees + 1);
    path.push(mse(&val_pred));
    for _ in 0..config.max_trees {
        let tree = Tree::fit(
            train_x,
            &residuals,
            &mut indices,
            config.max_depth,
            config.min_leaf,
        );
        for (i, r) in residuals.iter_mut().enumerate() {
            *r -= config.learning_rate * tree.predict(&train_x[i]);
        }
        for (pred, x) in val_pred.iter_mut().zip(val_x) {
            *pred += config.learning_rate * tree.predict(x);
        }
        path.push(mse(&val_pred));
    }
    path
}

fn split_fold(
    x: &[[f64; 7]],
    y: &[f64],
    fold: usize,
    folds: usize,
) -> (Vec<[f64; 7]>, Vec<f64>, Vec<[f64; 7]>, Vec<f64>) {
    let mut train_x = Vec::new();
    let mut train_y = Vec::new();
    let mut val_x = Vec::new();
    let mut val_y = Vec::new();
    for i in 0..x.len() {
        if i % folds == fold {
            val_x.push(x[i]);
            val_y.push(y[i]);
        } else {
            train_x.push(x[i]);
            train_y.push(y[i]);
        }
    }
    (train_x, train_y, val_x, val_y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrate::halton_point;

    fn quadratic(x: &[f64; 7]) -> f64 {
        x.iter().map(|v| (v - 0.5) * (v - 0.5)).sum()
    }

    #[test]
    fn learns_a_smooth_function() {
        let x: Vec<[f64; 7]> = (0..300).map(halton_point).collect();
        let y: Vec<f64> = x.iter().map(quadratic).collect();
        let model = Gbrt::fit(&x, &y, &GbrtConfig::default());
        assert!(model.n_trees() > 0);
        // In-sample fit should be tight and generalisation sane.
        let mut err = 0.0;
        for i in 300..400 {
            let p = halton_point(i);
            err += (model.predict(&p) - quadratic(&p)).abs();
        }
        err /= 100.0;
        assert!(err < 0.08, "mean abs error {err}");
        assert!(model.cv_rmse < 0.2);
    }

    #[test]
    fn constant_targets_need_no_trees() {
        let x: Vec<[f64; 7]> = (0..40).map(halton_point).collect();
        let y = vec![3.25; 40];
        let model = Gbrt::fit(&x, &y, &GbrtConfig::default());
        assert_eq!(model.predict(&halton_point(100)), 3.25);
    }

    #[test]
    fn tiny_training_sets_fall_back_to_the_mean() {
        let x: Vec<[f64; 7]> = (0..3).map(halton_point).collect();
        let y = vec![1.0, 2.0, 3.0];
        let model = Gbrt::fit(&x, &y, &GbrtConfig::default());
        assert_eq!(model.n_trees(), 0);
        assert!((model.predict(&halton_point(0)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_fit() {
        let x: Vec<[f64; 7]> = (0..120).map(halton_point).collect();
        let y: Vec<f64> = x.iter().map(quadratic).collect();
        let a = Gbrt::fit(&x, &y, &GbrtConfig::default());
        let b = Gbrt::fit(&x, &y, &GbrtConfig::default());
        for i in 0..50 {
            let p = halton_point(i * 13);
            assert_eq!(a.predict(&p), b.predict(&p));
        }
    }
}
