//! Histogram gradient boosting regression with squared-error loss.
//!
//! Each iteration fits one tree to the gradients `pred - y` (hessians are
//! all 1), grown leaf-wise over binned features with leaf values
//! `-G / (H + l2)`. Predictions are `baseline + learning_rate * Σ tree(x)`,
//! accumulated tree by tree.

mod binning;
mod histogram;
mod tree;

pub use binning::{apply_bins, fit_bins, BinMapper, BinnedMatrix, BIN_SUBSAMPLE};
pub use histogram::{BinStats, Histogram};
pub use tree::{find_best_split, grow_tree, leaf_value, GrownTree, HistogramMode, Node, SplitInfo, Tree, TreeParams};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;

#[derive(Debug, Error, PartialEq)]
pub enum GbtError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("too few rows: {rows} (need at least {needed})")]
    TooFewRows { rows: usize, needed: usize },
    #[error("non-finite target at row {0}")]
    NonFiniteTarget(usize),
    #[error("non-finite feature at row {0}")]
    NonFiniteFeature(usize),
    #[error("expected {expected} columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("target length {targets} does not match {rows} rows")]
    LengthMismatch { rows: usize, targets: usize },
}

type Result<T> = std::result::Result<T, GbtError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub learning_rate: f64,
    pub max_iter: usize,
    pub max_leaf_nodes: usize,
    pub min_samples_leaf: usize,
    pub l2_regularization: f64,
    pub max_bins: usize,
    pub early_stopping: bool,
    pub validation_fraction: f64,
    pub n_iter_no_change: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for GbtParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            max_iter: 100,
            max_leaf_nodes: 31,
            min_samples_leaf: 20,
            l2_regularization: 0.0,
            max_bins: 255,
            early_stopping: true,
            validation_fraction: 0.1,
            n_iter_no_change: 10,
            tol: 1e-7,
            seed: 0,
        }
    }
}

impl GbtParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(GbtError::InvalidParams(msg.to_string()));
        // A zero learning rate is accepted: boosting degenerates to the baseline.
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return bad("learning_rate must be finite and >= 0");
        }
        if self.max_iter < 1 {
            return bad("max_iter must be >= 1");
        }
        if self.max_leaf_nodes < 2 {
            return bad("max_leaf_nodes must be >= 2");
        }
        if self.min_samples_leaf < 1 {
            return bad("min_samples_leaf must be >= 1");
        }
        if !(self.l2_regularization.is_finite() && self.l2_regularization >= 0.0) {
            return bad("l2_regularization must be finite and >= 0");
        }
        if !(2..=255).contains(&self.max_bins) {
            return bad("max_bins must be in [2, 255]");
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return bad("validation_fraction must be in (0, 1)");
        }
        if self.n_iter_no_change < 1 {
            return bad("n_iter_no_change must be >= 1");
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return bad("tol must be finite and >= 0");
        }
        Ok(())
    }

    fn tree_params(&self) -> TreeParams {
        TreeParams {
            max_leaf_nodes: self.max_leaf_nodes,
            min_samples_leaf: self.min_samples_leaf,
            l2_regularization: self.l2_regularization,
        }
    }

    fn min_rows(&self) -> usize {
        if self.early_stopping {
            ((1.0 / self.validation_fraction).ceil() as usize).max(2)
        } else {
            2
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub baseline: f64,
    pub learning_rate: f64,
    pub bin_mapper: BinMapper,
    pub trees: Vec<Tree>,
    /// Mean squared error on the rows trees were grown on; entry 0 is the
    /// baseline, entry `t` follows tree `t`.
    #[serde(default)]
    pub train_loss_curve: Vec<f64>,
    /// Iteration at which early stopping fired, if it did.
    #[serde(default)]
    pub stopped_early_at: Option<usize>,
}

fn mean(y: &[f64]) -> f64 {
    // Shifted by the first value, so a constant vector gives that value exactly.
    let base = y[0];
    base + y.iter().map(|v| v - base).sum::<f64>() / y.len() as f64
}

fn mse(pred: &[f64], y: &[f64]) -> f64 {
    pred.iter().zip(y).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / y.len() as f64
}

/// Seeded row split for early stopping: `(train, validation)`, both sorted.
fn validation_split(n: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_val = ((n as f64 * fraction).ceil() as usize).clamp(1, n - 1);
    let mut val = idx[..n_val].to_vec();
    let mut train = idx[n_val..].to_vec();
    val.sort_unstable();
    train.sort_unstable();
    (train, val)
}

/// The fitted model plus the training-row predictions it ended with.
pub(crate) struct FitOutput {
    pub model: GbtModel,
    #[allow(dead_code)]
    pub train_predictions: Vec<f64>,
}

pub fn fit(x: &Matrix, y: &[f64], params: &GbtParams) -> Result<GbtModel> {
    let mode = if cfg!(debug_assertions) {
        HistogramMode::Verified
    } else {
        HistogramMode::Subtraction
    };
    fit_with_mode(x, y, params, mode).map(|o| o.model)
}

pub(crate) fn fit_with_mode(x: &Matrix, y: &[f64], params: &GbtParams, mode: HistogramMode) -> Result<FitOutput> {
    params.validate()?;
    if y.len() != x.rows() {
        return Err(GbtError::LengthMismatch {
            rows: x.rows(),
            targets: y.len(),
        });
    }
    let needed = params.min_rows();
    if y.len() < needed {
        return Err(GbtError::TooFewRows { rows: y.len(), needed });
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(GbtError::NonFiniteTarget(i));
    }
    if let Some(i) = x.iter_rows().position(|r| r.iter().any(|v| !v.is_finite())) {
        return Err(GbtError::NonFiniteFeature(i));
    }

    let (train_idx, val_idx) = if params.early_stopping {
        validation_split(y.len(), params.validation_fraction, params.seed)
    } else {
        ((0..y.len()).collect(), Vec::new())
    };
    let x_train = x.select_rows(&train_idx);
    let y_train: Vec<f64> = train_idx.iter().map(|&i| y[i]).collect();
    let y_val: Vec<f64> = val_idx.iter().map(|&i| y[i]).collect();

    let mapper = fit_bins(&x_train, params.max_bins, params.seed);
    let binned = apply_bins(&x_train, &mapper);
    let binned_val = apply_bins(&x.select_rows(&val_idx), &mapper);

    let baseline = mean(&y_train);
    let lr = params.learning_rate;
    let tree_params = params.tree_params();
    let n = y_train.len();
    let mut pred = vec![baseline; n];
    let mut val_pred = vec![baseline; y_val.len()];
    let hess = vec![1.0; n];
    let mut grad = vec![0.0; n];
    let mut trees = Vec::with_capacity(params.max_iter);
    let mut curve = vec![mse(&pred, &y_train)];

    let mut best_val = if params.early_stopping { mse(&val_pred, &y_val) } else { f64::INFINITY };
    let mut best_iter = 0;
    let mut reference_val = best_val;
    let mut since_improvement = 0;
    let mut stopped_early_at = None;
    // Predictions after the best iteration, kept so truncation stays exact.
    let mut best_pred = pred.clone();

    for iter in 1..=params.max_iter {
        for ((g, p), t) in grad.iter_mut().zip(&pred).zip(&y_train) {
            *g = p - t;
        }
        let grown = grow_tree(&binned, (0..n as u32).collect(), &grad, &hess, &tree_params, mode);
        let mut tree = grown.tree;
        tree::attach_thresholds(&mut tree, &mapper);
        for (node, rows) in &grown.leaves {
            let Node::Leaf { leaf } = tree.nodes[*node] else {
                unreachable!("frontier entries are leaves")
            };
            for &r in rows {
                pred[r as usize] += lr * leaf;
            }
        }
        curve.push(mse(&pred, &y_train));

        if params.early_stopping {
            for (r, p) in val_pred.iter_mut().enumerate() {
                *p += lr * tree.predict_bins(|f| binned_val.get(r, f));
            }
            let loss = mse(&val_pred, &y_val);
            if loss < best_val {
                best_val = loss;
                best_iter = iter;
                best_pred.clone_from(&pred);
            }
            if loss < reference_val - params.tol {
                reference_val = loss;
                since_improvement = 0;
            } else {
                since_improvement += 1;
            }
            trees.push(tree);
            if since_improvement >= params.n_iter_no_change {
                stopped_early_at = Some(iter);
                break;
            }
        } else {
            trees.push(tree);
        }
    }

    if params.early_stopping {
        trees.truncate(best_iter);
        curve.truncate(best_iter + 1);
        pred = best_pred;
    }

    Ok(FitOutput {
        model: GbtModel {
            baseline,
            learning_rate: lr,
            bin_mapper: mapper,
            trees,
            train_loss_curve: curve,
            stopped_early_at,
        },
        train_predictions: pred,
    })
}

impl GbtModel {
    pub fn n_features(&self) -> usize {
        self.bin_mapper.n_features()
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.n_features() {
            return Err(GbtError::DimensionMismatch {
                expected: self.n_features(),
                got: x.cols(),
            });
        }
        let binned = apply_bins(x, &self.bin_mapper);
        Ok((0..x.rows())
            .map(|r| {
                let mut p = self.baseline;
                for t in &self.trees {
                    p += self.learning_rate * t.predict_bins(|f| binned.get(r, f));
                }
                p
            })
            .collect())
    }

    /// Validates a model read from disk.
    pub fn check(&self) -> std::result::Result<(), String> {
        if !self.baseline.is_finite() || !self.learning_rate.is_finite() {
            return Err("non-finite baseline or learning rate".into());
        }
        self.bin_mapper.check()?;
        for (i, t) in self.trees.iter().enumerate() {
            t.check(&self.bin_mapper).map_err(|e| format!("tree {i}: {e}"))?;
        }
        Ok(())
    }
}
