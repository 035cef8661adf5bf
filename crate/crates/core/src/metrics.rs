//! Order-of-magnitude accuracy and regression metrics on the counts scale.
//!
//! Counts below 1, including zero, share decade 0: the order of `x` is
//! `floor(log10(max(x, 1)))`, computed against exact powers of ten.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{back_transform, CountPrediction, DesignMatrices};
use crate::matrix::Matrix;
use crate::multioutput::{EngagementModel, ModelError};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("metric domain error for {0}")]
    DomainError(f64),
    #[error("length mismatch: {pred} predictions vs {truth} truths")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("r2 is undefined for constant truth")]
    ConstantTruth,
    #[error("{target}: {source}")]
    Target {
        target: &'static str,
        #[source]
        source: Box<MetricsError>,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

type Result<T> = std::result::Result<T, MetricsError>;

/// 10^0 ..= 10^22, every entry exactly representable as `f64`.
const POW10: [f64; 23] = [
    1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10, 1e11, 1e12, 1e13, 1e14, 1e15, 1e16, 1e17, 1e18,
    1e19, 1e20, 1e21, 1e22,
];

pub fn order_of(x: f64) -> Result<i32> {
    if !x.is_finite() || x < 0.0 {
        return Err(MetricsError::DomainError(x));
    }
    if x < POW10[POW10.len() - 1] {
        return Ok(POW10[1..].iter().take_while(|&&p| x >= p).count() as i32);
    }
    let mut k = x.log10().floor() as i32;
    // log10 can land one off near exact powers; nudge against 10^k.
    if 10f64.powi(k) > x {
        k -= 1;
    } else if 10f64.powi(k + 1) <= x {
        k += 1;
    }
    Ok(k)
}

fn check(pred: &[f64], truth: &[f64]) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(MetricsError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(())
}

fn check_counts(pred: &[f64], truth: &[f64]) -> Result<()> {
    check(pred, truth)?;
    if let Some(&bad) = pred.iter().chain(truth).find(|v| !v.is_finite() || **v < 0.0) {
        return Err(MetricsError::DomainError(bad));
    }
    Ok(())
}

pub fn oom_accuracy(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check_counts(pred, truth)?;
    let mut hits = 0usize;
    for (&p, &t) in pred.iter().zip(truth) {
        if order_of(p)? == order_of(t)? {
            hits += 1;
        }
    }
    Ok(hits as f64 / truth.len() as f64)
}

/// Mean absolute difference of `log10(max(x, 1))`, in decades.
pub fn mae_orders(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check_counts(pred, truth)?;
    let total: f64 = pred
        .iter()
        .zip(truth)
        .map(|(&p, &t)| (p.max(1.0).log10() - t.max(1.0).log10()).abs())
        .sum();
    Ok(total / truth.len() as f64)
}

pub fn mae(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check(pred, truth)?;
    Ok(pred.iter().zip(truth).map(|(p, t)| (p - t).abs()).sum::<f64>() / truth.len() as f64)
}

pub fn rmse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check(pred, truth)?;
    let mse = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / truth.len() as f64;
    Ok(mse.sqrt())
}

pub fn r2(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check(pred, truth)?;
    let mean = truth.iter().sum::<f64>() / truth.len() as f64;
    let ss_tot: f64 = truth.iter().map(|t| (t - mean) * (t - mean)).sum();
    if ss_tot == 0.0 {
        return Err(MetricsError::ConstantTruth);
    }
    let ss_res: f64 = pred.iter().zip(truth).map(|(p, t)| (t - p) * (t - p)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetMetrics {
    pub oom_accuracy: f64,
    pub mae_orders: f64,
    pub mae: f64,
    pub rmse: f64,
    pub r2: f64,
    pub n_rows: usize,
}

impl TargetMetrics {
    pub fn compute(pred: &[f64], truth: &[f64]) -> Result<Self> {
        Ok(Self {
            oom_accuracy: oom_accuracy(pred, truth)?,
            mae_orders: mae_orders(pred, truth)?,
            mae: mae(pred, truth)?,
            rmse: rmse(pred, truth)?,
            r2: r2(pred, truth)?,
            n_rows: truth.len(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub comments: TargetMetrics,
    pub likes: TargetMetrics,
}

impl MetricsReport {
    /// Metric rows by target columns, aligned for a terminal.
    pub fn to_table(&self) -> String {
        let (c, l) = (&self.comments, &self.likes);
        let rows = [
            (
                "Order-of-Magnitude Accuracy",
                format!("{:.2}%", 100.0 * c.oom_accuracy),
                format!("{:.2}%", 100.0 * l.oom_accuracy),
            ),
            (
                "Mean Absolute Error (Orders)",
                format!("{:.2} orders", c.mae_orders),
                format!("{:.2} orders", l.mae_orders),
            ),
            ("Mean Absolute Error (MAE)", format!("{:.2}", c.mae), format!("{:.2}", l.mae)),
            ("Root Mean Squared Error (RMSE)", format!("{:.2}", c.rmse), format!("{:.2}", l.rmse)),
            ("Coefficient of Determination (R2)", format!("{:.2}", c.r2), format!("{:.2}", l.r2)),
        ];
        let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        let w1 = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max("Comments".len());
        let w2 = rows.iter().map(|r| r.2.len()).max().unwrap_or(0).max("Likes".len());
        let mut out = String::new();
        let _ = writeln!(out, "{:<w0$}  {:>w1$}  {:>w2$}", "Metric", "Comments", "Likes");
        let _ = writeln!(out, "{}", "-".repeat(w0 + w1 + w2 + 4));
        for (name, a, b) in rows {
            let _ = writeln!(out, "{name:<w0$}  {a:>w1$}  {b:>w2$}");
        }
        out
    }
}

/// Back-transformed count predictions for each row of `x`.
pub fn predict_counts(model: &EngagementModel, x: &Matrix, views: &[u64]) -> Result<Vec<CountPrediction>> {
    let pred = model.predict(x)?;
    Ok(views
        .iter()
        .enumerate()
        .map(|(i, &v)| back_transform(pred.get(i, 0), pred.get(i, 1), v))
        .collect())
}

/// Predicts, back-transforms with each row's views, and scores both
/// targets against the raw counts.
pub fn evaluate(model: &EngagementModel, test: &DesignMatrices) -> Result<MetricsReport> {
    let counts = predict_counts(model, &test.x, &test.views)?;
    let label = |target: &'static str| move |e| MetricsError::Target {
        target,
        source: Box::new(e),
    };
    let pred_c: Vec<f64> = counts.iter().map(|c| c.comments).collect();
    let pred_l: Vec<f64> = counts.iter().map(|c| c.likes).collect();
    let true_c: Vec<f64> = test.true_counts.iter().map(|t| t[0] as f64).collect();
    let true_l: Vec<f64> = test.true_counts.iter().map(|t| t[1] as f64).collect();
    Ok(MetricsReport {
        comments: TargetMetrics::compute(&pred_c, &true_c).map_err(label("comments"))?,
        likes: TargetMetrics::compute(&pred_l, &true_l).map_err(label("likes"))?,
    })
}
