//! Feature engineering: temporal features, `log1p` transforms, engagement
//! ratios, top-quantile clipping and assembly of the design matrices.
//!
//! Targets are `log1p(comments / views)` and `log1p(likes / views)`. The
//! inverse, [`back_transform`], maps predicted log-ratios back to counts.

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;
use crate::tabular::{FeatureRecord, RawRecord, RawTable, EMOTION_NAMES, N_EMOTIONS};

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("upload date {upload} is after reference date {reference}")]
    NegativeAge { upload: NaiveDate, reference: NaiveDate },
    #[error("log1p domain error for {0}")]
    DomainError(f64),
    #[error("empty input")]
    EmptyInput,
    #[error("clip quantile {0} outside (0, 1]")]
    InvalidQuantile(f64),
    #[error("row {0}: likes and comments are required for the log_clr feature")]
    MissingCounts(usize),
}

type Result<T> = std::result::Result<T, FeatureError>;

pub const N_TARGETS: usize = 2;
pub const TARGET_NAMES: [&str; N_TARGETS] = ["log_cr", "log_lr"];
const DERIVED_FEATURES: [&str; 5] = ["age_days", "log_views", "upload_month", "upload_dow", "log_clr"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceDate {
    /// Latest upload date of the table the pipeline is fitted on.
    LatestInData,
    Fixed(NaiveDate),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub reference_date: ReferenceDate,
    pub clip_quantile: f64,
    /// Leave out `log_clr`, which is derived from the same comment counts as
    /// the `log_cr` target.
    #[serde(default)]
    pub drop_log_clr: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            reference_date: ReferenceDate::LatestInData,
            clip_quantile: 0.99,
            drop_log_clr: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.clip_quantile > 0.0 && self.clip_quantile <= 1.0) {
            return Err(FeatureError::InvalidQuantile(self.clip_quantile));
        }
        Ok(())
    }

    /// Ten emotions, then `age_days`, `log_views`, `upload_month`,
    /// `upload_dow` and (unless dropped) `log_clr`.
    pub fn feature_order(&self) -> Vec<String> {
        let n = if self.drop_log_clr { 4 } else { 5 };
        EMOTION_NAMES
            .iter()
            .chain(&DERIVED_FEATURES[..n])
            .map(|s| s.to_string())
            .collect()
    }

    pub fn n_features(&self) -> usize {
        N_EMOTIONS + if self.drop_log_clr { 4 } else { 5 }
    }

    /// Pins a `LatestInData` reference date to the latest upload in `table`.
    /// Used to resolve the date on a whole table before fitting on one split
    /// of it, so that no row of the other split is newer than the reference.
    pub fn pinned_to(&self, table: &RawTable) -> PipelineConfig {
        let mut c = self.clone();
        if c.reference_date == ReferenceDate::LatestInData {
            if let Some(d) = table.records.iter().map(|r| r.upload_date).max() {
                c.reference_date = ReferenceDate::Fixed(d);
            }
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClipThresholds {
    pub cr: f64,
    pub lr: f64,
    pub clr: f64,
}

/// Fitted preprocessing state, reused unchanged on every later table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineState {
    pub reference_date: NaiveDate,
    pub clip_thresholds: ClipThresholds,
    pub config: PipelineConfig,
}

impl PipelineState {
    pub fn feature_order(&self) -> Vec<String> {
        self.config.feature_order()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrices {
    /// n × 15 (or 14 without `log_clr`), columns in feature order.
    pub x: Matrix,
    /// n × 2, columns `[log_cr, log_lr]`.
    pub y: Matrix,
    pub views: Vec<u64>,
    /// Raw `[comments, likes]` per row.
    pub true_counts: Vec<[u64; N_TARGETS]>,
    pub track_ids: Vec<Option<String>>,
}

impl DesignMatrices {
    pub fn len(&self) -> usize {
        self.x.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.x.rows() == 0
    }

    pub fn select(&self, rows: &[usize]) -> DesignMatrices {
        DesignMatrices {
            x: self.x.select_rows(rows),
            y: self.y.select_rows(rows),
            views: rows.iter().map(|&i| self.views[i]).collect(),
            true_counts: rows.iter().map(|&i| self.true_counts[i]).collect(),
            track_ids: rows.iter().map(|&i| self.track_ids[i].clone()).collect(),
        }
    }

    pub fn target(&self, t: usize) -> Vec<f64> {
        self.y.column(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Temporal {
    pub age_days: i64,
    pub upload_month: u32,
    /// Monday = 0 ... Sunday = 6.
    pub upload_dow: u32,
}

pub fn derive_temporal(upload_date: NaiveDate, reference_date: NaiveDate) -> Result<Temporal> {
    if reference_date < upload_date {
        return Err(FeatureError::NegativeAge {
            upload: upload_date,
            reference: reference_date,
        });
    }
    Ok(Temporal {
        age_days: (reference_date - upload_date).num_days(),
        upload_month: upload_date.month(),
        upload_dow: upload_date.weekday().num_days_from_monday(),
    })
}

pub fn log1p(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(FeatureError::DomainError(x));
    }
    Ok(x.ln_1p())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratios {
    pub cr: f64,
    pub lr: f64,
    pub clr: f64,
}

/// Requires `views >= 1` and `likes >= 1`, which cleaning guarantees.
pub fn compute_ratios(views: u64, likes: u64, comments: u64) -> Ratios {
    debug_assert!(views >= 1 && likes >= 1);
    let (v, l, c) = (views as f64, likes as f64, comments as f64);
    Ratios {
        cr: c / v,
        lr: l / v,
        clr: c / l,
    }
}

/// `q`-quantile with linear interpolation between order statistics at
/// position `(n - 1) * q`.
pub fn fit_clip(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(FeatureError::EmptyInput);
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(FeatureError::InvalidQuantile(q));
    }
    if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(FeatureError::DomainError(bad));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Ok(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

fn feature_row(
    out: &mut Vec<f64>,
    emotions: &[f64; N_EMOTIONS],
    upload_date: NaiveDate,
    views: u64,
    clipped_clr: Option<f64>,
    reference_date: NaiveDate,
) -> Result<()> {
    let t = derive_temporal(upload_date, reference_date)?;
    out.extend_from_slice(emotions);
    out.push(t.age_days as f64);
    out.push(log1p(views as f64)?);
    out.push(t.upload_month as f64);
    out.push(t.upload_dow as f64);
    if let Some(clr) = clipped_clr {
        out.push(log1p(clr)?);
    }
    Ok(())
}

fn build_with_state(records: &[RawRecord], state: &PipelineState) -> Result<DesignMatrices> {
    let n = records.len();
    let width = state.config.n_features();
    let th = state.clip_thresholds;
    let mut x = Vec::with_capacity(n * width);
    let mut y = Vec::with_capacity(n * N_TARGETS);
    for r in records {
        let ratios = compute_ratios(r.views, r.likes, r.comments);
        let clr = (!state.config.drop_log_clr).then(|| ratios.clr.min(th.clr));
        feature_row(&mut x, &r.emotions, r.upload_date, r.views, clr, state.reference_date)?;
        y.push(log1p(ratios.cr.min(th.cr))?);
        y.push(log1p(ratios.lr.min(th.lr))?);
    }
    Ok(DesignMatrices {
        x: Matrix::from_vec(n, width, x),
        y: Matrix::from_vec(n, N_TARGETS, y),
        views: records.iter().map(|r| r.views).collect(),
        true_counts: records.iter().map(|r| [r.comments, r.likes]).collect(),
        track_ids: records.iter().map(|r| r.track_id.clone()).collect(),
    })
}

/// Fit mode: resolves the reference date and clip thresholds on `table`.
pub fn fit_design(table: &RawTable, config: &PipelineConfig) -> Result<(DesignMatrices, PipelineState)> {
    config.validate()?;
    if table.is_empty() {
        return Err(FeatureError::EmptyInput);
    }
    let reference_date = match config.reference_date {
        ReferenceDate::Fixed(d) => d,
        ReferenceDate::LatestInData => table
            .records
            .iter()
            .map(|r| r.upload_date)
            .max()
            .expect("non-empty"),
    };
    let ratios: Vec<Ratios> = table
        .records
        .iter()
        .map(|r| compute_ratios(r.views, r.likes, r.comments))
        .collect();
    let column = |f: fn(&Ratios) -> f64| ratios.iter().map(f).collect::<Vec<_>>();
    let q = config.clip_quantile;
    let state = PipelineState {
        reference_date,
        clip_thresholds: ClipThresholds {
            cr: fit_clip(&column(|r| r.cr), q)?,
            lr: fit_clip(&column(|r| r.lr), q)?,
            clr: fit_clip(&column(|r| r.clr), q)?,
        },
        config: config.clone(),
    };
    let design = build_with_state(&table.records, &state)?;
    Ok((design, state))
}

/// Transform mode: reuses every fitted quantity in `state`.
pub fn transform_design(table: &RawTable, state: &PipelineState) -> Result<DesignMatrices> {
    build_with_state(&table.records, state)
}

/// Fit mode when `state` is `None`, transform mode otherwise. In transform
/// mode `config` is ignored in favour of the state's own configuration.
pub fn build_design(
    table: &RawTable,
    config: &PipelineConfig,
    state: Option<&PipelineState>,
) -> Result<(DesignMatrices, PipelineState)> {
    match state {
        None => fit_design(table, config),
        Some(s) => Ok((transform_design(table, s)?, s.clone())),
    }
}

/// Feature matrix for unlabeled records. Likes and comments are needed only
/// when the pipeline keeps `log_clr`; the caller must have removed rows with
/// zero views or likes.
pub fn transform_features(records: &[FeatureRecord], state: &PipelineState) -> Result<Matrix> {
    let width = state.config.n_features();
    let mut x = Vec::with_capacity(records.len() * width);
    for (i, r) in records.iter().enumerate() {
        let clr = if state.config.drop_log_clr {
            None
        } else {
            match (r.likes, r.comments) {
                (Some(l), Some(c)) if l >= 1 => Some((c as f64 / l as f64).min(state.clip_thresholds.clr)),
                _ => return Err(FeatureError::MissingCounts(i + 1)),
            }
        };
        feature_row(&mut x, &r.emotions, r.upload_date, r.views, clr, state.reference_date)?;
    }
    Ok(Matrix::from_vec(records.len(), width, x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountPrediction {
    pub comments: f64,
    pub likes: f64,
    /// How many of the two outputs were negative and floored to zero.
    pub floored: u8,
}

pub fn back_transform(pred_log_cr: f64, pred_log_lr: f64, views: u64) -> CountPrediction {
    let v = views as f64;
    let mut floored = 0;
    let mut count = |p: f64| {
        let c = p.exp_m1() * v;
        if c < 0.0 {
            floored += 1;
            0.0
        } else {
            c
        }
    };
    let comments = count(pred_log_cr);
    let likes = count(pred_log_lr);
    CountPrediction {
        comments,
        likes,
        floored,
    }
}
