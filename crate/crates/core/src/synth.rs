//! Seeded synthetic song table with a known generative process.
//!
//! Per row, in this draw order from one ChaCha8 stream:
//!
//! 1. ten emotion scores, each uniform on `[0, 1)`;
//! 2. `views = max(10, round(exp(N(10, 2))))`;
//! 3. an upload date uniform over `date_range` (inclusive);
//! 4. like rate `lr = sigmoid(LIKE_INTERCEPT + LIKE_COEFS · e + N(0, like_noise_sd))`,
//!    `likes = max(1, round(lr * views))`;
//! 5. comment rate `cr = exp(COMMENT_INTERCEPT + COMMENT_COEFS · e + N(0, comment_noise_sd))`,
//!    `comments = round(cr * views)`.
//!
//! Noise draws are taken even when their standard deviation is zero, so the
//! stream layout does not depend on the noise settings.

use chrono::{Duration, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tabular::{RawRecord, RawTable, N_EMOTIONS};

/// Like-rate logit coefficients, in `EMOTION_NAMES` order.
pub const LIKE_COEFS: [f64; N_EMOTIONS] = [1.2, 0.8, -0.4, 0.3, 0.9, -0.6, -0.3, 0.2, 0.5, 0.4];
pub const LIKE_INTERCEPT: f64 = -3.6;
/// Log comment-rate coefficients, in `EMOTION_NAMES` order.
pub const COMMENT_COEFS: [f64; N_EMOTIONS] = [0.3, 0.0, 0.2, 0.0, 0.1, 0.0, 0.0, 0.2, 0.0, -0.1];
pub const COMMENT_INTERCEPT: f64 = -6.5;
pub const VIEWS_LOG_MEAN: f64 = 10.0;
pub const VIEWS_LOG_SD: f64 = 2.0;
pub const MIN_VIEWS: u64 = 10;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid synth config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_rows: usize,
    pub seed: u64,
    pub like_noise_sd: f64,
    pub comment_noise_sd: f64,
    pub date_range: (NaiveDate, NaiveDate),
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_rows: 600,
            seed: 42,
            like_noise_sd: 0.05,
            comment_noise_sd: 0.9,
            date_range: (
                NaiveDate::from_ymd_opt(2015, 1, 1).expect("valid date"),
                NaiveDate::from_ymd_opt(2024, 12, 31).expect("valid date"),
            ),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidConfig(m.into()));
        if self.n_rows < 10 {
            return bad("n_rows must be >= 10");
        }
        if !(self.like_noise_sd >= 0.0 && self.like_noise_sd.is_finite()) {
            return bad("like_noise_sd must be finite and >= 0");
        }
        if !(self.comment_noise_sd >= 0.0 && self.comment_noise_sd.is_finite()) {
            return bad("comment_noise_sd must be finite and >= 0");
        }
        if self.date_range.0 > self.date_range.1 {
            return bad("date_range start after end");
        }
        Ok(())
    }
}

fn dot(a: &[f64; N_EMOTIONS], b: &[f64; N_EMOTIONS]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Noise-free like rate for the given emotions.
pub fn like_rate(emotions: &[f64; N_EMOTIONS]) -> f64 {
    sigmoid(LIKE_INTERCEPT + dot(&LIKE_COEFS, emotions))
}

/// Noise-free comment rate for the given emotions.
pub fn comment_rate(emotions: &[f64; N_EMOTIONS]) -> f64 {
    (COMMENT_INTERCEPT + dot(&COMMENT_COEFS, emotions)).exp()
}

pub fn generate(config: &SynthConfig) -> Result<RawTable, SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (start, end) = config.date_range;
    let span = (end - start).num_days();
    let width = (config.n_rows).to_string().len();

    let mut records = Vec::with_capacity(config.n_rows);
    for i in 0..config.n_rows {
        let mut emotions = [0.0; N_EMOTIONS];
        for e in &mut emotions {
            *e = rng.random::<f64>();
        }
        let z: f64 = StandardNormal.sample(&mut rng);
        let views = ((VIEWS_LOG_MEAN + VIEWS_LOG_SD * z).exp().round() as u64).max(MIN_VIEWS);
        let upload_date = start + Duration::days(rng.random_range(0..=span));

        let like_noise: f64 = StandardNormal.sample(&mut rng);
        let lr = sigmoid(LIKE_INTERCEPT + dot(&LIKE_COEFS, &emotions) + config.like_noise_sd * like_noise);
        let likes = ((lr * views as f64).round() as u64).max(1);

        let comment_noise: f64 = StandardNormal.sample(&mut rng);
        let cr = (COMMENT_INTERCEPT + dot(&COMMENT_COEFS, &emotions) + config.comment_noise_sd * comment_noise).exp();
        let comments = (cr * views as f64).round() as u64;

        records.push(RawRecord {
            track_id: Some(format!("synth-{:0width$}", i + 1)),
            upload_date,
            views,
            likes,
            comments,
            emotions,
        });
    }
    Ok(RawTable {
        source_row_indices: (1..=records.len()).collect(),
        records,
        dropped: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::clean;

    #[test]
    fn deterministic() {
        let c = SynthConfig::default();
        assert_eq!(generate(&c).unwrap(), generate(&c).unwrap());
        let other = SynthConfig { seed: 7, ..c.clone() };
        assert_ne!(generate(&c).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn rows_satisfy_table_invariants() {
        let t = generate(&SynthConfig::default()).unwrap();
        assert_eq!(t.len(), 600);
        let (start, end) = SynthConfig::default().date_range;
        for r in &t.records {
            assert!(r.views >= MIN_VIEWS && r.likes >= 1);
            assert!(r.emotions.iter().all(|e| (0.0..1.0).contains(e)));
            assert!(r.upload_date >= start && r.upload_date <= end);
        }
        let kept = clean(&t).unwrap().len();
        assert!(kept as f64 >= 0.95 * 600.0, "{kept}");
    }

    #[test]
    fn noiseless_rates_follow_the_coefficients() {
        let c = SynthConfig {
            like_noise_sd: 0.0,
            comment_noise_sd: 0.0,
            ..Default::default()
        };
        for r in generate(&c).unwrap().records {
            let v = r.views as f64;
            assert_eq!(r.likes, ((like_rate(&r.emotions) * v).round() as u64).max(1));
            assert_eq!(r.comments, (comment_rate(&r.emotions) * v).round() as u64);
        }
    }

    #[test]
    fn noise_settings_do_not_shift_the_stream() {
        let a = generate(&SynthConfig::default()).unwrap();
        let b = generate(&SynthConfig {
            like_noise_sd: 0.0,
            comment_noise_sd: 0.0,
            ..Default::default()
        })
        .unwrap();
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!((x.views, x.upload_date, x.emotions), (y.views, y.upload_date, y.emotions));
        }
    }

    #[test]
    fn single_day_range() {
        let d = NaiveDate::from_ymd_opt(2020, 2, 29).unwrap();
        let t = generate(&SynthConfig {
            date_range: (d, d),
            n_rows: 10,
            ..Default::default()
        })
        .unwrap();
        assert!(t.records.iter().all(|r| r.upload_date == d));
    }

    #[test]
    fn config_validation() {
        assert!(SynthConfig { n_rows: 9, ..Default::default() }.validate().is_err());
        assert!(SynthConfig { like_noise_sd: -1.0, ..Default::default() }.validate().is_err());
        assert!(SynthConfig { comment_noise_sd: f64::NAN, ..Default::default() }.validate().is_err());
        let d = NaiveDate::from_ymd_opt(2020, 1, 2).unwrap();
        let e = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        assert!(SynthConfig { date_range: (d, e), ..Default::default() }.validate().is_err());
    }
}
