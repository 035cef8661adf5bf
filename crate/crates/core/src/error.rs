use thiserror::Error;

use crate::features::FeatureError;
use crate::gbt::GbtError;
use crate::metrics::MetricsError;
use crate::multioutput::ModelError;
use crate::tabular::TabularError;
use crate::tuning::TuningError;

/// Any pipeline failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Tabular(#[from] TabularError),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    Gbt(#[from] GbtError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Tuning(#[from] TuningError),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
