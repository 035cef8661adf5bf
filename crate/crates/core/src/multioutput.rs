//! One booster per target, bundled with the fitted pipeline into a single
//! JSON-persistable model.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{PipelineState, N_TARGETS, TARGET_NAMES};
use crate::gbt::{self, GbtError, GbtModel, GbtParams};
use crate::matrix::Matrix;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("target {target}: {source}")]
    Target {
        target: &'static str,
        #[source]
        source: GbtError,
    },
    #[error("expected {expected} columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported model format version {0}")]
    FormatError(u64),
    #[error("schema error: {0}")]
    SchemaError(String),
    #[error("io: {0}")]
    IoError(#[from] std::io::Error),
}

type Result<T> = std::result::Result<T, ModelError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsUsed {
    pub cr: GbtParams,
    pub lr: GbtParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngagementModel {
    pub format_version: u64,
    pub feature_order: Vec<String>,
    pub pipeline: PipelineState,
    pub params_used: ParamsUsed,
    pub model_cr: GbtModel,
    pub model_lr: GbtModel,
}

/// Fits `model_cr` on `y[:, 0]` and `model_lr` on `y[:, 1]`, independently
/// and with the same parameters.
pub fn fit_multi(x: &Matrix, y: &Matrix, params: &GbtParams, pipeline: &PipelineState) -> Result<EngagementModel> {
    let feature_order = pipeline.feature_order();
    if x.cols() != feature_order.len() {
        return Err(ModelError::DimensionMismatch {
            expected: feature_order.len(),
            got: x.cols(),
        });
    }
    if y.cols() != N_TARGETS {
        return Err(ModelError::DimensionMismatch {
            expected: N_TARGETS,
            got: y.cols(),
        });
    }
    let [cr, lr] = fit_targets(x, y, params)?;
    Ok(EngagementModel {
        format_version: FORMAT_VERSION,
        feature_order,
        pipeline: pipeline.clone(),
        params_used: ParamsUsed {
            cr: params.clone(),
            lr: params.clone(),
        },
        model_cr: cr,
        model_lr: lr,
    })
}

/// One booster per column of `y`, fitted concurrently.
pub(crate) fn fit_targets(x: &Matrix, y: &Matrix, params: &GbtParams) -> Result<[GbtModel; N_TARGETS]> {
    let fit_target = |t: usize| {
        gbt::fit(x, &y.column(t), params).map_err(|source| ModelError::Target {
            target: TARGET_NAMES[t],
            source,
        })
    };
    let (cr, lr) = rayon::join(|| fit_target(0), || fit_target(1));
    Ok([cr?, lr?])
}

impl EngagementModel {
    /// n × 2 matrix of `[pred_log_cr, pred_log_lr]`.
    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.feature_order.len() {
            return Err(ModelError::DimensionMismatch {
                expected: self.feature_order.len(),
                got: x.cols(),
            });
        }
        let label = |t: usize| move |source| ModelError::Target {
            target: TARGET_NAMES[t],
            source,
        };
        let cr = self.model_cr.predict(x).map_err(label(0))?;
        let lr = self.model_lr.predict(x).map_err(label(1))?;
        let mut out = Matrix::zeros(x.rows(), N_TARGETS);
        for (i, (a, b)) in cr.into_iter().zip(lr).enumerate() {
            out.set(i, 0, a);
            out.set(i, 1, b);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ModelError::SchemaError(e.to_string()))?;
        let version = value
            .get("format_version")
            .ok_or_else(|| ModelError::SchemaError("missing format_version".into()))?
            .as_u64()
            .ok_or_else(|| ModelError::SchemaError("format_version is not an integer".into()))?;
        if version != FORMAT_VERSION {
            return Err(ModelError::FormatError(version));
        }
        let model: EngagementModel =
            serde_json::from_value(value).map_err(|e| ModelError::SchemaError(e.to_string()))?;
        model.check().map_err(ModelError::SchemaError)?;
        Ok(model)
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.feature_order != self.pipeline.feature_order() {
            return Err("feature_order does not match the pipeline configuration".into());
        }
        self.pipeline.config.validate().map_err(|e| e.to_string())?;
        let th = self.pipeline.clip_thresholds;
        if [th.cr, th.lr, th.clr].iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err("clip thresholds must be finite and >= 0".into());
        }
        for (name, m) in [("model_cr", &self.model_cr), ("model_lr", &self.model_lr)] {
            if m.n_features() != self.feature_order.len() {
                return Err(format!("{name}: bin mapper has {} features", m.n_features()));
            }
            m.check().map_err(|e| format!("{name}: {e}"))?;
        }
        Ok(())
    }
}

pub fn predict_multi(model: &EngagementModel, x: &Matrix) -> Result<Matrix> {
    model.predict(x)
}

/// Writes `contents` next to `path` and renames it into place, so readers
/// never observe a partial file.
pub(crate) fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn save(model: &EngagementModel, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), model.to_json().as_bytes())?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<EngagementModel> {
    EngagementModel::from_json(&fs::read_to_string(path)?)
}
