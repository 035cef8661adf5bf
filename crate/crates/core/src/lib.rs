//! Engagement prediction for music videos from emotional and temporal features.
//!
//! The crate covers the whole batch pipeline:
//!
//! - [`tabular`]: CSV schema, parsing and row-level cleaning.
//! - [`features`]: temporal features, log transforms, engagement ratios,
//!   quantile clipping and the inverse transform back to counts.
//! - [`gbt`]: a histogram gradient boosting regressor (squared error,
//!   leaf-wise growth, L2 leaf regularization, early stopping).
//! - [`multioutput`]: one booster per target, bundled with the fitted
//!   pipeline state into a persistable [`multioutput::EngagementModel`].
//! - [`metrics`]: order-of-magnitude accuracy plus MAE/RMSE/R² on counts.
//! - [`tuning`]: successive-halving random search with k-fold CV.
//! - [`synth`]: a seeded synthetic dataset generator.
//! - [`cli`]: the commands behind the `engage` binary.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod cli;
pub mod features;
pub mod gbt;
pub mod matrix;
pub mod metrics;
pub mod multioutput;
pub mod synth;
pub mod tabular;
pub mod tuning;

mod error;

pub use error::{Error, Result};
pub use matrix::Matrix;
