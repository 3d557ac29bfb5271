//! Feature assembly, scaling, regressors and model persistence.
//!
//! Every fit here is single-threaded and deterministic: the same rows and
//! seed give bit-identical models.

mod ensemble;
mod features;
mod linear;
mod model;
mod scaler;
mod tree;

use thiserror::Error;

pub use ensemble::{gbr_fit, gbr_fit_with_history, rf_fit, EnsembleKind, EnsembleParams, TreeEnsemble};
pub use features::{extract_features, FeatureVector, FEATURE_NAMES, N_FEATURES};
pub use linear::{ols_fit, ridge_fit, LinearModel, Target};
pub use model::{load_model, save_model, Blend, FluencyModel, ScoreModel, MODEL_FORMAT_VERSION};
pub use scaler::{minmax_apply, minmax_fit, MinMaxScaler};
pub use tree::{Node, RegressionTree, TreeParams};

/// One design-matrix row: `[lexical, phonetic, semantic, fuzzy]`.
pub type Row = [f64; N_FEATURES];

#[derive(Debug, Error)]
pub enum MlError {
    #[error("{what} needs at least {need} rows, got {got}")]
    TooFewRows {
        what: &'static str,
        need: usize,
        got: usize,
    },
    #[error("{rows} feature rows but {targets} targets")]
    LengthMismatch { rows: usize, targets: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("normal equations are rank-deficient (condition {condition:.3e}); use ridge regression")]
    RankDeficient { condition: f64 },
    #[error("invalid hyperparameter: {0}")]
    InvalidParam(String),
    #[error("model file {path}: {message}")]
    Format { path: String, message: String },
    #[error("model file {path} has format version {found}, expected {expected}")]
    Version {
        path: String,
        found: u32,
        expected: u32,
    },
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = MlError> = std::result::Result<T, E>;

fn check_xy(what: &'static str, x: &[Row], y: &[f64], need: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(MlError::LengthMismatch {
            rows: x.len(),
            targets: y.len(),
        });
    }
    if x.len() < need {
        return Err(MlError::TooFewRows {
            what,
            need,
            got: x.len(),
        });
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(MlError::NonFinite("features"));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(MlError::NonFinite("targets"));
    }
    Ok(())
}
