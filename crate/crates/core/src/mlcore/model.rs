use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EnsembleKind, FeatureVector, LinearModel, MinMaxScaler, MlError, Result, TreeEnsemble};
use crate::phonetics::PhoneticScheme;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Blend {
    pub semantic: f64,
    pub fluency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum FluencyModel {
    Linear(LinearModel),
    Ensemble(TreeEnsemble),
}

impl FluencyModel {
    pub fn predict(&self, x: &FeatureVector) -> f64 {
        match self {
            FluencyModel::Linear(m) => m.predict(x),
            FluencyModel::Ensemble(m) => m.predict(x),
        }
    }
}

/// A trained supervised approach: everything needed to score new pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreModel {
    pub format_version: u32,
    pub approach: u8,
    pub language: String,
    /// Embedding source the features were computed with.
    pub source_tag: String,
    pub scheme: PhoneticScheme,
    pub scaler: Option<MinMaxScaler>,
    pub ridge_lambda: Option<f64>,
    pub semantic: LinearModel,
    pub fluency: FluencyModel,
    pub blend: Blend,
}

impl ScoreModel {
    pub fn prepare(&self, x: &FeatureVector) -> FeatureVector {
        match &self.scaler {
            Some(s) => s.apply(x),
            None => *x,
        }
    }

    /// Semantic and fluency predictions on raw (unscaled) features.
    pub fn predict_parts(&self, x: &FeatureVector) -> (f64, f64) {
        let x = self.prepare(x);
        (self.semantic.predict(&x), self.fluency.predict(&x))
    }

    /// Blended prediction, not clamped.
    pub fn predict(&self, x: &FeatureVector) -> f64 {
        let (sem, flu) = self.predict_parts(x);
        self.blend.semantic * sem + self.blend.fluency * flu
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(4..=6).contains(&self.approach) {
            return Err(format!("unknown approach {}", self.approach));
        }
        let Blend { semantic, fluency } = self.blend;
        if !(semantic >= 0.0 && fluency >= 0.0 && (semantic + fluency - 1.0).abs() <= 1e-9) {
            return Err(format!("blend weights ({semantic}, {fluency}) must be non-negative and sum to 1"));
        }
        if !self.semantic.is_finite() {
            return Err("non-finite semantic coefficients".into());
        }
        if let Some(s) = &self.scaler {
            let ordered = s.mins.iter().zip(&s.maxs).all(|(lo, hi)| lo.is_finite() && hi.is_finite() && lo <= hi);
            if !ordered {
                return Err("scaler bounds must be finite with min <= max".into());
            }
        }
        let expected_kind = match self.approach {
            5 => Some(EnsembleKind::RandomForest),
            6 => Some(EnsembleKind::GradientBoosting),
            _ => None,
        };
        match (&self.fluency, expected_kind) {
            (FluencyModel::Linear(m), None) if m.is_finite() => Ok(()),
            (FluencyModel::Linear(_), None) => Err("non-finite fluency coefficients".into()),
            (FluencyModel::Ensemble(e), Some(kind)) if e.kind == kind => e.validate(),
            _ => Err(format!("fluency model does not match approach {}", self.approach)),
        }
    }
}

/// Writes the model as pretty-printed JSON, atomically.
pub fn save_model(model: &ScoreModel, path: &Path) -> Result<()> {
    let io = |source| MlError::Io {
        path: path.display().to_string(),
        source,
    };
    let json = serde_json::to_string_pretty(model).expect("model serializes");
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(json.as_bytes()).map_err(io)?;
    tmp.write_all(b"\n").map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<ScoreModel> {
    let shown = path.display().to_string();
    let content = std::fs::read_to_string(path).map_err(|source| MlError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_model(&content, &shown)
}

fn parse_model(content: &str, origin: &str) -> Result<ScoreModel> {
    let format = |message: String| MlError::Format {
        path: origin.to_string(),
        message,
    };
    if content.trim().is_empty() {
        return Err(format("file is empty".into()));
    }
    let value: serde_json::Value = serde_json::from_str(content).map_err(|e| format(e.to_string()))?;
    let found = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| format("missing format_version".into()))?;
    if found != u64::from(MODEL_FORMAT_VERSION) {
        return Err(MlError::Version {
            path: origin.to_string(),
            found: u32::try_from(found).unwrap_or(u32::MAX),
            expected: MODEL_FORMAT_VERSION,
        });
    }
    match value.get("approach").and_then(serde_json::Value::as_u64) {
        Some(4..=6) => {}
        Some(other) => return Err(format(format!("unknown approach {other}"))),
        None => return Err(format("missing approach".into())),
    }
    let model: ScoreModel = serde_json::from_value(value).map_err(|e| format(e.to_string()))?;
    model.validate().map_err(format)?;
    Ok(model)
}
