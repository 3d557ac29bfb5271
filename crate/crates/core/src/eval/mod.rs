//! Datasets, the correlation harness, configuration and the batch pipeline.

mod config;
mod correlation;
mod dataset;
mod pipeline;
mod report;
pub mod synthetic;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::MetricsError;
use crate::mlcore::MlError;
use crate::semantics::SemanticsError;

pub use config::{LanguageConfig, PipelineConfig, ProviderConfig, WeightOverrides};
pub use correlation::{average_ranks, pearson, spearman, CorrelationError};
pub use dataset::{
    dataset_to_tsv, load_dataset, parse_dataset, AnnotatedDataset, AnnotatedRow, Split, OPTIONAL_COLUMNS,
    REQUIRED_COLUMNS,
};
pub use pipeline::{run_pipeline, PipelineOutcome};
pub use report::{EvalReport, ReportEntry};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{path}:{line}: {message}")]
    Dataset {
        path: String,
        line: usize,
        message: String,
    },
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Data(String),
    #[error("prediction ids missing from the dataset: {}", .0.join(", "))]
    MissingIds(Vec<String>),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Model(#[from] MlError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("config {path}: {message}")]
    Config { path: String, message: String },
    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<EvalError>,
    },
}

pub type Result<T, E = EvalError> = std::result::Result<T, E>;

fn ml_exit_code(e: &MlError) -> i32 {
    match e {
        MlError::Io { .. } | MlError::Format { .. } | MlError::Version { .. } => EXIT_DATA,
        MlError::InvalidParam(_) => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

impl EvalError {
    /// Process exit code: 1 usage, 2 data, 3 numeric or training failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            EvalError::Config { .. } => EXIT_USAGE,
            EvalError::Correlation(_) => EXIT_NUMERIC,
            EvalError::Model(e) => ml_exit_code(e),
            EvalError::Metrics(MetricsError::Ml(e)) => ml_exit_code(e),
            EvalError::Metrics(MetricsError::Invalid(_)) => EXIT_USAGE,
            EvalError::Stage { source, .. } => source.exit_code(),
            _ => EXIT_DATA,
        }
    }

    pub fn in_stage(self, stage: impl Into<String>) -> Self {
        EvalError::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }
}

/// Which human judgment predictions are correlated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Semantic,
    Fluency,
    /// The `overall` column, or the mean of semantic and fluency when the
    /// dataset has no such column.
    Overall,
}

impl Dimension {
    pub fn name(self) -> &'static str {
        match self {
            Dimension::Semantic => "semantic",
            Dimension::Fluency => "fluency",
            Dimension::Overall => "overall",
        }
    }

    pub fn human(self, row: &AnnotatedRow, has_overall: bool) -> Option<f64> {
        match self {
            Dimension::Semantic => row.semantic,
            Dimension::Fluency => row.fluency,
            Dimension::Overall if has_overall => row.overall,
            Dimension::Overall => Some((row.semantic? + row.fluency?) / 2.0),
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dimension {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "semantic" => Ok(Dimension::Semantic),
            "fluency" => Ok(Dimension::Fluency),
            "overall" => Ok(Dimension::Overall),
            _ => Err(format!("unknown dimension `{s}`; expected semantic, fluency or overall")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub pearson: f64,
    pub spearman: f64,
    pub n: usize,
}

/// Joins predictions with human scores by segment id and correlates them.
///
/// Dataset rows without a prediction are ignored. The joined pairs are put
/// in id order first, so the result does not depend on row order.
pub fn evaluate(predictions: &[(String, f64)], dataset: &AnnotatedDataset, dimension: Dimension) -> Result<Correlation> {
    let rows: HashMap<&str, &AnnotatedRow> = dataset.rows.iter().map(|r| (r.id.as_str(), r)).collect();
    let missing: Vec<String> = predictions
        .iter()
        .filter(|(id, _)| !rows.contains_key(id.as_str()))
        .map(|(id, _)| id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(EvalError::MissingIds(missing));
    }
    let has_overall = dataset.has_overall();
    let mut joined: Vec<(&str, f64, f64)> = Vec::with_capacity(predictions.len());
    for (id, score) in predictions {
        let human = dimension.human(rows[id.as_str()], has_overall).ok_or_else(|| {
            EvalError::Data(format!("segment `{id}` has no {dimension} annotation"))
        })?;
        joined.push((id, *score, human));
    }
    joined.sort_by(|a, b| a.0.cmp(b.0));
    let x: Vec<f64> = joined.iter().map(|j| j.1).collect();
    let y: Vec<f64> = joined.iter().map(|j| j.2).collect();
    Ok(Correlation {
        pearson: pearson(&x, &y)?,
        spearman: spearman(&x, &y)?,
        n: joined.len(),
    })
}

/// Parses `<id>\t<score>` lines.
pub fn parse_scores(content: &str, origin: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in content.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| EvalError::Dataset {
            path: origin.to_owned(),
            line: i + 1,
            message,
        };
        let (id, score) = line
            .split_once('\t')
            .ok_or_else(|| err("expected `<id>\\t<score>`".into()))?;
        let score: f64 = score
            .trim()
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| err(format!("unparsable score `{score}`")))?;
        if !seen.insert(id.to_owned()) {
            return Err(err(format!("duplicate segment id `{id}`")));
        }
        out.push((id.to_owned(), score));
    }
    Ok(out)
}

pub fn load_scores(path: &Path) -> Result<Vec<(String, f64)>> {
    let content = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scores(&content, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset() -> AnnotatedDataset {
        let text = "id\tsource\treference\thypothesis\tsemantic\tfluency\n\
                    a\ts\tr\th\t10\t20\nb\ts\tr\th\t30\t10\nc\ts\tr\th\t50\t60\nd\ts\tr\th\t\t5\n";
        parse_dataset(text, "t", "gn", None).unwrap()
    }

    #[test]
    fn perfect_and_inverse_predictions() {
        let d = dataset();
        let preds: Vec<(String, f64)> = vec![("a".into(), 10.0), ("b".into(), 30.0), ("c".into(), 50.0)];
        let c = evaluate(&preds, &d, Dimension::Semantic).unwrap();
        assert_eq!((c.pearson, c.spearman, c.n), (1.0, 1.0, 3));
        let neg: Vec<_> = preds.iter().map(|(id, v)| (id.clone(), -v)).collect();
        let c = evaluate(&neg, &d, Dimension::Semantic).unwrap();
        assert_eq!((c.pearson, c.spearman), (-1.0, -1.0));
        let scaled: Vec<_> = preds.iter().map(|(id, v)| (id.clone(), 3.0 * v + 1.0)).collect();
        assert!((evaluate(&scaled, &d, Dimension::Semantic).unwrap().pearson - 1.0).abs() < 1e-15);
        let overall = evaluate(&[("a".into(), 15.0), ("b".into(), 20.0), ("c".into(), 55.0)], &d, Dimension::Overall).unwrap();
        assert_eq!(overall.pearson, 1.0);
    }

    #[test]
    fn join_errors() {
        let d = dataset();
        let e = evaluate(&[("a".into(), 1.0), ("zz".into(), 2.0)], &d, Dimension::Fluency).unwrap_err();
        assert!(matches!(&e, EvalError::MissingIds(ids) if ids == &["zz".to_string()]));
        assert_eq!(e.exit_code(), EXIT_DATA);
        let e = evaluate(&[("a".into(), 1.0), ("d".into(), 2.0)], &d, Dimension::Semantic).unwrap_err();
        assert!(e.to_string().contains("`d`"));
        let e = evaluate(&[("a".into(), 1.0), ("b".into(), 1.0)], &d, Dimension::Semantic).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_NUMERIC);
    }

    #[test]
    fn score_file_parsing() {
        let s = parse_scores("a\t1.5000\nb\t2\n\n", "s").unwrap();
        assert_eq!(s, vec![("a".to_string(), 1.5), ("b".to_string(), 2.0)]);
        assert!(parse_scores("a 1.5\n", "s").is_err());
        assert!(parse_scores("a\tx\n", "s").is_err());
        assert!(parse_scores("a\t1\na\t2\n", "s").unwrap_err().to_string().contains("s:2"));
    }
}
