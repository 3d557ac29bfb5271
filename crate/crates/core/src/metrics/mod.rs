//! The six approach scorers, BLEU and chrF baselines, and score files.
//!
//! Every scorer maps a (reference, hypothesis) pair to `[0, 100]`. A
//! non-empty reference paired with an empty hypothesis always scores `0`.

mod bleu;
mod chrf;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mlcore::{
    extract_features, gbr_fit, minmax_fit, ols_fit, rf_fit, ridge_fit, Blend, EnsembleParams, FeatureVector,
    FluencyModel, MlError, ScoreModel, Target, MODEL_FORMAT_VERSION,
};
use crate::phonetics::{phonetic_similarity, PhoneticScheme};
use crate::semantics::{semantic_similarity, EmbeddingProvider, SemanticsError};
use crate::textsim::{jaccard_trigram, lexical_similarity, token_sort_ratio, NormalizedText};

pub use bleu::{bleu, BLEU_MAX_ORDER};
pub use chrf::{chrf, chrf_pp, chrf_with, CHRF_BETA, CHRF_CHAR_ORDER};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Ml(#[from] MlError),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = MetricsError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Approach {
    /// Trigram Jaccard and phonetic similarity.
    JaccardPhonetic = 1,
    /// Lexical, phonetic and semantic similarity.
    LexicalPhoneticSemantic = 2,
    /// All four features with fixed weights.
    FixedFourFeature = 3,
    /// Two least-squares models averaged.
    LinearPair = 4,
    /// Scaled features, ridge for adequacy and a random forest for fluency.
    RidgeForest = 5,
    /// Scaled features, ridge for adequacy and gradient boosting for fluency.
    RidgeBoosting = 6,
}

impl Approach {
    pub const ALL: [Approach; 6] = [
        Approach::JaccardPhonetic,
        Approach::LexicalPhoneticSemantic,
        Approach::FixedFourFeature,
        Approach::LinearPair,
        Approach::RidgeForest,
        Approach::RidgeBoosting,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn is_trained(self) -> bool {
        self.id() >= 4
    }

    pub fn scheme(self) -> PhoneticScheme {
        match self {
            Approach::JaccardPhonetic => PhoneticScheme::Metaphone,
            Approach::LexicalPhoneticSemantic => PhoneticScheme::DoubleMetaphonePrimary,
            Approach::FixedFourFeature => PhoneticScheme::SoundexPlusDoubleMetaphone,
            _ => PhoneticScheme::SoundexPlusMetaphone,
        }
    }

    /// Default fixed weights; `None` for trained approaches.
    pub fn default_weights(self) -> Option<FixedWeights> {
        let zero = FixedWeights::default();
        match self {
            Approach::JaccardPhonetic => Some(FixedWeights {
                jaccard: 0.7,
                phonetic: 0.3,
                ..zero
            }),
            Approach::LexicalPhoneticSemantic => Some(FixedWeights {
                lexical: 0.5,
                phonetic: 0.2,
                semantic: 0.3,
                ..zero
            }),
            Approach::FixedFourFeature => Some(FixedWeights {
                lexical: 0.45,
                phonetic: 0.15,
                semantic: 0.30,
                fuzzy: 0.10,
                ..zero
            }),
            _ => None,
        }
    }

    /// Default output blend; `None` for fixed approaches.
    pub fn default_blend(self) -> Option<Blend> {
        let (semantic, fluency) = match self {
            Approach::LinearPair => (0.5, 0.5),
            Approach::RidgeForest => (0.6, 0.4),
            Approach::RidgeBoosting => (0.7, 0.3),
            _ => return None,
        };
        Some(Blend { semantic, fluency })
    }
}

impl TryFrom<u8> for Approach {
    type Error = String;

    fn try_from(id: u8) -> Result<Self, String> {
        Approach::ALL
            .into_iter()
            .find(|a| a.id() == id)
            .ok_or_else(|| format!("unknown approach {id}; expected 1 to 6"))
    }
}

impl From<Approach> for u8 {
    fn from(a: Approach) -> u8 {
        a.id()
    }
}

impl FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let id: u8 = s.trim().parse().map_err(|_| format!("approach must be 1 to 6, got `{s}`"))?;
        Approach::try_from(id)
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Weights of the fixed-combination approaches. Unused components are zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixedWeights {
    pub jaccard: f64,
    pub lexical: f64,
    pub phonetic: f64,
    pub semantic: f64,
    pub fuzzy: f64,
}

impl FixedWeights {
    pub fn as_array(&self) -> [f64; 5] {
        [self.jaccard, self.lexical, self.phonetic, self.semantic, self.fuzzy]
    }

    /// `100 * sum(w_i * v_i)` over `[jaccard, lexical, phonetic, semantic,
    /// fuzzy]`, clamped. Components with zero weight are ignored.
    pub fn combine(&self, values: [f64; 5]) -> f64 {
        let (mut total, mut weight_sum, mut all_one) = (0.0, 0.0, true);
        for (w, v) in self.as_array().into_iter().zip(values) {
            if w > 0.0 {
                total += w * v;
                weight_sum += w;
                all_one &= v == 1.0;
            }
        }
        // keeps identical pairs at exactly 100 despite weight rounding
        if all_one && (weight_sum - 1.0).abs() < 1e-9 {
            return 100.0;
        }
        clamp_score(100.0 * total)
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.as_array();
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(MetricsError::Invalid(format!("weights must be finite and non-negative: {self:?}")));
        }
        if w.iter().sum::<f64>() > 1.0 + 1e-9 {
            return Err(MetricsError::Invalid(format!("weights must not sum above 1: {self:?}")));
        }
        Ok(())
    }
}

pub fn clamp_score(value: f64) -> f64 {
    if value.is_nan() {
        0.0
    } else {
        value.clamp(0.0, 100.0)
    }
}

fn degenerate(r: &NormalizedText, h: &NormalizedText) -> bool {
    h.is_empty() && !r.is_empty()
}

/// A ready-to-use scorer for one approach.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Scorer {
    Fixed { approach: Approach, weights: FixedWeights },
    Trained(ScoreModel),
}

impl Scorer {
    pub fn fixed(approach: Approach) -> Result<Self> {
        let weights = approach
            .default_weights()
            .ok_or_else(|| MetricsError::Invalid(format!("approach {approach} needs a trained model")))?;
        Ok(Scorer::Fixed { approach, weights })
    }

    pub fn approach(&self) -> Approach {
        match self {
            Scorer::Fixed { approach, .. } => *approach,
            Scorer::Trained(m) => Approach::try_from(m.approach).expect("validated model"),
        }
    }

    pub fn score(&self, r: &NormalizedText, h: &NormalizedText, provider: &EmbeddingProvider) -> Result<f64> {
        if degenerate(r, h) {
            return Ok(0.0);
        }
        match self {
            Scorer::Fixed { approach, weights } => {
                let scheme = approach.scheme();
                let mut values = [0.0; 5];
                if weights.jaccard > 0.0 {
                    values[0] = jaccard_trigram(r, h);
                }
                if weights.lexical > 0.0 {
                    values[1] = lexical_similarity(r, h);
                }
                if weights.phonetic > 0.0 {
                    values[2] = phonetic_similarity(r, h, scheme);
                }
                if weights.semantic > 0.0 {
                    values[3] = semantic_similarity(r, h, provider)?;
                }
                if weights.fuzzy > 0.0 {
                    values[4] = token_sort_ratio(r, h);
                }
                Ok(weights.combine(values))
            }
            Scorer::Trained(model) => {
                let x = extract_features(r, h, provider, model.scheme)?;
                Ok(trained_score(model, r, h, &x))
            }
        }
    }

    /// Scores all pairs, in input order. Embeddings are resolved up front so
    /// a remote encoder sees batched requests.
    pub fn score_batch(
        &self,
        pairs: &[(NormalizedText, NormalizedText)],
        provider: &EmbeddingProvider,
    ) -> Result<Vec<f64>> {
        provider.prefetch(pairs.iter().flat_map(|(r, h)| [r, h]))?;
        pairs.par_iter().map(|(r, h)| self.score(r, h, provider)).collect()
    }
}

/// Score of a trained model on features already extracted for `(r, h)`.
pub fn trained_score(model: &ScoreModel, r: &NormalizedText, h: &NormalizedText, x: &FeatureVector) -> f64 {
    if degenerate(r, h) {
        0.0
    } else {
        clamp_score(model.predict(x))
    }
}

pub fn approach1(r: &NormalizedText, h: &NormalizedText) -> f64 {
    let provider = EmbeddingProvider::HashedNgram { dim: 16, n: 3 };
    Scorer::fixed(Approach::JaccardPhonetic)
        .and_then(|s| s.score(r, h, &provider))
        .expect("approach 1 needs no embeddings")
}

pub fn approach2(r: &NormalizedText, h: &NormalizedText, provider: &EmbeddingProvider) -> Result<f64> {
    Scorer::fixed(Approach::LexicalPhoneticSemantic)?.score(r, h, provider)
}

pub fn approach3(r: &NormalizedText, h: &NormalizedText, provider: &EmbeddingProvider) -> Result<f64> {
    Scorer::fixed(Approach::FixedFourFeature)?.score(r, h, provider)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    Bleu,
    Chrf,
    Chrfpp,
}

impl Baseline {
    pub fn score(self, r: &NormalizedText, h: &NormalizedText) -> f64 {
        match self {
            Baseline::Bleu => bleu(r, h),
            Baseline::Chrf => chrf(r, h),
            Baseline::Chrfpp => chrf_pp(r, h),
        }
    }

    /// Lowercase identifier used on the command line and in file names.
    pub fn tag(self) -> &'static str {
        match self {
            Baseline::Bleu => "bleu",
            Baseline::Chrf => "chrf",
            Baseline::Chrfpp => "chrfpp",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Baseline::Bleu => "BLEU",
            Baseline::Chrf => "chrF",
            Baseline::Chrfpp => "chrF++",
        }
    }

    pub fn score_batch(self, pairs: &[(NormalizedText, NormalizedText)]) -> Vec<f64> {
        pairs.par_iter().map(|(r, h)| self.score(r, h)).collect()
    }
}

impl FromStr for Baseline {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bleu" => Ok(Baseline::Bleu),
            "chrf" => Ok(Baseline::Chrf),
            "chrfpp" | "chrf++" => Ok(Baseline::Chrfpp),
            _ => Err(format!("unknown baseline `{s}`; expected bleu, chrf or chrfpp")),
        }
    }
}

/// Hyperparameters for the trained approaches.
///
/// When deserialized, ensemble tables may list only the fields they change;
/// `max_depth = 0` means unlimited depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainParams {
    pub ridge_lambda: f64,
    #[serde(deserialize_with = "forest_params")]
    pub random_forest: EnsembleParams,
    #[serde(deserialize_with = "boosting_params")]
    pub gradient_boosting: EnsembleParams,
    pub seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialEnsemble {
    n_trees: Option<usize>,
    max_depth: Option<usize>,
    min_leaf: Option<usize>,
    max_features: Option<usize>,
    bootstrap: Option<bool>,
    learning_rate: Option<f64>,
}

impl PartialEnsemble {
    fn over(self, base: EnsembleParams) -> EnsembleParams {
        EnsembleParams {
            n_trees: self.n_trees.unwrap_or(base.n_trees),
            max_depth: self.max_depth.map_or(base.max_depth, |d| (d > 0).then_some(d)),
            min_leaf: self.min_leaf.unwrap_or(base.min_leaf),
            max_features: self.max_features.unwrap_or(base.max_features),
            bootstrap: self.bootstrap.unwrap_or(base.bootstrap),
            learning_rate: self.learning_rate.unwrap_or(base.learning_rate),
        }
    }
}

fn forest_params<'de, D: serde::Deserializer<'de>>(d: D) -> Result<EnsembleParams, D::Error> {
    PartialEnsemble::deserialize(d).map(|p| p.over(EnsembleParams::random_forest()))
}

fn boosting_params<'de, D: serde::Deserializer<'de>>(d: D) -> Result<EnsembleParams, D::Error> {
    PartialEnsemble::deserialize(d).map(|p| p.over(EnsembleParams::gradient_boosting()))
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            ridge_lambda: 1.0,
            random_forest: EnsembleParams::random_forest(),
            gradient_boosting: EnsembleParams::gradient_boosting(),
            seed: 42,
        }
    }
}

/// One annotated training example.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingExample {
    pub features: FeatureVector,
    pub semantic: f64,
    pub fluency: f64,
}

/// Fits approach 4, 5 or 6 on pre-computed features.
pub fn train_on_features(
    approach: Approach,
    examples: &[TrainingExample],
    params: &TrainParams,
    language: &str,
    source_tag: &str,
) -> Result<ScoreModel> {
    let blend = approach
        .default_blend()
        .ok_or_else(|| MetricsError::Invalid(format!("approach {approach} is not trained")))?;
    let raw: Vec<FeatureVector> = examples.iter().map(|e| e.features).collect();
    let scaler = match approach {
        Approach::LinearPair => None,
        _ => Some(minmax_fit(&raw)?),
    };
    let x: Vec<[f64; 4]> = raw
        .iter()
        .map(|f| scaler.as_ref().map_or(*f, |s| s.apply(f)).to_array())
        .collect();
    let sem: Vec<f64> = examples.iter().map(|e| e.semantic).collect();
    let flu: Vec<f64> = examples.iter().map(|e| e.fluency).collect();

    let (semantic, fluency, ridge_lambda) = match approach {
        Approach::LinearPair => (
            ols_fit(&x, &sem)?,
            FluencyModel::Linear(ols_fit(&x, &flu)?.with_target(Target::Fluency)),
            None,
        ),
        Approach::RidgeForest => (
            ridge_fit(&x, &sem, params.ridge_lambda)?,
            FluencyModel::Ensemble(rf_fit(&x, &flu, &params.random_forest, params.seed)?),
            Some(params.ridge_lambda),
        ),
        _ => (
            ridge_fit(&x, &sem, params.ridge_lambda)?,
            FluencyModel::Ensemble(gbr_fit(&x, &flu, &params.gradient_boosting, params.seed)?),
            Some(params.ridge_lambda),
        ),
    };
    let model = ScoreModel {
        format_version: MODEL_FORMAT_VERSION,
        approach: approach.id(),
        language: language.to_owned(),
        source_tag: source_tag.to_owned(),
        scheme: approach.scheme(),
        scaler,
        ridge_lambda,
        semantic: semantic.with_target(Target::Semantic),
        fluency,
        blend,
    };
    model.validate().map_err(MetricsError::Invalid)?;
    Ok(model)
}

/// Feature vectors for many pairs under one scheme, in input order.
pub fn extract_batch(
    pairs: &[(NormalizedText, NormalizedText)],
    provider: &EmbeddingProvider,
    scheme: PhoneticScheme,
) -> Result<Vec<FeatureVector>> {
    provider.prefetch(pairs.iter().flat_map(|(r, h)| [r, h]))?;
    Ok(pairs
        .par_iter()
        .map(|(r, h)| extract_features(r, h, provider, scheme))
        .collect::<Result<_, _>>()?)
}

/// Extracts features and fits approach 4, 5 or 6.
pub fn train_approach(
    approach: Approach,
    pairs: &[(NormalizedText, NormalizedText)],
    semantic: &[f64],
    fluency: &[f64],
    provider: &EmbeddingProvider,
    params: &TrainParams,
    language: &str,
) -> Result<ScoreModel> {
    if pairs.len() != semantic.len() || pairs.len() != fluency.len() {
        return Err(MetricsError::Invalid("pairs and annotations differ in length".into()));
    }
    let features = extract_batch(pairs, provider, approach.scheme())?;
    let examples: Vec<TrainingExample> = features
        .into_iter()
        .zip(semantic.iter().zip(fluency))
        .map(|(features, (&semantic, &fluency))| TrainingExample {
            features,
            semantic,
            fluency,
        })
        .collect();
    train_on_features(approach, &examples, params, language, &provider.source_tag())
}

/// `<id>\t<score>` lines with four decimals.
pub fn format_scores<'a, I>(scores: I) -> String
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    let mut out = String::new();
    for (id, score) in scores {
        out.push_str(id);
        out.push('\t');
        out.push_str(&format!("{score:.4}"));
        out.push('\n');
    }
    out
}
