use serde::{Deserialize, Serialize};

use crate::phonetics::{phonetic_similarity, PhoneticScheme};
use crate::semantics::{semantic_similarity, EmbeddingProvider, SemanticsError};
use crate::textsim::{lexical_similarity, token_sort_ratio, NormalizedText};

pub const N_FEATURES: usize = 4;
pub const FEATURE_NAMES: [&str; N_FEATURES] = ["lexical", "phonetic", "semantic", "fuzzy"];

/// Similarity features of one reference/hypothesis pair, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub lexical: f64,
    pub phonetic: f64,
    pub semantic: f64,
    pub fuzzy: f64,
}

impl FeatureVector {
    pub fn to_array(self) -> [f64; N_FEATURES] {
        [self.lexical, self.phonetic, self.semantic, self.fuzzy]
    }

    pub fn from_array(values: [f64; N_FEATURES]) -> Self {
        let [lexical, phonetic, semantic, fuzzy] = values;
        Self {
            lexical,
            phonetic,
            semantic,
            fuzzy,
        }
    }
}

pub fn extract_features(
    r: &NormalizedText,
    h: &NormalizedText,
    provider: &EmbeddingProvider,
    scheme: PhoneticScheme,
) -> Result<FeatureVector, SemanticsError> {
    Ok(FeatureVector {
        lexical: lexical_similarity(r, h),
        phonetic: phonetic_similarity(r, h, scheme),
        semantic: semantic_similarity(r, h, provider)?,
        fuzzy: token_sort_ratio(r, h),
    })
}
