//! Semantic similarity over sentence embeddings.
//!
//! Vectors come from an [`EmbeddingProvider`]: a precomputed store file, a
//! remote encoder service, or a deterministic hashed character n-gram
//! embedding that needs neither model weights nor network.

mod hashed;
mod remote;
mod store;

use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

use crate::textsim::NormalizedText;

pub use hashed::{hashed_ngram_embed, HASH_SEED, MIN_HASHED_DIM};
pub use remote::{RemoteConfig, RemoteEncoder};
pub use store::{load_store, EmbeddingStore};

#[derive(Debug, Error)]
pub enum SemanticsError {
    #[error("embedding dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("zero embedding vector (corrupt store?)")]
    ZeroVector,
    #[error("embedding has a non-finite component")]
    NonFinite,
    #[error("empty embedding vector")]
    Empty,
    #[error("no embedding for text {text:?}")]
    Miss { text: String },
    #[error("cannot embed empty text")]
    EmptyText,
    #[error("hashed embedding dimension must be at least {MIN_HASHED_DIM}, got {0}")]
    DimensionTooSmall(usize),
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("remote encoder returned HTTP {status}{}", if *.retriable { " (retriable)" } else { "" })]
    RemoteStatus { status: u16, retriable: bool },
    #[error("remote encoder request failed: {0}")]
    Transport(String),
    #[error("remote encoder response: {0}")]
    BadResponse(String),
}

pub type Result<T, E = SemanticsError> = std::result::Result<T, E>;

/// A finite, non-empty embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(SemanticsError::Empty);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SemanticsError::NonFinite);
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

pub fn cosine(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(SemanticsError::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Err(SemanticsError::ZeroVector);
    }
    let dot: f64 = u.0.iter().zip(&v.0).map(|(a, b)| a * b).sum();
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

#[derive(Debug)]
pub enum EmbeddingProvider {
    Store(EmbeddingStore),
    Remote(RemoteEncoder),
    HashedNgram { dim: usize, n: usize },
}

impl EmbeddingProvider {
    pub fn hashed(dim: usize, n: usize) -> Result<Self> {
        if dim < MIN_HASHED_DIM {
            return Err(SemanticsError::DimensionTooSmall(dim));
        }
        Ok(EmbeddingProvider::HashedNgram { dim, n })
    }

    pub fn embed(&self, text: &NormalizedText) -> Result<Arc<EmbeddingVector>> {
        match self {
            EmbeddingProvider::Store(store) => store
                .get(text)
                .cloned()
                .ok_or_else(|| SemanticsError::Miss {
                    text: text.to_string(),
                }),
            EmbeddingProvider::Remote(encoder) => encoder.embed(text),
            EmbeddingProvider::HashedNgram { dim, n } => {
                hashed_ngram_embed(text, *dim, *n).map(Arc::new)
            }
        }
    }

    /// Resolve many texts up front. Only the remote backend does any work
    /// here: it batches every uncached text into as few requests as its
    /// batch size allows.
    pub fn prefetch<'a, I>(&self, texts: I) -> Result<()>
    where
        I: IntoIterator<Item = &'a NormalizedText>,
    {
        if let EmbeddingProvider::Remote(encoder) = self {
            let wanted: Vec<&NormalizedText> = texts.into_iter().filter(|t| !t.is_empty()).collect();
            encoder.fetch(&wanted)?;
        }
        Ok(())
    }

    /// Encoder identity carried into trained models and reports.
    pub fn source_tag(&self) -> String {
        match self {
            EmbeddingProvider::Store(store) => store.source_tag().to_owned(),
            EmbeddingProvider::Remote(encoder) => format!("remote:{}", encoder.endpoint()),
            EmbeddingProvider::HashedNgram { dim, n } => format!("hashed-ngram:dim={dim}:n={n}"),
        }
    }
}

/// `max(0, cosine)` of the two texts' embeddings.
///
/// Identical texts score exactly `1.0` once their embedding resolves. An
/// empty text is never looked up: two empty texts score `1.0`, an empty text
/// against a non-empty one scores `0.0`.
pub fn semantic_similarity(
    r: &NormalizedText,
    h: &NormalizedText,
    provider: &EmbeddingProvider,
) -> Result<f64> {
    match (r.is_empty(), h.is_empty()) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        (false, false) => {}
    }
    let u = provider.embed(r)?;
    if r == h {
        if u.norm() == 0.0 {
            return Err(SemanticsError::ZeroVector);
        }
        return Ok(1.0);
    }
    let v = provider.embed(h)?;
    Ok(cosine(&u, &v)?.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textsim::normalize;
    use proptest::prelude::*;

    fn vector(values: &[f64]) -> EmbeddingVector {
        EmbeddingVector::new(values.to_vec()).unwrap()
    }

    #[test]
    fn cosine_examples() {
        let e = vector(&[0.6, 0.8]);
        assert!((cosine(&e, &e).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&vector(&[1.0, 0.0]), &vector(&[0.0, 1.0])).unwrap(), 0.0);
        let diag = cosine(&vector(&[1.0, 0.0]), &vector(&[1.0, 1.0])).unwrap();
        assert!((diag - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn cosine_errors() {
        assert!(matches!(
            cosine(&vector(&[1.0]), &vector(&[1.0, 0.0])),
            Err(SemanticsError::DimensionMismatch { left: 1, right: 2 })
        ));
        assert!(matches!(
            cosine(&vector(&[0.0, 0.0]), &vector(&[1.0, 0.0])),
            Err(SemanticsError::ZeroVector)
        ));
        assert!(EmbeddingVector::new(vec![f64::NAN]).is_err());
        assert!(EmbeddingVector::new(vec![]).is_err());
    }

    #[test]
    fn store_miss_names_the_text() {
        let provider = EmbeddingProvider::Store(EmbeddingStore::new("test"));
        let err = semantic_similarity(&normalize("ñande"), &normalize("ore"), &provider).unwrap_err();
        assert!(matches!(&err, SemanticsError::Miss { text } if text == "ñande"));
        // identical texts still need a resolvable embedding
        assert!(semantic_similarity(&normalize("ñande"), &normalize("ñande"), &provider).is_err());
    }

    #[test]
    fn orthogonal_and_negative_vectors() {
        let mut store = EmbeddingStore::new("test");
        store.insert(normalize("x"), vector(&[1.0, 0.0])).unwrap();
        store.insert(normalize("y"), vector(&[0.0, 1.0])).unwrap();
        store.insert(normalize("z"), vector(&[-1.0, 0.2])).unwrap();
        let provider = EmbeddingProvider::Store(store);
        let sim = |a: &str, b: &str| semantic_similarity(&normalize(a), &normalize(b), &provider).unwrap();
        assert_eq!(sim("x", "y"), 0.0);
        assert_eq!(sim("x", "z"), 0.0);
        assert_eq!(sim("x", "x"), 1.0);
    }

    #[test]
    fn empty_texts_skip_lookup() {
        let provider = EmbeddingProvider::Store(EmbeddingStore::new("test"));
        assert_eq!(semantic_similarity(&normalize(""), &normalize(""), &provider).unwrap(), 1.0);
        assert_eq!(semantic_similarity(&normalize("abc"), &normalize(""), &provider).unwrap(), 0.0);
    }

    #[test]
    fn hashed_provider_rejects_small_dims() {
        assert!(EmbeddingProvider::hashed(8, 3).is_err());
        assert!(EmbeddingProvider::hashed(16, 3).is_ok());
    }

    proptest! {
        #[test]
        fn hashed_similarity_properties(a in "[a-dñ ]{0,20}", b in "[a-dñ ]{0,20}") {
            let provider = EmbeddingProvider::hashed(64, 3).unwrap();
            let (a, b) = (normalize(&a), normalize(&b));
            let ab = semantic_similarity(&a, &b, &provider).unwrap();
            let ba = semantic_similarity(&b, &a, &provider).unwrap();
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(ab, ba);
            prop_assert_eq!(semantic_similarity(&a, &a, &provider).unwrap(), 1.0);
        }
    }
}
