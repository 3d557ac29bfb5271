use super::{EmbeddingVector, Result, SemanticsError};
use crate::textsim::{char_ngram_slices, NormalizedText};

/// Smallest dimension accepted for hashed embeddings.
pub const MIN_HASHED_DIM: usize = 16;

/// Mixed into the FNV-1a offset basis before hashing each n-gram.
pub const HASH_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn bucket(gram: &str, dim: usize) -> usize {
    let mut hash = FNV_OFFSET ^ HASH_SEED;
    for byte in gram.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    (hash % dim as u64) as usize
}

/// Character n-gram counts (repeats included, short texts contribute
/// themselves as one gram) hashed into `dim` buckets with seeded FNV-1a over
/// the gram's UTF-8 bytes, then L2-normalized.
pub fn hashed_ngram_embed(text: &NormalizedText, dim: usize, n: usize) -> Result<EmbeddingVector> {
    if dim < MIN_HASHED_DIM {
        return Err(SemanticsError::DimensionTooSmall(dim));
    }
    if text.is_empty() {
        return Err(SemanticsError::EmptyText);
    }
    let mut counts = vec![0.0f64; dim];
    for gram in char_ngram_slices(text, n.max(1)) {
        counts[bucket(gram, dim)] += 1.0;
    }
    let norm = counts.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in &mut counts {
        *c /= norm;
    }
    EmbeddingVector::new(counts)
}
