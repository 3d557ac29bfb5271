//! Seeded synthetic annotated data for smoke tests and demos.
//!
//! References are random sentences over a small syllable inventory with
//! diacritics. Each hypothesis is a copy degraded at a random intensity:
//! word replacement, character edits, drops, insertions and swaps. Human
//! scores are a known function of the pair's features plus Gaussian noise,
//! so a correct trainer can recover them.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{AnnotatedDataset, AnnotatedRow, Result};
use crate::metrics::Approach;
use crate::mlcore::{extract_features, FeatureVector};
use crate::semantics::EmbeddingProvider;
use crate::textsim::{normalize, NormalizedText};

const ONSETS: [&str; 16] = ["p", "t", "k", "m", "n", "ñ", "r", "s", "h", "j", "g", "v", "ch", "mb", "nd", "y"];
const VOWELS: [&str; 10] = ["a", "e", "i", "o", "u", "y", "á", "é", "ã", "ẽ"];

/// Shape of the fluency target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluencyShape {
    /// Same linear function as the semantic target.
    Linear,
    /// `100 * 4 * L * (1 - L)`: peaks at mid lexical similarity, so no
    /// linear model of the features can follow it.
    Parabolic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub rows: usize,
    pub seed: u64,
    pub noise_sd: f64,
    pub fluency: FluencyShape,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            rows: 300,
            seed: 7,
            noise_sd: 2.0,
            fluency: FluencyShape::Linear,
        }
    }
}

/// `100 * (0.45 L + 0.15 P + 0.30 S + 0.10 F)`.
pub fn linear_target(x: &FeatureVector) -> f64 {
    100.0 * (0.45 * x.lexical + 0.15 * x.phonetic + 0.30 * x.semantic + 0.10 * x.fuzzy)
}

fn word(rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.random_range(1..=4);
    let mut w = String::new();
    for _ in 0..syllables {
        if rng.random_bool(0.8) {
            w.push_str(ONSETS.choose(rng).expect("non-empty"));
        }
        w.push_str(VOWELS.choose(rng).expect("non-empty"));
    }
    w
}

fn mutate(w: &str, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = w.chars().collect();
    let i = rng.random_range(0..chars.len());
    let fresh = VOWELS.choose(rng).expect("non-empty").chars().next().expect("non-empty");
    match rng.random_range(0..3) {
        0 => chars[i] = fresh,
        1 if chars.len() > 1 => {
            chars.remove(i);
        }
        _ => chars.insert(i, fresh),
    }
    chars.into_iter().collect()
}

fn degrade(reference: &[String], t: f64, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut out = Vec::with_capacity(reference.len() + 2);
    for w in reference {
        let roll: f64 = rng.random();
        if roll < 0.15 * t {
            continue;
        } else if roll < 0.55 * t {
            out.push(word(rng));
        } else if roll < 0.85 * t {
            out.push(mutate(w, rng));
        } else {
            out.push(w.clone());
        }
        if rng.random_bool(0.1 * t) {
            out.push(word(rng));
        }
    }
    for i in 1..out.len() {
        if rng.random_bool(0.2 * t) {
            out.swap(i - 1, i);
        }
    }
    if out.is_empty() {
        out.push(word(rng));
    }
    out
}

/// `n` seeded (reference, hypothesis) pairs spanning the similarity range.
pub fn synthetic_pairs(n: usize, seed: u64) -> Vec<(NormalizedText, NormalizedText)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.random_range(4..=10);
            let reference: Vec<String> = (0..len).map(|_| word(&mut rng)).collect();
            let t: f64 = rng.random();
            let hypothesis = degrade(&reference, t, &mut rng);
            (normalize(&reference.join(" ")), normalize(&hypothesis.join(" ")))
        })
        .collect()
}

/// A dataset whose semantic scores follow [`linear_target`] and whose
/// fluency follows `spec.fluency`, both with `N(0, noise_sd)` noise.
/// Features use the phonetic scheme of the trained approaches.
pub fn synthetic_dataset(spec: &SyntheticSpec, provider: &EmbeddingProvider, language: &str) -> Result<AnnotatedDataset> {
    let pairs = synthetic_pairs(spec.rows, spec.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5eed_5eed);
    let noise = Normal::new(0.0, spec.noise_sd.max(0.0)).expect("valid standard deviation");
    let scheme = Approach::LinearPair.scheme();
    let mut rows = Vec::with_capacity(pairs.len());
    for (i, (reference, hypothesis)) in pairs.into_iter().enumerate() {
        let x = extract_features(&reference, &hypothesis, provider, scheme)?;
        let fluency = match spec.fluency {
            FluencyShape::Linear => linear_target(&x),
            FluencyShape::Parabolic => 400.0 * x.lexical * (1.0 - x.lexical),
        };
        rows.push(AnnotatedRow {
            id: format!("syn-{:04}", i + 1),
            source: format!("oración {}", i + 1),
            reference,
            hypothesis,
            semantic: Some(linear_target(&x) + noise.sample(&mut rng)),
            fluency: Some(fluency + noise.sample(&mut rng)),
            overall: None,
        });
    }
    Ok(AnnotatedDataset {
        language: language.to_owned(),
        rows,
        warnings: Vec::new(),
    })
}

/// Splits off the first `dev_rows` rows as a dev set; the rest is the test set.
pub fn split_dataset(data: AnnotatedDataset, dev_rows: usize) -> (AnnotatedDataset, AnnotatedDataset) {
    let mut dev = data;
    let rest = dev.rows.split_off(dev_rows.min(dev.rows.len()));
    let test = AnnotatedDataset {
        language: dev.language.clone(),
        rows: rest,
        warnings: Vec::new(),
    };
    (dev, test)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_varied() {
        let a = synthetic_pairs(50, 3);
        assert_eq!(a, synthetic_pairs(50, 3));
        assert_ne!(a, synthetic_pairs(50, 4));
        assert!(a.iter().all(|(r, h)| !r.is_empty() && !h.is_empty()));
        let provider = EmbeddingProvider::hashed(256, 3).unwrap();
        let d = synthetic_dataset(&SyntheticSpec { rows: 50, ..Default::default() }, &provider, "syn").unwrap();
        let sem: Vec<f64> = d.rows.iter().map(|r| r.semantic.unwrap()).collect();
        let spread = sem.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - sem.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread > 30.0, "targets should span a wide range, got {spread}");
        let (dev, test) = split_dataset(d, 20);
        assert_eq!((dev.len(), test.len()), (20, 30));
    }
}
