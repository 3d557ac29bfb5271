use std::collections::HashMap;

use crate::textsim::{tokenize, NormalizedText};

pub const BLEU_MAX_ORDER: usize = 4;

fn ngram_counts<'a>(tokens: &'a [&'a str], n: usize) -> HashMap<&'a [&'a str], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Sentence BLEU over whitespace tokens, orders 1 to 4, scaled to `[0, 100]`.
///
/// Precisions of order 2 and up use add-one smoothing `(m + 1) / (c + 1)`;
/// unigram precision is unsmoothed, so no shared token means `0`. The
/// brevity penalty is `exp(1 - |r| / |h|)` when the hypothesis is shorter.
pub fn bleu(r: &NormalizedText, h: &NormalizedText) -> f64 {
    let rt = tokenize(r);
    let ht = tokenize(h);
    if ht.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=BLEU_MAX_ORDER {
        let ref_counts = ngram_counts(&rt, n);
        let hyp_counts = ngram_counts(&ht, n);
        let total = ht.len().saturating_sub(n - 1);
        let matched: usize = hyp_counts
            .iter()
            .map(|(gram, &c)| c.min(ref_counts.get(gram).copied().unwrap_or(0)))
            .sum();
        let precision = if n == 1 {
            if matched == 0 {
                return 0.0;
            }
            matched as f64 / total as f64
        } else {
            (matched as f64 + 1.0) / (total as f64 + 1.0)
        };
        log_sum += precision.ln();
    }
    let (rl, hl) = (rt.len() as f64, ht.len() as f64);
    let bp = if hl < rl { (1.0 - rl / hl).exp() } else { 1.0 };
    (100.0 * bp * (log_sum / BLEU_MAX_ORDER as f64).exp()).clamp(0.0, 100.0)
}
