use std::collections::HashMap;
use std::hash::Hash;

use crate::textsim::{tokenize, NormalizedText};

pub const CHRF_CHAR_ORDER: usize = 6;
pub const CHRF_BETA: f64 = 2.0;

#[derive(Default)]
struct OrderStats {
    hyp: usize,
    reference: usize,
    matched: usize,
}

fn stats<T: Eq + Hash>(r: &[T], h: &[T], n: usize) -> OrderStats {
    let mut counts: HashMap<&[T], (usize, usize)> = HashMap::new();
    for g in r.windows(n) {
        counts.entry(g).or_default().0 += 1;
    }
    for g in h.windows(n) {
        counts.entry(g).or_default().1 += 1;
    }
    OrderStats {
        hyp: h.len().saturating_sub(n - 1),
        reference: r.len().saturating_sub(n - 1),
        matched: counts.values().map(|&(a, b)| a.min(b)).sum(),
    }
}

/// chrF with character orders `1..=char_order` (whitespace removed, so
/// n-grams run across word boundaries) plus word orders `1..=word_order`.
///
/// Precision and recall are averaged over the orders where both sides have
/// at least one n-gram, then combined as F-beta and scaled to `[0, 100]`.
pub fn chrf_with(r: &NormalizedText, h: &NormalizedText, char_order: usize, word_order: usize, beta: f64) -> f64 {
    if h.is_empty() {
        return 0.0;
    }
    let rc: Vec<char> = r.chars().filter(|c| !c.is_whitespace()).collect();
    let hc: Vec<char> = h.chars().filter(|c| !c.is_whitespace()).collect();
    let rw = tokenize(r);
    let hw = tokenize(h);
    let orders = (1..=char_order)
        .map(|n| stats(&rc, &hc, n))
        .chain((1..=word_order).map(|n| stats(&rw, &hw, n)));

    let (mut precision, mut recall, mut effective) = (0.0, 0.0, 0usize);
    for s in orders {
        if s.hyp > 0 && s.reference > 0 {
            precision += s.matched as f64 / s.hyp as f64;
            recall += s.matched as f64 / s.reference as f64;
            effective += 1;
        }
    }
    if effective == 0 {
        return 0.0;
    }
    precision /= effective as f64;
    recall /= effective as f64;
    if precision + recall == 0.0 {
        return 0.0;
    }
    let b2 = beta * beta;
    (100.0 * (1.0 + b2) * precision * recall / (b2 * precision + recall)).clamp(0.0, 100.0)
}

pub fn chrf(r: &NormalizedText, h: &NormalizedText) -> f64 {
    chrf_with(r, h, CHRF_CHAR_ORDER, 0, CHRF_BETA)
}

/// chrF++: chrF with word unigrams and bigrams averaged in.
pub fn chrf_pp(r: &NormalizedText, h: &NormalizedText) -> f64 {
    chrf_with(r, h, CHRF_CHAR_ORDER, 2, CHRF_BETA)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textsim::normalize;

    #[test]
    fn examples() {
        let t = normalize("allin p'unchay");
        assert_eq!(chrf(&t, &t), 100.0);
        assert_eq!(chrf_pp(&t, &t), 100.0);
        assert_eq!(chrf(&normalize("abc"), &normalize("xyz")), 0.0);
        assert_eq!(chrf(&normalize("abc"), &normalize("")), 0.0);
    }

    #[test]
    fn hand_computed() {
        // r = "ab", h = "abc": order 1 p=2/3 r=1, order 2 p=1/2 r=1, order 3 has no reference gram
        let got = chrf(&normalize("ab"), &normalize("abc"));
        let (p, r) = ((2.0 / 3.0 + 0.5) / 2.0, 1.0);
        assert!((got - 100.0 * 5.0 * p * r / (4.0 * p + r)).abs() < 1e-12);
        // whitespace does not count: "a b" and "ab" have identical character grams
        assert_eq!(chrf(&normalize("a b"), &normalize("ab")), 100.0);
        assert!(chrf_pp(&normalize("a b"), &normalize("ab")) < 100.0);
    }
}
