//! Text normalization and the non-phonetic string similarities.
//!
//! Every similarity here is measured in unicode scalar values, never bytes,
//! and every similarity maps two empty inputs to `1.0` and an empty input
//! against a non-empty one to `0.0`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

/// Text in canonical form: NFC, lowercased, whitespace runs collapsed to a
/// single space and trimmed at both ends.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NormalizedText(String);

impl NormalizedText {
    pub fn new(raw: &str) -> Self {
        normalize(raw)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    /// Length in unicode scalar values.
    pub fn char_len(&self) -> usize {
        self.0.chars().count()
    }
}

impl Deref for NormalizedText {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for NormalizedText {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NormalizedText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NormalizedText {
    fn from(raw: &str) -> Self {
        normalize(raw)
    }
}

pub fn normalize(raw: &str) -> NormalizedText {
    // Lowercasing can emit decomposed sequences, so recompose afterwards.
    let lowered: String = raw.nfc().collect::<String>().to_lowercase();
    let composed: String = lowered.nfc().collect();
    let mut out = String::with_capacity(composed.len());
    for word in composed.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    NormalizedText(out)
}

pub fn tokenize(text: &NormalizedText) -> Vec<&str> {
    if text.is_empty() {
        Vec::new()
    } else {
        text.split(' ').collect()
    }
}

/// All contiguous length-`n` substrings of `text`, repeats included, in
/// order of appearance. A non-empty text shorter than `n` yields itself once.
pub fn char_ngram_slices(text: &str, n: usize) -> Vec<&str> {
    assert!(n >= 1, "n-gram order must be positive");
    if text.is_empty() {
        return Vec::new();
    }
    let bounds: Vec<usize> = text
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(text.len()))
        .collect();
    let chars = bounds.len() - 1;
    if chars < n {
        return vec![text];
    }
    (0..=chars - n).map(|i| &text[bounds[i]..bounds[i + n]]).collect()
}

pub fn char_ngrams(text: &NormalizedText, n: usize) -> BTreeSet<String> {
    char_ngram_slices(text, n)
        .into_iter()
        .map(str::to_owned)
        .collect()
}

pub fn jaccard_trigram(r: &NormalizedText, h: &NormalizedText) -> f64 {
    let gr: HashSet<&str> = char_ngram_slices(r, 3).into_iter().collect();
    let gh: HashSet<&str> = char_ngram_slices(h, 3).into_iter().collect();
    if gr.is_empty() && gh.is_empty() {
        return 1.0;
    }
    let inter = gr.intersection(&gh).count();
    let union = gr.len() + gh.len() - inter;
    inter as f64 / union as f64
}

/// Optimal-string-alignment distance: insertions, deletions, substitutions
/// and adjacent transpositions, with no substring edited more than once.
pub fn damerau_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    osa_distance(&a, &b)
}

fn osa_distance(a: &[char], b: &[char]) -> usize {
    let (n, m) = (a.len(), b.len());
    if n == 0 {
        return m;
    }
    if m == 0 {
        return n;
    }
    // three rolling rows: i-2, i-1, i
    let mut two_back = vec![0usize; m + 1];
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur = vec![0usize; m + 1];
    for i in 1..=n {
        cur[0] = i;
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut best = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                best = best.min(two_back[j - 2] + 1);
            }
            cur[j] = best;
        }
        std::mem::swap(&mut two_back, &mut prev);
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// `1 - d(r, h) / max(|r|, |h|)` with the optimal-string-alignment distance.
pub fn lexical_similarity(r: &NormalizedText, h: &NormalizedText) -> f64 {
    let a: Vec<char> = r.chars().collect();
    let b: Vec<char> = h.chars().collect();
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - osa_distance(&a, &b) as f64 / longest as f64
}

/// Ratcliff/Obershelp similarity `2M / (|a| + |b|)`.
///
/// `M` counts characters in the matching blocks found by taking the longest
/// common substring and recursing on both sides of it. Ties between equally
/// long substrings go to the one ending first in `a`, then first in `b`.
/// No characters are treated as junk.
///
/// The matching is run with the lexicographically smaller string as `a`, so
/// the ratio is symmetric in its arguments.
pub fn sequence_ratio(a: &str, b: &str) -> f64 {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    2.0 * matched_chars(&a, &b) as f64 / total as f64
}

fn matched_chars(a: &[char], b: &[char]) -> usize {
    let mut matched = 0;
    let mut pending = vec![(0, a.len(), 0, b.len())];
    while let Some((alo, ahi, blo, bhi)) = pending.pop() {
        let (i, j, k) = longest_match(a, alo, ahi, b, blo, bhi);
        if k == 0 {
            continue;
        }
        matched += k;
        if alo < i && blo < j {
            pending.push((alo, i, blo, j));
        }
        if i + k < ahi && j + k < bhi {
            pending.push((i + k, ahi, j + k, bhi));
        }
    }
    matched
}

fn longest_match(
    a: &[char],
    alo: usize,
    ahi: usize,
    b: &[char],
    blo: usize,
    bhi: usize,
) -> (usize, usize, usize) {
    let width = bhi - blo;
    let (mut best_i, mut best_j, mut best_k) = (alo, blo, 0);
    // run[j] = length of the common suffix ending at a[i-1], b[blo + j - 1]
    let mut prev = vec![0usize; width + 1];
    let mut cur = vec![0usize; width + 1];
    for (i, ca) in a.iter().enumerate().take(ahi).skip(alo) {
        for j in 0..width {
            cur[j + 1] = if *ca == b[blo + j] { prev[j] + 1 } else { 0 };
            let k = cur[j + 1];
            if k > best_k {
                best_i = i + 1 - k;
                best_j = blo + j + 1 - k;
                best_k = k;
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    (best_i, best_j, best_k)
}

/// Sequence ratio after sorting each side's tokens and rejoining them.
pub fn token_sort_ratio(r: &NormalizedText, h: &NormalizedText) -> f64 {
    sequence_ratio(&sorted_tokens(r), &sorted_tokens(h))
}

fn sorted_tokens(text: &NormalizedText) -> String {
    let mut tokens = tokenize(text);
    tokens.sort_unstable();
    tokens.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nt(s: &str) -> NormalizedText {
        normalize(s)
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(nt("Hola  Mundo ").as_str(), "hola mundo");
        assert_eq!(nt("").as_str(), "");
        assert_eq!(nt("ÑANDE").as_str(), "ñande");
        // decomposed input composes
        assert_eq!(nt("N\u{303}ANDE").as_str(), "ñande");
        assert_eq!(nt("\t a \n\n b\u{00a0}c ").as_str(), "a b c");
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize(&nt("hola mundo")), vec!["hola", "mundo"]);
        assert!(tokenize(&nt("")).is_empty());
        assert_eq!(tokenize(&nt("a b a")), vec!["a", "b", "a"]);
    }

    #[test]
    fn ngram_examples() {
        let grams = char_ngrams(&nt("abcd"), 3);
        assert_eq!(grams.into_iter().collect::<Vec<_>>(), vec!["abc", "bcd"]);
        let short = char_ngrams(&nt("ab"), 3);
        assert_eq!(short.len(), 1);
        assert!(short.contains("ab"));
        assert!(char_ngrams(&nt(""), 3).is_empty());
        // scalar values, not bytes
        assert_eq!(char_ngram_slices("ñañ", 2), vec!["ña", "añ"]);
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard_trigram(&nt("abcd"), &nt("abcd")), 1.0);
        assert_eq!(jaccard_trigram(&nt("abc"), &nt("xyz")), 0.0);
        assert!((jaccard_trigram(&nt("abcd"), &nt("abce")) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(jaccard_trigram(&nt(""), &nt("")), 1.0);
        assert_eq!(jaccard_trigram(&nt("abc"), &nt("")), 0.0);
    }

    #[test]
    fn edit_distance_examples() {
        assert_eq!(damerau_levenshtein("kitten", "sitting"), 3);
        assert_eq!(damerau_levenshtein("ab", "ba"), 1);
        assert_eq!(damerau_levenshtein("x", "x"), 0);
        // OSA, not unrestricted: "ca" -> "abc" needs 3 here
        assert_eq!(damerau_levenshtein("ca", "abc"), 3);
        assert_eq!(damerau_levenshtein("", "abc"), 3);
        assert_eq!(damerau_levenshtein("ñandé", "ñande"), 1);
    }

    #[test]
    fn lexical_examples() {
        assert_eq!(lexical_similarity(&nt("abc"), &nt("abc")), 1.0);
        assert_eq!(lexical_similarity(&nt("abc"), &nt("")), 0.0);
        assert_eq!(lexical_similarity(&nt(""), &nt("")), 1.0);
        let v = lexical_similarity(&nt("kitten"), &nt("sitting"));
        assert!((v - (1.0 - 3.0 / 7.0)).abs() < 1e-15);
    }

    #[test]
    fn sequence_ratio_examples() {
        assert_eq!(sequence_ratio("abc", "abc"), 1.0);
        assert_eq!(sequence_ratio("abc", ""), 0.0);
        assert_eq!(sequence_ratio("", ""), 1.0);
        assert_eq!(sequence_ratio("abcd", "bcde"), 0.75);
        // Frozen from difflib.SequenceMatcher(None, min(a, b), max(a, b), autojunk=False).ratio()
        let frozen = [
            ("hola mundo", "bola mundo", 0.9),
            ("ñande ru", "ñane ru", 0.9333333333333333),
            ("the quick brown fox", "quick the fox brown", 0.5789473684210527),
            ("abxcd", "abcd", 0.8888888888888888),
            ("aaab", "abaa", 0.5),
            ("añé ñ", "éñ", 0.2857142857142857),
            ("éñ", "añé ñ", 0.2857142857142857),
        ];
        for (a, b, want) in frozen {
            let got = sequence_ratio(a, b);
            assert!((got - want).abs() < 1e-15, "{a:?} {b:?}: {got} != {want}");
        }
    }

    #[test]
    fn token_sort_examples() {
        assert_eq!(token_sort_ratio(&nt("world hello"), &nt("hello world")), 1.0);
        assert_eq!(token_sort_ratio(&nt("a b"), &nt("a b")), 1.0);
        assert_eq!(
            token_sort_ratio(&nt("hola mundo"), &nt("mundo bola")),
            sequence_ratio("hola mundo", "bola mundo")
        );
        assert_eq!(token_sort_ratio(&nt(""), &nt("")), 1.0);
    }

    fn small_text() -> impl Strategy<Value = String> {
        "[a-cñé ]{0,12}"
    }

    proptest! {
        #[test]
        fn normalize_idempotent(raw in "\\PC{0,24}") {
            let once = normalize(&raw);
            prop_assert_eq!(normalize(once.as_str()), once.clone());
            prop_assert!(!once.starts_with(' ') && !once.ends_with(' '));
            prop_assert!(!once.contains("  "));
        }

        #[test]
        fn similarities_bounded_and_symmetric(a in small_text(), b in small_text()) {
            let (a, b) = (nt(&a), nt(&b));
            for v in [
                jaccard_trigram(&a, &b),
                lexical_similarity(&a, &b),
                sequence_ratio(&a, &b),
                token_sort_ratio(&a, &b),
            ] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert_eq!(jaccard_trigram(&a, &b), jaccard_trigram(&b, &a));
            prop_assert_eq!(token_sort_ratio(&a, &b), token_sort_ratio(&b, &a));
            prop_assert_eq!(damerau_levenshtein(&a, &b), damerau_levenshtein(&b, &a));
            prop_assert_eq!(sequence_ratio(&a, &b) == 1.0, a == b);
        }

        #[test]
        fn identical_inputs_score_one(a in small_text()) {
            let a = nt(&a);
            prop_assert_eq!(jaccard_trigram(&a, &a), 1.0);
            prop_assert_eq!(lexical_similarity(&a, &a), 1.0);
            prop_assert_eq!(token_sort_ratio(&a, &a), 1.0);
            prop_assert_eq!(damerau_levenshtein(&a, &a), 0);
        }

        #[test]
        fn token_sort_ignores_word_order(
            words in proptest::collection::vec("[a-d]{1,4}", 0..6),
            other in "[a-d ]{0,10}",
            seed in any::<u64>(),
        ) {
            let mut shuffled = words.clone();
            // cheap deterministic permutation
            let len = shuffled.len();
            for i in (1..len).rev() {
                let j = (seed.wrapping_mul(i as u64 + 7) % (i as u64 + 1)) as usize;
                shuffled.swap(i, j);
            }
            let original = nt(&words.join(" "));
            let permuted = nt(&shuffled.join(" "));
            let other = nt(&other);
            prop_assert_eq!(token_sort_ratio(&original, &other), token_sort_ratio(&permuted, &other));
        }
    }
}
