//! Phonetic encoders and the sentence-level phonetic similarity.
//!
//! All encoders work on `A-Z` only. Input is transliterated first: canonical
//! decomposition, combining marks dropped, uppercased, and anything outside
//! `A-Z` removed. So `ñande` encodes as `NANDE`.

mod double_metaphone;
mod metaphone;
mod soundex;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::canonical_combining_class;
use unicode_normalization::UnicodeNormalization;

use crate::textsim::{sequence_ratio, tokenize, NormalizedText};

pub use double_metaphone::{double_metaphone, MAX_CODE_LEN as DOUBLE_METAPHONE_MAX_LEN};
pub use metaphone::metaphone;
pub use soundex::soundex;

/// Separator between per-token codes inside a [`PhoneticKey`].
pub const KEY_SEPARATOR: char = ' ';

pub(crate) fn fold_ascii(token: &str) -> Vec<u8> {
    token
        .nfd()
        .filter(|&c| canonical_combining_class(c) == 0)
        .flat_map(char::to_uppercase)
        .filter(char::is_ascii_uppercase)
        .map(|c| c as u8)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhoneticScheme {
    Metaphone,
    DoubleMetaphonePrimary,
    SoundexPlusDoubleMetaphone,
    SoundexPlusMetaphone,
}

impl PhoneticScheme {
    pub const ALL: [PhoneticScheme; 4] = [
        PhoneticScheme::Metaphone,
        PhoneticScheme::DoubleMetaphonePrimary,
        PhoneticScheme::SoundexPlusDoubleMetaphone,
        PhoneticScheme::SoundexPlusMetaphone,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PhoneticScheme::Metaphone => "metaphone",
            PhoneticScheme::DoubleMetaphonePrimary => "double-metaphone",
            PhoneticScheme::SoundexPlusDoubleMetaphone => "soundex+double-metaphone",
            PhoneticScheme::SoundexPlusMetaphone => "soundex+metaphone",
        }
    }

    /// Code for one token under this scheme.
    pub fn encode_token(self, token: &str) -> String {
        match self {
            PhoneticScheme::Metaphone => metaphone(token),
            PhoneticScheme::DoubleMetaphonePrimary => double_metaphone(token).0,
            PhoneticScheme::SoundexPlusDoubleMetaphone => {
                let mut code = soundex(token);
                code.push_str(&double_metaphone(token).0);
                code
            }
            PhoneticScheme::SoundexPlusMetaphone => {
                let mut code = soundex(token);
                code.push_str(&metaphone(token));
                code
            }
        }
    }
}

impl fmt::Display for PhoneticScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PhoneticScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PhoneticScheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| format!("unknown phonetic scheme `{s}`"))
    }
}

/// Per-token phonetic codes joined by [`KEY_SEPARATOR`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PhoneticKey(String);

impl PhoneticKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PhoneticKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Tokens without any encodable letter produce no code and are skipped.
pub fn phonetic_key(text: &NormalizedText, scheme: PhoneticScheme) -> PhoneticKey {
    let mut key = String::new();
    for token in tokenize(text) {
        let code = scheme.encode_token(token);
        if code.is_empty() {
            continue;
        }
        if !key.is_empty() {
            key.push(KEY_SEPARATOR);
        }
        key.push_str(&code);
    }
    PhoneticKey(key)
}

pub fn phonetic_similarity(r: &NormalizedText, h: &NormalizedText, scheme: PhoneticScheme) -> f64 {
    if r == h {
        return 1.0;
    }
    sequence_ratio(phonetic_key(r, scheme).as_str(), phonetic_key(h, scheme).as_str())
}
