//! Codec table generated by `tools/phonetic_oracle.py` before the encoders
//! were written. Every row must match bit for bit.

use fusemt::phonetics::{double_metaphone, metaphone, soundex};

const TABLE: &str = include_str!("fixtures/phonetic_codes.tsv");

struct Row<'a> {
    token: &'a str,
    soundex: &'a str,
    metaphone: &'a str,
    dm_primary: &'a str,
    dm_alternate: &'a str,
}

fn rows() -> Vec<Row<'static>> {
    TABLE
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split('\t').collect();
            assert_eq!(f.len(), 5, "bad fixture line {line:?}");
            Row {
                token: f[0],
                soundex: f[1],
                metaphone: f[2],
                dm_primary: f[3],
                dm_alternate: f[4],
            }
        })
        .collect()
}

#[test]
fn table_is_large_enough() {
    assert!(rows().len() >= 20);
}

#[test]
fn soundex_matches_table() {
    let bad: Vec<_> = rows()
        .iter()
        .filter(|r| soundex(r.token) != r.soundex)
        .map(|r| format!("{}: {} != {}", r.token, soundex(r.token), r.soundex))
        .collect();
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn metaphone_matches_table() {
    let bad: Vec<_> = rows()
        .iter()
        .filter(|r| metaphone(r.token) != r.metaphone)
        .map(|r| format!("{}: {} != {}", r.token, metaphone(r.token), r.metaphone))
        .collect();
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn double_metaphone_matches_table() {
    let bad: Vec<_> = rows()
        .iter()
        .filter(|r| double_metaphone(r.token) != (r.dm_primary.to_owned(), r.dm_alternate.to_owned()))
        .map(|r| format!("{}: {:?} != ({}, {})", r.token, double_metaphone(r.token), r.dm_primary, r.dm_alternate))
        .collect();
    assert!(bad.is_empty(), "{bad:#?}");
}
