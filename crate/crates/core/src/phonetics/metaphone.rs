use super::fold_ascii;

fn is_vowel(c: u8) -> bool {
    matches!(c, b'A' | b'E' | b'I' | b'O' | b'U')
}

/// Metaphone (1990 rule set), unlimited code length.
///
/// Rules as applied here:
/// - adjacent duplicate letters collapse, except `C`
/// - initial `KN GN PN AE WR` drop their first letter, initial `X` is `S`,
///   initial `WH` is `W`
/// - vowels are kept only in first position
/// - `H` is silent after `C S P T G`, and after a vowel unless a vowel follows
/// - `CK` is `K`, `DG` before `E I Y` is `J`, `GH` before a consonant is
///   silent, `G` is silent in a final `GN` or `GNED`
pub fn metaphone(token: &str) -> String {
    let folded = fold_ascii(token);
    if folded.is_empty() {
        return String::new();
    }
    let mut word: Vec<u8> = Vec::with_capacity(folded.len());
    for &c in &folded {
        if word.last() == Some(&c) && c != b'C' {
            continue;
        }
        word.push(c);
    }
    match (word[0], word.get(1).copied()) {
        (b'K', Some(b'N')) | (b'G', Some(b'N')) | (b'P', Some(b'N')) | (b'A', Some(b'E'))
        | (b'W', Some(b'R')) => {
            word.remove(0);
        }
        (b'X', _) => word[0] = b'S',
        (b'W', Some(b'H')) => {
            word.remove(1);
        }
        _ => {}
    }

    let n = word.len();
    let at = |i: usize| -> u8 { word.get(i).copied().unwrap_or(0) };
    let mut code = String::with_capacity(n);
    let mut i = 0;
    while i < n {
        let c = word[i];
        let prev = if i > 0 { word[i - 1] } else { 0 };
        let next = at(i + 1);
        let after = at(i + 2);
        match c {
            b'A' | b'E' | b'I' | b'O' | b'U' => {
                if i == 0 {
                    code.push(c as char);
                }
            }
            b'B' => {
                if !(prev == b'M' && i + 1 == n) {
                    code.push('B');
                }
            }
            b'C' => {
                if next == b'I' && after == b'A' {
                    code.push('X');
                } else if next == b'H' {
                    code.push(if prev == b'S' { 'K' } else { 'X' });
                } else if matches!(next, b'I' | b'E' | b'Y') {
                    code.push('S');
                } else {
                    code.push('K');
                }
            }
            b'D' => {
                if next == b'G' && matches!(after, b'E' | b'Y' | b'I') {
                    code.push('J');
                    i += 1;
                } else {
                    code.push('T');
                }
            }
            b'G' => {
                let silent_gh = next == b'H' && i + 2 < n && !is_vowel(after);
                let final_gn = next == b'N' && i + 2 == n;
                let final_gned = &word[i + 1..] == b"NED";
                if silent_gh || final_gn || final_gned {
                    // silent
                } else if matches!(next, b'I' | b'E' | b'Y') {
                    code.push('J');
                } else {
                    code.push('K');
                }
            }
            b'H' => {
                let digraph = matches!(prev, b'C' | b'S' | b'P' | b'T' | b'G');
                if !digraph && !(is_vowel(prev) && !is_vowel(next)) {
                    code.push('H');
                }
            }
            b'K' => {
                if prev != b'C' {
                    code.push('K');
                }
            }
            b'P' => code.push(if next == b'H' { 'F' } else { 'P' }),
            b'Q' => code.push('K'),
            b'S' => {
                if next == b'H' || (next == b'I' && matches!(after, b'O' | b'A')) {
                    code.push('X');
                } else {
                    code.push('S');
                }
            }
            b'T' => {
                if next == b'I' && matches!(after, b'A' | b'O') {
                    code.push('X');
                } else if next == b'H' {
                    code.push('0');
                } else if !(next == b'C' && after == b'H') {
                    code.push('T');
                }
            }
            b'V' => code.push('F'),
            b'W' | b'Y' => {
                if is_vowel(next) {
                    code.push(c as char);
                }
            }
            b'X' => code.push_str("KS"),
            b'Z' => code.push('S'),
            other => code.push(other as char),
        }
        i += 1;
    }
    code
}
