use super::fold_ascii;

fn class(letter: u8) -> Option<u8> {
    match letter {
        b'B' | b'F' | b'P' | b'V' => Some(b'1'),
        b'C' | b'G' | b'J' | b'K' | b'Q' | b'S' | b'X' | b'Z' => Some(b'2'),
        b'D' | b'T' => Some(b'3'),
        b'L' => Some(b'4'),
        b'M' | b'N' => Some(b'5'),
        b'R' => Some(b'6'),
        _ => None,
    }
}

/// American Soundex: first letter, then up to three class digits, padded
/// with zeros. `H` and `W` do not separate two consonants of the same
/// class; vowels do.
pub fn soundex(token: &str) -> String {
    let word = fold_ascii(token);
    let Some(&first) = word.first() else {
        return String::new();
    };
    let mut code = vec![first];
    let mut last = class(first);
    for &letter in &word[1..] {
        if letter == b'H' || letter == b'W' {
            continue;
        }
        match class(letter) {
            Some(digit) => {
                if Some(digit) != last {
                    code.push(digit);
                    if code.len() == 4 {
                        break;
                    }
                }
                last = Some(digit);
            }
            None => last = None,
        }
    }
    code.resize(4, b'0');
    String::from_utf8(code).expect("ascii")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_codes() {
        assert_eq!(soundex("robert"), "R163");
        assert_eq!(soundex("rupert"), "R163");
        assert_eq!(soundex("a"), "A000");
        assert_eq!(soundex("ashcraft"), "A261");
        assert_eq!(soundex("pfister"), "P236");
        assert_eq!(soundex("tymczak"), "T522");
    }

    #[test]
    fn degenerate_input() {
        assert_eq!(soundex(""), "");
        assert_eq!(soundex("123 -"), "");
        assert_eq!(soundex("ñ"), "N000");
    }
}
