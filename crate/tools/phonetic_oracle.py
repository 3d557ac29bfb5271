#!/usr/bin/env python3
"""Reference phonetic encoders used to generate the codec fixture table.

Soundex and Metaphone are written directly from the classic rule lists.
Double Metaphone is taken from abydos (a port of the original C++ code),
truncated to four characters. Every token is transliterated first by NFD
decomposition with combining marks removed, then restricted to A-Z.

Usage: phonetic_oracle.py WORDLIST > phonetic_codes.tsv
"""
import sys
import unicodedata

VOWELS = set("AEIOU")


def fold(token):
    decomposed = unicodedata.normalize("NFD", token)
    stripped = "".join(c for c in decomposed if not unicodedata.combining(c))
    return "".join(c for c in stripped.upper() if "A" <= c <= "Z")


SOUNDEX_CLASSES = {}
for letters, digit in (("BFPV", "1"), ("CGJKQSXZ", "2"), ("DT", "3"),
                       ("L", "4"), ("MN", "5"), ("R", "6")):
    for ch in letters:
        SOUNDEX_CLASSES[ch] = digit


def soundex(token):
    word = fold(token)
    if not word:
        return ""
    out = word[0]
    prev = SOUNDEX_CLASSES.get(word[0])
    for ch in word[1:]:
        if ch in "HW":
            continue
        code = SOUNDEX_CLASSES.get(ch)
        if code is None:
            prev = None
            continue
        if code != prev:
            out += code
        prev = code
        if len(out) == 4:
            break
    return (out + "000")[:4]


def metaphone(token):
    raw = fold(token)
    if not raw:
        return ""
    # rule 1: collapse adjacent duplicates except C
    word = raw[0]
    for ch in raw[1:]:
        if ch == word[-1] and ch != "C":
            continue
        word += ch
    # rule 2 and the initial-letter cases of rules 15/16
    if word[:2] in ("KN", "GN", "PN", "AE", "WR"):
        word = word[1:]
    elif word[0] == "X":
        word = "S" + word[1:]
    elif word[:2] == "WH":
        word = "W" + word[2:]

    n = len(word)

    def at(i):
        return word[i] if 0 <= i < n else ""

    out = []
    i = 0
    while i < n:
        c = word[i]
        prev, nxt, nxt2 = at(i - 1), at(i + 1), at(i + 2)
        if c in VOWELS:
            if i == 0:
                out.append(c)
        elif c == "B":
            if not (prev == "M" and i == n - 1):
                out.append("B")
        elif c == "C":
            if nxt == "I" and nxt2 == "A":
                out.append("X")
            elif nxt == "H":
                out.append("K" if prev == "S" else "X")
            elif nxt in ("I", "E", "Y"):
                out.append("S")
            else:
                out.append("K")
        elif c == "D":
            if nxt == "G" and nxt2 in ("E", "Y", "I"):
                out.append("J")
                i += 1
            else:
                out.append("T")
        elif c == "G":
            if nxt == "H" and i + 2 < n and nxt2 not in VOWELS:
                pass
            elif nxt == "N" and i + 2 == n:
                pass
            elif word[i + 1:] == "NED":
                pass
            elif nxt in ("I", "E", "Y"):
                out.append("J")
            else:
                out.append("K")
        elif c == "H":
            if prev in ("C", "S", "P", "T", "G"):
                pass
            elif prev in VOWELS and nxt not in VOWELS:
                pass
            else:
                out.append("H")
        elif c == "K":
            if prev != "C":
                out.append("K")
        elif c == "P":
            out.append("F" if nxt == "H" else "P")
        elif c == "Q":
            out.append("K")
        elif c == "S":
            if nxt == "H" or (nxt == "I" and nxt2 in ("O", "A")):
                out.append("X")
            else:
                out.append("S")
        elif c == "T":
            if nxt == "I" and nxt2 in ("A", "O"):
                out.append("X")
            elif nxt == "H":
                out.append("0")
            elif nxt == "C" and nxt2 == "H":
                pass
            else:
                out.append("T")
        elif c == "V":
            out.append("F")
        elif c == "W":
            if nxt in VOWELS:
                out.append("W")
        elif c == "X":
            out.append("KS")
        elif c == "Y":
            if nxt in VOWELS:
                out.append("Y")
        elif c == "Z":
            out.append("S")
        else:
            out.append(c)  # F J L M N R
        i += 1
    return "".join(out)


def double_metaphone(token):
    from abydos.phonetic import DoubleMetaphone

    word = fold(token)
    if not word:
        return "", ""
    primary, alternate = DoubleMetaphone(max_length=4).encode(word)
    return primary, alternate or primary


def main(path):
    with open(path, encoding="utf-8") as fh:
        tokens = [line.strip() for line in fh if line.strip() and not line.startswith("#")]
    for tok in tokens:
        p, a = double_metaphone(tok)
        print("\t".join((tok, soundex(tok), metaphone(tok), p, a)))


if __name__ == "__main__":
    main(sys.argv[1])
