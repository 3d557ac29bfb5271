"""Reference BLEU / chrF / chrF++ values from sacrebleu.

Inputs are already normalized (lowercase, single spaces, no edge
punctuation), so sacrebleu's tokenization is a plain whitespace split.
Writes: reference<TAB>hypothesis<TAB>bleu<TAB>chrf<TAB>chrfpp
"""
import sys

from sacrebleu.metrics import BLEU, CHRF

PAIRS = [
    ("the cat sat", "the cat sat down"),
    ("the cat sat down", "the cat sat"),
    ("the cat sat on the mat", "the cat sat on the mat"),
    ("the cat sat on the mat", "a cat was sitting on a mat"),
    ("a b c d e f", "a b c d e g"),
    ("a b c", "d e f"),
    ("ab", "abc"),
    ("a b", "ab"),
    ("ñande ru yvága", "ñande ru yvy"),
    ("mba'éichapa reiko", "mba'éichapa nde"),
    ("allin p'unchay", "allin tuta"),
    ("imaynalla kachkanki", "imaynalla kashanki"),
    ("ko'ãga ára porã", "ára porã ko'ãga"),
    ("the quick brown fox jumps over the lazy dog", "the quick brown dog jumps over the lazy fox"),
    ("machine translation for low resource languages", "translation of low resource languages by machine"),
    ("a", "a"),
    ("a", "b"),
    ("x", "x y z"),
    ("one two three four five", "one two"),
    ("one two", "one two three four five"),
    ("la la la la", "la"),
    ("la", "la la la la"),
    ("ñe'ẽ guaraní", "ñe'ẽ guarani"),
    ("qhichwa simi", "runasimi"),
    ("abcdefgh", "abcdefgh ijk"),
    ("kuña porã", "kuñataĩ porã"),
    ("jaha jaguata", "jaha jaguatá ko'ápe"),
    ("yes yes no", "no yes yes"),
]


def main():
    bleu = BLEU(tokenize="none", smooth_method="add-k", smooth_value=1, effective_order=False)
    chrf = CHRF()
    chrfpp = CHRF(word_order=2)
    out = sys.stdout
    for ref, hyp in PAIRS:
        b = bleu.sentence_score(hyp, [ref]).score
        c = chrf.sentence_score(hyp, [ref]).score
        cp = chrfpp.sentence_score(hyp, [ref]).score
        out.write(f"{ref}\t{hyp}\t{b!r}\t{c!r}\t{cp!r}\n")


if __name__ == "__main__":
    main()
