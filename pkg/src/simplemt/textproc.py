"""Tokenization, AoA annotation, <edit> tagging, and syllable counting."""

from __future__ import annotations

import re
import string
from dataclasses import dataclass

from .lexicon import AoaLexicon, lookup

EDIT_TAG = "<edit>"

_PUNCT = frozenset(string.punctuation)
_SYLLABLE_VOWELS = frozenset("aeiouy")
_CHUNK = re.compile(r"\S+")


class WordNotFound(ValueError):
    """A requested target word has no (untagged) token occurrence in the sentence."""

    def __init__(self, word: str):
        super().__init__(f"word not found in sentence: {word!r}")
        self.word = word


@dataclass(frozen=True)
class Token:
    surface: str
    start: int
    end: int
    is_word: bool
    aoa: float | None = None


@dataclass(frozen=True)
class AnalyzedSentence:
    text: str
    tokens: list[Token]
    max_aoa_index: int | None

    @property
    def max_token(self) -> Token | None:
        return None if self.max_aoa_index is None else self.tokens[self.max_aoa_index]

    @property
    def max_aoa(self) -> float | None:
        tok = self.max_token
        return None if tok is None else tok.aoa


@dataclass(frozen=True)
class EditTaggedSentence:
    text: str
    tagged_words: list[str]


def tokenize(text: str) -> list[Token]:
    """Whitespace split with leading/trailing ASCII punctuation peeled off.

    Internal apostrophes and hyphens stay inside the word ("non-native",
    "don't"); tokens with no letter (numbers, punctuation) get is_word=False.
    """
    tokens: list[Token] = []
    for m in _CHUNK.finditer(text):
        lo, hi = m.start(), m.end()
        while lo < hi and text[lo] in _PUNCT:
            tokens.append(Token(text[lo], lo, lo + 1, False))
            lo += 1
        trailing: list[Token] = []
        while hi > lo and text[hi - 1] in _PUNCT:
            trailing.append(Token(text[hi - 1], hi - 1, hi, False))
            hi -= 1
        if lo < hi:
            core = text[lo:hi]
            tokens.append(Token(core, lo, hi, any(ch.isalpha() for ch in core)))
        tokens.extend(reversed(trailing))
    return tokens


def annotate(lex: AoaLexicon, text: str) -> AnalyzedSentence:
    """Rate every word token against the lexicon and pick the highest-AoA word.

    Ties break leftmost; unrated words never win (unknown words are treated as
    out of scope for difficulty decisions rather than defaulted to hard).
    """
    tokens = [
        Token(t.surface, t.start, t.end, t.is_word, lookup(lex, t.surface) if t.is_word else None)
        for t in tokenize(text)
    ]
    max_idx: int | None = None
    for i, tok in enumerate(tokens):
        if tok.aoa is None:
            continue
        if max_idx is None or tok.aoa > tokens[max_idx].aoa:
            max_idx = i
    return AnalyzedSentence(text=text, tokens=tokens, max_aoa_index=max_idx)


def words_above(analyzed: AnalyzedSentence, age: float) -> list[Token]:
    """Rated word tokens with AoA strictly greater than age, in sentence order."""
    return [t for t in analyzed.tokens if t.is_word and t.aoa is not None and t.aoa > age]


def tag_words(text: str, words: list[str]) -> EditTaggedSentence:
    """Wrap each word's first untagged token occurrence in <edit>...<edit>.

    The opening and closing literal are identical. Raises WordNotFound when a
    word has no remaining untagged occurrence.
    """
    tokens = tokenize(text)
    used: set[int] = set()
    spans: list[tuple[int, int]] = []
    for word in words:
        for i, tok in enumerate(tokens):
            if i not in used and tok.surface == word:
                used.add(i)
                spans.append((tok.start, tok.end))
                break
        else:
            raise WordNotFound(word)
    out = []
    pos = 0
    for start, end in sorted(spans):
        out.append(text[pos:start])
        out.append(EDIT_TAG + text[start:end] + EDIT_TAG)
        pos = end
    out.append(text[pos:])
    return EditTaggedSentence(text="".join(out), tagged_words=list(words))


def strip_tags(tagged: str) -> str:
    """Remove every <edit> literal; idempotent."""
    return tagged.replace(EDIT_TAG, "")


def count_syllables(word: str) -> int:
    """Heuristic syllable count: maximal vowel groups (aeiouy), silent-e aware.

    A terminal "e" drops one count unless it closes an "-le" after a consonant
    ("table" keeps 2, "whale" drops to 1). Never below 1.
    """
    w = word.lower()
    groups = 0
    in_group = False
    for ch in w:
        if ch in _SYLLABLE_VOWELS:
            if not in_group:
                groups += 1
            in_group = True
        else:
            in_group = False
    if w.endswith("e"):
        consonant_le = len(w) >= 3 and w[-2] == "l" and w[-3] not in _SYLLABLE_VOWELS
        if not consonant_le:
            groups -= 1
    return max(groups, 1)
