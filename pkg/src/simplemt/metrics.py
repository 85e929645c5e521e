"""Corpus metrics: BLEU, SARI, FKGL, Dale-Chall, average highest AoA, success rate.

All scores use the toolkit's own tokenizer so numbers are reproducible
bit-for-bit within the toolkit. Corpus-level metrics are built from
per-sentence statistics that merge additively, so work can be partitioned
across workers in any order.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .lexicon import AoaLexicon, normalize
from .textproc import annotate, count_syllables, tokenize

MAX_NGRAM_ORDER = 4


@dataclass(frozen=True)
class MetricReport:
    n_sentences: int
    bleu: float
    sari: float
    fkgl: float
    dale_chall: float
    average_aoa: float
    success_rate: float
    comet: float | None = None

    def to_dict(self) -> dict:
        return {
            "n_sentences": self.n_sentences,
            "bleu": self.bleu,
            "sari": self.sari,
            "fkgl": self.fkgl,
            "dale_chall": self.dale_chall,
            "average_aoa": self.average_aoa,
            "success_rate": self.success_rate,
            "comet": self.comet,
        }


def _words(text: str) -> list[str]:
    return [t.surface for t in tokenize(text)]


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


# ---------------------------------------------------------------------------
# BLEU


@dataclass
class BleuStats:
    """Additive corpus totals for BLEU-4: clipped/total n-gram counts and lengths."""

    clipped: list[int] = field(default_factory=lambda: [0] * MAX_NGRAM_ORDER)
    total: list[int] = field(default_factory=lambda: [0] * MAX_NGRAM_ORDER)
    hyp_len: int = 0
    ref_len: int = 0

    def __add__(self, other: "BleuStats") -> "BleuStats":
        return BleuStats(
            clipped=[a + b for a, b in zip(self.clipped, other.clipped)],
            total=[a + b for a, b in zip(self.total, other.total)],
            hyp_len=self.hyp_len + other.hyp_len,
            ref_len=self.ref_len + other.ref_len,
        )


def bleu_pair_stats(hypothesis: str, reference: str) -> BleuStats:
    hyp = _words(hypothesis)
    ref = _words(reference)
    stats = BleuStats(hyp_len=len(hyp), ref_len=len(ref))
    for n in range(1, MAX_NGRAM_ORDER + 1):
        hyp_counts = _ngrams(hyp, n)
        ref_counts = _ngrams(ref, n)
        stats.total[n - 1] += sum(hyp_counts.values())
        stats.clipped[n - 1] += sum(
            min(c, ref_counts[g]) for g, c in hyp_counts.items() if g in ref_counts
        )
    return stats


def bleu_from_stats(stats: BleuStats) -> float:
    if stats.hyp_len == 0:
        return 0.0
    log_sum = 0.0
    for clipped, total in zip(stats.clipped, stats.total):
        if clipped == 0 or total == 0:
            return 0.0  # no smoothing: any empty precision zeroes the score
        log_sum += math.log(clipped / total) / MAX_NGRAM_ORDER
    bp = 1.0 if stats.hyp_len >= stats.ref_len else math.exp(1.0 - stats.ref_len / stats.hyp_len)
    return 100.0 * bp * math.exp(log_sum)


def bleu(hypotheses: list[str], references: list[str]) -> float:
    """Corpus-level BLEU-4 (0-100), single reference per hypothesis, no smoothing.

    Tokenization is the toolkit's own, case-sensitive, punctuation included.
    Without smoothing a corpus whose hypotheses hold no 4-gram at all scores 0,
    identity included; identity over any corpus with at least one 4-gram is
    exactly 100.
    """
    if len(hypotheses) != len(references):
        raise ValueError("hypotheses and references must have equal length")
    if not hypotheses:
        raise ValueError("empty corpus")
    stats = BleuStats()
    for hyp, ref in zip(hypotheses, references):
        stats = stats + bleu_pair_stats(hyp, ref)
    return bleu_from_stats(stats)


# ---------------------------------------------------------------------------
# SARI


@dataclass
class SariStats:
    """Additive corpus totals for the add/keep/delete components, per n-gram order.

    Reference-side counts are scaled by each sentence's reference count so
    multi-reference fractions stay integral (micro-averaged over the corpus).
    """

    add_good: list[int] = field(default_factory=lambda: [0] * MAX_NGRAM_ORDER)
    add_cand: list[int] = field(default_factory=lambda: [0] * MAX_NGRAM_ORDER)
    add_all: list[int] = field(default_factory=lambda: [0] * MAX_NGRAM_ORDER)
    keep_good: list[int] = field(default_factory=lambda: [0] * MAX_NGRAM_ORDER)
    keep_cand: list[int] = field(default_factory=lambda: [0] * MAX_NGRAM_ORDER)
    keep_all: list[int] = field(default_factory=lambda: [0] * MAX_NGRAM_ORDER)
    del_good: list[int] = field(default_factory=lambda: [0] * MAX_NGRAM_ORDER)
    del_cand: list[int] = field(default_factory=lambda: [0] * MAX_NGRAM_ORDER)

    def __add__(self, other: "SariStats") -> "SariStats":
        merged = SariStats()
        for name in (
            "add_good", "add_cand", "add_all",
            "keep_good", "keep_cand", "keep_all",
            "del_good", "del_cand",
        ):
            setattr(merged, name, [a + b for a, b in zip(getattr(self, name), getattr(other, name))])
        return merged


def sari_sentence_stats(source: str, hypothesis: str, references: list[str]) -> SariStats:
    if not references:
        raise ValueError("each hypothesis needs at least one reference")
    src = _words(source)
    hyp = _words(hypothesis)
    refs = [_words(r) for r in references]
    r = len(refs)
    stats = SariStats()
    for n in range(1, MAX_NGRAM_ORDER + 1):
        s = Counter({g: c * r for g, c in _ngrams(src, n).items()})
        c = Counter({g: cnt * r for g, cnt in _ngrams(hyp, n).items()})
        ref = Counter()
        for rt in refs:
            ref.update(_ngrams(rt, n))

        # add: output n-grams absent from the source (set-based)
        add_cand = set(c) - set(s)
        stats.add_cand[n - 1] += len(add_cand)
        stats.add_good[n - 1] += len(add_cand & set(ref))
        stats.add_all[n - 1] += len(set(ref) - set(s))

        # keep: n-grams retained from the source (multiset)
        keep_cand = s & c
        stats.keep_cand[n - 1] += sum(keep_cand.values())
        stats.keep_good[n - 1] += sum((keep_cand & ref).values())
        stats.keep_all[n - 1] += sum((s & ref).values())

        # delete: n-grams dropped from the source that references also drop
        del_cand = s - c
        stats.del_cand[n - 1] += sum(del_cand.values())
        stats.del_good[n - 1] += sum((del_cand - ref).values())
    return stats


def _ratio(num: int, den: int) -> float:
    return num / den if den > 0 else 0.0


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if (p + r) > 0 else 0.0


def sari_from_stats(stats: SariStats) -> float:
    score = 0.0
    for i in range(MAX_NGRAM_ORDER):
        f_add = _f1(_ratio(stats.add_good[i], stats.add_cand[i]),
                    _ratio(stats.add_good[i], stats.add_all[i]))
        f_keep = _f1(_ratio(stats.keep_good[i], stats.keep_cand[i]),
                     _ratio(stats.keep_good[i], stats.keep_all[i]))
        p_del = _ratio(stats.del_good[i], stats.del_cand[i])
        score += (f_add + f_keep + p_del) / 3.0
    return 100.0 * score / MAX_NGRAM_ORDER


def sari(sources: list[str], hypotheses: list[str], references: list[list[str]]) -> float:
    """SARI (0-100): add-F1, keep-F1 and delete-precision averaged over n=1..4.

    0/0 ratios resolve to 0, keeping scores bounded; statistics are pooled
    over the corpus before the component ratios are taken.
    """
    if not (len(sources) == len(hypotheses) == len(references)):
        raise ValueError("sources, hypotheses and references must have equal length")
    if not sources:
        raise ValueError("empty corpus")
    stats = SariStats()
    for src, hyp, refs in zip(sources, hypotheses, references):
        stats = stats + sari_sentence_stats(src, hyp, refs)
    return sari_from_stats(stats)


# ---------------------------------------------------------------------------
# Readability


def fkgl(texts: list[str]) -> float:
    """Flesch-Kincaid grade level over the corpus, one sentence per input record."""
    if not texts:
        raise ValueError("empty corpus")
    n_words = 0
    n_syllables = 0
    for text in texts:
        words = [t for t in tokenize(text) if t.is_word]
        if not words:
            raise ValueError(f"no word tokens in {text!r}")
        n_words += len(words)
        n_syllables += sum(count_syllables(t.surface) for t in words)
    n_sentences = len(texts)
    return 0.39 * (n_words / n_sentences) + 11.8 * (n_syllables / n_words) - 15.59


def is_familiar(word: str, familiar: set[str]) -> bool:
    return any(cand in familiar for cand in normalize(word))


def dale_chall(texts: list[str], familiar: set[str]) -> float:
    """Dale-Chall readability; a word is difficult when no normalization
    candidate appears in the familiar-word list."""
    if not texts:
        raise ValueError("empty corpus")
    if not familiar:
        raise ValueError("familiar word set is empty")
    n_words = 0
    n_difficult = 0
    for text in texts:
        words = [t for t in tokenize(text) if t.is_word]
        if not words:
            raise ValueError(f"no word tokens in {text!r}")
        n_words += len(words)
        n_difficult += sum(1 for t in words if not is_familiar(t.surface, familiar))
    pct_difficult = 100.0 * n_difficult / n_words
    score = 0.1579 * pct_difficult + 0.0496 * (n_words / len(texts))
    if pct_difficult > 5.0:
        score += 3.6365
    return score


def load_familiar_words(path) -> set[str]:
    """One word per line, case-insensitive."""
    with open(path, encoding="utf-8") as fh:
        words = {line.strip().lower() for line in fh if line.strip()}
    if not words:
        raise ValueError(f"{path}: empty familiar-word list")
    return words


# ---------------------------------------------------------------------------
# AoA-based scores


def average_max_aoa(texts: list[str], lex: AoaLexicon) -> float:
    """Mean per-sentence highest AoA; sentences with no rated word contribute 0."""
    if not texts:
        raise ValueError("empty corpus")
    total = 0.0
    for text in texts:
        max_aoa = annotate(lex, text).max_aoa
        total += max_aoa if max_aoa is not None else 0.0
    return total / len(texts)


def success_rate(texts: list[str], lex: AoaLexicon, target_age: float) -> float:
    """Fraction of sentences whose highest rated AoA is strictly below target_age.

    Sentences with no rated word count as success (vacuously simple).
    """
    if not texts:
        raise ValueError("empty corpus")
    ok = 0
    for text in texts:
        max_aoa = annotate(lex, text).max_aoa
        if max_aoa is None or max_aoa < target_age:
            ok += 1
    return ok / len(texts)
