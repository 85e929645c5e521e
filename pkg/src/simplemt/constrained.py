"""AoA-constrained beam search over a pluggable token-scoring model.

Hypotheses that pick up a word at or above the AoA threshold are killed
(conceptually scored -inf) and never expanded again; when no hypothesis can
finish inside the length cap the search reports failure and the caller falls
back to the unconstrained output.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Protocol, Sequence, runtime_checkable

from .lexicon import AoaLexicon, lookup
from .textproc import tokenize

BOS = "<s>"
EOS = "</s>"

Constraint = Callable[[str], bool]


@runtime_checkable
class TokenModel(Protocol):
    """Scores every vocabulary token plus EOS given a token prefix."""

    vocabulary: Sequence[str]

    def log_scores(self, prefix: Sequence[str]) -> Mapping[str, float]: ...


@dataclass(frozen=True)
class BeamHypothesis:
    tokens: tuple[str, ...]
    log_score: float
    alive: bool = True


def aoa_constraint(lex: AoaLexicon, threshold: float) -> Constraint:
    """Violation predicate: true for rated words with AoA >= threshold.

    Unrated tokens (numbers, punctuation, out-of-lexicon words) always pass.
    """
    if threshold <= 0:
        raise ValueError("threshold must be > 0")

    def violates(token: str) -> bool:
        aoa = lookup(lex, token)
        return aoa is not None and aoa >= threshold

    return violates


def constrained_beam_search(
    model: TokenModel,
    constraint: Constraint,
    beam_size: int,
    max_len: int,
) -> list[str] | None:
    """Best completed hypothesis by summed log-probability, or None on failure.

    Dead hypotheses (those gaining a violating token) are dropped immediately
    rather than carried at -inf; ties break on lexicographic token order.
    """
    if beam_size < 1:
        raise ValueError("beam_size must be >= 1")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")

    beams: list[BeamHypothesis] = [BeamHypothesis((), 0.0)]
    best: BeamHypothesis | None = None
    while beams:
        candidates: list[BeamHypothesis] = []
        for hyp in beams:
            scores = model.log_scores(hyp.tokens)
            for token in sorted(scores):
                total = hyp.log_score + scores[token]
                if not math.isfinite(total):
                    continue
                if token == EOS:
                    done = BeamHypothesis(hyp.tokens, total)
                    if best is None or _beats(done, best):
                        best = done
                elif len(hyp.tokens) < max_len and not constraint(token):
                    candidates.append(BeamHypothesis(hyp.tokens + (token,), total))
        candidates.sort(key=lambda h: (-h.log_score, h.tokens))
        beams = candidates[:beam_size]
    return None if best is None else list(best.tokens)


def _beats(a: BeamHypothesis, b: BeamHypothesis) -> bool:
    if a.log_score != b.log_score:
        return a.log_score > b.log_score
    return a.tokens < b.tokens


class NGramModel:
    """Count-based n-gram language model with add-k smoothing.

    Trained from plain-text sentences; each sentence is padded with BOS
    context and terminated by EOS. Add-k mass goes to vocabulary tokens only;
    EOS keeps its raw count, so generation can stop only where a training
    sentence stopped (otherwise the summed-logprob search would always favor
    degenerate early stops). With add_k > 0 every vocabulary continuation has
    finite probability, so constrained searches can always detour.
    """

    def __init__(self, order: int = 2, add_k: float = 0.1):
        if order < 1:
            raise ValueError("order must be >= 1")
        if add_k < 0:
            raise ValueError("add_k must be >= 0")
        self.order = order
        self.add_k = add_k
        self.vocabulary: tuple[str, ...] = ()
        self._counts: dict[tuple[str, ...], Counter] = defaultdict(Counter)
        self._context_totals: dict[tuple[str, ...], int] = {}

    @classmethod
    def train(cls, sentences: Iterable[str], order: int = 2, add_k: float = 0.1) -> "NGramModel":
        model = cls(order=order, add_k=add_k)
        vocab: set[str] = set()
        for sentence in sentences:
            tokens = [t.surface for t in tokenize(sentence)]
            vocab.update(tokens)
            seq = [BOS] * (order - 1) + tokens + [EOS]
            for i in range(order - 1, len(seq)):
                ctx = tuple(seq[i - order + 1 : i])
                model._counts[ctx][seq[i]] += 1
        model.vocabulary = tuple(sorted(vocab))
        model._context_totals = {ctx: sum(c.values()) for ctx, c in model._counts.items()}
        return model

    def _context(self, prefix: Sequence[str]) -> tuple[str, ...]:
        need = self.order - 1
        padded = [BOS] * need + list(prefix)
        return tuple(padded[len(padded) - need :]) if need else ()

    def log_scores(self, prefix: Sequence[str]) -> dict[str, float]:
        ctx = self._context(prefix)
        counts = self._counts.get(ctx, Counter())
        total = self._context_totals.get(ctx, 0) + self.add_k * len(self.vocabulary)
        scores: dict[str, float] = {}
        for token in self.vocabulary:
            p = (counts.get(token, 0) + self.add_k) / total if total > 0 else 0.0
            scores[token] = math.log(p) if p > 0 else -math.inf
        p_eos = counts.get(EOS, 0) / total if total > 0 else 0.0
        scores[EOS] = math.log(p_eos) if p_eos > 0 else -math.inf
        return scores
