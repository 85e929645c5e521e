"""Iterative simplification: pick target words, rewrite, re-check, repeat."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

from .lexicon import AoaLexicon
from .rewriter import (
    WORDLESS_VARIANTS,
    BackendError,
    PromptVariant,
    RewriterBackend,
    SimplifyRequest,
    rewrite,
)
from .textproc import AnalyzedSentence, annotate, words_above

log = logging.getLogger(__name__)


class StopReason(enum.Enum):
    SUCCESS = "success"
    ITERATION_CAP = "iteration_cap"
    BACKEND_FAILURE = "backend_failure"
    NO_RATED_WORDS = "no_rated_words"


@dataclass(frozen=True)
class IterationRecord:
    index: int  # 1-based
    input_sentence: str
    target_words: tuple[str, ...]
    output_sentence: str
    max_aoa_before: float | None
    max_aoa_after: float | None

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "input_sentence": self.input_sentence,
            "target_words": list(self.target_words),
            "output_sentence": self.output_sentence,
            "max_aoa_before": self.max_aoa_before,
            "max_aoa_after": self.max_aoa_after,
        }


@dataclass(frozen=True)
class SimplifyResult:
    final_sentence: str
    success: bool
    iterations: tuple[IterationRecord, ...]
    stop_reason: StopReason

    def to_dict(self) -> dict:
        return {
            "final_sentence": self.final_sentence,
            "success": self.success,
            "iterations": [r.to_dict() for r in self.iterations],
            "stop_reason": self.stop_reason.value,
        }


def select_targets(analyzed: AnalyzedSentence, target_age: float, mode: str = "single") -> list[str]:
    """Target words for one rewrite pass.

    single: the highest-AoA word when its AoA >= target_age (the complement of
    the success predicate), else nothing. multi: every word rated above
    target_age, in sentence order.
    """
    if mode == "single":
        tok = analyzed.max_token
        if tok is not None and tok.aoa is not None and tok.aoa >= target_age:
            return [tok.surface]
        return []
    if mode == "multi":
        return [t.surface for t in words_above(analyzed, target_age)]
    raise ValueError(f"unknown mode: {mode!r}")


def _met_target(analyzed: AnalyzedSentence, target_age: float) -> bool:
    return analyzed.max_aoa is None or analyzed.max_aoa < target_age


def simplify(
    translation: str,
    source: str | None,
    lex: AoaLexicon,
    backend: RewriterBackend,
    target_age: float = 10.0,
    mode: str = "single",
    variant: PromptVariant = PromptVariant.PROPOSED,
    max_iterations: int = 5,
    feed_history: bool = False,
) -> SimplifyResult:
    """Rewrite until the highest rated AoA drops below target_age or the cap hits.

    Each round re-annotates the backend's full output, so rewrites of
    surrounding words are picked up and the loop converges on whatever is
    hardest next. Backend failures stop the loop and keep the last good
    sentence. Iteration history is not fed back to the backend unless
    feed_history is set (off by default).
    """
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    if not translation:
        raise ValueError("translation must be nonempty")

    records: list[IterationRecord] = []
    current = translation
    while True:
        analyzed = annotate(lex, current)
        if analyzed.max_aoa is None:
            return SimplifyResult(current, True, tuple(records), StopReason.NO_RATED_WORDS)
        if analyzed.max_aoa < target_age:
            return SimplifyResult(current, True, tuple(records), StopReason.SUCCESS)
        if len(records) >= max_iterations:
            return SimplifyResult(current, False, tuple(records), StopReason.ITERATION_CAP)

        if variant in WORDLESS_VARIANTS:
            targets: list[str] = []
        else:
            targets = select_targets(analyzed, target_age, mode)
            if not targets:
                # multi mode can come up empty when the maximum sits exactly at
                # target_age; fall back to the single hardest word so the loop
                # can still make progress.
                targets = select_targets(analyzed, target_age, "single")
        req = SimplifyRequest(
            translation=current,
            target_words=tuple(targets),
            target_age=target_age,
            variant=variant,
            source_sentence=source,
            # earlier versions of the sentence; the newest one is already the
            # prompt's machine-translation line
            history=tuple(r.input_sentence for r in records) if feed_history else (),
        )
        try:
            output = rewrite(backend, req)
        except BackendError as exc:
            log.warning("backend failed after %d iterations: %s", len(records), exc)
            return SimplifyResult(current, False, tuple(records), StopReason.BACKEND_FAILURE)
        after = annotate(lex, output)
        records.append(
            IterationRecord(
                index=len(records) + 1,
                input_sentence=current,
                target_words=tuple(targets),
                output_sentence=output,
                max_aoa_before=analyzed.max_aoa,
                max_aoa_after=after.max_aoa,
            )
        )
        current = output


def simplify_user(
    translation: str,
    source: str | None,
    user_words: list[str],
    lex: AoaLexicon,
    backend: RewriterBackend,
    target_age: float = 10.0,
) -> SimplifyResult:
    """One rewrite pass targeting exactly the user's words, whatever their AoA.

    Success is still judged against target_age afterwards. Raises WordNotFound
    when a requested word does not occur in the translation.
    """
    if not user_words:
        raise ValueError("user_words must be nonempty")
    if not translation:
        raise ValueError("translation must be nonempty")
    variant = PromptVariant.PROPOSED if source is not None else PromptVariant.NO_INTERMEDIATE
    before = annotate(lex, translation)
    req = SimplifyRequest(
        translation=translation,
        target_words=tuple(user_words),
        target_age=target_age,
        variant=variant,
        source_sentence=source,
    )
    try:
        output = rewrite(backend, req)
    except BackendError as exc:
        log.warning("backend failed on user-specified rewrite: %s", exc)
        return SimplifyResult(translation, _met_target(before, target_age), (), StopReason.BACKEND_FAILURE)
    after = annotate(lex, output)
    record = IterationRecord(
        index=1,
        input_sentence=translation,
        target_words=tuple(user_words),
        output_sentence=output,
        max_aoa_before=before.max_aoa,
        max_aoa_after=after.max_aoa,
    )
    if after.max_aoa is None:
        return SimplifyResult(output, True, (record,), StopReason.NO_RATED_WORDS)
    if after.max_aoa < target_age:
        return SimplifyResult(output, True, (record,), StopReason.SUCCESS)
    return SimplifyResult(output, False, (record,), StopReason.ITERATION_CAP)
