"""Age-of-Acquisition lexicon: loading, surface-form normalization, lookup."""

from __future__ import annotations

import csv
import enum
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)

_VOWELS = frozenset("aeiou")
_APOSTROPHES = ("'", "’")


class LexiconFormat(enum.Enum):
    CSV = "csv"


@dataclass(frozen=True)
class AoaLexicon:
    """Read-only map from a normalized (lowercase) word to its acquisition age in years."""

    entries: dict[str, float]
    source_name: str = ""
    duplicate_rows: int = 0
    skipped_rows: int = 0

    def __post_init__(self) -> None:
        for word, aoa in self.entries.items():
            if not word or word != word.lower() or any(ch.isspace() for ch in word):
                raise ValueError(f"bad lexicon key: {word!r}")
            if not math.isfinite(aoa) or aoa <= 0:
                raise ValueError(f"bad AoA for {word!r}: {aoa!r}")

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return self.lookup(word) is not None

    def lookup(self, word: str) -> float | None:
        return lookup(self, word)


def _strip_possessive(word: str) -> str:
    for apo in _APOSTROPHES:
        if word.endswith(apo + "s"):
            return word[: -(len(apo) + 1)]
        if word.endswith(apo):
            return word[: -len(apo)]
    return word


def _doubled_consonant(stem: str) -> bool:
    return len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS


def _inflection_candidates(word: str) -> list[str]:
    # Ordered least-transformed first; lookup stops at the first lexicon hit,
    # so implausible stems are harmless.
    cands: list[str] = []
    if word.endswith("s") and not word.endswith("ss") and len(word) >= 3:
        cands.append(word[:-1])
    if word.endswith("es") and len(word) >= 4:
        cands.append(word[:-2])
    for suffix in ("ed", "ing"):
        if word.endswith(suffix) and len(word) - len(suffix) >= 2:
            stem = word[: -len(suffix)]
            cands.append(stem + "e")  # silent-e restoration (investigated -> investigate)
            if _doubled_consonant(stem):
                cands.append(stem[:-1])  # undo consonant doubling (stopped -> stop)
            cands.append(stem)
    return cands


def normalize(word: str) -> list[str]:
    """Candidate chain for lexicon lookup, most-specific (least-transformed) first."""
    base = word.lower()
    chain = [base]
    deposs = _strip_possessive(base)
    if deposs != base:
        chain.append(deposs)
    for cand in _inflection_candidates(deposs):
        if cand not in chain:
            chain.append(cand)
    return chain


def lookup(lex: AoaLexicon, word: str) -> float | None:
    """AoA in years for the first normalization candidate found, or None."""
    for cand in normalize(word):
        aoa = lex.entries.get(cand)
        if aoa is not None:
            return aoa
    return None


def load_lexicon(path: str | Path, format: LexiconFormat = LexiconFormat.CSV) -> AoaLexicon:
    """Load a two-column `word,aoa` CSV; header auto-detected, duplicates keep first.

    Malformed rows (non-numeric AoA, empty or whitespace-bearing words) are
    skipped with a warning; the load fails only when no valid row remains.
    """
    if format is not LexiconFormat.CSV:
        raise ValueError(f"unsupported lexicon format: {format}")
    path = Path(path)
    entries: dict[str, float] = {}
    duplicates = 0
    skipped = 0
    with path.open(newline="", encoding="utf-8-sig") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                skipped += 1
                log.warning("%s:%d: expected 2 columns, got %d", path, i + 1, len(row))
                continue
            word = row[0].strip().lower()
            try:
                aoa = float(row[1])
            except ValueError:
                if i == 0:
                    continue  # header row
                skipped += 1
                log.warning("%s:%d: non-numeric AoA %r", path, i + 1, row[1])
                continue
            if not word or any(ch.isspace() for ch in word) or not math.isfinite(aoa) or aoa <= 0:
                skipped += 1
                log.warning("%s:%d: invalid row %r", path, i + 1, row)
                continue
            if word in entries:
                duplicates += 1
                log.warning("%s:%d: duplicate word %r, keeping first", path, i + 1, word)
                continue
            entries[word] = aoa
    if not entries:
        raise ValueError(f"{path}: no valid lexicon rows")
    return AoaLexicon(
        entries=entries,
        source_name=path.name,
        duplicate_rows=duplicates,
        skipped_rows=skipped,
    )
