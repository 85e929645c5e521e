"""Benchmark factory: back-translate a simple corpus, filter by AoA gap, split.

The pipeline turns each simple reference sentence into (intermediate
translation, back-translation) via two pluggable MT clients, rates both ends
with the AoA lexicon, and keeps only pairs where the back-translation got
measurably harder than the reference.
"""

from __future__ import annotations

import json
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, runtime_checkable

import httpx

from .lexicon import AoaLexicon
from .textproc import annotate

log = logging.getLogger(__name__)


class MtTransportError(Exception):
    pass


@runtime_checkable
class MtClient(Protocol):
    direction: str

    def translate(self, text: str) -> str: ...


@dataclass(frozen=True)
class DatasetExample:
    reference: str
    intermediate: str
    back_translation: str
    ref_max_aoa: float | None
    bt_max_aoa: float | None
    aoa_diff: float

    def to_dict(self) -> dict:
        return {
            "reference": self.reference,
            "intermediate": self.intermediate,
            "back_translation": self.back_translation,
            "ref_max_aoa": self.ref_max_aoa,
            "bt_max_aoa": self.bt_max_aoa,
            "aoa_diff": self.aoa_diff,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetExample":
        return cls(
            reference=d["reference"],
            intermediate=d["intermediate"],
            back_translation=d["back_translation"],
            ref_max_aoa=d.get("ref_max_aoa"),
            bt_max_aoa=d.get("bt_max_aoa"),
            aoa_diff=d["aoa_diff"],
        )


@dataclass(frozen=True)
class SplitResult:
    train: list[DatasetExample]
    dev: list[DatasetExample]
    test: list[DatasetExample]


@dataclass
class ScriptedMtClient:
    """Table-driven MT stub for tests and offline pipelines; identity when unmapped."""

    mapping: dict[str, str]
    direction: str = "stub"

    def translate(self, text: str) -> str:
        return self.mapping.get(text, text)


@dataclass
class IdentityMtClient:
    direction: str = "identity"

    def translate(self, text: str) -> str:
        return text


class ChatMtClient:
    """MT over an OpenAI-compatible chat endpoint, same wire as the rewriter."""

    def __init__(self, base_url: str, model: str, direction: str,
                 instruction: str = "Translate the following sentence. Output the translation only.",
                 **backend_kwargs):
        from .rewriter import BackendError, OpenAiChatBackend

        self._errors = BackendError
        self._backend = OpenAiChatBackend(base_url, model, **backend_kwargs)
        self.direction = direction
        self.instruction = instruction

    def translate(self, text: str) -> str:
        try:
            completion = self._backend.complete(f"{self.instruction}\n{text}")
        except self._errors as exc:
            raise MtTransportError(str(exc)) from exc
        return completion.strip().split("\n", 1)[0].strip()


class HttpTranslateClient:
    """Generic HTTP translator: POST {"text": ...} -> {"translation": ...}."""

    def __init__(self, url: str, direction: str, timeout: float = 30.0):
        self.url = url
        self.direction = direction
        self._client = httpx.Client(timeout=timeout)

    def translate(self, text: str) -> str:
        try:
            resp = self._client.post(self.url, json={"text": text})
        except httpx.HTTPError as exc:
            raise MtTransportError(str(exc)) from exc
        if resp.status_code != 200:
            raise MtTransportError(f"HTTP {resp.status_code}")
        try:
            return resp.json()["translation"]
        except (KeyError, ValueError) as exc:
            raise MtTransportError(f"malformed response: {exc}") from exc


def make_example(reference: str, fwd: MtClient, bwd: MtClient, lex: AoaLexicon) -> DatasetExample:
    intermediate = fwd.translate(reference)
    back_translation = bwd.translate(intermediate)
    if not intermediate or not back_translation:
        raise MtTransportError("MT client returned an empty sentence")
    ref_max = annotate(lex, reference).max_aoa
    bt_max = annotate(lex, back_translation).max_aoa
    diff = bt_max - ref_max if ref_max is not None and bt_max is not None else 0.0
    return DatasetExample(
        reference=reference,
        intermediate=intermediate,
        back_translation=back_translation,
        ref_max_aoa=ref_max,
        bt_max_aoa=bt_max,
        aoa_diff=diff,
    )


def build_examples(
    corpus: Iterable[str],
    fwd: MtClient,
    bwd: MtClient,
    lex: AoaLexicon,
    *,
    jobs: int = 1,
    max_failure_ratio: float = 0.2,
    checkpoint_path: str | Path | None = None,
) -> list[DatasetExample]:
    """Back-translate every corpus sentence; skips (and counts) MT failures.

    Requests run on a bounded pool and outputs keep the input order. With a
    checkpoint path, every processed record is flushed as it completes and an
    interrupted run resumes where it stopped. Aborts when the failure ratio
    exceeds max_failure_ratio.
    """
    sentences = [s for s in (line.strip() for line in corpus) if s]
    done: dict[int, DatasetExample | None] = {}
    ckpt = Path(checkpoint_path) if checkpoint_path else None
    if ckpt and ckpt.exists():
        with ckpt.open(encoding="utf-8") as fh:
            for line in fh:
                rec = json.loads(line)
                done[rec["i"]] = DatasetExample.from_dict(rec["example"]) if rec["ok"] else None
        log.info("resuming from %s: %d records already processed", ckpt, len(done))

    pending = [i for i in range(len(sentences)) if i not in done]

    def work(i: int) -> tuple[int, DatasetExample | None]:
        try:
            return i, make_example(sentences[i], fwd, bwd, lex)
        except MtTransportError as exc:
            log.warning("MT failure on sentence %d: %s", i, exc)
            return i, None

    ckpt_fh = ckpt.open("a", encoding="utf-8") if ckpt else None
    try:
        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            for i, example in pool.map(work, pending):
                done[i] = example
                if ckpt_fh:
                    rec = {"i": i, "ok": example is not None}
                    if example is not None:
                        rec["example"] = example.to_dict()
                    ckpt_fh.write(json.dumps(rec, sort_keys=True) + "\n")
                    ckpt_fh.flush()
    finally:
        if ckpt_fh:
            ckpt_fh.close()

    failures = sum(1 for v in done.values() if v is None)
    if sentences and failures / len(sentences) > max_failure_ratio:
        raise RuntimeError(
            f"MT failure rate {failures}/{len(sentences)} exceeds ceiling {max_failure_ratio}"
        )
    return [done[i] for i in range(len(sentences)) if done[i] is not None]


def filter_pairs(examples: list[DatasetExample], threshold: float = 0.5) -> list[DatasetExample]:
    """Keep examples whose AoA difference is strictly greater than threshold."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    return [e for e in examples if e.aoa_diff > threshold]


def split(examples: list[DatasetExample], seed: int) -> SplitResult:
    """Deterministic seeded shuffle, then an 8:1:1 contiguous cut."""
    n = len(examples)
    if n < 10:
        raise ValueError(f"need at least 10 examples to split, got {n}")
    order = list(range(n))
    random.Random(seed).shuffle(order)
    n_train = int(0.8 * n)
    n_dev = int(0.1 * n)
    train_idx = order[:n_train]
    dev_idx = order[n_train : n_train + n_dev]
    test_idx = order[n_train + n_dev :]
    return SplitResult(
        train=[examples[i] for i in train_idx],
        dev=[examples[i] for i in dev_idx],
        test=[examples[i] for i in test_idx],
    )


def select_target_age(examples: list[DatasetExample], age: float) -> list[DatasetExample]:
    """Test-set selection: hard back-translation (max AoA > age), simple reference (< age)."""
    return [
        e
        for e in examples
        if e.bt_max_aoa is not None
        and e.ref_max_aoa is not None
        and e.bt_max_aoa > age
        and e.ref_max_aoa < age
    ]


def read_examples(path: str | Path) -> list[DatasetExample]:
    with Path(path).open(encoding="utf-8") as fh:
        return [DatasetExample.from_dict(json.loads(line)) for line in fh if line.strip()]


def write_examples(path: str | Path, examples: Iterable[DatasetExample]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps(ex.to_dict(), sort_keys=True) + "\n")
