"""End-to-end experiment runner: systems over a test set, report, distributions.

Scores are always computed over the full test set with each sentence's latest
output (sentences a system failed to change keep their current best), matching
how the per-iteration report counts survivors.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import httpx

from . import controller, metrics
from .constrained import NGramModel, aoa_constraint, constrained_beam_search
from .dataset import DatasetExample, read_examples
from .lexicon import AoaLexicon, load_lexicon
from .rewriter import (
    BackendError,
    OpenAiChatBackend,
    PromptVariant,
    RewriterBackend,
    SimplifyRequest,
    mock_backend,
    rewrite,
)
from .textproc import annotate, tokenize

log = logging.getLogger(__name__)

ITERATIVE_SYSTEMS = {
    "proposed": (PromptVariant.PROPOSED, "single"),
    "multi_word": (PromptVariant.MULTI_WORD, "multi"),
    "no_intermediate": (PromptVariant.NO_INTERMEDIATE, "single"),
    "no_word": (PromptVariant.NO_WORD, "single"),
    "no_intermediate_no_word": (PromptVariant.NO_INTERMEDIATE_NO_WORD, "single"),
}
SYSTEMS = set(ITERATIVE_SYSTEMS) | {"initial", "direct_translation", "constrained", "external_file"}


@dataclass
class ExperimentConfig:
    system: str
    lexicon_path: str
    test_set_path: str
    output_dir: str
    familiar_words_path: str | None = None
    target_age: float = 10.0
    max_iterations: int = 5
    seed: int = 0
    jobs: int = 1
    label: str | None = None
    backend: dict = field(default_factory=lambda: {"kind": "mock", "substitutions": {}})
    external_outputs_path: str | None = None
    beam_size: int = 6
    ngram_order: int = 2
    ngram_add_k: float = 0.01
    ngram_corpus_path: str | None = None  # shared model corpus; default trains per sentence
    max_len_margin: int = 5
    comet_endpoint: str | None = None
    feed_history: bool = False  # paper-suggested follow-up; off by default, echoed in artifacts

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**d)

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        with Path(path).open(encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self) -> None:
        if self.system not in SYSTEMS:
            raise ValueError(f"unknown system {self.system!r} (choose from {sorted(SYSTEMS)})")
        if self.target_age <= 0:
            raise ValueError("target_age must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        for name in ("lexicon_path", "test_set_path", "familiar_words_path",
                     "external_outputs_path", "ngram_corpus_path"):
            value = getattr(self, name)
            if value is not None and not Path(value).exists():
                raise FileNotFoundError(f"{name}: {value}")
        if self.system == "external_file" and not self.external_outputs_path:
            raise ValueError("external_file system needs external_outputs_path")


@dataclass
class RunArtifact:
    config: dict
    records: list[dict]
    report: metrics.MetricReport
    per_iteration_counts: list[int]
    test_set_hash: str
    output_dir: str
    timing_seconds: float = 0.0  # in-memory only; never written, to keep artifacts byte-stable


def hash_examples(examples: list[DatasetExample]) -> str:
    payload = "\n".join(json.dumps(e.to_dict(), sort_keys=True) for e in examples)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def build_backend(spec: dict) -> RewriterBackend:
    kind = spec.get("kind", "mock")
    if kind == "mock":
        subs = dict(spec.get("substitutions", {}))
        path = spec.get("substitutions_path")
        if path:
            with open(path, encoding="utf-8") as fh:
                subs.update(json.load(fh))
        return mock_backend(subs)
    if kind == "openai":
        kwargs = {
            k: spec[k]
            for k in ("api_key_env", "timeout", "max_in_flight", "temperature", "max_tokens")
            if k in spec
        }
        return OpenAiChatBackend(spec["base_url"], spec["model"], **kwargs)
    raise ValueError(f"unknown backend kind: {kind!r}")


class HttpExternalScorer:
    """Wire hook for trained scorers (e.g. COMET): posts the full corpus triple."""

    def __init__(self, url: str, timeout: float = 120.0):
        self.url = url
        self._client = httpx.Client(timeout=timeout)

    def __call__(self, sources: list[str], hypotheses: list[str], references: list[str]) -> float:
        resp = self._client.post(
            self.url,
            json={"sources": sources, "hypotheses": hypotheses, "references": references},
        )
        resp.raise_for_status()
        return float(resp.json()["score"])


def _simplify_record(cfg, example, lex, backend, i) -> dict:
    variant, mode = ITERATIVE_SYSTEMS[cfg.system]
    source = example.intermediate if cfg.system not in ("no_intermediate", "no_intermediate_no_word") else None
    result = controller.simplify(
        example.back_translation,
        source,
        lex,
        backend,
        target_age=cfg.target_age,
        mode=mode,
        variant=variant,
        max_iterations=cfg.max_iterations,
        feed_history=cfg.feed_history,
    )
    return _record(i, example, result.final_sentence, lex,
                   stop_reason=result.stop_reason.value,
                   iterations=[r.to_dict() for r in result.iterations])


def _direct_record(cfg, example, lex, backend, i) -> dict:
    req = SimplifyRequest(
        translation=example.back_translation,
        target_words=(),
        target_age=cfg.target_age,
        variant=PromptVariant.DIRECT_TRANSLATION,
        source_sentence=example.intermediate,
    )
    try:
        output = rewrite(backend, req)
        note = None
    except BackendError as exc:
        log.warning("sentence %d: direct translation failed (%s); keeping initial", i, exc)
        output = example.back_translation
        note = "backend_failure"
    return _record(i, example, output, lex, note=note)


def _constrained_record(cfg, example, lex, shared_model, i) -> dict:
    bt_tokens = [t.surface for t in tokenize(example.back_translation)]
    model = shared_model or NGramModel.train(
        [example.back_translation], order=cfg.ngram_order, add_k=cfg.ngram_add_k
    )
    found = constrained_beam_search(
        model,
        aoa_constraint(lex, cfg.target_age),
        beam_size=cfg.beam_size,
        max_len=len(bt_tokens) + cfg.max_len_margin,
    )
    # a wordless completion is no translation at all; treat it like a search
    # failure and keep the initial translation as the generated sentence
    if found is None or not any(t.is_word for t in tokenize(" ".join(found))):
        return _record(i, example, example.back_translation, lex, note="generation_failed")
    return _record(i, example, " ".join(found), lex)


def _record(i, example, output, lex, *, stop_reason=None, iterations=(), note=None) -> dict:
    analyzed = annotate(lex, output)
    return {
        "id": i,
        "reference": example.reference,
        "intermediate": example.intermediate,
        "back_translation": example.back_translation,
        "output": output,
        "output_max_aoa": analyzed.max_aoa,
        "output_max_word": None if analyzed.max_token is None else analyzed.max_token.surface,
        "stop_reason": stop_reason,
        "iterations": list(iterations),
        "note": note,
    }


def report_from_outputs(
    outputs: list[str],
    examples: list[DatasetExample],
    lex: AoaLexicon,
    familiar: set[str],
    target_age: float,
    comet: float | None = None,
) -> metrics.MetricReport:
    references = [e.reference for e in examples]
    sources = [e.back_translation for e in examples]
    return metrics.MetricReport(
        n_sentences=len(outputs),
        bleu=metrics.bleu(outputs, references),
        sari=metrics.sari(sources, outputs, [[r] for r in references]),
        fkgl=metrics.fkgl(outputs),
        dale_chall=metrics.dale_chall(outputs, familiar),
        average_aoa=metrics.average_max_aoa(outputs, lex),
        success_rate=metrics.success_rate(outputs, lex, target_age),
        comet=comet,
    )


def run_experiment(
    cfg: ExperimentConfig,
    *,
    backend: RewriterBackend | None = None,
    lexicon: AoaLexicon | None = None,
    comet_scorer=None,
) -> RunArtifact:
    """Run one system over the test set, write artifacts, return the run.

    Artifacts (config.json, records.jsonl, metrics.json) are deterministic:
    identical config and backend behavior produce byte-identical files.
    """
    cfg.validate()
    started = time.monotonic()
    lex = lexicon if lexicon is not None else load_lexicon(cfg.lexicon_path)
    familiar = (
        metrics.load_familiar_words(cfg.familiar_words_path)
        if cfg.familiar_words_path
        else None
    )
    if familiar is None:
        raise ValueError("familiar_words_path is required to compute Dale-Chall")
    examples = read_examples(cfg.test_set_path)
    if not examples:
        raise ValueError(f"empty test set: {cfg.test_set_path}")
    test_set_hash = hash_examples(examples)

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if cfg.system in ITERATIVE_SYSTEMS or cfg.system == "direct_translation":
        if backend is None:
            backend = build_backend(cfg.backend)
        runner = _direct_record if cfg.system == "direct_translation" else _simplify_record
        workers = max(1, min(cfg.jobs, getattr(backend, "max_in_flight", cfg.jobs)))
        try:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                records = list(
                    pool.map(lambda ie: runner(cfg, ie[1], lex, backend, ie[0]), enumerate(examples))
                )
        except BackendError:
            _flush(out_dir, cfg, [], None, [], test_set_hash)
            raise
    elif cfg.system == "initial":
        records = [_record(i, e, e.back_translation, lex) for i, e in enumerate(examples)]
    elif cfg.system == "constrained":
        shared_model = None
        if cfg.ngram_corpus_path:
            corpus = Path(cfg.ngram_corpus_path).read_text(encoding="utf-8").splitlines()
            shared_model = NGramModel.train(
                [s for s in corpus if s.strip()], order=cfg.ngram_order, add_k=cfg.ngram_add_k
            )
        records = [_constrained_record(cfg, e, lex, shared_model, i) for i, e in enumerate(examples)]
    elif cfg.system == "external_file":
        lines = Path(cfg.external_outputs_path).read_text(encoding="utf-8").splitlines()
        if len(lines) != len(examples):
            raise ValueError(
                f"external outputs: {len(lines)} lines for {len(examples)} test sentences"
            )
        records = [_record(i, e, line, lex) for i, (e, line) in enumerate(zip(examples, lines))]
    else:  # pragma: no cover - guarded by validate()
        raise ValueError(cfg.system)

    outputs = [r["output"] for r in records]
    comet = None
    scorer = comet_scorer
    if scorer is None and cfg.comet_endpoint:
        scorer = HttpExternalScorer(cfg.comet_endpoint)
    if scorer is not None:
        comet = scorer(
            [e.intermediate for e in examples], outputs, [e.reference for e in examples]
        )
    report = report_from_outputs(outputs, examples, lex, familiar, cfg.target_age, comet)
    per_iteration = _per_iteration_counts(cfg.system, records, len(examples))
    _flush(out_dir, cfg, records, report, per_iteration, test_set_hash)

    elapsed = time.monotonic() - started
    log.info("%s over %d sentences in %.2fs -> %s", cfg.system, len(examples), elapsed, out_dir)
    return RunArtifact(
        config=cfg.to_dict(),
        records=records,
        report=report,
        per_iteration_counts=per_iteration,
        test_set_hash=test_set_hash,
        output_dir=str(out_dir),
        timing_seconds=elapsed,
    )


def _per_iteration_counts(system: str, records: list[dict], n: int) -> list[int]:
    if system not in ITERATIVE_SYSTEMS:
        return [n]
    depth = max((len(r["iterations"]) for r in records), default=0)
    return [sum(1 for r in records if len(r["iterations"]) >= k) for k in range(1, depth + 1)] or [0]


def _flush(out_dir: Path, cfg, records, report, per_iteration, test_set_hash) -> None:
    (out_dir / "config.json").write_text(
        json.dumps(cfg.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    with (out_dir / "records.jsonl").open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    payload = {
        "report": None if report is None else report.to_dict(),
        "per_iteration_counts": per_iteration,
        "test_set_hash": test_set_hash,
        "n_records": len(records),
    }
    (out_dir / "metrics.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def load_artifact(output_dir: str | Path) -> RunArtifact:
    out_dir = Path(output_dir)
    config = json.loads((out_dir / "config.json").read_text(encoding="utf-8"))
    with (out_dir / "records.jsonl").open(encoding="utf-8") as fh:
        records = [json.loads(line) for line in fh if line.strip()]
    payload = json.loads((out_dir / "metrics.json").read_text(encoding="utf-8"))
    report = metrics.MetricReport(**payload["report"])
    return RunArtifact(
        config=config,
        records=records,
        report=report,
        per_iteration_counts=payload["per_iteration_counts"],
        test_set_hash=payload["test_set_hash"],
        output_dir=str(out_dir),
    )


# ---------------------------------------------------------------------------
# Distributions and comparisons


@dataclass(frozen=True)
class AoaHistogram:
    bin_width: float
    bins: dict[int, int]  # bin index -> sentence count; lo = index * bin_width
    unrated: int

    @property
    def total(self) -> int:
        return sum(self.bins.values()) + self.unrated

    def rows(self) -> list[tuple[float, float, int]]:
        return [(i * self.bin_width, (i + 1) * self.bin_width, c) for i, c in sorted(self.bins.items())]

    def to_tsv(self) -> str:
        lines = ["bin_start\tcount"]
        lines += [f"{lo:g}\t{count}" for lo, _, count in self.rows()]
        lines.append(f"unrated\t{self.unrated}")
        return "\n".join(lines) + "\n"


def aoa_histogram(texts: list[str], lex: AoaLexicon, bin_width: float = 1.0) -> AoaHistogram:
    """Per-sentence highest-AoA distribution; unrated sentences get their own bucket."""
    if bin_width <= 0:
        raise ValueError("bin_width must be > 0")
    bins: dict[int, int] = {}
    unrated = 0
    for text in texts:
        max_aoa = annotate(lex, text).max_aoa
        if max_aoa is None:
            unrated += 1
        else:
            idx = int(max_aoa // bin_width)
            bins[idx] = bins.get(idx, 0) + 1
    return AoaHistogram(bin_width=bin_width, bins=bins, unrated=unrated)


_METRIC_ROWS = [
    ("n_sentences", "{:d}"),
    ("bleu", "{:.2f}"),
    ("sari", "{:.2f}"),
    ("fkgl", "{:.2f}"),
    ("dale_chall", "{:.2f}"),
    ("average_aoa", "{:.2f}"),
    ("success_rate", "{:.3f}"),
    ("comet", "{:.2f}"),
]


@dataclass(frozen=True)
class ComparisonTable:
    labels: list[str]
    rows: list[tuple[str, list[str]]]

    def to_tsv(self) -> str:
        lines = ["metric\t" + "\t".join(self.labels)]
        lines += [name + "\t" + "\t".join(values) for name, values in self.rows]
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        headers = ["metric"] + self.labels
        table = [headers] + [[name] + values for name, values in self.rows]
        widths = [max(len(row[c]) for row in table) for c in range(len(headers))]
        return "\n".join(
            "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in table
        ) + "\n"


def compare_runs(artifacts: list[RunArtifact]) -> ComparisonTable:
    """One column per run, one row per metric plus per-iteration counts."""
    if not artifacts:
        raise ValueError("no artifacts to compare")
    hashes = {a.test_set_hash for a in artifacts}
    if len(hashes) > 1:
        raise ValueError("test-set mismatch: artifacts were produced from different test sets")
    labels = []
    for a in artifacts:
        label = a.config.get("label") or a.config.get("system", "?")
        while label in labels:
            label += "'"
        labels.append(label)
    rows: list[tuple[str, list[str]]] = []
    for name, fmt in _METRIC_ROWS:
        values = []
        for a in artifacts:
            v = getattr(a.report, name)
            values.append("-" if v is None else fmt.format(v))
        rows.append((name, values))
    rows.append(
        ("iteration_counts", [",".join(str(c) for c in a.per_iteration_counts) for a in artifacts])
    )
    return ComparisonTable(labels=labels, rows=rows)
