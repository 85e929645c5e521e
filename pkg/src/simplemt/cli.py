"""Subcommand front door. stdout carries machine-readable payloads only;
human logging goes to stderr so commands compose in pipelines."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import controller, evalharness, metrics
from .dataset import (
    IdentityMtClient,
    ScriptedMtClient,
    build_examples,
    filter_pairs,
    read_examples,
    select_target_age,
    split,
    write_examples,
)
from .evalharness import ExperimentConfig, aoa_histogram, compare_runs, load_artifact, run_experiment
from .lexicon import load_lexicon
from .rewriter import BackendError, PromptVariant
from .service import create_app
from .textproc import WordNotFound

log = logging.getLogger("simplemt")

ENV_PREFIX = "SIMPLEMT_"
# flags > environment > config file; every key here may come from any layer
CONFIG_KEYS = {"lexicon", "familiar", "age", "max_iterations", "jobs", "backend", "subs", "seed"}


def _merged_config(args: argparse.Namespace) -> dict:
    merged: dict = {}
    config_path = getattr(args, "config", None)
    if config_path:
        with open(config_path, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        unknown = sorted(set(file_cfg) - CONFIG_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        merged.update(file_cfg)
    for key in CONFIG_KEYS:
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            merged[key] = env
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    log.info("resolved config: %s", json.dumps(merged, sort_keys=True, default=str))
    return merged


def _emit(payload) -> None:
    json.dump(payload, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")


def _load_backend(cfg: dict):
    kind = cfg.get("backend", "mock")
    if kind == "mock":
        subs = {}
        subs_path = cfg.get("subs")
        if subs_path:
            with open(subs_path, encoding="utf-8") as fh:
                subs = json.load(fh)
        return evalharness.build_backend({"kind": "mock", "substitutions": subs})
    if kind.startswith("http"):
        model = cfg.get("model", "gpt-3.5-turbo")
        return evalharness.build_backend({"kind": "openai", "base_url": kind, "model": model})
    raise ValueError(f"unknown backend {kind!r} (use 'mock' or a base URL)")


def cmd_analyze(args) -> int:
    cfg = _merged_config(args)
    lex = load_lexicon(cfg["lexicon"])
    age = float(cfg.get("age", 10.0))
    from .service import analysis_payload

    _emit(analysis_payload(lex, args.text, age))
    return 0


def cmd_simplify(args) -> int:
    cfg = _merged_config(args)
    lex = load_lexicon(cfg["lexicon"])
    backend = _load_backend(cfg)
    age = float(cfg.get("age", 10.0))
    if args.words:
        result = controller.simplify_user(args.text, args.source, args.words, lex, backend, target_age=age)
    else:
        result = controller.simplify(
            args.text,
            args.source,
            lex,
            backend,
            target_age=age,
            mode=args.mode,
            variant=PromptVariant(args.variant),
            max_iterations=int(cfg.get("max_iterations", 5)),
        )
    _emit(result.to_dict())
    return 0


def cmd_dataset_build(args) -> int:
    cfg = _merged_config(args)
    lex = load_lexicon(cfg["lexicon"])

    def client(path, direction):
        if not path:
            return IdentityMtClient(direction=direction)
        with open(path, encoding="utf-8") as fh:
            return ScriptedMtClient(json.load(fh), direction=direction)

    corpus = Path(args.corpus).read_text(encoding="utf-8").splitlines()
    examples = build_examples(
        corpus,
        client(args.fwd_map, "fwd"),
        client(args.bwd_map, "bwd"),
        lex,
        jobs=int(cfg.get("jobs", 1)),
        checkpoint_path=args.checkpoint,
    )
    write_examples(args.out, examples)
    _emit({"built": len(examples), "out": args.out})
    return 0


def cmd_dataset_filter(args) -> int:
    examples = read_examples(args.input)
    kept = filter_pairs(examples, args.threshold)
    write_examples(args.out, kept)
    _emit({"kept": len(kept), "dropped": len(examples) - len(kept), "out": args.out})
    return 0


def cmd_dataset_split(args) -> int:
    cfg = _merged_config(args)
    examples = read_examples(args.input)
    result = split(examples, int(cfg.get("seed", 0)))
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name in ("train", "dev", "test"):
        write_examples(outdir / f"{name}.jsonl", getattr(result, name))
    _emit({"train": len(result.train), "dev": len(result.dev), "test": len(result.test)})
    return 0


def cmd_dataset_select(args) -> int:
    cfg = _merged_config(args)
    examples = read_examples(args.input)
    kept = select_target_age(examples, float(cfg.get("age", 10.0)))
    write_examples(args.out, kept)
    _emit({"kept": len(kept), "dropped": len(examples) - len(kept), "out": args.out})
    return 0


def cmd_eval_run(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    artifact = run_experiment(cfg)
    _emit(
        {
            "output_dir": artifact.output_dir,
            "report": artifact.report.to_dict(),
            "per_iteration_counts": artifact.per_iteration_counts,
            "test_set_hash": artifact.test_set_hash,
        }
    )
    return 0


def cmd_eval_compare(args) -> int:
    artifacts = [load_artifact(d) for d in args.dirs]
    table = compare_runs(artifacts)
    if args.format == "tsv":
        sys.stdout.write(table.to_tsv())
    else:
        sys.stdout.write(table.to_text())
    return 0


def cmd_eval_hist(args) -> int:
    cfg = _merged_config(args)
    lex = load_lexicon(cfg["lexicon"])
    texts = Path(args.input).read_text(encoding="utf-8").splitlines()
    hist = aoa_histogram([t for t in texts if t.strip()], lex, bin_width=args.bin_width)
    if args.out:
        Path(args.out).write_text(hist.to_tsv(), encoding="utf-8")
        log.info("histogram written to %s", args.out)
    sys.stdout.write(hist.to_tsv())
    return 0


def cmd_serve(args) -> int:
    cfg = _merged_config(args)
    lex = load_lexicon(cfg["lexicon"])
    backend = _load_backend(cfg)
    app = create_app(
        lex,
        backend,
        default_target_age=float(cfg.get("age", 10.0)),
        max_iterations=int(cfg.get("max_iterations", 5)),
        ui_origin=args.ui_origin,
    )
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file (flags override it)")
    parser.add_argument("--lexicon", help="AoA lexicon CSV path")
    parser.add_argument("--age", type=float, default=None, help="target age in years")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simplemt")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="tokenize and rate a sentence")
    _add_common(p)
    p.add_argument("--text", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simplify", help="run the iterative simplification loop")
    _add_common(p)
    p.add_argument("--text", required=True, help="translation to post-edit")
    p.add_argument("--source", help="source (intermediate) sentence")
    p.add_argument("--mode", choices=["single", "multi"], default="single")
    p.add_argument("--variant", choices=[v.value for v in PromptVariant], default="proposed")
    p.add_argument("--max-iterations", dest="max_iterations", type=int, default=None)
    p.add_argument("--backend", help="'mock' or an OpenAI-compatible base URL")
    p.add_argument("--subs", help="JSON substitution table for the mock backend")
    p.add_argument("--words", nargs="*", default=None, help="user-specified words to rewrite")
    p.set_defaults(func=cmd_simplify)

    pd = sub.add_parser("dataset", help="benchmark factory")
    dsub = pd.add_subparsers(dest="dataset_command", required=True)

    p = dsub.add_parser("build", help="back-translate a corpus into examples")
    _add_common(p)
    p.add_argument("--corpus", required=True, help="one sentence per line")
    p.add_argument("--out", required=True)
    p.add_argument("--fwd-map", help="JSON sentence map for the forward MT stub")
    p.add_argument("--bwd-map", help="JSON sentence map for the backward MT stub")
    p.add_argument("--checkpoint", help="JSONL checkpoint for resumable runs")
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(func=cmd_dataset_build)

    p = dsub.add_parser("filter", help="keep pairs with AoA diff above threshold")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(func=cmd_dataset_filter)

    p = dsub.add_parser("split", help="8:1:1 train/dev/test split")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--outdir", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config")
    p.set_defaults(func=cmd_dataset_split)

    p = dsub.add_parser("select", help="target-age test-set selection")
    _add_common(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dataset_select)

    pe = sub.add_parser("eval", help="experiments and reports")
    esub = pe.add_subparsers(dest="eval_command", required=True)

    p = esub.add_parser("run", help="run one experiment from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_eval_run)

    p = esub.add_parser("compare", help="side-by-side table of run artifacts")
    p.add_argument("dirs", nargs="+", help="run output directories")
    p.add_argument("--format", choices=["text", "tsv"], default="text")
    p.set_defaults(func=cmd_eval_compare)

    p = esub.add_parser("hist", help="highest-AoA histogram of a text file")
    _add_common(p)
    p.add_argument("--in", dest="input", required=True, help="one sentence per line")
    p.add_argument("--bin-width", type=float, default=1.0)
    p.add_argument("--out", help="write TSV here as well")
    p.set_defaults(func=cmd_eval_hist)

    p = sub.add_parser("serve", help="start the HTTP API")
    _add_common(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8707)
    p.add_argument("--backend", help="'mock' or an OpenAI-compatible base URL")
    p.add_argument("--subs", help="JSON substitution table for the mock backend")
    p.add_argument("--ui-origin", help="CORS origin for the web UI")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, WordNotFound, BackendError, RuntimeError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
