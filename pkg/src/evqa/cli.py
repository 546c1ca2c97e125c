"""Batch command-line front end.

Artifacts go to files or stdout; progress goes to stderr. Outputs follow
manifest order, never completion order, so re-runs and different worker
counts produce byte-identical files. Exit codes: 0 success, 1 validation
error, 2 I/O or configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import correlation, filtering, keywords, scoring
from .container import read_container, validate_container
from .errors import ConfigError, EvqaError
from .sampling import DEFAULT_INTERVAL, SamplerConfig

log = logging.getLogger("evqa")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2


def _add_scoring_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--interval", type=int, default=DEFAULT_INTERVAL,
                   help="frame sampling interval (default 30)")
    p.add_argument("--mode", choices=["caption", "qa"], default=None,
                   help="restrict scoring to one text kind (default: all)")
    p.add_argument("--jobs", type=int, default=1, help="scoring worker count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evqa",
        description="Reference-free quality scoring for video-caption and video-QA data. "
        "Scores are raw cosines and may be negative.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score every item; emit one JSON record per line")
    p.add_argument("--container", required=True)
    _add_scoring_flags(p)
    p.add_argument("--out", default=None, help="output JSONL path (default stdout)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval-corr", help="rank correlations against human ratings")
    p.add_argument("--pairs", default=None,
                   help="JSONL of {id, metric_score, human_score}")
    p.add_argument("--scores", default=None, help="score JSONL from the score command")
    p.add_argument("--container", default=None,
                   help="container whose manifest carries human_scores (with --scores)")
    p.add_argument("--key", choices=filtering.SCORE_KEYS, default="combined")
    p.add_argument("--out", default=None, help="report JSON path (default stdout)")
    p.set_defaults(func=cmd_eval_corr)

    p = sub.add_parser("filter", help="select the top fraction and report composition")
    p.add_argument("--container", required=True)
    p.add_argument("--fraction", type=float, required=True)
    p.add_argument("--key", choices=filtering.SCORE_KEYS, default="combined")
    p.add_argument("--scores", default=None,
                   help="reuse a score JSONL instead of scoring in-process")
    _add_scoring_flags(p)
    p.add_argument("--out-dir", required=True,
                   help="directory for filter_report.json and selected_ids.txt")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("make-noisy", help="append noisy QA twins (answer -> its keywords)")
    p.add_argument("--container", required=True)
    p.add_argument("--out", required=True, help="path of the augmented container")
    p.add_argument("--keyword-source", choices=["llm", "fallback"], default="fallback")
    p.add_argument("--model-tag", default="default", help="model name sent to the LLM service")
    p.add_argument("--prompt-file", default=None, help="extraction prompt template override")
    p.add_argument("--cache", default=None,
                   help="keyword cache JSONL (default: alongside the container)")
    p.add_argument("--texts-out", default=None,
                   help="also dump texts in the extraction toolkit input schema")
    p.set_defaults(func=cmd_make_noisy)

    p = sub.add_parser("validate", help="check every container invariant")
    p.add_argument("--container", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_records(args) -> list[scoring.ScoreRecord]:
    if args.scores:
        with open(args.scores, encoding="utf-8") as fh:
            return scoring.read_records(fh)
    reader = read_container(args.container)
    cfg = SamplerConfig(interval=args.interval)
    return scoring.score_container(reader, cfg, mode=args.mode, jobs=args.jobs)


def cmd_score(args) -> int:
    reader = read_container(args.container)
    cfg = SamplerConfig(interval=args.interval)
    records = scoring.score_container(reader, cfg, mode=args.mode, jobs=args.jobs)
    lines = "".join(rec.to_json_line() + "\n" for rec in records)
    _write_text(args.out, lines)
    log.info("scored %d items from %s", len(records), args.container)
    return EXIT_OK


def cmd_eval_corr(args) -> int:
    if (args.pairs is None) == (args.scores is None):
        raise ConfigError("eval-corr needs exactly one of --pairs or --scores")
    try:
        if args.pairs:
            with open(args.pairs, encoding="utf-8") as fh:
                series = correlation.series_from_pairs_jsonl(fh)
        else:
            if not args.container:
                raise ConfigError("--scores requires --container for human ratings")
            with open(args.scores, encoding="utf-8") as fh:
                records = scoring.read_records(fh)
            manifest = read_container(args.container).manifest
            if not manifest.human_scores:
                raise EvqaError(f"container {args.container} carries no human_scores")
            series = correlation.series_from_records(records, args.key, manifest.human_scores)
    except ValueError as exc:  # unusable rated-pair data
        raise EvqaError(str(exc)) from exc
    report = correlation.evaluate(series)
    _write_text(args.out, json.dumps(report, indent=2) + "\n")
    log.info("correlations over %d pairs", report["n"])
    return EXIT_OK


def cmd_filter(args) -> int:
    records = _load_records(args)
    manifest = read_container(args.container).manifest
    tags = {item.id: item.source_tag for item in manifest.items}
    report = filtering.select_top(records, args.fraction, args.key, tags)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    filtering.write_selection(report, out_dir / "filter_report.json", out_dir / "selected_ids.txt")
    log.info("selected %d of %d records into %s", report.total_selected, len(records), out_dir)
    return EXIT_OK


def cmd_make_noisy(args) -> int:
    reader = read_container(args.container)
    prompt = None
    if args.prompt_file:
        prompt = Path(args.prompt_file).read_text(encoding="utf-8")
    cache_path = args.cache or (Path(args.container) / "keyword_cache.jsonl")
    source = keywords.source_from_env(
        args.keyword_source, cache_path=cache_path, prompt=prompt, model_tag=args.model_tag
    )
    manifest = filtering.make_noisy_container(reader, args.out, source)
    if args.texts_out:
        with open(args.texts_out, "w", encoding="utf-8") as fh:
            filtering.export_texts_jsonl(manifest, fh)
    added = len(manifest.items) - len(reader.manifest.items)
    log.info("wrote %s with %d noisy twins appended", args.out, added)
    return EXIT_OK


def cmd_validate(args) -> int:
    issues = validate_container(args.container)
    if issues:
        for issue in issues:
            print(issue)
        print(f"INVALID: {len(issues)} problem(s) in {args.container}")
        return EXIT_VALIDATION
    reader = read_container(args.container)
    n_blocks = len(reader.manifest.block_names())
    print(f"OK: {len(reader.manifest.items)} item(s), {n_blocks} block(s) in {args.container}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError) as exc:
        # ValueError covers bad flag values (e.g. --interval 0)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EvqaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
