"""Command-line entry points.

Subcommands: ingest, run, baseline, eval, report, project. Values come
from defaults, then an optional ``--config`` file, then explicit flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .corpus import clean_corpus, index_sentences, ingest, partition_by_day, write_frequencies_csv, write_sentences_tsv
from .errors import DaytopicsError
from .pipeline import (
    RunConfig,
    evaluate_run,
    parse_config,
    reservoir_sample,
    run_baseline,
    run_pipeline,
)
from .evaluation import format_comparison, write_report_csv
from .stopwords import ENGLISH_STOPWORDS, load_stoplist


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="path to a key = value run config file")
    parser.add_argument("--input", help="input tweets file")
    parser.add_argument("--format", choices=["jsonl", "csv"], help="input format")
    parser.add_argument("--seed", type=int, help="global random seed")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--days", help="inclusive day range YYYY-MM-DD..YYYY-MM-DD")
    parser.add_argument("--sample", type=float, help="seeded reservoir-sample fraction in (0, 1]")


_COMMON_KEYS = ("input", "format", "seed", "out", "days", "sample")


def _build_config(args: argparse.Namespace, extra: dict | None = None) -> RunConfig:
    config = parse_config(args.config) if getattr(args, "config", None) else RunConfig()
    overrides = {}
    for key in _COMMON_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    overrides.update(extra or {})
    return dataclasses.replace(config, **overrides)


def _cmd_ingest(args) -> int:
    config = _build_config(args)
    tweets = ingest(config.input, config.format)
    if config.sample:
        tweets = reservoir_sample(tweets, config.sample, config.seed)
    sentences = clean_corpus(tweets)
    partitions = partition_by_day(sentences)
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_sentences_tsv(sentences, out_dir / "sentences.tsv")
    print(f"tweets: {len(tweets)}")
    print(f"retained sentences: {len(sentences)}")
    print(f"days: {len(partitions)}")
    print(f"wrote {out_dir / 'sentences.tsv'}")
    return 0


def _cmd_run(args) -> int:
    extra = {}
    if args.encoder:
        extra["encoder"] = args.encoder
    if args.embeddings:
        extra["embeddings"] = args.embeddings
    if args.gold:
        extra["gold"] = args.gold
    config = _build_config(args, extra)
    manifest = run_pipeline(config)
    print(f"method: {manifest.method}")
    print(f"days processed: {len(manifest.days)}")
    for warning in manifest.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"manifest: {Path(config.out) / 'manifest.json'}")
    return 0


def _cmd_baseline(args) -> int:
    extra = {"gold": args.gold} if args.gold else {}
    config = _build_config(args, extra)
    manifest = run_baseline(config, args.method)
    print(f"method: {manifest.method}")
    print(f"days processed: {len(manifest.days)}")
    print(f"manifest: {Path(config.out) / args.method / 'manifest.json'}")
    return 0


def _cmd_eval(args) -> int:
    reports = evaluate_run(args.manifests, args.gold, args.k)
    print(format_comparison(reports))
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_report_csv(reports, out_dir / "comparison.csv")
        print(f"wrote {out_dir / 'comparison.csv'}")
    return 0


def _cmd_report(args) -> int:
    config = _build_config(args, {"dedup_days": args.dedup} if args.dedup else {})
    tweets = ingest(config.input, config.format)
    if config.sample:
        tweets = reservoir_sample(tweets, config.sample, config.seed)
    sentences = clean_corpus(tweets)
    index = index_sentences(sentences)
    partitions = partition_by_day(sentences)
    stoplist = load_stoplist(config.stoplist) if config.stoplist else ENGLISH_STOPWORDS
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "frequencies.csv"
    write_frequencies_csv(partitions, index, stoplist, path, config.dedup_days)
    print(f"wrote {path}")
    return 0


def _cmd_project(args) -> int:
    # The full run already exports projections; this standalone command just
    # runs the needed stages and keeps only the projection artifacts.
    extra = {}
    if args.encoder:
        extra["encoder"] = args.encoder
    if args.embeddings:
        extra["embeddings"] = args.embeddings
    config = _build_config(args, extra)
    manifest = run_pipeline(config)
    kept = [name for name in manifest.artifacts if name.startswith("projection/")]
    for name in sorted(kept):
        print(f"{Path(config.out) / manifest.artifacts[name]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="daytopics", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="clean tweets and export sentences.tsv")
    _add_common(p)
    p.set_defaults(fn=_cmd_ingest)

    p = sub.add_parser("run", help="run the full topic-detection pipeline")
    _add_common(p)
    p.add_argument("--encoder", choices=["builtin", "external"])
    p.add_argument("--embeddings", help="EMB1 file for encoder=external")
    p.add_argument("--gold", help="gold labels JSON for in-run evaluation")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("baseline", help="run the tfidf or lda baseline pipeline")
    _add_common(p)
    p.add_argument("method", choices=["tfidf", "lda"])
    p.add_argument("--gold", help="gold labels JSON for in-run evaluation")
    p.set_defaults(fn=_cmd_baseline)

    p = sub.add_parser("eval", help="compare methods from run manifests against gold labels")
    p.add_argument("manifests", nargs="+", help="manifest.json paths")
    p.add_argument("--gold", required=True, help="gold labels JSON")
    p.add_argument("--k", type=int, default=10, help="metric cutoff (default 10)")
    p.add_argument("--out", help="directory for comparison.csv")
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("report", help="export per-day word-frequency CSV")
    _add_common(p)
    p.add_argument("--dedup", action="store_true", help="report each token only on its first day")
    p.set_defaults(fn=_cmd_report)

    p = sub.add_parser("project", help="export 2-D projections of per-day clusters")
    _add_common(p)
    p.add_argument("--encoder", choices=["builtin", "external"])
    p.add_argument("--embeddings", help="EMB1 file for encoder=external")
    p.set_defaults(fn=_cmd_project)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except DaytopicsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
