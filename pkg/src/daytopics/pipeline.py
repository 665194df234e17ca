"""End-to-end run orchestration: ingest -> clean -> embed -> cluster -> merge
-> summarize -> export, per day, driven by a flat key=value config.

Every run writes a manifest describing the config snapshot, per-day counts,
artifact paths, and per-stage wall-clock. Given the same config and seed a
rerun reproduces every artifact byte for byte; only the manifest's
``timings`` block varies.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import time
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import densify_for_clustering, lda_fit, lda_topic_keywords, tfidf_fit_transform
from .clustering import kmeans_fit, merge_small, model_export_dict, top_clusters
from .corpus import (
    DayPartition,
    Sentence,
    clean_corpus,
    index_sentences,
    ingest,
    partition_by_day,
    write_frequencies_csv,
    write_sentences_tsv,
)
from .encoders import EmbeddingMatrix, EncoderSpec, encode_sentences, load_external
from .errors import ConfigError, DaytopicsError, StageError
from .evaluation import (
    compare_methods,
    evaluate_method,
    format_comparison,
    load_gold,
    write_report_csv,
)
from .hashing import derive_seed
from .projection import drop_outliers, pca_2d, write_projection_tsv
from .stopwords import ENGLISH_STOPWORDS, load_stoplist
from .summarizer import build_graph, extract_keywords, summarize_cluster, textrank

PIPELINE_STAGES = ["ingest", "clean", "partition", "embed", "cluster", "merge", "summarize", "export"]
LDA_STAGES = ["ingest", "clean", "partition", "lda", "summarize", "export"]


@dataclass
class RunConfig:
    """Run parameters; the defaults reproduce the reference hyperparameters
    (k=30, max_iter=300, dim=512, word_cap=20, metrics at 10)."""

    input: str = ""
    format: str = "jsonl"
    encoder: str = "builtin"  # builtin | external
    embeddings: str = ""
    dim: int = 512
    ngram_orders: tuple[int, ...] = (1, 2)
    k: int = 30
    max_iter: int = 300
    tol: float = 1e-4
    min_size: int = 0  # 0 -> max(5, 0.5% of the day's sentences)
    word_cap: int = 20
    top_clusters: int = 5
    metric_k: int = 10
    keywords: int = 10
    seed: int = 0
    out: str = "out"
    stoplist: str = ""
    sample: float = 0.0  # 0 -> disabled
    days: str = ""  # "YYYY-MM-DD..YYYY-MM-DD"
    edge_floor: float = 0.05
    damping: float = 0.85
    outlier_z: float = 3.0  # 0 -> keep all points in projections
    gold: str = ""
    dedup_days: bool = False
    lda_topics: int = 30
    lda_alpha: float = 0.0  # 0 -> 50 / lda_topics
    lda_beta: float = 0.01
    lda_sweeps: int = 500

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["ngram_orders"] = list(self.ngram_orders)
        return out

    def effective_min_size(self, day_sentences: int) -> int:
        if self.min_size > 0:
            return self.min_size
        return max(5, day_sentences // 200)


_BOOL_VALUES = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


def _coerce(name: str, raw: str, kind):
    raw = raw.strip()
    try:
        if kind is bool:
            if raw.lower() not in _BOOL_VALUES:
                raise ValueError(raw)
            return _BOOL_VALUES[raw.lower()]
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is str:
            return raw
        if name == "ngram_orders":
            return tuple(int(p) for p in raw.replace(" ", "").split(",") if p)
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for config key {name!r}")
    raise ConfigError(f"unsupported config key type for {name!r}")


def parse_config(path: str | Path) -> RunConfig:
    """Parse the flat ``key = value`` config format; unknown keys are errors."""
    fields = {f.name: f.type for f in dataclasses.fields(RunConfig)}
    kinds = {
        "input": str, "format": str, "encoder": str, "embeddings": str, "dim": int,
        "ngram_orders": tuple, "k": int, "max_iter": int, "tol": float, "min_size": int,
        "word_cap": int, "top_clusters": int, "metric_k": int, "keywords": int,
        "seed": int, "out": str, "stoplist": str, "sample": float, "days": str,
        "edge_floor": float, "damping": float, "outlier_z": float, "gold": str,
        "dedup_days": bool,
        "lda_topics": int, "lda_alpha": float, "lda_beta": float, "lda_sweeps": int,
    }
    assert set(kinds) == set(fields)
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected key = value, got {line.strip()!r}")
            key, raw = (part.strip() for part in stripped.split("=", 1))
            if key not in kinds:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = _coerce(key, raw, kinds[key])
    return RunConfig(**values)


@dataclass
class RunManifest:
    tool_version: str
    method: str
    config: dict
    stages: list[str]
    days: list[dict] = field(default_factory=list)
    artifacts: dict[str, str] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    partial: bool = False
    failed_stage: str = ""

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def write(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")


def reservoir_sample(items: list, fraction: float, seed: int) -> list:
    """Seeded Algorithm-R reservoir sample of ``floor(fraction * n)`` items
    (at least one when the input is non-empty), returned in input order."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"sample fraction must be in (0, 1], got {fraction}")
    n = len(items)
    if n == 0:
        return []
    k = min(n, max(1, int(fraction * n)))
    rng = np.random.default_rng(derive_seed(seed, "sample"))
    reservoir = list(range(k))
    for i in range(k, n):
        j = int(rng.integers(0, i + 1))
        if j < k:
            reservoir[j] = i
    return [items[i] for i in sorted(reservoir)]


def _parse_days(spec: str) -> tuple[date, date]:
    try:
        lo, hi = spec.split("..", 1)
        start, end = date.fromisoformat(lo), date.fromisoformat(hi)
    except ValueError:
        raise ConfigError(f"bad days range {spec!r}, expected YYYY-MM-DD..YYYY-MM-DD")
    if start > end:
        raise ConfigError(f"days range {spec!r} is reversed")
    return start, end


class _Timer:
    def __init__(self):
        self.totals: dict[str, float] = {}

    def add(self, stage: str, t0: float) -> None:
        self.totals[stage] = self.totals.get(stage, 0.0) + (time.perf_counter() - t0)


def _load_stoplist(config: RunConfig):
    return load_stoplist(config.stoplist) if config.stoplist else ENGLISH_STOPWORDS


def _guard(stage: str, day, fn):
    try:
        return fn()
    except DaytopicsError:
        raise
    except Exception as exc:
        raise StageError(stage, day, str(exc))


def _prepare(config: RunConfig, timer: _Timer):
    if not config.input:
        raise ConfigError("config has no input path")
    t0 = time.perf_counter()
    tweets = _guard("ingest", "-", lambda: ingest(config.input, config.format))
    if config.sample:
        tweets = reservoir_sample(tweets, config.sample, config.seed)
    timer.add("ingest", t0)

    t0 = time.perf_counter()
    sentences = _guard("clean", "-", lambda: clean_corpus(tweets))
    index = index_sentences(sentences)
    timer.add("clean", t0)

    t0 = time.perf_counter()
    partitions = partition_by_day(sentences)
    if config.days:
        start, end = _parse_days(config.days)
        partitions = [p for p in partitions if start <= p.day <= end]
    timer.add("partition", t0)
    return tweets, sentences, index, partitions


def _day_sentences(partition: DayPartition, index) -> list[Sentence]:
    return [index[key] for key in partition.sentence_ids]


def _write_tfidf_vocab_csv(tfidf, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["term", "index", "idf"])
        for term, col in tfidf.vocab.items():
            writer.writerow([term, col, f"{tfidf.idf[col]:.6f}"])


def _embed_day(
    config: RunConfig,
    method: str,
    day: date,
    sentences: list[Sentence],
    external: EmbeddingMatrix | None,
    out_dir: Path | None = None,
    manifest: RunManifest | None = None,
) -> EmbeddingMatrix:
    if method == "tfidf":
        tfidf = tfidf_fit_transform(sentences)
        if out_dir is not None:
            (out_dir / "vocab").mkdir(exist_ok=True)
            vocab_path = out_dir / "vocab" / f"{day.isoformat()}.csv"
            _write_tfidf_vocab_csv(tfidf, vocab_path)
            manifest.artifacts[f"vocab/{day.isoformat()}"] = str(vocab_path.relative_to(out_dir))
        matrix, _ = densify_for_clustering(tfidf, tuple(s.key for s in sentences), config.dim)
        return matrix
    if method == "external":
        positions = {key: i for i, key in enumerate(external.ids)}
        missing = [s.sentence_id for s in sentences if s.key not in positions]
        if missing:
            raise StageError("embed", day, f"embedding file lacks ids: {missing[:3]}...")
        return external.take([positions[s.key] for s in sentences])
    spec = EncoderSpec(
        kind="builtin_hash", dim=config.dim, seed=config.seed,
        ngram_orders=tuple(config.ngram_orders),
    )
    return encode_sentences(sentences, spec)


def _summarize_day(
    config: RunConfig,
    day: date,
    sentences: list[Sentence],
    matrix: EmbeddingMatrix,
    model,
    stoplist,
) -> list:
    summaries = []
    for cluster in top_clusters(model, config.top_clusters):
        member_idx = np.where(model.assignments == cluster)[0]
        if member_idx.size == 0:
            continue
        members = [sentences[i] for i in member_idx]
        graph = build_graph(matrix.rows[member_idx].astype(np.float64), config.edge_floor)
        ranks = textrank(graph, d=config.damping)
        summary = summarize_cluster(members, ranks, config.word_cap, day, int(cluster))
        keywords = extract_keywords(members, ranks, stoplist, config.keywords)
        summaries.append(dataclasses.replace(summary, keywords=tuple(keywords)))
    return summaries


def _write_summaries(summaries: list, path: Path) -> None:
    payload = [s.to_dict() for s in summaries]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _evaluate_inline(config: RunConfig, method: str, summaries: list, out_dir: Path, manifest) -> None:
    gold_sets = load_gold(config.gold)
    by_day: dict[date, list[list[str]]] = {}
    for s in summaries:
        by_day.setdefault(s.day, []).append(list(s.keywords))
    report = evaluate_method(method, by_day, gold_sets, config.metric_k)
    write_report_csv([report], out_dir / "eval.csv")
    manifest.artifacts["eval"] = "eval.csv"


def run_pipeline(config: RunConfig, method: str | None = None) -> RunManifest:
    """Execute the full per-day pipeline and write all artifacts.

    ``method`` defaults to the configured encoder ("builtin" or
    "external"); :func:`run_baseline` passes "tfidf" to reuse this engine
    with a swapped representation.
    """
    if method is None:
        method = config.encoder
    if method not in ("builtin", "external", "tfidf"):
        raise ConfigError(f"unknown pipeline method {method!r}")
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    timer = _Timer()
    manifest = RunManifest(
        tool_version=__version__, method=method, config=config.to_dict(),
        stages=list(PIPELINE_STAGES),
    )
    try:
        _run_pipeline_inner(config, method, out_dir, timer, manifest)
    except DaytopicsError as exc:
        manifest.partial = True
        manifest.failed_stage = exc.stage if isinstance(exc, StageError) else "config"
        manifest.timings = timer.totals
        manifest.write(out_dir / "manifest.json")
        raise
    _check_artifacts(manifest, out_dir)
    manifest.timings = timer.totals
    manifest.write(out_dir / "manifest.json")
    return manifest


def _check_artifacts(manifest: RunManifest, out_dir: Path) -> None:
    missing = [rel for rel in manifest.artifacts.values() if not (out_dir / rel).exists()]
    if missing:
        raise StageError("export", "-", f"manifest lists missing artifacts: {missing}")


def _run_pipeline_inner(config, method, out_dir, timer, manifest):
    stoplist = _load_stoplist(config)
    tweets, sentences, index, partitions = _prepare(config, timer)

    external = None
    if method == "external":
        if not config.embeddings:
            raise ConfigError("encoder=external requires an embeddings path")
        external = _guard("embed", "-", lambda: load_external(config.embeddings, config.dim))

    tweets_per_day: dict[date, int] = {}
    for t in tweets:
        tweets_per_day[t.day] = tweets_per_day.get(t.day, 0) + 1

    if not partitions:
        manifest.warnings.append("no retained sentences; nothing to process")

    (out_dir / "clusters").mkdir(exist_ok=True)
    (out_dir / "assignments").mkdir(exist_ok=True)
    (out_dir / "projection").mkdir(exist_ok=True)

    all_summaries = []
    for partition in partitions:
        day = partition.day
        day_sents = _day_sentences(partition, index)

        t0 = time.perf_counter()
        matrix = _guard(
            "embed", day,
            lambda: _embed_day(config, method, day, day_sents, external, out_dir, manifest),
        )
        timer.add("embed", t0)

        t0 = time.perf_counter()
        day_seed = derive_seed(config.seed, day.isoformat())
        model = _guard(
            "cluster", day,
            lambda: kmeans_fit(
                matrix.rows.astype(np.float64), config.k,
                max_iter=config.max_iter, seed=day_seed, tol=config.tol,
            ),
        )
        timer.add("cluster", t0)

        t0 = time.perf_counter()
        min_size = config.effective_min_size(len(day_sents))
        model, plan = _guard(
            "merge", day,
            lambda: merge_small(model, matrix.rows.astype(np.float64), min_size),
        )
        timer.add("merge", t0)

        t0 = time.perf_counter()
        summaries = _guard(
            "summarize", day,
            lambda: _summarize_day(config, day, day_sents, matrix, model, stoplist),
        )
        all_summaries.extend(summaries)
        timer.add("summarize", t0)

        t0 = time.perf_counter()

        def _export_day():
            cluster_path = out_dir / "clusters" / f"{day.isoformat()}.json"
            with open(cluster_path, "w", encoding="utf-8") as fh:
                json.dump(model_export_dict(model, plan, day), fh, sort_keys=True, indent=2)
                fh.write("\n")
            assign_path = out_dir / "assignments" / f"{day.isoformat()}.csv"
            with open(assign_path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["sentence_id", "cluster"])
                for s, label in zip(day_sents, model.assignments):
                    writer.writerow([s.sentence_id, int(label)])
            if len(day_sents) >= 3:
                proj = pca_2d(matrix, model.assignments, seed=config.seed)
                if config.outlier_z > 0:
                    proj = drop_outliers(proj, config.outlier_z)
                proj_path = out_dir / "projection" / f"{day.isoformat()}.tsv"
                write_projection_tsv(day, matrix.sentence_ids, proj, proj_path)
                manifest.artifacts[f"projection/{day.isoformat()}"] = str(
                    proj_path.relative_to(out_dir)
                )
            manifest.artifacts[f"clusters/{day.isoformat()}"] = str(cluster_path.relative_to(out_dir))
            manifest.artifacts[f"assignments/{day.isoformat()}"] = str(assign_path.relative_to(out_dir))

        _guard("export", day, _export_day)
        timer.add("export", t0)

        manifest.days.append(
            {
                "day": day.isoformat(),
                "tweets": tweets_per_day.get(day, 0),
                "sentences": len(day_sents),
                "clusters_before": config.k,
                "clusters_after": plan.survivor_count,
            }
        )

    t0 = time.perf_counter()

    def _export_global():
        write_sentences_tsv(sentences, out_dir / "sentences.tsv")
        write_frequencies_csv(partitions, index, stoplist, out_dir / "frequencies.csv", config.dedup_days)
        _write_summaries(all_summaries, out_dir / "summaries.json")
        manifest.artifacts["sentences"] = "sentences.tsv"
        manifest.artifacts["frequencies"] = "frequencies.csv"
        manifest.artifacts["summaries"] = "summaries.json"

    _guard("export", "-", _export_global)
    if config.gold:
        _guard("export", "-", lambda: _evaluate_inline(config, method, all_summaries, out_dir, manifest))
    timer.add("export", t0)


def run_baseline(config: RunConfig, method: str) -> RunManifest:
    """Run a baseline into a method-tagged subdirectory of the output dir.

    "tfidf" swaps the sentence representation and keeps every downstream
    stage; "lda" derives topic keywords from phi directly and skips
    clustering.
    """
    if method not in ("tfidf", "lda"):
        raise ValueError(f"unknown baseline method {method!r}, expected tfidf or lda")
    tagged = dataclasses.replace(config, out=str(Path(config.out) / method))
    if method == "tfidf":
        return run_pipeline(tagged, method="tfidf")
    return _run_lda(tagged)


def _run_lda(config: RunConfig) -> RunManifest:
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    timer = _Timer()
    manifest = RunManifest(
        tool_version=__version__, method="lda", config=config.to_dict(),
        stages=list(LDA_STAGES),
    )
    try:
        _run_lda_inner(config, out_dir, timer, manifest)
    except DaytopicsError as exc:
        manifest.partial = True
        manifest.failed_stage = exc.stage if isinstance(exc, StageError) else "config"
        manifest.timings = timer.totals
        manifest.write(out_dir / "manifest.json")
        raise
    _check_artifacts(manifest, out_dir)
    manifest.timings = timer.totals
    manifest.write(out_dir / "manifest.json")
    return manifest


def _run_lda_inner(config, out_dir, timer, manifest):
    stoplist = _load_stoplist(config)
    tweets, sentences, index, partitions = _prepare(config, timer)
    tweets_per_day: dict[date, int] = {}
    for t in tweets:
        tweets_per_day[t.day] = tweets_per_day.get(t.day, 0) + 1
    if not partitions:
        manifest.warnings.append("no retained sentences; nothing to process")

    all_records = []
    alpha = config.lda_alpha if config.lda_alpha > 0 else None
    for partition in partitions:
        day = partition.day
        day_sents = _day_sentences(partition, index)
        t0 = time.perf_counter()
        model = _guard(
            "lda", day,
            lambda: lda_fit(
                day_sents, T=config.lda_topics, alpha=alpha, beta=config.lda_beta,
                sweeps=config.lda_sweeps, seed=derive_seed(config.seed, f"lda:{day.isoformat()}"),
            ),
        )
        timer.add("lda", t0)

        t0 = time.perf_counter()
        keyword_lists = _guard("summarize", day, lambda: lda_topic_keywords(model, config.keywords))

        def _export_model():
            (out_dir / "model").mkdir(exist_ok=True)
            payload = {
                "T": model.T,
                "alpha": model.alpha,
                "beta": model.beta,
                "seed": model.seed,
                "sweeps": model.sweeps,
                "topics": [
                    {
                        "keywords": keyword_lists[t],
                        "phi_top": [
                            float(model.phi[t, model.vocab[w]]) for w in keyword_lists[t]
                        ],
                    }
                    for t in range(model.T)
                ],
            }
            model_path = out_dir / "model" / f"{day.isoformat()}.json"
            with open(model_path, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, sort_keys=True, indent=2)
                fh.write("\n")
            manifest.artifacts[f"model/{day.isoformat()}"] = str(model_path.relative_to(out_dir))

        _guard("export", day, _export_model)
        filtered = [
            [t for t in topic if t not in stoplist][: config.keywords] for topic in keyword_lists
        ]
        for topic_idx, topic_keywords in enumerate(filtered):
            all_records.append(
                {
                    "day": day.isoformat(),
                    "cluster": topic_idx,
                    "summary": [],
                    "sentence_ids": [],
                    "word_count": 0,
                    "truncated": False,
                    "keywords": topic_keywords,
                }
            )
        timer.add("summarize", t0)

        manifest.days.append(
            {
                "day": day.isoformat(),
                "tweets": tweets_per_day.get(day, 0),
                "sentences": len(day_sents),
                "clusters_before": config.lda_topics,
                "clusters_after": config.lda_topics,
            }
        )

    t0 = time.perf_counter()

    def _export_global():
        write_sentences_tsv(sentences, out_dir / "sentences.tsv")
        write_frequencies_csv(partitions, index, stoplist, out_dir / "frequencies.csv", config.dedup_days)
        with open(out_dir / "summaries.json", "w", encoding="utf-8") as fh:
            json.dump(all_records, fh, sort_keys=True, indent=2)
            fh.write("\n")
        manifest.artifacts["sentences"] = "sentences.tsv"
        manifest.artifacts["frequencies"] = "frequencies.csv"
        manifest.artifacts["summaries"] = "summaries.json"

    _guard("export", "-", _export_global)
    if config.gold:
        gold_sets = load_gold(config.gold)
        by_day: dict[date, list[list[str]]] = {}
        for record in all_records:
            by_day.setdefault(date.fromisoformat(record["day"]), []).append(record["keywords"])
        report = evaluate_method("lda", by_day, gold_sets, config.metric_k)
        write_report_csv([report], out_dir / "eval.csv")
        manifest.artifacts["eval"] = "eval.csv"
    timer.add("export", t0)


def evaluate_run(manifest_paths: list, gold_path: str | Path, k: int = 10):
    """Score the keyword artifacts of several runs against one gold file.

    Returns the reports sorted by macro F1 (see
    :func:`daytopics.evaluation.compare_methods`).
    """
    gold_sets = load_gold(gold_path)
    reports = []
    for mpath in manifest_paths:
        mpath = Path(mpath)
        with open(mpath, encoding="utf-8") as fh:
            manifest = json.load(fh)
        artifact = manifest.get("artifacts", {}).get("summaries")
        if not artifact:
            raise DaytopicsError(f"{mpath}: manifest lists no summaries artifact")
        summaries_path = mpath.parent / artifact
        if not summaries_path.exists():
            raise DaytopicsError(f"{mpath}: summaries artifact {summaries_path} is missing")
        with open(summaries_path, encoding="utf-8") as fh:
            records = json.load(fh)
        by_day: dict[date, list[list[str]]] = {}
        for record in records:
            by_day.setdefault(date.fromisoformat(record["day"]), []).append(record["keywords"])
        reports.append(evaluate_method(manifest.get("method", "unknown"), by_day, gold_sets, k))
    return compare_methods(reports)


__all__ = [
    "RunConfig",
    "RunManifest",
    "parse_config",
    "reservoir_sample",
    "run_pipeline",
    "run_baseline",
    "evaluate_run",
    "format_comparison",
    "PIPELINE_STAGES",
    "LDA_STAGES",
]
