"""Top-k precision / recall / F1 of predicted keywords against gold word groups.

Gold labels are per-day groups of words. Detected topics (keyword lists)
are matched one-to-one to gold topics greedily by raw keyword overlap; each
gold topic then contributes one row of metrics, zeros if it went unmatched,
and per-day rows average into the day score. Macro scores are unweighted
means over days.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class GoldTopic:
    label: str
    words: frozenset[str]


@dataclass(frozen=True)
class GoldTopicSet:
    day: date
    topics: tuple[GoldTopic, ...]


@dataclass(frozen=True)
class DayScore:
    day: date
    p: float
    re: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    method: str
    k: int
    per_day: tuple[DayScore, ...]
    macro_p: float
    macro_re: float
    macro_f1: float


def load_gold(path: str | Path) -> list[GoldTopicSet]:
    """Read gold labels: JSON ``[{day, topics: [{label, words: [..]}]}]``."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc.msg})")
    if not isinstance(payload, list):
        raise ParseError(f"{path}: expected a JSON array of day entries")
    out = []
    for i, entry in enumerate(payload):
        try:
            day = date.fromisoformat(entry["day"])
            topics = []
            for t in entry["topics"]:
                words = frozenset(str(w).lower() for w in t["words"])
                if not words:
                    raise ValidationError(f"{path}: gold topic {t.get('label')!r} has no words")
                topics.append(GoldTopic(label=str(t.get("label", "")), words=words))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{path}: bad gold entry {i}: {exc}")
        out.append(GoldTopicSet(day=day, topics=tuple(topics)))
    return sorted(out, key=lambda g: g.day)


def match_predictions(
    predicted: list[list[str]], gold: GoldTopicSet
) -> list[tuple[int, int]]:
    """Greedy one-to-one matching by keyword-overlap count.

    Repeatedly pairs the (predicted, gold) combination with the largest
    overlap; ties prefer the earlier gold topic, then the earlier predicted
    list. Zero-overlap pairs never match. Returns (pred_idx, gold_idx)
    pairs sorted by gold index.
    """
    pred_sets = [set(w.lower() for w in p) for p in predicted]
    overlaps = {}
    for pi, ps in enumerate(pred_sets):
        for gi, gt in enumerate(gold.topics):
            overlaps[(pi, gi)] = len(ps & gt.words)

    matches: list[tuple[int, int]] = []
    free_pred = set(range(len(predicted)))
    free_gold = set(range(len(gold.topics)))
    while free_pred and free_gold:
        best = max(
            ((overlaps[(pi, gi)], -gi, -pi, pi, gi) for pi in free_pred for gi in free_gold),
        )
        count, _, _, pi, gi = best
        if count == 0:
            break
        matches.append((pi, gi))
        free_pred.remove(pi)
        free_gold.remove(gi)
    return sorted(matches, key=lambda m: m[1])


def precision_recall_f1_at_k(
    predicted: list[str], gold_words, k: int = 10
) -> tuple[float, float, float]:
    """P = hits/k, Re = hits/|gold|, F1 their harmonic mean (0 when both 0).

    Hits are exact lowercase token matches over the first min(k, len)
    predictions; the precision denominator stays ``k`` even when fewer
    keywords were produced.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    gold_set = set(str(w).lower() for w in gold_words)
    if not gold_set:
        raise ValueError("gold word set is empty")
    top = [str(w).lower() for w in predicted[:k]]
    hits = len(set(top) & gold_set)
    p = hits / k
    re = hits / len(gold_set)
    f1 = 0.0 if (p + re) == 0.0 else 2.0 * p * re / (p + re)
    return p, re, f1


def score_day(
    predicted: list[list[str]], gold: GoldTopicSet, k: int = 10
) -> tuple[float, float, float]:
    """Average metrics over gold topics; an unmatched gold topic scores zeros."""
    matches = dict((gi, pi) for pi, gi in match_predictions(predicted, gold))
    rows = []
    for gi, topic in enumerate(gold.topics):
        if gi in matches:
            rows.append(precision_recall_f1_at_k(predicted[matches[gi]], topic.words, k))
        else:
            rows.append((0.0, 0.0, 0.0))
    n = len(rows)
    if n == 0:
        return (0.0, 0.0, 0.0)
    return tuple(sum(r[j] for r in rows) / n for j in range(3))


def evaluate_method(
    method: str,
    predictions_by_day: dict[date, list[list[str]]],
    gold_sets: list[GoldTopicSet],
    k: int = 10,
) -> EvalReport:
    """Score one method against every gold day (missing days score zero)."""
    per_day = []
    for gold in gold_sets:
        p, re, f1 = score_day(predictions_by_day.get(gold.day, []), gold, k)
        per_day.append(DayScore(day=gold.day, p=p, re=re, f1=f1))
    n = len(per_day)
    macro = (
        (sum(d.p for d in per_day) / n, sum(d.re for d in per_day) / n,
         sum(d.f1 for d in per_day) / n)
        if n
        else (0.0, 0.0, 0.0)
    )
    return EvalReport(
        method=method, k=k, per_day=tuple(per_day),
        macro_p=macro[0], macro_re=macro[1], macro_f1=macro[2],
    )


def compare_methods(reports: list[EvalReport]) -> list[EvalReport]:
    """Reports sorted by macro F1 descending; ties keep input order."""
    if not reports:
        raise ValueError("need at least one report to compare")
    return sorted(reports, key=lambda r: -r.macro_f1)


def format_comparison(reports: list[EvalReport]) -> str:
    """Aligned text table of macro metrics, best method first."""
    ordered = compare_methods(reports)
    k = ordered[0].k
    width = max(6, max(len(r.method) for r in ordered))
    lines = [f"{'method':<{width}}  {'P@%d' % k:>8}  {'Re@%d' % k:>8}  {'F1@%d' % k:>8}"]
    for r in ordered:
        lines.append(
            f"{r.method:<{width}}  {r.macro_p:8.4f}  {r.macro_re:8.4f}  {r.macro_f1:8.4f}"
        )
    return "\n".join(lines)


def write_report_csv(reports: list[EvalReport], path: str | Path) -> None:
    """CSV rows ``method,day,p,re,f1`` per day plus one macro row per method."""
    ordered = compare_methods(reports)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "day", f"p{ordered[0].k}", f"re{ordered[0].k}", f"f1{ordered[0].k}"])
        for r in ordered:
            for d in r.per_day:
                writer.writerow([r.method, d.day.isoformat(), f"{d.p:.6f}", f"{d.re:.6f}", f"{d.f1:.6f}"])
            writer.writerow([r.method, "macro", f"{r.macro_p:.6f}", f"{r.macro_re:.6f}", f"{r.macro_f1:.6f}"])
