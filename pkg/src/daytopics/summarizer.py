"""Cluster summarization: TextRank over an embedding-similarity graph.

Sentences in a cluster become graph nodes; edge weights are clamped dot
products of their embedding rows with small values floored to exact zero.
The damped weighted ranking update is

    score[i] <- (1 - d) + d * sum_j w[j,i] / rowsum[j] * score[j]

iterated from uniform scores of 1.0. Nodes with zero out-weight simply do
not redistribute mass, so an isolated node settles at ``1 - d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date

import numpy as np

from ._validation import as_float_matrix, check_square_weights
from .corpus import Sentence, remove_stopwords

DEFAULT_DAMPING = 0.85
DEFAULT_EDGE_FLOOR = 0.05


@dataclass(frozen=True)
class SimilarityGraph:
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "weights", check_square_weights(self.weights))

    @property
    def n(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class RankVector:
    scores: np.ndarray
    iterations: int
    converged: bool


@dataclass(frozen=True)
class TopicSummary:
    day: date
    cluster: int
    sentences: tuple[tuple[str, str], ...]  # (sentence_id, text) in corpus order
    word_count: int
    truncated: bool
    keywords: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "day": self.day.isoformat(),
            "cluster": self.cluster,
            "summary": [text for _, text in self.sentences],
            "sentence_ids": [sid for sid, _ in self.sentences],
            "word_count": self.word_count,
            "truncated": self.truncated,
            "keywords": list(self.keywords),
        }


def build_graph(rows, floor: float = DEFAULT_EDGE_FLOOR) -> SimilarityGraph:
    """Pairwise clamped dot products with sub-floor weights zeroed out."""
    X = as_float_matrix(rows)
    W = X @ X.T
    W = (W + W.T) * 0.5
    np.fill_diagonal(W, 0.0)
    W = np.maximum(W, 0.0)
    W[W < floor] = 0.0
    return SimilarityGraph(weights=W)


def textrank(
    graph: SimilarityGraph,
    d: float = DEFAULT_DAMPING,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> RankVector:
    """Damped weighted ranking from uniform initial scores of 1.0.

    Stops when the max score change drops below ``tol``; ``converged`` is
    False if ``max_iter`` ran out first.
    """
    if not 0.0 < d < 1.0:
        raise ValueError(f"damping must be in (0, 1), got {d}")
    W = graph.weights
    n = graph.n
    rowsum = W.sum(axis=1)
    P = np.zeros_like(W)
    nz = rowsum > 0.0
    P[nz] = W[nz] / rowsum[nz, None]

    scores = np.ones(n, dtype=np.float64)
    iterations = 0
    converged = False
    for _ in range(max_iter):
        iterations += 1
        new_scores = (1.0 - d) + d * (P.T @ scores)
        delta = float(np.max(np.abs(new_scores - scores))) if n else 0.0
        scores = new_scores
        if delta < tol:
            converged = True
            break
    return RankVector(scores=scores, iterations=iterations, converged=converged)


def rank_order(ranks: RankVector) -> list[int]:
    """Node indices by score descending; ties keep original order."""
    scores = ranks.scores
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))


def summarize_cluster(
    sentences: list[Sentence],
    ranks: RankVector,
    word_cap: int,
    day: date,
    cluster: int,
) -> TopicSummary:
    """Greedy rank-descending selection under the cumulative word cap.

    A sentence that would overflow the cap is skipped and shorter candidates
    are still considered. If nothing fits, the top-ranked sentence is
    emitted alone, truncated to ``word_cap`` tokens and flagged.
    """
    if word_cap < 1:
        raise ValueError(f"word_cap must be >= 1, got {word_cap}")
    if len(sentences) != len(ranks.scores):
        raise ValueError(f"{len(sentences)} sentences for {len(ranks.scores)} scores")

    order = rank_order(ranks)
    chosen: list[int] = []
    total = 0
    for i in order:
        length = len(sentences[i].tokens)
        if total + length <= word_cap:
            chosen.append(i)
            total += length

    if chosen:
        chosen.sort()
        picked = tuple((sentences[i].sentence_id, sentences[i].raw) for i in chosen)
        return TopicSummary(
            day=day, cluster=cluster, sentences=picked,
            word_count=total, truncated=False, keywords=(),
        )

    top = sentences[order[0]]
    truncated_text = " ".join(top.tokens[:word_cap])
    return TopicSummary(
        day=day, cluster=cluster,
        sentences=((top.sentence_id, truncated_text),),
        word_count=word_cap, truncated=True, keywords=(),
    )


def extract_keywords(
    sentences: list[Sentence],
    ranks: RankVector,
    stoplist,
    top_n: int = 10,
) -> list[str]:
    """Rank-weighted term scoring.

    score(t) = (sum of scores of sentences containing t) * ln(1 + tf) over
    non-stopword tokens, where tf is the raw count across the cluster.
    Ties break lexicographically.
    """
    if top_n < 1:
        raise ValueError(f"top_n must be >= 1, got {top_n}")
    rank_sum: dict[str, float] = {}
    tf: dict[str, int] = {}
    for sentence, score in zip(sentences, ranks.scores):
        kept = remove_stopwords(sentence.tokens, stoplist)
        for token in kept:
            tf[token] = tf.get(token, 0) + 1
        for token in set(kept):
            rank_sum[token] = rank_sum.get(token, 0.0) + float(score)

    scored = [(token, rank_sum[token] * np.log1p(tf[token])) for token in rank_sum]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return [token for token, _ in scored[:top_n]]
