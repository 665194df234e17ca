"""2-D linear projection of cluster embeddings for external plotting.

Principal directions come from power iteration with deflation on the
sample covariance (ddof=1), started from seed-derived unit vectors, so the
projection is deterministic. Axis signs are fixed by forcing the
largest-magnitude loading positive.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import hashing
from ._validation import as_float_matrix

_POWER_TOL = 1e-9
_POWER_MAX_ITER = 1000


@dataclass(frozen=True)
class Projection2D:
    points: np.ndarray = field(repr=False)
    cluster_of: np.ndarray = field(repr=False)
    explained_variance: tuple[float, float]
    index: tuple[int, ...]  # positions into the projected input

    def __post_init__(self):
        ev = self.explained_variance
        if not (ev[0] >= ev[1] >= 0.0):
            raise ValueError(f"explained variance must be sorted non-negative, got {ev}")
        if self.points.shape[0] != len(self.cluster_of) or self.points.shape[0] != len(self.index):
            raise ValueError("points, cluster_of, and index lengths differ")


def _power_direction(cov: np.ndarray, start: np.ndarray) -> tuple[np.ndarray, float]:
    v = start / np.linalg.norm(start)
    for _ in range(_POWER_MAX_ITER):
        w = cov @ v
        norm = float(np.linalg.norm(w))
        if norm < 1e-30:
            return v, 0.0
        w /= norm
        if float(np.linalg.norm(w - v)) < _POWER_TOL:
            v = w
            break
        v = w
    j = int(np.argmax(np.abs(v)))
    if v[j] < 0:
        v = -v
    return v, float(v @ cov @ v)


def pca_2d(matrix, labels=None, seed: int = 0) -> Projection2D:
    """Project rows onto the top-2 principal directions.

    Accepts an EmbeddingMatrix or a raw 2-D array; needs at least 3 rows.
    ``labels`` tags each point with its cluster for downstream exports.
    """
    rows = getattr(matrix, "rows", matrix)
    X = as_float_matrix(rows)
    n, dim = X.shape
    if n < 3:
        raise ValueError(f"projection needs at least 3 rows, got {n}")
    if labels is None:
        labels = np.zeros(n, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != n:
        raise ValueError(f"{len(labels)} labels for {n} rows")

    centered = X - X.mean(axis=0)
    cov = (centered.T @ centered) / (n - 1)
    v1, lam1 = _power_direction(cov, hashing.unit_vector(seed, "pca:axis0", dim))
    deflated = cov - lam1 * np.outer(v1, v1)
    v2, lam2 = _power_direction(deflated, hashing.unit_vector(seed, "pca:axis1", dim))
    lam1 = max(lam1, 0.0)
    lam2 = min(max(lam2, 0.0), lam1)

    points = centered @ np.stack([v1, v2], axis=1)
    return Projection2D(
        points=points,
        cluster_of=labels,
        explained_variance=(lam1, lam2),
        index=tuple(range(n)),
    )


def drop_outliers(proj: Projection2D, z: float = 3.0) -> Projection2D:
    """Remove points farther than ``z`` standard deviations from their
    cluster's 2-D centroid, per cluster."""
    if z <= 0:
        raise ValueError(f"z must be positive, got {z}")
    keep = np.ones(len(proj.index), dtype=bool)
    for c in np.unique(proj.cluster_of):
        mask = proj.cluster_of == c
        pts = proj.points[mask]
        center = pts.mean(axis=0)
        dists = np.sqrt(((pts - center) ** 2).sum(axis=1))
        sigma = float(dists.std())
        keep[np.where(mask)[0][dists > z * sigma]] = False
    kept = np.where(keep)[0]
    return Projection2D(
        points=proj.points[kept],
        cluster_of=proj.cluster_of[kept],
        explained_variance=proj.explained_variance,
        index=tuple(proj.index[i] for i in kept),
    )


def write_projection_tsv(day, sentence_ids: list[str], proj: Projection2D, path: str | Path) -> None:
    """TSV export: day, sentence_id, x, y, cluster."""
    day_str = day.isoformat() if hasattr(day, "isoformat") else str(day)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t")
        writer.writerow(["day", "sentence_id", "x", "y", "cluster"])
        for row, pos in enumerate(proj.index):
            writer.writerow(
                [
                    day_str,
                    sentence_ids[pos],
                    f"{proj.points[row, 0]:.6f}",
                    f"{proj.points[row, 1]:.6f}",
                    int(proj.cluster_of[row]),
                ]
            )
