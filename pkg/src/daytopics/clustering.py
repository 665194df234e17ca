"""Seeded k-means++ clustering with small-cluster absorption.

Lloyd assignment uses Euclidean distance; merging compares centroids by dot
product. On unit-norm rows the two induce the same ordering
(``d^2 = 2 - 2 * dot``), so the pipeline stays coherent when both appear.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_float_matrix
from .base import BaseEstimator
from .errors import MergeError

_MONOTONE_SLACK = 1e-9


@dataclass(frozen=True)
class ClusterModel:
    k: int
    centroids: np.ndarray = field(repr=False)
    assignments: np.ndarray = field(repr=False)
    inertia: float
    iterations: int
    seed: int

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k)


@dataclass(frozen=True)
class MergePlan:
    min_size: int
    mapping: dict[int, int]
    survivor_count: int


def _squared_distances(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    d2 = (
        np.einsum("ij,ij->i", X, X)[:, None]
        - 2.0 * (X @ C.T)
        + np.einsum("ij,ij->i", C, C)[None, :]
    )
    return np.maximum(d2, 0.0)


def kmeans_pp_init(X, k: int, seed: int) -> np.ndarray:
    """k-means++ seeding: D^2-weighted sampling, uniform fallback on zero mass."""
    X = as_float_matrix(X)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    centroids = np.empty((k, X.shape[1]), dtype=np.float64)
    centroids[0] = X[int(rng.integers(n))]
    d2 = None
    for j in range(1, k):
        new_d2 = np.einsum("ij,ij->i", X - centroids[j - 1], X - centroids[j - 1])
        d2 = new_d2 if d2 is None else np.minimum(d2, new_d2)
        total = float(d2.sum())
        if total > 0.0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        centroids[j] = X[idx]
    return centroids


def kmeans_fit(X, k: int, max_iter: int = 300, seed: int = 0, tol: float = 1e-4) -> ClusterModel:
    """Lloyd iterations from a k-means++ start until the centroid shift
    max-norm drops below ``tol`` or ``max_iter`` is reached.

    Assignment ties break toward the lower cluster index; an emptied cluster
    is re-seeded with the point farthest from its assigned centroid.
    """
    X = as_float_matrix(X)
    n = X.shape[0]
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    centroids = kmeans_pp_init(X, k, seed)

    labels = np.zeros(n, dtype=np.int64)
    inertia_path: list[float] = []
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        d2 = _squared_distances(X, centroids)
        labels = np.argmin(d2, axis=1)
        assigned_d2 = np.take_along_axis(d2, labels[:, None], axis=1).ravel()
        inertia = float(assigned_d2.sum())
        if inertia_path and inertia > inertia_path[-1] + _MONOTONE_SLACK * max(1.0, inertia_path[-1]):
            raise AssertionError(
                f"inertia increased across Lloyd iterations: {inertia_path[-1]} -> {inertia}"
            )
        inertia_path.append(inertia)

        # Re-seed empties with the farthest point from its centroid; a moved
        # point is excluded from later picks so the repair loop terminates.
        while True:
            empties = np.where(np.bincount(labels, minlength=k) == 0)[0]
            if empties.size == 0:
                break
            donor = int(np.argmax(assigned_d2))
            labels[donor] = int(empties[0])
            assigned_d2[donor] = -1.0

        sums = np.zeros((k, X.shape[1]), dtype=np.float64)
        np.add.at(sums, labels, X)
        counts = np.bincount(labels, minlength=k).astype(np.float64)
        new_centroids = sums / counts[:, None]
        shift = float(np.max(np.abs(new_centroids - centroids)))
        centroids = new_centroids
        if shift < tol:
            break

    final_d2 = _squared_distances(X, centroids)
    final_inertia = float(np.take_along_axis(final_d2, labels[:, None], axis=1).sum())
    return ClusterModel(
        k=k,
        centroids=centroids,
        assignments=labels,
        inertia=final_inertia,
        iterations=iterations,
        seed=seed,
    )


class KMeans(BaseEstimator):
    """Estimator wrapper around :func:`kmeans_fit`.

    After ``fit``: ``cluster_centers_``, ``labels_``, ``inertia_``,
    ``n_iter_``. ``predict`` assigns new rows to the nearest center.
    """

    def __init__(self, n_clusters: int = 30, max_iter: int = 300, tol: float = 1e-4, seed: int = 0):
        self.n_clusters = n_clusters
        self.max_iter = max_iter
        self.tol = tol
        self.seed = seed

    def fit(self, X, y=None):
        model = kmeans_fit(X, self.n_clusters, max_iter=self.max_iter, seed=self.seed, tol=self.tol)
        self.model_ = model
        self.cluster_centers_ = model.centroids
        self.labels_ = model.assignments
        self.inertia_ = model.inertia
        self.n_iter_ = model.iterations
        return self

    def predict(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        return np.argmin(_squared_distances(X, self.cluster_centers_), axis=1)

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X).labels_


def merge_small(model: ClusterModel, X, min_size: int) -> tuple[ClusterModel, MergePlan]:
    """Absorb clusters below ``min_size`` into the most similar survivor.

    Small clusters are processed in ascending (size, index) order; each one
    joins the surviving cluster whose current centroid has the largest dot
    product with the small cluster's centroid, and survivor centroids are
    recomputed as means after every absorption.
    """
    X = as_float_matrix(X)
    if min_size < 1:
        raise ValueError(f"min_size must be >= 1, got {min_size}")
    sizes = model.sizes
    survivors = [c for c in range(model.k) if sizes[c] >= min_size]
    if not survivors:
        raise MergeError(
            f"no cluster reaches min_size={min_size} (largest is {int(sizes.max())}); "
            "lower min_size"
        )
    smalls = sorted(
        (c for c in range(model.k) if sizes[c] < min_size),
        key=lambda c: (sizes[c], c),
    )

    member_sum = np.zeros((model.k, X.shape[1]), dtype=np.float64)
    np.add.at(member_sum, model.assignments, X)
    counts = sizes.astype(np.float64)

    mapping = {c: c for c in survivors}
    surv_arr = np.array(survivors)
    for c in smalls:
        if sizes[c] == 0:
            mapping[c] = int(surv_arr[0])
            continue
        small_centroid = member_sum[c] / counts[c]
        surv_centroids = member_sum[surv_arr] / counts[surv_arr, None]
        sims = surv_centroids @ small_centroid
        target = int(surv_arr[int(np.argmax(sims))])
        mapping[c] = target
        member_sum[target] += member_sum[c]
        counts[target] += counts[c]

    remap = np.array([mapping[c] for c in range(model.k)])
    assignments = remap[model.assignments]
    centroids = model.centroids.copy()
    new_counts = np.bincount(assignments, minlength=model.k)
    for c in survivors:
        centroids[c] = member_sum[c] / counts[c]

    d2 = _squared_distances(X, centroids)
    inertia = float(np.take_along_axis(d2, assignments[:, None], axis=1).sum())
    merged = ClusterModel(
        k=model.k,
        centroids=centroids,
        assignments=assignments,
        inertia=inertia,
        iterations=model.iterations,
        seed=model.seed,
    )
    assert int(new_counts.sum()) == X.shape[0]
    return merged, MergePlan(min_size=min_size, mapping=mapping, survivor_count=len(survivors))


def top_clusters(model: ClusterModel, m: int) -> list[int]:
    """Up to ``m`` cluster indices by size descending, ties to the lower index."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    sizes = model.sizes
    order = sorted(range(model.k), key=lambda c: (-int(sizes[c]), c))
    return order[:m]


def model_export_dict(model: ClusterModel, plan: MergePlan | None, day) -> dict:
    """JSON-ready cluster model summary for the per-day export."""
    return {
        "day": day.isoformat() if hasattr(day, "isoformat") else str(day),
        "k": model.k,
        "seed": model.seed,
        "sizes": [int(s) for s in model.sizes],
        "inertia": model.inertia,
        "iterations": model.iterations,
        "merge_mapping": {str(c): int(t) for c, t in (plan.mapping if plan else {}).items()},
    }
