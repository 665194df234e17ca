"""Independent oracle implementations used to check the package.

Everything here is deliberately written from the definitions, without
importing any package internals: pure-Python integer hashing, exhaustive
enumeration for k-means, scalar-loop rank propagation, set arithmetic for
the metrics. Slow is fine; these run on tiny inputs.
"""

from __future__ import annotations

import itertools
import math

MASK = (1 << 64) - 1


# --- pinned hashing primitives, re-derived with pure Python ints ---

def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & MASK
    return h


def hash64(seed: int, key: str) -> int:
    return fnv1a64((seed & MASK).to_bytes(8, "little") + key.encode("utf-8"))


def splitmix_value(state: int, i: int) -> int:
    z = (state + i * 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def stream_floats(state: int, n: int) -> list[float]:
    return [2.0 * ((splitmix_value(state, i + 1) >> 11) * 2.0**-53) - 1.0 for i in range(n)]


def gram_unit_vector(seed: int, gram: str, dim: int) -> list[float]:
    x = stream_floats(hash64(seed, gram), dim)
    norm = math.sqrt(sum(v * v for v in x))
    return [v / norm for v in x]


def encode_sentence(tokens: list[str], seed: int, dim: int, orders=(1, 2)) -> list[float]:
    grams = []
    for order in sorted(set(orders)):
        for j in range(len(tokens) - order + 1):
            grams.append(" ".join(tokens[j : j + order]))
    acc = [0.0] * dim
    for gram in grams:
        vec = gram_unit_vector(seed, gram, dim)
        for d in range(dim):
            acc[d] += vec[d]
    acc = [v / len(grams) for v in acc]
    norm = math.sqrt(sum(v * v for v in acc))
    return [v / norm for v in acc]


# --- exhaustive k-means optimum ---

def kmeans_exhaustive_optimum(points, k: int) -> float:
    """Global k-means objective by enumerating every assignment."""
    n = len(points)
    dim = len(points[0])
    best = math.inf
    for assignment in itertools.product(range(k), repeat=n):
        total = 0.0
        for c in range(k):
            members = [points[i] for i in range(n) if assignment[i] == c]
            if not members:
                continue
            mean = [sum(p[d] for p in members) / len(members) for d in range(dim)]
            total += sum(
                sum((p[d] - mean[d]) ** 2 for d in range(dim)) for p in members
            )
        best = min(best, total)
    return best


def kmeans_exhaustive_optimum_fast(points, k: int):
    """Same enumeration vectorized with numpy for n up to ~12, k up to 3.

    Uses inertia = sum ||x||^2 - sum_c ||S_c||^2 / n_c over the assignment,
    a direct identity of the objective, still enumeration rather than any
    iterative refinement. Returns (best inertia, best assignment).
    """
    import numpy as np

    X = np.asarray(points, dtype=np.float64)
    n = X.shape[0]
    total_assignments = k**n
    codes = np.arange(total_assignments)
    A = (codes[:, None] // (k ** np.arange(n))[None, :]) % k  # (k^n, n)
    const = float(np.sum(X * X))
    reduction = np.zeros(total_assignments, dtype=np.float64)
    for c in range(k):
        mask = (A == c).astype(np.float64)
        counts = mask.sum(axis=1)
        sums = mask @ X
        sq = np.einsum("ij,ij->i", sums, sums)
        nz = counts > 0
        reduction[nz] += sq[nz] / counts[nz]
    inertia = const - reduction
    best = int(np.argmin(inertia))
    return float(inertia[best]), A[best]


# --- scalar-loop damped rank propagation ---

def textrank_scores(weights, d: float, tol: float = 1e-12, max_iter: int = 10000):
    n = len(weights)
    rowsum = [sum(weights[j]) for j in range(n)]
    scores = [1.0] * n
    for _ in range(max_iter):
        new = []
        for i in range(n):
            incoming = 0.0
            for j in range(n):
                if rowsum[j] > 0.0 and weights[j][i] > 0.0:
                    incoming += weights[j][i] / rowsum[j] * scores[j]
            new.append((1.0 - d) + d * incoming)
        delta = max(abs(a - b) for a, b in zip(new, scores))
        scores = new
        if delta < tol:
            break
    return scores


# --- set-intersection metrics ---

def metrics_at_k(predicted, gold, k: int):
    top = [w.lower() for w in predicted[:k]]
    hits = len(set(top) & set(w.lower() for w in gold))
    p = hits / k
    r = hits / len(set(gold))
    f1 = 0.0 if p + r == 0 else 2 * p * r / (p + r)
    return p, r, f1


# --- greedy overlap matching, re-derived ---

def greedy_match(predicted_sets, gold_sets):
    pairs = []
    free_p = list(range(len(predicted_sets)))
    free_g = list(range(len(gold_sets)))
    while free_p and free_g:
        best = None
        for g in free_g:
            for p in free_p:
                ov = len(set(predicted_sets[p]) & set(gold_sets[g]))
                if best is None or ov > best[0]:
                    best = (ov, p, g)
        ov, p, g = best
        if ov == 0:
            break
        pairs.append((p, g))
        free_p.remove(p)
        free_g.remove(g)
    return sorted(pairs, key=lambda t: t[1])


# --- LDA smoothed estimates from raw assignments ---

def lda_estimates_from_assignments(doc_tokens, assignments, vocab, T, alpha, beta):
    V = len(vocab)
    n_dt = [[0] * T for _ in doc_tokens]
    n_tw = [[0] * V for _ in range(T)]
    n_t = [0] * T
    for d, (tokens, zs) in enumerate(zip(doc_tokens, assignments)):
        for tok, z in zip(tokens, zs):
            w = vocab[tok]
            n_dt[d][int(z)] += 1
            n_tw[int(z)][w] += 1
            n_t[int(z)] += 1
    phi = [
        [(n_tw[t][w] + beta) / (n_t[t] + beta * V) for w in range(V)]
        for t in range(T)
    ]
    theta = [
        [(row[t] + alpha) / (sum(row) + alpha * T) for t in range(T)]
        for row in n_dt
    ]
    return phi, theta
