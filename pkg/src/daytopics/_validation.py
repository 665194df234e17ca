"""Input validation helpers used by the estimators and graph operations."""

from __future__ import annotations

import numpy as np


def as_float_matrix(X, name: str = "X", min_rows: int = 1) -> np.ndarray:
    """Coerce to a finite 2-D float64 array with at least ``min_rows`` rows."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {X.shape}")
    if X.shape[0] < min_rows:
        raise ValueError(f"{name} needs at least {min_rows} rows, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains NaN or infinity")
    return X


def check_unit_rows(X: np.ndarray, tol: float = 1e-5, name: str = "X") -> None:
    norms = np.sqrt(np.einsum("ij,ij->i", X.astype(np.float64), X.astype(np.float64)))
    bad = np.abs(norms - 1.0) > tol
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ValueError(f"{name} row {i} has L2 norm {norms[i]:.8f}, expected 1 +- {tol}")


def check_square_weights(W, name: str = "weights") -> np.ndarray:
    """Validate a symmetric non-negative weight matrix with zero diagonal."""
    W = as_float_matrix(W, name=name)
    n, m = W.shape
    if n != m:
        raise ValueError(f"{name} must be square, got {W.shape}")
    if np.any(W < 0):
        raise ValueError(f"{name} has negative entries")
    if np.any(np.diagonal(W) != 0):
        raise ValueError(f"{name} has a nonzero diagonal")
    if not np.array_equal(W, W.T):
        raise ValueError(f"{name} is not symmetric")
    return W


def check_token_lists(docs, name: str = "documents", allow_empty: bool = True):
    """Normalize an iterable of token sequences to a list of string lists."""
    out = []
    for i, doc in enumerate(docs):
        tokens = list(doc)
        if not allow_empty and not tokens:
            raise ValueError(f"{name}[{i}] has no tokens")
        for t in tokens:
            if not isinstance(t, str):
                raise ValueError(f"{name}[{i}] contains a non-string token: {t!r}")
        out.append(tokens)
    return out
