"""Sentence vectors: built-in hashed n-gram encoder and the EMB1 file bridge.

The built-in encoder averages one deterministic pseudo-random unit vector
per token n-gram (see :mod:`daytopics.hashing` for the pinned primitives)
and L2-normalizes the result, so identical token sequences always produce
identical rows and dot product acts as a bounded similarity. It is a
reproducible stand-in for a pretrained sentence encoder, not a model.

External encoders plug in through the EMB1 binary format (little-endian):

    magic "EMB1" | u32 dim | u64 n | n * [u16 id_len, id utf-8, dim * f32]

ids take the form ``tweetid:ordinal``. Rows are re-normalized on load so
upstream encoders need not emit unit vectors.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import hashing
from .base import BaseEstimator
from .corpus import Sentence
from .errors import EmbeddingLoadError, ValidationError

_MAGIC = b"EMB1"
UNIT_NORM_TOL = 1e-5


@dataclass(frozen=True)
class EncoderSpec:
    """Configuration for sentence vectorization.

    ``kind`` is ``"builtin_hash"`` or ``"external_file"``; ``seed`` and
    ``ngram_orders`` only apply to the builtin encoder.
    """

    kind: str = "builtin_hash"
    dim: int = 512
    seed: int = 0
    ngram_orders: tuple[int, ...] = (1, 2)

    def __post_init__(self):
        if self.kind not in ("builtin_hash", "external_file"):
            raise ValueError(f"unknown encoder kind {self.kind!r}")
        if self.dim < 2:
            raise ValueError(f"embedding dim must be >= 2, got {self.dim}")
        orders = tuple(sorted(set(int(n) for n in self.ngram_orders)))
        if not orders or any(n < 1 for n in orders):
            raise ValueError(f"ngram_orders must be positive integers, got {self.ngram_orders}")
        object.__setattr__(self, "ngram_orders", orders)


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Unit-norm float32 rows keyed by (tweet_id, ordinal) pairs.

    Construction validates the full contract: unique ids, one id per row,
    finite values, and row norms within ``1e-5`` of 1.
    """

    ids: tuple[tuple[str, int], ...]
    rows: np.ndarray = field(repr=False)
    dim: int

    def __post_init__(self):
        rows = np.ascontiguousarray(self.rows, dtype=np.float32)
        object.__setattr__(self, "rows", rows)
        if rows.ndim != 2 or rows.shape[1] != self.dim:
            raise ValidationError(f"rows have shape {rows.shape}, expected (n, {self.dim})")
        if len(self.ids) != rows.shape[0]:
            raise ValidationError(f"{len(self.ids)} ids for {rows.shape[0]} rows")
        if len(set(self.ids)) != len(self.ids):
            raise ValidationError("duplicate ids in embedding matrix")
        if not np.all(np.isfinite(rows)):
            raise ValidationError("embedding rows contain NaN or infinity")
        norms = np.sqrt(np.einsum("ij,ij->i", rows.astype(np.float64), rows.astype(np.float64)))
        if rows.shape[0] and np.max(np.abs(norms - 1.0)) > UNIT_NORM_TOL:
            i = int(np.argmax(np.abs(norms - 1.0)))
            raise ValidationError(
                f"row {i} has L2 norm {norms[i]:.8f}, outside 1 +- {UNIT_NORM_TOL}"
            )

    def __len__(self) -> int:
        return self.rows.shape[0]

    @property
    def sentence_ids(self) -> list[str]:
        return [f"{tid}:{ordinal}" for tid, ordinal in self.ids]

    def take(self, indices) -> "EmbeddingMatrix":
        """Row subset in the given order (e.g. one day of a corpus matrix)."""
        indices = list(indices)
        return EmbeddingMatrix(
            ids=tuple(self.ids[i] for i in indices),
            rows=self.rows[indices],
            dim=self.dim,
        )


class HashedNgramEncoder(BaseEstimator):
    """Deterministic averaged hashed n-gram sentence encoder.

    ``transform`` maps a list of token sequences to an (n, dim) float32
    array of unit rows. A pure function of (tokens, dim, seed, orders):
    there is nothing to fit.
    """

    def __init__(self, dim: int = 512, seed: int = 0, ngram_orders: tuple[int, ...] = (1, 2)):
        self.dim = dim
        self.seed = seed
        self.ngram_orders = ngram_orders

    def fit(self, X, y=None):
        self.spec_ = EncoderSpec(
            kind="builtin_hash", dim=self.dim, seed=self.seed,
            ngram_orders=tuple(self.ngram_orders),
        )
        return self

    def transform(self, X) -> np.ndarray:
        spec = EncoderSpec(
            kind="builtin_hash", dim=self.dim, seed=self.seed,
            ngram_orders=tuple(self.ngram_orders),
        )
        docs = [list(tokens) for tokens in X]
        for i, tokens in enumerate(docs):
            if not tokens:
                raise ValidationError(f"sentence {i} has no tokens; encoder input must be non-empty")

        # Deduplicate n-grams across the batch, generate their unit vectors in
        # one vectorized pass, then average per sentence with 64-bit sums.
        gram_index: dict[str, int] = {}
        doc_gram_ids: list[list[int]] = []
        for tokens in docs:
            ids = []
            for order in spec.ngram_orders:
                for j in range(len(tokens) - order + 1):
                    gram = " ".join(tokens[j : j + order])
                    gid = gram_index.setdefault(gram, len(gram_index))
                    ids.append(gid)
            doc_gram_ids.append(ids)

        if not docs:
            return np.zeros((0, spec.dim), dtype=np.float32)

        states = np.array(
            [hashing.hash64(spec.seed, gram) for gram in gram_index], dtype=np.uint64
        )
        gram_vectors = hashing.unit_vectors(states, spec.dim)

        out = np.empty((len(docs), spec.dim), dtype=np.float32)
        for i, ids in enumerate(doc_gram_ids):
            acc = gram_vectors[ids].sum(axis=0) / len(ids)
            norm = float(np.sqrt(np.dot(acc, acc)))
            if norm == 0.0:
                raise ValidationError(f"sentence {i} produced a zero embedding")
            out[i] = (acc / norm).astype(np.float32)
        return out

    def fit_transform(self, X, y=None) -> np.ndarray:
        return self.fit(X).transform(X)


def encode_sentences(sentences: list[Sentence], spec: EncoderSpec) -> EmbeddingMatrix:
    """Encode cleaned sentences with the builtin encoder into an EmbeddingMatrix."""
    if spec.kind != "builtin_hash":
        raise ValueError(f"encode_sentences needs a builtin_hash spec, got {spec.kind!r}")
    encoder = HashedNgramEncoder(dim=spec.dim, seed=spec.seed, ngram_orders=spec.ngram_orders)
    rows = encoder.transform([s.tokens for s in sentences])
    return EmbeddingMatrix(ids=tuple(s.key for s in sentences), rows=rows, dim=spec.dim)


def similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Dot product of two unit vectors (equals cosine similarity)."""
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(np.dot(a, b))


def write_emb1(matrix: EmbeddingMatrix, path: str | Path) -> None:
    """Write the matrix in EMB1 layout (the normative interchange format)."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", matrix.dim))
        fh.write(struct.pack("<Q", len(matrix)))
        for sid, row in zip(matrix.sentence_ids, matrix.rows):
            raw = sid.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise ValidationError(f"id too long for EMB1: {sid!r}")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(row.astype("<f4").tobytes())


def load_external(path: str | Path, expected_dim: int | None = None) -> EmbeddingMatrix:
    """Load an EMB1 file, re-normalizing rows.

    Raises :class:`EmbeddingLoadError` for a bad magic, a header/spec dim
    mismatch, truncated records, duplicate ids, or non-finite rows.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        data = fh.read()

    if len(data) < 4 or data[:4] != _MAGIC:
        raise EmbeddingLoadError(f"{path}: bad magic, not an EMB1 file")
    if len(data) < 16:
        raise EmbeddingLoadError(f"{path}: truncated header")
    dim = struct.unpack_from("<I", data, 4)[0]
    n = struct.unpack_from("<Q", data, 8)[0]
    if dim < 2:
        raise EmbeddingLoadError(f"{path}: header dim {dim} is invalid")
    if expected_dim is not None and dim != expected_dim:
        raise EmbeddingLoadError(f"{path}: header dim {dim} does not match expected {expected_dim}")

    offset = 16
    row_bytes = 4 * dim
    ids: list[tuple[str, int]] = []
    rows = np.empty((n, dim), dtype=np.float32)
    seen: set[str] = set()
    for i in range(n):
        if offset + 2 > len(data):
            raise EmbeddingLoadError(f"{path}: truncated record {i} (missing id length)")
        (id_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if offset + id_len + row_bytes > len(data):
            raise EmbeddingLoadError(f"{path}: truncated record {i}")
        sid = data[offset : offset + id_len].decode("utf-8")
        offset += id_len
        if sid in seen:
            raise EmbeddingLoadError(f"{path}: duplicate id {sid!r}")
        seen.add(sid)
        ids.append(_parse_sentence_id(sid, path))
        rows[i] = np.frombuffer(data, dtype="<f4", count=dim, offset=offset)
        offset += row_bytes
    if offset != len(data):
        raise EmbeddingLoadError(f"{path}: {len(data) - offset} trailing bytes after {n} records")

    rows64 = rows.astype(np.float64)
    if not np.all(np.isfinite(rows64)):
        raise EmbeddingLoadError(f"{path}: rows contain NaN or infinity")
    norms = np.sqrt(np.einsum("ij,ij->i", rows64, rows64))
    if np.any(norms == 0.0):
        i = int(np.argmax(norms == 0.0))
        raise EmbeddingLoadError(f"{path}: record {i} is a zero vector and cannot be normalized")
    rows = (rows64 / norms[:, None]).astype(np.float32)
    return EmbeddingMatrix(ids=tuple(ids), rows=rows, dim=dim)


def _parse_sentence_id(sid: str, path: Path) -> tuple[str, int]:
    head, sep, tail = sid.rpartition(":")
    if not sep or not head:
        raise EmbeddingLoadError(f"{path}: id {sid!r} is not of the form tweetid:ordinal")
    try:
        ordinal = int(tail)
    except ValueError:
        raise EmbeddingLoadError(f"{path}: id {sid!r} has a non-integer ordinal")
    return (head, ordinal)
