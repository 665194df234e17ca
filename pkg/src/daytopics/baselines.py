"""TF-IDF and LDA baselines that slot into the same downstream pipeline.

TF-IDF is the pinned smoothed variant: ``idf(t) = ln((1+N)/(1+df(t))) + 1``,
weights ``tf * idf``, rows L2-normalized, vocabulary ordered by first
occurrence. LDA is collapsed Gibbs sampling over token-topic assignments
with symmetric priors; phi and theta are estimated from the final counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_token_lists
from .base import BaseEstimator
from .corpus import Sentence
from .encoders import EmbeddingMatrix
from .errors import ValidationError


@dataclass(frozen=True)
class TfidfMatrix:
    """CSR-layout sparse rows plus the vocabulary and idf table."""

    vocab: dict[str, int]
    idf: np.ndarray
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    data: np.ndarray = field(repr=False)

    @property
    def n_docs(self) -> int:
        return len(self.indptr) - 1

    @property
    def n_terms(self) -> int:
        return len(self.vocab)

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_docs, self.n_terms), dtype=np.float64)
        for i in range(self.n_docs):
            cols, vals = self.row(i)
            out[i, cols] = vals
        return out


class TfidfVectorizer(BaseEstimator):
    """Deterministic TF-IDF over pre-tokenized documents.

    ``fit`` learns the first-occurrence vocabulary and idf table;
    ``transform`` ignores unseen tokens and L2-normalizes nonzero rows.
    """

    def fit(self, X, y=None):
        docs = check_token_lists(X)
        vocab: dict[str, int] = {}
        df = []
        for tokens in docs:
            for t in tokens:
                if t not in vocab:
                    vocab[t] = len(vocab)
                    df.append(0)
            for t in set(tokens):
                df[vocab[t]] += 1
        n = len(docs)
        self.vocab_ = vocab
        self.idf_ = np.log((1.0 + n) / (1.0 + np.asarray(df, dtype=np.float64))) + 1.0
        return self

    def transform(self, X) -> TfidfMatrix:
        docs = check_token_lists(X)
        vocab, idf = self.vocab_, self.idf_
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        for tokens in docs:
            counts: dict[int, int] = {}
            for t in tokens:
                col = vocab.get(t)
                if col is not None:
                    counts[col] = counts.get(col, 0) + 1
            cols = sorted(counts)
            vals = np.array([counts[c] * idf[c] for c in cols], dtype=np.float64)
            norm = float(np.sqrt(np.dot(vals, vals)))
            if norm > 0.0:
                vals /= norm
            indices.extend(cols)
            data.extend(vals.tolist())
            indptr.append(len(indices))
        return TfidfMatrix(
            vocab=dict(vocab),
            idf=idf.copy(),
            indptr=np.asarray(indptr, dtype=np.int64),
            indices=np.asarray(indices, dtype=np.int64),
            data=np.asarray(data, dtype=np.float64),
        )

    def fit_transform(self, X, y=None) -> TfidfMatrix:
        return self.fit(X).transform(X)


def tfidf_fit_transform(sentences: list[Sentence]) -> TfidfMatrix:
    for i, s in enumerate(sentences):
        if not s.tokens:
            raise ValidationError(f"sentence {i} has no tokens")
    return TfidfVectorizer().fit_transform([s.tokens for s in sentences])


def densify_for_clustering(
    matrix: TfidfMatrix,
    ids: tuple[tuple[str, int], ...],
    dim_cap: int = 512,
) -> tuple[EmbeddingMatrix, tuple[int, ...]]:
    """Densify TF-IDF rows into an EmbeddingMatrix of width ``dim_cap``.

    If the vocabulary fits, columns map through unchanged and the rest is
    zero padding, so relative dot products are preserved exactly. Otherwise
    the ``dim_cap`` columns with the highest retained mass (sum of squared
    normalized weights) are kept and rows are re-normalized. Rows left with
    no mass get a reserved unit vector on the last axis and their indices
    are returned as flags.
    """
    if dim_cap < 2:
        raise ValueError(f"dim_cap must be >= 2, got {dim_cap}")
    n, v = matrix.n_docs, matrix.n_terms
    if len(ids) != n:
        raise ValueError(f"{len(ids)} ids for {n} rows")

    if v <= dim_cap:
        kept = np.arange(v, dtype=np.int64)
    else:
        mass = np.zeros(v, dtype=np.float64)
        np.add.at(mass, matrix.indices, matrix.data**2)
        order = sorted(range(v), key=lambda c: (-mass[c], c))
        kept = np.array(sorted(order[:dim_cap]), dtype=np.int64)

    col_map = np.full(v, -1, dtype=np.int64)
    col_map[kept] = np.arange(len(kept))

    rows = np.zeros((n, dim_cap), dtype=np.float64)
    fallback: list[int] = []
    for i in range(n):
        cols, vals = matrix.row(i)
        mapped = col_map[cols]
        keep = mapped >= 0
        rows[i, mapped[keep]] = vals[keep]
        norm = float(np.sqrt(np.dot(rows[i], rows[i])))
        if norm > 0.0:
            rows[i] /= norm
        else:
            rows[i, dim_cap - 1] = 1.0
            fallback.append(i)

    embedded = EmbeddingMatrix(ids=tuple(ids), rows=rows.astype(np.float32), dim=dim_cap)
    return embedded, tuple(fallback)


@dataclass(frozen=True)
class LdaModel:
    T: int
    alpha: float
    beta: float
    phi: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    seed: int
    sweeps: int
    vocab: dict[str, int]
    assignments: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        if self.phi.shape[0] != self.T or self.theta.shape[1] != self.T:
            raise ValidationError("phi/theta shapes inconsistent with T")
        for name, dist in (("phi", self.phi), ("theta", self.theta)):
            if np.any(dist < 0):
                raise ValidationError(f"{name} has negative entries")
            sums = dist.sum(axis=1)
            if dist.shape[0] and np.max(np.abs(sums - 1.0)) > 1e-6:
                raise ValidationError(f"{name} rows do not sum to 1 within 1e-6")


class GibbsLda(BaseEstimator):
    """Collapsed Gibbs sampler for LDA over pre-tokenized documents.

    ``alpha=None`` resolves to the canonical ``50 / n_topics``. The fit is
    deterministic for a fixed seed; topic-count bookkeeping is verified to
    conserve the total token count after every sweep.
    """

    def __init__(
        self,
        n_topics: int = 30,
        alpha: float | None = None,
        beta: float = 0.01,
        sweeps: int = 500,
        seed: int = 0,
    ):
        self.n_topics = n_topics
        self.alpha = alpha
        self.beta = beta
        self.sweeps = sweeps
        self.seed = seed

    def fit(self, X, y=None):
        T = int(self.n_topics)
        if T < 2:
            raise ValueError(f"n_topics must be >= 2, got {T}")
        if self.sweeps < 0:
            raise ValueError(f"sweeps must be >= 0, got {self.sweeps}")
        alpha = (50.0 / T) if self.alpha is None else float(self.alpha)
        beta = float(self.beta)
        if alpha <= 0 or beta <= 0:
            raise ValueError("alpha and beta must be positive")

        docs = check_token_lists(X)
        vocab: dict[str, int] = {}
        doc_words: list[np.ndarray] = []
        for tokens in docs:
            ids = np.array([vocab.setdefault(t, len(vocab)) for t in tokens], dtype=np.int64)
            doc_words.append(ids)
        V = len(vocab)
        total_tokens = int(sum(len(w) for w in doc_words))
        if V == 0:
            raise ValueError("vocabulary is empty: no tokens in any document")
        if total_tokens < T:
            raise ValueError(f"corpus has {total_tokens} tokens, fewer than n_topics={T}")

        rng = np.random.default_rng(self.seed)
        n_dt = np.zeros((len(docs), T), dtype=np.int64)
        n_tw = np.zeros((T, V), dtype=np.int64)
        n_t = np.zeros(T, dtype=np.int64)
        z: list[np.ndarray] = []
        for d, words in enumerate(doc_words):
            zd = rng.integers(0, T, size=len(words))
            z.append(zd)
            for w, t in zip(words, zd):
                n_dt[d, t] += 1
                n_tw[t, w] += 1
                n_t[t] += 1

        beta_v = beta * V
        for _ in range(self.sweeps):
            for d, words in enumerate(doc_words):
                zd = z[d]
                row = n_dt[d]
                for pos in range(len(words)):
                    w = words[pos]
                    t = zd[pos]
                    row[t] -= 1
                    n_tw[t, w] -= 1
                    n_t[t] -= 1
                    probs = (row + alpha) * (n_tw[:, w] + beta) / (n_t + beta_v)
                    cum = np.cumsum(probs)
                    t = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
                    if t == T:  # guard against fp edge at the top of the range
                        t = T - 1
                    zd[pos] = t
                    row[t] += 1
                    n_tw[t, w] += 1
                    n_t[t] += 1
            if int(n_t.sum()) != total_tokens or np.any(n_t < 0):
                raise AssertionError("Gibbs bookkeeping lost tokens during a sweep")

        self.vocab_ = vocab
        self.phi_ = (n_tw + beta) / (n_t + beta_v)[:, None]
        doc_len = n_dt.sum(axis=1)
        self.theta_ = (n_dt + alpha) / (doc_len + alpha * T)[:, None]
        self.assignments_ = tuple(z)
        self.alpha_ = alpha
        self.counts_ = {"n_dt": n_dt, "n_tw": n_tw, "n_t": n_t}
        return self

    def model(self) -> LdaModel:
        return LdaModel(
            T=int(self.n_topics),
            alpha=self.alpha_,
            beta=float(self.beta),
            phi=self.phi_,
            theta=self.theta_,
            seed=int(self.seed),
            sweeps=int(self.sweeps),
            vocab=dict(self.vocab_),
            assignments=self.assignments_,
        )


def lda_fit(
    sentences: list[Sentence],
    T: int = 30,
    alpha: float | None = None,
    beta: float = 0.01,
    sweeps: int = 500,
    seed: int = 0,
) -> LdaModel:
    sampler = GibbsLda(n_topics=T, alpha=alpha, beta=beta, sweeps=sweeps, seed=seed)
    sampler.fit([s.tokens for s in sentences])
    return sampler.model()


def lda_topic_keywords(model: LdaModel, top_n: int = 10) -> list[list[str]]:
    """Per-topic top tokens by phi, ties broken lexicographically."""
    if top_n < 1:
        raise ValueError(f"top_n must be >= 1, got {top_n}")
    words = [None] * len(model.vocab)
    for token, col in model.vocab.items():
        words[col] = token
    out = []
    for t in range(model.T):
        phi_t = model.phi[t]
        order = sorted(range(len(words)), key=lambda w: (-phi_t[w], words[w]))
        out.append([words[w] for w in order[:top_n]])
    return out
