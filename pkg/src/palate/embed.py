"""Word vectors trained on the review corpus itself.

Co-occurrence counts use 1/distance weighting inside a fixed window;
training is weighted least squares on log counts with adagrad updates.
Reviews are embedded as the TF-IDF-weighted mean of their word vectors.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .featurize import VocabIndex
from .matrix import FeatureMatrix
from .seeding import make_rng


@dataclass
class CooccurrenceTable:
    """Sparse symmetric (i, j) -> weighted count map. No self-pairs."""
    entries: dict
    window: int
    vocab_size: int

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class WordVectors:
    dim: int
    main: np.ndarray           # vocab_size x dim
    context: np.ndarray
    bias_main: np.ndarray
    bias_context: np.ndarray
    epoch_losses: list[float] = field(default_factory=list)

    def combined(self) -> np.ndarray:
        """Final per-word vector: main + context."""
        return self.main + self.context


def build_cooccurrence(token_lists: list[list[str]], vocab: VocabIndex,
                       window: int = 5) -> CooccurrenceTable:
    """Accumulate 1/distance co-occurrence weight for in-vocab pairs.

    Out-of-vocab tokens still occupy positions, so they stretch distances
    without contributing pairs. Both (i, j) and (j, i) are stored.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    entries: dict = {}
    index = vocab.index
    for tokens in token_lists:
        ids = [index.get(tok) for tok in tokens]
        m = len(ids)
        for p in range(m):
            i = ids[p]
            if i is None:
                continue
            for q in range(p + 1, min(p + window + 1, m)):
                j = ids[q]
                if j is None or j == i:
                    continue
                w = 1.0 / (q - p)
                entries[(i, j)] = entries.get((i, j), 0.0) + w
                entries[(j, i)] = entries.get((j, i), 0.0) + w
    return CooccurrenceTable(entries=entries, window=window, vocab_size=len(vocab))


def cooccurrence_weight(x: float, x_max: float, alpha: float) -> float:
    """Loss weight f(x) = (x/x_max)^alpha capped at 1."""
    return min((x / x_max) ** alpha, 1.0)


def train_glove(cooc: CooccurrenceTable, dim: int = 50, x_max: float = 100,
                alpha: float = 0.75, epochs: int = 15, rate: float = 0.05,
                seed: int = 0) -> WordVectors:
    """Adagrad SGD over the co-occurrence triples, one shuffle per epoch.

    Minimizes sum f(x_ij) (w_i . w~_j + b_i + b~_j - ln x_ij)^2. The triple
    order inside an epoch is a seeded permutation of the lexicographically
    sorted entry list, so runs are reproducible.
    """
    if not cooc.entries:
        raise ValueError("empty co-occurrence table")
    items = sorted(cooc.entries.items())
    i_idx = np.array([ij[0] for ij, _ in items], dtype=np.int64)
    j_idx = np.array([ij[1] for ij, _ in items], dtype=np.int64)
    counts = np.array([v for _, v in items])
    logx = np.log(counts)
    fw = np.minimum((counts / x_max) ** alpha, 1.0)

    v = cooc.vocab_size
    rng = make_rng(seed)
    span = 0.5 / dim
    w_main = rng.uniform(-span, span, size=(v, dim))
    w_ctx = rng.uniform(-span, span, size=(v, dim))
    b_main = rng.uniform(-span, span, size=v)
    b_ctx = rng.uniform(-span, span, size=v)
    g_main = np.ones((v, dim))
    g_ctx = np.ones((v, dim))
    gb_main = np.ones(v)
    gb_ctx = np.ones(v)

    losses: list[float] = []
    for epoch in range(epochs):
        order = rng.permutation(len(items)).astype(np.int64)
        loss = float(kernels.glove_epoch(i_idx, j_idx, logx, fw, order,
                                         w_main, w_ctx, b_main, b_ctx,
                                         g_main, g_ctx, gb_main, gb_ctx, rate))
        if not math.isfinite(loss):
            raise RuntimeError(f"non-finite loss at epoch {epoch}")
        losses.append(loss)
    return WordVectors(dim=dim, main=w_main, context=w_ctx, bias_main=b_main,
                       bias_context=b_ctx, epoch_losses=losses)


def embed_review(tokens: list[str], vectors: WordVectors, weights) -> tuple[np.ndarray, bool]:
    """Weighted mean of word vectors for one review.

    ``weights`` is a sparse row as (vocab indices, values). Weights are
    normalized internally, so scaling them all by c > 0 changes nothing.
    Returns (vector, True) normally and (zeros, False) when no token
    carries weight.
    """
    idx, vals = weights
    idx = np.asarray(idx, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.float64)
    total = vals.sum()
    if len(idx) == 0 or total <= 0:
        return np.zeros(vectors.dim), False
    combined = vectors.main[idx] + vectors.context[idx]
    return (vals[:, None] * combined).sum(axis=0) / total, True


def embed_corpus(X: FeatureMatrix, vectors: WordVectors) -> tuple[np.ndarray, list[int]]:
    """Embed every row of a TF-IDF matrix; rows with no weight come back
    zero and are listed separately."""
    out = np.zeros((X.n_rows, vectors.dim))
    empty: list[int] = []
    for i in range(X.n_rows):
        vec, ok = embed_review([], vectors, X.row(i))
        out[i] = vec
        if not ok:
            empty.append(i)
    return out, empty
