"""Shallow cell-complex autoencoders: embeddings of the cells below the top dimension.

Three encoder-decoder systems are supported:

=============  ==========================  ==================  =========================
method         decoder                     similarity          per-pair loss
=============  ==========================  ==================  =========================
laplacian      ``|z_a - z_c|^2``           adjacency counts    ``dec * sim``
inner_product  ``z_a . z_c``               adjacency counts    ``(dec - sim)^2``
random_walk    softmax of ``z_c . z_b``    walk co-occurrence  ``-log dec`` per occurrence
=============  ==========================  ==================  =========================

The encoder is a single table of vectors (no separate context vectors).
Losses only couple cells of the same dimension.  ``random_walk`` with walks
driven by the adjacency counts is cell2vec.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import kernels
from .complex import CellComplex
from .errors import ConfigInvalid, KOutOfRange, MissingContext, WidthMismatch
from .operators import adjacency_matrix

__all__ = [
    "EmbeddingTable",
    "SimilarityMeasure",
    "WalkCorpus",
    "TrainConfig",
    "similarity_from_adjacency",
    "generate_walks",
    "cooccurrence",
    "decode",
    "softmax_rows",
    "loss_total",
    "loss_per_dim",
    "gradients",
    "train_embeddings",
]

log = logging.getLogger(__name__)

METHODS = ("inner_product", "laplacian", "random_walk")
METHOD_ALIASES = {"ip": "inner_product", "lap": "laplacian", "rw": "random_walk"}


@dataclass
class EmbeddingTable:
    """One row per cell of ``X^{<n}``, in canonical order."""

    ids: tuple
    dims: tuple
    vectors: np.ndarray
    history: list = field(default_factory=list)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.ids):
            raise WidthMismatch("embedding rows do not match the id table")
        self._row = {cid: i for i, cid in enumerate(self.ids)}

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    def __getitem__(self, cid) -> np.ndarray:
        return self.vectors[self._row[cid]]

    def rows_of_dim(self, k: int) -> np.ndarray:
        return np.array([i for i, m in enumerate(self.dims) if m == k], dtype=np.int64)

    @classmethod
    def for_complex(cls, X: CellComplex, vectors) -> "EmbeddingTable":
        ids = X.skeleton(X.n, "<")
        return cls(tuple(ids), tuple(X.dim(c) for c in ids), vectors)


@dataclass
class SimilarityMeasure:
    """Per-dimension similarity blocks indexed by canonical k-cell order.

    ``blocks[k][c, a]`` is the similarity of ``a`` to ``c`` (for
    co-occurrence: ``p(a | c)``); ``counts`` keeps raw co-occurrence counts
    when the measure came from a walk corpus.  Cells of different
    dimensions have similarity 0.
    """

    blocks: dict
    counts: dict | None = None

    def value(self, X: CellComplex, a: str, c: str) -> float:
        k = X.dim(a)
        if X.dim(c) != k or k not in self.blocks:
            return 0.0
        return float(self.blocks[k][X.index_in_dim(c), X.index_in_dim(a)])


@dataclass
class WalkCorpus:
    """Walks over the k-cells; ``index_walks`` holds canonical positions, -1 after a halt."""

    cells: tuple
    index_walks: np.ndarray
    dim: int
    seed: int
    length: int
    walks_per_cell: int

    @property
    def walks(self) -> list:
        cells = self.cells
        return [tuple(cells[i] for i in row if i >= 0) for row in self.index_walks]

    def __len__(self):
        return self.index_walks.shape[0]


@dataclass
class TrainConfig:
    method: str = "random_walk"
    d: int = 16
    epochs: int = 50
    lr: float = 0.025
    seed: int = 0
    walk_length: int = 20
    walks_per_cell: int = 10
    window: int = 3
    dims: int | None = None

    def __post_init__(self):
        self.method = METHOD_ALIASES.get(self.method, self.method)
        if self.method not in METHODS:
            raise ConfigInvalid(f"unknown method {self.method!r}")
        if self.d < 1:
            raise ConfigInvalid("embedding width d must be >= 1")
        if self.epochs < 1:
            raise ConfigInvalid("epochs must be positive")
        if not self.lr > 0:
            raise ConfigInvalid("learning rate must be positive")
        if self.walk_length < 1 or self.walks_per_cell < 1 or self.window < 1:
            raise ConfigInvalid("walk length, walks per cell and window must be >= 1")


def similarity_from_adjacency(X: CellComplex) -> SimilarityMeasure:
    return SimilarityMeasure({k: adjacency_matrix(X, k).matrix for k in range(X.n)})


def _walk_seed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence([seed, k]).generate_state(1)[0])


def generate_walks(
    X: CellComplex, k: int, length: int, walks_per_cell: int, seed: int
) -> WalkCorpus:
    """Seeded random walks on k-cells, stepping with probability proportional to adjacency counts.

    Walk ``w`` starts at k-cell ``w mod |X^k|`` and draws its steps from
    ``numpy.random.default_rng([seed, w])``.  A walk stops early at a cell
    with no adjacent cells.
    """
    if not 0 <= k < X.n:
        raise KOutOfRange(f"walks need 0 <= k < n = {X.n}, got k={k}")
    if length < 1 or walks_per_cell < 0:
        raise ConfigInvalid("walk length must be >= 1 and walks_per_cell >= 0")
    A = adjacency_matrix(X, k).matrix
    cells = tuple(X.skeleton(k))
    K = len(cells)
    indptr = A.indptr.astype(np.int64)
    cumw = np.cumsum(A.data)
    # restart the running sum at each row
    row_start = np.repeat(np.concatenate([[0.0], cumw])[indptr[:-1]], np.diff(indptr))
    cumw = cumw - row_start
    starts = np.tile(np.arange(K, dtype=np.int64), walks_per_cell)
    uniforms = np.empty((starts.shape[0], length - 1))
    for w in range(starts.shape[0]):
        uniforms[w] = np.random.default_rng([seed, w]).random(length - 1)
    walks = kernels.sample_walks(indptr, A.indices.astype(np.int64), cumw, starts, uniforms)
    return WalkCorpus(cells, walks, k, seed, length, walks_per_cell)


def cooccurrence(corpus: WalkCorpus, window: int) -> SimilarityMeasure:
    """Window co-occurrence counts and the conditional estimate ``p(a | c)``."""
    if window < 1:
        raise ConfigInvalid("window must be >= 1")
    W = corpus.index_walks
    K = len(corpus.cells)
    rows, cols = [], []
    for o in range(1, min(window, max(W.shape[1] - 1, 0)) + 1):
        left, right = W[:, :-o].ravel(), W[:, o:].ravel()
        ok = (left >= 0) & (right >= 0)
        rows += [left[ok], right[ok]]
        cols += [right[ok], left[ok]]
    r = np.concatenate(rows) if rows else np.zeros(0, np.int64)
    c = np.concatenate(cols) if cols else np.zeros(0, np.int64)
    counts = sp.csr_matrix((np.ones(r.shape[0]), (r, c)), shape=(K, K))
    counts.sum_duplicates()
    tot = np.asarray(counts.sum(axis=1)).ravel()
    inv = np.divide(1.0, tot, out=np.zeros_like(tot), where=tot > 0)
    probs = sp.diags(inv) @ counts
    return SimilarityMeasure({corpus.dim: sp.csr_matrix(probs)}, {corpus.dim: counts})


def softmax_rows(S: np.ndarray) -> np.ndarray:
    S = S - S.max(axis=1, keepdims=True)
    E = np.exp(S)
    return E / E.sum(axis=1, keepdims=True)


def decode(method: str, z_a, z_c, context=None) -> float:
    """Decoder value for a pair; ``random_walk`` normalizes ``z_a . z_b`` over ``context``."""
    method = METHOD_ALIASES.get(method, method)
    z_a = np.asarray(z_a, dtype=np.float64)
    z_c = np.asarray(z_c, dtype=np.float64)
    if z_a.shape != z_c.shape:
        raise WidthMismatch(f"embedding widths differ: {z_a.shape} vs {z_c.shape}")
    if method == "laplacian":
        diff = z_a - z_c
        return float(diff @ diff)
    if method == "inner_product":
        return max(0.0, float(z_a @ z_c))
    if method == "random_walk":
        if context is None:
            raise MissingContext("the softmax decoder needs every same-dimension embedding")
        B = np.asarray(context, dtype=np.float64)
        if B.ndim != 2 or B.shape[1] != z_a.shape[0]:
            raise WidthMismatch("context embeddings have the wrong width")
        scores = B @ z_a
        top = max(scores.max(), float(z_a @ z_c))
        return float(np.exp(z_a @ z_c - top) / np.exp(scores - top).sum())
    raise ConfigInvalid(f"unknown method {method!r}")


# -- losses and gradients -----------------------------------------------------


def _pair_lists(X: CellComplex, sim: SimilarityMeasure, k: int):
    """Adjacent pairs of k-cells (unordered unless oriented) with their similarities."""
    A = adjacency_matrix(X, k).matrix.tocoo()
    keep = A.row < A.col if not X.oriented else np.ones(A.nnz, dtype=bool)
    i, j = A.row[keep].astype(np.int64), A.col[keep].astype(np.int64)
    S = sim.blocks.get(k)
    if S is None or i.shape[0] == 0:
        s = np.zeros(i.shape[0])
    else:
        s = np.asarray(S[i, j], dtype=np.float64).ravel()
    return i, j, s


def _counts(sim, k: int):
    if sim is None or sim.counts is None or k not in sim.counts:
        return None
    return sim.counts[k]


def _check_table(X: CellComplex, emb: EmbeddingTable):
    if len(emb.ids) != X.N_hat:
        raise WidthMismatch(f"embedding table has {len(emb.ids)} rows, complex has {X.N_hat}")


def loss_per_dim(method: str, X: CellComplex, emb: EmbeddingTable, sim: SimilarityMeasure) -> dict:
    """Loss contribution of each dimension ``k < n``."""
    method = METHOD_ALIASES.get(method, method)
    _check_table(X, emb)
    out = {}
    for k in range(X.n):
        rows = emb.rows_of_dim(k)
        Z = emb.vectors[rows]
        if method == "random_walk":
            C = _counts(sim, k)
            if C is None or C.nnz == 0:
                out[k] = 0.0
                continue
            S = Z @ Z.T
            lse = S.max(axis=1) + np.log(np.exp(S - S.max(axis=1, keepdims=True)).sum(axis=1))
            Cc = C.tocoo()
            out[k] = float(np.sum(Cc.data * (lse[Cc.row] - S[Cc.row, Cc.col])))
            continue
        i, j, s = _pair_lists(X, sim, k)
        if method == "inner_product":
            r = np.einsum("ij,ij->i", Z[i], Z[j]) - s
            out[k] = float(np.sum(r * r))
        elif method == "laplacian":
            diff = Z[i] - Z[j]
            out[k] = float(np.sum(np.einsum("ij,ij->i", diff, diff) * s))
        else:
            raise ConfigInvalid(f"unknown method {method!r}")
    return out


def loss_total(method: str, X: CellComplex, emb: EmbeddingTable, sim: SimilarityMeasure) -> float:
    return float(sum(loss_per_dim(method, X, emb, sim).values()))


def gradients(method: str, X: CellComplex, emb: EmbeddingTable, sim: SimilarityMeasure) -> np.ndarray:
    """Analytic gradient of :func:`loss_total` with respect to every embedding row."""
    method = METHOD_ALIASES.get(method, method)
    _check_table(X, emb)
    G = np.zeros_like(emb.vectors)
    for k in range(X.n):
        rows = emb.rows_of_dim(k)
        Z = emb.vectors[rows]
        Gk = np.zeros_like(Z)
        if method == "random_walk":
            C = _counts(sim, k)
            if C is None or C.nnz == 0:
                continue
            Cd = C.toarray()
            P = softmax_rows(Z @ Z.T)
            M = Cd.sum(axis=1, keepdims=True) * P - Cd
            Gk = M @ Z + M.T @ Z
        else:
            i, j, s = _pair_lists(X, sim, k)
            if method == "inner_product":
                r = 2.0 * (np.einsum("ij,ij->i", Z[i], Z[j]) - s)
                np.add.at(Gk, i, r[:, None] * Z[j])
                np.add.at(Gk, j, r[:, None] * Z[i])
            elif method == "laplacian":
                g = (2.0 * s)[:, None] * (Z[i] - Z[j])
                np.add.at(Gk, i, g)
                np.add.at(Gk, j, -g)
            else:
                raise ConfigInvalid(f"unknown method {method!r}")
        G[rows] = Gk
    return G


# -- training -----------------------------------------------------------------


def _normalize_rows(Z: np.ndarray, rows) -> None:
    for r in rows:
        nrm = np.sqrt(np.dot(Z[r], Z[r]))
        if nrm > 0.0:
            Z[r] = Z[r] / nrm


def train_embeddings(X: CellComplex, cfg: TrainConfig) -> EmbeddingTable:
    """Fit an embedding table by seeded SGD.

    Initial rows are uniform in ``[-0.5/d, 0.5/d]``.  Each epoch visits the
    training pairs in a fresh seeded shuffle.  ``laplacian`` keeps every
    trained row on the unit sphere (rows are projected at initialization
    and after each step).  ``random_walk`` decays the learning rate linearly
    to 10% over the run.  ``history`` holds the total loss after each epoch.
    """
    if X.n < 1:
        raise ConfigInvalid("embeddings need a complex of dimension >= 1")
    if cfg.dims is None:
        dims = list(range(X.n))
    elif 0 <= cfg.dims < X.n:
        dims = [cfg.dims]
    else:
        raise ConfigInvalid(f"dimension filter {cfg.dims} outside 0..{X.n - 1}")
    rng = np.random.default_rng(cfg.seed)
    half = 0.5 / cfg.d
    Z = np.ascontiguousarray(rng.uniform(-half, half, size=(X.N_hat, cfg.d)))
    table = EmbeddingTable.for_complex(X, Z)
    Z = table.vectors
    method = cfg.method

    if method == "random_walk":
        blocks, counts, batches = {}, {}, []
        for k in dims:
            corpus = generate_walks(X, k, cfg.walk_length, cfg.walks_per_cell, _walk_seed(cfg.seed, k))
            sk = cooccurrence(corpus, cfg.window)
            blocks[k], counts[k] = sk.blocks[k], sk.counts[k]
            C = counts[k].tocoo()
            reps = C.data.astype(np.int64)
            centers = np.repeat(C.row.astype(np.int64), reps)
            contexts = np.repeat(C.col.astype(np.int64), reps)
            batches.append((table.rows_of_dim(k), centers, contexts))
        sim = SimilarityMeasure(blocks, counts)
        total = cfg.epochs * sum(b[1].shape[0] for b in batches)
        step = 0
        for epoch in range(cfg.epochs):
            for rows, centers, contexts in batches:
                P = centers.shape[0]
                if P == 0:
                    continue
                order = rng.permutation(P)
                t = np.arange(step, step + P, dtype=np.float64)
                lrs = cfg.lr * (1.0 - 0.9 * t / total)
                kernels.skipgram_full(Z, rows, centers[order], contexts[order], lrs)
                step += P
            table.history.append(loss_total(method, X, table, sim))
            log.debug("epoch %d loss %.6g", epoch, table.history[-1])
        return table

    sim = similarity_from_adjacency(X)
    ia, ib, ss = [], [], []
    for k in dims:
        rows = table.rows_of_dim(k)
        i, j, s = _pair_lists(X, sim, k)
        ia.append(rows[i])
        ib.append(rows[j])
        ss.append(s)
    ia = np.concatenate(ia) if ia else np.zeros(0, np.int64)
    ib = np.concatenate(ib) if ib else np.zeros(0, np.int64)
    ss = np.concatenate(ss) if ss else np.zeros(0)
    project = method == "laplacian"
    if project:
        _normalize_rows(Z, np.concatenate([table.rows_of_dim(k) for k in dims]))
    code = 0 if method == "inner_product" else 1
    for epoch in range(cfg.epochs):
        order = rng.permutation(ia.shape[0]).astype(np.int64)
        kernels.sgd_pairs(Z, ia, ib, ss, order, cfg.lr, code, project)
        table.history.append(loss_total(method, X, table, sim))
        log.debug("epoch %d loss %.6g", epoch, table.history[-1])
    return table
