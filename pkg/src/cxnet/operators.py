"""Sparse incidence, adjacency and degree operators of a cell complex.

Matrices are stored as ``scipy.sparse.csr_matrix`` (float64) with row and
column label tables.  Rows and columns always follow the canonical cell
order of :class:`~cxnet.complex.CellComplex`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .complex import CellComplex
from .errors import KOutOfRange, NotSquare

__all__ = [
    "SparseMatrix",
    "boundary_matrix",
    "adjacency_matrix",
    "coadjacency_matrix",
    "degree_matrix",
    "normalized_operator",
]


@dataclass(frozen=True)
class SparseMatrix:
    """A labelled sparse matrix.

    ``exact`` optionally carries an integer copy of the entries (boundary
    matrices keep one so chain-complex checks run in exact arithmetic).
    """

    matrix: sp.csr_matrix
    row_labels: tuple
    col_labels: tuple
    exact: sp.csr_matrix | None = None

    def __post_init__(self):
        m = sp.csr_matrix(self.matrix, dtype=np.float64)
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        object.__setattr__(self, "matrix", m)
        if m.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValueError(f"shape {m.shape} does not match label tables")

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def triplets(self) -> list[tuple[int, int, float]]:
        """Nonzero entries as ``(row, col, value)``, row-major."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [
            (int(coo.row[i]), int(coo.col[i]), float(coo.data[i])) for i in order
        ]

    @property
    def T(self) -> "SparseMatrix":
        exact = None if self.exact is None else self.exact.T.tocsr()
        return SparseMatrix(self.matrix.T.tocsr(), self.col_labels, self.row_labels, exact)

    def block(self, rows, cols) -> "SparseMatrix":
        """Sub-matrix on the given label subsets (in the order given)."""
        ri = {lab: i for i, lab in enumerate(self.row_labels)}
        ci = {lab: i for i, lab in enumerate(self.col_labels)}
        r = [ri[x] for x in rows]
        c = [ci[x] for x in cols]
        sub = self.matrix[r][:, c]
        return SparseMatrix(sub, tuple(rows), tuple(cols))


def boundary_matrix(X: CellComplex, k: int) -> SparseMatrix:
    """Signed incidence matrix from k-cells (columns) to (k-1)-cells (rows).

    The coboundary is ``boundary_matrix(X, k).T``.
    """
    if not 1 <= k <= max(X.n, 0):
        raise KOutOfRange(f"boundary order k={k} outside 1..{X.n}")
    rows_ids = X.skeleton(k - 1)
    cols_ids = X.skeleton(k)
    r, c, v = [], [], []
    for j, cid in enumerate(cols_ids):
        for f, s in X.facets(cid):
            r.append(X.index_in_dim(f))
            c.append(j)
            v.append(s)
    shape = (len(rows_ids), len(cols_ids))
    exact = sp.csr_matrix((np.array(v, dtype=np.int64), (r, c)), shape=shape)
    return SparseMatrix(exact.astype(np.float64), tuple(rows_ids), tuple(cols_ids), exact)


def _relation_matrix(X: CellComplex, ids: list[str], relation: str) -> SparseMatrix:
    pos = {cid: i for i, cid in enumerate(ids)}
    r, c, v = [], [], []
    for i, cid in enumerate(ids):
        for a, wit in X.witnesses(cid, relation).items():
            r.append(i)
            c.append(pos[a])
            v.append(len(wit))
    m = sp.csr_matrix((np.array(v, dtype=np.float64), (r, c)), shape=(len(ids), len(ids)))
    return SparseMatrix(m, tuple(ids), tuple(ids))


def adjacency_matrix(X: CellComplex, k: int | None = None) -> SparseMatrix:
    """Adjacency over ``X^{<n}`` (``k=None``) or between k-cells only.

    Entry ``(i, j)`` counts the cells witnessing that ``c_j`` is adjacent to
    ``c_i``; for unoriented complexes that is ``|CO[c_i, c_j]|``.
    """
    if k is None:
        if X.n < 1:
            raise KOutOfRange("adjacency over X^{<n} needs a complex of dimension >= 1")
        ids = X.skeleton(X.n, "<")
    else:
        if not 0 <= k < X.n:
            raise KOutOfRange(f"adjacency block k={k} outside 0..{X.n - 1}")
        ids = X.skeleton(k)
    return _relation_matrix(X, ids, "adjacent")


def coadjacency_matrix(X: CellComplex, k: int | None = None) -> SparseMatrix:
    """Coadjacency over ``X^{>0}`` (``k=None``) or between k-cells only."""
    if k is None:
        if X.n < 1:
            raise KOutOfRange("coadjacency over X^{>0} needs a complex of dimension >= 1")
        ids = X.skeleton(0, ">")
    else:
        if not 0 < k <= X.n:
            raise KOutOfRange(f"coadjacency block k={k} outside 1..{X.n}")
        ids = X.skeleton(k)
    return _relation_matrix(X, ids, "coadjacent")


def _require_square(A: SparseMatrix):
    if A.shape[0] != A.shape[1]:
        raise NotSquare(f"matrix of shape {A.shape} is not square")


def degree_matrix(A: SparseMatrix) -> SparseMatrix:
    _require_square(A)
    deg = np.asarray(A.matrix.sum(axis=1)).ravel()
    return SparseMatrix(sp.diags(deg, format="csr"), A.row_labels, A.col_labels)


def _inv_sqrt(deg: np.ndarray) -> np.ndarray:
    out = np.zeros_like(deg, dtype=np.float64)
    nz = deg > 0
    out[nz] = 1.0 / np.sqrt(deg[nz])
    return out


def normalized_operator(A: SparseMatrix, variant: str = "renormalized") -> SparseMatrix:
    """``I + D^-1/2 A D^-1/2`` (``plain``) or ``D~^-1/2 (A + I) D~^-1/2``.

    Zero degrees map to a zero inverse square root.
    """
    _require_square(A)
    n = A.shape[0]
    eye = sp.identity(n, format="csr", dtype=np.float64)
    if variant == "plain":
        base = A.matrix
    elif variant == "renormalized":
        base = (A.matrix + eye).tocsr()
    else:
        raise ValueError(f"variant must be 'plain' or 'renormalized', not {variant!r}")
    s = _inv_sqrt(np.asarray(base.sum(axis=1)).ravel())
    coo = base.tocoo()
    # (s_i * a_ij) * s_j with a fixed evaluation order, entry by entry
    data = (s[coo.row] * coo.data) * s[coo.col]
    scaled = sp.csr_matrix((data, (coo.row, coo.col)), shape=base.shape)
    if variant == "plain":
        scaled = (scaled + eye).tocsr()
    return SparseMatrix(scaled, A.row_labels, A.col_labels)
