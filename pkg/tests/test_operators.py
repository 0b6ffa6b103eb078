import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

import gen
from cxnet import (
    SparseMatrix,
    adjacency_matrix,
    boundary_matrix,
    build_complex,
    build_simplicial,
    coadjacency_matrix,
    degree_matrix,
    fixtures,
    normalized_operator,
)
from cxnet.errors import KOutOfRange, NotSquare

ONES3 = np.ones((3, 3))


def entry(M, r, c):
    return M.toarray()[M.row_labels.index(r), M.col_labels.index(c)]


class TestSparseMatrix:
    def test_duplicates_summed_and_zeros_dropped(self):
        m = sp.csr_matrix((np.array([1.0, 2.0, 0.0]), (np.array([0, 0, 1]), np.array([1, 1, 0]))), shape=(2, 2))
        M = SparseMatrix(m, ("a", "b"), ("a", "b"))
        assert M.triplets() == [(0, 1, 3.0)]
        assert M.nnz == 1

    def test_transpose_swaps_labels(self):
        B = boundary_matrix(fixtures.fig4a(), 1)
        assert B.T.row_labels == B.col_labels and B.T.shape == (7, 4)
        assert np.array_equal(B.T.toarray(), B.toarray().T)


class TestBoundary:
    def test_triangle(self):
        X = build_simplicial([["a", "b", "c"]])
        B1 = boundary_matrix(X, 1).toarray()
        assert B1.shape == (3, 3)
        assert sorted(B1.sum(axis=0)) == [0, 0, 0]
        assert all(sorted(col) == [-1, 0, 1] for col in B1.T)
        assert not (boundary_matrix(X, 1).exact @ boundary_matrix(X, 2).exact).count_nonzero()

    def test_fig4a_e1_column(self):
        B = boundary_matrix(fixtures.fig4a(), 1)
        assert entry(B, "v1", "e1") == -1 and entry(B, "v2", "e1") == 1

    def test_no_k_cells(self):
        X = build_complex([("u", 0, ()), ("w", 0, ()), ("e", 1, (("u", -1), ("w", 1))), ("x", 0, ())])
        assert boundary_matrix(X, 1).shape == (3, 1)

    @pytest.mark.parametrize("k", [0, 3])
    def test_out_of_range(self, k):
        with pytest.raises(KOutOfRange):
            boundary_matrix(fixtures.fig4a(), k)


class TestAdjacency:
    def test_triangle_blocks(self):
        X = fixtures.triangle()
        assert np.array_equal(adjacency_matrix(X, 0).toarray(), ONES3 - np.eye(3))
        assert np.array_equal(adjacency_matrix(X, 1).toarray(), ONES3 - np.eye(3))
        A = adjacency_matrix(X).toarray()
        assert A.shape == (6, 6) and not A[:3, 3:].any() and not A[3:, :3].any()

    def test_fig4a_unoriented_multi_edge(self):
        A = adjacency_matrix(fixtures.fig4a().unoriented(), 0)
        assert entry(A, "v2", "v3") == 3
        assert entry(A, "v2", "v1") == 2

    def test_fig4a_oriented_rows(self):
        A = adjacency_matrix(fixtures.fig4a(), 0)
        assert entry(A, "v2", "v3") == 1  # CO[v3,v2] = {e5}
        assert entry(A, "v3", "v2") == 2  # CO[v2,v3] = {e3,e4}
        assert not A.toarray()[A.row_labels.index("v4")].any()

    def test_no_cofacets_gives_zero_block(self):
        X = build_complex([("u", 0, ()), ("w", 0, ()), ("e", 1, ())])
        A = adjacency_matrix(X, 0)
        assert A.shape == (2, 2) and A.nnz == 0

    def test_graph_equals_graph_adjacency(self):
        X = fixtures.path_graph()
        assert np.array_equal(adjacency_matrix(X).toarray(), [[0, 1, 0], [1, 0, 1], [0, 1, 0]])

    @pytest.mark.parametrize("k", [-1, 2])
    def test_out_of_range(self, k):
        with pytest.raises(KOutOfRange):
            adjacency_matrix(fixtures.triangle(), k)

    def test_zero_dimensional(self):
        with pytest.raises(KOutOfRange):
            adjacency_matrix(build_complex([("u", 0, ())]))


class TestCoadjacency:
    def test_triangle(self):
        X = fixtures.triangle()
        assert np.array_equal(coadjacency_matrix(X, 1).toarray(), ONES3 - np.eye(3))
        assert np.array_equal(coadjacency_matrix(X, 2).toarray(), [[0.0]])
        assert coadjacency_matrix(X).shape == (4, 4)

    def test_fig4b_asymmetric(self):
        A = coadjacency_matrix(fixtures.fig4b(), 2)
        assert A.row_labels == ("F1", "F2")
        # two witnesses, e1 and e2
        assert np.array_equal(A.toarray(), [[0, 2], [0, 0]])

    @pytest.mark.parametrize("k", [0, 3])
    def test_out_of_range(self, k):
        with pytest.raises(KOutOfRange):
            coadjacency_matrix(fixtures.triangle(), k)


class TestDegreeAndNormalized:
    def test_degree_triangle(self):
        D = degree_matrix(adjacency_matrix(fixtures.triangle(), 0))
        assert np.array_equal(D.toarray(), 2 * np.eye(3))

    def test_degree_of_zero(self):
        X = build_complex([("u", 0, ()), ("w", 0, ()), ("e", 1, ())])
        D = degree_matrix(adjacency_matrix(X, 0))
        assert D.nnz == 0 and D.shape == (2, 2)

    def test_not_square(self):
        with pytest.raises(NotSquare):
            degree_matrix(boundary_matrix(fixtures.fig4a(), 1))
        with pytest.raises(NotSquare):
            normalized_operator(boundary_matrix(fixtures.fig4a(), 1))

    def test_renormalized_triangle(self):
        N = normalized_operator(adjacency_matrix(fixtures.triangle(), 0), "renormalized")
        assert np.allclose(N.toarray(), ONES3 / 3, atol=1e-15)

    def test_zero_matrix(self):
        X = build_complex([("u", 0, ()), ("w", 0, ()), ("e", 1, ())])
        A = adjacency_matrix(X, 0)
        for v in ("plain", "renormalized"):
            assert np.array_equal(normalized_operator(A, v).toarray(), np.eye(2))

    def test_single_edge(self):
        X = build_simplicial([["a", "b"]]).unoriented()
        N = normalized_operator(adjacency_matrix(X), "renormalized")
        assert np.allclose(N.toarray(), np.full((2, 2), 0.5))

    def test_plain_triangle(self):
        P = normalized_operator(adjacency_matrix(fixtures.triangle(), 0), "plain").toarray()
        assert np.allclose(P, np.eye(3) + (ONES3 - np.eye(3)) / 2)


def _seeds():
    return st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(_seeds())
def test_unoriented_symmetric_and_block_diagonal(seed):
    X = gen.random_complex(np.random.default_rng(seed)).unoriented()
    for M in (adjacency_matrix(X), coadjacency_matrix(X)):
        A = M.toarray()
        assert np.array_equal(A, A.T)
        assert not np.diag(A).any()
        dims = np.array([X.dim(c) for c in M.row_labels])
        assert not A[dims[:, None] != dims[None, :]].any()


@settings(max_examples=40, deadline=None)
@given(_seeds())
def test_renormalized_spectral_radius(seed):
    X = gen.random_complex(np.random.default_rng(seed)).unoriented()
    N = normalized_operator(adjacency_matrix(X), "renormalized").toarray()
    assert np.max(np.abs(np.linalg.eigvalsh(N))) <= 1 + 1e-12


@settings(max_examples=40, deadline=None)
@given(_seeds())
def test_total_equals_witness_count(seed):
    X = gen.random_complex(np.random.default_rng(seed))
    A = adjacency_matrix(X)
    total = sum(len(X.co_set(a, b, "CO")) for k in range(X.n) for a in X.skeleton(k) for b in X.skeleton(k))
    assert A.toarray().sum() == total
    assert np.array_equal(np.diag(degree_matrix(A).toarray()), A.toarray().sum(axis=1))
