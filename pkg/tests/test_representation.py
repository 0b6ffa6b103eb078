import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gen
from cxnet import (
    EmbeddingTable,
    TrainConfig,
    adjacency_matrix,
    build_complex,
    cooccurrence,
    decode,
    fixtures,
    generate_walks,
    gradients,
    loss_per_dim,
    loss_total,
    similarity_from_adjacency,
    train_embeddings,
)
from cxnet.errors import ConfigInvalid, KOutOfRange, MissingContext, WidthMismatch
from cxnet.representation import WalkCorpus, softmax_rows


def corpus_of(cells, walks):
    pos = {c: i for i, c in enumerate(cells)}
    L = max(len(w) for w in walks)
    arr = np.array([[pos[c] for c in w] + [-1] * (L - len(w)) for w in walks], dtype=np.int64)
    return WalkCorpus(tuple(cells), arr, 0, 0, L, 1)


def no_pairs_complex():
    return build_complex([("u", 0, ()), ("w", 0, ()), ("e", 1, ())])


class TestSimilarity:
    def test_triangle_block(self):
        X = fixtures.triangle()
        S = similarity_from_adjacency(X)
        assert np.array_equal(S.blocks[0].toarray(), adjacency_matrix(X, 0).toarray())
        assert S.value(X, "a", "b") == 1.0 and S.value(X, "a", "a-b") == 0.0

    def test_no_edges_zero(self):
        S = similarity_from_adjacency(no_pairs_complex())
        assert S.blocks[0].nnz == 0


class TestWalks:
    def test_length_one(self):
        X = fixtures.triangle()
        c = generate_walks(X, 0, 1, 2, 5)
        assert c.walks == [("a",), ("b",), ("c",)] * 2

    def test_walks_follow_adjacency_and_start_cells(self):
        X = fixtures.two_triangles()
        c = generate_walks(X, 1, 12, 3, 9)
        K = X.count(1)
        for w, walk in enumerate(c.walks):
            assert walk[0] == X.skeleton(1)[w % K]
            for a, b in zip(walk, walk[1:]):
                assert b in X.neighbors(a, "adjacent")

    def test_halt_at_zero_degree(self):
        X = fixtures.fig4a()  # oriented: v4 has no adjacent cells
        c = generate_walks(X, 0, 6, 1, 0)
        assert c.walks[3] == ("v4",)
        assert (c.index_walks[3, 1:] == -1).all()

    def test_deterministic(self):
        X = fixtures.two_triangles()
        a, b = generate_walks(X, 0, 10, 4, 42), generate_walks(X, 0, 10, 4, 42)
        assert np.array_equal(a.index_walks, b.index_walks)
        assert not np.array_equal(a.index_walks, generate_walks(X, 0, 10, 4, 43).index_walks)

    def test_path_from_b(self):
        X = fixtures.path_graph()
        c = generate_walks(X, 0, 2, 10_000, 1)
        nxt = c.index_walks[1::3, 1]
        assert abs(np.mean(nxt == 0) - 0.5) < 0.02 and abs(np.mean(nxt == 2) - 0.5) < 0.02

    def test_fig4a_ratio_from_v2(self):
        X = fixtures.fig4a().unoriented()
        c = generate_walks(X, 0, 2, 10_000, 1)
        nxt = c.index_walks[1::4, 1]
        # A(v2, v3) = 3, A(v2, v1) = 2
        assert abs(np.mean(nxt == 2) - 0.6) < 0.02 and abs(np.mean(nxt == 0) - 0.4) < 0.02

    @pytest.mark.parametrize("k", [-1, 2])
    def test_out_of_range(self, k):
        with pytest.raises(KOutOfRange):
            generate_walks(fixtures.triangle(), k, 3, 1, 0)


class TestCooccurrence:
    def test_pair(self):
        S = cooccurrence(corpus_of(["a", "b"], [["a", "b"]]), 1)
        assert np.array_equal(S.blocks[0].toarray(), [[0, 1], [1, 0]])

    def test_triple(self):
        S = cooccurrence(corpus_of(["a", "b", "c"], [["a", "b", "c"]]), 1)
        assert S.blocks[0][1, 0] == 0.5 and S.blocks[0][1, 2] == 0.5

    def test_window_and_halts(self):
        S = cooccurrence(corpus_of(["a", "b", "c"], [["a", "b", "c"], ["c"]]), 2)
        assert np.array_equal(S.counts[0].toarray(), [[0, 1, 1], [1, 0, 1], [1, 1, 0]])

    def test_path_estimate(self):
        X = fixtures.path_graph()
        S = cooccurrence(generate_walks(X, 0, 20, 500, 3), 1)
        assert abs(S.blocks[0][1, 0] - 0.5) < 0.02

    def test_bad_window(self):
        with pytest.raises(ConfigInvalid):
            cooccurrence(corpus_of(["a"], [["a"]]), 0)


class TestDecode:
    def test_examples(self):
        assert decode("laplacian", [1.0, 2.0], [1.0, 2.0]) == 0.0
        assert decode("inner_product", [1.0, 0.0], [0.0, 1.0]) == 0.0
        assert decode("ip", [1.0, 0.0], [-1.0, 0.0]) == 0.0
        z = np.ones(3)
        assert decode("random_walk", z, z, context=[z] * 4) == pytest.approx(0.25, abs=1e-15)

    def test_errors(self):
        with pytest.raises(MissingContext):
            decode("random_walk", [1.0], [1.0])
        with pytest.raises(WidthMismatch):
            decode("laplacian", [1.0], [1.0, 2.0])
        with pytest.raises(ConfigInvalid):
            decode("cosine", [1.0], [1.0])

    def test_softmax_rows_sum_to_one(self):
        S = np.random.default_rng(0).standard_normal((6, 6)) * 30
        assert np.allclose(softmax_rows(S).sum(axis=1), 1.0, atol=1e-12, rtol=0)


class TestLosses:
    def test_no_pairs_zero(self):
        X = no_pairs_complex()
        emb = EmbeddingTable.for_complex(X, np.random.default_rng(0).standard_normal((2, 3)))
        sim = similarity_from_adjacency(X)
        for m in ("inner_product", "laplacian", "random_walk"):
            assert loss_total(m, X, emb, sim) == 0.0

    def test_inner_product_exact_factor(self):
        X = fixtures.path_graph()
        # similarities 1 on a-b and b-c; z rows chosen so every adjacent dot is 1
        Z = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 5.0]])
        emb = EmbeddingTable.for_complex(X, Z)
        sim = similarity_from_adjacency(X)
        assert loss_total("ip", X, emb, sim) == 0.0
        assert not gradients("ip", X, emb, sim).any()

    def test_laplacian_collapse(self):
        X = fixtures.triangle()
        emb = EmbeddingTable.for_complex(X, np.ones((X.N_hat, 4)))
        assert loss_total("lap", X, emb, similarity_from_adjacency(X)) == 0.0

    def test_laplacian_antisymmetry(self):
        X = fixtures.path_graph()
        Z = np.random.default_rng(1).standard_normal((3, 2))
        sim = similarity_from_adjacency(X)
        Y = build_complex([("p", 0, ()), ("q", 0, ()), ("e", 1, (("p", 1), ("q", 1)))], oriented=False)
        g = gradients("lap", Y, EmbeddingTable.for_complex(Y, Z[:2]), similarity_from_adjacency(Y))
        assert np.array_equal(g[0], -g[1])
        assert gradients("lap", X, EmbeddingTable.for_complex(X, Z), sim).sum(axis=0) == pytest.approx(np.zeros(2))

    def test_per_dim_sums_to_total(self):
        X = fixtures.triangle()
        emb = EmbeddingTable.for_complex(X, np.random.default_rng(2).standard_normal((6, 3)))
        sim = similarity_from_adjacency(X)
        per = loss_per_dim("ip", X, emb, sim)
        assert set(per) == {0, 1} and sum(per.values()) == pytest.approx(loss_total("ip", X, emb, sim))

    def test_table_mismatch(self):
        X = fixtures.triangle()
        with pytest.raises(WidthMismatch):
            loss_total("ip", X, EmbeddingTable(("a",), (0,), np.zeros((1, 2))), similarity_from_adjacency(X))


def _fd_check(method, X, emb, sim, h=1e-5):
    G = gradients(method, X, emb, sim)
    Z = emb.vectors
    F = np.zeros_like(Z)
    for idx in np.ndindex(*Z.shape):
        old = Z[idx]
        Z[idx] = old + h
        up = loss_total(method, X, emb, sim)
        Z[idx] = old - h
        dn = loss_total(method, X, emb, sim)
        Z[idx] = old
        F[idx] = (up - dn) / (2 * h)
    scale = max(np.linalg.norm(G), np.linalg.norm(F), 1e-300)
    return np.linalg.norm(F - G) / scale


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), method=st.sampled_from(["ip", "lap"]))
def test_gradients_finite_difference(seed, method):
    rng = np.random.default_rng(seed)
    X = gen.random_complex(rng)
    if X.n < 1 or X.N_hat > 16:
        return
    emb = EmbeddingTable.for_complex(X, rng.standard_normal((X.N_hat, 2)))
    assert _fd_check(method, X, emb, similarity_from_adjacency(X)) < 1e-5


def test_random_walk_gradient_finite_difference():
    X = fixtures.two_triangles()
    sim = cooccurrence(generate_walks(X, 0, 6, 2, 0), 2)
    emb = EmbeddingTable.for_complex(X, np.random.default_rng(0).standard_normal((X.N_hat, 3)))
    assert _fd_check("rw", X, emb, sim) < 1e-5


class TestTraining:
    def test_config_validation(self):
        for bad in ({"method": "pca"}, {"d": 0}, {"epochs": 0}, {"lr": 0.0}, {"window": 0}):
            with pytest.raises(ConfigInvalid):
                TrainConfig(**bad)
        assert TrainConfig(method="rw").method == "random_walk"
        with pytest.raises(ConfigInvalid):
            train_embeddings(fixtures.triangle(), TrainConfig(dims=2))

    def test_no_pairs_keeps_init(self):
        X = no_pairs_complex()
        cfg = TrainConfig(method="ip", d=4, epochs=3, seed=5)
        emb = train_embeddings(X, cfg)
        init = np.random.default_rng(5).uniform(-0.125, 0.125, size=(2, 4))
        assert np.array_equal(emb.vectors, init)

    @pytest.mark.parametrize("method", ["ip", "lap", "rw"])
    def test_deterministic(self, method):
        X = fixtures.two_triangles()
        cfg = TrainConfig(method=method, d=4, epochs=4, seed=3, walk_length=6, walks_per_cell=2)
        a, b = train_embeddings(X, cfg), train_embeddings(X, cfg)
        assert np.array_equal(a.vectors, b.vectors) and a.history == b.history
        assert len(a.history) == 4

    def test_laplacian_unit_norms(self):
        X = fixtures.two_triangles()
        for epochs in (1, 7):
            emb = train_embeddings(X, TrainConfig(method="lap", d=3, epochs=epochs, lr=0.1, seed=1))
            assert np.allclose(np.linalg.norm(emb.vectors, axis=1), 1.0, atol=1e-12, rtol=0)

    def test_inner_product_non_increasing(self):
        X = fixtures.triangle()
        emb = train_embeddings(X, TrainConfig(method="ip", d=3, epochs=10, lr=0.01, seed=0))
        h = emb.history
        assert all(b <= a for a, b in zip(h, h[1:]))

    def test_single_dimension_filter(self):
        X = fixtures.two_triangles()
        cfg = TrainConfig(method="ip", d=3, epochs=5, seed=2, dims=0)
        emb = train_embeddings(X, cfg)
        init = np.random.default_rng(2).uniform(-1 / 6, 1 / 6, size=(X.N_hat, 3))
        edges = emb.rows_of_dim(1)
        assert np.array_equal(emb.vectors[edges], init[edges])
        assert not np.array_equal(emb.vectors[emb.rows_of_dim(0)], init[emb.rows_of_dim(0)])

    def test_cell2vec_window_two_vertices_only(self):
        X = fixtures.two_triangles()
        emb = train_embeddings(X, TrainConfig(d=8, seed=7, window=2, dims=0))

        def cos(u, v):
            return u @ v / np.linalg.norm(u) / np.linalg.norm(v)

        intra = [cos(emb[x], emb[y]) for g in ("abc", "def") for x in g for y in g if x < y]
        cross = [cos(emb[x], emb[y]) for x in "abc" for y in "def"]
        assert np.mean(intra) > np.mean(cross)
