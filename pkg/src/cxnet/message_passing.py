"""Forward evaluation of message passing on cell complexes.

Three schemes share one evaluation path:

* ``adjacency``: k-cells (k < n) gather from adjacent k-cells, with the
  shared cofacets' features aggregated into each message.  n-cells are
  never updated; (n-1)-cells read their cofacets from the initial features.
* ``coadjacency``: the mirror image; k-cells (k > 0) gather from coadjacent
  k-cells through shared facets, 0-cells are never updated.
* ``hodge``: every cell gathers from its compatibly oriented facets and
  cofacets, with one message function per neighbour dimension.

Plus :func:`ccxn_forward`, the convolutional layer
``H <- ReLU(A_hat H W)`` on the normalized adjacency operator.

Message functions are :class:`AffineStack` objects.  A message is
``phi(concat(h_c, h_a, F(h_e for witnesses e)))`` and an update is
``alpha(concat(h_c, E(messages)))``.  All cells of a layer read the previous
layer only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .complex import CellComplex
from .errors import (
    ConfigInvalid,
    MissingFeature,
    NotOriented,
    ShapeMismatch,
    UnknownCell,
    WidthMismatch,
)
from .operators import adjacency_matrix, normalized_operator

__all__ = [
    "AffineLayer",
    "AffineStack",
    "FeatureMap",
    "SchemeConfig",
    "CcxnWeights",
    "aggregate",
    "affine_apply",
    "cxn_forward",
    "cxn_forward_hodge",
    "hodge_neighborhood",
    "ccxn_forward",
    "init_scheme_config",
]

ACTIVATIONS = {"identity": kernels.IDENTITY, "relu": kernels.RELU, "tanh": kernels.TANH}
AGGREGATORS = {"sum": kernels.SUM, "mean": kernels.MEAN, "max": kernels.MAX}
SCHEMES = ("adjacency", "coadjacency", "hodge")


@dataclass(frozen=True)
class AffineLayer:
    """``act(x @ weight + bias)`` with ``weight`` of shape (in, out)."""

    weight: np.ndarray
    bias: np.ndarray
    activation: str = "identity"

    def __post_init__(self):
        w = np.array(self.weight, dtype=np.float64, ndmin=2)
        b = np.array(self.bias, dtype=np.float64).reshape(-1)
        if b.shape[0] != w.shape[1]:
            raise WidthMismatch(f"bias width {b.shape[0]} != weight columns {w.shape[1]}")
        if self.activation not in ACTIVATIONS:
            raise ConfigInvalid(f"unknown activation {self.activation!r}")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "bias", b)


@dataclass(frozen=True)
class AffineStack:
    layers: tuple

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ConfigInvalid("an affine stack needs at least one layer")
        for prev, nxt in zip(layers, layers[1:]):
            if prev.weight.shape[1] != nxt.weight.shape[0]:
                raise WidthMismatch(
                    f"layer widths do not compose: {prev.weight.shape} then {nxt.weight.shape}"
                )
        object.__setattr__(self, "layers", layers)

    @property
    def in_width(self) -> int:
        return self.layers[0].weight.shape[0]

    @property
    def out_width(self) -> int:
        return self.layers[-1].weight.shape[1]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return affine_apply(self, x)


def affine_apply(s: AffineStack, x) -> np.ndarray:
    """Apply the stack to one vector or to a batch of row vectors."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x.reshape(1, -1) if single else x
    if batch.shape[1] != s.in_width:
        raise WidthMismatch(f"input width {batch.shape[1]} != stack input width {s.in_width}")
    for layer in s.layers:
        batch = kernels.affine(batch, layer.weight, layer.bias, ACTIVATIONS[layer.activation])
    return batch[0] if single else batch


def aggregate(kind: str, inputs, width: int | None = None) -> np.ndarray:
    """Elementwise sum / mean / max of equal-width vectors; empty input gives zeros."""
    if kind not in AGGREGATORS:
        raise ConfigInvalid(f"unknown aggregator {kind!r}")
    rows = [np.asarray(v, dtype=np.float64).reshape(-1) for v in inputs]
    if not rows:
        if width is None:
            raise WidthMismatch("width must be given for an empty aggregation")
        return np.zeros(width)
    w = rows[0].shape[0] if width is None else width
    if any(r.shape[0] != w for r in rows):
        raise WidthMismatch("aggregated vectors have different widths")
    vals = np.vstack(rows)
    return kernels.segment_reduce(vals, np.array([0, len(rows)]), AGGREGATORS[kind])[0]


@dataclass
class FeatureMap:
    """Per-dimension feature blocks; row i of ``blocks[m]`` belongs to the i-th m-cell."""

    blocks: dict
    layer: int = 0

    def __post_init__(self):
        self.blocks = {
            int(m): np.array(b, dtype=np.float64, ndmin=2) for m, b in self.blocks.items()
        }

    def width(self, m: int) -> int:
        return self.blocks[m].shape[1]

    def widths(self) -> dict:
        return {m: b.shape[1] for m, b in self.blocks.items()}

    def row(self, X: CellComplex, cid: str) -> np.ndarray:
        return self.blocks[X.dim(cid)][X.index_in_dim(cid)]

    @classmethod
    def from_rows(cls, X: CellComplex, rows: dict, dims=None) -> "FeatureMap":
        """Build from ``{cell_id: vector}``; every cell of ``dims`` must be present."""
        dims = range(X.n + 1) if dims is None else dims
        blocks = {}
        for m in dims:
            ids = X.skeleton(m)
            missing = [c for c in ids if c not in rows]
            if missing:
                raise MissingFeature(f"no features for cells {missing[:5]}")
            vecs = [np.asarray(rows[c], dtype=np.float64).reshape(-1) for c in ids]
            if len({v.shape[0] for v in vecs}) > 1:
                raise WidthMismatch(f"features of dimension {m} have different widths")
            blocks[m] = np.vstack(vecs) if vecs else np.zeros((0, 0))
        return cls(blocks)

    def to_rows(self, X: CellComplex) -> dict:
        return {
            cid: self.blocks[m][i]
            for m in sorted(self.blocks)
            for i, cid in enumerate(X.skeleton(m))
        }


@dataclass
class SchemeConfig:
    """Message functions for every (layer, dimension).

    ``alpha[(k, m)]`` and, for the adjacency/coadjacency schemes,
    ``phi[(k, m)]``; for the hodge scheme ``phi[(k, m, d)]`` with ``d`` the
    neighbour dimension.  Layers are numbered from 1.
    ``compatible_sign`` picks which incidence sign counts as a compatible
    orientation in the hodge scheme.
    """

    scheme: str
    alpha: dict
    phi: dict
    outer: str = "sum"
    inner: str = "sum"
    compatible_sign: int = 1
    depth: int = field(default=0)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigInvalid(f"unknown scheme {self.scheme!r}")
        for agg in (self.outer, self.inner):
            if agg not in AGGREGATORS:
                raise ConfigInvalid(f"unknown aggregator {agg!r}")
        if self.compatible_sign not in (1, -1):
            raise ConfigInvalid("compatible_sign must be +1 or -1")
        if not self.depth:
            self.depth = max((k for k, _ in self.alpha), default=0)
        if self.depth < 1:
            raise ConfigInvalid("a scheme needs at least one layer")


@dataclass(frozen=True)
class CcxnWeights:
    """Square weight matrices, one per convolutional layer."""

    matrices: tuple

    def __post_init__(self):
        mats = tuple(np.array(w, dtype=np.float64, ndmin=2) for w in self.matrices)
        if not mats:
            raise ConfigInvalid("at least one weight matrix is required")
        d = mats[0].shape[0]
        for w in mats:
            if w.shape != (d, d):
                raise ShapeMismatch(f"weights must all be {d}x{d}, got {w.shape}")
        object.__setattr__(self, "matrices", mats)

    @property
    def d(self) -> int:
        return self.matrices[0].shape[0]

    @classmethod
    def random(cls, d: int, layers: int, seed: int) -> "CcxnWeights":
        rng = np.random.default_rng(seed)
        bound = np.sqrt(6.0 / (2 * d))
        return cls(tuple(rng.uniform(-bound, bound, size=(d, d)) for _ in range(layers)))


# -- neighbourhood structure -----------------------------------------------


@dataclass(frozen=True)
class _Pairs:
    """Flattened (target, neighbour, witnesses) triples for one dimension."""

    target: np.ndarray
    neighbour: np.ndarray
    target_ptr: np.ndarray
    witness: np.ndarray
    witness_ptr: np.ndarray


@lru_cache(maxsize=64)
def _pair_structure(X: CellComplex, m: int, relation: str) -> _Pairs:
    tgt, nbr, wit, wptr, tptr = [], [], [], [0], [0]
    for i, cid in enumerate(X.skeleton(m)):
        for a, ws in X.witnesses(cid, relation).items():
            tgt.append(i)
            nbr.append(X.index_in_dim(a))
            wit.extend(X.index_in_dim(w) for w in ws)
            wptr.append(len(wit))
        tptr.append(len(tgt))
    as_int = lambda v: np.asarray(v, dtype=np.int64)  # noqa: E731
    return _Pairs(as_int(tgt), as_int(nbr), as_int(tptr), as_int(wit), as_int(wptr))


def _check_features(X: CellComplex, H0: FeatureMap, dims) -> None:
    for m in dims:
        if m not in H0.blocks:
            raise MissingFeature(f"no features for dimension {m}")
        if H0.blocks[m].shape[0] != X.count(m):
            raise MissingFeature(
                f"dimension {m}: {H0.blocks[m].shape[0]} feature rows for {X.count(m)} cells"
            )


def _stack(table: dict, key, what: str) -> AffineStack:
    try:
        return table[key]
    except KeyError:
        raise ConfigInvalid(f"no {what} stack for {key}") from None


def _update(alpha: AffineStack, h: np.ndarray, messages: np.ndarray) -> np.ndarray:
    if alpha.in_width != h.shape[1] + messages.shape[1]:
        raise WidthMismatch(
            f"alpha expects width {alpha.in_width}, got {h.shape[1]} + {messages.shape[1]}"
        )
    return affine_apply(alpha, np.hstack([h, messages]))


def _message_width(alpha: AffineStack, h: np.ndarray) -> int:
    w = alpha.in_width - h.shape[1]
    if w < 0:
        raise WidthMismatch(f"alpha input width {alpha.in_width} below feature width {h.shape[1]}")
    return w


def cxn_forward(X: CellComplex, H0: FeatureMap, cfg: SchemeConfig, layers: int | None = None) -> FeatureMap:
    """Run the adjacency or coadjacency scheme for ``layers`` (default: all) layers."""
    if cfg.scheme == "hodge":
        return cxn_forward_hodge(X, H0, cfg, layers)
    n = X.n
    if cfg.scheme == "adjacency":
        updated, relation, step, frozen = range(0, n), "adjacent", 1, n
    else:
        updated, relation, step, frozen = range(1, n + 1), "coadjacent", -1, 0
    _check_features(X, H0, range(n + 1))
    depth = cfg.depth if layers is None else layers
    if not 1 <= depth <= cfg.depth:
        raise ConfigInvalid(f"requested {depth} layers, config has {cfg.depth}")
    E, F = AGGREGATORS[cfg.outer], AGGREGATORS[cfg.inner]
    H = dict(H0.blocks)
    for k in range(1, depth + 1):
        new = dict(H)
        for m in updated:
            alpha = _stack(cfg.alpha, (k, m), "alpha")
            h = H[m]
            pairs = _pair_structure(X, m, relation)
            src = H0.blocks[frozen] if m + step == frozen else H[m + step]
            mw = _message_width(alpha, h)
            if pairs.target.shape[0]:
                phi = _stack(cfg.phi, (k, m), "phi")
                need = 2 * h.shape[1] + src.shape[1]
                if phi.in_width != need:
                    raise WidthMismatch(f"phi[{k},{m}] expects width {phi.in_width}, needs {need}")
                if phi.out_width != mw:
                    raise WidthMismatch(f"phi[{k},{m}] emits width {phi.out_width}, alpha takes {mw}")
                inner = kernels.segment_reduce(src[pairs.witness], pairs.witness_ptr, F)
                msg_in = np.hstack([h[pairs.target], h[pairs.neighbour], inner])
                msgs = affine_apply(phi, msg_in)
            else:
                msgs = np.zeros((0, mw))
            outer = kernels.segment_reduce(msgs, pairs.target_ptr, E)
            new[m] = _update(alpha, h, outer)
        H = new
    return FeatureMap(H, layer=H0.layer + depth)


def hodge_neighborhood(X: CellComplex, cid: str, compatible_sign: int = 1) -> frozenset:
    """Facets and cofacets of ``cid`` whose incidence sign equals ``compatible_sign``."""
    if not X.oriented:
        raise NotOriented("the hodge neighbourhood needs an oriented complex")
    if cid not in X:
        raise UnknownCell(f"unknown cell {cid!r}")
    down = {f for f, _ in X.facets(cid, sign=compatible_sign)}
    up = {c for c, _ in X.cofacets(cid, sign=compatible_sign)}
    return frozenset(down | up)


def cxn_forward_hodge(X: CellComplex, H0: FeatureMap, cfg: SchemeConfig, layers: int | None = None) -> FeatureMap:
    """Run the homology/cohomology scheme; every dimension is updated."""
    if not X.oriented:
        raise NotOriented("the hodge scheme needs an oriented complex")
    n = X.n
    _check_features(X, H0, range(n + 1))
    depth = cfg.depth if layers is None else layers
    if not 1 <= depth <= cfg.depth:
        raise ConfigInvalid(f"requested {depth} layers, config has {cfg.depth}")
    E = AGGREGATORS[cfg.outer]
    sign = cfg.compatible_sign
    # (target index, neighbour index) pairs per (m, neighbour dim)
    links = {}
    for m in range(n + 1):
        for d, incident in ((m - 1, X.facets), (m + 1, X.cofacets)):
            if not 0 <= d <= n:
                continue
            t, a = [], []
            for i, cid in enumerate(X.skeleton(m)):
                for nb, _ in incident(cid, sign=sign):
                    t.append(i)
                    a.append(X.index_in_dim(nb))
            links[m, d] = (np.asarray(t, dtype=np.int64), np.asarray(a, dtype=np.int64))
    H = dict(H0.blocks)
    for k in range(1, depth + 1):
        new = {}
        for m in range(n + 1):
            alpha = _stack(cfg.alpha, (k, m), "alpha")
            h = H[m]
            mw = _message_width(alpha, h)
            tgts, msgs = [], []
            for d in (m - 1, m + 1):
                t, a = links.get((m, d), (np.zeros(0, np.int64),) * 2)
                if not t.shape[0]:
                    continue
                phi = _stack(cfg.phi, (k, m, d), "phi")
                need = h.shape[1] + H[d].shape[1]
                if phi.in_width != need:
                    raise WidthMismatch(f"phi[{k},{m},{d}] expects width {phi.in_width}, needs {need}")
                if phi.out_width != mw:
                    raise WidthMismatch(f"phi[{k},{m},{d}] emits width {phi.out_width}, alpha takes {mw}")
                tgts.append(t)
                msgs.append(affine_apply(phi, np.hstack([h[t], H[d][a]])))
            if tgts:
                t = np.concatenate(tgts)
                order = np.argsort(t, kind="stable")
                vals = np.vstack(msgs)[order]
                ptr = np.searchsorted(t[order], np.arange(X.count(m) + 1), side="left")
            else:
                vals = np.zeros((0, mw))
                ptr = np.zeros(X.count(m) + 1, dtype=np.int64)
            new[m] = _update(alpha, h, kernels.segment_reduce(vals, ptr, E))
        H = new
    return FeatureMap(H, layer=H0.layer + depth)


def ccxn_forward(
    X: CellComplex,
    H0: np.ndarray,
    weights: CcxnWeights,
    variant: str = "renormalized",
    layers: int | None = None,
) -> np.ndarray:
    """Convolutional layers ``H <- ReLU(A_hat @ H @ W)`` over the cells below the top dimension."""
    H = np.asarray(H0, dtype=np.float64)
    A_hat = normalized_operator(adjacency_matrix(X), variant).matrix
    if H.ndim != 2 or H.shape != (A_hat.shape[0], weights.d):
        raise ShapeMismatch(f"features of shape {H.shape}, expected {(A_hat.shape[0], weights.d)}")
    if layers is not None and not 1 <= layers <= len(weights.matrices):
        raise ConfigInvalid(f"requested {layers} layers, have {len(weights.matrices)}")
    mats = weights.matrices if layers is None else weights.matrices[:layers]
    zero = np.zeros(weights.d)
    for W in mats:
        HW = kernels.affine(H, W, zero, kernels.IDENTITY)
        contrib = A_hat.data[:, None] * HW[A_hat.indices]
        H = kernels.segment_reduce(contrib, A_hat.indptr.astype(np.int64), kernels.SUM)
        np.maximum(H, 0.0, out=H)
    return H


def _random_stack(rng, widths, activation):
    layers = []
    for i, o in zip(widths, widths[1:]):
        bound = np.sqrt(6.0 / (i + o))
        layers.append(
            AffineLayer(rng.uniform(-bound, bound, size=(i, o)), np.zeros(o), activation)
        )
    return AffineStack(tuple(layers))


def init_scheme_config(
    X: CellComplex,
    scheme: str,
    widths: dict,
    depth: int,
    seed: int,
    message_width: int | None = None,
    outer: str = "sum",
    inner: str = "sum",
    activation: str = "relu",
) -> SchemeConfig:
    """Random single-layer stacks keeping every dimension's width fixed across layers.

    ``widths`` maps dimension to feature width.  Weights are Glorot-uniform
    draws from ``numpy.random.default_rng(seed)`` in a fixed order.
    """
    rng = np.random.default_rng(seed)
    n = X.n
    if scheme == "adjacency":
        updated = range(0, n)
    elif scheme == "coadjacency":
        updated = range(1, n + 1)
    elif scheme == "hodge":
        updated = range(0, n + 1)
    else:
        raise ConfigInvalid(f"unknown scheme {scheme!r}")
    alpha, phi = {}, {}
    for k in range(1, depth + 1):
        for m in updated:
            lm = widths[m]
            mw = lm if message_width is None else message_width
            if scheme == "hodge":
                for d in (m - 1, m + 1):
                    if 0 <= d <= n:
                        phi[k, m, d] = _random_stack(rng, [lm + widths[d], mw], activation)
            else:
                wit = widths[m + 1] if scheme == "adjacency" else widths[m - 1]
                phi[k, m] = _random_stack(rng, [2 * lm + wit, mw], activation)
            alpha[k, m] = _random_stack(rng, [lm + mw, lm], activation)
    return SchemeConfig(scheme, alpha, phi, outer=outer, inner=inner, depth=depth)
