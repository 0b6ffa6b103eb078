"""Hot loops, compiled when the extension is available.

The compiled module ``_fast`` is used when it imports; otherwise, or when
``CXNET_PURE_PYTHON=1`` is set, the numpy reference ``_pure`` is used.
Both expose the same functions.
"""

import os

from . import _pure

pure = _pure

if os.environ.get("CXNET_PURE_PYTHON", "") not in ("", "0"):
    fast = None
else:
    try:
        from . import _fast as fast
    except ImportError:
        fast = None

backend = fast if fast is not None else _pure
BACKEND = "compiled" if fast is not None else "pure"

SUM, MEAN, MAX = _pure.SUM, _pure.MEAN, _pure.MAX
IDENTITY, RELU, TANH = _pure.IDENTITY, _pure.RELU, _pure.TANH


def segment_reduce(values, indptr, kind):
    return backend.segment_reduce(values, indptr, kind)


def affine(x, W, b, act):
    return backend.affine(x, W, b, act)


def sample_walks(indptr, indices, cumw, starts, uniforms):
    return backend.sample_walks(indptr, indices, cumw, starts, uniforms)


def sgd_pairs(Z, ia, ib, sims, order, lr, method, project):
    return backend.sgd_pairs(Z, ia, ib, sims, order, lr, method, project)


def skipgram_full(Z, rows, centers, contexts, lrs):
    return backend.skipgram_full(Z, rows, centers, contexts, lrs)
