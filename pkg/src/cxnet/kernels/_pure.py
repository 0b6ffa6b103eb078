"""Reference implementations of the hot loops (numpy + Python loops).

Every function here has a twin with the same signature in ``_fast.pyx``.
Segment sums add values in sorted order so the result does not depend on
the order in which contributions were gathered.
"""

import numpy as np

SUM, MEAN, MAX = 0, 1, 2
IDENTITY, RELU, TANH = 0, 1, 2


def segment_reduce(values, indptr, kind):
    values = np.ascontiguousarray(values, dtype=np.float64)
    indptr = np.asarray(indptr, dtype=np.int64)
    nseg = indptr.shape[0] - 1
    out = np.zeros((nseg, values.shape[1]), dtype=np.float64)
    for s in range(nseg):
        lo, hi = indptr[s], indptr[s + 1]
        if hi == lo:
            continue
        seg = values[lo:hi]
        if kind == MAX:
            out[s] = seg.max(axis=0)
            continue
        acc = np.cumsum(np.sort(seg, axis=0), axis=0)[-1]
        out[s] = acc / (hi - lo) if kind == MEAN else acc
    return out


def affine(x, W, b, act):
    x = np.ascontiguousarray(x, dtype=np.float64)
    W = np.ascontiguousarray(W, dtype=np.float64)
    # row-local sequential accumulation over the input axis
    out = np.zeros((x.shape[0], W.shape[1]), dtype=np.float64)
    for k in range(W.shape[0]):
        out += x[:, k:k + 1] * W[k]
    out += b
    if act == RELU:
        np.maximum(out, 0.0, out=out)
    elif act == TANH:
        np.tanh(out, out=out)
    return out


def sample_walks(indptr, indices, cumw, starts, uniforms):
    nwalk = starts.shape[0]
    length = uniforms.shape[1] + 1
    walks = np.full((nwalk, length), -1, dtype=np.int64)
    for w in range(nwalk):
        cur = starts[w]
        walks[w, 0] = cur
        for t in range(1, length):
            lo, hi = indptr[cur], indptr[cur + 1]
            if hi == lo:
                break
            target = uniforms[w, t - 1] * cumw[hi - 1]
            j = lo + int(np.searchsorted(cumw[lo:hi], target, side="right"))
            cur = indices[min(j, hi - 1)]
            walks[w, t] = cur
    return walks


def sgd_pairs(Z, ia, ib, sims, order, lr, method, project):
    """One pass of pairwise SGD; ``method`` 0 = inner product, 1 = laplacian."""
    for t in order:
        a, b, s = ia[t], ib[t], sims[t]
        za = Z[a].copy()
        zb = Z[b].copy()
        if method == 0:
            r = 2.0 * (float(np.dot(za, zb)) - s)
            Z[a] = za - lr * (r * zb)
            Z[b] = zb - lr * (r * za)
        else:
            g = (2.0 * s) * (za - zb)
            Z[a] = za - lr * g
            Z[b] = zb + lr * g
        if project:
            for i in (a, b):
                nrm = np.sqrt(np.dot(Z[i], Z[i]))
                if nrm > 0.0:
                    Z[i] = Z[i] / nrm


def skipgram_full(Z, rows, centers, contexts, lrs):
    """Full-softmax skip-gram steps over one same-dimension block of ``Z``."""
    for t in range(centers.shape[0]):
        B = Z[rows]
        c, a = centers[t], contexts[t]
        zc = B[c].copy()
        scores = B @ zc
        scores -= scores.max()
        p = np.exp(scores)
        p /= p.sum()
        gc = p @ B - B[a]
        coef = p.copy()
        coef[a] -= 1.0
        lr = lrs[t]
        B -= lr * np.outer(coef, zc)
        B[c] -= lr * gc
        Z[rows] = B
