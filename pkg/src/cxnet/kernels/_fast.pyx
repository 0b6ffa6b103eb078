# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the loops in ``_pure.py``."""

import numpy as np

from libc.math cimport exp, sqrt, tanh
from libc.stdlib cimport free, malloc, qsort

DEF SUM = 0
DEF MEAN = 1
DEF MAX = 2


cdef int _cmp(const void *pa, const void *pb) noexcept nogil:
    cdef double a = (<double *>pa)[0]
    cdef double b = (<double *>pb)[0]
    return (a > b) - (a < b)


def segment_reduce(values, indptr, int kind):
    cdef const double[:, ::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef const long long[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef Py_ssize_t nseg = ip.shape[0] - 1
    cdef Py_ssize_t width = v.shape[1]
    out_arr = np.zeros((nseg, width), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t s, j, i, lo, hi, cnt
    cdef double acc
    cdef Py_ssize_t maxlen = 0
    for s in range(nseg):
        if ip[s + 1] - ip[s] > maxlen:
            maxlen = ip[s + 1] - ip[s]
    cdef double *buf = <double *>malloc((maxlen + 1) * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for s in range(nseg):
                lo = ip[s]
                hi = ip[s + 1]
                cnt = hi - lo
                if cnt == 0:
                    continue
                for j in range(width):
                    if kind == MAX:
                        acc = v[lo, j]
                        for i in range(lo + 1, hi):
                            if v[i, j] > acc:
                                acc = v[i, j]
                        out[s, j] = acc
                        continue
                    for i in range(cnt):
                        buf[i] = v[lo + i, j]
                    qsort(buf, cnt, sizeof(double), _cmp)
                    acc = 0.0
                    for i in range(cnt):
                        acc = acc + buf[i]
                    if kind == MEAN:
                        acc = acc / cnt
                    out[s, j] = acc
    finally:
        free(buf)
    return out_arr


def affine(x, W, b, int act):
    cdef const double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[:, ::1] Wv = np.ascontiguousarray(W, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t nb = xv.shape[0], ni = Wv.shape[0], no = Wv.shape[1]
    out_arr = np.zeros((nb, no), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t r, k, j
    cdef double xk, y
    with nogil:
        for r in range(nb):
            for k in range(ni):
                xk = xv[r, k]
                for j in range(no):
                    out[r, j] = out[r, j] + xk * Wv[k, j]
            for j in range(no):
                y = out[r, j] + bv[j]
                if act == 1:
                    if y < 0.0:
                        y = 0.0
                elif act == 2:
                    y = tanh(y)
                out[r, j] = y
    return out_arr


def sample_walks(indptr, indices, cumw, starts, uniforms):
    cdef const long long[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const long long[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const double[::1] cw = np.ascontiguousarray(cumw, dtype=np.float64)
    cdef const long long[::1] st = np.ascontiguousarray(starts, dtype=np.int64)
    cdef const double[:, ::1] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t nwalk = st.shape[0]
    cdef Py_ssize_t length = u.shape[1] + 1
    walks_arr = np.full((nwalk, length), -1, dtype=np.int64)
    cdef long long[:, ::1] walks = walks_arr
    cdef Py_ssize_t w, t, lo, hi, mid, left, right
    cdef long long cur
    cdef double target
    with nogil:
        for w in range(nwalk):
            cur = st[w]
            walks[w, 0] = cur
            for t in range(1, length):
                lo = ip[cur]
                hi = ip[cur + 1]
                if hi == lo:
                    break
                target = u[w, t - 1] * cw[hi - 1]
                # first j with cw[j] > target
                left = lo
                right = hi
                while left < right:
                    mid = (left + right) // 2
                    if cw[mid] <= target:
                        left = mid + 1
                    else:
                        right = mid
                if left > hi - 1:
                    left = hi - 1
                cur = ix[left]
                walks[w, t] = cur
    return walks_arr


def sgd_pairs(double[:, ::1] Z, ia, ib, sims, order, double lr, int method, bint project):
    cdef const long long[::1] av = np.ascontiguousarray(ia, dtype=np.int64)
    cdef const long long[::1] bv = np.ascontiguousarray(ib, dtype=np.int64)
    cdef const double[::1] sv = np.ascontiguousarray(sims, dtype=np.float64)
    cdef const long long[::1] ov = np.ascontiguousarray(order, dtype=np.int64)
    cdef Py_ssize_t d = Z.shape[1], n = ov.shape[0]
    cdef Py_ssize_t step, j, a, b
    cdef double s, r, za, zb, g, nrm
    with nogil:
        for step in range(n):
            a = av[ov[step]]
            b = bv[ov[step]]
            s = sv[ov[step]]
            if method == 0:
                r = 0.0
                for j in range(d):
                    r = r + Z[a, j] * Z[b, j]
                r = 2.0 * (r - s)
                for j in range(d):
                    za = Z[a, j]
                    zb = Z[b, j]
                    Z[a, j] = za - lr * (r * zb)
                    Z[b, j] = zb - lr * (r * za)
            else:
                for j in range(d):
                    za = Z[a, j]
                    zb = Z[b, j]
                    g = (2.0 * s) * (za - zb)
                    Z[a, j] = za - lr * g
                    Z[b, j] = zb + lr * g
            if project:
                nrm = 0.0
                for j in range(d):
                    nrm = nrm + Z[a, j] * Z[a, j]
                nrm = sqrt(nrm)
                if nrm > 0.0:
                    for j in range(d):
                        Z[a, j] = Z[a, j] / nrm
                nrm = 0.0
                for j in range(d):
                    nrm = nrm + Z[b, j] * Z[b, j]
                nrm = sqrt(nrm)
                if nrm > 0.0:
                    for j in range(d):
                        Z[b, j] = Z[b, j] / nrm


def skipgram_full(double[:, ::1] Z, rows, centers, contexts, lrs):
    cdef const long long[::1] rv = np.ascontiguousarray(rows, dtype=np.int64)
    cdef const long long[::1] cv = np.ascontiguousarray(centers, dtype=np.int64)
    cdef const long long[::1] xv = np.ascontiguousarray(contexts, dtype=np.int64)
    cdef const double[::1] lv = np.ascontiguousarray(lrs, dtype=np.float64)
    cdef Py_ssize_t K = rv.shape[0], d = Z.shape[1], n = cv.shape[0]
    p_arr = np.empty(K, dtype=np.float64)
    zc_arr = np.empty(d, dtype=np.float64)
    gc_arr = np.empty(d, dtype=np.float64)
    cdef double[::1] p = p_arr
    cdef double[::1] zc = zc_arr
    cdef double[::1] gc = gc_arr
    cdef Py_ssize_t t, b, j, c, a, rc
    cdef double acc, mx, tot, lr, coef
    with nogil:
        for t in range(n):
            c = cv[t]
            a = xv[t]
            lr = lv[t]
            rc = rv[c]
            for j in range(d):
                zc[j] = Z[rc, j]
            mx = -1e308
            for b in range(K):
                acc = 0.0
                for j in range(d):
                    acc = acc + Z[rv[b], j] * zc[j]
                p[b] = acc
                if acc > mx:
                    mx = acc
            tot = 0.0
            for b in range(K):
                p[b] = exp(p[b] - mx)
                tot = tot + p[b]
            for b in range(K):
                p[b] = p[b] / tot
            for j in range(d):
                gc[j] = -Z[rv[a], j]
            for b in range(K):
                for j in range(d):
                    gc[j] = gc[j] + p[b] * Z[rv[b], j]
            for b in range(K):
                coef = p[b]
                if b == a:
                    coef = coef - 1.0
                for j in range(d):
                    Z[rv[b], j] = Z[rv[b], j] - lr * (coef * zc[j])
            for j in range(d):
                Z[rc, j] = Z[rc, j] - lr * gc[j]
