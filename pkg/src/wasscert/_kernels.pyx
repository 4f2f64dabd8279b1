# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled piecewise-Legendre table kernels.

Same contract as ``wasscert._kernels_py``; see that module for the layout.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, log2, fmax, fmin

cnp.import_array()

# three-term recurrence ratios (2j+1)/(j+1) and j/(j+1); divisions dominate otherwise
DEF MAXDEG = 128
cdef double _RA[MAXDEG]
cdef double _RB[MAXDEG]
cdef Py_ssize_t _j
for _j in range(MAXDEG):
    _RA[_j] = (2.0 * _j + 1.0) / (_j + 1.0)
    _RB[_j] = _j / (_j + 1.0)


cdef inline double _leg(const double[:, ::1] coef, Py_ssize_t k, double s) noexcept nogil:
    cdef Py_ssize_t d = coef.shape[1]
    cdef Py_ssize_t j
    cdef double p0 = 1.0, p1 = s, p2
    cdef double out = coef[k, 0]
    if d == 1:
        return out
    out += coef[k, 1] * s
    for j in range(1, d - 1):
        if j < MAXDEG:
            p2 = _RA[j] * s * p1 - _RB[j] * p0
        else:
            p2 = ((2 * j + 1) * s * p1 - j * p0) / (j + 1)
        out += coef[k, j + 1] * p2
        p0 = p1
        p1 = p2
    return out


cdef inline Py_ssize_t _locate(const double[::1] edges, double x) noexcept nogil:
    # largest k with edges[k] <= x, clipped to a valid panel
    cdef Py_ssize_t lo = 0, hi = edges.shape[0] - 1, mid
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if edges[mid] <= x:
            lo = mid
        else:
            hi = mid
    return lo


cdef inline double _local(const double[::1] edges, Py_ssize_t k, double x) noexcept nogil:
    cdef double s = 2.0 * (x - edges[k]) / (edges[k + 1] - edges[k]) - 1.0
    return fmin(1.0, fmax(-1.0, s))


cdef double _solve(const double[::1] edges, const double[:, ::1] coef,
                   const double[:, ::1] icoef, Py_ssize_t k, double target,
                   double xtol) noexcept nogil:
    cdef double h = edges[k + 1] - edges[k]
    cdef double lo = -1.0, hi = 1.0, mid, s, f, d
    cdef int it, iters = <int>ceil(log2(fmax(h, xtol) / xtol)) + 2
    for it in range(iters):
        mid = 0.5 * (lo + hi)
        if _leg(icoef, k, mid) < target:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    f = _leg(icoef, k, s) - target
    d = 0.5 * h * _leg(coef, k, s)
    if d > 0:
        s = fmin(hi, fmax(lo, s - f / d))
    return edges[k] + 0.5 * (s + 1.0) * h


def leg_eval(double[:, ::1] coef, double[::1] s):
    cdef Py_ssize_t i, n = s.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = _leg(coef, i, s[i])
    return out


def table_pdf(double[::1] edges, double[:, ::1] coef, x):
    xa = np.ascontiguousarray(x, dtype=float)
    flat = xa.reshape(-1)
    cdef double[::1] xv = flat
    out = np.zeros(flat.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i, k, n = flat.shape[0], last = edges.shape[0] - 1
    cdef double v
    with nogil:
        for i in range(n):
            if xv[i] >= edges[0] and xv[i] <= edges[last]:
                k = _locate(edges, xv[i])
                v = _leg(coef, k, _local(edges, k, xv[i]))
                o[i] = v if v > 0.0 else 0.0
    return out.reshape(xa.shape)


def table_cdf(double[::1] edges, double[:, ::1] icoef, double[::1] cum, x):
    xa = np.ascontiguousarray(x, dtype=float)
    flat = xa.reshape(-1)
    cdef double[::1] xv = flat
    out = np.empty(flat.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i, k, n = flat.shape[0], last = edges.shape[0] - 1
    cdef double v
    with nogil:
        for i in range(n):
            if xv[i] < edges[0]:
                v = 0.0
            elif xv[i] > edges[last]:
                v = cum[last]
            else:
                k = _locate(edges, xv[i])
                v = cum[k] + _leg(icoef, k, _local(edges, k, xv[i]))
            o[i] = fmin(1.0, fmax(0.0, v))
    return out.reshape(xa.shape)


def table_sf(double[::1] edges, double[:, ::1] icoef, double[::1] mass,
             double[::1] tail, x):
    xa = np.ascontiguousarray(x, dtype=float)
    flat = xa.reshape(-1)
    cdef double[::1] xv = flat
    out = np.empty(flat.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i, k, n = flat.shape[0], last = edges.shape[0] - 1
    cdef double v
    with nogil:
        for i in range(n):
            if xv[i] < edges[0]:
                v = tail[0]
            elif xv[i] > edges[last]:
                v = 0.0
            else:
                k = _locate(edges, xv[i])
                v = tail[k + 1] + (mass[k] - _leg(icoef, k, _local(edges, k, xv[i])))
            o[i] = fmin(1.0, fmax(0.0, v))
    return out.reshape(xa.shape)


def table_ppf(double[::1] edges, double[:, ::1] coef, double[:, ::1] icoef,
              double[::1] cum, p, double xtol):
    pa = np.ascontiguousarray(p, dtype=float)
    flat = pa.reshape(-1)
    cdef double[::1] pv = flat
    out = np.empty(flat.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i, k, lo, hi, mid, n = flat.shape[0], last = edges.shape[0] - 1
    with nogil:
        for i in range(n):
            if pv[i] <= 0.0:
                o[i] = edges[0]
            elif pv[i] >= cum[last]:
                o[i] = edges[last]
            else:
                # largest k with cum[k] <= p
                lo = 0
                hi = last
                while hi - lo > 1:
                    mid = (lo + hi) // 2
                    if cum[mid] <= pv[i]:
                        lo = mid
                    else:
                        hi = mid
                k = lo
                o[i] = _solve(edges, coef, icoef, k, pv[i] - cum[k], xtol)
    return out.reshape(pa.shape)


def table_isf(double[::1] edges, double[:, ::1] coef, double[:, ::1] icoef,
              double[::1] mass, double[::1] tail, q, double xtol):
    qa = np.ascontiguousarray(q, dtype=float)
    flat = qa.reshape(-1)
    cdef double[::1] qv = flat
    out = np.empty(flat.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i, k, lo, hi, mid, n = flat.shape[0], last = edges.shape[0] - 1
    with nogil:
        for i in range(n):
            if qv[i] <= 0.0:
                o[i] = edges[last]
            elif qv[i] >= tail[0]:
                o[i] = edges[0]
            else:
                # largest k with tail[k] > q
                lo = 0
                hi = last
                while hi - lo > 1:
                    mid = (lo + hi) // 2
                    if tail[mid] > qv[i]:
                        lo = mid
                    else:
                        hi = mid
                k = lo
                o[i] = _solve(edges, coef, icoef, k,
                              mass[k] - (qv[i] - tail[k + 1]), xtol)
    return out.reshape(qa.shape)
