"""Pure numpy implementation of the piecewise-Legendre table kernels.

A table covers ``[edges[0], edges[-1]]`` with panels ``[edges[k], edges[k+1]]``.
On panel ``k`` with local coordinate ``s in [-1, 1]`` the density is
``sum_j coef[k, j] P_j(s)`` and the mass accumulated from the panel's left
edge is ``sum_j icoef[k, j] P_j(s)``.  ``cum[k]`` is the mass left of edge
``k`` and ``tail[k]`` the mass right of it; both are stored so that lower and
upper tails keep full relative precision.

The compiled module ``_kernels`` exposes exactly the same functions.
"""
import numpy as np

# three-term recurrence ratios; the compiled kernels use the same table
_J = np.arange(128.0)
_RA = (2.0 * _J + 1.0) / (_J + 1.0)
_RB = _J / (_J + 1.0)


def leg_eval(coef, s):
    """Evaluate row-wise Legendre series ``coef[i]`` at ``s[i]``."""
    d = coef.shape[1]
    p0 = np.ones_like(s)
    out = coef[:, 0] * p0
    if d == 1:
        return out
    p1 = s.copy()
    out = out + coef[:, 1] * p1
    for j in range(1, d - 1):
        if j < 128:
            p2 = _RA[j] * s * p1 - _RB[j] * p0
        else:
            p2 = ((2 * j + 1) * s * p1 - j * p0) / (j + 1)
        out += coef[:, j + 1] * p2
        p0, p1 = p1, p2
    return out


def _panel(edges, x):
    n = edges.shape[0] - 1
    k = np.searchsorted(edges, x, side="right") - 1
    k = np.clip(k, 0, n - 1)
    h = edges[k + 1] - edges[k]
    s = 2.0 * (x - edges[k]) / h - 1.0
    return k, h, np.clip(s, -1.0, 1.0)


def table_pdf(edges, coef, x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x >= edges[0]) & (x <= edges[-1])
    if inside.any():
        k, _, s = _panel(edges, x[inside])
        out[inside] = leg_eval(coef[k], s)
    return np.maximum(out, 0.0)


def table_cdf(edges, icoef, cum, x):
    x = np.asarray(x, dtype=float)
    out = np.where(x < edges[0], 0.0, cum[-1])
    inside = (x >= edges[0]) & (x <= edges[-1])
    if inside.any():
        k, _, s = _panel(edges, x[inside])
        out[inside] = cum[k] + leg_eval(icoef[k], s)
    return np.clip(out, 0.0, 1.0)


def table_sf(edges, icoef, mass, tail, x):
    x = np.asarray(x, dtype=float)
    out = np.where(x < edges[0], tail[0], 0.0)
    inside = (x >= edges[0]) & (x <= edges[-1])
    if inside.any():
        k, _, s = _panel(edges, x[inside])
        out[inside] = tail[k + 1] + (mass[k] - leg_eval(icoef[k], s))
    return np.clip(out, 0.0, 1.0)


def _solve_in_panel(edges, coef, icoef, k, target, xtol):
    # bisection on the monotone within-panel mass, then one Newton step
    h = edges[k + 1] - edges[k]
    lo = np.full(k.shape, -1.0)
    hi = np.ones(k.shape)
    iters = int(np.ceil(np.log2(max(h.max(initial=0.0), xtol) / xtol))) + 2
    for _ in range(max(iters, 1)):
        mid = 0.5 * (lo + hi)
        below = leg_eval(icoef[k], mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    s = 0.5 * (lo + hi)
    f = leg_eval(icoef[k], s) - target
    d = 0.5 * h * leg_eval(coef[k], s)
    ok = d > 0
    step = np.where(ok, f / np.where(ok, d, 1.0), 0.0)
    s = np.clip(s - step, lo, hi)
    return edges[k] + 0.5 * (s + 1.0) * h


def table_ppf(edges, coef, icoef, cum, p, xtol):
    p = np.asarray(p, dtype=float)
    n = edges.shape[0] - 1
    out = np.empty_like(p)
    low = p <= 0.0
    high = p >= cum[-1]
    out[low] = edges[0]
    out[high & ~low] = edges[-1]
    mid = ~(low | high)
    if mid.any():
        pm = p[mid]
        k = np.clip(np.searchsorted(cum, pm, side="right") - 1, 0, n - 1)
        out[mid] = _solve_in_panel(edges, coef, icoef, k, pm - cum[k], xtol)
    return out


def table_isf(edges, coef, icoef, mass, tail, q, xtol):
    q = np.asarray(q, dtype=float)
    n = edges.shape[0] - 1
    out = np.empty_like(q)
    low = q <= 0.0
    high = q >= tail[0]
    out[low] = edges[-1]
    out[high & ~low] = edges[0]
    mid = ~(low | high)
    if mid.any():
        qm = q[mid]
        k = np.clip(np.searchsorted(-tail, -qm, side="left") - 1, 0, n - 1)
        target = mass[k] - (qm - tail[k + 1])
        out[mid] = _solve_in_panel(edges, coef, icoef, k, target, xtol)
    return out
