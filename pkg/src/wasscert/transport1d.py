"""Quantile-coupling transport between one-dimensional measures.

The optimal map from ``mu`` to ``nu`` is ``T = Q_nu o F_mu``.  All grids are
parametrised by the probit coordinate ``z`` (``p = Phi(z)``), which puts the
nodes where quantiles change fastest and lets both tails be evaluated
without cancellation.
"""
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, special
from scipy.interpolate import PchipInterpolator

from wasscert.errors import (DegenerateTarget, InadmissiblePair, MissingBounds)
from wasscert.functions import as_function
from wasscert.measure1d import Measure1D, verify_bounds
from wasscert.quadrature import probit_integrate
from wasscert.verdict import Verdict, classify

EPS_GRID = 1e-6
RTOL = 1e-7
DENSITY_FLOOR = 1e-12


def _grid_z(K):
    zmax = -special.ndtri(EPS_GRID)
    return np.linspace(-zmax, zmax, K)


def compose(source: Measure1D, target: Measure1D, x):
    """``Q_target(F_source(x))`` choosing the tail that keeps precision."""
    x = np.asarray(x, dtype=float)
    F = np.atleast_1d(np.asarray(source.cdf(x), dtype=float))
    S = np.atleast_1d(np.asarray(source.sf(x), dtype=float))
    xs = np.atleast_1d(x)
    out = np.empty(xs.shape)
    lower = F <= 0.5
    if lower.any():
        out[lower] = np.atleast_1d(target.ppf(F[lower]))
    if (~lower).any():
        out[~lower] = np.atleast_1d(target.isf(S[~lower]))
    return float(out[0]) if x.ndim == 0 else out.reshape(x.shape)


def ma_slope(source: Measure1D, target: Measure1D, x, y):
    """Monge-Ampere slope ``rho_source(x) / rho_target(y)``."""
    with np.errstate(all="ignore"):
        return np.exp(np.asarray(source.logpdf(x)) - np.asarray(target.logpdf(y)))


@dataclass(frozen=True)
class TransportMap1D:
    source: Measure1D
    target: Measure1D
    z: np.ndarray
    p: np.ndarray
    x: np.ndarray
    y: np.ndarray
    slope: np.ndarray
    flags: frozenset = field(default_factory=frozenset)

    @property
    def K(self):
        return self.z.size

    def __call__(self, x):
        return compose(self.source, self.target, x)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return ma_slope(self.source, self.target, x, self(x))

    def interpolate(self, x):
        """Monotone (PCHIP) interpolation of the grid values."""
        return PchipInterpolator(self.x, self.y, extrapolate=True)(x)

    @property
    def monotone(self):
        return bool(np.all(np.diff(self.y) >= 0))

    def pushforward_defect(self):
        """``max |F_target(T(x_i)) - F_source(x_i)|`` measured in the nearer tail."""
        lower = self.p <= 0.5
        a = np.where(lower, self.target.cdf(self.y), self.target.sf(self.y))
        b = np.where(lower, self.p, special.ndtr(-self.z))
        return float(np.max(np.abs(a - b)))

    def refine(self):
        return optimal_map(self.source, self.target, 2 * self.K - 1)

    def table(self):
        return np.column_stack([self.x, self.y, self.slope])


def optimal_map(source: Measure1D, target: Measure1D, K: int = 256):
    if K < 64:
        raise ValueError("optimal_map needs K >= 64 grid points")
    z = _grid_z(K)
    p = special.ndtr(z)
    x = np.asarray(source.quantile_z(z), dtype=float)
    y = np.asarray(target.quantile_z(z), dtype=float)
    if not np.all(np.isfinite(y)):
        bad = p[~np.isfinite(y)][0]
        raise DegenerateTarget(f"target quantile undefined at p={bad:.6g}")
    if not np.all(np.isfinite(x)):
        raise DegenerateTarget("source quantile undefined on the grid")
    slope = ma_slope(source, target, x, y)
    flags = set(source.flags) | set(target.flags)
    if source.quantile_breaks() or source.kind == "restricted":
        flags.add("source_support_gap")
    return TransportMap1D(source, target, z, p, x, y, slope, frozenset(flags))


def _fd4(f, h):
    # fourth-order first derivative on a uniform grid, one-sided at the ends
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
    d[-1] = -(-25 * f[-1] + 48 * f[-2] - 36 * f[-3] + 16 * f[-4] - 3 * f[-5]) / (12 * h)
    d[-2] = -(-3 * f[-1] - 10 * f[-2] + 18 * f[-3] - 6 * f[-4] + f[-5]) / (12 * h)
    return d


@dataclass(frozen=True)
class ResidualReport:
    residual: float
    slope_ma: np.ndarray
    slope_fd: np.ndarray
    overflow: bool


def ma_residual(T: TransportMap1D):
    """Sup relative residual of ``rho_s(x) = rho_t(T(x)) T'(x)`` on the grid.

    ``T'`` here is a fourth-order difference quotient of the grid map, so
    the residual measures how well the tabulated map obeys the identity.
    """
    h = T.z[1] - T.z[0]
    slope_fd = _fd4(T.y, h) / _fd4(T.x, h)
    rs = np.asarray(T.source.pdf(T.x), dtype=float)
    rt = np.asarray(T.target.pdf(T.y), dtype=float)
    overflow = bool(np.any((rt < 1e-300) & (rs > DENSITY_FLOOR)))
    with np.errstate(all="ignore"):
        res = np.abs(rs - rt * slope_fd) / np.maximum(rs, DENSITY_FLOOR)
    res = res[np.isfinite(res)]
    return ResidualReport(float(res.max()) if res.size else math.inf, T.slope, slope_fd, overflow)


def w2_squared(mu: Measure1D, nu: Measure1D, tol=1e-12):
    """``int_0^1 (Q_mu - Q_nu)^2 dp`` in probit coordinates; (value, error)."""
    breaks = tuple(mu.quantile_breaks()) + tuple(nu.quantile_breaks())
    f = lambda z: (np.asarray(mu.quantile_z(z)) - np.asarray(nu.quantile_z(z))) ** 2
    val, err = probit_integrate(f, breaks, tol=tol)
    return max(val, 0.0), err


def w2(mu: Measure1D, nu: Measure1D):
    return math.sqrt(w2_squared(mu, nu)[0])


def w2_squared_xspace(mu: Measure1D, nu: Measure1D):
    """Independent route: ``int (T(x) - x)^2 dmu(x)`` by adaptive x-quadrature."""
    return mu.expect_x(lambda x: (compose(mu, nu, x) - x) ** 2)


@dataclass(frozen=True)
class ContractionResult:
    sup_slope: float
    bound: float
    verdict: Verdict
    monotone: bool


def contraction_check(T: TransportMap1D, kappa0=None, kappa1=None, atol=1e-8, rtol=RTOL):
    """Compare ``sup T'`` with ``sqrt(kappa0 / kappa1)``.

    ``kappa0`` bounds the source curvature from above and ``kappa1`` the
    target curvature from below; both default to the measures' own bounds
    and are spot-checked against them.
    """
    kappa0 = T.source.kappa_hi if kappa0 is None else kappa0
    kappa1 = T.target.kappa_lo if kappa1 is None else kappa1
    if kappa0 is None or kappa1 is None:
        raise MissingBounds("contraction check needs kappa0 (source upper) and kappa1 "
                            "(target lower) curvature bounds")
    verify_bounds(T.source, kappa_hi=kappa0)
    verify_bounds(T.target, kappa_lo=kappa1)
    bound = math.sqrt(kappa0 / kappa1)
    s = T.slope[np.isfinite(T.slope)]
    sup = float(s.max())
    return ContractionResult(sup, bound, classify(sup, bound, atol, rtol), T.monotone)


@dataclass(frozen=True)
class DualPair:
    """Functions ``f, g`` with ``f(x) + g(y) <= scale * (x - y)**2``."""
    f: object
    g: object
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "f", as_function(self.f))
        object.__setattr__(self, "g", as_function(self.g))

    def margin(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.scale * (x - y) ** 2 - self.f(x) - self.g(y)

    def check_admissible(self, mu: Measure1D, nu: Measure1D, n=201, mass=1 - 1e-4):
        """Sample the margin on an ``n x n`` grid over the central mass of each marginal.

        Raises ``InadmissiblePair`` with the worst sampled point as witness.
        """
        e = 0.5 * (1 - mass)
        xs = np.linspace(float(mu.ppf(e)), float(mu.isf(e)), n)
        ys = np.linspace(float(nu.ppf(e)), float(nu.isf(e)), n)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        fx, gy = self.f(X), self.g(Y)
        cost = self.scale * (X - Y) ** 2
        marg = cost - fx - gy
        tol = 1e-9 * (1.0 + np.abs(fx) + np.abs(gy) + cost)
        worst = np.unravel_index(np.argmin(marg + tol), marg.shape)
        if marg[worst] < -tol[worst]:
            w = (float(X[worst]), float(Y[worst]), float(marg[worst]))
            raise InadmissiblePair(f"f(x) + g(y) exceeds the cost at x={w[0]:.6g}, y={w[1]:.6g} "
                                   f"(margin {w[2]:.6g})", witness=w)
        return float(np.min(marg))


@dataclass(frozen=True)
class DualResult:
    dual: float
    gap: float
    w2_squared: float
    error: float


def dual_gap(pair: DualPair, mu: Measure1D, nu: Measure1D):
    pair.check_admissible(mu, nu)
    ef, e1 = mu.expect(pair.f)
    eg, e2 = nu.expect(pair.g)
    w, e3 = w2_squared(mu, nu)
    dual = ef + eg
    # the pair's cost scale enters the primal value too
    primal = pair.scale * w
    return DualResult(dual, primal - dual, w, e1 + e2 + e3)


def cyclical_monotonicity_defect(x, y, max_len=3):
    """Min over cycles of ``sum <x_i, y_i> - sum <x_i, y_{i+1}>`` (>= 0 when monotone)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    best = math.inf
    for k in range(2, max_len + 1):
        for idx in itertools.combinations(range(n), k):
            base = float(np.dot(x[list(idx)], y[list(idx)]))
            for perm in itertools.permutations(idx[1:]):
                cyc = (idx[0],) + perm
                shifted = cyc[1:] + cyc[:1]
                best = min(best, base - float(np.dot(x[list(cyc)], y[list(shifted)])))
    return best
