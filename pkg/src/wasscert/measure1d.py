"""One-dimensional probability measures.

Every measure exposes the same evaluation surface (log-density, CDF,
survival function, quantiles in both tails, moments and mode) so the
transport and functional layers never branch on the variant.

Variants
--------
Gaussian        closed forms through ``scipy.special.ndtr``/``ndtri``.
ExpPotential    density ``exp(-V - logZ)`` tabulated on adaptive panels.
GridDensity     piecewise-linear density through user nodes.
Restricted      base measure conditioned on a finite union of intervals;
                CDF and quantiles are rescalings of the base ones.
Tilted          ``exp(kappa F) m`` normalised, tabulated like ExpPotential.
Translated      push-forward of a base measure by ``x -> x + a``.
"""
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize, special
from numpy.polynomial import legendre as L

from wasscert import kernels
from wasscert.errors import (AmbiguousMode, BoundMismatch, DomainError, EmptyRestriction,
                             InvalidPotential, NonIntegrable)
from wasscert.functions import FunctionSpec, as_function
from wasscert.quadrature import ZMAX, gauss_legendre, probit_integrate

logger = logging.getLogger(__name__)

ATOL_NORM = 1e-9
TAIL_LEVEL = 75.0          # tables stop where log-density is this far below its max
TABLE_ORDER = 16
XTOL = 1e-12
MODE_TOL_D = 1e-9
_MAX_PANELS = 1 << 15
_MAX_WIDTH = 1e6
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _like(x, out):
    return float(out) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------- potentials

@dataclass(frozen=True)
class PotentialSpec:
    """A potential ``V`` defining the measure ``exp(-V) dx``.

    ``kappa_lo``/``kappa_hi`` bound ``V''`` from below/above when known.
    """
    family: str
    fn: FunctionSpec
    kappa_lo: Optional[float] = None
    kappa_hi: Optional[float] = None
    minimizer: Optional[float] = None
    coefficients: Optional[Tuple[float, ...]] = None

    @classmethod
    def quadratic(cls, kappa=1.0, center=0.0, shift=0.0):
        if kappa <= 0:
            raise InvalidPotential("quadratic potential needs kappa > 0")
        expr = f"{float(kappa)!r}/2*(x - {float(center)!r})**2 + {float(shift)!r}"
        return cls("quadratic", FunctionSpec.from_expr(expr), float(kappa), float(kappa),
                   float(center))

    @classmethod
    def polynomial(cls, coefficients, kappa_lo=None, kappa_hi=None, minimizer=None):
        """``V(x) = sum_k c_k x**k`` with ascending coefficients.

        Convexity bounds are inferred from ``V''`` unless given.
        """
        c = [float(v) for v in coefficients]
        if not c or not all(np.isfinite(c)):
            raise InvalidPotential(f"bad polynomial coefficients {coefficients!r}")
        expr = " + ".join(f"({v!r})*x**{k}" for k, v in enumerate(c)) or "0"
        lo, hi = _polynomial_curvature_bounds(c)
        kappa_lo = lo if kappa_lo is None else float(kappa_lo)
        kappa_hi = hi if kappa_hi is None else float(kappa_hi)
        return cls("polynomial", FunctionSpec.from_expr(expr), kappa_lo, kappa_hi,
                   minimizer, tuple(c))

    @classmethod
    def custom(cls, fn, kappa_lo=None, kappa_hi=None, minimizer=None):
        return cls("custom", as_function(fn), kappa_lo, kappa_hi, minimizer)

    def V(self, x):
        return self.fn(x)

    def dV(self, x):
        return self.fn.derivative(x)

    def d2V(self, x):
        return self.fn.second_derivative(x)

    def check_bounds(self, grid, tol=1e-8):
        """Raise ``BoundMismatch`` if declared bounds fail on ``grid``."""
        d2 = self.d2V(np.asarray(grid, dtype=float))
        _check_curvature(grid, d2, self.kappa_lo, self.kappa_hi, tol)

    def derivative_defect(self, grid, h=1e-4):
        """Max ``|V' - central difference|``; O(h**2) for smooth ``V``."""
        x = np.asarray(grid, dtype=float)
        fd = (self.V(x + h) - self.V(x - h)) / (2 * h)
        return float(np.max(np.abs(self.dV(x) - fd)))


def _polynomial_curvature_bounds(c):
    d2 = np.polynomial.polynomial.polyder(c, 2) if len(c) > 2 else np.zeros(1)
    d2 = np.trim_zeros(np.atleast_1d(d2), "b")
    if d2.size == 0:
        return None, None
    if d2.size == 1:
        v = float(d2[0])
        return (v if v > 0 else None), (v if v > 0 else None)
    if (d2.size - 1) % 2 == 1 or d2[-1] < 0:
        return None, None
    crit = np.polynomial.polynomial.polyroots(np.polynomial.polynomial.polyder(d2))
    crit = np.real(crit[np.abs(np.imag(crit)) < 1e-9])
    lo = float(np.min(np.polynomial.polynomial.polyval(crit, d2))) if crit.size else None
    return (lo if lo is not None and lo > 0 else None), None


def _check_curvature(grid, d2, kappa_lo, kappa_hi, tol):
    grid = np.asarray(grid, dtype=float)
    if kappa_lo is not None:
        i = int(np.argmin(d2))
        if d2[i] < kappa_lo - tol:
            raise BoundMismatch(f"declared kappa_lo={kappa_lo:g} but curvature is "
                                f"{d2[i]:.6g} at x={grid[i]:.6g}")
    if kappa_hi is not None:
        i = int(np.argmax(d2))
        if d2[i] > kappa_hi + tol:
            raise BoundMismatch(f"declared kappa_hi={kappa_hi:g} but curvature is "
                                f"{d2[i]:.6g} at x={grid[i]:.6g}")


# ---------------------------------------------------------------- intervals

class IntervalSet:
    """Sorted union of disjoint closed intervals; endpoints may be infinite."""

    def __init__(self, intervals):
        items = []
        for lo, hi in intervals:
            lo, hi = _endpoint(lo), _endpoint(hi)
            if not lo <= hi:
                raise DomainError(f"empty interval [{lo}, {hi}]")
            items.append((lo, hi))
        items.sort()
        merged = []
        for lo, hi in items:
            if merged and lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        if not merged:
            raise DomainError("interval set needs at least one interval")
        self.intervals = tuple(merged)

    @classmethod
    def real_line(cls):
        return cls([(-math.inf, math.inf)])

    @property
    def is_real_line(self):
        return self.intervals == ((-math.inf, math.inf),)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.intervals:
            out |= (x >= lo) & (x <= hi)
        return out

    def distance(self, other):
        """``inf |x - y|`` over ``x`` in self and ``y`` in other."""
        best = math.inf
        for a0, a1 in self.intervals:
            for b0, b1 in other.intervals:
                best = min(best, max(0.0, b0 - a1, a0 - b1))
        return best

    def mirror(self):
        return IntervalSet([(-hi, -lo) for lo, hi in self.intervals])

    def to_list(self):
        return [[_fmt_end(lo), _fmt_end(hi)] for lo, hi in self.intervals]

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __repr__(self):
        return "IntervalSet(" + ", ".join(f"[{lo:g}, {hi:g}]" for lo, hi in self.intervals) + ")"


def _endpoint(v):
    if v is None:
        raise DomainError("interval endpoint missing")
    if isinstance(v, str):
        v = float(v.strip().replace("infinity", "inf"))
    v = float(v)
    if math.isnan(v):
        raise DomainError("interval endpoint is NaN")
    return v


def _fmt_end(v):
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


# ---------------------------------------------------------------- tables

@dataclass(frozen=True)
class _Table:
    edges: np.ndarray
    coef: np.ndarray
    icoef: np.ndarray
    cum: np.ndarray
    mass: np.ndarray
    tail: np.ndarray

    @classmethod
    def from_coefficients(cls, edges, coef):
        edges = np.ascontiguousarray(edges, dtype=float)
        coef = np.ascontiguousarray(coef, dtype=float)
        h = np.diff(edges)
        icoef = 0.5 * h[:, None] * L.legint(coef, lbnd=-1, axis=1)
        mass = h * coef[:, 0]
        total = mass.sum()
        coef, icoef, mass = coef / total, icoef / total, mass / total
        cum = np.concatenate([[0.0], np.cumsum(mass)])
        tail = np.concatenate([np.cumsum(mass[::-1])[::-1], [0.0]])
        return cls(edges, coef, np.ascontiguousarray(icoef), cum, mass, tail), float(total)

    def pdf(self, x):
        return kernels.table_pdf(self.edges, self.coef, np.atleast_1d(np.asarray(x, float)))

    def cdf(self, x):
        return kernels.table_cdf(self.edges, self.icoef, self.cum,
                                 np.atleast_1d(np.asarray(x, float)))

    def sf(self, x):
        return kernels.table_sf(self.edges, self.icoef, self.mass, self.tail,
                                np.atleast_1d(np.asarray(x, float)))

    def ppf(self, p):
        return kernels.table_ppf(self.edges, self.coef, self.icoef, self.cum,
                                 np.atleast_1d(np.asarray(p, float)), XTOL)

    def isf(self, q):
        return kernels.table_isf(self.edges, self.coef, self.icoef, self.mass, self.tail,
                                 np.atleast_1d(np.asarray(q, float)), XTOL)


def _panel_coefficients(logf, edges, shift):
    s, w = gauss_legendre(TABLE_ORDER)
    h = np.diff(edges)
    x = edges[:-1, None] + 0.5 * (s[None, :] + 1.0) * h[:, None]
    lv = np.asarray(logf(x), dtype=float)
    if np.isnan(lv).any():
        bad = x[np.isnan(lv)][0]
        raise InvalidPotential(f"log-density is NaN at x={bad:.6g}")
    vals = np.exp(lv - shift)
    # discrete Legendre transform on the Gauss nodes (exact up to degree 15)
    P = L.legvander(s, TABLE_ORDER - 1)
    coef = (vals * w[None, :]) @ P * ((2 * np.arange(TABLE_ORDER) + 1) / 2.0)[None, :]
    return coef


def _find_mode(logf, support, hint, scale_hint):
    lo, hi = support
    x0 = 0.0 if hint is None else float(hint)
    x0 = min(max(x0, lo), hi)
    neg = lambda t: -float(np.asarray(logf(np.array([t])))[0])
    try:
        if math.isfinite(lo) or math.isfinite(hi):
            a = lo if math.isfinite(lo) else min(x0, hi) - 1e3
            b = hi if math.isfinite(hi) else max(x0, lo) + 1e3
            res = optimize.minimize_scalar(neg, bounds=(a, b), method="bounded",
                                           options={"xatol": 1e-12})
        else:
            with np.errstate(all="ignore"):
                res = optimize.minimize_scalar(neg, bracket=(x0 - 1.0, x0 + 1.0),
                                               options={"xtol": 1e-12})
        xm = float(res.x)
    except (RuntimeError, ValueError, OverflowError):
        xm = x0
    if not math.isfinite(xm) or abs(xm) > 1e8 or not math.isfinite(neg(xm)):
        raise NonIntegrable("density has no finite maximiser")
    return xm


def _scan(logf, support, center, scale):
    """Window around ``center`` whose ends fall below the tail level."""
    lo, hi = support
    width = 4.0 * scale
    while width <= _MAX_WIDTH:
        a, b = max(lo, center - width), min(hi, center + width)
        x = np.linspace(a, b, 801)
        with np.errstate(all="ignore"):
            lv = np.asarray(logf(x), dtype=float)
        if np.isnan(lv).any():
            raise InvalidPotential(f"log-density is NaN at x={x[np.isnan(lv)][0]:.6g}")
        top = np.max(lv)
        if not math.isfinite(top):
            raise NonIntegrable("log-density is not finite near its maximiser")
        level = top - TAIL_LEVEL
        left_ok = a == lo or lv[0] < level
        right_ok = b == hi or lv[-1] < level
        if left_ok and right_ok:
            return x, lv
        width *= 2.0
    raise NonIntegrable("density does not decay: tail search exceeded |x| > 1e6")


class Measure1D:
    """Common interface; subclasses supply the primitives."""

    kind = "abstract"
    flags: frozenset = frozenset()

    # primitives -----------------------------------------------------------
    def logpdf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def sf(self, x):
        raise NotImplementedError

    def ppf(self, p):
        raise NotImplementedError

    def isf(self, q):
        raise NotImplementedError

    def dlogpdf(self, x):
        """Score ``(log rho)'``; NaN outside the support."""
        raise NotImplementedError

    def curvature(self, x):
        """``-(log rho)''`` or NaN when unknown."""
        x = np.asarray(x, dtype=float)
        return _like(x, np.full(x.shape, np.nan))

    @property
    def support(self):
        return (-math.inf, math.inf)

    @property
    def mode(self):
        raise NotImplementedError

    kappa_lo: Optional[float] = None
    kappa_hi: Optional[float] = None

    # derived ----------------------------------------------------------------
    def pdf(self, x):
        with np.errstate(under="ignore"):
            return _like(x, np.exp(np.asarray(self.logpdf(x), dtype=float)))

    def quantile_z(self, z):
        """``Q(Phi(z))`` using the upper tail for ``z > 0`` to keep precision."""
        z = np.asarray(z, dtype=float)
        out = np.empty(z.shape)
        neg = z <= 0
        if neg.any():
            out[neg] = self.ppf(special.ndtr(z[neg]))
        if (~neg).any():
            out[~neg] = self.isf(special.ndtr(-z[~neg]))
        return _like(z, out)

    def log_density_z(self, z):
        """``log rho(Q(Phi(z)))``."""
        return self.logpdf(self.quantile_z(z))

    def quantile_breaks(self):
        """Probabilities where the quantile function jumps."""
        return ()

    @property
    def is_standard_gaussian(self):
        return False

    def expect(self, g, tol=1e-12):
        """``int g dmu`` in quantile coordinates; returns (value, error)."""
        return probit_integrate(lambda z: g(self.quantile_z(z)),
                                self.quantile_breaks(), tol=tol)

    def expect_x(self, g):
        """``int g dmu`` by adaptive quadrature in x (independent route)."""
        total, err = 0.0, 0.0
        lo, hi = self.effective_support
        for a, b in self._x_pieces():
            # mass outside the probit window is below 1e-19
            a, b = max(a, lo), min(b, hi)
            if a >= b:
                continue
            def f(x):
                d = float(self.pdf(np.array([x]))[0])
                # beyond the tabulated tail the integrand may be inf * 0
                return float(g(np.array([x]))[0]) * d if d > 0.0 else 0.0
            pts = [p for p in (self.mode,) if a < p < b]
            v, e = integrate.quad(f, a, b, points=pts or None, limit=400,
                                  epsabs=1e-14, epsrel=1e-12)
            total += v
            err += e
        return total, err

    def _x_pieces(self):
        lo, hi = self.effective_support
        return [(lo, hi)]

    @cached_property
    def effective_support(self):
        lo, hi = self.quantile_z(np.array([-ZMAX - 0.5, ZMAX + 0.5]))
        return float(lo), float(hi)

    @cached_property
    def mean(self):
        return self.expect(lambda x: x)[0]

    @cached_property
    def second_moment(self):
        return self.expect(lambda x: x * x)[0]

    @property
    def variance(self):
        return max(self.second_moment - self.mean ** 2, 0.0)

    def tail_bound_constant(self):
        """``C`` with ``mu(|x - mode| > R) <= C exp(-kappa_lo R**2 / 2)``."""
        if not self.kappa_lo:
            return None
        return float(self.pdf(self.mode)) * math.sqrt(2 * math.pi / self.kappa_lo)

    def translate(self, a):
        return Translated(self, float(a)) if a else self

    def describe(self):
        return self.kind


# ---------------------------------------------------------------- Gaussian

class Gaussian(Measure1D):
    kind = "gaussian"

    def __init__(self, mean=0.0, var=1.0):
        if not var > 0 or not math.isfinite(var):
            raise DomainError(f"Gaussian variance must be positive, got {var!r}")
        self.a = float(mean)
        self.var = float(var)
        self.sigma = math.sqrt(self.var)
        self.kappa_lo = self.kappa_hi = 1.0 / self.var

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        return _like(x, -0.5 * (x - self.a) ** 2 / self.var - _LOG_SQRT_2PI - math.log(self.sigma))

    def dlogpdf(self, x):
        x = np.asarray(x, dtype=float)
        return _like(x, -(x - self.a) / self.var)

    def curvature(self, x):
        x = np.asarray(x, dtype=float)
        return _like(x, np.full(x.shape, 1.0 / self.var))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return _like(x, special.ndtr((x - self.a) / self.sigma))

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        return _like(x, special.ndtr((self.a - x) / self.sigma))

    def ppf(self, p):
        p = np.asarray(p, dtype=float)
        return _like(p, self.a + self.sigma * special.ndtri(p))

    def isf(self, q):
        q = np.asarray(q, dtype=float)
        return _like(q, self.a - self.sigma * special.ndtri(q))

    def quantile_z(self, z):
        z = np.asarray(z, dtype=float)
        return _like(z, self.a + self.sigma * z)

    @property
    def mode(self):
        return self.a

    @cached_property
    def mean(self):
        return self.a

    @cached_property
    def second_moment(self):
        return self.a ** 2 + self.var

    @property
    def is_standard_gaussian(self):
        return self.a == 0.0 and self.var == 1.0

    def translate(self, a):
        return Gaussian(self.a + float(a), self.var)

    def describe(self):
        return f"N({self.a:g}, {self.var:g})"


def standard_gaussian():
    return Gaussian(0.0, 1.0)


# ---------------------------------------------------------------- tabulated

class TabulatedMeasure(Measure1D):
    """Measure with unnormalised log-density ``logf`` tabulated on panels."""

    def _build(self, logf, support=(-math.inf, math.inf), hint=None, scale=None):
        xm = _find_mode(logf, support, hint, scale)
        if scale is None:
            c = float(np.asarray(self.curvature(np.array([xm])))[0])
            scale = 1.0 / math.sqrt(c) if math.isfinite(c) and c > 1e-12 else 1.0
        x, lv = _scan(logf, support, xm, scale)
        i = int(np.argmax(lv))
        if lv[i] > float(np.asarray(logf(np.array([xm])))[0]) + 1e-12:
            xm = _find_mode(logf, (max(support[0], x[max(i - 1, 0)]),
                                   min(support[1], x[min(i + 1, x.size - 1)])), x[i], scale)
        lmax = float(np.asarray(logf(np.array([xm])))[0])
        level = lmax - TAIL_LEVEL
        above = np.nonzero(lv >= level)[0]
        lo = x[max(above[0] - 1, 0)]
        hi = x[min(above[-1] + 1, x.size - 1)]
        self._tabulate(logf, lo, hi, lmax)
        self._mode_guess = xm
        self._log_unnorm_max = lmax
        self._support = support

    def _tabulate(self, logf, lo, hi, shift):
        n = 16
        prev = None
        while True:
            edges = np.linspace(lo, hi, n + 1)
            coef = _panel_coefficients(logf, edges, shift)
            total = float(np.sum(np.diff(edges) * coef[:, 0]))
            if not total > 0 or not math.isfinite(total):
                raise NonIntegrable("density integrates to zero or infinity")
            peak = float(np.max(np.abs(coef[:, 0])))
            trailing = float(np.max(np.abs(coef[:, -2:])))
            if prev is not None and abs(total - prev) <= 1e-13 * total and trailing <= 1e-13 * peak:
                break
            if n >= _MAX_PANELS:
                logger.warning("density table stopped at %d panels", n)
                break
            prev = total
            n *= 2
        self.table, mass = _Table.from_coefficients(edges, coef)
        self.log_mass = math.log(mass) + shift

    def cdf(self, x):
        return _like(x, self.table.cdf(x).reshape(np.shape(x)))

    def sf(self, x):
        return _like(x, self.table.sf(x).reshape(np.shape(x)))

    def ppf(self, p):
        return _like(p, self.table.ppf(p).reshape(np.shape(p)))

    def isf(self, q):
        return _like(q, self.table.isf(q).reshape(np.shape(q)))

    @property
    def support(self):
        return self._support

    @cached_property
    def mode(self):
        return _checked_mode(self.logpdf, self._mode_guess, self.table.edges[0],
                             self.table.edges[-1])

    def _x_pieces(self):
        return [(float(self.table.edges[0]), float(self.table.edges[-1]))]


def _checked_mode(logpdf, guess, lo, hi, n=4001):
    """Sampled maximiser with the ambiguity test."""
    x = np.linspace(lo, hi, n)
    with np.errstate(under="ignore"):
        d = np.exp(np.asarray(logpdf(x), dtype=float))
    dg = math.exp(float(np.asarray(logpdf(np.array([guess])))[0]))
    scale = max(hi - lo, 1e-300)
    tol_x = 1e-6 * scale
    # strict local maxima of the sampled density (plateaus count once)
    peaks = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and abs(d[j + 1] - d[i]) <= 1e-15 * max(d[i], 1e-300):
            j += 1
        left = d[i - 1] if i > 0 else -1.0
        right = d[j + 1] if j + 1 < n else -1.0
        if d[i] > left and d[i] > right and d[i] > 0:
            a, b, v = x[i], x[j], d[i]
            if j == i:
                # sampled peak: polish it so its height is comparable with the guess
                lo_b, hi_b = x[max(i - 1, 0)], x[min(i + 1, n - 1)]
                res = optimize.minimize_scalar(
                    lambda t: -float(np.asarray(logpdf(np.array([t])))[0]),
                    bounds=(lo_b, hi_b), method="bounded", options={"xatol": 1e-12})
                a = b = float(res.x)
                v = math.exp(-float(res.fun))
            peaks.append((a, b, v))
        i = j + 1
    for a, b, v in peaks:
        if b - a > tol_x and abs(v - dg) < MODE_TOL_D * max(dg, 1.0):
            raise AmbiguousMode(f"density is flat at its maximum on [{a:.6g}, {b:.6g}]")
        centre = 0.5 * (a + b)
        if abs(centre - guess) > max(tol_x, 2 * scale / (n - 1)) and abs(v - dg) < MODE_TOL_D * max(dg, 1.0):
            raise AmbiguousMode(f"density maxima at {guess:.6g} and {centre:.6g} "
                                f"differ by less than {MODE_TOL_D:g}")
    return float(guess)


class ExpPotential(TabulatedMeasure):
    kind = "potential"

    def __init__(self, potential: PotentialSpec, domain_hint=None):
        self.potential = potential
        self.kappa_lo = potential.kappa_lo
        self.kappa_hi = potential.kappa_hi
        hint = potential.minimizer
        if hint is None and domain_hint is not None:
            hint = 0.5 * (domain_hint[0] + domain_hint[1])
        scale = None
        if domain_hint is not None:
            scale = max(1e-6, 0.125 * (domain_hint[1] - domain_hint[0]))
        logf = lambda x: -potential.V(x)
        self._build(logf, hint=hint, scale=scale)
        self.logZ = self.log_mass

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        return _like(x, -self.potential.V(x) - self.logZ)

    def dlogpdf(self, x):
        x = np.asarray(x, dtype=float)
        return _like(x, -self.potential.dV(x))

    def curvature(self, x):
        x = np.asarray(x, dtype=float)
        return _like(x, self.potential.d2V(x))

    def describe(self):
        return f"exp(-({self.potential.fn.label}))/Z"


class Tilted(TabulatedMeasure):
    """``exp(kappa F) m / int exp(kappa F) dm`` for an unrestricted base ``m``."""
    kind = "tilted"

    def __init__(self, base: Measure1D, F: FunctionSpec, kappa: float):
        self.base = base
        self.F = F
        self.strength = float(kappa)
        self.flags = base.flags
        c = F.constant_second_derivative()
        self.kappa_lo = self.kappa_hi = None
        if c is not None:
            if base.kappa_lo is not None and base.kappa_lo - kappa * c > 0:
                self.kappa_lo = base.kappa_lo - kappa * c
            if base.kappa_hi is not None and base.kappa_hi - kappa * c > 0:
                self.kappa_hi = base.kappa_hi - kappa * c
        logf = lambda x: self._log_unnorm(x)
        self._build(logf, support=base.support, hint=base.mode)
        # log int e^{kappa F} dm; base density is already normalised
        self.log_integral = self.log_mass

    def _log_unnorm(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            v = np.asarray(self.base.logpdf(x), dtype=float) + self.strength * self.F(x)
        return np.where(np.isneginf(np.asarray(self.base.logpdf(x))), -np.inf, v)

    def logpdf(self, x):
        return _like(x, self._log_unnorm(x) - self.log_integral)

    def dlogpdf(self, x):
        x = np.asarray(x, dtype=float)
        return _like(x, self.base.dlogpdf(x) + self.strength * self.F.derivative(x))

    def curvature(self, x):
        x = np.asarray(x, dtype=float)
        return _like(x, self.base.curvature(x) - self.strength * self.F.second_derivative(x))

    def describe(self):
        return f"tilt({self.base.describe()}, {self.strength:g}*({self.F.label}))"


class GridDensity(Measure1D):
    """Piecewise-linear density through ``(nodes, values)``, renormalised."""
    kind = "grid"

    def __init__(self, nodes, values):
        x = np.asarray(nodes, dtype=float)
        v = np.asarray(values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 2:
            raise DomainError("grid density needs matching 1-D node and value arrays")
        if np.any(np.diff(x) <= 0):
            raise DomainError("grid nodes must be strictly increasing")
        if np.any(~np.isfinite(v)) or np.any(v < 0):
            raise InvalidPotential("grid density values must be finite and non-negative")
        coef = np.stack([0.5 * (v[:-1] + v[1:]), 0.5 * (v[1:] - v[:-1])], axis=1)
        self.table, total = _Table.from_coefficients(x, coef)
        if not total > 0:
            raise NonIntegrable("grid density has zero mass")
        self.nodes = x
        self.values = v / total
        self.flags = frozenset({"hypotheses_unverified"})

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.nodes, self.values, left=0.0, right=0.0)
        return _like(x, out)

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return _like(x, np.log(np.asarray(self.pdf(x))))

    def dlogpdf(self, x):
        x = np.asarray(x, dtype=float)
        k = np.clip(np.searchsorted(self.nodes, x, side="right") - 1, 0, self.nodes.size - 2)
        slope = (self.values[k + 1] - self.values[k]) / (self.nodes[k + 1] - self.nodes[k])
        with np.errstate(all="ignore"):
            out = slope / np.asarray(self.pdf(x))
        inside = (x >= self.nodes[0]) & (x <= self.nodes[-1])
        return _like(x, np.where(inside, out, np.nan))

    cdf = TabulatedMeasure.cdf
    sf = TabulatedMeasure.sf
    ppf = TabulatedMeasure.ppf
    isf = TabulatedMeasure.isf

    @property
    def support(self):
        return float(self.nodes[0]), float(self.nodes[-1])

    @cached_property
    def effective_support(self):
        return self.support

    def _x_pieces(self):
        return [self.support]

    @cached_property
    def mode(self):
        i = int(np.argmax(self.values))
        return _checked_mode(lambda t: np.log(np.maximum(self.pdf(t), 1e-300)),
                             float(self.nodes[i]), self.nodes[0], self.nodes[-1])


# ---------------------------------------------------------------- derived measures

class Restricted(Measure1D):
    """``m(A)^{-1} m|_A``; CDF and quantiles are rescaled base values."""
    kind = "restricted"

    def __init__(self, base: Measure1D, A: IntervalSet):
        self.base = base
        self.A = A
        lo_s, hi_s = base.support
        pieces = []
        for a, b in A.intervals:
            a, b = max(a, lo_s), min(b, hi_s)
            if a < b:
                pieces.append((a, b))
        masses = np.array([self._base_mass(a, b) for a, b in pieces]) if pieces else np.zeros(0)
        keep = masses > 0
        self.pieces = [p for p, k in zip(pieces, keep) if k]
        self.masses = masses[keep]
        self.total = float(self.masses.sum())
        if not self.total > 1e-300:
            raise EmptyRestriction(f"{base.describe()} gives zero mass to {A!r}")
        self.log_total = math.log(self.total)
        self.lo = np.array([a for a, _ in self.pieces])
        self.hi = np.array([b for _, b in self.pieces])
        self.left_cum = np.concatenate([[0.0], np.cumsum(self.masses)])
        self.right_cum = np.concatenate([np.cumsum(self.masses[::-1])[::-1], [0.0]])
        self.kappa_lo = base.kappa_lo
        self.kappa_hi = base.kappa_hi
        self.flags = base.flags | {"restricted"}

    def _base_mass(self, a, b):
        # choose the tail that keeps relative precision
        if float(self.base.cdf(b)) <= 0.5:
            return float(self.base.cdf(b)) - float(self.base.cdf(a))
        return float(self.base.sf(a)) - float(self.base.sf(b))

    def _mass_upto(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for (a, b), m in zip(self.pieces, self.masses):
            xc = np.clip(x, a, b)
            ca = float(self.base.cdf(a))
            lower = np.asarray(self.base.cdf(xc)) - ca
            upper = float(self.base.sf(a)) - np.asarray(self.base.sf(xc))
            part = np.where(np.asarray(self.base.cdf(xc)) <= 0.5, lower, upper)
            out += np.where(x >= b, m, np.where(x <= a, 0.0, part))
        return out

    def _mass_from(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for (a, b), m in zip(self.pieces, self.masses):
            xc = np.clip(x, a, b)
            sb = float(self.base.sf(b))
            upper = np.asarray(self.base.sf(xc)) - sb
            lower = float(self.base.cdf(b)) - np.asarray(self.base.cdf(xc))
            part = np.where(np.asarray(self.base.sf(xc)) <= 0.5, upper, lower)
            out += np.where(x <= a, m, np.where(x >= b, 0.0, part))
        return out

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = self.A.contains(x) & (x >= self.lo[0]) & (x <= self.hi[-1])
        with np.errstate(all="ignore"):
            out = np.where(inside, np.asarray(self.base.logpdf(x)) - self.log_total, -np.inf)
        return _like(x, out)

    def dlogpdf(self, x):
        x = np.asarray(x, dtype=float)
        return _like(x, np.where(self.A.contains(x), self.base.dlogpdf(x), np.nan))

    def curvature(self, x):
        x = np.asarray(x, dtype=float)
        return _like(x, np.where(self.A.contains(x), self.base.curvature(x), np.nan))

    def cdf(self, x):
        return _like(x, np.clip(self._mass_upto(x) / self.total, 0.0, 1.0))

    def sf(self, x):
        return _like(x, np.clip(self._mass_from(x) / self.total, 0.0, 1.0))

    def ppf(self, p):
        p = np.asarray(p, dtype=float)
        t = np.atleast_1d(p * self.total)
        k = np.clip(np.searchsorted(self.left_cum, t, side="right") - 1, 0, len(self.pieces) - 1)
        r = np.clip(t - self.left_cum[k], 0.0, self.masses[k])
        a = self.lo[k]
        ca = np.asarray(self.base.cdf(a))
        u = ca + r
        with np.errstate(all="ignore"):
            x = np.where(u <= 0.5, np.asarray(self.base.ppf(np.minimum(u, 0.5))),
                         np.asarray(self.base.isf(np.maximum(np.asarray(self.base.sf(a)) - r, 0.0))))
        x = np.clip(x, a, self.hi[k])
        return _like(p, x.reshape(p.shape))

    def isf(self, q):
        q = np.asarray(q, dtype=float)
        t = np.atleast_1d(q * self.total)
        # piece k is the first (from the right) whose right-cumulative exceeds t
        k = np.clip(np.searchsorted(-self.right_cum, -t, side="left") - 1, 0, len(self.pieces) - 1)
        r = np.clip(t - self.right_cum[k + 1], 0.0, self.masses[k])
        b = self.hi[k]
        v = np.asarray(self.base.sf(b)) + r
        with np.errstate(all="ignore"):
            x = np.where(v <= 0.5, np.asarray(self.base.isf(np.minimum(v, 0.5))),
                         np.asarray(self.base.ppf(np.maximum(np.asarray(self.base.cdf(b)) - r, 0.0))))
        x = np.clip(x, self.lo[k], b)
        return _like(q, x.reshape(q.shape))

    def quantile_breaks(self):
        return tuple(float(c / self.total) for c in self.left_cum[1:-1])

    @property
    def support(self):
        return float(self.lo[0]), float(self.hi[-1])

    def _x_pieces(self):
        elo, ehi = self.base.effective_support
        return [(max(a, elo), min(b, ehi)) for a, b in self.pieces if max(a, elo) < min(b, ehi)]

    @cached_property
    def mode(self):
        xb = self.base.mode
        cands = []
        for a, b in self.pieces:
            c = min(max(xb, a), b)
            cands.append((c, float(self.pdf(c))))
        cands.sort(key=lambda t: -t[1])
        best = cands[0]
        span = max(float(self.hi[-1] - self.lo[0]), 1.0) if math.isfinite(self.hi[-1] - self.lo[0]) else 1.0
        for c, d in cands[1:]:
            if abs(c - best[0]) > 1e-6 * span and best[1] - d < MODE_TOL_D:
                raise AmbiguousMode(f"restricted density has maxima at {best[0]:.6g} and {c:.6g}")
        return float(best[0])

    def describe(self):
        return f"{self.base.describe()}|{self.A!r}"


class Translated(Measure1D):
    """Push-forward of ``base`` by ``x -> x + shift``."""
    kind = "translated"

    def __init__(self, base: Measure1D, shift: float):
        self.base = base
        self.shift = float(shift)
        self.kappa_lo = base.kappa_lo
        self.kappa_hi = base.kappa_hi
        self.flags = base.flags

    def logpdf(self, x):
        return self.base.logpdf(np.asarray(x, dtype=float) - self.shift)

    def dlogpdf(self, x):
        return self.base.dlogpdf(np.asarray(x, dtype=float) - self.shift)

    def curvature(self, x):
        return self.base.curvature(np.asarray(x, dtype=float) - self.shift)

    def cdf(self, x):
        return self.base.cdf(np.asarray(x, dtype=float) - self.shift)

    def sf(self, x):
        return self.base.sf(np.asarray(x, dtype=float) - self.shift)

    def ppf(self, p):
        return self.base.ppf(p) + self.shift

    def isf(self, q):
        return self.base.isf(q) + self.shift

    def quantile_z(self, z):
        return self.base.quantile_z(z) + self.shift

    def quantile_breaks(self):
        return self.base.quantile_breaks()

    @property
    def support(self):
        lo, hi = self.base.support
        return lo + self.shift, hi + self.shift

    def _x_pieces(self):
        return [(a + self.shift, b + self.shift) for a, b in self.base._x_pieces()]

    @property
    def mode(self):
        return self.base.mode + self.shift

    @cached_property
    def mean(self):
        return self.base.mean + self.shift

    @cached_property
    def second_moment(self):
        return self.base.second_moment + 2 * self.shift * self.base.mean + self.shift ** 2

    def translate(self, a):
        return Translated(self.base, self.shift + float(a)) if self.shift + a else self.base

    def describe(self):
        return f"{self.base.describe()} + {self.shift:g}"


# ---------------------------------------------------------------- operations

def normalize(potential: PotentialSpec, domain_hint: Optional[Sequence[float]] = None):
    """Normalised measure ``exp(-V - logZ) dx``; ``logZ`` is stored on the result."""
    return ExpPotential(potential, domain_hint)


def cdf(mu: Measure1D, x):
    return mu.cdf(x)


def quantile(mu: Measure1D, p):
    """Quantile ``inf {y : F(y) > p}``; ``p`` must lie in the open unit interval."""
    arr = np.asarray(p, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise DomainError(f"quantile level must lie in (0, 1), got {p!r}")
    return mu.ppf(p)


def moments(mu: Measure1D):
    """``(barycenter, second moment, mode)``."""
    return mu.mean, mu.second_moment, mu.mode


def restrict(m: Measure1D, A):
    A = A if isinstance(A, IntervalSet) else IntervalSet(A)
    if A.is_real_line:
        return m
    if isinstance(m, Restricted):
        # intersect with the existing restriction
        parts = [(max(a, c), min(b, d)) for a, b in m.A.intervals for c, d in A.intervals
                 if max(a, c) <= min(b, d)]
        if not parts:
            raise EmptyRestriction("restriction sets do not intersect")
        return Restricted(m.base, IntervalSet(parts))
    return Restricted(m, A)


def tilt(m: Measure1D, F, kappa: float):
    """Normalised tilt ``exp(kappa F) m``; ``log_integral`` holds ``log int e^{kappa F} dm``."""
    if not kappa > 0:
        raise DomainError("tilt strength must be positive")
    F = as_function(F)
    if isinstance(m, Restricted):
        inner = Tilted(m.base, F, kappa)
        out = Restricted(inner, m.A)
        out.log_integral = inner.log_integral + out.log_total - m.log_total
        out.strength, out.F = float(kappa), F
        return out
    out = Tilted(m, F, kappa)
    _check_second_moment(out)
    return out


def _check_second_moment(mu):
    lo, hi = mu.table.edges[0], mu.table.edges[-1]
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise NonIntegrable("tilted measure has unbounded table")


def verify_bounds(mu: Measure1D, kappa_lo=None, kappa_hi=None, tol=1e-8, n=2001):
    """Spot-check declared curvature bounds against sampled ``-(log rho)''``.

    Returns the sampled ``(min, max)`` curvature; raises ``BoundMismatch`` on
    failure. Measures without curvature information return ``(nan, nan)``.
    """
    lo, hi = mu.effective_support
    x = np.linspace(lo, hi, n)
    if isinstance(mu, Restricted):
        x = x[mu.A.contains(x)]
    c = np.asarray(mu.curvature(x), dtype=float)
    ok = np.isfinite(c)
    if not ok.any():
        return math.nan, math.nan
    _check_curvature(x[ok], c[ok], kappa_lo, kappa_hi, tol)
    return float(c[ok].min()), float(c[ok].max())
