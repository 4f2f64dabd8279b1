"""Displacement interpolation and generalized geodesics on the line.

Every measure on such a curve is a push-forward of one reference measure by a
monotone map, so its quantile function is a convex combination of the
endpoint quantile functions, ``Q_t = sum_i w_i Q_i``, and its density at
``Q_t(p)`` is ``1 / sum_i w_i / rho_i(Q_i(p))``.
"""
import csv
import io
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy import special
from scipy import integrate

from wasscert.errors import DegenerateCurve, DomainError, NumericMonotonicityBreak
from wasscert.functionals import LEBESGUE, relative_entropy
from wasscert.measure1d import Measure1D
from wasscert.quadrature import ZMAX
from wasscert.transport1d import w2_squared

logger = logging.getLogger(__name__)


class QuantileMixture(Measure1D):
    """Measure with quantile function ``sum_i w_i Q_i`` (all ``w_i >= 0``)."""
    kind = "interpolated"

    def __init__(self, measures: Sequence[Measure1D], weights: Sequence[float]):
        self.parts = tuple(measures)
        self.weights = tuple(float(w) for w in weights)
        self.flags = frozenset().union(*(m.flags for m in self.parts))
        self._check_monotone()

    def _check_monotone(self):
        z = np.linspace(-ZMAX, ZMAX, 513)
        q = np.asarray(self.quantile_z(z))
        if np.any(np.diff(q) < -1e-12 * (1 + np.abs(q[1:]))):
            i = int(np.argmin(np.diff(q)))
            raise NumericMonotonicityBreak(f"interpolated map decreases near z={z[i]:.4g}")

    def quantile_z(self, z):
        z = np.asarray(z, dtype=float)
        out = sum(w * np.asarray(m.quantile_z(z)) for m, w in zip(self.parts, self.weights) if w)
        return float(out) if z.ndim == 0 else out

    def log_density_z(self, z):
        """``log rho_t(Q_t(Phi(z)))`` from the change of variables."""
        z = np.asarray(z, dtype=float)
        inv = 0.0
        with np.errstate(all="ignore"):
            for m, w in zip(self.parts, self.weights):
                if w:
                    inv = inv + w * np.exp(-np.asarray(m.logpdf(m.quantile_z(z))))
            return -np.log(inv)

    def _z_of(self, x):
        # invert the increasing map z -> Q_t(Phi(z)) by bisection
        x = np.atleast_1d(np.asarray(x, dtype=float))
        lo = np.full(x.shape, -ZMAX - 1.5)
        hi = np.full(x.shape, ZMAX + 1.5)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            below = np.asarray(self.quantile_z(mid)) < x
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def cdf(self, x):
        z = self._z_of(x)
        out = special.ndtr(z)
        return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))

    def sf(self, x):
        z = self._z_of(x)
        out = special.ndtr(-z)
        return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))

    def ppf(self, p):
        return self.quantile_z(special.ndtri(np.asarray(p, dtype=float)))

    def isf(self, q):
        return self.quantile_z(-special.ndtri(np.asarray(q, dtype=float)))

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        z = self._z_of(x)
        out = np.asarray(self.log_density_z(z)).reshape(np.shape(x))
        lo, hi = self.quantile_z(np.array([-ZMAX - 1.5, ZMAX + 1.5]))
        out = np.where((x < lo) | (x > hi), -np.inf, out)
        return float(out) if x.ndim == 0 else out

    def dlogpdf(self, x):
        x = np.asarray(x, dtype=float)
        h = 1e-5 * (1 + np.abs(x))
        return (np.asarray(self.logpdf(x + h)) - np.asarray(self.logpdf(x - h))) / (2 * h)

    @cached_property
    def mode(self):
        z = np.linspace(-ZMAX, ZMAX, 4001)
        ld = np.asarray(self.log_density_z(z))
        return float(self.quantile_z(z[int(np.argmax(ld))]))

    def normalization_drift(self):
        """``|int rho_t dx - 1|`` evaluated in the push-forward form."""
        lo, hi = self.effective_support
        f = lambda x: float(self.pdf(np.array([x]))[0])
        val = integrate.quad(f, lo, hi, points=[self.mode], limit=400, epsabs=1e-13)[0]
        drift = abs(val - 1.0)
        if drift > 1e-8:
            logger.warning("interpolated density integrates to 1 %+.3g", val - 1.0)
        return drift


def interpolate(mu0: Measure1D, mu1: Measure1D, t: float, base: Optional[Measure1D] = None):
    """Point ``t`` of the displacement (or generalized, with ``base``) geodesic.

    In one dimension the generalized geodesic with base ``m`` has quantile
    function ``(1-t) Q_0 + t Q_1`` as well, because every optimal map from
    ``m`` is increasing; ``base`` only matters through its flags.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"geodesic time must lie in [0, 1], got {t!r}")
    if t == 0.0:
        return mu0
    if t == 1.0:
        return mu1
    out = QuantileMixture([mu0, mu1], [1.0 - t, t])
    if base is not None:
        out.flags = out.flags | base.flags
    return out


def chebyshev_times(n=21):
    k = np.arange(n)
    return 0.5 * (1.0 - np.cos((2 * k + 1) * np.pi / (2 * n)))


@dataclass
class GeodesicCurve:
    mu0: Measure1D
    mu1: Measure1D
    base: Optional[Measure1D] = None
    times: np.ndarray = field(default_factory=chebyshev_times)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.w2_squared = w2_squared(self.mu0, self.mu1)[0]

    def at(self, t):
        return interpolate(self.mu0, self.mu1, float(t), self.base)

    @property
    def measures(self):
        return [self.at(t) for t in self.times]


@dataclass(frozen=True)
class EntropyCurve:
    times: np.ndarray
    values: np.ndarray
    e0: float
    e1: float
    w2_squared: float

    @property
    def deficits(self):
        t = self.times
        return (1 - t) * self.e0 + t * self.e1 - self.values

    def rows(self):
        return list(zip(self.times.tolist(), self.values.tolist(), self.deficits.tolist()))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "entropy", "deficit"])
        for t, e, d in self.rows():
            w.writerow([repr(t), repr(e), repr(d)])
        return buf.getvalue()


def entropy_curve(curve: GeodesicCurve, reference=LEBESGUE):
    vals = np.array([relative_entropy(curve.at(t), reference).value for t in curve.times])
    e0 = relative_entropy(curve.mu0, reference).value
    e1 = relative_entropy(curve.mu1, reference).value
    return EntropyCurve(curve.times, vals, e0, e1, curve.w2_squared)


def convexity_modulus(curve: GeodesicCurve, reference=LEBESGUE, ec: Optional[EntropyCurve] = None):
    """Largest ``kappa`` with ``E(t) <= (1-t)E(0) + tE(1) - kappa t(1-t) W^2 / 2`` at the samples."""
    if curve.w2_squared <= 1e-12:
        raise DegenerateCurve("endpoints coincide; convexity modulus undefined")
    ec = ec or entropy_curve(curve, reference)
    t = ec.times
    inner = (t > 0) & (t < 1)
    ratio = ec.deficits[inner] / (0.5 * t[inner] * (1 - t[inner]) * curve.w2_squared)
    return float(np.min(ratio))
