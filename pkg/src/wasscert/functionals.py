"""Entropy-type functionals, the Levy point and the Phi correction."""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from wasscert.measure1d import Measure1D
from wasscert.quadrature import probit_integrate

_EPS = np.finfo(float).eps


class _Lebesgue:
    """Reference measure ``dx``; relative entropy becomes ``int rho log rho``."""

    def __repr__(self):
        return "Lebesgue"

    def logpdf(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def dlogpdf(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


LEBESGUE = _Lebesgue()


@dataclass(frozen=True)
class FunctionalReport:
    name: str
    value: float
    error: float
    flags: frozenset = field(default_factory=frozenset)

    @property
    def infinite(self):
        return math.isinf(self.value)

    def to_dict(self):
        def num(v):
            # JSON has no infinities; spell them out like certificate fields do
            return v if math.isfinite(v) else str(v)
        return {"name": self.name, "value": num(self.value), "error": num(self.error),
                "flags": sorted(self.flags)}


def _not_contained(mu: Measure1D, m):
    if m is LEBESGUE:
        return False
    # quantile midpoints of mu must sit where m has positive density
    z = np.linspace(-8.0, 8.0, 321)
    with np.errstate(all="ignore"):
        lm = np.asarray(m.logpdf(mu.quantile_z(z)), dtype=float)
    return bool(np.any(np.isneginf(lm)))


def relative_entropy(mu: Measure1D, m=LEBESGUE, tol=1e-12):
    """``Ent_m(mu) = int_0^1 log(rho_mu / rho_m)(Q_mu(p)) dp``.

    With ``m = LEBESGUE`` this is the Shannon entropy ``int rho log rho dx``.
    A measure not absolutely continuous with respect to ``m`` gets ``+inf``.
    """
    name = "shannon_entropy" if m is LEBESGUE else "relative_entropy"
    flags = set(mu.flags) | (set(getattr(m, "flags", ())))
    if _not_contained(mu, m):
        return FunctionalReport(name, math.inf, 0.0, frozenset(flags | {"infinite"}))

    def integrand(z):
        x = mu.quantile_z(z)
        with np.errstate(all="ignore"):
            return np.asarray(mu.log_density_z(z)) - np.asarray(m.logpdf(x))

    val, err = probit_integrate(integrand, mu.quantile_breaks(), tol=tol)
    if not math.isfinite(val):
        return FunctionalReport(name, math.inf, 0.0, frozenset(flags | {"infinite"}))
    return FunctionalReport(name, val, err, frozenset(flags))


def relative_entropy_xspace(mu: Measure1D, m=LEBESGUE):
    """Same quantity by adaptive quadrature of ``rho log(rho / rho_m)`` in x."""
    def g(x):
        with np.errstate(all="ignore"):
            v = np.asarray(mu.logpdf(x)) - np.asarray(m.logpdf(x))
        return np.where(np.isfinite(v), v, 0.0)
    val, err = mu.expect_x(g)
    return FunctionalReport("relative_entropy_x", val, err, frozenset(mu.flags))


def fisher_information(mu: Measure1D, m=LEBESGUE, tol=1e-12):
    """``I_m(mu) = int ((log rho_mu)' - (log rho_m)')^2 dmu``.

    Analytic scores are used when the measures supply them; otherwise a
    central difference of ``log(rho_mu / rho_m)`` with the usual step.
    """
    flags = set(mu.flags)
    numeric = False

    def score(x):
        nonlocal numeric
        s_mu = np.asarray(mu.dlogpdf(x), dtype=float)
        s_m = np.asarray(m.dlogpdf(x), dtype=float)
        s = s_mu - s_m
        bad = ~np.isfinite(s)
        if bad.any():
            numeric = True
            h = _EPS ** (1 / 3) * (1 + np.abs(x[bad]))
            lr = lambda t: np.asarray(mu.logpdf(t)) - np.asarray(m.logpdf(t))
            s[bad] = (lr(x[bad] + h) - lr(x[bad] - h)) / (2 * h)
        return s

    def integrand(z):
        x = np.asarray(mu.quantile_z(z), dtype=float)
        return score(x) ** 2

    val, err = probit_integrate(integrand, mu.quantile_breaks(), tol=tol)
    if numeric:
        flags.add("finite_difference")
        z = np.linspace(-3, 3, 201)
        x = np.asarray(mu.quantile_z(z))
        if np.mean(np.asarray(mu.pdf(x)) < 1e-12) > 0.01:
            flags.add("unreliable_fisher")
    if not math.isfinite(val):
        flags.add("unreliable_fisher")
    return FunctionalReport("fisher_information", val, err, frozenset(flags))


def levy_point(m: Measure1D, mu: Measure1D):
    """``Q_mu(F_m(xi_m))``: image of the mode of ``m`` under the optimal map."""
    xi = m.mode
    F = float(m.cdf(xi))
    if F <= 0.5:
        return float(mu.ppf(F))
    return float(mu.isf(float(m.sf(xi))))


@dataclass(frozen=True)
class PhiResult:
    phi: float
    phi_gaussian: Optional[float]
    alpha_mu: float
    alpha_nu: float
    bary_mu: float
    bary_nu: float
    bary_m: float
    mode_m: float

    @property
    def value(self):
        """The correction actually used: the min form when ``m`` is standard Gaussian."""
        return self.phi if self.phi_gaussian is None else self.phi_gaussian

    def linear_part(self):
        """``Phi`` without its last two quadratic terms."""
        return (-self.alpha_nu * self.bary_mu - self.alpha_mu * self.bary_nu
                + self.alpha_mu * self.alpha_nu
                + (self.alpha_mu + self.alpha_nu) * (self.bary_m - self.mode_m))


def phi_correction(m: Measure1D, mu: Measure1D, nu: Measure1D):
    am = levy_point(m, mu)
    an = levy_point(m, nu)
    bmu, bnu, bm, xi = mu.mean, nu.mean, m.mean, m.mode
    s = 0.5 * (bmu + bnu)
    phi = (-an * bmu - am * bnu + am * an + (am + an) * (bm - xi)
           + (xi - bm + s) ** 2 - (bm - s) ** 2)
    gauss = min(phi, -bmu * bnu) if m.is_standard_gaussian else None
    return PhiResult(phi, gauss, am, an, bmu, bnu, bm, xi)
