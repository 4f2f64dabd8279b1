"""Signed-slack certificates for the Talagrand-type inequality catalog.

Every verifier evaluates both sides of one inequality on a concrete instance
and returns a :class:`~wasscert.certificate.Certificate`.  Hypotheses that can
be tested numerically are tested; a hard failure raises ``HypothesisError``
and anything that cannot be checked marks the certificate
``HypothesesUnverified``.
"""
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from wasscert import gaussian_nd
from wasscert.certificate import Certificate
from wasscert.errors import (ConfigError, HypothesisError, MissingBounds, NotMonotone,
                             SizeLimit, WassCertError)
from wasscert.functionals import fisher_information, levy_point, phi_correction, relative_entropy
from wasscert.functions import FunctionSpec, as_function
from wasscert.measure1d import IntervalSet, Measure1D, restrict, tilt, verify_bounds
from wasscert.transport1d import (DualPair, contraction_check, dual_gap, optimal_map,
                                  w2_squared)
from wasscert.verdict import ATOL, RTOL, Verdict

BARY_TOL = 1e-6
MOMENT_TOL = 1e-8
SYMMETRY_TOL = 1e-8
MODE_TOL = 1e-8
MAX_SWEEP = 10 ** 6


@dataclass(frozen=True)
class Bounds:
    """Declared constants; ``None`` means "not declared".

    ``kappa``/``kappa_prime`` bound the reference potential's second derivative
    from below/above, ``kappa0``/``kappa1``/``kappa2`` are the endpoint bounds
    of the geodesic results, ``tau`` bounds the measure's own potential and
    ``C`` is a Poincare constant.
    """
    kappa: Optional[float] = None
    kappa_prime: Optional[float] = None
    kappa0: Optional[float] = None
    kappa1: Optional[float] = None
    kappa2: Optional[float] = None
    tau: Optional[float] = None
    C: Optional[float] = None

    @classmethod
    def from_dict(cls, d):
        if d is None:
            return cls()
        if isinstance(d, Bounds):
            return d
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - names)
        if unknown:
            raise ConfigError(f"unknown bound name(s) {unknown}; expected a subset of {sorted(names)}")
        vals = {}
        for k, v in d.items():
            if v is None:
                continue
            v = float(v)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"bound {k!r} must be a positive finite number, got {v!r}")
            vals[k] = v
        return cls(**vals)

    def need(self, *names):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise MissingBounds(f"declared bound(s) {missing} required")
        return tuple(getattr(self, n) for n in names)


# ------------------------------------------------------------------ helpers

class _Ledger:
    """Accumulates reports, error estimates and hypothesis notes."""

    def __init__(self):
        self.reports = []
        self.error = 0.0
        self.verified = True
        self.notes = []

    def add(self, rep):
        self.reports.append(rep)
        if math.isfinite(rep.error):
            self.error += abs(rep.error)
        if "unreliable_fisher" in rep.flags or "hypotheses_unverified" in rep.flags:
            self.unverified(f"{rep.name}: {', '.join(sorted(rep.flags))}")
        return rep.value

    def unverified(self, note):
        self.verified = False
        self.notes.append(note)

    def note(self, text):
        self.notes.append(text)

    def measures(self, *ms):
        for m in ms:
            if "hypotheses_unverified" in getattr(m, "flags", ()):
                self.unverified(f"{m.describe()}: density given on a grid, smoothness unverified")

    def cert(self, inequality, instance, lhs, rhs, atol, rtol, extras=None):
        return Certificate(inequality, instance, float(lhs), float(rhs), atol, rtol,
                           error=self.error, reports=tuple(self.reports),
                           hypotheses_verified=self.verified, notes=tuple(self.notes),
                           extras=dict(extras or {}))


def _bound(led, mu, lo=None, hi=None, what="measure"):
    """Spot-check declared bounds; unknown curvature leaves them unverified."""
    cmin, cmax = verify_bounds(mu, kappa_lo=lo, kappa_hi=hi)
    if not math.isfinite(cmin):
        led.unverified(f"curvature of {what} unavailable; declared bounds not checked")
    return cmin, cmax


def _kappa(led, m, declared):
    kappa = declared if declared is not None else m.kappa_lo
    if kappa is None:
        raise MissingBounds("reference measure has no convexity bound; declare 'kappa'")
    _bound(led, m, lo=kappa, what="reference measure")
    return float(kappa)


def _entropy(led, mu, m):
    return led.add(relative_entropy(mu, m))


def _w2sq(led, mu, nu):
    val, err = w2_squared(mu, nu)
    led.error += abs(err)
    return val


def _expect(led, mu, g):
    val, err = mu.expect(g)
    led.error += abs(err)
    return val


def _symmetry_defect(mu: Measure1D):
    lo, hi = mu.effective_support
    r = max(abs(lo), abs(hi))
    x = np.linspace(0.0, r, 2001)
    p, q = np.asarray(mu.pdf(x)), np.asarray(mu.pdf(-x))
    return float(np.max(np.abs(p - q)) / max(float(np.max(p)), float(np.max(q)), 1e-300))


def _require_symmetric(mu, what):
    d = _symmetry_defect(mu)
    if d > SYMMETRY_TOL:
        raise HypothesisError(f"{what} is not symmetric (relative density defect {d:.3g})")


def _require_gaussian_reference(m, what):
    if not m.is_standard_gaussian:
        raise HypothesisError(f"{what} needs the standard Gaussian reference measure")


def _same_bary(a, b, what):
    if abs(a - b) > BARY_TOL:
        raise HypothesisError(f"{what}: barycenters differ ({a:.9g} vs {b:.9g})")


def _poincare_constant(led, mu, C, cmin):
    # a lower curvature bound c gives a Poincare constant c (Brascamp-Lieb)
    if not (math.isfinite(cmin) and C <= cmin * (1 + 1e-8)):
        led.unverified(f"Poincare constant C={C:g} not implied by the sampled curvature")


def _describe(*pairs):
    return ", ".join(f"{k}={v.describe() if hasattr(v, 'describe') else v}" for k, v in pairs)


# ------------------------------------------------------------------ verifiers

def verify_talagrand(m: Measure1D, mu: Measure1D, bounds=None, atol=ATOL, rtol=RTOL):
    """``W^2(mu, m)/2 <= Ent_m(mu)/kappa``."""
    b = Bounds.from_dict(bounds)
    led = _Ledger()
    led.measures(m, mu)
    kappa = _kappa(led, m, b.kappa)
    lhs = 0.5 * _w2sq(led, mu, m)
    rhs = _entropy(led, mu, m) / kappa
    return led.cert("talagrand", _describe(("m", m), ("mu", mu)), lhs, rhs, atol, rtol,
                    {"kappa": kappa})


STI_VARIANTS = ("STI1", "STI2", "SSTI", "MC1", "MC2", "RSTI")


def verify_symmetrized(variant, m: Measure1D, mu: Measure1D, nu: Measure1D, bounds=None,
                       atol=ATOL, rtol=RTOL):
    """Symmetrized transport-entropy inequality ``W^2(mu, nu)/2 <= rhs``.

    ``variant`` selects the right-hand side:

    ========  ====================================================================
    STI1      ``(Ent(mu) + Ent(nu)) / kappa``; ``m`` and ``nu`` symmetric
    STI2      ``Ent(mu) + Ent(nu)`` for the standard Gaussian, ``bary(nu) = 0``
    SSTI      STI2 form minus ``bary(mu) bary(nu)``, no centering needed
    MC1       ``2 (Ent + Ent) / (kappa + C min(1, kappa1/kappa0))``
    MC2       ``2 (Ent + Ent) / (kappa (1 + min(kappa0, kappa1) / kappa'))``
    RSTI      ``(Ent + Ent) / kappa + Phi(m, mu, nu)``
    ========  ====================================================================

    For MC1/MC2 ``mu`` and ``nu`` are the two endpoints ``mu_0, mu_1``.
    """
    variant = str(variant).upper()
    if variant not in STI_VARIANTS:
        raise ConfigError(f"unknown variant {variant!r}; expected one of {STI_VARIANTS}")
    b = Bounds.from_dict(bounds)
    led = _Ledger()
    led.measures(m, mu, nu)
    extras = {}

    if variant in ("STI2", "SSTI"):
        _require_gaussian_reference(m, variant)
        kappa = 1.0
    elif variant == "MC2":
        kappa, kp = b.need("kappa", "kappa_prime")
        _bound(led, m, lo=kappa, hi=kp, what="reference measure")
    else:
        kappa = _kappa(led, m, b.kappa)

    if variant == "STI1":
        _require_symmetric(m, "reference measure")
        _require_symmetric(nu, "nu")
    if variant == "STI2":
        if abs(nu.mean) > BARY_TOL:
            raise HypothesisError(f"STI2 needs bary(nu) = 0, got {nu.mean:.9g}")
    if variant in ("MC1", "MC2"):
        _same_bary(mu.mean, nu.mean, variant)

    lhs = 0.5 * _w2sq(led, mu, nu)
    ent = _entropy(led, mu, m) + _entropy(led, nu, m)

    if variant == "STI1":
        rhs = ent / kappa
    elif variant == "STI2":
        rhs = ent
    elif variant == "SSTI":
        cross = mu.mean * nu.mean
        rhs = ent - cross
        extras.update(barycenter_term=-cross, triangle_rhs=2.0 * ent / kappa)
    elif variant == "MC1":
        k0, k1 = b.need("kappa0", "kappa1")
        kappa2 = b.kappa2
        if b.C is None and kappa2 is None:
            # fallback: the lower curvature bound of mu0 is a Poincare constant
            kappa2 = mu.kappa_lo
            if kappa2 is None:
                raise MissingBounds("MC1 needs a Poincare constant 'C' or a lower bound 'kappa2'")
            led.note(f"Poincare constant of mu0 taken as its lower curvature bound {kappa2:g}")
        if kappa2 is not None and kappa2 > k0:
            raise MissingBounds(f"inconsistent bounds: kappa2={kappa2:g} exceeds kappa0={k0:g}")
        cmin, _ = _bound(led, mu, lo=kappa2, hi=k0, what="mu0")
        _bound(led, nu, lo=k1, what="mu1")
        C = b.C if b.C is not None else kappa2
        if b.C is not None:
            _poincare_constant(led, mu, b.C, cmin)
        rhs = 2.0 * ent / (kappa + C * min(1.0, k1 / k0))
        extras.update(C=C, kappa0=k0, kappa1=k1)
        if kappa2 is not None and kappa <= kappa2 <= k0 <= k1:
            extras["base_rhs"] = ent / kappa
    elif variant == "MC2":
        k0, k1 = b.need("kappa0", "kappa1")
        _bound(led, mu, lo=k0, what="mu0")
        _bound(led, nu, lo=k1, what="mu1")
        rhs = (1.0 / kappa) * 2.0 / (1.0 + min(k0 / kp, k1 / kp)) * ent
        extras.update(kappa_prime=kp, kappa0=k0, kappa1=k1)
    else:  # RSTI
        phi = phi_correction(m, mu, nu)
        rhs = ent / kappa + phi.value
        extras.update(phi=phi.phi, alpha_mu=phi.alpha_mu, alpha_nu=phi.alpha_nu,
                      rhs_without_phi=ent / kappa)
        if phi.phi_gaussian is not None:
            extras["phi_min"] = phi.phi_gaussian
    extras["kappa"] = kappa
    name = CANONICAL[variant]
    return led.cert(name, _describe(("m", m), ("mu", mu), ("nu", nu)), lhs, rhs, atol, rtol,
                    extras)


HWI_VARIANTS = ("HWI", "LSI", "HWI_C13", "LSI_C13", "HWI_C21", "LSI_C21")


def verify_hwi_lsi(variant, m: Measure1D, mu: Measure1D, bounds=None, atol=ATOL, rtol=RTOL):
    """``Ent_m(mu) <= rhs`` for the HWI and log-Sobolev families.

    Base forms use ``kappa`` only.  ``*_C13`` add a Poincare constant ``C``
    of ``mu`` and an upper bound ``tau`` on its potential; ``*_C21`` add an
    upper bound ``kappa_prime`` on the reference potential and a lower bound
    ``tau`` on the measure's potential.  The refined forms need equal
    barycenters.
    """
    variant = str(variant).upper()
    if variant not in HWI_VARIANTS:
        raise ConfigError(f"unknown variant {variant!r}; expected one of {HWI_VARIANTS}")
    b = Bounds.from_dict(bounds)
    led = _Ledger()
    led.measures(m, mu)
    kappa = _kappa(led, m, b.kappa)
    refined = variant.endswith(("C13", "C21"))
    if refined:
        _same_bary(m.mean, mu.mean, variant)

    ent = _entropy(led, mu, m)
    fisher = led.add(fisher_information(mu, m))
    extras = {"kappa": kappa, "entropy": ent, "fisher": fisher}

    if variant.endswith("C13"):
        C, tau = b.need("C", "tau")
        cmin, _ = _bound(led, mu, hi=tau, what="mu")
        _poincare_constant(led, mu, C, cmin)
        gain = C * min(1.0, kappa / tau)
    elif variant.endswith("C21"):
        kp, tau = b.need("kappa_prime", "tau")
        _bound(led, m, hi=kp, what="reference measure")
        _bound(led, mu, lo=tau, what="mu")
        gain = kappa * min(kappa / kp, tau / kp)
    else:
        gain = 0.0
    eff = kappa + gain
    extras["effective_kappa"] = eff

    if variant.startswith("HWI"):
        w2sq = _w2sq(led, mu, m)
        rhs = math.sqrt(w2sq) * math.sqrt(fisher) - 0.5 * eff * w2sq
        extras["w2"] = math.sqrt(w2sq)
    else:
        rhs = 0.5 * fisher / eff
    return led.cert(CANONICAL[variant], _describe(("m", m), ("mu", mu)), ent, rhs, atol, rtol,
                    extras)


def verify_poincare(variant, m: Measure1D, f, bounds=None, atol=ATOL, rtol=RTOL):
    """``c int f^2 dm <= int f'^2 dm``.

    ``base`` uses ``c = kappa`` and needs ``int f dm = 0``.  ``refined``
    uses ``c = kappa (1 + kappa/kappa')`` (2 for the standard Gaussian) and
    additionally needs ``int x f dm = 0``; when that moment does not vanish
    the base form is evaluated instead and a note records the routing.
    """
    variant = str(variant).lower()
    if variant not in ("base", "refined"):
        raise ConfigError(f"unknown Poincare variant {variant!r}")
    b = Bounds.from_dict(bounds)
    f = as_function(f)
    led = _Ledger()
    led.measures(m)
    kappa = _kappa(led, m, b.kappa)
    m0 = _expect(led, m, f)
    if abs(m0) > MOMENT_TOL:
        raise HypothesisError(f"int f dm = {m0:.3g} must vanish")
    extras = {"mean_f": m0, "kappa": kappa}
    if variant == "refined":
        m1 = _expect(led, m, lambda x: x * f(x))
        extras["first_moment_f"] = m1
        if abs(m1) > MOMENT_TOL:
            led.note(f"int x f dm = {m1:.6g} is not 0; evaluated the base inequality instead")
            variant = "base"
    if variant == "refined":
        if m.is_standard_gaussian and b.kappa_prime is None:
            kp = 1.0
        else:
            (kp,) = b.need("kappa_prime")
            _bound(led, m, hi=kp, what="reference measure")
        c = kappa * (1.0 + kappa / kp)
        poly = f.polynomial_coefficients()
        if poly is not None and len(poly) > 3:
            led.note("f has unbounded second derivative; outside the stated regularity class")
    else:
        c = kappa
    f2 = _expect(led, m, lambda x: f(x) ** 2)
    df2 = _expect(led, m, lambda x: f.derivative(x) ** 2)
    if not (math.isfinite(f2) and math.isfinite(df2)):
        led.unverified("f or f' not square integrable numerically")
    extras.update(constant=c, int_f2=f2, int_df2=df2)
    name = "poincare_second" if variant == "refined" else "poincare"
    return led.cert(name, _describe(("m", m), ("f", f.label)), c * f2, df2, atol, rtol, extras)


def _check_increasing(m, fn, name):
    z = np.linspace(-8.0, 8.0, 1601)
    x = np.asarray(m.quantile_z(z), dtype=float)
    x = np.unique(x)
    v = fn(x)
    bad = np.nonzero(np.diff(v) <= 0)[0]
    if bad.size:
        i = int(bad[0])
        raise NotMonotone(f"{name} is not strictly increasing near x={x[i]:.6g}",
                          witness=(float(x[i]), float(x[i + 1])))
    d = fn.derivative(x)
    if np.any(d < 0):
        i = int(np.argmin(d))
        raise NotMonotone(f"{name}' < 0 at x={x[i]:.6g}", witness=(float(x[i]),))


def _log_term(led, m, f, g, logdd):
    """``int log(f'g') dm``; adaptive x-quadrature split at zeros of ``f'``, ``g'``."""
    lo, hi = m.effective_support
    crit = sorted(set(f.critical_points(lo, hi)) | set(g.critical_points(lo, hi)))
    if not crit:
        return _expect(led, m, logdd)
    edges = [lo] + [c for c in crit if lo < c < hi] + [hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        h = lambda x: float(logdd(np.array([x]))[0] * m.pdf(np.array([x]))[0])
        v, e = integrate.quad(h, a, b, limit=400, epsabs=1e-13, epsrel=1e-12)
        total += v
        led.error += abs(e)
    led.note(f"log term split at critical points {[round(c, 12) for c in crit]}")
    return total


def verify_lemma_core(variant, m: Measure1D, f, g, bounds=None, atol=ATOL, rtol=RTOL):
    """Lower bounds for the transport-entropy core expression.

    ``odd``      ``V`` even, ``f`` odd; core expression ``>= 0``.
    ``gaussian`` ``m`` standard Gaussian, ``int f dm = 0``;
                 ``-int log(f'g') + int fg - 1 >= 0``.
    ``mode``     no symmetry; the right side depends on ``a = f(xi)``,
                 ``b = g(xi)`` at the mode ``xi`` of ``m``.

    The certificate is phrased as ``rhs_bound <= expression``, so ``lhs`` is
    the bound and ``rhs`` the evaluated expression.
    """
    variant = str(variant).lower()
    if variant not in ("odd", "gaussian", "mode"):
        raise ConfigError(f"unknown lemma variant {variant!r}")
    b = Bounds.from_dict(bounds)
    f, g = as_function(f), as_function(g)
    led = _Ledger()
    led.measures(m)
    _check_increasing(m, f, "f")
    _check_increasing(m, g, "g")

    def logdd(x):
        with np.errstate(divide="ignore"):
            return np.log(f.derivative(x)) + np.log(g.derivative(x))

    log_term = _log_term(led, m, f, g, logdd)
    if not math.isfinite(log_term):
        led.unverified("int log(f'g') dm is not finite")

    if variant == "gaussian":
        _require_gaussian_reference(m, "gaussian lemma variant")
        mf = _expect(led, m, f)
        if abs(mf) > MOMENT_TOL:
            raise HypothesisError(f"int f dgamma = {mf:.3g} must vanish")
        fg = _expect(led, m, lambda x: f(x) * g(x))
        expr = -log_term + fg - 1.0
        return led.cert("pair_gaussian", _describe(("f", f.label), ("g", g.label)), 0.0, expr,
                        atol, rtol, {"int_log_fg": log_term, "int_fg": fg})

    kappa = _kappa(led, m, b.kappa)
    dV = lambda x: -np.asarray(m.dlogpdf(x), dtype=float)
    fg = _expect(led, m, lambda x: f(x) * g(x))
    xdv = _expect(led, m, lambda x: x * dV(x))
    if variant == "odd":
        _require_symmetric(m, "reference measure")
        x = np.linspace(0.0, max(abs(v) for v in m.effective_support), 501)
        odd = float(np.max(np.abs(f(x) + f(-x)))) / max(1.0, float(np.max(np.abs(f(x)))))
        if odd > SYMMETRY_TOL:
            raise HypothesisError(f"f is not odd (defect {odd:.3g})")
        mix = _expect(led, m, lambda x: (f(x) + g(x)) * (dV(x) - kappa * x))
        x2 = _expect(led, m, lambda x: x * x)
        expr = -log_term + kappa * fg + mix - 2.0 * xdv + kappa * x2
        return led.cert("pair_odd", _describe(("m", m), ("f", f.label), ("g", g.label)), 0.0,
                        expr, atol, rtol, {"kappa": kappa, "int_log_fg": log_term})

    xi = m.mode
    a, bb = float(f(xi)), float(g(xi))
    mix = _expect(led, m, lambda x: (f(x) + g(x)) * (dV(x) - kappa * x + kappa * xi))
    xc2 = _expect(led, m, lambda x: (x - xi) ** 2)
    expr = -log_term + kappa * fg + mix - 2.0 * xdv + kappa * xc2
    mf, mg = _expect(led, m, f), _expect(led, m, g)
    bound = kappa * (bb * mf + a * mg - a * bb - (a + bb) * (m.mean - xi))
    return led.cert("pair_mode", _describe(("m", m), ("f", f.label), ("g", g.label)), bound,
                    expr, atol, rtol, {"kappa": kappa, "mode": xi, "a": a, "b": bb})


def _check_mode_at_zero(m):
    xi = m.mode
    if abs(xi) > MODE_TOL:
        raise HypothesisError(f"the reference potential must be minimal at 0; mode is {xi:.9g}")


def _mass(mu):
    return math.exp(getattr(mu, "log_total", 0.0))


def verify_concentration(m: Measure1D, A, B, bounds=None, atol=ATOL, rtol=RTOL):
    """``m(A) m(B) <= exp(-kappa d(A,B)^2 / 2 + kappa Phi(m, A, B))``."""
    b = Bounds.from_dict(bounds)
    A = A if isinstance(A, IntervalSet) else IntervalSet(A)
    B = B if isinstance(B, IntervalSet) else IntervalSet(B)
    led = _Ledger()
    led.measures(m)
    kappa = _kappa(led, m, b.kappa)
    _check_mode_at_zero(m)
    muA, muB = restrict(m, A), restrict(m, B)
    mA, mB = _mass(muA), _mass(muB)
    aA, aB = levy_point(m, muA), levy_point(m, muB)
    bA, bB, bm = muA.mean, muB.mean, m.mean
    phi = -aB * bA - aA * bB + aA * aB + (aA + aB) * bm
    used = min(phi, -bA * bB) if m.is_standard_gaussian else phi
    d = A.distance(B)
    rhs = math.exp(-0.5 * kappa * d * d + kappa * used)
    extras = {"mass_A": mA, "mass_B": mB, "alpha_A": aA, "alpha_B": aB, "bary_A": bA,
              "bary_B": bB, "phi": phi, "phi_used": used, "distance": d, "kappa": kappa}
    return led.cert("concentration", f"m={m.describe()}, A={A!r}, B={B!r}", mA * mB, rhs,
                    atol, rtol, extras)


def verify_blaschke_santalo(m: Measure1D, F, G, bounds=None, atol=ATOL, rtol=RTOL):
    """``int e^{kF} dm int e^{kG} dm <= exp(k Phi(m, F, G))`` for ``F(x) + G(y) <= (x-y)^2/2``."""
    b = Bounds.from_dict(bounds)
    F, G = as_function(F), as_function(G)
    led = _Ledger()
    led.measures(m)
    kappa = _kappa(led, m, b.kappa)
    _check_mode_at_zero(m)
    pair = DualPair(F, G, scale=0.5)
    margin = pair.check_admissible(m, m)
    muF, muG = tilt(m, F, kappa), tilt(m, G, kappa)
    margin = min(margin, pair.check_admissible(muF, muG))
    aF, aG = levy_point(m, muF), levy_point(m, muG)
    bF, bG, bm = muF.mean, muG.mean, m.mean
    phi = -aG * bF - aF * bG + aF * aG + (aF + aG) * bm
    used = min(phi, -bF * bG) if m.is_standard_gaussian else phi
    lhs = math.exp(muF.log_integral + muG.log_integral)
    rhs = math.exp(kappa * used)
    extras = {"log_integral_F": muF.log_integral, "log_integral_G": muG.log_integral,
              "alpha_F": aF, "alpha_G": aG, "bary_F": bF, "bary_G": bG, "phi": phi,
              "phi_used": used, "min_margin": margin, "kappa": kappa}
    return led.cert("blaschke_santalo", _describe(("m", m), ("F", F.label), ("G", G.label)),
                    lhs, rhs, atol, rtol, extras)


def verify_logdet(A, B, t=0.5, atol=ATOL, rtol=RTOL):
    """Concavity of ``log det`` with the Hilbert-Schmidt correction."""
    pair = gaussian_nd.SpdPair(A, B, t)
    mix = gaussian_nd.logdet_spd((1 - pair.t) * pair.A + pair.t * pair.B)
    gap = gaussian_nd.logdet_gap(pair)
    return Certificate("logdet", f"A={pair.A.tolist()}, B={pair.B.tolist()}, t={pair.t!r}",
                       float(mix - gap), float(mix), atol, rtol, extras={"gap": gap})


def verify_dual_gap(mu: Measure1D, nu: Measure1D, f, g, scale=1.0, atol=ATOL, rtol=RTOL):
    """Weak duality ``int f dmu + int g dnu <= scale W^2(mu, nu)``."""
    pair = DualPair(f, g, float(scale))
    res = dual_gap(pair, mu, nu)
    return Certificate("dual_gap", _describe(("mu", mu), ("nu", nu), ("f", pair.f.label),
                                              ("g", pair.g.label)),
                       res.dual, pair.scale * res.w2_squared, atol, rtol, error=res.error,
                       extras={"gap": res.gap})


def verify_contraction(source: Measure1D, target: Measure1D, bounds=None, K=256,
                       atol=1e-8, rtol=RTOL):
    """``sup T' <= sqrt(kappa0 / kappa1)`` on the quantile grid of the optimal map."""
    b = Bounds.from_dict(bounds)
    T = optimal_map(source, target, int(K))
    res = contraction_check(T, b.kappa0, b.kappa1, atol=atol, rtol=rtol)
    led = _Ledger()
    led.measures(source, target)
    if not res.monotone:
        led.unverified("tabulated map is not monotone")
    return led.cert("contraction", _describe(("source", source), ("target", target)),
                    res.sup_slope, res.bound, atol, rtol, {"K": T.K})


def verify_gaussian_equality(A, a, b=None, atol=1e-9, rtol=1e-9):
    return gaussian_nd.equality_case(A, a, b, atol=atol, rtol=rtol)


def verify_translation(mu, nu, a, b=None, atol=1e-10, rtol=0.0):
    return gaussian_nd.translation_check(mu, nu, a, b, atol=atol, rtol=rtol)


# ------------------------------------------------------------------ catalog

@dataclass(frozen=True)
class Entry:
    name: str
    roles: Tuple[str, ...]
    fn: Callable
    summary: str
    aliases: Tuple[str, ...] = ()
    optional: Tuple[str, ...] = ()


def _variant(fn, v):
    def run(**kw):
        return fn(v, **kw)
    return run


CATALOG: Dict[str, Entry] = {e.name: e for e in [
    Entry("talagrand", ("m", "mu"), verify_talagrand, "transport-entropy inequality", ("TI",)),
    Entry("sti_symmetric", ("m", "mu", "nu"), _variant(verify_symmetrized, "STI1"),
          "symmetrized inequality, symmetric m and nu", ("STI1",)),
    Entry("sti_gaussian", ("m", "mu", "nu"), _variant(verify_symmetrized, "STI2"),
          "symmetrized inequality, Gaussian reference, centred nu", ("STI2",)),
    Entry("sti_barycenter", ("m", "mu", "nu"), _variant(verify_symmetrized, "SSTI"),
          "symmetrized inequality with the barycenter term", ("SSTI",)),
    Entry("sti_poincare", ("m", "mu", "nu"), _variant(verify_symmetrized, "MC1"),
          "symmetrized inequality from the Poincare convexity modulus", ("MC1",)),
    Entry("sti_generalized", ("m", "mu", "nu"), _variant(verify_symmetrized, "MC2"),
          "symmetrized inequality from generalized geodesics", ("MC2",)),
    Entry("sti_levy", ("m", "mu", "nu"), _variant(verify_symmetrized, "RSTI"),
          "symmetrized inequality with the Phi correction", ("RSTI",)),
    Entry("hwi", ("m", "mu"), _variant(verify_hwi_lsi, "HWI"), "HWI inequality"),
    Entry("lsi", ("m", "mu"), _variant(verify_hwi_lsi, "LSI"), "log-Sobolev inequality"),
    Entry("hwi_poincare", ("m", "mu"), _variant(verify_hwi_lsi, "HWI_C13"),
          "HWI refined by a Poincare constant of mu", ("HWI_C13",)),
    Entry("lsi_poincare", ("m", "mu"), _variant(verify_hwi_lsi, "LSI_C13"),
          "log-Sobolev refined by a Poincare constant of mu", ("LSI_C13",)),
    Entry("hwi_two_sided", ("m", "mu"), _variant(verify_hwi_lsi, "HWI_C21"),
          "HWI refined by two-sided curvature bounds", ("HWI_C21",)),
    Entry("lsi_two_sided", ("m", "mu"), _variant(verify_hwi_lsi, "LSI_C21"),
          "log-Sobolev refined by two-sided curvature bounds", ("LSI_C21",)),
    Entry("poincare", ("m", "f"), _variant(verify_poincare, "base"), "Poincare inequality"),
    Entry("poincare_second", ("m", "f"), _variant(verify_poincare, "refined"),
          "Poincare inequality for functions orthogonal to affine ones"),
    Entry("pair_odd", ("m", "f", "g"), _variant(verify_lemma_core, "odd"),
          "core estimate, odd f and even potential"),
    Entry("pair_gaussian", ("m", "f", "g"), _variant(verify_lemma_core, "gaussian"),
          "core estimate, Gaussian reference"),
    Entry("pair_mode", ("m", "f", "g"), _variant(verify_lemma_core, "mode"),
          "core estimate centred at the mode"),
    Entry("concentration", ("m", "A", "B"), verify_concentration,
          "two-set concentration bound"),
    Entry("blaschke_santalo", ("m", "F", "G"), verify_blaschke_santalo,
          "functional Blaschke-Santalo inequality"),
    Entry("logdet", ("A", "B"), verify_logdet, "log-det concavity with correction",
          optional=("t",)),
    Entry("gaussian_equality", ("A", "a"), verify_gaussian_equality,
          "Gaussian equality family", optional=("b",)),
    Entry("translation", ("mu", "nu", "a"), verify_translation,
          "translation identities for Gaussians", optional=("b",)),
    Entry("dual_gap", ("mu", "nu", "f", "g"), verify_dual_gap, "Kantorovich weak duality",
          optional=("scale",)),
    Entry("contraction", ("source", "target"), verify_contraction,
          "Lipschitz bound of the optimal map", optional=("K",)),
]}

CANONICAL = {}
for _e in CATALOG.values():
    CANONICAL[_e.name] = _e.name
    for _a in _e.aliases:
        CANONICAL[_a] = _e.name
CANONICAL.update({"HWI": "hwi", "LSI": "lsi"})

# entries whose verifiers accept declared bounds
_TAKES_BOUNDS = {n for n in CATALOG if n not in ("logdet", "gaussian_equality", "translation",
                                                 "dual_gap")}


def lookup(name) -> Entry:
    key = CANONICAL.get(name) or CANONICAL.get(str(name).upper())
    if key is None:
        raise ConfigError(f"unknown inequality id {name!r}; catalog: {', '.join(sorted(CATALOG))}")
    return CATALOG[key]


def evaluate(name, args: dict, bounds=None, atol=ATOL, rtol=RTOL):
    """Run catalog entry ``name`` on resolved arguments."""
    e = lookup(name)
    missing = [r for r in e.roles if r not in args]
    if missing:
        raise ConfigError(f"{e.name} needs argument(s) {missing}")
    extra = sorted(set(args) - set(e.roles) - set(e.optional))
    if extra:
        raise ConfigError(f"{e.name} does not take argument(s) {extra}")
    kw = dict(args, atol=atol, rtol=rtol)
    if e.name in _TAKES_BOUNDS:
        kw["bounds"] = bounds
    elif bounds:
        raise ConfigError(f"{e.name} takes no declared bounds")
    return e.fn(**kw)


# ------------------------------------------------------------------ sweeps

@dataclass(frozen=True)
class Axis:
    name: str
    values: Tuple[float, ...]

    @classmethod
    def linspace(cls, name, start, stop, num=None, step=None):
        if num is None:
            if step is None or step <= 0:
                raise ConfigError(f"axis {name!r} needs 'num' or a positive 'step'")
            num = int(round((stop - start) / step)) + 1
        if num < 1:
            raise ConfigError(f"axis {name!r} has no points")
        if num > MAX_SWEEP:
            raise SizeLimit(f"axis {name!r} has {num} points > {MAX_SWEEP}")
        return cls(name, tuple(float(v) for v in np.linspace(start, stop, num)))


@dataclass(frozen=True)
class SweepSpec:
    """A grid over named axes; ``build(params)`` returns one certificate."""
    inequality: str
    axes: Tuple[Axis, ...]
    build: Callable[[dict], Certificate]
    fixed: dict = field(default_factory=dict)

    @property
    def size(self):
        return int(np.prod([len(a.values) for a in self.axes], dtype=float)) if self.axes else 1

    def points(self):
        names = [a.name for a in self.axes]
        for combo in itertools.product(*(a.values for a in self.axes)):
            yield dict(zip(names, combo))


@dataclass(frozen=True)
class SweepPoint:
    index: int
    params: dict
    certificate: Optional[Certificate]
    error: Optional[str]


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    points: Tuple[SweepPoint, ...]

    def summary(self):
        counts = {v.value: 0 for v in Verdict}
        counts["Error"] = 0
        best, arg, tight = math.inf, None, []
        for p in self.points:
            if p.certificate is None:
                counts["Error"] += 1
                continue
            c = p.certificate
            counts[c.verdict.value] += 1
            if c.numeric_verdict is Verdict.TIGHT:
                tight.append(p.index)
            if c.slack < best:
                best, arg = c.slack, p.params
        return {"inequality": self.spec.inequality, "points": len(self.points),
                "counts": counts, "min_slack": best if arg is not None else None,
                "argmin": arg, "tight": tight}


def _run_point(spec, i, params):
    try:
        return SweepPoint(i, params, spec.build(params), None)
    except WassCertError as exc:
        return SweepPoint(i, params, None, f"{type(exc).__name__}: {exc}")
    except (ValueError, ArithmeticError) as exc:
        return SweepPoint(i, params, None, f"{type(exc).__name__}: {exc}")


def sweep(spec: SweepSpec, threads=1):
    """Evaluate every grid point; errors are recorded per point."""
    if spec.size > MAX_SWEEP:
        raise SizeLimit(f"sweep has {spec.size} points > {MAX_SWEEP}")
    pts = list(enumerate(spec.points()))
    if threads <= 1:
        out = [_run_point(spec, i, p) for i, p in pts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            out = list(ex.map(lambda ip: _run_point(spec, *ip), pts))
    return SweepResult(spec, tuple(out))
