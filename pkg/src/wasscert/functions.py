"""Real functions of one variable with first and second derivatives.

Functions come either from an expression string (parsed with sympy and
differentiated symbolically) or from Python callables.  Missing derivatives
fall back to central differences and the fallback is recorded in
``FunctionSpec.numeric_derivative``.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import sympy as sp

from wasscert.errors import ConfigError

_X = sp.Symbol("x", real=True)
_EPS = np.finfo(float).eps


def _vectorize(fn):
    def wrapped(x):
        x = np.asarray(x, dtype=float)
        return np.asarray(fn(x), dtype=float) + np.zeros_like(x)
    return wrapped


def _central(fn, order):
    # standard optimal steps for first/second differences
    def d1(x):
        x = np.asarray(x, dtype=float)
        h = _EPS ** (1 / 3) * (1.0 + np.abs(x))
        return (fn(x + h) - fn(x - h)) / (2 * h)

    def d2(x):
        x = np.asarray(x, dtype=float)
        h = _EPS ** (1 / 4) * (1.0 + np.abs(x))
        return (fn(x + h) - 2 * fn(x) + fn(x - h)) / h ** 2

    return d1 if order == 1 else d2


@dataclass(frozen=True)
class FunctionSpec:
    f: Callable
    df: Optional[Callable] = None
    d2f: Optional[Callable] = None
    label: str = "<callable>"
    expr: Optional[sp.Expr] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "f", _vectorize(self.f))
        if self.df is not None:
            object.__setattr__(self, "df", _vectorize(self.df))
        if self.d2f is not None:
            object.__setattr__(self, "d2f", _vectorize(self.d2f))

    @classmethod
    def from_expr(cls, text):
        """Parse an expression in ``x``, e.g. ``"x**3 - 3*x"``."""
        if isinstance(text, (int, float)):
            text = repr(float(text))
        try:
            expr = sp.sympify(text, locals={"x": _X})
        except (sp.SympifyError, SyntaxError, TypeError) as exc:
            raise ConfigError(f"cannot parse function expression {text!r}: {exc}") from exc
        extra = expr.free_symbols - {_X}
        if extra:
            raise ConfigError(f"expression {text!r} has unknown symbols {sorted(map(str, extra))}")
        d1 = sp.diff(expr, _X)
        d2 = sp.diff(d1, _X)
        lam = lambda e: sp.lambdify(_X, e, modules="numpy")
        return cls(lam(expr), lam(d1), lam(d2), label=str(text), expr=expr)

    @classmethod
    def constant(cls, c=0.0):
        return cls.from_expr(repr(float(c)))

    @property
    def numeric_derivative(self):
        return self.df is None

    def __call__(self, x):
        return self.f(x)

    def derivative(self, x):
        return (self.df or _central(self.f, 1))(x)

    def second_derivative(self, x):
        return (self.d2f or _central(self.f, 2))(x)

    def constant_second_derivative(self):
        """Value of ``f''`` when it is a known constant, else ``None``."""
        if self.expr is None:
            return None
        d2 = sp.simplify(sp.diff(self.expr, _X, 2))
        if d2.free_symbols:
            return None
        return float(d2)

    def polynomial_coefficients(self):
        """Ascending coefficients when the function is a polynomial, else ``None``."""
        if self.expr is None:
            return None
        try:
            poly = sp.Poly(sp.expand(self.expr), _X)
        except sp.PolynomialError:
            return None
        if not all(c.is_number for c in poly.all_coeffs()):
            return None
        return [float(c) for c in reversed(poly.all_coeffs())]

    def critical_points(self, lo, hi, n=4001):
        """Points in ``[lo, hi]`` where ``f'`` vanishes (to locate log singularities)."""
        coeffs = self.polynomial_coefficients()
        if coeffs is not None and len(coeffs) > 2:
            d = np.polynomial.polynomial.polyder(coeffs)
            roots = np.polynomial.polynomial.polyroots(d) if np.any(d) else []
            out = [float(r.real) for r in np.atleast_1d(roots)
                   if abs(r.imag) < 1e-9 and lo <= r.real <= hi]
            return sorted(set(out))
        x = np.linspace(lo, hi, n)
        d = np.abs(self.derivative(x))
        scale = max(float(d.max()), 1e-300)
        idx = np.where((d[1:-1] <= d[:-2]) & (d[1:-1] <= d[2:])
                       & (d[1:-1] < 1e-3 * scale))[0] + 1
        from scipy.optimize import minimize_scalar
        out = []
        for i in idx:
            res = minimize_scalar(lambda t: float(np.abs(self.derivative(np.array([t]))[0])),
                                  bounds=(x[i - 1], x[i + 1]), method="bounded",
                                  options={"xatol": 1e-12})
            if res.fun < 1e-8 * scale:
                out.append(float(res.x))
        return out

    def describe(self):
        return self.label


def as_function(obj):
    """Coerce expression strings, numbers, callables or specs to ``FunctionSpec``."""
    if isinstance(obj, FunctionSpec):
        return obj
    if isinstance(obj, (str, int, float)):
        return FunctionSpec.from_expr(obj)
    if callable(obj):
        return FunctionSpec(obj)
    raise ConfigError(f"cannot interpret {obj!r} as a function")
