"""Run configurations: measure definitions, certificate requests and sweeps.

A configuration is a JSON document with the top-level keys ``measures``,
``certificates``, ``sweeps`` and ``settings``.  Measures are referenced by
name or given inline.  Sweep templates may contain ``${expr}`` placeholders
that are evaluated with the grid point's axis values.
"""
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List

import numpy as np
import sympy as sp

from wasscert import certify
from wasscert.errors import ConfigError
from wasscert.functions import as_function
from wasscert.gaussian_nd import GaussianNd
from wasscert.measure1d import (Gaussian, GridDensity, IntervalSet, PotentialSpec, normalize,
                                restrict, standard_gaussian, tilt)

SUITES = ("equality_cases", "paper_catalog", "property_suite")
TOP_KEYS = {"measures", "certificates", "sweeps", "settings"}
SETTINGS = {"atol": (0.0, 1.0), "rtol": (0.0, 1.0), "threads": (1, 64), "seed": (0, 2 ** 32 - 1),
            "map_K": (64, 1 << 16)}
MEASURE_ROLES = ("m", "mu", "nu", "source", "target")
FUNCTION_ROLES = ("f", "g", "F", "G")
_PLACEHOLDER = re.compile(r"\$\{([^}]*)\}")


@dataclass
class RunConfig:
    raw: bytes
    source: str
    measures: dict
    certificates: List[dict]
    sweeps: List[dict]
    settings: dict = field(default_factory=dict)


def read_bytes(path_or_suite):
    """Config bytes from a file path or the name of a bundled suite."""
    p = Path(path_or_suite)
    if p.is_file():
        return p.read_bytes(), str(p)
    name = p.name[:-5] if p.name.endswith(".json") else p.name
    if name in SUITES and not p.exists():
        data = resources.files("wasscert").joinpath("suites", f"{name}.json").read_bytes()
        return data, f"suite:{name}"
    raise ConfigError(f"config file {str(p)!r} not found (bundled suites: {', '.join(SUITES)})")


def parse(raw: bytes, source="<config>") -> RunConfig:
    try:
        doc = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{source}: not UTF-8 text ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{source}: top level must be an object")
    unknown = sorted(set(doc) - TOP_KEYS)
    if unknown:
        raise ConfigError(f"{source}: unknown top-level key(s) {unknown}; allowed {sorted(TOP_KEYS)}")
    measures = doc.get("measures", {})
    if isinstance(measures, list):
        named = {}
        for i, d in enumerate(measures):
            if not isinstance(d, dict) or "name" not in d:
                raise ConfigError(f"{source}: measures[{i}] needs a 'name'")
            named[d["name"]] = {k: v for k, v in d.items() if k != "name"}
        measures = named
    if not isinstance(measures, dict):
        raise ConfigError(f"{source}: 'measures' must be an object or a list")
    certs = doc.get("certificates", [])
    sweeps = doc.get("sweeps", [])
    for key, val in (("certificates", certs), ("sweeps", sweeps)):
        if not isinstance(val, list) or not all(isinstance(v, dict) for v in val):
            raise ConfigError(f"{source}: '{key}' must be a list of objects")
    settings = doc.get("settings", {})
    if not isinstance(settings, dict):
        raise ConfigError(f"{source}: 'settings' must be an object")
    cfg = RunConfig(raw, source, measures, certs, sweeps, dict(settings))
    validate(cfg)
    return cfg


def _check_refs(obj, measures, where):
    if isinstance(obj, str) and obj not in measures:
        raise ConfigError(f"{where}: undefined measure {obj!r} (defined: {sorted(measures)})")
    if isinstance(obj, dict) and "base" in obj:
        _check_refs(obj["base"], measures, where + ".base")


def validate(cfg: RunConfig):
    for k, v in cfg.settings.items():
        if k not in SETTINGS:
            raise ConfigError(f"settings: unknown key {k!r}; allowed {sorted(SETTINGS)}")
        lo, hi = SETTINGS[k]
        if not isinstance(v, (int, float)) or not lo <= v <= hi:
            raise ConfigError(f"settings.{k} = {v!r} outside [{lo}, {hi}]")
    for name, d in cfg.measures.items():
        if not isinstance(d, dict) or "type" not in d:
            raise ConfigError(f"measures.{name}: needs a 'type'")
        if "base" in d:
            _check_refs(d["base"], cfg.measures, f"measures.{name}")
    for i, req in enumerate(cfg.certificates):
        where = f"certificates[{i}]"
        if "id" not in req:
            raise ConfigError(f"{where}: missing 'id'")
        entry = certify.lookup(req["id"])
        args = req.get("args", {})
        for role in entry.roles:
            if role not in args:
                raise ConfigError(f"{where} ({entry.name}): missing argument {role!r}")
        for role in MEASURE_ROLES:
            if role in args:
                _check_refs(args[role], cfg.measures, f"{where}.args.{role}")
    for i, sw in enumerate(cfg.sweeps):
        where = f"sweeps[{i}]"
        if "id" not in sw:
            raise ConfigError(f"{where}: missing 'id'")
        entry = certify.lookup(sw["id"])
        args = sw.get("args", {})
        for role in entry.roles:
            if role not in args:
                raise ConfigError(f"{where} ({entry.name}): missing argument {role!r}")
        for role in MEASURE_ROLES:
            if role in args:
                _check_refs(args[role], cfg.measures, f"{where}.args.{role}")


# ---------------------------------------------------------------- templates

def _evaluate(expr, params):
    try:
        val = sp.sympify(expr, locals={k: sp.Float(v) for k, v in params.items()})
        return float(val)
    except (sp.SympifyError, TypeError, ValueError, SyntaxError) as exc:
        raise ConfigError(f"cannot evaluate placeholder ${{{expr}}} with {params}: {exc}") from exc


def substitute(obj, params):
    """Replace ``${expr}`` placeholders by their values at ``params``."""
    if isinstance(obj, dict):
        return {k: substitute(v, params) for k, v in obj.items()}
    if isinstance(obj, list):
        return [substitute(v, params) for v in obj]
    if isinstance(obj, str):
        m = _PLACEHOLDER.fullmatch(obj.strip())
        if m:
            return _evaluate(m.group(1), params)
        return _PLACEHOLDER.sub(lambda mm: repr(_evaluate(mm.group(1), params)), obj)
    return obj


# ---------------------------------------------------------------- builders

def _num(d, key, default=None, where=""):
    v = d.get(key, default)
    if v is None:
        raise ConfigError(f"{where}: missing numeric field {key!r}")
    try:
        return float(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: field {key!r} must be a number, got {v!r}") from exc


def _interval_set(v, where):
    if isinstance(v, str) and v.lower() in ("r", "real", "real_line"):
        return IntervalSet.real_line()
    try:
        return IntervalSet([tuple(p) for p in v])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: bad interval list {v!r}: {exc}") from exc


class MeasureFactory:
    """Builds named measures once and caches them."""

    def __init__(self, definitions: Dict[str, dict]):
        self.definitions = definitions
        self.cache = {}
        self._stack = []

    def get(self, ref, where="measure"):
        if isinstance(ref, dict):
            return self.build(ref, where)
        if not isinstance(ref, str):
            raise ConfigError(f"{where}: expected a measure name or definition, got {ref!r}")
        if ref in self.cache:
            return self.cache[ref]
        if ref not in self.definitions:
            raise ConfigError(f"{where}: undefined measure {ref!r} (defined: {sorted(self.definitions)})")
        if ref in self._stack:
            raise ConfigError(f"{where}: measure {ref!r} is defined in terms of itself")
        self._stack.append(ref)
        try:
            self.cache[ref] = self.build(self.definitions[ref], f"measures.{ref}")
        finally:
            self._stack.pop()
        return self.cache[ref]

    def build(self, d, where):
        t = d.get("type")
        if t in ("gaussian", "normal"):
            if "sd" in d:
                var = _num(d, "sd", where=where) ** 2
            else:
                var = _num(d, "var", 1.0, where)
            return Gaussian(_num(d, "mean", 0.0, where), var)
        if t == "standard_gaussian":
            return standard_gaussian()
        if t == "potential":
            fn = as_function(d.get("V"))
            poly = fn.polynomial_coefficients()
            lo, hi = d.get("kappa_lo"), d.get("kappa_hi")
            if poly is not None:
                pot = PotentialSpec.polynomial(poly, lo, hi, d.get("minimizer"))
            else:
                pot = PotentialSpec.custom(fn, lo, hi, d.get("minimizer"))
            return normalize(pot, d.get("domain"))
        if t == "polynomial":
            pot = PotentialSpec.polynomial(d.get("coefficients"), d.get("kappa_lo"),
                                           d.get("kappa_hi"), d.get("minimizer"))
            return normalize(pot, d.get("domain"))
        if t == "restrict":
            return restrict(self.get(d.get("base"), where), _interval_set(d.get("set"), where))
        if t == "tilt":
            return tilt(self.get(d.get("base"), where), d.get("F"), _num(d, "kappa", 1.0, where))
        if t == "translate":
            return self.get(d.get("base"), where).translate(_num(d, "shift", where=where))
        if t == "grid":
            return GridDensity(d.get("nodes"), d.get("values"))
        if t == "gaussian_nd":
            cov = d.get("cov")
            mean = d.get("mean", [0.0] * len(cov))
            return GaussianNd(mean, cov)
        raise ConfigError(f"{where}: unknown measure type {t!r}")


def resolve_args(entry, args, factory: MeasureFactory, where):
    """Turn config values into the objects the verifier expects."""
    out = {}
    for k, v in args.items():
        w = f"{where}.args.{k}"
        if k in MEASURE_ROLES:
            out[k] = factory.get(v, w)
        elif k in FUNCTION_ROLES:
            out[k] = as_function(v)
        elif entry.name == "concentration" and k in ("A", "B"):
            out[k] = _interval_set(v, w)
        elif k in ("A", "B"):
            out[k] = np.asarray(v, dtype=float)
        elif k in ("a", "b"):
            out[k] = np.atleast_1d(np.asarray(v, dtype=float))
        elif k == "K":
            out[k] = int(v)
        elif k in ("t", "scale"):
            out[k] = float(v)
        else:
            out[k] = v
    return out


def axes_of(sw, rng, where):
    axes = []
    for j, a in enumerate(sw.get("axes", [])):
        w = f"{where}.axes[{j}]"
        if "name" not in a:
            raise ConfigError(f"{w}: missing 'name'")
        if "values" in a:
            axes.append(certify.Axis(a["name"], tuple(float(v) for v in a["values"])))
        elif "random" in a:
            lo, hi = a["random"]
            n = int(a.get("num", 1))
            if n > certify.MAX_SWEEP:
                raise certify.SizeLimit(f"{w}: {n} points > {certify.MAX_SWEEP}")
            axes.append(certify.Axis(a["name"], tuple(float(v) for v in rng.uniform(lo, hi, n))))
        elif "range" in a:
            lo, hi = a["range"]
            axes.append(certify.Axis.linspace(a["name"], float(lo), float(hi), a.get("num"),
                                              a.get("step")))
        else:
            raise ConfigError(f"{w}: needs 'values', 'range' or 'random'")
    return tuple(axes)

