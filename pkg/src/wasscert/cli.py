"""Command-line front end: ``verify``, ``sweep`` and ``map``.

Exit codes: 0 when every certificate Holds, is Tight or has unverified
hypotheses; 2 when any certificate is Violated; 1 on configuration or
runtime errors.
"""
import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from wasscert import __version__, certify, config
from wasscert.errors import ConfigError, WassCertError
from wasscert.functionals import LEBESGUE
from wasscert.geodesics import GeodesicCurve, convexity_modulus, entropy_curve
from wasscert.transport1d import optimal_map
from wasscert.verdict import ATOL, RTOL, Verdict

logger = logging.getLogger("wasscert")

EXIT_OK, EXIT_ERROR, EXIT_VIOLATED = 0, 1, 2


def atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v):
    return repr(float(v))


class Runner:
    """Resolves a parsed config into tasks and runs them in order."""

    def __init__(self, cfg: config.RunConfig, threads=None, atol=None, rtol=None, seed=None):
        s = cfg.settings
        self.cfg = cfg
        self.threads = int(threads if threads is not None else s.get("threads", 1))
        self.atol = float(atol if atol is not None else s.get("atol", ATOL))
        self.rtol = float(rtol if rtol is not None else s.get("rtol", RTOL))
        self.seed = int(seed if seed is not None else s.get("seed", 0))
        self.factory = config.MeasureFactory(cfg.measures)

    def _tols(self, req):
        return float(req.get("atol", self.atol)), float(req.get("rtol", self.rtol))

    def _one(self, entry, req, args, where):
        resolved = config.resolve_args(entry, args, self.factory, where)
        atol, rtol = self._tols(req)
        return certify.evaluate(entry.name, resolved, req.get("bounds"), atol, rtol)

    def certificate_tasks(self):
        tasks = []
        for i, req in enumerate(self.cfg.certificates):
            entry = certify.lookup(req["id"])
            label = req.get("name", f"certificates[{i}]")
            tasks.append(({"kind": "certificate", "name": label, "id": entry.name},
                          lambda e=entry, r=req, w=f"certificates[{i}]":
                          self._one(e, r, r.get("args", {}), w)))
        return tasks

    def sweep_specs(self):
        rng = np.random.default_rng(self.seed)
        specs = []
        for i, sw in enumerate(self.cfg.sweeps):
            entry = certify.lookup(sw["id"])
            where = f"sweeps[{i}]"
            axes = config.axes_of(sw, rng, where)

            def build(params, e=entry, s=sw, w=where):
                args = config.substitute(s.get("args", {}), params)
                req = dict(s, bounds=config.substitute(s.get("bounds"), params))
                return self._one(e, req, args, w)
            spec = certify.SweepSpec(entry.name, axes, build, {"name": sw.get("name", where)})
            if spec.size > certify.MAX_SWEEP:
                raise certify.SizeLimit(f"{where}: {spec.size} points > {certify.MAX_SWEEP}")
            specs.append((sw, spec))
        return specs

    def prebuild(self):
        # named measures are shared between tasks; build them once, in order
        for name in self.cfg.measures:
            self.factory.get(name)

    def run(self, tasks):
        def call(task):
            meta, fn = task
            try:
                return meta, fn(), None
            except WassCertError as exc:
                return meta, None, f"{type(exc).__name__}: {exc}"
            except (ValueError, ArithmeticError, TypeError) as exc:
                return meta, None, f"{type(exc).__name__}: {exc}"
        if self.threads <= 1:
            return [call(t) for t in tasks]
        with ThreadPoolExecutor(max_workers=self.threads) as ex:
            return list(ex.map(call, tasks))


def _record(index, meta, cert, err):
    rec = dict(meta)
    rec["index"] = index
    if err is None:
        rec["status"] = "ok"
        rec["certificate"] = cert.to_dict()
    else:
        rec["status"] = "error"
        rec["error"] = err
    return rec


def _summary(records, sweep_summaries):
    counts = {v.value: 0 for v in Verdict}
    errors = 0
    min_slack, argmin = None, None
    for r in records:
        if r["status"] != "ok":
            errors += 1
            continue
        c = r["certificate"]
        counts[c["verdict"]] += 1
        s = c["slack"]
        if isinstance(s, float) and (min_slack is None or s < min_slack):
            min_slack, argmin = s, r["index"]
    return {"records": len(records), "counts": counts, "errors": errors,
            "min_slack": min_slack, "min_slack_record": argmin, "sweeps": sweep_summaries}


def _sweep_csv(spec, points):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = [a.name for a in spec.axes]
    w.writerow(names + ["lhs", "rhs", "slack", "verdict", "error"])
    for p in points:
        row = [_fmt(p.params[n]) for n in names]
        if p.certificate is None:
            row += ["", "", "", "Error", p.error]
        else:
            c = p.certificate
            row += [_fmt(c.lhs), _fmt(c.rhs), _fmt(c.slack), c.verdict.value, ""]
        w.writerow(row)
    return buf.getvalue()


def _default_out(source, suffix):
    stem = source.split(":", 1)[-1]
    return Path(Path(stem).stem + suffix)


def execute(cfg, args, include_certificates=True, csv_dir=None):
    """Run a config; returns (report dict, exit code)."""
    runner = Runner(cfg, args.threads, args.atol, args.rtol, args.seed)
    runner.prebuild()
    tasks = runner.certificate_tasks() if include_certificates else []
    specs = runner.sweep_specs()
    sweep_slices = []
    for k, (sw, spec) in enumerate(specs):
        start = len(tasks)
        for j, params in enumerate(spec.points()):
            meta = {"kind": "sweep_point", "name": spec.fixed["name"], "id": spec.inequality,
                    "sweep": k, "point": j, "params": params}
            tasks.append((meta, lambda s=spec, p=params: s.build(p)))
        sweep_slices.append((sw, spec, start, len(tasks)))
    results = runner.run(tasks)
    records = [_record(i, *res) for i, res in enumerate(results)]

    sweep_summaries = []
    for k, (sw, spec, a, b) in enumerate(sweep_slices):
        pts = tuple(certify.SweepPoint(j, results[i][0]["params"], results[i][1], results[i][2])
                    for j, i in enumerate(range(a, b)))
        summ = certify.SweepResult(spec, pts).summary()
        summ["name"] = spec.fixed["name"]
        if csv_dir is not None:
            target = sw.get("csv") or f"{_default_out(cfg.source, '').name}_sweep{k}.csv"
            path = Path(csv_dir) / target if not Path(target).is_absolute() else Path(target)
            atomic_write(path, _sweep_csv(spec, pts))
            summ["csv"] = str(target)
        sweep_summaries.append(summ)

    report = {
        "tool": "wasscert",
        "version": __version__,
        "config_source": cfg.source,
        "config_digest": hashlib.sha256(cfg.raw).hexdigest(),
        "settings": {"atol": runner.atol, "rtol": runner.rtol, "seed": runner.seed},
        "records": records,
        "summary": _summary(records, sweep_summaries),
    }
    summ = report["summary"]
    if summ["counts"][Verdict.VIOLATED.value]:
        code = EXIT_VIOLATED
    elif summ["errors"]:
        code = EXIT_ERROR
    else:
        code = EXIT_OK
    return report, code


def dump_report(report):
    return json.dumps(report, indent=1, sort_keys=False, allow_nan=False) + "\n"


def _print_summary(report, out, elapsed):
    s = report["summary"]
    counts = ", ".join(f"{k}={v}" for k, v in s["counts"].items())
    print(f"{s['records']} records: {counts}, errors={s['errors']}; "
          f"min slack {s['min_slack']!r}; report {out} ({elapsed:.2f}s)")
    for r in report["records"]:
        if r["status"] != "ok":
            print(f"  error in {r['name']}: {r['error']}", file=sys.stderr)


def cmd_verify(args, sweep_only=False):
    raw, source = config.read_bytes(args.config)
    cfg = config.parse(raw, source)
    out = Path(args.out) if args.out else _default_out(source, ".report.json")
    t0 = time.perf_counter()
    csv_dir = out.parent if sweep_only else None
    report, code = execute(cfg, args, include_certificates=not sweep_only, csv_dir=csv_dir)
    atomic_write(out, dump_report(report))
    _print_summary(report, out, time.perf_counter() - t0)
    return code


def cmd_map(args):
    raw, source = config.read_bytes(args.config)
    cfg = config.parse(raw, source)
    factory = config.MeasureFactory(cfg.measures)
    mu = factory.get(args.source, "--source")
    nu = factory.get(args.target, "--target")
    K = int(args.K or cfg.settings.get("map_K", 256))
    T = optimal_map(mu, nu, K)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "T", "dT"])
    for x, y, s in T.table():
        w.writerow([_fmt(x), _fmt(y), _fmt(s)])
    atomic_write(args.out, buf.getvalue())
    msg = f"map {args.source} -> {args.target}: {T.K} rows to {args.out}"
    if args.curve:
        ref = LEBESGUE if args.reference is None else factory.get(args.reference, "--reference")
        curve = GeodesicCurve(mu, nu)
        ec = entropy_curve(curve, ref)
        atomic_write(args.curve, ec.to_csv())
        msg += f"; entropy curve to {args.curve}"
        if curve.w2_squared > 1e-12:
            msg += f" (convexity modulus {convexity_modulus(curve, ref, ec):.6g})"
    print(msg)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="wasscert",
                                description="Certify transport-entropy inequalities numerically.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="JSON config file or bundled suite name")
    common.add_argument("--threads", type=int, default=None, help="worker threads")
    common.add_argument("--atol", type=float, default=None)
    common.add_argument("--rtol", type=float, default=None)
    common.add_argument("--seed", type=int, default=None, help="seed for random sweep axes")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="evaluate all certificates and sweeps")
    v.add_argument("--out", help="report path (default <config>.report.json)")
    s = sub.add_parser("sweep", parents=[common], help="run sweeps and write CSV grids")
    s.add_argument("--out", help="report path (default <config>.report.json)")
    m = sub.add_parser("map", parents=[common], help="tabulate an optimal map")
    m.add_argument("--source", required=True)
    m.add_argument("--target", required=True)
    m.add_argument("--out", required=True, help="CSV path for x, T(x), T'(x)")
    m.add_argument("--K", type=int, default=None, help="grid size (>= 64)")
    m.add_argument("--curve", help="CSV path for the entropy curve along the geodesic")
    m.add_argument("--reference", help="reference measure for the curve (default Lebesgue)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        if args.command == "map":
            return cmd_map(args)
        return cmd_verify(args, sweep_only=args.command == "sweep")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except WassCertError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
