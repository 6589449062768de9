"""Command line front end.

Exit codes: 0 success, 1 audit failure, 2 numeric failure, 3 usage/config error.

Config JSON::

    {"problem": "box-linear-50" | {<problem document>},
     "methods": [{"name": "p-agd"}, {"name": "gd", "step": 0.5}, {"name": "eg"}],
     "T": 1000, "gamma": 2.0, "seed": 0,
     "divergence_threshold": 1e12, "tol": null,
     "output": {"trace_csv": "trace.csv", "report_json": "report.json",
                "plot_svg": "plot.svg"}}

Relative output paths are resolved against ``--out-dir`` (default: cwd).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Optional

import numpy as np

from . import analysis
from .algorithms import ANCHORED, METHODS, NumericalFailure, RunOptions, run
from .operators import ContractViolation
from .plot import residual_svg
from .problems import builtin, problem_from_dict
from .resolvents import sample_domain
from .traceio import read_trace_csv, write_combined_csv, write_trace_csv

EXIT_OK, EXIT_AUDIT, EXIT_NUMERIC, EXIT_CONFIG = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    problem: object
    methods: list
    T: int = 1000
    gamma: float = 2.0
    seed: int = 0
    output: dict = dc_field(default_factory=dict)
    divergence_threshold: float = 1e12
    tol: Optional[float] = None

    @classmethod
    def from_dict(cls, doc, default_methods=None):
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        if "problem" not in doc:
            raise ConfigError("config has no 'problem'")
        methods = doc.get("methods", default_methods)
        if not methods:
            raise ConfigError("config needs at least one method")
        norm = []
        for m in methods:
            m = {"name": m} if isinstance(m, str) else dict(m)
            if m.get("name") not in METHODS:
                raise ConfigError(f"unknown method {m.get('name')!r}; expected one of {METHODS}")
            norm.append(m)
        T = doc.get("T", 1000)
        if not isinstance(T, int) or isinstance(T, bool) or T < 1:
            raise ConfigError(f"T must be a positive integer, got {T!r}")
        try:
            gamma = float(doc.get("gamma", 2.0))
        except (TypeError, ValueError):
            raise ConfigError(f"gamma must be a number, got {doc.get('gamma')!r}") from None
        if any(m["name"] in ANCHORED for m in norm) and not gamma >= 2:
            raise ConfigError(f"anchored methods need gamma >= 2, got {gamma}")
        return cls(doc["problem"], norm, T, gamma, int(doc.get("seed", 0)),
                   dict(doc.get("output") or {}),
                   float(doc.get("divergence_threshold", 1e12)), doc.get("tol"))

    def build_problem(self):
        if isinstance(self.problem, str):
            return builtin(self.problem, seed=self.seed)
        return problem_from_dict(self.problem)

    def options(self):
        return RunOptions(divergence_threshold=self.divergence_threshold, tol=self.tol)


def load_config(path, default_methods=None, seed=None):
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if seed is not None:
        doc["seed"] = seed
    return ExperimentConfig.from_dict(doc, default_methods)


def _out(out_dir, name):
    p = Path(name)
    return p if p.is_absolute() else Path(out_dir) / p


def _run_methods(cfg, problem):
    traces = []
    for m in cfg.methods:
        traces.append(run(problem, m["name"], cfg.T, gamma=cfg.gamma, step=m.get("step"),
                          options=cfg.options()))
    return traces


def _finite(x):
    x = float(x)
    return x if np.isfinite(x) else None


def summarize(trace):
    i = trace.last
    out = {"method": trace.method, "rows": len(trace.z), "diverged": trace.diverged,
           "stopped_early": trace.stopped_early,
           "final": {"t": i, "cert_residual": _finite(trace.cert_residual[i]),
                     "nat_residual": _finite(trace.nat_residual[i]),
                     "tan_residual": _finite(trace.tan_residual[i]),
                     "anchor_dist": _finite(trace.anchor_dist[i])}}
    if np.isfinite(trace.bound_thm[i]):
        out["final"]["bound_thm"] = float(trace.bound_thm[i])
        out["final"]["bound_margin"] = float(trace.bound_thm[i] - trace.cert_residual[i])
        out["below_bound"] = bool(trace.cert_residual[i] <= trace.bound_thm[i])
    return out


def _write_json(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")


def cmd_run(cfg, out_dir="."):
    problem = cfg.build_problem()
    traces = _run_methods(cfg, problem)
    base = _out(out_dir, cfg.output.get("trace_csv", f"{problem.label}.csv"))
    for tr in traces:
        path = base if len(traces) == 1 else base.with_name(f"{base.stem}_{tr.method}{base.suffix}")
        write_trace_csv(tr, path)
    summary = {"problem": problem.label, "T": cfg.T, "gamma": cfg.gamma,
               "runs": [summarize(tr) for tr in traces]}
    _write_json(_out(out_dir, cfg.output.get("report_json", f"{problem.label}_summary.json")), summary)
    for s in summary["runs"]:
        f = s["final"]
        print(f"{s['method']:>6}  t={f['t']:<8d} cert={f['cert_residual']}  "
              f"tan={f['tan_residual']}  diverged={s['diverged']}")
    return EXIT_OK


def cmd_audit(cfg, out_dir=".", trace_path=None):
    problem = cfg.build_problem()
    if trace_path is not None:
        trace = read_trace_csv(trace_path)
        if trace.gamma is None:
            trace.gamma, trace.lipschitz_L = cfg.gamma, problem.field.lipschitz_L
    else:
        method = next((m["name"] for m in cfg.methods if m["name"] in ANCHORED), None)
        if method is None:
            raise ConfigError("audit needs an anchored method (p-agd or agd)")
        trace = run(problem, method, cfg.T, gamma=cfg.gamma, options=cfg.options())
    rng = np.random.default_rng(cfg.seed)
    points = None
    if problem.part.supports_cone_distance:
        stride = max(1, trace.last // 1000)
        points = np.vstack([trace.z[1::stride], sample_domain(problem.part, rng, 1000)])
    reports = analysis.audit_trace(trace, problem, residual_points=points)
    for r in reports:
        print(r)
    ok = all(r.passed is not False for r in reports)
    doc = {"problem": problem.label, "T": trace.T, "gamma": trace.gamma, "pass": ok,
           "checks": [r.to_json() for r in reports]}
    _write_json(_out(out_dir, cfg.output.get("report_json", f"{problem.label}_audit.json")), doc)
    return EXIT_OK if ok else EXIT_AUDIT


def cmd_compare(cfg, out_dir="."):
    if len(cfg.methods) < 2:
        raise ConfigError("compare needs at least two methods")
    problem = cfg.build_problem()
    traces = _run_methods(cfg, problem)
    write_combined_csv(traces, _out(out_dir, cfg.output.get("trace_csv", f"{problem.label}_compare.csv")))
    if cfg.output.get("plot_svg"):
        svg = residual_svg(traces, title=f"{problem.label}: tangent residual")
        path = _out(out_dir, cfg.output["plot_svg"])
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(svg)
    rows = [summarize(tr) for tr in traces]
    print(f"{'method':>6}  {'last t':>8}  {'tan residual':>14}  diverged")
    for s in rows:
        tan = s["final"]["tan_residual"]
        print(f"{s['method']:>6}  {s['final']['t']:>8d}  "
              f"{'-' if tan is None else format(tan, '.3e'):>14}  {s['diverged']}")
    _write_json(_out(out_dir, cfg.output.get("report_json", f"{problem.label}_compare.json")),
                {"problem": problem.label, "T": cfg.T, "runs": rows})
    return EXIT_OK


def cmd_check_scalars(gamma, tmax):
    if not gamma >= 2:
        raise ConfigError(f"gamma must be >= 2, got {gamma}")
    rep = analysis.check_scalar_bounds(gamma, tmax)
    print(rep)
    print(json.dumps(rep.details))
    return EXIT_OK if rep.passed else EXIT_AUDIT


def build_parser():
    parser = argparse.ArgumentParser(prog="pagd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "audit", "compare"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out-dir", default=".")
        if name == "audit":
            p.add_argument("--trace", default=None, help="audit an existing trace CSV instead of running")
    p = sub.add_parser("check-scalars")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--tmax", type=int, required=True)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if args.command == "check-scalars":
            return cmd_check_scalars(args.gamma, args.tmax)
        default = [{"name": "p-agd"}] if args.command == "audit" else None
        cfg = load_config(args.config, default, args.seed)
        if args.command == "run":
            return cmd_run(cfg, args.out_dir)
        if args.command == "audit":
            return cmd_audit(cfg, args.out_dir, args.trace)
        return cmd_compare(cfg, args.out_dir)
    except (ConfigError, ContractViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
