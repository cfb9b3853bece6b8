"""Command-line interface: ``gtdlab <command> ...``.

stdout carries data only (CSV or JSON); diagnostics go to stderr.
Exit codes: 0 ok, 2 parameter/domain errors, 3 numerical failure,
4 infeasible reconstruction.
"""
from __future__ import annotations

import argparse
import itertools
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from . import functionals as fn
from . import gtf, inequalities as ineq, momentlab
from .densities import parse_density
from .errors import (ConsistencyError, ConvergenceError, DomainError, InfeasibleError,
                     ParameterError)
from .io import csv_string, json_string, read_moments
from .numerics import quad_tolerance
from .transform import differential_escort

EXIT_OK, EXIT_PARAM, EXIT_NUMERIC, EXIT_INFEASIBLE = 0, 2, 3, 4
ENV_QUAD_TOL = "GTDLAB_QUAD_TOL"


@dataclass(frozen=True)
class RunConfig:
    quad_tol: float = 1e-10
    grid_nodes: int = 4096
    output_format: str | None = None  # None: per-command default
    seed_label: str = ""

    def __post_init__(self):
        if not 1e-14 <= self.quad_tol <= 1e-4:
            raise ParameterError(f"quad tolerance {self.quad_tol:g} outside [1e-14, 1e-4]")
        if self.grid_nodes < 64:
            raise ParameterError("grid nodes must be at least 64")
        if self.output_format not in (None, "csv", "json"):
            raise ParameterError("format must be csv or json")

    @classmethod
    def from_args(cls, args, env=None):
        env = os.environ if env is None else env
        tol = args.quad_tol
        if tol is None and env.get(ENV_QUAD_TOL):
            try:
                tol = float(env[ENV_QUAD_TOL])
            except ValueError as exc:
                raise ParameterError(f"{ENV_QUAD_TOL} is not a number") from exc
        return cls(cls.quad_tol if tol is None else tol, args.grid_nodes, args.format,
                   args.seed_label)

    def meta(self, command):
        m = {"tool": f"gtdlab {__version__}", "command": command,
             "quad_tol": self.quad_tol, "grid_nodes": self.grid_nodes}
        if self.seed_label:
            m["seed_label"] = self.seed_label
        return m


def parse_grid(spec: str) -> np.ndarray:
    """'a:b:n' -> n equally spaced nodes from a to b inclusive."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ParameterError(f"grid spec {spec!r} must be a:b:n")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ParameterError(f"grid spec {spec!r} must be a:b:n") from exc
    if n < 1 or (n > 1 and not b > a):
        raise ParameterError(f"grid spec {spec!r}: need n >= 1 and b > a")
    return np.linspace(a, b, n)


def parse_orders(spec: str) -> list[int]:
    """'1..8' or '1,2,4'."""
    try:
        if ".." in spec:
            a, b = spec.split("..")
            out = list(range(int(a), int(b) + 1))
        else:
            out = [int(s) for s in spec.split(",")]
    except ValueError as exc:
        raise ParameterError(f"orders spec {spec!r} must be i..j or a comma list") from exc
    if not out or min(out) < 1:
        raise ParameterError("orders must be positive integers")
    return out


def _warn(msg):
    print(f"gtdlab: warning: {msg}", file=sys.stderr)


def _emit(cfg, command, columns, rows, default="csv", extra=None):
    if (cfg.output_format or default) == "json":
        obj = {"meta": {**cfg.meta(command), **(extra or {})}, "columns": columns,
               "rows": [list(r) for r in rows]}
        sys.stdout.write(json_string(obj))
    else:
        sys.stdout.write(csv_string(columns, rows, {**cfg.meta(command), **(extra or {})}))


def _emit_record(cfg, command, record, default="json"):
    if (cfg.output_format or default) == "csv":
        keys = sorted(k for k, v in record.items() if not isinstance(v, (dict, list)))
        sys.stdout.write(csv_string(keys, [[record[k] for k in keys]], cfg.meta(command)))
    else:
        sys.stdout.write(json_string({"meta": cfg.meta(command), **record}))


def _default_grid(d, n):
    lo, hi = d.support
    a = lo if np.isfinite(lo) else -8.0 * d.scale
    b = hi if np.isfinite(hi) else 8.0 * d.scale
    return np.linspace(a, b, n)


# ---------------------------------------------------------------- commands

def cmd_gtf(args, cfg):
    par = gtf.TrigParams(args.v, args.w)
    if args.x is not None:
        xs = np.asarray(args.x, dtype=float)
    elif args.grid is not None:
        xs = parse_grid(args.grid)
    else:
        raise ParameterError("give --grid a:b:n or --x values")
    name = args.fn
    if name in ("arcsin", "sin", "cos") and not np.isfinite(par.pi):
        _warn(f"pi_{{v,w}} = inf for v = {args.v:g} in (0, 1]; no periodic extension")
    if name == "arcsin":
        rows = [(x, gtf.arcsin_vw(par, x)) for x in xs]
        cols = ["y", "value"]
    elif name == "arsinh":
        rows = [(x, gtf.arsinh_vw(par, x)) for x in xs]
        cols = ["y", "value"]
    elif name in ("sin", "cos"):
        s, c = gtf.sincos_vw(par, xs)
        val = s if name == "sin" else c
        res = np.abs(np.abs(c) ** par.v + np.abs(s) ** par.w - 1.0)
        rows = zip(xs, val, res)
        cols = ["x", "value", "pythagorean_residual"]
    else:
        s, c = gtf.sinhcosh_vw(par, xs)
        val = s if name == "sinh" else c
        res = np.abs(c ** par.v - np.abs(s) ** par.w - 1.0)
        rows = zip(xs, val, res)
        cols = ["x", "value", "pythagorean_residual"]
    _emit(cfg, f"gtf {name}", cols, list(rows), extra={"v": args.v, "w": args.w})


def cmd_density(args, cfg):
    d = parse_density(args.density)
    xs = parse_grid(args.grid) if args.grid else _default_grid(d, cfg.grid_nodes)
    rows = list(zip(xs, d.pdf(xs)))
    _emit(cfg, "density", ["x", "pdf"], rows, extra={"density": d.label,
                                                     "support": list(d.support)})


def cmd_transform(args, cfg):
    f = parse_density(args.density)
    g = differential_escort(f, args.alpha, method=args.method, grid_nodes=cfg.grid_nodes,
                            allow_unbounded=args.allow_unbounded)
    ys = parse_grid(args.grid) if args.grid else _default_grid(g, cfg.grid_nodes)
    rows = list(zip(ys, g.pdf(ys)))
    _emit(cfg, "transform", ["y", "pdf"], rows,
          extra={"source": f.label, "alpha": args.alpha, "density": g.label,
                 "support": list(g.support)})


FUNCTIONALS = {
    "renyi": (lambda f, a: fn.renyi(f, a.lam), ("lam",)),
    "tsallis": (lambda f, a: fn.tsallis(f, a.lam), ("lam",)),
    "shannon": (lambda f, a: fn.shannon(f), ()),
    "entropy-power": (lambda f, a: fn.entropy_power(f, a.lam), ("lam",)),
    "fisher": (lambda f, a: fn.fisher(f, a.p, a.lam), ("p", "lam")),
    "moment": (lambda f, a: fn.moment(f, a.p), ("p",)),
    "deviation": (lambda f, a: fn.typical_deviation(f, a.p), ("p",)),
    "cumulative-moment": (lambda f, a: fn.cumulative_moment(f, a.p, a.gamma), ("p", "gamma")),
    "signed-cumulative-moment": (lambda f, a: fn.signed_cumulative_moment(f, int(a.p), a.gamma),
                                 ("p", "gamma")),
    "cumulative-deviation": (lambda f, a: fn.cumulative_deviation(f, a.p, a.gamma),
                             ("p", "gamma")),
    "central-cumulative-moment": (lambda f, a: fn.central_cumulative_moment(f, a.p, a.gamma),
                                  ("p", "gamma")),
    "cre": (lambda f, a: fn.cumulative_residual_entropy(f), ()),
}


def cmd_functional(args, cfg):
    func, needs = FUNCTIONALS[args.kind]
    for n in needs:
        if getattr(args, n) is None:
            flag = "--lambda" if n == "lam" else f"--{n}"
            raise ParameterError(f"functional {args.kind} needs {flag}")
    f = parse_density(args.density)
    r = func(f, args)
    rec = {"kind": args.kind, "density": f.label,
           "params": {("lambda" if n == "lam" else n): getattr(args, n) for n in needs},
           **r.to_dict()}
    if not r.finite:
        _warn(f"{args.kind} of {f.label} is infinite: {r.reason}")
    _emit_record(cfg, "functional", rec)


INEQ_COLUMNS = ["kind", "p", "beta", "lambda", "density", "lhs", "bound", "slack", "saturated"]


def _ineq_row(job):
    kind, spec, p, beta, lam, central, strict, tol = job
    with quad_tolerance(tol):
        f = ineq.own_minimizer(kind, p, beta, lam) if spec == "minimizer" else parse_density(spec)
        kw = {"central": central, "strict": strict} if kind.startswith("cumulative") else {}
        return ineq.check(kind, f, p, beta, lam, **kw)


def _parse_sweep(items, base):
    axes = dict(base)
    for it in items:
        name, _, rng = it.partition("=")
        name = {"lam": "lambda"}.get(name, name)
        if name not in axes:
            raise ParameterError(f"sweep axis {name!r} must be one of p, beta, lambda")
        axes[name] = list(parse_grid(rng))
    return [tuple(t) for t in itertools.product(axes["p"], axes["beta"], axes["lambda"])]


def cmd_ineq(args, cfg):
    if args.p is None or args.lam is None:
        raise ParameterError("ineq needs --p and --lambda")
    beta = args.beta if args.beta is not None else args.lam
    if args.sweep:
        tuples = _parse_sweep(args.sweep, {"p": [args.p], "beta": [beta], "lambda": [args.lam]})
    else:
        tuples = [(args.p, beta, args.lam)]
    jobs = [(args.kind, args.density, float(p), float(b), float(l), args.central, args.strict,
             cfg.quad_tol) for p, b, l in tuples]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            reports = list(ex.map(_ineq_row, jobs))  # map keeps input order
    else:
        reports = [_ineq_row(j) for j in jobs]
    for r in reports:
        if r.vacuous:
            _warn(f"{r.kind} on {r.density}: left side infinite, inequality holds vacuously")
    if (cfg.output_format or "csv") == "json":
        sys.stdout.write(json_string({"meta": cfg.meta("ineq"),
                                      "reports": [r.to_dict() for r in reports]}))
    else:
        sys.stdout.write(csv_string(INEQ_COLUMNS, [r.row() for r in reports], cfg.meta("ineq")))


def cmd_moments(args, cfg):
    orders = parse_orders(args.orders) if args.orders else None
    if args.source == "cauchy":
        orders = orders or list(range(1, 9))
        seq = momentlab.MomentSequence.cauchy(orders)
        quad = [momentlab.cauchy_cumulative_moment_quadrature(o).value for o in orders]
        rec = {"gamma": seq.gamma, "orders": seq.orders, "values": seq.values,
               "label": seq.label, "quadrature": quad}
    elif args.source.endswith(".json") and os.path.exists(args.source):
        seq = read_moments(args.source)
        if orders:
            seq = momentlab.MomentSequence(seq.gamma, orders, [seq.value(o) for o in orders],
                                           seq.label)
        rec = {"gamma": seq.gamma, "orders": seq.orders, "values": seq.values,
               "label": seq.label}
    else:
        if args.gamma is None:
            raise ParameterError("moments of a density need --gamma")
        f = parse_density(args.source)
        orders = orders or list(range(1, 5))
        vals = []
        for o in orders:
            r = momentlab._cumulative_signed(f, o, args.gamma)
            if not r.finite:
                raise DomainError(f"cumulative moment of order {o} diverges: {r.reason}")
            vals.append(r.value)
        seq = momentlab.MomentSequence(args.gamma, orders, vals, f.label)
        rec = {"gamma": seq.gamma, "orders": seq.orders, "values": seq.values,
               "label": seq.label}
    n = 0
    while 2 * (n + 1) in seq.orders and seq.value(2 * (n + 1)) > 0:
        n += 1
    if n:
        rec["carleman_partial_sums"] = momentlab.carleman_diagnostic(seq, n).tolist()
    _emit_record(cfg, "moments", rec)


def cmd_reconstruct(args, cfg):
    seq = read_moments(args.moments)
    if args.gamma is not None:
        seq = momentlab.MomentSequence(args.gamma, seq.orders, seq.values, seq.label)
    h = momentlab.maxent_reconstruct(seq, args.support)
    ys = parse_grid(args.grid) if args.grid else _default_grid(h, cfg.grid_nodes)
    rows = list(zip(ys, h.pdf(ys)))
    _emit(cfg, "reconstruct", ["y", "pdf"], rows,
          extra={"gamma": seq.gamma, "support": args.support, "density": h.label,
                 "theta": ";".join(f"{t:.16e}" for t in h.meta.get("theta", []))})


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quad-tol", type=float, default=None,
                        help=f"quadrature tolerance (default 1e-10, env {ENV_QUAD_TOL})")
    common.add_argument("--grid-nodes", type=int, default=4096)
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--seed-label", default="")

    ap = argparse.ArgumentParser(prog="gtdlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"gtdlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gtf", parents=[common], help="generalized trigonometric functions")
    s.add_argument("fn", choices=("arcsin", "sin", "cos", "arsinh", "sinh", "cosh"))
    s.add_argument("--v", type=float, required=True)
    s.add_argument("--w", type=float, required=True)
    s.add_argument("--grid")
    s.add_argument("--x", type=float, nargs="+")
    s.set_defaults(func=cmd_gtf)

    s = sub.add_parser("density", parents=[common], help="tabulate a density")
    s.add_argument("density", help="family:params or a CSV grid file")
    s.add_argument("--grid")
    s.set_defaults(func=cmd_density)

    s = sub.add_parser("transform", parents=[common], help="differential-escort transform")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--density", required=True)
    s.add_argument("--grid")
    s.add_argument("--method", choices=("auto", "closed", "numeric"), default="auto")
    s.add_argument("--allow-unbounded", action="store_true")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("functional", parents=[common], help="information functionals")
    s.add_argument("kind", choices=sorted(FUNCTIONALS))
    s.add_argument("--density", required=True)
    s.add_argument("--p", type=float)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--gamma", type=float)
    s.set_defaults(func=cmd_functional)

    s = sub.add_parser("ineq", parents=[common], help="inequality checks and sweeps")
    s.add_argument("kind", choices=ineq.KINDS)
    s.add_argument("--p", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--density", default="minimizer",
                   help="density spec, or 'minimizer' for each tuple's own minimizer")
    s.add_argument("--sweep", action="append", metavar="AXIS=a:b:n",
                   help="sweep p, beta or lambda over a grid (repeatable)")
    s.add_argument("--central", action="store_true")
    s.add_argument("--strict", action="store_true")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_ineq)

    s = sub.add_parser("moments", parents=[common], help="cumulative moment tables")
    s.add_argument("source", help="'cauchy', a moments JSON file, or a density spec")
    s.add_argument("--orders")
    s.add_argument("--gamma", type=float)
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("reconstruct", parents=[common], help="cumulative MaxEnt reconstruction")
    s.add_argument("--moments", required=True)
    s.add_argument("--gamma", type=float)
    s.add_argument("--support", choices=("real", "positive"), default="real")
    s.add_argument("--grid")
    s.set_defaults(func=cmd_reconstruct)
    return ap


def _join_negative(argv):
    # let '--grid -2:2:5' through; argparse would take '-2:2:5' for a flag
    out, it = [], iter(argv)
    for a in it:
        if a in ("--grid", "--sweep"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(_join_negative(sys.argv[1:] if argv is None else list(argv)))
    try:
        cfg = RunConfig.from_args(args)
        with quad_tolerance(cfg.quad_tol):
            args.func(args, cfg)
    except InfeasibleError as exc:
        print(f"gtdlab: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConvergenceError, ConsistencyError) as exc:
        print(f"gtdlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ParameterError, DomainError) as exc:
        print(f"gtdlab: error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except OSError as exc:
        print(f"gtdlab: error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
