"""Command-line front end.

Subcommands: ``solve``, ``example {1,2,3}``, ``converge``, ``gronwall``,
``stability`` and ``operators``. Results go to CSV files in ``--out``; a
short summary goes to stdout and errors to stderr with a nonzero exit code.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from .bernoulli import BernoulliProblem, NotApplicable, classify_stability, exact_solution, uniform_stability_bound
from .config import RunConfig, load_config
from .errors import ConfigError, FracError
from .fdm import Grid, convergence_study, solve_fdm
from .gronwall import (
    GronwallData, gronwall_bound, gronwall_bound_simplified, gronwall_lower_bound, verify_bound,
)
from .kernel import kernel_from_spec
from .operators import AlphaOrder, adjoint_apply, gderiv, gderiv_via_classical, jintegral, to_function

__all__ = ["main", "fmt", "write_csv", "EXAMPLES"]

EXIT_SOLVER = 1
EXIT_CONFIG = 2

_ALPHA_SWEEP = "0.1,0.3,0.5,0.7,0.9,1.0"

EXAMPLES = {
    "1": dict(kernel="conformable", p="1", q="1", n="2", a="0.5", b="2", y0="-1", N="5000",
              alpha=_ALPHA_SWEEP),
    "2": dict(kernel="expshift", p="exp(t)", q="exp(t)", n="2", a="0.5", b="6", y0="-0.5", N="5000",
              alpha=_ALPHA_SWEEP),
    "3": dict(kernel="expscaled", p="exp(-t^2)", q="t", n="2", a="-3", b="3", y0="1", N="5000",
              alpha=_ALPHA_SWEEP),
}
# Examples with a comparison table, and the order used for it.
_TABLE_ALPHA = {"1": 0.5, "3": 0.5}


def fmt(x) -> str:
    """Shortest round-trip text of a float, without a trailing ``.0``."""
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def write_csv(path: str, header, columns) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow(fmt(v) if not isinstance(v, (str, bool, np.bool_)) else str(v).lower() for v in row)


def _alpha_tag(alpha: float) -> str:
    return fmt(alpha).replace(".", "p")


def _outdir(args, cfg: RunConfig) -> str:
    out = getattr(args, "out", None) or cfg.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def _problem(cfg: RunConfig, alpha: float, initial: bool = True) -> BernoulliProblem:
    kernel = kernel_from_spec(cfg.kernel)
    b = cfg.b if cfg.b is not None else cfg.a + 1.0
    if cfg.C is not None:
        return BernoulliProblem(cfg.p, cfg.q, cfg.n, alpha, kernel, (cfg.a, b), constant=cfg.C)
    if cfg.y0 is None or not initial:
        return BernoulliProblem(cfg.p, cfg.q, cfg.n, alpha, kernel, (cfg.a, b))
    t0 = cfg.t0 if cfg.t0 is not None else cfg.a
    return BernoulliProblem(cfg.p, cfg.q, cfg.n, alpha, kernel, (cfg.a, b), initial=(t0, cfg.y0))


def _solve_one(cfg: RunConfig, alpha: float, method: str, out: str, name: str) -> dict:
    prob = _problem(cfg, alpha)
    grid = Grid(cfg.a, cfg.b, cfg.N)
    summary = {"alpha": alpha, "path": os.path.join(out, name)}
    if method in ("exact", "both"):
        ex = exact_solution(prob, grid, cfg.quadrature())
        summary["exact"] = ex
        if ex.meta.get("truncated_at"):
            left, right = ex.meta["truncated_at"]
            print(f"warning: alpha={fmt(alpha)}: solution blows up in ({fmt(left)}, {fmt(right)}); "
                  f"output truncated", file=sys.stderr)
    if method in ("fdm", "both"):
        summary["fdm"] = solve_fdm(prob, grid, cfg.scheme())
    if method == "both":
        ex, fd = summary["exact"], summary["fdm"]
        k = ex.nodes.size
        err = np.abs(ex.values - fd.values[:k])
        summary["max_error"] = float(err.max())
        write_csv(summary["path"], ["t", "y_exact", "y_fdm", "abs_error"],
                  [ex.nodes, ex.values, fd.values[:k], err])
    else:
        traj = summary["exact"] if "exact" in summary else summary["fdm"]
        write_csv(summary["path"], ["t", "y"], [traj.nodes, traj.values])
    return summary


def _report(s: dict) -> str:
    parts = [f"alpha={fmt(s['alpha'])}"]
    if "exact" in s:
        parts.append(f"exact y({fmt(s['exact'].nodes[-1])})={fmt(s['exact'].values[-1])}")
    if "fdm" in s:
        parts.append(f"fdm y({fmt(s['fdm'].nodes[-1])})={fmt(s['fdm'].values[-1])}")
    if "max_error" in s:
        parts.append(f"max |exact-fdm|={s['max_error']:.3e}")
    parts.append(f"-> {s['path']}")
    return "  ".join(parts)


def cmd_solve(args, cfg: RunConfig) -> int:
    cfg.require("solve")
    out = _outdir(args, cfg)
    method = cfg.method
    for alpha in cfg.alpha:
        name = f"solve_alpha_{_alpha_tag(alpha)}.csv"
        print(_report(_solve_one(cfg, alpha, method, out, name)))
    return 0


def cmd_example(args, cfg: RunConfig) -> int:
    which = args.which
    cfg = load_config(args.config, _overrides(args), base=load_config(None, EXAMPLES[which]))
    cfg.require("solve")
    out = _outdir(args, cfg)
    for alpha in cfg.alpha:
        s = _solve_one(cfg, alpha, "exact", out, f"example{which}_alpha_{_alpha_tag(alpha)}.csv")
        print(_report(s))
    table_alpha = _TABLE_ALPHA.get(which)
    if table_alpha is not None:
        s = _solve_one(cfg, table_alpha, "both", out, f"example{which}_table.csv")
        print("table: " + _report(s))
    return 0


def cmd_converge(args, cfg: RunConfig) -> int:
    if args.Ns is not None:
        cfg = load_config(None, {"Ns": args.Ns}, base=cfg)
    cfg.require("converge")
    out = _outdir(args, cfg)
    for alpha in cfg.alpha:
        prob = _problem(cfg, alpha)
        ref = exact_solution(prob, np.array([cfg.a, cfg.b]), cfg.quadrature(), on_singular="raise")
        rows = convergence_study(prob, ref, cfg.Ns, cfg.scheme())
        path = os.path.join(out, f"converge_alpha_{_alpha_tag(alpha)}.csv")
        write_csv(path, ["N", "h", "error", "order"],
                  [[r.N for r in rows], [r.h for r in rows], [r.endpoint_error for r in rows],
                   [r.estimated_order for r in rows]])
        orders = ", ".join(fmt(round(r.estimated_order, 3)) for r in rows[1:])
        print(f"alpha={fmt(alpha)}  scheme={cfg.scheme().tag}  orders: {orders}  -> {path}")
    return 0


def cmd_gronwall(args, cfg: RunConfig) -> int:
    cfg.require("gronwall")
    out = _outdir(args, cfg)
    kernel = kernel_from_spec(cfg.kernel)
    for alpha in cfg.alpha:
        data = GronwallData(cfg.c, cfg.d, cfg.k, kernel, alpha, (cfg.a, cfg.b), r=cfg.r)
        grid = Grid(cfg.a, cfg.b, cfg.N)
        fn = {"full": gronwall_bound, "simplified": gronwall_bound_simplified,
              "lower": gronwall_lower_bound}[cfg.bound]
        bound = fn(data, grid, cfg.quadrature())
        r = np.asarray(to_function(cfg.r, alpha)(grid.nodes), dtype=float)
        if cfg.bound == "lower":
            report = verify_bound(-r, -bound, cfg.slack)
            violated = r < bound - cfg.slack
        else:
            report = verify_bound(r, bound, cfg.slack)
            violated = r > bound + cfg.slack
        path = os.path.join(out, f"gronwall_alpha_{_alpha_tag(alpha)}.csv")
        write_csv(path, ["t", "r", "bound", "violated"], [grid.nodes, r, bound, violated])
        if report.ok:
            verdict = f"ok (worst excess {report.worst_violation:.3e})"
        else:
            verdict = f"violated at t={fmt(grid.nodes[report.index])} by {report.worst_violation:.3e}"
        print(f"alpha={fmt(alpha)}  {cfg.bound} bound: {verdict}  -> {path}")
    return 0


def cmd_stability(args, cfg: RunConfig) -> int:
    cfg.require("stability")
    for alpha in cfg.alpha:
        prob = _problem(cfg, alpha, initial=False)
        verdict = classify_stability(prob, cfg.horizon, cfg.samples, check_uniform=cfg.uniform,
                                     cfg=cfg.quadrature())
        print(f"alpha={fmt(alpha)}  {verdict.classification.value}")
        ev = verdict.evidence
        if ev is not None:
            for key, value in vars(ev).items():
                if value is None or value == "":
                    continue
                text = fmt(value) if isinstance(value, float) else str(value)
                print(f"  {key} = {text}")
        if cfg.k is not None:
            # |F(t, x)| <= k(t) |x| with int k / T finite gives delta(epsilon) = epsilon e^-N
            ub = uniform_stability_bound(cfg.k, prob.kernel, alpha, cfg.a, cfg.epsilon, cfg=cfg.quadrature())
            if isinstance(ub, NotApplicable):
                print(f"  uniform bound: not applicable ({ub.reason})")
            else:
                print(f"  uniform bound: N = {fmt(ub.N)}, delta({fmt(cfg.epsilon)}) = {fmt(ub.delta)}")
    return 0


def cmd_operators(args, cfg: RunConfig) -> int:
    spec = args.kernel or cfg.kernel or "conformable"
    kernel = kernel_from_spec(spec)
    alphas = cfg.alpha or (1.0,)
    for alpha in alphas:
        if args.op == "gderiv":
            value = gderiv(args.f, kernel, AlphaOrder(alpha), args.t)
        elif args.op == "classical":
            value = gderiv_via_classical(args.f, kernel, AlphaOrder(alpha), args.t, kernel.t_domain)
        elif args.op == "jintegral":
            value = jintegral(args.f, kernel, alpha, args.lower, args.t, cfg.quadrature())
        else:
            value = adjoint_apply(args.f, kernel, alpha, args.t, args.upper, cfg.quadrature())
        print(f"{fmt(alpha)},{fmt(value)}" if len(alphas) > 1 else fmt(value))
    return 0


def _overrides(args) -> dict:
    over = {}
    for item in getattr(args, "set", None) or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(item, "expected key=value after --set")
        over[key.strip()] = value.strip()
    if getattr(args, "alpha", None) is not None:
        over["alpha"] = args.alpha
    if getattr(args, "method", None) is not None:
        over["method"] = args.method
    if getattr(args, "n_divisions", None) is not None:
        over["N"] = args.n_divisions
    return over


def _common(parser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", metavar="PATH", default=default, help="flat key = value config file")
    parser.add_argument("--out", metavar="DIR", default=default, help="output directory (default: current)")
    parser.add_argument("--alpha", metavar="LIST", default=default, help="order or comma-separated orders")
    parser.add_argument("--method", choices=("exact", "fdm", "both"), default=default)
    parser.add_argument("--n-divisions", dest="n_divisions", metavar="N", default=default,
                        help="grid parameter N (N + 1 subintervals)")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE", default=default,
                        help="override a config key; repeatable")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracbern", description=__doc__.splitlines()[0])
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        _common(p, suppress=True)
        return p

    add("solve", "solve a Bernoulli problem (closed form, finite differences, or both)")
    p = add("example", "reproduce one of the three worked examples")
    p.add_argument("which", choices=sorted(EXAMPLES))
    p = add("converge", "observed convergence orders of the finite-difference solver")
    p.add_argument("--Ns", metavar="LIST", help="ascending grid sizes, e.g. 100,200,400,800")
    add("gronwall", "evaluate a Gronwall envelope and check r against it")
    add("stability", "classify the stability of the trivial solution")
    p = add("operators", "evaluate the derivative or integral operator at a point")
    p.add_argument("op", choices=("gderiv", "classical", "jintegral", "adjoint"))
    p.add_argument("--f", required=True, help="function of t, e.g. 'sin(t)'")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--lower", type=float, default=0.0, help="lower limit a of the integral")
    p.add_argument("--upper", type=float, default=1.0, help="upper limit b of the adjoint")
    p.add_argument("--kernel", help="kernel spec, e.g. conformable or custom:1")
    return parser


_COMMANDS = {
    "solve": cmd_solve,
    "example": cmd_example,
    "converge": cmd_converge,
    "gronwall": cmd_gronwall,
    "stability": cmd_stability,
    "operators": cmd_operators,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(getattr(args, "config", None), _overrides(args))
        return _COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FracError, ArithmeticError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
