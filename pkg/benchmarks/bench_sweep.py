"""Time the compiled and the pure-Python FDM sweep on the same problem.

    python3 benchmarks/bench_sweep.py --sizes 5000,50000,200000 --repeat 3

Both sweeps are fed identical coefficient arrays; the script also checks
that they return bit-identical trajectories.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from fracbern import BernoulliProblem, Grid, SchemeConfig, builtin_kernel
from fracbern import _sweep_py
from fracbern.fdm import _codes, _coefficients

try:
    from fracbern import _sweep as _compiled
except ImportError:
    _compiled = None


def setup(N: int, alpha: float):
    prob = BernoulliProblem("1", "1", 2, alpha, builtin_kernel("conformable"), (0.5, 2.0), initial=(0.5, -1.0))
    grid = Grid(0.5, 2.0, N)
    W, P, Q = _coefficients(prob, grid.nodes, grid.h)
    code = _codes(grid.nodes.size, SchemeConfig(), phases=True)
    return prob, W, P, Q, code


def run(sweep, prob, W, P, Q, code):
    y = np.zeros(W.size)
    y[0] = -1.0
    # a fixed start-up so both sweeps start from the same state
    y[1:4] = [-0.9998, -0.9996, -0.9994]
    n, parity = prob.exponent.value, prob.exponent.parity
    start = time.perf_counter()
    sweep(y, W, P, Q, code, n, parity, 2.0, 4, W.size, 1e-12, 50)
    return time.perf_counter() - start, y


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="5000,50000,200000", help="comma-separated N values")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--alpha", type=float, default=0.5)
    args = ap.parse_args()

    if _compiled is None:
        print("compiled sweep not available; timing the pure-Python sweep only")
    print(f"{'N':>8}  {'python [s]':>11}  {'cython [s]':>11}  {'speedup':>8}  identical")
    for N in (int(s) for s in args.sizes.split(",")):
        prob, W, P, Q, code = setup(N, args.alpha)
        t_py, y_py = min((run(_sweep_py.sweep, prob, W, P, Q, code) for _ in range(args.repeat)),
                         key=lambda r: r[0])
        if _compiled is None:
            print(f"{N:>8}  {t_py:>11.4f}  {'-':>11}  {'-':>8}  -")
            continue
        t_cy, y_cy = min((run(_compiled.sweep, prob, W, P, Q, code) for _ in range(args.repeat)),
                         key=lambda r: r[0])
        same = np.array_equal(y_py, y_cy)
        print(f"{N:>8}  {t_py:>11.4f}  {t_cy:>11.5f}  {t_py / t_cy:>8.1f}  {same}")


if __name__ == "__main__":
    main()
