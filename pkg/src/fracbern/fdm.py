"""Finite-difference solvers for ``G_T^alpha y + p y = q y^n``, ``y(a) = beta``.

With ``W_i = h / T(t_i, alpha)`` and ``F(t, y) = -p(t) y + q(t) y^n`` the
schemes are

    forward Euler     y_{i+1} = y_i + W_i F(t_i, y_i)
    backward Euler    y_i - y_{i-1} - W_i F(t_i, y_i) = 0
    midpoint          y_{i+1} = y_{i-1} + 2 W_i F(t_i, y_i)
    backward 3-point  3 y_i - 4 y_{i-1} + y_{i-2} - 2 W_i F(t_i, y_i) = 0
    backward 5-point  25 y_i - 48 y_{i-1} + 36 y_{i-2} - 16 y_{i-3} + 3 y_{i-4} - 12 W_i F(t_i, y_i) = 0

of orders 1, 1, 2, 2 and 4. The composite driver starts with a two-point
scheme, continues with a three-point one and runs the five-point scheme
from node 4 on.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from ._sweep_py import dpowr, implicit_terms, powr
from .bernoulli import BernoulliProblem
from .errors import InvalidParams, NonFinite, RootNotFound
from .grid import Grid, Trajectory
from .roots import newton_scalar

__all__ = [
    "Grid", "Scheme", "SchemeConfig", "solve_fdm", "step_euler_forward", "step_euler_backward",
    "step_midpoint3", "step_backward3", "step_backward5", "convergence_study", "ConvergenceRow",
    "backend",
]


class Scheme(enum.Enum):
    ForwardEuler = 1
    BackwardEuler = 2
    Midpoint3 = 3
    Backward3 = 4
    Backward5 = 5

    @property
    def implicit(self) -> bool:
        return self in (Scheme.BackwardEuler, Scheme.Backward3, Scheme.Backward5)

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, name) -> "Scheme":
        if isinstance(name, Scheme):
            return name
        key = str(name).strip().lower().replace("-", "_").replace(" ", "_")
        try:
            return _ALIASES[key]
        except KeyError:
            raise InvalidParams(f"unknown scheme {name!r}") from None


_LABELS = {
    Scheme.ForwardEuler: "forward_euler",
    Scheme.BackwardEuler: "backward_euler",
    Scheme.Midpoint3: "midpoint3",
    Scheme.Backward3: "backward3",
    Scheme.Backward5: "backward5",
}
_ALIASES = {}
for _s, _names in {
    Scheme.ForwardEuler: ("forward_euler", "forwardeuler", "euler", "fe", "o1"),
    Scheme.BackwardEuler: ("backward_euler", "backwardeuler", "be", "o2"),
    Scheme.Midpoint3: ("midpoint3", "midpoint", "m3", "o3"),
    Scheme.Backward3: ("backward3", "b3", "o4"),
    Scheme.Backward5: ("backward5", "b5", "o5"),
}.items():
    for _n in _names:
        _ALIASES[_n] = _s


@dataclass(frozen=True)
class SchemeConfig:
    """Scheme selection for :func:`solve_fdm`.

    Parameters
    ----------
    bootstrap : forward or backward Euler, used for node 1.
    mid : midpoint3, backward3, or ``"bootstrap"`` to keep the bootstrap scheme; nodes 2 and 3.
    main : backward5, or ``"mid"`` to keep the mid scheme; node 4 onwards.
    startup_substeps : int or None
        Nodes 1 to 3 are computed on a local grid with this many substeps per
        step (bootstrap for the first substep, mid scheme afterwards). ``None``
        picks ``N + 1`` when the main scheme is backward5, so that the
        start-up error is far below the fourth-order error of the main phase,
        and 1 otherwise.
    paper_literal_O4 : bool
        Use ``W_i`` instead of ``2 W_i`` in the three-point backward scheme.
    """

    bootstrap: Scheme | str = Scheme.BackwardEuler
    mid: Scheme | str | None = Scheme.Backward3
    main: Scheme | str | None = Scheme.Backward5
    newton_tol: float = 1e-12
    newton_maxit: int = 50
    startup_substeps: int | None = None
    paper_literal_O4: bool = False

    def __post_init__(self):
        boot = Scheme.parse(self.bootstrap)
        if boot not in (Scheme.ForwardEuler, Scheme.BackwardEuler):
            raise InvalidParams(f"bootstrap must be forward or backward Euler, got {boot.label}")
        mid = self.mid
        mid = boot if mid is None or str(mid).lower() == "bootstrap" else Scheme.parse(mid)
        if mid not in (boot, Scheme.Midpoint3, Scheme.Backward3):
            raise InvalidParams(f"mid must be midpoint3, backward3 or the bootstrap scheme, got {mid.label}")
        main = self.main
        main = mid if main is None or str(main).lower() in ("mid", "stay", "stayatmid") else Scheme.parse(main)
        if main not in (mid, Scheme.Backward5):
            raise InvalidParams(f"main must be backward5 or the mid scheme, got {main.label}")
        object.__setattr__(self, "bootstrap", boot)
        object.__setattr__(self, "mid", mid)
        object.__setattr__(self, "main", main)
        if not self.newton_tol > 0:
            raise InvalidParams("newton_tol must be positive")
        if self.newton_maxit < 1:
            raise InvalidParams("newton_maxit must be at least 1")
        if self.startup_substeps is not None and self.startup_substeps < 1:
            raise InvalidParams("startup_substeps must be at least 1")

    @property
    def b3coef(self) -> float:
        return 1.0 if self.paper_literal_O4 else 2.0

    def substeps(self, N: int) -> int:
        if self.startup_substeps is not None:
            return int(self.startup_substeps)
        return N + 1 if self.main is Scheme.Backward5 else 1

    @property
    def tag(self) -> str:
        return "-".join(dict.fromkeys(s.label for s in (self.bootstrap, self.mid, self.main)))


def backend() -> str:
    """``"cython"`` or ``"python"``: which sweep implementation is active."""
    return _backend.BACKEND


def _coefficients(prob: BernoulliProblem, nodes: np.ndarray, h: float):
    with np.errstate(all="ignore"):
        W = h / prob.kernel(nodes, prob.alpha)
    P = np.ascontiguousarray(prob.p_func(nodes), dtype=float)
    Q = np.ascontiguousarray(prob.q_func(nodes), dtype=float)
    return np.ascontiguousarray(W, dtype=float), P, Q


def _fallback_root(prob, cfg, y, i, W, P, Q, code):
    """Solve one implicit node with Newton plus bracketing after the fast sweep gave up."""
    n, parity = prob.exponent.value, prob.exponent.parity
    a0, r, w = implicit_terms(code, y, i, W, cfg.b3coef)
    p, q = float(P[i]), float(Q[i])

    def g(x):
        return a0 * x + r + w * (p * x - q * powr(x, n, parity))

    def gp(x):
        return a0 + w * (p - q * dpowr(x, n, parity))

    try:
        return newton_scalar(g, gp, float(y[i - 1]), cfg.newton_tol, cfg.newton_maxit)
    except RootNotFound as exc:
        note = "y^n has no real value for negative y with this n" if parity == 0 and exc.x < 0 else ""
        raise RootNotFound(exc.x, exc.residual, index=i, note=note) from None


def _run(prob, cfg, y, W, P, Q, code, start, stop, index_map=None):
    """Sweep ``[start, stop)``, handing nodes the fast path cannot solve to the fallback root finder."""
    n, parity = prob.exponent.value, prob.exponent.parity
    i = start
    while i < stop:
        i, status = _backend.sweep(y, W, P, Q, code, n, parity, cfg.b3coef, i, stop,
                                   cfg.newton_tol, cfg.newton_maxit)
        if status == 0:
            break
        where = i if index_map is None else index_map(i)
        if status == 2:
            raise NonFinite(where, float(y[i]))
        try:
            y[i] = _fallback_root(prob, cfg, y, i, W, P, Q, int(code[i]))
        except RootNotFound as exc:
            raise RootNotFound(exc.x, exc.residual, index=where, note=str(exc).partition("; ")[2]) from None
        if not math.isfinite(y[i]):
            raise NonFinite(where, float(y[i]))
        i += 1


def _codes(size: int, cfg: SchemeConfig, phases: bool) -> np.ndarray:
    code = np.empty(size, dtype=np.int8)
    code[0] = 0
    code[1:] = cfg.mid.value
    code[1] = cfg.bootstrap.value
    if phases:
        code[4:] = cfg.main.value
    return code


def solve_fdm(prob: BernoulliProblem, grid: Grid, cfg: SchemeConfig | None = None) -> Trajectory:
    """Integrate ``y(a) = y0`` across the grid with the composite scheme.

    ``meta["scheme"]`` names the scheme behind every node (``"startup"`` for
    nodes 1 to 3 when they come from the refined local grid).
    """
    cfg = cfg or SchemeConfig()
    if prob.initial is None:
        raise InvalidParams("finite-difference solve needs an initial condition y(a) = y0")
    t0, y0 = prob.initial
    if t0 != grid.a:
        raise InvalidParams(f"initial time {t0} must be the grid start {grid.a}")
    nodes = grid.nodes
    W, P, Q = _coefficients(prob, nodes, grid.h)
    y = np.zeros(nodes.size)
    y[0] = y0
    code = _codes(nodes.size, cfg, phases=True)
    labels = np.array(["initial"] + [Scheme(c).label for c in code[1:]], dtype=object)
    m = cfg.substeps(grid.N)
    start = 1
    if m > 1:
        fine = np.linspace(nodes[0], nodes[3], 3 * m + 1)
        Wf, Pf, Qf = _coefficients(prob, fine, (nodes[3] - nodes[0]) / (3 * m))
        yf = np.zeros(fine.size)
        yf[0] = y0
        codef = _codes(fine.size, cfg, phases=False)
        _run(prob, cfg, yf, Wf, Pf, Qf, codef, 1, fine.size, index_map=lambda j: -(j // -m))
        y[1:4] = yf[m::m]
        labels[1:4] = "startup"
        start = 4
    _run(prob, cfg, y, W, P, Q, code, start, nodes.size)
    meta = {"scheme": labels, "startup_substeps": m, "backend": backend()}
    return Trajectory(nodes, y, f"fdm-{cfg.tag}", meta)


# Single steps: each evaluates one node from the values ``y`` computed so far.

def _node(prob, grid, i):
    t = float(grid.nodes[i])
    return grid.h / prob.kernel(t, prob.alpha), float(prob.p_func(t)), float(prob.q_func(t))


def _rhs(prob, p, q, y):
    return -p * y + q * powr(y, prob.exponent.value, prob.exponent.parity)


def _check(value, i):
    if not math.isfinite(value):
        raise NonFinite(i, value)
    return value


def step_euler_forward(prob: BernoulliProblem, grid: Grid, y, i: int) -> float:
    """``y_{i+1}`` from ``y_i``."""
    w, p, q = _node(prob, grid, i)
    return _check(y[i] + w * _rhs(prob, p, q, y[i]), i + 1)


def step_midpoint3(prob: BernoulliProblem, grid: Grid, y, i: int) -> float:
    """``y_{i+1}`` from ``y_{i-1}`` and ``y_i``."""
    w, p, q = _node(prob, grid, i)
    return _check(y[i - 1] + 2.0 * w * _rhs(prob, p, q, y[i]), i + 1)


def _implicit(prob, grid, y, i, cfg, code):
    cfg = cfg or SchemeConfig()
    W = np.zeros(i + 1)
    P = np.zeros(i + 1)
    Q = np.zeros(i + 1)
    W[i], P[i], Q[i] = _node(prob, grid, i)
    return _fallback_root(prob, cfg, y, i, W, P, Q, code)


def step_euler_backward(prob: BernoulliProblem, grid: Grid, y, i: int, solver: SchemeConfig | None = None) -> float:
    """``y_i`` from ``y_{i-1}``."""
    return _implicit(prob, grid, y, i, solver, Scheme.BackwardEuler.value)


def step_backward3(prob: BernoulliProblem, grid: Grid, y, i: int, solver: SchemeConfig | None = None) -> float:
    """``y_i`` from ``y_{i-2}, y_{i-1}``."""
    return _implicit(prob, grid, y, i, solver, Scheme.Backward3.value)


def step_backward5(prob: BernoulliProblem, grid: Grid, y, i: int, solver: SchemeConfig | None = None) -> float:
    """``y_i`` from ``y_{i-4}, ..., y_{i-1}``."""
    return _implicit(prob, grid, y, i, solver, Scheme.Backward5.value)


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    h: float
    endpoint_error: float
    estimated_order: float


def convergence_study(prob: BernoulliProblem, reference, Ns, cfg: SchemeConfig | None = None) -> list[ConvergenceRow]:
    """Endpoint errors of :func:`solve_fdm` for each ``N`` and the observed orders between rows.

    ``reference`` is the exact endpoint value, a callable ``y(t)`` or a
    :class:`Trajectory` ending at ``b``.
    """
    Ns = [int(N) for N in Ns]
    if len(Ns) < 3:
        raise InvalidParams("convergence study needs at least three grid sizes")
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise InvalidParams("grid sizes must be strictly ascending")
    if isinstance(reference, Trajectory):
        if reference.nodes[-1] != prob.b:
            raise InvalidParams("reference trajectory must end at b")
        exact = float(reference.values[-1])
    elif callable(reference):
        exact = float(reference(prob.b))
    else:
        exact = float(reference)
    rows = []
    for N in Ns:
        grid = Grid(prob.a, prob.b, N)
        err = abs(float(solve_fdm(prob, grid, cfg).values[-1]) - exact)
        order = math.nan
        if rows:
            prev = rows[-1]
            with np.errstate(all="ignore"):
                order = float(np.log(prev.endpoint_error / err) / np.log(prev.h / grid.h))
        rows.append(ConvergenceRow(N, grid.h, err, order))
    return rows
