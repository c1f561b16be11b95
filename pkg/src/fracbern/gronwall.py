"""Gronwall-type envelopes for the generalized integral.

If ``r(t) <= c(t) + d(t) J(k r)(t)`` on ``[a, b]`` with ``d, k >= 0``, then

    r(t) <= c(t) + d(t) J(c k e^{-J(dk)})(t) e^{J(dk)(t)}

and the reversed hypothesis gives the reversed inequality. For ``c >= 0``
the cheaper envelope ``c + d J(ck) e^{J(dk)}`` is larger still.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import LengthMismatch, NegativeC, NegativeIntegrand
from .grid import node_array
from .kernel import Kernel
from .operators import prefix_integral, refine_nodes, to_function
from .quadrature import QuadratureConfig, default_config, integrate_segments

__all__ = [
    "GronwallData", "BoundReport", "gronwall_bound", "gronwall_lower_bound",
    "gronwall_bound_simplified", "verify_bound",
]

# Each grid gap is split this many times for the nested integrals.
REFINE = 8
_SAMPLES = 1000


@dataclass(frozen=True)
class GronwallData:
    """Coefficients of the integral inequality on ``[a, b]``; ``r`` is optional and only used for reporting."""

    c: Any
    d: Any
    k: Any
    kernel: Kernel
    alpha: float
    interval: tuple[float, float]
    r: Any = None

    def functions(self):
        return tuple(to_function(f, self.alpha) for f in (self.c, self.d, self.k))

    def check(self, need_c: bool = False) -> None:
        """Sample ``d``, ``k`` (and ``c`` when asked) for negativity on ``[a, b]``."""
        a, b = self.interval
        ts = np.linspace(a, b, _SAMPLES)
        c, d, k = self.functions()
        named = [("d", d, NegativeIntegrand), ("k", k, NegativeIntegrand)]
        if need_c:
            named.append(("c", c, NegativeC))
        for name, f, exc in named:
            values = f(ts)
            bad = values < 0
            if np.any(bad):
                j = int(np.argmax(bad))
                raise exc(name, float(ts[j]), float(values[j]))


def _fine(data: GronwallData, grid):
    nodes = node_array(grid)
    a = data.interval[0]
    points = np.unique(np.concatenate([nodes, [a]]))
    fine = refine_nodes(points, REFINE)
    return nodes, fine, np.searchsorted(fine, nodes), int(np.searchsorted(fine, a))


def _cumulative(g, fine, ia, cfg):
    pieces, _ = integrate_segments(g, fine, cfg)
    cum = np.concatenate([[0.0], np.cumsum(pieces)])
    return cum - cum[ia]


def gronwall_bound(data: GronwallData, grid, cfg: QuadratureConfig | None = None) -> np.ndarray:
    """``B(t_i) = c + d J(c k e^{-J(dk)}) e^{J(dk)}`` at every grid node.

    ``J(dk)`` is tabulated on the grid refined eightfold and interpolated by
    cubic Hermite pieces inside the outer integral.
    """
    cfg = cfg or default_config()
    data.check()
    c, d, k = data.functions()
    T, alpha, a = data.kernel, data.alpha, data.interval[0]
    nodes, fine, idx, ia = _fine(data, grid)
    jdk_nodes, jdk = prefix_integral(lambda w: d(w) * k(w), T, alpha, a, fine, cfg=cfg)

    def outer(w):
        return c(w) * k(w) * np.exp(-jdk(w)) / T(w, alpha)

    inner = _cumulative(outer, fine, ia, cfg)[idx]
    return c(nodes) + d(nodes) * inner * np.exp(jdk_nodes[idx])


def gronwall_lower_bound(data: GronwallData, grid, cfg: QuadratureConfig | None = None) -> np.ndarray:
    """The same envelope as :func:`gronwall_bound`, valid from below when the hypothesis is reversed."""
    return gronwall_bound(data, grid, cfg)


def gronwall_bound_simplified(data: GronwallData, grid, cfg: QuadratureConfig | None = None) -> np.ndarray:
    """``c + d J(ck) e^{J(dk)}``; requires ``c >= 0`` (raises :class:`NegativeC`)."""
    cfg = cfg or default_config()
    data.check(need_c=True)
    c, d, k = data.functions()
    T, alpha, a = data.kernel, data.alpha, data.interval[0]
    nodes, fine, idx, ia = _fine(data, grid)
    jdk, _ = prefix_integral(lambda w: d(w) * k(w), T, alpha, a, fine, cfg=cfg)
    jck, _ = prefix_integral(lambda w: c(w) * k(w), T, alpha, a, fine, cfg=cfg)
    return c(nodes) + d(nodes) * jck[idx] * np.exp(jdk[idx])


@dataclass(frozen=True)
class BoundReport:
    ok: bool
    worst_violation: float
    index: int


def verify_bound(values, bound, slack: float = 1e-6) -> BoundReport:
    """``ok`` iff ``values[i] <= bound[i] + slack`` everywhere; ``worst_violation`` is ``max(values - bound)``."""
    values = np.asarray(values, dtype=float)
    bound = np.asarray(bound, dtype=float)
    if values.shape != bound.shape:
        raise LengthMismatch(f"{values.size} values against {bound.size} bound entries")
    if values.size == 0:
        return BoundReport(True, -np.inf, -1)
    excess = values - bound
    i = int(np.argmax(excess))
    return BoundReport(bool(np.all(excess <= slack)), float(excess[i]), i)
