"""The generalized derivative ``G_T^alpha`` and integral ``J_{T,a}^alpha``.

For ``alpha`` in ``(0, 1]`` the derivative reduces to ``T(t, alpha) f'(t)`` and
``J_{T,a}^alpha f (t) = int_a^t f(w) / T(w, alpha) dw`` is its left inverse.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import DomainError, InvalidParams, NegativeIntegrand, NoConvergence
from .expr import Expression, parse
from .kernel import Interval, Kernel
from .quadrature import QuadratureConfig, default_config, integrate, integrate_segments

__all__ = [
    "AlphaOrder", "as_array_function", "gderiv", "gderiv_via_classical",
    "jintegral", "jintegral_cumulative", "adjoint_apply", "improper_jintegral",
    "ImproperIntegral", "PrefixIntegral", "prefix_integral", "central_weights",
    "to_function",
]


@dataclass(frozen=True)
class AlphaOrder:
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidParams(f"order must be positive, got {self.alpha}")

    @property
    def ceil_alpha(self) -> int:
        return max(1, math.ceil(self.alpha))


def _order(order) -> AlphaOrder:
    return order if isinstance(order, AlphaOrder) else AlphaOrder(float(order))


def as_array_function(f) -> Callable[[np.ndarray], np.ndarray]:
    """Wrap a scalar or numpy-aware callable so it maps float arrays to float arrays."""
    if getattr(f, "_fracbern_vectorized", False):
        return f

    def g(x):
        x = np.asarray(x, dtype=float)
        try:
            with np.errstate(all="ignore"):
                out = np.asarray(f(x), dtype=float)
            if out.shape != x.shape:
                out = np.broadcast_to(out, x.shape).astype(float)
            return out
        except (TypeError, ValueError):
            return np.array([float(f(float(v))) for v in x.ravel()]).reshape(x.shape)

    g._fracbern_vectorized = True
    return g


def to_function(f, alpha: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """Coerce an expression, expression text, number or callable to an array function of ``t``.

    Expressions are evaluated with their ``alpha`` bound to ``alpha``.
    """
    if isinstance(f, str):
        f = parse(f)
    if isinstance(f, Expression):
        expr = f

        def g(t):
            return expr(np.asarray(t, dtype=float), alpha)

        g._fracbern_vectorized = True
        return g
    if isinstance(f, (int, float)):
        value = float(f)

        def const(t):
            return np.full(np.shape(t), value)

        const._fracbern_vectorized = True
        return const
    if not callable(f):
        raise InvalidParams(f"cannot use {f!r} as a function of t")
    return as_array_function(f)


def _integrand(f, kernel: Kernel, alpha: float):
    f = to_function(f, alpha)

    def g(w):
        return f(w) / kernel(w, alpha)

    g._fracbern_vectorized = True
    return g


def _scalar_function(f, alpha: float):
    if isinstance(f, (str, Expression, int, float)):
        g = to_function(f, alpha)
        return lambda t: float(g(t))
    return f


def _binomial_quotient(f, m: int, t: float, step: float) -> float:
    total = 0.0
    for k in range(m + 1):
        total += (-1) ** k * math.comb(m, k) * f(t - k * step)
    return total


def gderiv(f, kernel: Kernel, order, t: float, h0: float | None = None,
           max_halvings: int = 20, rtol: float = 1e-8) -> float:
    """Estimate ``G_T^alpha f(t)`` from its defining difference quotient.

    The quotient ``h^-m sum_k (-1)^k C(m,k) f(t - k h T)`` with ``m = ceil(alpha)``
    is evaluated on ``h_j = h0 2^-j`` and accelerated with a Richardson tableau.
    A negative ``h0`` gives the one-sided limit from the right, used at the
    left end of a domain. When ``f`` raises :class:`DomainError` on the initial
    stencil the step is halved before the tableau starts.
    """
    order = _order(order)
    f = _scalar_function(f, order.alpha)
    m = order.ceil_alpha
    T = kernel(t, order.alpha)
    if not (T > 0 and math.isfinite(T)):
        raise DomainError(f"kernel not positive and finite at t={t}")
    # effective stencil spacing h*T starts near 1e-2 (1 + |t|)
    h = (1e-2 * (1.0 + abs(t)) / T) if h0 is None else h0
    sign = 1.0 if h > 0 else -1.0
    h = abs(h)

    def quotient(hh):
        return _binomial_quotient(f, m, t, sign * hh * T) / (sign * hh) ** m

    attempts = 0
    while True:
        try:
            first = quotient(h)
            break
        except DomainError:
            attempts += 1
            if attempts > max_halvings:
                raise
            h *= 0.5
    rows = [[first]]
    for j in range(1, max_halvings + 1):
        h *= 0.5
        row = [quotient(h)]
        for k in range(1, j + 1):
            factor = 2.0 ** k - 1.0
            row.append(row[k - 1] + (row[k - 1] - rows[j - 1][k - 1]) / factor)
        rows.append(row)
        best, prev = row[-1], rows[j - 1][-1]
        if abs(best - prev) < rtol * (1.0 + abs(best)):
            return best
    raise NoConvergence(f"difference quotient did not settle after {max_halvings} halvings")


def central_weights(m: int, offsets) -> np.ndarray:
    """Finite-difference weights for the ``m``-th derivative on integer ``offsets``."""
    offsets = np.asarray(offsets, dtype=float)
    n = offsets.size
    A = np.vander(offsets, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[m] = math.factorial(m)
    return np.linalg.solve(A, rhs)


def _stencil_offsets(m: int, side: int) -> np.ndarray:
    # fourth-order accurate stencils
    if side == 0:
        p = (m - 1) // 2 + 2
        return np.arange(-p, p + 1)
    n = m + 4
    return np.arange(n) if side > 0 else -np.arange(n)[::-1]


def gderiv_via_classical(f, kernel: Kernel, order, t: float, domain: Interval | None = None) -> float:
    """``T(t, alpha)^m D^m f(t)`` with ``D^m`` from a fourth-order finite-difference stencil.

    Step ``max(1e-5, 1e-5 |t|)`` for first derivatives and ``max(1e-3, 1e-3 |t|)``
    for higher ones. If ``domain`` is given and the central stencil leaves it,
    a one-sided stencil pointing into the domain is used.
    """
    order = _order(order)
    f = _scalar_function(f, order.alpha)
    m = order.ceil_alpha
    scale = 1e-5 if m == 1 else 1e-3
    h = max(scale, scale * abs(t))
    side = 0
    offsets = _stencil_offsets(m, 0)
    if domain is not None:
        pts = t + h * offsets
        if not np.all(domain.contains(pts)):
            side = 1 if domain.contains(t + h * _stencil_offsets(m, 1)).all() else -1
            offsets = _stencil_offsets(m, side)
            if not np.all(domain.contains(t + h * offsets)):
                raise DomainError(f"finite-difference stencil at t={t} leaves {domain}")
    weights = central_weights(m, offsets)
    values = [f(t + h * float(k)) for k in offsets]
    deriv = float(np.dot(weights, values)) / h ** m
    return kernel(t, order.alpha) ** m * deriv


def jintegral(f, kernel: Kernel, alpha: float, a: float, t: float,
              cfg: QuadratureConfig | None = None) -> float:
    """``int_a^t f(w) / T(w, alpha) dw``; negative when ``t < a``."""
    value, _ = integrate(_integrand(f, kernel, alpha), a, t, cfg or default_config())
    return value


def _nodes(grid) -> np.ndarray:
    return np.asarray(getattr(grid, "nodes", grid), dtype=float)


def jintegral_cumulative(f, kernel: Kernel, alpha: float, a: float, grid,
                         cfg: QuadratureConfig | None = None, with_errors: bool = False):
    """``J_{T,a}^alpha f`` at every node of an ascending grid starting at ``a``."""
    nodes = _nodes(grid)
    if nodes.ndim != 1 or nodes.size == 0:
        raise InvalidParams("grid must be a non-empty 1-d array")
    if nodes[0] != a:
        raise InvalidParams(f"grid must start at the base point {a}")
    if np.any(np.diff(nodes) <= 0):
        raise InvalidParams("grid must be strictly ascending")
    pieces, errs = integrate_segments(_integrand(f, kernel, alpha), nodes, cfg or default_config())
    values = np.concatenate([[0.0], np.cumsum(pieces)])
    if with_errors:
        return values, np.concatenate([[0.0], np.cumsum(errs)])
    return values


def adjoint_apply(f, kernel: Kernel, alpha: float, t: float, b: float,
                  cfg: QuadratureConfig | None = None) -> float:
    """The ``L^2[a, b]`` adjoint of ``J``: ``(1 / T(t, alpha)) int_t^b f(s) ds``."""
    if t > b:
        raise InvalidParams("adjoint needs t <= b")
    if t == b:
        return 0.0
    value, _ = integrate(to_function(f, alpha), t, b, cfg or default_config())
    return value / kernel(t, alpha)


@dataclass(frozen=True)
class ImproperIntegral:
    """Outcome of integrating over ``[a, inf)``: status is converged, divergent or undetermined."""

    status: str
    value: float
    horizon: float

    @property
    def converged(self) -> bool:
        return self.status == "converged"


DIVERGENCE_LIMIT = 1e12


def improper_jintegral(k, kernel: Kernel, alpha: float, a: float, tail_tol: float = 1e-10,
                       horizon_cap: float = 1e15, cfg: QuadratureConfig | None = None) -> ImproperIntegral:
    """Evaluate ``int_a^inf k / T`` over doubling horizons ``a + 1, a + 2, a + 4, ...``."""
    kf = to_function(k, alpha)
    probe = a + np.concatenate([np.linspace(0.0, 10.0, 101), np.geomspace(10.0, min(horizon_cap, 1e9), 100)])
    ks = kf(probe)
    if np.any(ks < 0):
        j = int(np.argmax(ks < 0))
        raise NegativeIntegrand("k", float(probe[j]), float(ks[j]))
    g = _integrand(kf, kernel, alpha)
    cfg = cfg or default_config()
    total = 0.0
    lo, length = a, 1.0
    while True:
        hi = a + length
        if hi > horizon_cap:
            return ImproperIntegral("undetermined", total, lo)
        increment, _ = integrate(g, lo, hi, cfg)
        total += increment
        if abs(total) > DIVERGENCE_LIMIT:
            return ImproperIntegral("divergent", total, hi)
        if abs(increment) < tail_tol:
            return ImproperIntegral("converged", total, hi)
        lo, length = hi, 2.0 * length


class PrefixIntegral:
    """Cumulative ``J_{T,a}^alpha f`` on a node set, interpolated by cubic Hermite pieces.

    The slopes are the exact derivative ``f / T`` at the nodes, so the
    interpolant is fourth-order accurate between nodes. Where the slope is not
    finite (e.g. a kernel vanishing at an endpoint) the secant slope is used.
    """

    def __init__(self, nodes: np.ndarray, values: np.ndarray, slopes: np.ndarray, errors: np.ndarray):
        self.nodes = nodes
        self.values = values
        self.errors = errors
        slopes = np.array(slopes, dtype=float)
        bad = ~np.isfinite(slopes)
        if np.any(bad):
            secant = np.gradient(values, nodes) if nodes.size > 1 else np.zeros_like(values)
            slopes[bad] = secant[bad]
        self.slopes = slopes
        self._spline = CubicHermiteSpline(nodes, values, slopes) if nodes.size > 1 else None

    def __call__(self, x):
        if self._spline is None:
            return np.full(np.shape(x), self.values[0])
        return self._spline(x)


def refine_nodes(points: np.ndarray, factor: int) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if factor <= 1 or points.size < 2:
        return points
    frac = np.arange(factor) / factor
    inner = points[:-1, None] + np.diff(points)[:, None] * frac[None, :]
    return np.concatenate([inner.ravel(), points[-1:]])


def prefix_integral(f, kernel: Kernel, alpha: float, a: float, nodes, refine: int = 1,
                    cfg: QuadratureConfig | None = None) -> tuple[np.ndarray, PrefixIntegral]:
    """``J_{T,a}^alpha f`` at ``nodes`` (any order relative to ``a``) plus a Hermite interpolant.

    The base point ``a`` is merged into the node set; each gap is split into
    ``refine`` equal pieces before integrating.
    """
    nodes = np.asarray(nodes, dtype=float)
    points = np.unique(np.concatenate([nodes.ravel(), [a]]))
    fine = refine_nodes(points, refine)
    g = _integrand(f, kernel, alpha)
    if fine.size > 1:
        pieces, errs = integrate_segments(g, fine, cfg or default_config())
    else:
        pieces, errs = np.zeros(0), np.zeros(0)
    cum = np.concatenate([[0.0], np.cumsum(pieces)])
    cum_err = np.concatenate([[0.0], np.cumsum(errs)])
    ia = int(np.searchsorted(fine, a))
    values = cum - cum[ia]
    errors = np.abs(cum_err - cum_err[ia])
    interp = PrefixIntegral(fine, values, g(fine), errors)
    idx = np.searchsorted(fine, nodes)
    return values[idx], interp
