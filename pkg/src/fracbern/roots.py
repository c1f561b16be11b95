"""Scalar root finding: Newton's method with a bracketing fallback."""
from __future__ import annotations

import math

from .errors import DomainError, RootNotFound

__all__ = ["newton_scalar"]

_EPS = 2.0**-52
# Newton is abandoned when the derivative is smaller than this.
_FLAT = 1e-14


def _safe(g, x):
    try:
        v = g(x)
    except DomainError:
        return math.nan
    return v


def newton_scalar(g, g_prime, x0: float, tol: float = 1e-12, maxit: int = 50) -> float:
    """Solve ``g(x) = 0`` starting from ``x0``.

    Newton steps are damped by halving while they fail to decrease ``|g|``.
    The iteration also stops when a step is below two ulps of ``x``, since
    the residual is then at rounding level. If the derivative is flat or
    non-finite, or Newton stalls, a bracket around the best iterate is widened
    geometrically until ``g`` changes sign and then bisected.

    Raises
    ------
    RootNotFound
        With the last iterate and its residual when no bracket is found.
    """
    x = float(x0)
    gx = _safe(g, x)
    if not math.isfinite(gx):
        raise RootNotFound(x, gx, note="residual not finite at the initial guess")
    for _ in range(maxit):
        if abs(gx) <= tol:
            return x
        d = g_prime(x)
        if not math.isfinite(d) or abs(d) < _FLAT:
            break
        step = gx / d
        for _ in range(30):
            xn = x - step
            gn = _safe(g, xn)
            if math.isfinite(gn) and abs(gn) < abs(gx):
                break
            step *= 0.5
        else:
            break
        x, gx = xn, gn
        if abs(step) <= 2 * _EPS * abs(x):
            return x
    if abs(gx) <= tol:
        return x
    return _bracket_and_bisect(g, x, gx, tol)


def _bracket_and_bisect(g, x: float, gx: float, tol: float, expansions: int = 60) -> float:
    width = max(1.0, abs(x))
    lo = hi = None
    for _ in range(expansions):
        for cand in (x - width, x + width):
            gc = _safe(g, cand)
            if not math.isfinite(gc):
                continue
            if abs(gc) <= tol:
                return cand
            if (gc < 0) != (gx < 0):
                lo, hi = (cand, x) if cand < x else (x, cand)
                break
        if lo is not None:
            break
        width *= 2.0
    if lo is None:
        raise RootNotFound(x, gx, note="no sign change found around the last iterate")
    glo = _safe(g, lo)
    while True:
        mid = 0.5 * (lo + hi)
        gm = _safe(g, mid)
        if not math.isfinite(gm):
            raise RootNotFound(mid, gm, note="residual not finite inside the bracket")
        if abs(gm) <= tol or hi - lo <= 2 * _EPS * max(abs(mid), _EPS):
            return mid
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
