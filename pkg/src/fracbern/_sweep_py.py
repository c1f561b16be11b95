"""Pure-Python grid sweep; the compiled ``_sweep`` module mirrors it operation for operation.

Scheme codes per node: 1 forward Euler, 2 backward Euler, 3 explicit
midpoint, 4 three-point backward, 5 five-point backward. The sweep fills
``y[start:stop]`` and returns ``(index, status)``: ``status`` is 0 when all
nodes were filled, 1 when Newton failed at ``index`` and 2 when an explicit
step produced a non-finite value at ``index``.
"""
from __future__ import annotations

import math

_EPS = 2.0**-52


def powr(y: float, n: float, parity: int) -> float:
    """Real-branch ``y^n``; NaN when a negative base has no real power."""
    if n == 0.0:
        return 1.0
    if y > 0.0:
        try:
            return math.pow(y, n)
        except OverflowError:
            return math.inf
    if y == 0.0:
        if n > 0.0:
            return 0.0
        return math.inf
    if parity == 0:
        return math.nan
    try:
        r = math.pow(-y, n)
    except OverflowError:
        r = math.inf
    return r if parity > 0 else -r


def dpowr(y: float, n: float, parity: int) -> float:
    """Derivative ``n y^(n-1)`` on the same branch."""
    if n == 0.0:
        return 0.0
    return n * powr(y, n - 1.0, -parity)


def implicit_terms(code: int, y, i: int, W, b3coef: float):
    """``(a0, r, w)`` of the root equation ``a0 x + r + w (P x - Q x^n) = 0`` at node ``i``."""
    if code == 2:
        return 1.0, -y[i - 1], W[i]
    if code == 4:
        return 3.0, -4.0 * y[i - 1] + y[i - 2], b3coef * W[i]
    return 25.0, -48.0 * y[i - 1] + 36.0 * y[i - 2] - 16.0 * y[i - 3] + 3.0 * y[i - 4], 12.0 * W[i]


def sweep(y, W, P, Q, code, n: float, parity: int, b3coef: float, start: int, stop: int,
          tol: float, maxit: int):
    # plain floats are much faster than numpy scalars in this loop
    ys = [float(v) for v in y]
    try:
        return _sweep(ys, [float(v) for v in W], [float(v) for v in P], [float(v) for v in Q],
                      [int(c) for c in code], float(n), int(parity), float(b3coef),
                      start, stop, tol, maxit)
    finally:
        y[start:stop] = ys[start:stop]


def _sweep(y, W, P, Q, code, n, parity, b3coef, start, stop, tol, maxit):
    for i in range(start, stop):
        c = code[i]
        if c == 1 or c == 3:
            j = i - 1
            yj = y[j]
            f = -P[j] * yj + Q[j] * powr(yj, n, parity)
            if c == 1:
                v = yj + W[j] * f
            else:
                v = y[i - 2] + 2.0 * W[j] * f
            y[i] = v
            if not math.isfinite(v):
                return i, 2
            continue
        a0, r, w = implicit_terms(c, y, i, W, b3coef)
        p = P[i]
        q = Q[i]
        x = y[i - 1]
        done = False
        for _ in range(maxit):
            g = a0 * x + r + w * (p * x - q * powr(x, n, parity))
            if math.fabs(g) <= tol:
                done = True
                break
            gp = a0 + w * (p - q * dpowr(x, n, parity))
            if gp == 0.0 or not math.isfinite(gp) or not math.isfinite(g):
                break
            dx = g / gp
            x = x - dx
            if math.fabs(dx) <= 2.0 * _EPS * math.fabs(x):
                done = True
                break
        if not done:
            return i, 1
        y[i] = x
    return stop, 0
