"""Vectorized adaptive Gauss-Kronrod (7/15) quadrature.

All segments of a subdivision are evaluated in one integrand call, so an
integrand written with numpy runs at array speed. Nodes are interior to each
segment, which lets integrable endpoint singularities through.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, ToleranceNotMet

__all__ = ["QuadratureConfig", "default_config", "integrate", "integrate_segments"]

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# 15 abscissae on [-1, 1] and the matching Kronrod / Gauss weights.
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS = np.zeros(15)
GAUSS[1:7:2] = _WG[:3]
GAUSS[7] = _WG[3]
GAUSS[9:14:2] = _WG[2::-1]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_depth: int = 50
    # cap on active subintervals beyond four per input segment; bounds memory
    max_segments: int = 200_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise InvalidParams("quadrature tolerances must be positive")
        if self.max_depth < 1:
            raise InvalidParams("max_depth must be at least 1")
        if self.max_segments < 1:
            raise InvalidParams("max_segments must be at least 1")


def default_config() -> QuadratureConfig:
    """Defaults, with ``FRACBERN_TOL`` overriding both tolerances when set."""
    tol = os.environ.get("FRACBERN_TOL")
    if tol:
        value = float(tol)
        return QuadratureConfig(abs_tol=value, rel_tol=value)
    return QuadratureConfig()


def _rule(f, lo, hi):
    """Kronrod estimate and error estimate on each segment ``[lo[i], hi[i]]``."""
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = center[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float)
    fx = np.broadcast_to(fx, (x.size,)).reshape(x.shape)
    kron = fx @ KRONROD
    gauss = fx @ GAUSS
    mean = 0.5 * kron
    resasc = np.abs(fx - mean[:, None]) @ KRONROD
    resabs = np.abs(fx) @ KRONROD
    err = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(resasc > 0, np.minimum(1.0, (200.0 * err / resasc) ** 1.5), 1.0)
    err = np.where(resasc > 0, resasc * scale, err)
    err = np.maximum(err, 50 * _EPS * resabs)
    return kron * half, err * np.abs(half)


def _endpoint_split(f, lo: float, hi: float, left: bool, pieces: int = 400):
    """Integral and error over a segment with an integrable singularity at one end.

    The segment is cut into dyadic pieces shrinking toward the singular end;
    each piece is smooth on its own scale. What is left below the smallest
    piece is extrapolated as a geometric tail, which is exact for algebraic
    singularities ``|x - end|^(-beta)``.
    """
    end = lo if left else hi
    width = hi - lo
    k = np.arange(pieces + 1, dtype=float)
    offsets = width * np.exp2(-k)
    offsets = offsets[offsets > 2.0**16 * _EPS * max(abs(end), np.finfo(float).tiny)]
    if offsets.size < 4:
        return None
    if left:
        a, b = end + offsets[1:], end + offsets[:-1]
    else:
        a, b = end - offsets[:-1], end - offsets[1:]
    vals, errs = _rule(f, a, b)
    if not np.all(np.isfinite(vals)):
        return None
    p1, p2, p3 = vals[-3], vals[-2], vals[-1]
    tail, tail_err = 0.0, abs(p3)
    if p2 != 0 and p1 != 0:
        r_new, r_old = p3 / p2, p2 / p1
        if 0 <= r_new < 1 and 0 <= r_old < 1:
            tail = p3 * r_new / (1 - r_new)
            tail_err = abs(tail - p3 * r_old / (1 - r_old)) + 50 * _EPS * abs(tail)
    return float(vals.sum() + tail), float(errs.sum() + tail_err)


def integrate_segments(f, edges, cfg: QuadratureConfig | None = None):
    """Integrate ``f`` over each ``[edges[i], edges[i+1]]`` adaptively.

    Returns ``(values, errors)`` with one entry per segment. The sum of the
    error estimates over all segments is driven below
    ``max(abs_tol, rel_tol * |total|)``; this bounds the error of every
    prefix sum as well. Segments that reach ``max_depth`` at an outer end of
    their segment get a dyadic endpoint treatment; if the budget still is
    not met, or the subdivision would grow past ``max_segments``,
    :class:`ToleranceNotMet` is raised.
    """
    cfg = cfg or default_config()
    edges = np.asarray(edges, dtype=float)
    nroot = edges.size - 1
    if nroot < 1:
        return np.zeros(0), np.zeros(0)
    span = max(abs(edges[-1] - edges[0]), np.finfo(float).tiny)
    lo = edges[:-1].copy()
    hi = edges[1:].copy()
    root = np.arange(nroot)
    depth = np.zeros(nroot, dtype=int)
    val, err = _rule(f, lo, hi)
    done_val = np.zeros(nroot)
    done_err = np.zeros(nroot)
    final = cfg.max_depth + 1
    cap = cfg.max_segments + 4 * nroot
    while True:
        # Segments out of depth or resolution, or hitting a non-finite value, get one
        # endpoint treatment and are frozen afterwards.
        small = np.abs(hi - lo) < 2.0**26 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
        stuck = np.flatnonzero((depth < final) & ((depth >= cfg.max_depth) | small | ~np.isfinite(val)))
        for j in stuck:
            left = lo[j] == edges[root[j]]
            right = hi[j] == edges[root[j] + 1]
            if left or right:
                fixed = _endpoint_split(f, lo[j], hi[j], bool(left))
                if fixed is not None and (fixed[1] < err[j] or not np.isfinite(val[j] + err[j])):
                    val[j], err[j] = fixed
        depth[stuck] = final
        total = done_val.sum() + val.sum()
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        total_err = done_err.sum() + err.sum()
        if total_err <= tol or not np.isfinite(total_err):
            break
        splittable = depth < cfg.max_depth
        frozen_err = done_err.sum() + err[~splittable].sum()
        if not np.any(splittable) or frozen_err > tol:
            break
        # Split the largest errors until what is left over fits in half the budget.
        order = np.argsort(-np.where(splittable, err, -1.0))
        remaining = total_err - np.cumsum(err[order])
        k = int(np.searchsorted(-remaining, -0.5 * tol)) + 1
        k = min(k, int(np.count_nonzero(splittable)))
        if lo.size + k > cap:
            break
        pick = np.zeros(lo.size, dtype=bool)
        pick[order[:k]] = True
        keep = ~pick
        # Segments well inside their share of the budget are retired to keep the active set small.
        share = tol * np.abs(hi - lo) / span
        retire = keep & (err <= 1e-3 * share)
        np.add.at(done_val, root[retire], val[retire])
        np.add.at(done_err, root[retire], err[retire])
        keep &= ~retire
        nkeep = int(keep.sum())
        mid = 0.5 * (lo[pick] + hi[pick])
        lo = np.concatenate([lo[keep], lo[pick], mid])
        hi = np.concatenate([hi[keep], mid, hi[pick]])
        root = np.concatenate([root[keep], root[pick], root[pick]])
        depth = np.concatenate([depth[keep], depth[pick] + 1, depth[pick] + 1])
        v_split, e_split = _rule(f, lo[nkeep:], hi[nkeep:])
        val = np.concatenate([val[keep], v_split])
        err = np.concatenate([err[keep], e_split])
    values = done_val.copy()
    errors = done_err.copy()
    np.add.at(values, root, val)
    np.add.at(errors, root, err)
    total = values.sum()
    tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
    if not np.all(np.isfinite(values)) or errors.sum() > tol:
        raise ToleranceNotMet(values, float(errors.sum()), tol)
    return values, errors


def integrate(f, a: float, b: float, cfg: QuadratureConfig | None = None) -> tuple[float, float]:
    """``(value, error)`` of the integral of ``f`` from ``a`` to ``b`` (signed)."""
    if a == b:
        return 0.0, 0.0
    if b < a:
        value, error = integrate(f, b, a, cfg)
        return -value, error
    try:
        values, errors = integrate_segments(f, [a, b], cfg)
    except ToleranceNotMet as exc:
        raise ToleranceNotMet(float(np.sum(exc.estimate)), exc.error, exc.tolerance) from None
    return float(values[0]), float(errors[0])
