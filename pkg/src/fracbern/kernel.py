"""Kernels ``T(t, alpha)`` parameterizing the generalized derivative.

Builtin families::

    conformable      t^(1-alpha)
    general          k(t)^(1-alpha)
    nonconformable   exp(t^(-alpha))
    beta             (t + 1/Gamma(alpha))^(1-alpha)
    expshift         exp(t - alpha)
    expscaled        exp((1-alpha) t)

plus ``custom`` kernels built from any expression. Kernels are sampled for
positivity when they are built.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .errors import InvalidParams, PositivityViolation
from .expr import Expression, parse

__all__ = [
    "Interval", "KernelFamily", "Kernel", "builtin_kernel", "kernel_from_expr",
    "kernel_from_spec", "check_positive", "continuity_probe",
]

# Window used to sample unbounded domains.
_SAMPLE_SPAN = 100.0
# Distance kept from an open endpoint when sampling.
_OPEN_MARGIN = 1e-2


@dataclass(frozen=True)
class Interval:
    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise InvalidParams(f"empty interval ({self.lo}, {self.hi})")

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        left = (x >= self.lo) if self.lo_closed else (x > self.lo)
        right = (x <= self.hi) if self.hi_closed else (x < self.hi)
        return left & right

    def window(self) -> tuple[float, float]:
        """Finite sub-interval used when sampling."""
        lo, hi = self.lo, self.hi
        if math.isinf(lo):
            lo = (min(hi, 0.0) if math.isfinite(hi) else 0.0) - _SAMPLE_SPAN
        elif not self.lo_closed:
            lo = lo + min(_OPEN_MARGIN, (hi - lo) / 4 if math.isfinite(hi) else _OPEN_MARGIN)
        if math.isinf(hi):
            hi = max(lo, 0.0) + _SAMPLE_SPAN
        elif not self.hi_closed:
            hi = hi - min(_OPEN_MARGIN, (hi - lo) / 4)
        return lo, hi

    def sample(self, n: int) -> np.ndarray:
        lo, hi = self.window()
        return np.linspace(lo, hi, n)

    def __str__(self):
        return f"{'[' if self.lo_closed else '('}{self.lo}, {self.hi}{']' if self.hi_closed else ')'}"


POSITIVE_REALS = Interval(0.0, math.inf)
NONNEGATIVE_REALS = Interval(0.0, math.inf, lo_closed=True)
REALS = Interval()
UNIT_ORDER = Interval(0.0, 1.0, hi_closed=True)


class KernelFamily(enum.Enum):
    Conformable = "conformable"
    GeneralConformable = "general"
    NonConformable = "nonconformable"
    Beta = "beta"
    ExpShift = "expshift"
    ExpScaled = "expscaled"
    Custom = "custom"


@dataclass(frozen=True)
class Kernel:
    name: str
    family: KernelFamily
    evaluator: Callable = field(repr=False)
    t_domain: Interval = REALS
    alpha_domain: Interval = UNIT_ORDER
    expr: Expression | None = None

    def __call__(self, t, alpha):
        with np.errstate(all="ignore"):
            out = self.evaluator(np.asarray(t, dtype=float), float(alpha))
        if np.ndim(out) == 0 and np.ndim(t) == 0:
            return float(out)
        return np.broadcast_to(out, np.shape(t)).astype(float)


def _conformable(t, a):
    return np.power(t, 1.0 - a)


def _nonconformable(t, a):
    return np.exp(np.power(t, -a))


def _beta(t, a):
    return np.power(t + 1.0 / special.gamma(a), 1.0 - a)


def _expshift(t, a):
    return np.exp(t - a)


def _expscaled(t, a):
    return np.exp((1.0 - a) * t)


_BUILTINS = {
    KernelFamily.Conformable: (_conformable, POSITIVE_REALS),
    KernelFamily.NonConformable: (_nonconformable, POSITIVE_REALS),
    KernelFamily.Beta: (_beta, NONNEGATIVE_REALS),
    KernelFamily.ExpShift: (_expshift, REALS),
    KernelFamily.ExpScaled: (_expscaled, REALS),
}


def check_positive(kernel: Kernel, n: int = 1000) -> None:
    """Raise :class:`PositivityViolation` unless ``kernel`` is finite and positive on a sample grid."""
    nt = max(2, int(round(math.sqrt(n) * 1.6)))
    na = max(2, n // nt)
    ts = kernel.t_domain.sample(nt)
    alphas = kernel.alpha_domain.sample(na)
    for a in alphas:
        values = kernel(ts, a)
        bad = ~(values > 0)
        if np.any(bad):
            j = int(np.argmax(bad))
            raise PositivityViolation(float(ts[j]), float(a), float(values[j]))


def continuity_probe(kernel: Kernel, points: int = 100, delta: float = 1e-6, seed: int = 0) -> float:
    """Maximum of ``|T(t+delta) - T(t)| / (1 + |T(t)|)`` over random sample points.

    Continuous kernels give values of order ``delta``.
    """
    rng = np.random.default_rng(seed)
    lo, hi = kernel.t_domain.window()
    alo, ahi = kernel.alpha_domain.window()
    ts = rng.uniform(lo, hi - delta, points)
    alphas = rng.uniform(alo, ahi, points)
    worst = 0.0
    for t, a in zip(ts, alphas):
        base = kernel(t, a)
        worst = max(worst, abs(kernel(t + delta, a) - base) / (1.0 + abs(base)))
    return worst


def builtin_kernel(name: str | KernelFamily, k: Expression | str | None = None,
                   t_domain: Interval | None = None, validate: bool = True) -> Kernel:
    family = KernelFamily(name) if not isinstance(name, KernelFamily) else name
    if family is KernelFamily.Custom:
        if k is None:
            raise InvalidParams("custom kernel needs an expression")
        return kernel_from_expr(k, t_domain or REALS)
    if family is KernelFamily.GeneralConformable:
        if k is None:
            raise InvalidParams("general conformable kernel requires k(t)")
        k = parse(k) if isinstance(k, str) else k
        root = k

        def general(t, a):
            return np.power(root(t, a), 1.0 - a)

        kernel = Kernel(f"general:{k.source}", family, general, t_domain or POSITIVE_REALS, expr=k)
    else:
        func, domain = _BUILTINS[family]
        kernel = Kernel(family.value, family, func, t_domain or domain)
    if validate:
        if family is KernelFamily.GeneralConformable:
            # positivity of k itself, so k^(1-alpha) is a real power
            ks = k(kernel.t_domain.sample(1000), 1.0)
            bad = ~(ks > 0)
            if np.any(bad):
                j = int(np.argmax(bad))
                raise PositivityViolation(float(kernel.t_domain.sample(1000)[j]), 1.0, float(ks[j]))
        check_positive(kernel)
    return kernel


def kernel_from_expr(expr: Expression | str, t_domain: Interval = REALS,
                     alpha_domain: Interval = UNIT_ORDER, validate: bool = True) -> Kernel:
    expr = parse(expr) if isinstance(expr, str) else expr
    kernel = Kernel(f"custom:{expr.source}", KernelFamily.Custom, expr, t_domain, alpha_domain, expr)
    if validate:
        check_positive(kernel)
    return kernel


def kernel_from_spec(spec: str) -> Kernel:
    """Build a kernel from the config syntax ``conformable``, ``general:<expr>``, ``custom:<expr>``, ..."""
    spec = spec.strip()
    name, _, rest = spec.partition(":")
    name = name.strip().lower()
    try:
        family = KernelFamily(name)
    except ValueError:
        raise InvalidParams(f"unknown kernel {name!r}") from None
    if family in (KernelFamily.GeneralConformable, KernelFamily.Custom):
        if not rest.strip():
            raise InvalidParams(f"kernel {name!r} needs an expression after ':'")
        return builtin_kernel(family, rest.strip())
    if rest.strip():
        raise InvalidParams(f"kernel {name!r} takes no expression")
    return builtin_kernel(family)
