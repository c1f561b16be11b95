"""Real-branch powers of possibly negative bases.

``y^x`` for ``y < 0`` is real only when ``x = r/s`` in lowest terms with
``s`` odd; then ``y^x = (-1)^r |y|^x``. Exponents therefore carry their
rational form when one is known, as a :class:`RealExponent`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidParams, NonRealPower

__all__ = ["RealExponent", "real_power"]


def _parity(frac: Fraction | None) -> int:
    # +1: even numerator over odd denominator, -1: odd over odd, 0: no real value below zero
    if frac is None or frac.denominator % 2 == 0:
        return 0
    return 1 if frac.numerator % 2 == 0 else -1


@dataclass(frozen=True)
class RealExponent:
    """An exponent with its sign rule for negative bases.

    ``parity`` is ``+1`` when ``(-y)^x = y^x``, ``-1`` when ``(-y)^x = -(y^x)``,
    and ``0`` when negative bases have no real power.
    """

    value: float
    fraction: Fraction | None = None

    @classmethod
    def of(cls, x) -> "RealExponent":
        """Build from an int, a float, a :class:`~fractions.Fraction`, or text like ``"2"``, ``"1/3"``, ``"0.5"``."""
        if isinstance(x, RealExponent):
            return x
        if isinstance(x, str):
            try:
                frac = Fraction(x.strip())
            except (ValueError, ZeroDivisionError):
                raise InvalidParams(f"not a number or fraction: {x!r}") from None
            return cls(float(frac), frac)
        if isinstance(x, (int, Fraction)):
            frac = Fraction(x)
            return cls(float(frac), frac)
        value = float(x)
        if not math.isfinite(value):
            raise InvalidParams(f"exponent must be finite, got {value}")
        # a float is taken as rational only when it is an integer
        return cls(value, Fraction(int(value)) if value.is_integer() else None)

    @property
    def parity(self) -> int:
        return _parity(self.fraction)

    def shifted(self, k: int) -> "RealExponent":
        """The exponent ``x + k``."""
        frac = None if self.fraction is None else self.fraction + k
        return RealExponent(self.value + k, frac)

    def reciprocal_of_one_minus(self) -> "RealExponent":
        """``1 / (1 - x)``, the outer exponent of the Bernoulli substitution."""
        if self.fraction is not None:
            if self.fraction == 1:
                raise InvalidParams("exponent 1 has no Bernoulli reduction")
            frac = 1 / (1 - self.fraction)
            return RealExponent(float(frac), frac)
        if self.value == 1.0:
            raise InvalidParams("exponent 1 has no Bernoulli reduction")
        return RealExponent(1.0 / (1.0 - self.value))

    def __str__(self):
        return str(self.fraction) if self.fraction is not None else repr(self.value)


def real_power(y, x: RealExponent | float):
    """``y^x`` on the real branch; raises :class:`NonRealPower` if it has no real value."""
    x = RealExponent.of(x)
    arr = np.asarray(y, dtype=float)
    if x.fraction is not None and x.fraction == 0:
        out = np.ones_like(arr)
    else:
        neg = arr < 0
        if np.any(neg) and x.parity == 0:
            raise NonRealPower(f"negative base raised to {x}, which has no real value")
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.power(np.abs(arr), x.value)
        out = np.where(neg, x.parity * out, out)
    if np.ndim(y) == 0:
        return float(out)
    return out
