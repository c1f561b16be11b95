"""Exception hierarchy shared by every fracbern module."""
from __future__ import annotations


class FracError(Exception):
    """Base class for all errors raised by fracbern."""


class ParseError(FracError, ValueError):
    """Malformed expression text.

    ``offset`` is the byte offset into the UTF-8 encoded source where the
    problem was detected.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UnknownIdentifier(ParseError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r}", offset)
        self.name = name


class DomainError(FracError, ArithmeticError):
    """A function was evaluated outside its real domain."""


class NonRealPower(DomainError):
    """A negative base was raised to a power with no real value."""


class InvalidParams(FracError, ValueError):
    pass


class PositivityViolation(FracError, ValueError):
    def __init__(self, t: float, alpha: float, value: float):
        super().__init__(f"kernel is not positive at t={t!r}, alpha={alpha!r} (value {value!r})")
        self.t = t
        self.alpha = alpha
        self.value = value


class NoConvergence(FracError):
    pass


class ToleranceNotMet(FracError):
    """Adaptive quadrature stopped before reaching the requested tolerance."""

    def __init__(self, estimate, error: float, tolerance: float):
        super().__init__(f"quadrature error {error:.3e} exceeds tolerance {tolerance:.3e}")
        self.estimate = estimate
        self.error = error
        self.tolerance = tolerance


class NegativeIntegrand(FracError, ValueError):
    def __init__(self, name: str, t: float, value: float):
        super().__init__(f"{name} must be non-negative; {name}({t!r}) = {value!r}")
        self.name = name
        self.t = t
        self.value = value


class NegativeC(NegativeIntegrand):
    pass


class LengthMismatch(FracError, ValueError):
    pass


class SingularSolution(FracError):
    """The closed-form solution blows up between two grid nodes."""

    def __init__(self, left: float, right: float):
        super().__init__(f"solution is singular between t={left!r} and t={right!r}")
        self.bracket = (left, right)


class NonFinite(FracError):
    def __init__(self, index: int, value: float):
        super().__init__(f"non-finite value {value!r} at node {index}")
        self.index = index
        self.value = value


class RootNotFound(FracError):
    def __init__(self, x: float, residual: float, index: int | None = None, note: str = ""):
        where = f" at node {index}" if index is not None else ""
        extra = f"; {note}" if note else ""
        super().__init__(f"root not found{where}: last iterate {x!r}, residual {residual!r}{extra}")
        self.x = x
        self.residual = residual
        self.index = index


class ConfigError(FracError, ValueError):
    def __init__(self, key: str, reason: str = "missing"):
        super().__init__(f"{key}: {reason}")
        self.key = key
        self.reason = reason
