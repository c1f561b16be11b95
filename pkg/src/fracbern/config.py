"""Run configuration: flat ``key = value`` lines, ``#`` starts a comment.

Example::

    kernel = conformable
    alpha  = 0.1, 0.3, 0.5      # a sweep
    p = 1
    q = 1
    n = 2                       # or a fraction such as 1/3
    a = 0.5
    b = 2
    y0 = -1
    N = 5000
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .errors import ConfigError, FracError, ParseError
from .expr import parse
from .fdm import SchemeConfig
from .kernel import kernel_from_spec
from .quadrature import QuadratureConfig, default_config
from .realpow import RealExponent

__all__ = ["RunConfig", "load_config", "parse_config_text", "REQUIRED"]

_EXPRESSIONS = ("p", "q", "r", "c", "d", "k")
_FLOATS = ("a", "b", "t0", "y0", "C", "newton_tol", "abs_tol", "rel_tol", "horizon", "slack", "epsilon")
_INTS = ("N", "newton_maxit", "max_depth", "startup_substeps", "samples")
_BOOLS = ("paper_literal_O4", "uniform")
_LISTS = {"alpha": float, "Ns": int}

# Keys every command needs before it can run.
REQUIRED = {
    "solve": ("kernel", "alpha", "p", "q", "n", "a", "b", "N"),
    "converge": ("kernel", "alpha", "p", "q", "n", "a", "b", "Ns"),
    "gronwall": ("kernel", "alpha", "r", "c", "d", "k", "a", "b", "N"),
    "stability": ("kernel", "alpha", "p", "q", "n", "a"),
    "operators": (),
}


@dataclass(frozen=True)
class RunConfig:
    kernel: str | None = None
    alpha: tuple[float, ...] | None = None
    p: str | None = None
    q: str | None = None
    n: str | None = None
    a: float | None = None
    b: float | None = None
    t0: float | None = None
    y0: float | None = None
    C: float | None = None
    N: int | None = None
    Ns: tuple[int, ...] | None = None
    method: str = "both"
    bootstrap: str = "backward_euler"
    mid: str = "backward3"
    main: str = "backward5"
    newton_tol: float = 1e-12
    newton_maxit: int = 50
    startup_substeps: int | None = None
    paper_literal_O4: bool = False
    abs_tol: float | None = None
    rel_tol: float | None = None
    max_depth: int | None = None
    horizon: float = 1e4
    samples: int = 64
    uniform: bool = False
    r: str | None = None
    c: str | None = None
    d: str | None = None
    k: str | None = None
    bound: str = "full"
    slack: float = 1e-6
    epsilon: float = 1.0
    out: str | None = None

    def scheme(self) -> SchemeConfig:
        try:
            return SchemeConfig(self.bootstrap, self.mid, self.main, self.newton_tol, self.newton_maxit,
                                self.startup_substeps, self.paper_literal_O4)
        except FracError as exc:
            raise ConfigError("scheme", str(exc)) from None

    def quadrature(self) -> QuadratureConfig:
        base = default_config()
        try:
            return QuadratureConfig(
                abs_tol=self.abs_tol if self.abs_tol is not None else base.abs_tol,
                rel_tol=self.rel_tol if self.rel_tol is not None else base.rel_tol,
                max_depth=self.max_depth if self.max_depth is not None else base.max_depth,
            )
        except FracError as exc:
            raise ConfigError("quadrature", str(exc)) from None

    def require(self, command: str) -> "RunConfig":
        """Raise :class:`ConfigError` naming the first key ``command`` needs but lacks."""
        for key in REQUIRED[command]:
            if getattr(self, key) is None:
                raise ConfigError(key)
        if command in ("solve", "converge") and self.y0 is None and self.C is None:
            raise ConfigError("y0", "missing (or give C)")
        if self.y0 is not None and self.C is not None:
            raise ConfigError("C", "give either y0 or C, not both")
        if self.method not in ("exact", "fdm", "both"):
            raise ConfigError("method", f"must be exact, fdm or both, not {self.method!r}")
        if self.bound not in ("full", "simplified", "lower"):
            raise ConfigError("bound", f"must be full, simplified or lower, not {self.bound!r}")
        if command == "converge" and self.Ns is not None and len(self.Ns) < 3:
            raise ConfigError("Ns", "needs at least three grid sizes")
        self.scheme()
        return self


def _convert(key: str, raw: str):
    raw = raw.strip()
    if key in _LISTS:
        items = [s.strip() for s in raw.split(",") if s.strip()]
        if not items:
            raise ConfigError(key, "empty list")
        try:
            values = tuple(_LISTS[key](s) for s in items)
        except ValueError:
            raise ConfigError(key, f"not a list of numbers: {raw!r}") from None
        if key == "alpha" and not all(0 < v <= 1 for v in values):
            raise ConfigError(key, "every alpha must lie in (0, 1]")
        if key == "Ns" and any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError(key, "grid sizes must be strictly ascending")
        return values
    if key in _EXPRESSIONS:
        try:
            parse(raw)
        except ParseError as exc:
            raise ConfigError(key, str(exc)) from None
        return raw
    if key in _FLOATS:
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(key, f"not a number: {raw!r}") from None
        if not math.isfinite(value):
            raise ConfigError(key, "must be finite")
        return value
    if key in _INTS:
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(key, f"not an integer: {raw!r}") from None
        if key == "N" and value < 4:
            raise ConfigError(key, "N must be at least 4")
        return value
    if key in _BOOLS:
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(key, f"not a boolean: {raw!r}")
    if key == "n":
        try:
            RealExponent.of(raw)
        except FracError:
            raise ConfigError(key, f"not a number or fraction: {raw!r}") from None
        if RealExponent.of(raw).value == 1.0:
            raise ConfigError(key, "n = 1 is not a Bernoulli equation")
        return raw
    if key == "kernel":
        try:
            kernel_from_spec(raw)
        except FracError as exc:
            raise ConfigError(key, str(exc)) from None
        return raw
    return raw


_KNOWN = {f.name for f in fields(RunConfig)}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """``key -> raw text`` from config lines; duplicate keys keep the last value."""
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}", f"expected 'key = value', got {line!r}")
        entries[key] = value.strip()
    return entries


def load_config(path: str | None = None, overrides: dict | None = None,
                base: RunConfig | None = None) -> RunConfig:
    """Merge ``base``, the file at ``path`` and ``overrides`` (later wins) into a validated config."""
    entries = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
        entries.update(parse_config_text(text, path))
    for key, value in (overrides or {}).items():
        if value is not None:
            entries[key] = value
    changes = {}
    for key, raw in entries.items():
        if key not in _KNOWN:
            raise ConfigError(key, "unknown key")
        changes[key] = _convert(key, raw) if isinstance(raw, str) else raw
    return replace(base or RunConfig(), **changes)
