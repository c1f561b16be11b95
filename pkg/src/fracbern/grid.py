"""Uniform grids and the trajectory container shared by the solvers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParams, LengthMismatch

__all__ = ["Grid", "Trajectory", "node_array"]


@dataclass(frozen=True)
class Grid:
    """``N + 1`` equal subintervals of ``[a, b]``: nodes ``t_i = a + i h``, ``i = 0..N+1``."""

    a: float
    b: float
    N: int
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b) and self.b > self.a):
            raise InvalidParams(f"grid needs finite a < b, got [{self.a}, {self.b}]")
        if int(self.N) != self.N or self.N < 4:
            raise InvalidParams(f"grid needs an integer N >= 4, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        nodes = np.linspace(float(self.a), float(self.b), self.N + 2)
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.N + 1)

    def __len__(self):
        return self.N + 2


def node_array(grid) -> np.ndarray:
    """Nodes of a :class:`Grid`, or a plain 1-d array checked to be strictly ascending."""
    nodes = np.asarray(getattr(grid, "nodes", grid), dtype=float)
    if nodes.ndim != 1 or nodes.size == 0:
        raise InvalidParams("grid must be a non-empty 1-d array")
    if np.any(np.diff(nodes) <= 0):
        raise InvalidParams("grid nodes must be strictly ascending")
    return nodes


@dataclass
class Trajectory:
    """Values of a solution at grid nodes.

    ``method`` is ``"closed-form"``, ``"linear"``, ``"homogeneous"`` or
    ``"fdm-<schemes>"``; ``meta`` holds per-node error estimates or scheme tags.
    """

    nodes: np.ndarray
    values: np.ndarray
    method: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.nodes.shape != self.values.shape:
            raise LengthMismatch(f"{self.nodes.size} nodes but {self.values.size} values")
        if np.any(np.diff(self.nodes) <= 0):
            raise InvalidParams("trajectory nodes must be strictly ascending")

    def __len__(self):
        return self.nodes.size

    def at(self, t: float) -> float:
        """Value at a node (exact match required)."""
        i = int(np.searchsorted(self.nodes, t))
        if i >= self.nodes.size or self.nodes[i] != t:
            raise InvalidParams(f"{t} is not a node of this trajectory")
        return float(self.values[i])
