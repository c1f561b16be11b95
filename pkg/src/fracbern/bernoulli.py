"""Closed-form solutions of ``G_T^alpha y + p y = q y^n`` and stability of ``y = 0``.

With ``m = 1 - n`` and ``J = J_{T,a}^alpha`` the solution is

    y = [ e^{-m J(p)} ( m J(q e^{m J(p)}) + C ) ]^{1/m}

which for ``n = 0`` is the integrating-factor solution of the linear equation.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import (
    DomainError, FracError, InvalidParams, NonRealPower, SingularSolution,
)
from .grid import Trajectory, node_array
from .kernel import Kernel
from .operators import improper_jintegral, prefix_integral, refine_nodes, to_function
from .quadrature import QuadratureConfig, default_config, integrate_segments
from .realpow import RealExponent, real_power

__all__ = [
    "BernoulliProblem", "constant_from_initial", "exact_solution", "linear_solution",
    "homogeneous_solution", "Stability", "StabilityEvidence", "StabilityVerdict",
    "classify_stability", "UniformBound", "NotApplicable", "uniform_stability_bound",
]

# Each grid gap is split this many times for the nested integral ...
REFINE = 8
# ... and the refined grid has at least this many pieces.
MIN_PIECES = 256


def _domain_ok(kernel: Kernel, t: float) -> bool:
    dom = kernel.t_domain
    return bool(dom.contains(t)) or t in (dom.lo, dom.hi)


@dataclass(frozen=True)
class BernoulliProblem:
    """``G_T^alpha y + p(t) y = q(t) y^n`` on ``[a, b]``.

    ``base_point`` is the lower limit of ``J`` (defaults to ``a``). Give
    either ``initial = (t0, y0)`` or ``constant = C``, not both. ``n`` may be
    given as text such as ``"1/3"`` so that negative solutions keep a real
    branch.
    """

    p: Any
    q: Any
    n: Any
    alpha: float
    kernel: Kernel
    interval: tuple[float, float]
    base_point: float | None = None
    initial: tuple[float, float] | None = None
    constant: float | None = None
    exponent: RealExponent = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = RealExponent.of(self.n)
        object.__setattr__(self, "exponent", n)
        if n.value == 1.0:
            raise InvalidParams("n = 1 is a linear equation without a Bernoulli reduction")
        if not 0.0 < self.alpha <= 1.0:
            raise InvalidParams(f"alpha must be in (0, 1], got {self.alpha}")
        a, b = (float(v) for v in self.interval)
        if not b > a:
            raise InvalidParams(f"interval needs a < b, got [{a}, {b}]")
        object.__setattr__(self, "interval", (a, b))
        for t in (a, b):
            if not _domain_ok(self.kernel, t):
                raise InvalidParams(f"t={t} is outside the kernel domain {self.kernel.t_domain}")
        if self.base_point is None:
            object.__setattr__(self, "base_point", a)
        if self.initial is not None and self.constant is not None:
            raise InvalidParams("give either an initial condition or a constant, not both")
        if self.initial is not None:
            t0, y0 = self.initial
            object.__setattr__(self, "initial", (float(t0), float(y0)))

    @property
    def a(self) -> float:
        return self.interval[0]

    @property
    def b(self) -> float:
        return self.interval[1]

    @property
    def p_func(self):
        return to_function(self.p, self.alpha)

    @property
    def q_func(self):
        return to_function(self.q, self.alpha)

    def with_constant(self, C: float) -> "BernoulliProblem":
        return BernoulliProblem(self.p, self.q, self.exponent, self.alpha, self.kernel,
                                self.interval, self.base_point, None, C)


def _is_trivial_start(prob: BernoulliProblem) -> bool:
    # y0 = 0 with n > 1 needs C = +-inf: the solution is y = 0
    return prob.initial is not None and prob.initial[1] == 0.0 and prob.exponent.value > 1.0


def _branch_sign(prob: BernoulliProblem) -> float:
    """Sign of the branch through a negative ``y0`` when the outer power ``1/(1-n)`` is even-rooted.

    The bracket then equals ``|y|^(1-n)`` and drops the sign of ``y``. For an
    odd ``y^n`` the map ``y -> -y`` carries solutions to solutions, so the
    negative branch is the negated principal one; otherwise a negative ``y0``
    has no real closed form.
    """
    if prob.initial is None or prob.initial[1] >= 0:
        return 1.0
    if prob.exponent.reciprocal_of_one_minus().parity != 0:
        return 1.0
    if prob.exponent.parity == -1:
        return -1.0
    raise NonRealPower(f"y0 = {prob.initial[1]} < 0 has no real closed form with n = {prob.exponent}")


def _integrals(prob: BernoulliProblem, nodes: np.ndarray, cfg: QuadratureConfig):
    """``J(p)`` and ``J(q e^{m J(p)})`` at ``nodes`` plus their error estimates."""
    a = prob.base_point
    m = 1.0 - prob.exponent.value
    T, alpha = prob.kernel, prob.alpha
    p, q = prob.p_func, prob.q_func
    points = np.unique(np.concatenate([nodes, [a]]))
    factor = max(REFINE, math.ceil(MIN_PIECES / max(points.size - 1, 1)))
    fine = refine_nodes(points, factor)
    ia = int(np.searchsorted(fine, a))
    jp_fine, jp = prefix_integral(p, T, alpha, a, fine, cfg=cfg)

    def inner(w):
        return q(w) * np.exp(m * jp(w)) / T(w, alpha)

    if fine.size > 1:
        pieces, errs = integrate_segments(inner, fine, cfg)
    else:
        pieces, errs = np.zeros(0), np.zeros(0)
    cum = np.concatenate([[0.0], np.cumsum(pieces)])
    cum_err = np.concatenate([[0.0], np.cumsum(errs)])
    idx = np.searchsorted(fine, nodes)
    jq = (cum - cum[ia])[idx]
    jq_err = np.abs(cum_err - cum_err[ia])[idx]
    return jp_fine[idx], jq, jp.errors[idx], jq_err


def constant_from_initial(prob: BernoulliProblem, cfg: QuadratureConfig | None = None) -> float:
    """The ``C`` for which the closed form passes through ``(t0, y0)``."""
    if prob.initial is None:
        raise InvalidParams("problem has no initial condition")
    cfg = cfg or default_config()
    t0, y0 = prob.initial
    m = (RealExponent(1.0 - prob.exponent.value) if prob.exponent.fraction is None
         else RealExponent.of(1 - prob.exponent.fraction))
    if y0 == 0.0 and m.value < 0:
        raise DomainError("y0 = 0 with n > 1 is the trivial solution; no finite constant")
    _branch_sign(prob)
    jp, jq, _, _ = _integrals(prob, np.array([t0]), cfg)
    return float(real_power(y0, m) * math.exp(m.value * jp[0]) - m.value * jq[0])


def _resolve_constant(prob: BernoulliProblem, cfg) -> float:
    if prob.constant is not None:
        return float(prob.constant)
    if prob.initial is not None:
        return constant_from_initial(prob, cfg)
    raise InvalidParams("problem needs an initial condition or a constant")


def _closed_form(prob: BernoulliProblem, nodes: np.ndarray, C: float, cfg, method: str,
                 on_singular: str) -> Trajectory:
    m = 1.0 - prob.exponent.value
    outer = prob.exponent.reciprocal_of_one_minus()
    jp, jq, jp_err, jq_err = _integrals(prob, nodes, cfg)
    with np.errstate(over="ignore", invalid="ignore"):
        bracket = np.exp(-m * jp) * (m * jq + C)
    meta = {"C": C, "jp_error": jp_err, "jq_error": jq_err, "truncated_at": None}
    stop = nodes.size
    if outer.value < 0:
        sign = np.sign(bracket)
        bad = (sign == 0) | np.concatenate([[False], sign[1:] != sign[:-1]])
        if np.any(bad):
            j = int(np.argmax(bad))
            left = nodes[j - 1] if j > 0 else nodes[0]
            if on_singular == "raise" or j == 0:
                raise SingularSolution(float(left), float(nodes[j]))
            meta["truncated_at"] = (float(left), float(nodes[j]))
            stop = j
    if outer.parity == 0 and np.any(bracket[:stop] < 0):
        j = int(np.argmax(bracket[:stop] < 0))
        raise NonRealPower(f"solution has no real value at t={nodes[j]} (base {bracket[j]!r}, exponent {outer})")
    values = real_power(bracket[:stop], outer) * _branch_sign(prob)
    for key in ("jp_error", "jq_error"):
        meta[key] = meta[key][:stop]
    return Trajectory(nodes[:stop], values, method, meta)


def exact_solution(prob: BernoulliProblem, grid, cfg: QuadratureConfig | None = None,
                   on_singular: str = "truncate") -> Trajectory:
    """Evaluate the closed-form solution at every grid node.

    The nested integral uses ``J(p)`` tabulated on the grid refined at least
    eightfold and interpolated by cubic Hermite pieces.

    Parameters
    ----------
    on_singular : {"truncate", "raise"}
        What to do when the solution blows up between two nodes: cut the
        trajectory at the last node before the blow-up (recorded in
        ``meta["truncated_at"]``) or raise :class:`SingularSolution`.
    """
    if on_singular not in ("truncate", "raise"):
        raise InvalidParams(f"on_singular must be 'truncate' or 'raise', got {on_singular!r}")
    cfg = cfg or default_config()
    nodes = node_array(grid)
    if _is_trivial_start(prob):
        return Trajectory(nodes, np.zeros_like(nodes), "closed-form", {"C": math.nan, "truncated_at": None})
    C = _resolve_constant(prob, cfg)
    return _closed_form(prob, nodes, C, cfg, "closed-form", on_singular)


def linear_solution(p, q, kernel: Kernel, alpha: float, a: float, C: float, grid,
                    cfg: QuadratureConfig | None = None) -> Trajectory:
    """``y = e^{-J(p)} (J(q e^{J(p)}) + C)``, the solution of ``G_T^alpha y + p y = q``."""
    nodes = node_array(grid)
    lo, hi = min(a, nodes[0]), max(a, nodes[-1])
    if hi == lo:
        hi = lo + 1.0
    prob = BernoulliProblem(p, q, 0, alpha, kernel, (lo, hi), base_point=a, constant=C)
    return _closed_form(prob, nodes, float(C), cfg or default_config(), "linear", "raise")


def homogeneous_solution(p, kernel: Kernel, alpha: float, t0: float, y0: float, grid,
                         cfg: QuadratureConfig | None = None) -> Trajectory:
    """``y = y0 e^{-J_{T,t0}(p)}``, the solution of ``G_T^alpha y + p y = 0`` through ``(t0, y0)``."""
    nodes = node_array(grid)
    jp, interp = prefix_integral(to_function(p, alpha), kernel, alpha, t0, nodes, cfg=cfg or default_config())
    errors = interp.errors[np.searchsorted(interp.nodes, nodes)]
    return Trajectory(nodes, y0 * np.exp(-jp), "homogeneous", {"jp_error": errors})


class Stability(enum.Enum):
    Stable = "stable"
    AsymptoticallyStable = "asymptotically stable"
    UniformlyStable = "uniformly stable"
    Unstable = "unstable"
    Inconclusive = "inconclusive"


@dataclass(frozen=True)
class StabilityEvidence:
    """Numeric probes behind a verdict. ``tail`` is ``increasing``, ``decreasing`` or ``mixed``."""

    liminf_estimate: float
    j_final: float
    horizon: float
    tail: str
    probes: int
    p_lower: float
    q_bound: float
    q_bounded: bool
    N: float | None = None
    note: str = ""


@dataclass(frozen=True)
class StabilityVerdict:
    classification: Stability
    evidence: StabilityEvidence | None


# |J(p)| beyond this along a monotone tail counts as divergence.
J_THRESHOLD = 1e3
# The horizon is extended tenfold up to this while the verdict is still open.
HORIZON_LIMIT = 1e12


def _probe_times(t0: float, horizon: float, samples: int) -> np.ndarray:
    span = horizon - t0
    return t0 + np.geomspace(min(1.0, span / samples), span, samples)


def classify_stability(prob: BernoulliProblem, horizon: float = 1e4, samples: int = 64,
                       check_uniform: bool = False,
                       cfg: QuadratureConfig | None = None) -> StabilityVerdict:
    """Classify the trivial solution from the growth of ``J_{T,t0}(p)``.

    ``J(p)`` is probed at geometrically spaced times from the interval start
    up to ``horizon``; the horizon grows tenfold while the tail is monotone
    and still inside ``[-1e3, 1e3]``.

    * monotone growth past ``1e3`` gives asymptotic stability. For the
      nonlinear equation this also needs ``n > 1``, ``p >= p_min > 0`` and a
      bounded ``q`` on the probes, otherwise the verdict is plain stability;
    * a tail bounded below gives stability;
    * monotone decrease past ``-1e3`` gives instability;
    * anything else is inconclusive.

    With ``check_uniform`` a stable linear homogeneous problem whose
    ``int |p| / T`` converges is reported as uniformly stable.
    The verdict is numerical evidence, not a proof.
    """
    if samples < 10:
        raise InvalidParams("classify_stability needs at least 10 samples")
    t0 = prob.a
    if not horizon > t0:
        raise InvalidParams(f"horizon {horizon} must exceed the interval start {t0}")
    cfg = cfg or default_config()
    p, q = prob.p_func, prob.q_func
    T, alpha = prob.kernel, prob.alpha
    try:
        while True:
            ts = _probe_times(t0, horizon, samples)
            J, _ = prefix_integral(p, T, alpha, t0, ts, cfg=cfg)
            tail = J[samples // 2:]
            steps = np.diff(tail)
            inc, dec = bool(np.all(steps > 0)), bool(np.all(steps < 0))
            open_ = (inc and J[-1] < J_THRESHOLD) or (dec and J[-1] > -J_THRESHOLD)
            if not open_ or horizon * 10 > HORIZON_LIMIT:
                break
            horizon *= 10
        pv, qv = p(ts), np.abs(q(ts))
    except (FracError, FloatingPointError, OverflowError):
        return StabilityVerdict(Stability.Inconclusive, None)
    half = samples // 2
    q_bounded = bool(np.all(np.isfinite(qv)) and qv[half:].max() <= 2 * qv[:half].max() + 1)
    linear = prob.exponent.value == 0 or not np.any(qv)
    evidence = dict(
        liminf_estimate=float(tail.min()), j_final=float(J[-1]), horizon=float(horizon),
        tail="increasing" if inc else "decreasing" if dec else "mixed", probes=samples,
        p_lower=float(pv.min()), q_bound=float(qv.max()), q_bounded=q_bounded,
    )
    if not np.all(np.isfinite(J)):
        return StabilityVerdict(Stability.Inconclusive, StabilityEvidence(**evidence, note="J(p) not finite"))
    if dec and J[-1] < -J_THRESHOLD:
        return StabilityVerdict(Stability.Unstable, StabilityEvidence(**evidence))
    if inc and J[-1] > J_THRESHOLD:
        if linear:
            return StabilityVerdict(Stability.AsymptoticallyStable, StabilityEvidence(**evidence))
        if prob.exponent.value > 1 and evidence["p_lower"] > 0 and q_bounded:
            return StabilityVerdict(Stability.AsymptoticallyStable,
                                    StabilityEvidence(**evidence, note="p bounded below by a positive constant, q bounded"))
        return StabilityVerdict(Stability.Stable, StabilityEvidence(**evidence, note="conditions for asymptotic stability of the nonlinear equation not met"))
    if tail.min() > -J_THRESHOLD:
        if check_uniform and linear:
            result = improper_jintegral(lambda t: np.abs(p(t)), T, alpha, t0, cfg=cfg)
            if result.converged:
                return StabilityVerdict(Stability.UniformlyStable, StabilityEvidence(**evidence, N=result.value))
        return StabilityVerdict(Stability.Stable, StabilityEvidence(**evidence))
    return StabilityVerdict(Stability.Inconclusive, StabilityEvidence(**evidence))


@dataclass(frozen=True)
class UniformBound:
    """``delta = epsilon e^{-N}`` with ``N = int_a^inf k / T``."""

    N: float
    delta: float


@dataclass(frozen=True)
class NotApplicable:
    reason: str


def uniform_stability_bound(k, kernel: Kernel, alpha: float, a: float, epsilon: float = 1.0,
                            tail_tol: float = 1e-10, horizon_cap: float = 1e15,
                            cfg: QuadratureConfig | None = None) -> UniformBound | NotApplicable:
    """The ``delta(epsilon)`` of uniform stability when ``|F(t, x)| <= k(t) |x|`` and ``int k / T`` converges."""
    if not epsilon > 0:
        raise InvalidParams("epsilon must be positive")
    result = improper_jintegral(k, kernel, alpha, a, tail_tol=tail_tol, horizon_cap=horizon_cap, cfg=cfg)
    if not result.converged:
        return NotApplicable(f"integral of k/T is {result.status} (horizon {result.horizon:g})")
    return UniformBound(result.value, epsilon * math.exp(-result.value))
