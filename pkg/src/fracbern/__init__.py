"""Generalized local fractional calculus and the fractional Bernoulli equation.

The derivative ``G_T^alpha f = T(t, alpha)^m D^m f`` (``m = ceil(alpha)``) and
its integral ``J_{T,a}^alpha`` are parameterized by a positive kernel
``T(t, alpha)``. On top of them sit Gronwall-type envelopes, closed-form and
finite-difference solvers for ``G_T^alpha y + p y = q y^n``, and stability
probes for the trivial solution.
"""
from __future__ import annotations

from .bernoulli import (
    BernoulliProblem, NotApplicable, Stability, StabilityVerdict, UniformBound,
    classify_stability, constant_from_initial, exact_solution, homogeneous_solution,
    linear_solution, uniform_stability_bound,
)
from .errors import *  # noqa: F401,F403
from .expr import Expression, parse
from .fdm import Grid, Scheme, SchemeConfig, backend, convergence_study, solve_fdm
from .grid import Trajectory
from .gronwall import (
    GronwallData, gronwall_bound, gronwall_bound_simplified, gronwall_lower_bound, verify_bound,
)
from .kernel import Interval, Kernel, KernelFamily, builtin_kernel, kernel_from_expr, kernel_from_spec
from .operators import (
    AlphaOrder, adjoint_apply, gderiv, gderiv_via_classical, improper_jintegral, jintegral,
    jintegral_cumulative,
)
from .quadrature import QuadratureConfig
from .realpow import RealExponent, real_power

__version__ = "0.1.0"
