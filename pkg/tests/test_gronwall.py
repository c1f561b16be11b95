from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracbern import (
    Grid, GronwallData, builtin_kernel, gronwall_bound, gronwall_bound_simplified,
    gronwall_lower_bound, kernel_from_expr, verify_bound,
)
from fracbern.errors import LengthMismatch, NegativeC, NegativeIntegrand
from fracbern.quadrature import integrate


def classical(c="1", d="1", k="1", b=1.0):
    return GronwallData(c, d, k, kernel_from_expr("1"), 1.0, (0.0, b))


def test_classical_case_is_exponential():
    grid = Grid(0.0, 2.0, 40)
    bound = gronwall_bound(classical(b=2.0), grid)
    assert np.max(np.abs(bound - np.exp(grid.nodes))) <= 1e-8


def test_lower_bound_is_same_formula():
    grid = Grid(0.0, 1.0, 10)
    data = classical(c="1+t", k="exp(-t)")
    assert np.array_equal(gronwall_bound(data, grid), gronwall_lower_bound(data, grid))


@pytest.mark.parametrize("fn", [gronwall_bound, gronwall_bound_simplified, gronwall_lower_bound])
def test_zero_d_gives_c(fn):
    grid = Grid(0.0, 1.0, 10)
    bound = fn(classical(c="2+sin(t)", d="0"), grid)
    assert np.allclose(bound, 2 + np.sin(grid.nodes), rtol=0, atol=1e-15)


def test_simplified_example():
    grid = Grid(0.0, 1.0, 9)
    bound = gronwall_bound_simplified(classical(), grid)
    assert bound[-1] == pytest.approx(1 + math.e, rel=1e-12)


def test_classical_against_direct_oracle():
    c = lambda t: 1 + np.cos(t) ** 2
    d = lambda t: 0.5 + 0 * t
    k = lambda t: 1 / (1 + t)
    data = GronwallData(c, d, k, kernel_from_expr("1"), 1.0, (0.0, 3.0))
    grid = Grid(0.0, 3.0, 8)
    bound = gronwall_bound(data, grid)
    # int dk = 0.5 log(1+t) in closed form
    Jdk = lambda t: 0.5 * np.log1p(t)
    for t, B in zip(grid.nodes, bound):
        inner, _ = integrate(lambda w: c(w) * k(w) * np.exp(-Jdk(w)), 0.0, t)
        assert B == pytest.approx(c(t) + d(t) * inner * math.exp(Jdk(t)), abs=1e-8)


def test_equality_trajectory_is_dominated():
    # r = e^t solves r = c + d J(k r) with c = e^t - d (e^t - e^a) when k / T = 1
    alpha, a, d = 0.5, 0.5, 0.7
    data = GronwallData(f"exp(t) - {d}*(exp(t) - exp({a}))", str(d), "t^(1-alpha)",
                        builtin_kernel("conformable"), alpha, (a, 2.5))
    grid = Grid(a, 2.5, 30)
    bound = gronwall_bound(data, grid)
    r = np.exp(grid.nodes)
    assert verify_bound(r, bound, 1e-6).ok
    assert np.max(np.abs(bound - r)) <= 1e-6


nonneg = st.sampled_from(["1", "t", "exp(-t)", "1+sin(t)", "t^2", "0", "2/(1+t)"])


@given(nonneg, nonneg, nonneg)
def test_simplified_dominates_full(c, d, k):
    data = GronwallData(c, d, k, builtin_kernel("conformable"), 0.6, (0.5, 3.0))
    grid = Grid(0.5, 3.0, 12)
    full = gronwall_bound(data, grid)
    simple = gronwall_bound_simplified(data, grid)
    assert np.all(simple >= full - 1e-8)


def test_negativity_checks():
    grid = Grid(0.0, 1.0, 5)
    with pytest.raises(NegativeIntegrand):
        gronwall_bound(classical(k="t - 0.5"), grid)
    with pytest.raises(NegativeIntegrand):
        gronwall_bound(classical(d="-1"), grid)
    with pytest.raises(NegativeC):
        gronwall_bound_simplified(classical(c="-1"), grid)
    # a negative c is fine for the full bound
    assert np.all(np.isfinite(gronwall_bound(classical(c="-1"), grid)))


def test_verify_bound():
    b = np.linspace(0, 1, 7)
    report = verify_bound(b, b)
    assert report.ok and report.worst_violation <= 0
    report = verify_bound(b + 1, b, slack=0.0)
    assert not report.ok and report.worst_violation == 1.0
    with pytest.raises(LengthMismatch):
        verify_bound(b, b[:-1])


def test_homogeneous_solution_within_bound():
    # y' = -p y with p >= 0 gives |y| <= y0 = c + 0 * J(k |y|)
    from fracbern import homogeneous_solution
    grid = Grid(0.0, 2.0, 20)
    traj = homogeneous_solution("1+t", kernel_from_expr("1"), 1.0, 0.0, 3.0, grid)
    bound = gronwall_bound(classical(c="3", d="1", k="1+t", b=2.0), grid)
    assert verify_bound(np.abs(traj.values), bound).ok
