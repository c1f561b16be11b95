from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracbern import BernoulliProblem, Grid, Scheme, SchemeConfig, builtin_kernel, convergence_study, kernel_from_expr, solve_fdm
from fracbern.errors import InvalidParams, NonFinite, RootNotFound
from fracbern.fdm import step_backward3, step_backward5, step_euler_backward, step_euler_forward, step_midpoint3
from conftest import CATALOG, catalog_kernel, eq1_exact

EQ1_END = -0.138379560668148


def eq1(alpha=0.5, y0=-1.0):
    return BernoulliProblem("1", "1", 2, alpha, builtin_kernel("conformable"), (0.5, 2.0), initial=(0.5, y0))


def classical(p, q, n=0, a=0.0, b=1.0, y0=0.0):
    return BernoulliProblem(p, q, n, 1.0, kernel_from_expr("1"), (a, b), initial=(a, y0))


ALL_CONFIGS = {
    "fe": SchemeConfig("fe", "bootstrap", "mid"),
    "be": SchemeConfig("be", "bootstrap", "mid"),
    "m3": SchemeConfig("fe", "m3", "mid"),
    "b3": SchemeConfig("be", "b3", "mid"),
    "b5": SchemeConfig(),
}


def test_grid_invariants():
    for N in (4, 7, 99, 5000, 123457):
        g = Grid(0.5, 2.0, N)
        assert g.nodes.size == N + 2 and g.nodes[0] == 0.5
        assert abs(g.nodes[-1] - 2.0) <= 4 * math.ulp(2.0)
        assert np.allclose(np.diff(g.nodes), g.h, rtol=1e-9)
    with pytest.raises(InvalidParams):
        Grid(0.0, 1.0, 3)
    with pytest.raises(InvalidParams):
        Grid(1.0, 1.0, 10)


def test_scheme_parsing():
    assert Scheme.parse("O5") is Scheme.Backward5
    assert Scheme.parse("midpoint3") is Scheme.Midpoint3
    cfg = SchemeConfig("fe", "m3", "mid")
    assert cfg.main is Scheme.Midpoint3 and cfg.tag == "forward_euler-midpoint3"
    with pytest.raises(InvalidParams):
        SchemeConfig("b5")
    with pytest.raises(InvalidParams):
        SchemeConfig(newton_tol=0)
    assert SchemeConfig().b3coef == 2.0 and SchemeConfig(paper_literal_O4=True).b3coef == 1.0


def test_zero_rhs_steps():
    prob = classical("0", "0", n=2)
    grid = Grid(0.0, 1.0, 10)
    y = [1.0, 2.0, 4.0, 3.0, 5.0, 0.0]
    assert step_euler_forward(prob, grid, y, 4) == 5.0
    assert step_midpoint3(prob, grid, y, 4) == 3.0
    assert step_euler_backward(prob, grid, y, 5) == 5.0
    assert step_backward3(prob, grid, y, 5) == pytest.approx((4 * 5.0 - 3.0) / 3, rel=1e-15)
    assert step_backward5(prob, grid, y, 5) == pytest.approx((48 * 5 - 36 * 3 + 16 * 4 - 3 * 2) / 25, rel=1e-15)


def test_euler_forward_first_step_eq1():
    prob, grid = eq1(), Grid(0.5, 2.0, 5000)
    y1 = step_euler_forward(prob, grid, [-1.0], 0)
    assert y1 == pytest.approx(-0.999152149990093, abs=1e-5)


def test_euler_forward_matches_textbook():
    # y' = cos(t) - y
    prob, grid = classical("1", "cos(t)", y0=0.3), Grid(0.0, 1.0, 20)
    traj = solve_fdm(prob, grid, ALL_CONFIGS["fe"])
    y, h = 0.3, grid.h
    for i in range(grid.N + 1):
        t = grid.nodes[i]
        y = y + h * (-1.0 * y + math.cos(t) * 1.0)
        assert traj.values[i + 1] == y


def test_linear_backward_closed_root():
    prob, grid = classical("2+t", "exp(t)", y0=1.0), Grid(0.0, 1.0, 10)
    y = [1.0, 0.0]
    h, t = grid.h, grid.nodes[1]
    assert step_euler_backward(prob, grid, y, 1) == pytest.approx((1 + h * math.exp(t)) / (1 + h * (2 + t)), rel=1e-14)
    y = [1.0, 1.1, 0.0]
    t = grid.nodes[2]
    expected = (4 * 1.1 - 1.0 + 2 * h * math.exp(t)) / (3 + 2 * h * (2 + t))
    assert step_backward3(prob, grid, y, 2) == pytest.approx(expected, rel=1e-14)


def test_midpoint_exact_on_quadratic():
    # y' = 2t through y = t^2
    prob, grid = classical("0", "2*t"), Grid(0.0, 1.0, 30)
    y = list(grid.nodes[:2] ** 2)
    for i in range(1, grid.N + 1):
        y.append(step_midpoint3(prob, grid, y, i))
    assert np.max(np.abs(np.array(y) - grid.nodes**2)) <= 1e-14


def test_backward5_exact_on_cubic():
    prob, grid = classical("0", "3*t^2"), Grid(0.0, 1.0, 30)
    y = list(grid.nodes[:4] ** 3) + [0.0]
    for i in range(4, 12):
        y[i] = step_backward5(prob, grid, y, i)
        y.append(0.0)
    assert np.max(np.abs(np.array(y[:12]) - grid.nodes[:12] ** 3)) <= 1e-14


def test_step_errors():
    prob, grid = classical("0", "1", n=2, y0=1.0), Grid(0.0, 1.0, 10)
    with pytest.raises(NonFinite):
        step_euler_forward(prob, grid, [1e200], 0)
    # x - 1 - h x^2 = 0 has no real root once h > 1/4
    prob, grid = classical("0", "1", n=2, b=10.0, y0=1.0), Grid(0.0, 10.0, 10)
    with pytest.raises(RootNotFound):
        step_euler_backward(prob, grid, [1.0, 0.0], 1)


@pytest.mark.parametrize("name", sorted(ALL_CONFIGS))
@pytest.mark.parametrize("kernel", CATALOG)
def test_trivial_solution_is_exact(name, kernel):
    prob = BernoulliProblem("sin(t)", "1+t", 2, 0.6, catalog_kernel(kernel), (0.5, 3.0), initial=(0.5, 0.0))
    traj = solve_fdm(prob, Grid(0.5, 3.0, 200), ALL_CONFIGS[name])
    assert np.all(traj.values == 0.0)


def test_eq1_composite_accuracy():
    prob = eq1()
    traj = solve_fdm(prob, Grid(0.5, 2.0, 5000))
    assert np.max(np.abs(traj.values - eq1_exact(0.5)(traj.nodes))) <= 1e-6
    assert traj.values[-1] == pytest.approx(EQ1_END, abs=1e-6)
    labels = traj.meta["scheme"]
    assert labels[0] == "initial" and set(labels[1:4]) == {"startup"} and set(labels[4:]) == {"backward5"}


def test_literal_start_labels():
    traj = solve_fdm(eq1(), Grid(0.5, 2.0, 50), SchemeConfig(startup_substeps=1))
    assert list(traj.meta["scheme"][:5]) == ["initial", "backward_euler", "backward3", "backward3", "backward5"]


def test_backward_euler_endpoint():
    traj = solve_fdm(eq1(), Grid(0.5, 2.0, 5000), ALL_CONFIGS["be"])
    assert traj.values[-1] == pytest.approx(EQ1_END, abs=5e-4)


def test_implicit_explicit_agree_as_h_shrinks():
    gaps = []
    for N in (100, 400, 1600):
        g = Grid(0.5, 2.0, N)
        fe = solve_fdm(eq1(), g, ALL_CONFIGS["fe"]).values[-1]
        be = solve_fdm(eq1(), g, ALL_CONFIGS["be"]).values[-1]
        gaps.append(abs(fe - be))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[1] / gaps[2] == pytest.approx(4.0, rel=0.2)


@pytest.mark.parametrize("name, lo, hi", [("fe", 0.8, 1.2), ("m3", 1.8, 2.2), ("b3", 1.8, 2.2), ("b5", 3.5, 6.0)])
def test_convergence_orders(name, lo, hi):
    rows = convergence_study(eq1(), EQ1_END if name != "b5" else eq1_exact(0.5), [100, 200, 400, 800],
                             ALL_CONFIGS[name])
    orders = [r.estimated_order for r in rows[1:]]
    assert math.isnan(rows[0].estimated_order)
    assert all(lo <= o <= hi for o in orders), orders


def test_literal_O4_is_first_order_at_best():
    rows = convergence_study(eq1(), eq1_exact(0.5), [100, 200, 400],
                             SchemeConfig("be", "b3", "mid", paper_literal_O4=True))
    # the single-width coefficient discretizes a different equation: the error does not shrink
    assert rows[-1].endpoint_error > 1e-2


def test_convergence_study_validation():
    with pytest.raises(InvalidParams):
        convergence_study(eq1(), EQ1_END, [100, 200])
    with pytest.raises(InvalidParams):
        convergence_study(eq1(), EQ1_END, [100, 300, 200])


def test_solve_needs_initial_at_grid_start():
    prob = BernoulliProblem("1", "1", 2, 0.5, builtin_kernel("conformable"), (0.5, 2.0), constant=-1.0)
    with pytest.raises(InvalidParams):
        solve_fdm(prob, Grid(0.5, 2.0, 10))
    prob = BernoulliProblem("1", "1", 2, 0.5, builtin_kernel("conformable"), (0.5, 2.0), initial=(1.0, -1.0))
    with pytest.raises(InvalidParams):
        solve_fdm(prob, Grid(0.5, 2.0, 10))


def test_blow_up_reports_node():
    # y' = y^2, y(0) = 1 blows up at t = 1
    prob = classical("0", "1", n=2, b=2.0, y0=1.0)
    with pytest.raises((NonFinite, RootNotFound)) as info:
        solve_fdm(prob, Grid(0.0, 2.0, 200), ALL_CONFIGS["fe"])
    assert 90 <= info.value.index <= 201


@given(st.floats(-2, 2), st.sampled_from(sorted(ALL_CONFIGS)))
def test_linear_constant_solution(c, name):
    # y' + y = c has the fixed point y = c
    prob = classical("1", str(c) if c >= 0 else f"0-{-c}", y0=c)
    traj = solve_fdm(prob, Grid(0.0, 1.0, 12), ALL_CONFIGS[name])
    assert np.allclose(traj.values, c, rtol=0, atol=1e-13)
