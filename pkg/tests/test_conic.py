"""Thin conic-program layer: LPs, second-order cones, quad-over-lin."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcsplan.conic import Affine, ConicProgram, solve_lp_feasibility


def test_lp_minimum():
    prog = ConicProgram()
    x = prog.add_var()
    prog.add_ineq([[-1.0]], [x], [-3.0])  # x >= 3
    prog.add_cost([x], [1.0])
    res = prog.solve()
    assert res.status == "optimal"
    assert abs(res.objective - 3.0) <= 1e-8
    assert abs(res.x[x] - 3.0) <= 1e-8


def test_lp_infeasible():
    prog = ConicProgram()
    x = prog.add_var()
    prog.add_ineq([[1.0]], [x], [0.0])  # x <= 0
    prog.add_ineq([[-1.0]], [x], [-1.0])  # x >= 1
    assert prog.solve().status == "infeasible"


def test_lp_unbounded():
    prog = ConicProgram()
    x = prog.add_var()
    prog.add_cost([x], [1.0])
    assert prog.solve().status == "unbounded"


def test_empty_program_reports_constant():
    prog = ConicProgram()
    prog.add_cost_const(7.5)
    res = prog.solve()
    assert res.status == "optimal"
    assert res.objective == 7.5


def test_undeclared_variable_rejected():
    prog = ConicProgram()
    prog.add_var()
    with pytest.raises(IndexError):
        prog.add_ineq([[1.0]], [5], [0.0])


def test_nonneg_shortcut_matches_identity_rows():
    def build(shortcut: bool) -> ConicProgram:
        prog = ConicProgram()
        x = prog.add_vars(3)
        prog.add_eq(np.ones((1, 3)), x, [1.0])  # simplex
        if shortcut:
            prog.add_nonneg(x)
        else:
            prog.add_ineq(-np.eye(3), x, np.zeros(3))
        prog.add_cost(x, [3.0, 1.0, 2.0])
        return prog

    a, b = build(True).solve(), build(False).solve()
    assert a.status == b.status == "optimal"
    assert abs(a.objective - 1.0) <= 1e-8
    assert np.allclose(a.x, b.x, atol=1e-8)
    prog = ConicProgram()
    prog.add_nonneg([])  # no rows, still solvable
    assert prog.solve().status == "optimal"
    with pytest.raises(IndexError):
        prog.add_nonneg([4])


def test_soc_norm():
    # min t  s.t.  ||(3, 4)|| <= t
    prog = ConicProgram()
    t = prog.add_var()
    u = prog.add_vars(2)
    prog.add_eq(np.eye(2), u, [3.0, 4.0])
    prog.add_soc(Affine.scalar([t], [1.0]), Affine.of_vars(u))
    prog.add_cost([t], [1.0])
    res = prog.solve()
    assert res.status == "optimal"
    assert abs(res.objective - 5.0) <= 1e-6


def test_soc_requires_scalar_epigraph():
    prog = ConicProgram()
    u = prog.add_vars(2)
    with pytest.raises(ValueError):
        prog.add_soc(Affine.of_vars(u), Affine.of_vars(u))


def test_epigraph_l2_sums_segment_lengths():
    # two fixed segments of length 5 and 13; epigraphs add up
    prog = ConicProgram()
    a = prog.add_vars(2)
    b = prog.add_vars(2)
    prog.add_eq(np.eye(2), a, [3.0, 4.0])
    prog.add_eq(np.eye(2), b, [5.0, 12.0])
    for block in (a, b):
        t = prog.add_epigraph_l2(Affine.of_vars(block))
        prog.add_cost([t], [1.0])
    res = prog.solve()
    assert res.status == "optimal"
    assert abs(res.objective - 18.0) <= 1e-6


def test_quad_over_lin_value():
    prog = ConicProgram()
    u = prog.add_vars(2)
    w = prog.add_var()
    prog.add_eq(np.eye(2), u, [1.0, 1.0])
    prog.add_eq([[1.0]], [w], [2.0])
    t = prog.add_quad_over_lin(Affine.of_vars(u), Affine.of_vars([w]))
    prog.add_cost([t], [1.0])
    res = prog.solve()
    assert res.status == "optimal"
    assert abs(res.objective - 1.0) <= 1e-6  # (1 + 1) / 2


def test_quad_over_lin_zero_numerator():
    prog = ConicProgram()
    u = prog.add_vars(2)
    w = prog.add_var()
    prog.add_eq(np.eye(2), u, [0.0, 0.0])
    prog.add_eq([[1.0]], [w], [3.0])
    t = prog.add_quad_over_lin(Affine.of_vars(u), Affine.of_vars([w]))
    prog.add_cost([t], [1.0])
    res = prog.solve()
    assert res.status == "optimal"
    assert abs(res.objective) <= 1e-7


@given(st.floats(0.5, 4.0))
@settings(max_examples=20, deadline=None)
def test_quad_over_lin_scaling(alpha):
    """Scaling the numerator by alpha scales the ratio by alpha**2."""

    def ratio(scale):
        prog = ConicProgram()
        u = prog.add_vars(2)
        w = prog.add_var()
        prog.add_eq(np.eye(2), u, [scale * 2.0, scale * 1.0])
        prog.add_eq([[1.0]], [w], [4.0])
        t = prog.add_quad_over_lin(Affine.of_vars(u), Affine.of_vars([w]))
        prog.add_cost([t], [1.0])
        res = prog.solve()
        assert res.status == "optimal"
        return res.objective

    assert abs(ratio(alpha) - alpha**2 * ratio(1.0)) <= 1e-5 * (1 + alpha**2)


def test_solution_satisfies_constraints():
    rng = np.random.default_rng(11)
    prog = ConicProgram()
    x = prog.add_vars(3)
    A = rng.uniform(-1, 1, (4, 3))
    b = rng.uniform(1, 2, 4)
    prog.add_ineq(A, x, b)
    prog.add_ineq(-np.eye(3), x, np.full(3, 2.0))  # x >= -2
    t = prog.add_epigraph_l2(Affine.of(np.eye(3), x, -np.ones(3)))
    prog.add_cost([t], [1.0])
    prog.add_cost(x, [0.1, -0.2, 0.05])
    res = prog.solve()
    assert res.status == "optimal"
    assert np.all(A @ res.x[x] <= b + 1e-6)
    assert np.linalg.norm(res.x[x] - 1.0) <= res.x[t] + 1e-6


def test_lp_backends_agree():
    rng = np.random.default_rng(5)
    prog_spec = []
    A = rng.uniform(-1, 1, (6, 4))
    b = rng.uniform(0.5, 2.0, 6)
    c = rng.uniform(-1, 1, 4)

    def build():
        prog = ConicProgram()
        x = prog.add_vars(4)
        prog.add_ineq(A, x, b)
        prog.add_ineq(-np.eye(4), x, np.full(4, 3.0))
        prog.add_cost(x, c)
        return prog

    hi = build().solve(backend="highs")
    cl = build().solve(backend="clarabel")
    assert hi.status == cl.status == "optimal"
    assert abs(hi.objective - cl.objective) <= 1e-8 * (1 + abs(hi.objective))


def test_highs_refuses_cones():
    prog = ConicProgram()
    t = prog.add_var()
    u = prog.add_vars(2)
    prog.add_soc(Affine.scalar([t], [1.0]), Affine.of_vars(u))
    with pytest.raises(ValueError):
        prog.solve(backend="highs")


def test_feasibility_helper():
    box = (np.vstack([np.eye(2), -np.eye(2)]), np.array([1.0, 1.0, 0.0, 0.0]))
    assert solve_lp_feasibility([box], 2)
    clash = (np.array([[-1.0, 0.0]]), np.array([-2.0]))  # x0 >= 2
    assert not solve_lp_feasibility([box, clash], 2)
