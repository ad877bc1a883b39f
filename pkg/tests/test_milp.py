import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algconn.milp import (
    Constraint,
    LazyCutError,
    Model,
    ModelError,
    constraint_slack,
    dual_bound,
    solve_lp,
    solve_milp,
)


def simple_model(sense="max"):
    m = Model(sense)
    return m


class TestModelValidation:
    def test_bad_sense(self):
        with pytest.raises(ModelError):
            Model("maximize")

    def test_bad_bounds(self):
        m = Model()
        with pytest.raises(ModelError):
            m.add_variable(2.0, 1.0)

    def test_unknown_variable(self):
        m = Model()
        m.add_variable(0, 1)
        with pytest.raises(ModelError):
            m.add_constraint({3: 1.0}, "<=", 1.0)

    def test_bad_row_sense(self):
        m = Model()
        m.add_variable(0, 1)
        with pytest.raises(ModelError):
            m.add_constraint({0: 1.0}, "=<", 1.0)


class TestSolveLp:
    def test_single_bound(self):
        m = Model("max")
        x = m.add_variable(0.0, math.inf)
        m.add_constraint({x: 1.0}, "<=", 5.0)
        m.set_objective({x: 1.0})
        sol = solve_lp(m)
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(5.0)

    def test_infeasible(self):
        m = Model("max")
        x = m.add_variable(0.0, math.inf)
        m.add_constraint({x: 1.0}, ">=", 1.0)
        m.add_constraint({x: 1.0}, "<=", 0.0)
        m.set_objective({x: 1.0})
        assert solve_lp(m).status == "infeasible"

    def test_two_vars(self):
        m = Model("max")
        x = m.add_variable(0.0, math.inf)
        y = m.add_variable(0.0, math.inf)
        m.add_constraint({x: 1.0, y: 1.0}, "<=", 1.0)
        m.set_objective({x: 1.0, y: 1.0})
        assert solve_lp(m).objective == pytest.approx(1.0)

    def test_unbounded(self):
        m = Model("max")
        x = m.add_variable(0.0, math.inf)
        m.set_objective({x: 1.0})
        assert solve_lp(m).status == "unbounded"

    def test_minimization(self):
        m = Model("min")
        x = m.add_variable(-2.0, 7.0)
        m.set_objective({x: 3.0})
        sol = solve_lp(m)
        assert sol.objective == pytest.approx(-6.0)

    def test_equality_rows(self):
        m = Model("max")
        x = m.add_variable(0.0, 10.0)
        y = m.add_variable(0.0, 10.0)
        m.add_constraint({x: 1.0, y: 2.0}, "=", 8.0)
        m.set_objective({x: 1.0, y: 1.0})
        sol = solve_lp(m)
        assert sol.objective == pytest.approx(8.0)  # x=8, y=0
        assert sol.values[0] == pytest.approx(8.0, abs=1e-8)

    def test_negative_lower_bounds(self):
        m = Model("min")
        x = m.add_variable(-math.inf, 0.0)
        y = m.add_variable(-5.0, 5.0)
        m.add_constraint({x: 1.0, y: 1.0}, ">=", -6.0)
        m.set_objective({x: 2.0, y: 1.0})
        sol = solve_lp(m)
        assert sol.status == "optimal"
        # pushing y to +5 lets x reach -11; net rate -2 + 1 per unit of y
        assert sol.objective == pytest.approx(-17.0)

    def test_beale_degenerate_cycle_regression(self):
        # classic cycling instance for textbook pivoting; must terminate
        m = Model("min")
        x1 = m.add_variable(0.0, math.inf)
        x2 = m.add_variable(0.0, math.inf)
        x3 = m.add_variable(0.0, math.inf)
        x4 = m.add_variable(0.0, math.inf)
        m.add_constraint({x1: 0.25, x2: -60.0, x3: -1 / 25, x4: 9.0}, "<=", 0.0)
        m.add_constraint({x1: 0.5, x2: -90.0, x3: -1 / 50, x4: 3.0}, "<=", 0.0)
        m.add_constraint({x3: 1.0}, "<=", 1.0)
        m.set_objective({x1: -0.75, x2: 150.0, x3: -0.02, x4: 6.0})
        sol = solve_lp(m)
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(-0.05, abs=1e-9)

    def test_kuhn_degenerate_regression(self):
        m = Model("min")
        v = [m.add_variable(0.0, math.inf) for _ in range(4)]
        m.add_constraint({v[0]: -2.0, v[1]: -9.0, v[2]: 1.0, v[3]: 9.0}, "<=", 0.0)
        m.add_constraint({v[0]: 1 / 3, v[1]: 1.0, v[2]: -1 / 3, v[3]: -2.0}, "<=", 0.0)
        m.add_constraint({v[0]: 2.0, v[1]: 3.0, v[2]: -1.0, v[3]: -12.0}, "<=", 2.0)
        m.set_objective({v[0]: -2.0, v[1]: -3.0, v[2]: 1.0, v[3]: 12.0})
        sol = solve_lp(m)
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(-2.0, abs=1e-8)


def _enumerate_vertices(n_vars, rows, senses, rhs, lo, hi, cvec):
    """Independent LP oracle: scan all basic points (intersections of n active
    hyperplanes from rows and bounds), keep the feasible ones, take the max."""
    planes = []
    for row, sense, b in zip(rows, senses, rhs):
        planes.append((np.array(row, float), float(b)))
    for i in range(n_vars):
        e = np.zeros(n_vars)
        e[i] = 1.0
        planes.append((e.copy(), lo[i]))
        planes.append((e.copy(), hi[i]))
    best = None
    for combo in itertools.combinations(range(len(planes)), n_vars):
        A = np.array([planes[k][0] for k in combo])
        b = np.array([planes[k][1] for k in combo])
        if abs(np.linalg.det(A)) < 1e-9:
            continue
        x = np.linalg.solve(A, b)
        ok = all(lo[i] - 1e-9 <= x[i] <= hi[i] + 1e-9 for i in range(n_vars))
        for row, sense, bb in zip(rows, senses, rhs):
            lhs = float(np.dot(row, x))
            if sense == "<=" and lhs > bb + 1e-9:
                ok = False
            if sense == ">=" and lhs < bb - 1e-9:
                ok = False
            if sense == "=" and abs(lhs - bb) > 1e-9:
                ok = False
        if ok:
            val = float(np.dot(cvec, x))
            if best is None or val > best:
                best = val
    return best


@settings(max_examples=60)
@given(st.integers(0, 100000))
def test_lp_matches_vertex_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    m = int(rng.integers(1, 4))
    lo = np.zeros(n)
    hi = rng.integers(1, 4, size=n).astype(float)
    rows = rng.integers(-3, 4, size=(m, n)).astype(float)
    senses = [["<=", ">="][int(rng.integers(0, 2))] for _ in range(m)]
    rhs = rng.integers(-4, 7, size=m).astype(float)
    cvec = rng.integers(-3, 4, size=n).astype(float)

    model = Model("max")
    for i in range(n):
        model.add_variable(lo[i], hi[i])
    for row, sense, b in zip(rows, senses, rhs):
        model.add_constraint({i: row[i] for i in range(n)}, sense, b)
    model.set_objective({i: cvec[i] for i in range(n)})
    sol = solve_lp(model)
    expected = _enumerate_vertices(n, rows, senses, rhs, lo, hi, cvec)
    if expected is None:
        assert sol.status == "infeasible"
    else:
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(expected, abs=1e-7)


def _enumerate_binary(model):
    n = len(model.variables)
    best = None
    sign = 1.0 if model.sense == "max" else -1.0
    for bits in itertools.product(*(range(int(v.lb), int(v.ub) + 1) for v in model.variables)):
        x = np.array(bits, float)
        ok = True
        for con in model.constraints:
            if constraint_slack(con, x) < -1e-9:
                ok = False
                break
        if not ok:
            continue
        val = sign * sum(c * x[i] for i, c in model.objective.items())
        if best is None or val > best:
            best = val
    return None if best is None else (1.0 if model.sense == "max" else -1.0) * best


class TestSolveMilp:
    def test_two_binaries(self):
        m = Model("max")
        a = m.add_variable(0, 1, integer=True)
        b = m.add_variable(0, 1, integer=True)
        m.add_constraint({a: 1.0, b: 1.0}, "<=", 1.5)
        m.set_objective({a: 1.0, b: 1.0})
        sol = solve_milp(m)
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(1.0)

    def test_knapsack(self):
        m = Model("max")
        a = m.add_variable(0, 1, integer=True)
        b = m.add_variable(0, 1, integer=True)
        m.add_constraint({a: 2.0, b: 2.0}, "<=", 3.0)
        m.set_objective({a: 3.0, b: 2.0})
        sol = solve_milp(m)
        assert sol.objective == pytest.approx(3.0)
        assert sol.values[0] == pytest.approx(1.0)

    def test_knapsack_with_rejecting_oracle(self):
        # an oracle cutting off (a=1, b=0) flips the optimum to (a=0, b=1);
        # expected objective 2 by enumerating the four binary points by hand
        def oracle(x):
            if round(x[0]) == 1 and round(x[1]) == 0:
                return [Constraint({0: 1.0, 1: -1.0}, "<=", 0.0, name="flip")]
            return []

        m = Model("max")
        a = m.add_variable(0, 1, integer=True)
        b = m.add_variable(0, 1, integer=True)
        m.add_constraint({a: 2.0, b: 2.0}, "<=", 3.0)
        m.set_objective({a: 3.0, b: 2.0})
        sol = solve_milp(m, oracle)
        assert sol.objective == pytest.approx(2.0)
        assert dual_bound(sol) == pytest.approx(2.0, abs=1e-6)
        assert sol.cut_count == 1
        # the added cut must hold at the final incumbent
        for con in m.constraints:
            assert constraint_slack(con, sol.values) >= -1e-9

    def test_oracle_bad_cut_rejected(self):
        def oracle(x):
            return [Constraint({0: 1.0}, "<=", 5.0, name="slack_cut")]

        m = Model("max")
        m.add_variable(0, 1, integer=True)
        m.set_objective({0: 1.0})
        with pytest.raises(LazyCutError):
            solve_milp(m, oracle)

    def test_integral_root(self):
        m = Model("max")
        x = m.add_variable(0, 4, integer=True)
        m.add_constraint({x: 1.0}, "<=", 3.0)
        m.set_objective({x: 1.0})
        sol = solve_milp(m)
        assert sol.objective == pytest.approx(3.0)
        assert dual_bound(sol) == pytest.approx(3.0, abs=1e-6)
        assert sol.node_count == 1

    def test_infeasible(self):
        m = Model("max")
        x = m.add_variable(0, 1, integer=True)
        m.add_constraint({x: 1.0}, ">=", 2.0)
        m.set_objective({x: 1.0})
        assert solve_milp(m).status == "infeasible"

    def test_unbounded(self):
        m = Model("max")
        x = m.add_variable(0, math.inf, integer=True)
        m.set_objective({x: 1.0})
        assert solve_milp(m).status == "unbounded"

    def test_general_integers(self):
        m = Model("min")
        x = m.add_variable(0, 10, integer=True)
        y = m.add_variable(0, 10, integer=True)
        m.add_constraint({x: 3.0, y: 2.0}, ">=", 11.0)
        m.set_objective({x: 2.0, y: 1.5})
        sol = solve_milp(m)
        # brute check over the 121 lattice points gives 7.5 at (3, 1)
        assert sol.objective == pytest.approx(7.5)

    def test_node_limit(self):
        rng = np.random.default_rng(5)
        m = Model("max")
        n = 14
        for _ in range(n):
            m.add_variable(0, 1, integer=True)
        w = rng.uniform(1, 10, size=n)
        c = rng.uniform(1, 10, size=n)
        m.add_constraint({i: w[i] for i in range(n)}, "<=", float(w.sum() / 2))
        m.set_objective({i: c[i] for i in range(n)})
        sol = solve_milp(m, node_limit=2)
        assert sol.status in ("limit", "optimal")
        if sol.status == "limit":
            assert sol.bound is not None

    def test_bound_trace_monotone(self):
        rng = np.random.default_rng(11)
        m = Model("max")
        n = 10
        for _ in range(n):
            m.add_variable(0, 1, integer=True)
        w = rng.uniform(1, 10, size=n)
        c = rng.uniform(1, 10, size=n)
        m.add_constraint({i: w[i] for i in range(n)}, "<=", float(w.sum() / 3))
        m.set_objective({i: c[i] for i in range(n)})
        sol = solve_milp(m)
        finite = [b for b in sol.bound_trace if math.isfinite(b)]
        assert all(a >= b - 1e-9 for a, b in zip(finite, finite[1:]))


@settings(max_examples=60)
@given(st.integers(0, 100000))
def test_milp_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    m = int(rng.integers(1, 5))
    model = Model("max" if rng.integers(0, 2) else "min")
    for _ in range(n):
        model.add_variable(0, 1, integer=True)
    for _ in range(m):
        row = rng.integers(-4, 5, size=n).astype(float)
        sense = ["<=", ">=", "="][int(rng.integers(0, 3))]
        b = float(rng.integers(-3, 7))
        model.add_constraint({i: row[i] for i in range(n) if row[i]}, sense, b)
    obj = rng.integers(-5, 6, size=n).astype(float)
    model.set_objective({i: obj[i] for i in range(n)})

    expected = _enumerate_binary(model)
    sol = solve_milp(model)
    if expected is None:
        assert sol.status == "infeasible"
    else:
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(expected, abs=1e-6)
        for con in model.constraints:
            assert constraint_slack(con, sol.values) >= -1e-6
