import numpy as np
import pytest

from algconn.formulations import (
    base_relaxed_model,
    dclbf_model,
    degree_capped_model,
    restrict_mch,
    selection_from_values,
    spanning_tree_oracle,
)
from algconn.graph import (
    EdgeSelection,
    complete_graph,
    enumerate_spanning_trees,
    is_spanning_tree,
    weighted_laplacian,
)
from algconn.heuristics import ranking
from algconn.linalg import algebraic_connectivity
from algconn.milp import constraint_slack, solve_milp
from algconn.oa import OAConfig, assignment_for_tree, run_algorithm1


def seeded_complete(n, seed):
    rng = np.random.default_rng(seed)
    return complete_graph(
        n,
        {(i, j): float(rng.uniform(1, 10)) for i in range(1, n) for j in range(i + 1, n + 1)},
    )


class TestBaseModel:
    def test_k3_star_point(self):
        g = complete_graph(3)
        dm = base_relaxed_model(g, gamma_cap=3.0)
        x = EdgeSelection.from_edges(g, [(1, 2), (1, 3)])
        vals = assignment_for_tree(dm, x, 1.0)
        assert vals[dm.w_map[(1, 1)]] == pytest.approx(2 - 2 / 3)
        assert vals[dm.w_map[(1, 2)]] == pytest.approx(-1 + 1 / 3)
        assert vals[dm.w_map[(2, 3)]] == pytest.approx(1 / 3)
        for con in dm.model.constraints:
            assert constraint_slack(con, vals) >= -1e-9

    def test_induced_w_matches_lifted_matrix(self):
        g = seeded_complete(5, 3)
        dm = base_relaxed_model(g)
        for x in list(enumerate_spanning_trees(g))[::17]:
            L = weighted_laplacian(g, x)
            lam2, _ = algebraic_connectivity(L)
            vals = assignment_for_tree(dm, x, lam2)
            n = g.n
            W = L - lam2 * (np.eye(n) - np.ones((n, n)) / n)
            for (i, j), var in dm.w_map.items():
                assert vals[var] == pytest.approx(W[i - 1, j - 1], abs=1e-9)
            assert np.linalg.eigvalsh(W).min() >= -1e-8

    def test_zero_point_feasible(self):
        g = complete_graph(3)
        dm = base_relaxed_model(g, gamma_cap=3.0, tree=False)
        vals = assignment_for_tree(dm, EdgeSelection(g, (0, 0, 0)), 0.0)
        for con in dm.model.constraints:
            assert constraint_slack(con, vals) >= -1e-9

    def test_bad_gamma_cap(self):
        with pytest.raises(ValueError):
            base_relaxed_model(complete_graph(3), gamma_cap=0.0)

    def test_variable_bounds_cover_all_trees(self):
        g = seeded_complete(5, 11)
        dm = base_relaxed_model(g)
        for x in enumerate_spanning_trees(g):
            lam2, _ = algebraic_connectivity(weighted_laplacian(g, x))
            for gamma in (0.0, lam2 / 2, lam2):
                vals = assignment_for_tree(dm, x, gamma)
                for k, v in enumerate(dm.model.variables):
                    assert v.lb - 1e-9 <= vals[k] <= v.ub + 1e-9


class TestSpanningTreeOracle:
    def test_two_pairs(self):
        g = complete_graph(4)
        oracle = spanning_tree_oracle(g)
        x = EdgeSelection.from_edges(g, [(1, 2), (3, 4)])
        cuts = oracle(np.array(x.bits, float))
        assert len(cuts) == 1
        idx = {(i, j): p for p, (i, j, _) in enumerate(g.edges)}
        assert set(cuts[0].coeffs) == {idx[(1, 3)], idx[(1, 4)], idx[(2, 3)], idx[(2, 4)]}
        assert cuts[0].sense == ">=" and cuts[0].rhs == 1.0

    def test_isolated_node(self):
        g = complete_graph(4)
        oracle = spanning_tree_oracle(g)
        x = EdgeSelection.from_edges(g, [(1, 2), (1, 3), (2, 3)])
        cuts = oracle(np.array(x.bits, float))
        assert len(cuts) == 1
        idx = {(i, j): p for p, (i, j, _) in enumerate(g.edges)}
        assert set(cuts[0].coeffs) == {idx[(1, 4)], idx[(2, 4)], idx[(3, 4)]}

    def test_tree_passes(self):
        g = complete_graph(4)
        oracle = spanning_tree_oracle(g)
        x = EdgeSelection.from_edges(g, [(1, 2), (2, 3), (3, 4)])
        assert oracle(np.array(x.bits, float)) == []

    def test_cuts_valid_for_all_trees(self):
        g = seeded_complete(6, 23)
        oracle = spanning_tree_oracle(g)
        rng = np.random.default_rng(0)
        collected = []
        for _ in range(40):
            bits = rng.integers(0, 2, size=g.edge_count)
            collected += oracle(bits.astype(float))
        trees = list(enumerate_spanning_trees(g))
        for cut in collected:
            for t in trees[:: max(1, len(trees) // 100)]:
                assert constraint_slack(cut, np.array(t.bits, float)) >= 0


class TestDclbf:
    def test_k1_forces_star(self):
        g = seeded_complete(5, 7)
        dm = dclbf_model(g, 1)
        res = run_algorithm1(g, dm, OAConfig(sizes=(5,)))
        assert res.status == "converged"
        degs = res.tree.degrees()
        assert max(degs) == 4  # some node is adjacent to everything
        from algconn.heuristics import best_star

        assert res.lower_bound == pytest.approx(best_star(g).gamma_h, abs=1e-8)

    def test_k_max_equals_exact(self):
        g = seeded_complete(5, 19)
        from algconn.oa import solve_exact

        exact = solve_exact(g, OAConfig(sizes=(5,)))
        dres = run_algorithm1(g, dclbf_model(g, 4), OAConfig(sizes=(5,)))
        assert dres.lower_bound == pytest.approx(exact.lower_bound, abs=1e-6)

    def test_one_center_row(self):
        g = complete_graph(5)
        dm = dclbf_model(g, 2)
        sol = solve_milp(dm.model, spanning_tree_oracle(g, dm.x_map))
        y_vals = [round(sol.values[dm.y_map[i]]) for i in range(1, 6)]
        assert sum(y_vals) == 1

    def test_k_out_of_range(self):
        with pytest.raises(ValueError):
            dclbf_model(complete_graph(4), 4)


class TestDegreeCapped:
    def test_cap_is_respected(self):
        g = seeded_complete(5, 31)
        dm = degree_capped_model(g, 2)
        res = run_algorithm1(g, dm, OAConfig(sizes=(5,)))
        assert max(res.tree.degrees()) <= 2

    def test_unit_k4_path_value(self):
        g = complete_graph(4)
        res = run_algorithm1(g, degree_capped_model(g, 2), OAConfig(sizes=(4,)))
        assert res.lower_bound == pytest.approx(2 - np.sqrt(2), abs=1e-9)

    def test_vacuous_cap_matches_exact(self):
        g = seeded_complete(5, 41)
        from algconn.oa import solve_exact

        exact = solve_exact(g, OAConfig(sizes=(5,)))
        capped = run_algorithm1(g, degree_capped_model(g, 4), OAConfig(sizes=(5,)))
        assert capped.lower_bound == pytest.approx(exact.lower_bound, abs=1e-6)

    def test_d_out_of_range(self):
        with pytest.raises(ValueError):
            degree_capped_model(complete_graph(4), 1)


class TestRestrictMch:
    def test_star_stays_feasible(self):
        g = seeded_complete(6, 5)
        orders = ranking(g, slots=3, h1=6)
        dm = dclbf_model(g, 3)
        for center in orders.center_order:
            rdm = restrict_mch(dm, orders, center, h2=1)
            star = EdgeSelection.from_edges(g, [(center, j) for j in range(1, 7) if j != center])
            vals = assignment_for_tree(rdm, star, 0.0)
            vals[rdm.y_map[center]] = 1.0
            for k, v in enumerate(rdm.model.variables):
                assert v.lb - 1e-9 <= vals[k] <= v.ub + 1e-9

    def test_vacuous_h2_matches_parent_with_fixed_center(self):
        g = seeded_complete(5, 13)
        orders = ranking(g, slots=2, h1=5)
        dm = dclbf_model(g, 3)
        center = orders.center_order[0]
        loose = restrict_mch(dm, orders, center, h2=4)
        res = run_algorithm1(g, loose, OAConfig(sizes=(5,)))
        # solve the parent with the same center pinned by hand
        pinned = dm.copy()
        for i, var in pinned.y_map.items():
            v = pinned.model.variables[var]
            v.lb = v.ub = 1.0 if i == center else 0.0
        ref = run_algorithm1(g, pinned, OAConfig(sizes=(5,)))
        assert res.lower_bound == pytest.approx(ref.lower_bound, abs=1e-6)

    def test_restriction_never_improves(self):
        g = seeded_complete(6, 29)
        orders = ranking(g, slots=3, h1=3)
        dm = dclbf_model(g, 3)
        parent = run_algorithm1(g, dm.copy(), OAConfig(sizes=(6,)))
        for center in orders.center_order[:3]:
            rdm = restrict_mch(dm, orders, center, h2=2)
            res = run_algorithm1(g, rdm, OAConfig(sizes=(6,)))
            assert res.lower_bound <= parent.lower_bound + 1e-6

    def test_unknown_center_rejected(self):
        g = seeded_complete(5, 3)
        orders = ranking(g, slots=2, h1=2)
        dm = dclbf_model(g, 3)
        bad = orders.center_order[-1]
        with pytest.raises(ValueError):
            restrict_mch(dm, orders, bad, h2=2)
