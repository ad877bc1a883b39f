"""Builders for the connectivity-design MILP models and the tree oracle.

Every model maximizes a scalar gamma that is tied to an edge selection x
through a lifted symmetric matrix W = L(x) - gamma * (I - J/n): equality rows
define each W entry, so any linear inequality in W translates into one in
(x, gamma). The PSD requirement on W is intentionally absent; the cutting
plane layer supplies it. Tree membership is encoded as "exactly n-1 edges"
plus lazy connectivity cuts emitted by `spanning_tree_oracle`.

Variable layout convention: the x variables occupy indices 0..|E|-1 in graph
edge order, gamma follows, then the W diagonal, the W off-diagonal entries in
lexicographic pair order, and finally any center-marker y variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .graph import EdgeSelection, connected_components, cutset, weighted_laplacian
from .linalg import algebraic_connectivity
from .milp import Constraint, Model


@dataclass
class DesignModel:
    """A Model plus maps from model columns back to design quantities."""

    graph: object
    model: Model
    x_map: dict
    gamma_index: int
    w_map: dict
    y_map: dict | None
    gamma_cap: float
    q: int

    def copy(self):
        return DesignModel(
            self.graph,
            self.model.copy(),
            dict(self.x_map),
            self.gamma_index,
            dict(self.w_map),
            dict(self.y_map) if self.y_map is not None else None,
            self.gamma_cap,
            self.q,
        )


@dataclass(frozen=True)
class PriorityOrders:
    """Center ranking and per-(center, leaf) attachment rankings.

    `center_order` is a permutation of the nodes; `leaf_edge_order[c][u]`
    ranks the attachment candidates of leaf u when c is the center; `slots`
    is the number of direct-neighbor slots the rankings were built with.
    """

    center_order: tuple
    leaf_edge_order: dict
    slots: int


def full_graph_connectivity(g):
    """Algebraic connectivity with every edge selected; valid cap for gamma."""
    x = EdgeSelection(g, (1,) * g.edge_count)
    lam2, _ = algebraic_connectivity(weighted_laplacian(g, x))
    return lam2


def base_relaxed_model(g, q=None, gamma_cap=None, tree=True, trace_row=False):
    """MILP skeleton: maximize gamma subject to the W-linking equalities.

    `q` caps the number of selected edges (default n-1); with `tree` the
    exact n-1 cardinality row is added so that lazy connectivity cuts
    complete the spanning-tree encoding. `gamma_cap` defaults to the
    connectivity of the full graph, an upper bound for every subgraph.
    `trace_row` adds an optional bound on the trace of W that is valid for
    all near-optimal points (it assumes gamma at least the connectivity of a
    star); it is off by default.
    """
    n = g.n
    if q is None:
        q = n - 1
    if gamma_cap is None:
        gamma_cap = full_graph_connectivity(g)
    if gamma_cap <= 0:
        raise ValueError(f"gamma_cap must be positive, got {gamma_cap}")

    model = Model("max")
    x_map = {}
    for i, j, w in g.edges:
        x_map[(i, j)] = model.add_variable(0.0, 1.0, integer=True, name=f"x_{i}_{j}")
    gamma_index = model.add_variable(0.0, gamma_cap, name="gamma")
    w_map = {}
    strength = [0.0] * (n + 1)
    for i, j, w in g.edges:
        strength[i] += w
        strength[j] += w
    for i in range(1, n + 1):
        w_map[(i, i)] = model.add_variable(
            -gamma_cap * (n - 1) / n, strength[i], name=f"W_{i}_{i}"
        )
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            if g.has_edge(i, j):
                lo, hi = -g.weight(i, j), gamma_cap / n
            else:
                lo, hi = 0.0, gamma_cap / n
            w_map[(i, j)] = model.add_variable(lo, hi, name=f"W_{i}_{j}")
    model.set_objective({gamma_index: 1.0})

    for i in range(1, n + 1):
        coeffs = {w_map[(i, i)]: 1.0, gamma_index: (n - 1) / n}
        for i2, j2, w in g.edges:
            if i2 == i or j2 == i:
                coeffs[x_map[(i2, j2)]] = -w
        model.add_constraint(coeffs, "=", 0.0, name=f"diag_{i}")
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            coeffs = {w_map[(i, j)]: 1.0, gamma_index: -1.0 / n}
            if g.has_edge(i, j):
                coeffs[x_map[(i, j)]] = g.weight(i, j)
            model.add_constraint(coeffs, "=", 0.0, name=f"offdiag_{i}_{j}")

    model.add_constraint({v: 1.0 for v in x_map.values()}, "<=", float(q), name="budget")
    if tree:
        model.add_constraint(
            {v: 1.0 for v in x_map.values()}, "=", float(n - 1), name="tree_cardinality"
        )
    if trace_row:
        # trace(W) = 2 * sum of selected weights - gamma (n-1); bounded using a
        # star's connectivity as a floor on gamma, so this is an optimality cut
        hub = 1
        if all(g.has_edge(hub, j) for j in range(2, n + 1)):
            star = EdgeSelection.from_edges(g, [(hub, j) for j in range(2, n + 1)])
            gamma_hat, _ = algebraic_connectivity(weighted_laplacian(g, star))
        else:
            gamma_hat = 0.0
        total = 2.0 * sum(w for _, _, w in g.edges)
        coeffs = {w_map[(i, i)]: 1.0 for i in range(1, n + 1)}
        model.add_constraint(coeffs, "<=", total - gamma_hat * (n - 1), name="trace_cap")

    return DesignModel(g, model, x_map, gamma_index, w_map, None, gamma_cap, q)


def selection_from_values(g, x_map, values):
    """Round a model point's x block into an edge selection."""
    bits = [0] * g.edge_count
    for (i, j), var in x_map.items():
        bits[g.edge_position(i, j)] = int(round(values[var]))
    return EdgeSelection(g, tuple(bits))


def spanning_tree_oracle(g, x_map=None):
    """Lazy oracle separating disconnected integral candidates.

    For every connected component except the largest (size ties broken toward
    the component with the smallest minimum node, which is kept), returns the
    cut that at least one selected edge must cross that component's boundary.
    Every spanning tree satisfies these cuts.
    """
    if x_map is None:
        x_map = {(i, j): pos for pos, (i, j, _) in enumerate(g.edges)}

    def oracle(values):
        x = selection_from_values(g, x_map, values)
        comps = connected_components(g, x)
        if len(comps) == 1:
            return []
        keep = max(comps, key=lambda s: (len(s), min(s)))
        cuts = []
        for comp in comps:
            if comp is keep:
                continue
            crossing = cutset(g, comp).cut_edges
            coeffs = {x_map[e]: 1.0 for e in crossing}
            label = ",".join(str(v) for v in sorted(comp))
            cuts.append(Constraint(coeffs, ">=", 1.0, name=f"conn_{label}"))
        return cuts

    return oracle


def dclbf_model(g, k, gamma_cap=None):
    """Add a single designated center of degree at least n-k to the base model.

    Binary markers y pick exactly one center node; the chosen node's selected
    degree is forced to at least n-k while every node keeps degree >= 1.
    """
    n = g.n
    if not (1 <= k <= n - 1):
        raise ValueError(f"degree parameter k={k} out of range for n={n}")
    dm = base_relaxed_model(g, None, gamma_cap)
    model = dm.model
    y_map = {i: model.add_variable(0.0, 1.0, integer=True, name=f"y_{i}") for i in range(1, n + 1)}
    for i in range(1, n + 1):
        coeffs = {y_map[i]: -(n - k - 1)}
        for i2, j2, _ in g.edges:
            if i2 == i or j2 == i:
                coeffs[dm.x_map[(i2, j2)]] = 1.0
        model.add_constraint(coeffs, ">=", 1.0, name=f"center_degree_{i}")
    model.add_constraint({v: 1.0 for v in y_map.values()}, "=", 1.0, name="one_center")
    dm.y_map = y_map
    return dm


def degree_capped_model(g, d, gamma_cap=None):
    """Cap every node's selected degree at d; y markers only tag a center.

    The cap applies uniformly to all nodes. The y binaries are retained so the
    restriction step can pin a center, but they do not enter the degree rows.
    """
    n = g.n
    if not (2 <= d <= n - 1):
        raise ValueError(f"degree cap d={d} out of range for n={n} (no tree exists below 2)")
    dm = base_relaxed_model(g, None, gamma_cap)
    model = dm.model
    for i in range(1, n + 1):
        coeffs = {}
        for i2, j2, _ in g.edges:
            if i2 == i or j2 == i:
                coeffs[dm.x_map[(i2, j2)]] = 1.0
        model.add_constraint(coeffs, "<=", float(d), name=f"degree_cap_{i}")
    y_map = {i: model.add_variable(0.0, 1.0, integer=True, name=f"y_{i}") for i in range(1, n + 1)}
    model.add_constraint({v: 1.0 for v in y_map.values()}, "=", 1.0, name="one_center")
    dm.y_map = y_map
    return dm


def restrict_mch(dm, orders, center, h2):
    """Pin the center and prune each leaf's attachment edges to its top h2.

    Returns a restricted copy: y fixes the given center; every node ranked
    outside the center's direct-neighbor slots may only connect to the center
    or to its h2 best-ranked attachment nodes. The all-edges-to-center star
    therefore stays feasible for any h2 >= 0.
    """
    if dm.y_map is None:
        raise ValueError("restriction requires a model with center markers")
    if center not in orders.leaf_edge_order:
        raise ValueError(f"center {center} is not among the ranked candidates")
    if h2 < 0:
        raise ValueError("h2 must be non-negative")
    out = dm.copy()
    for i, var in out.y_map.items():
        v = out.model.variables[var]
        v.lb = v.ub = 1.0 if i == center else 0.0
    leaf_rows = orders.leaf_edge_order[center]
    forbidden = set()
    for u, row in leaf_rows.items():
        allowed = {center} | set(row[:h2])
        for l in row[h2:]:
            if l == u or l == center:
                continue
            if l in allowed:
                continue
            e = (u, l) if u < l else (l, u)
            if e in out.x_map:
                forbidden.add(e)
    for e in sorted(forbidden):
        var = out.model.variables[out.x_map[e]]
        var.lb = var.ub = 0.0
    return out
