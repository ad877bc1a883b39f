"""Ranking-based maximum-cost heuristic and simple spanning-tree baselines."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .formulations import (
    PriorityOrders,
    dclbf_model,
    degree_capped_model,
    restrict_mch,
)
from .graph import EdgeSelection, is_spanning_tree, weighted_laplacian
from .linalg import algebraic_connectivity
from .oa import OAConfig, run_algorithm1


@dataclass(frozen=True)
class HeuristicParams:
    """Degree parameter (k for center-degree mode, d for capped mode) and the
    candidate budgets: h1 centers tried, h2 attachment edges kept per leaf."""

    h1: int
    h2: int
    k: int | None = None
    d: int | None = None

    def __post_init__(self):
        if (self.k is None) == (self.d is None):
            raise ValueError("exactly one of k and d must be given")
        if self.h1 < 1 or self.h2 < 1:
            raise ValueError("h1 and h2 must be at least 1")


@dataclass(frozen=True)
class CandidateOutcome:
    center: int
    gamma: float | None
    status: str
    wall_time: float


@dataclass
class HeuristicResult:
    tree: EdgeSelection
    gamma_h: float
    per_candidate: tuple
    wall_time: float


def ranking(g, slots, h1):
    """Priority orders for center choice and leaf attachment.

    Nodes are ranked by the sum of their `slots` heaviest incident weights.
    For each of the h1 best centers, the Fiedler vector v of the full weighted
    star rooted there scores every potential attachment: leaf u (a node ranked
    below the center's first `slots` neighbors) prefers nodes l with larger
    w[u,l] * (v_u - v_l)^2. All ties break toward the lower node index.
    """
    n = g.n
    if not (1 <= slots <= n - 1):
        raise ValueError(f"slots={slots} out of range for n={n}")
    if not (1 <= h1 <= n):
        raise ValueError(f"h1={h1} out of range for n={n}")
    W = g.adjacency()
    scores = []
    for i in range(1, n + 1):
        row = np.sort(W[i - 1])[::-1]
        scores.append(float(row[:slots].sum()))
    center_order = tuple(sorted(range(1, n + 1), key=lambda i: (-scores[i - 1], i)))

    leaf_edge_order = {}
    for c in center_order[:h1]:
        neighbors = sorted(
            (j for j in range(1, n + 1) if j != c),
            key=lambda j: (-W[c - 1, j - 1], j),
        )
        star = np.zeros((n, n))
        for j in neighbors:
            w = W[c - 1, j - 1]
            if w > 0:
                star[c - 1, c - 1] += w
                star[j - 1, j - 1] += w
                star[c - 1, j - 1] -= w
                star[j - 1, c - 1] -= w
        _, v = algebraic_connectivity(star)
        rows = {}
        for u in neighbors[slots:]:
            def score(l, u=u):
                return W[u - 1, l - 1] * (v[u - 1] - v[l - 1]) ** 2
            ranked = sorted(
                (l for l in range(1, n + 1) if l != c),
                key=lambda l: (-score(l), l),
            )
            rows[u] = tuple(ranked)
        leaf_edge_order[c] = rows
    return PriorityOrders(center_order, leaf_edge_order, slots)


def _solve_candidates(g, build_model, params, cfg, slots):
    cfg = OAConfig(
        sizes=(g.n,),
        eps_psd=cfg.eps_psd,
        eps_opt=cfg.eps_opt,
        soc_mode=cfg.soc_mode,
        kelley_init=cfg.kelley_init,
        max_rounds=cfg.max_rounds,
        time_limit=cfg.time_limit,
        milp_rel_gap=cfg.milp_rel_gap,
        record_cuts=cfg.record_cuts,
    )
    orders = ranking(g, slots, params.h1)
    outcomes = []
    best = None
    t0 = time.perf_counter()
    for center in orders.center_order[: params.h1]:
        dm = restrict_mch(build_model(), orders, center, params.h2)
        tc = time.perf_counter()
        res = run_algorithm1(g, dm, cfg)
        took = time.perf_counter() - tc
        if res.tree is None:
            outcomes.append(CandidateOutcome(center, None, res.status, took))
            continue
        outcomes.append(CandidateOutcome(center, res.lower_bound, res.status, took))
        if best is None or res.lower_bound > best.lower_bound + 1e-12:
            best = res
    if best is None:
        raise ValueError("no candidate center produced a feasible tree")
    return HeuristicResult(
        best.tree, best.lower_bound, tuple(outcomes), time.perf_counter() - t0
    )


def mch(g, params, cfg=None):
    """Maximum-cost heuristic for the designated-center problem.

    Solves, for each of the h1 best-ranked centers, the exact restricted
    model with that center pinned and leaf attachments pruned to their h2
    best choices; returns the best tree found across candidates.
    """
    if params.k is None:
        raise ValueError("mch requires the center-degree parameter k")
    n = g.n
    if not (1 <= params.k <= n - 1):
        raise ValueError(f"k={params.k} out of range for n={n}")
    if cfg is None:
        cfg = OAConfig(sizes=(n,))
    slots = n - params.k
    return _solve_candidates(g, lambda: dclbf_model(g, params.k), params, cfg, slots)


def mch_degree_capped(g, params, cfg=None):
    """Maximum-cost heuristic under a uniform degree cap d."""
    if params.d is None:
        raise ValueError("capped mode requires the degree cap d")
    n = g.n
    if not (2 <= params.d <= n - 1):
        raise ValueError(f"d={params.d} out of range for n={n}")
    if cfg is None:
        cfg = OAConfig(sizes=(n,))
    return _solve_candidates(
        g, lambda: degree_capped_model(g, params.d), params, cfg, params.d
    )


def _greedy_tree(g, maximize):
    parent = list(range(g.n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    order = sorted(g.edges, key=lambda e: (-e[2] if maximize else e[2], e[:2]))
    chosen = []
    for i, j, _ in order:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
            chosen.append((i, j))
    if len(chosen) != g.n - 1:
        raise ValueError("graph is not connected")
    return EdgeSelection.from_edges(g, chosen)


def _as_result(g, tree, t0):
    lam2, _ = algebraic_connectivity(weighted_laplacian(g, tree))
    return HeuristicResult(tree, lam2, (), time.perf_counter() - t0)


def max_weight_spanning_tree(g):
    """Greedy maximum-total-weight spanning tree, with its connectivity."""
    t0 = time.perf_counter()
    return _as_result(g, _greedy_tree(g, maximize=True), t0)


def min_weight_spanning_tree(g):
    """Greedy minimum-total-weight spanning tree, with its connectivity."""
    t0 = time.perf_counter()
    return _as_result(g, _greedy_tree(g, maximize=False), t0)


def best_star(g):
    """The star with the highest connectivity over all feasible hubs."""
    t0 = time.perf_counter()
    outcomes = []
    best = None
    for hub in range(1, g.n + 1):
        if not all(g.has_edge(hub, j) for j in range(1, g.n + 1) if j != hub):
            continue
        tree = EdgeSelection.from_edges(
            g, [(hub, j) for j in range(1, g.n + 1) if j != hub]
        )
        lam2, _ = algebraic_connectivity(weighted_laplacian(g, tree))
        outcomes.append(CandidateOutcome(hub, lam2, "evaluated", 0.0))
        if best is None or lam2 > best[1] + 1e-15:
            best = (tree, lam2)
    if best is None:
        raise ValueError("no node is adjacent to every other node")
    return HeuristicResult(best[0], best[1], tuple(outcomes), time.perf_counter() - t0)


def greedy_max_weight_path(g):
    """Hamiltonian path grown greedily from the heaviest edge (chain baseline)."""
    heaviest = max(g.edges, key=lambda e: (e[2], (-e[0], -e[1])))
    path = [heaviest[0], heaviest[1]]
    used = set(path)
    while len(path) < g.n:
        candidates = []
        for endpoint, insert_front in ((path[0], True), (path[-1], False)):
            for j in range(1, g.n + 1):
                if j in used or not g.has_edge(endpoint, j):
                    continue
                candidates.append((g.weight(endpoint, j), -j, insert_front, j))
        if not candidates:
            raise ValueError("graph has no greedy Hamiltonian path extension")
        _, _, front, j = max(candidates)
        if front:
            path.insert(0, j)
        else:
            path.append(j)
        used.add(j)
    edges = list(zip(path, path[1:]))
    tree = EdgeSelection.from_edges(g, edges)
    assert is_spanning_tree(g, tree)
    return tree
