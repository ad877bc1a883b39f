"""Steady-state estimation-error covariance of tree networks.

For a connected measurement network with a grounded reference node, the
grounded (Dirichlet) Laplacian L is positive definite and the steady-state
error covariance solves Q = P L P, whose unique SPD solution is
P = Q^{1/2} (Q^{1/2} L Q^{1/2})^{-1/2} Q^{1/2}. Its spectral norm is bounded
below by sqrt(|L^-1| / |Q^-1|), which ties estimation accuracy to the
spectrum of the chosen topology.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import is_spanning_tree, random_spanning_tree, weighted_laplacian
from .heuristics import (
    best_star,
    greedy_max_weight_path,
    max_weight_spanning_tree,
    min_weight_spanning_tree,
)
from .linalg import algebraic_connectivity, check_symmetric, psd_function, spectral_norm

RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class NoiseModel:
    """Process-noise covariance, per-edge measurement weights, and reference.

    `Q` defaults to the identity; `edge_weights` maps (i, j) to a measurement
    weight and defaults to the graph weights; `reference` is the node carrying
    the absolute measurement of weight `c_ref`.
    """

    Q: np.ndarray | None = None
    edge_weights: dict | None = None
    reference: int = 1
    c_ref: float = 1.0

    def materialize(self, g):
        Q = np.eye(g.n) if self.Q is None else check_symmetric(self.Q)
        if Q.shape != (g.n, g.n):
            raise ValueError("process-noise covariance has the wrong shape")
        if np.linalg.eigvalsh(Q).min() <= 0:
            raise ValueError("process-noise covariance must be positive definite")
        if self.edge_weights is None:
            weights = {(i, j): w for i, j, w in g.edges}
        else:
            weights = {tuple(sorted(k)): float(v) for k, v in self.edge_weights.items()}
        if not (1 <= self.reference <= g.n):
            raise ValueError(f"reference node {self.reference} out of range")
        return Q, weights, self.reference, float(self.c_ref)


@dataclass(frozen=True)
class CovarianceRow:
    label: str
    lambda2: float
    p_norm: float
    lower_bound: float
    residual: float


@dataclass(frozen=True)
class CovarianceReport:
    rows: tuple


def dirichlet_laplacian(g, tree, noise=None):
    """Grounded Laplacian of a spanning tree: measurement-weighted Laplacian
    plus the reference node's absolute weight on its diagonal.

    Nonsingular exactly when the tree is connected and c_ref > 0; violations
    are rejected.
    """
    noise = noise or NoiseModel()
    _, weights, ref, c_ref = noise.materialize(g)
    if c_ref <= 0:
        raise ValueError("reference weight must be positive (matrix would be singular)")
    if not is_spanning_tree(g, tree):
        raise ValueError("selection is not a spanning tree (matrix would be singular)")
    n = g.n
    L = np.zeros((n, n))
    for (i, j, _), b in zip(g.edges, tree.bits):
        if b:
            c = weights[(i, j)]
            L[i - 1, i - 1] += c
            L[j - 1, j - 1] += c
            L[i - 1, j - 1] -= c
            L[j - 1, i - 1] -= c
    L[ref - 1, ref - 1] += c_ref
    return L


def steady_state_covariance(L, Q):
    """Unique SPD solution P of Q = P L P, with a residual certificate."""
    L = check_symmetric(L)
    Q = check_symmetric(Q)
    Qh = psd_function(Q, "sqrt")
    middle = check_symmetric(Qh @ L @ Qh)
    P = Qh @ psd_function(middle, "inv_sqrt") @ Qh
    P = 0.5 * (P + P.T)
    residual = spectral_norm(Q - P @ L @ P)
    if residual > RESIDUAL_TOL:
        raise ArithmeticError(f"Riccati residual {residual:.2e} exceeds tolerance")
    return P


def covariance_lower_bound(L, Q):
    """sqrt(|L^-1| / |Q^-1|), a floor on the covariance spectral norm."""
    return float(
        np.sqrt(spectral_norm(psd_function(L, "inverse"))
                / spectral_norm(psd_function(Q, "inverse")))
    )


def compare_topologies(g, labeled_trees, noise=None):
    """Covariance report rows for each labeled tree, sorted by |P| ascending."""
    noise = noise or NoiseModel()
    Q, _, _, _ = noise.materialize(g)
    rows = []
    for label, tree in labeled_trees:
        L_tree = weighted_laplacian(g, tree)
        lam2, _ = algebraic_connectivity(L_tree)
        L = dirichlet_laplacian(g, tree, noise)
        P = steady_state_covariance(L, Q)
        p_norm = spectral_norm(P)
        bound = covariance_lower_bound(L, Q)
        residual = spectral_norm(Q - P @ L @ P)
        if p_norm < bound - RESIDUAL_TOL:
            raise ArithmeticError("covariance norm fell below its certified bound")
        rows.append(CovarianceRow(str(label), lam2, p_norm, bound, residual))
    rows.sort(key=lambda r: r.p_norm)
    return CovarianceReport(tuple(rows))


def default_candidates(g, optimal_tree=None, n_random=20, seed=0):
    """Standard comparison set: optimum (when given), star, chain, extreme
    weight trees, and seeded random trees."""
    out = []
    if optimal_tree is not None:
        out.append(("optimal", optimal_tree))
    out.append(("best_star", best_star(g).tree))
    out.append(("chain", greedy_max_weight_path(g)))
    out.append(("max_weight_tree", max_weight_spanning_tree(g).tree))
    out.append(("min_weight_tree", min_weight_spanning_tree(g).tree))
    rng = np.random.default_rng(seed)
    for k in range(n_random):
        out.append((f"random_{k:02d}", random_spanning_tree(g, rng)))
    return out
