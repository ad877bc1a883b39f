"""Exhaustive spanning-tree oracle with batched eigenvalue evaluation."""

from __future__ import annotations

import itertools

import numpy as np

from .graph import (
    ORACLE_NODE_LIMIT,
    EdgeSelection,
    _prufer_to_edges,
    enumerate_spanning_trees,
    is_complete,
    weighted_laplacian,
)
from .linalg import algebraic_connectivity, batch_eigenvalues


def _laplacian_stack(edge_array, weights, n):
    """Laplacians for a (B, n-1, 2) block of 1-indexed tree edge lists."""
    B = edge_array.shape[0]
    L = np.zeros((B, n, n))
    rows = np.arange(B)
    for t in range(n - 1):
        ii = edge_array[:, t, 0] - 1
        jj = edge_array[:, t, 1] - 1
        w = weights[ii, jj]
        L[rows, ii, ii] += w
        L[rows, jj, jj] += w
        L[rows, ii, jj] -= w
        L[rows, jj, ii] -= w
    return L


def brute_force_optimum(g, node_limit=ORACLE_NODE_LIMIT, batch=65536):
    """Spanning tree of maximum algebraic connectivity, by full enumeration.

    Complete graphs are swept as Prufer-sequence blocks whose spectra are
    computed with the batched Jacobi kernel; the first tree attaining the
    maximum (in enumeration order) wins ties. Returns (tree, connectivity).
    """
    if g.n > node_limit:
        raise ValueError(
            f"refusing exhaustive search for n={g.n} > limit {node_limit}"
        )
    if not is_complete(g):
        best, best_val = None, -np.inf
        for x in enumerate_spanning_trees(g, node_limit):
            lam2, _ = algebraic_connectivity(weighted_laplacian(g, x))
            if lam2 > best_val + 1e-15:
                best, best_val = x, lam2
        return best, float(best_val)

    n = g.n
    weights = g.adjacency()
    best_val = -np.inf
    best_seq = None
    block = []
    offset = 0

    def flush(block, offset, best_val, best_seq):
        arr = np.array(
            [_prufer_to_edges(seq, n) for seq in block], dtype=np.int64
        )
        lam2 = batch_eigenvalues(_laplacian_stack(arr, weights, n))[:, 1]
        k = int(np.argmax(lam2))
        if lam2[k] > best_val:
            return float(lam2[k]), block[k]
        return best_val, best_seq

    for seq in itertools.product(range(1, n + 1), repeat=max(n - 2, 0)):
        block.append(seq)
        if len(block) == batch:
            best_val, best_seq = flush(block, offset, best_val, best_seq)
            offset += len(block)
            block = []
    if block:
        best_val, best_seq = flush(block, offset, best_val, best_seq)

    tree = EdgeSelection.from_edges(g, _prufer_to_edges(best_seq, n))
    lam2, _ = algebraic_connectivity(weighted_laplacian(g, tree))
    return tree, float(lam2)
