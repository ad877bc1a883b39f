"""Weighted graphs, edge selections, Laplacians, and spanning-tree enumeration.

Nodes are 1-indexed everywhere. Edges are canonicalized to (i, j) with i < j
and stored in lexicographic order; selection bit vectors are bound to that
order. All types are immutable and all operations are pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

ORACLE_NODE_LIMIT = 9


class SelectionMismatchError(ValueError):
    """An edge selection does not conform to the graph it is used with."""


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph on nodes 1..n with strictly positive edge weights."""

    n: int
    edges: tuple

    def __post_init__(self):
        n = int(self.n)
        if n < 2:
            raise ValueError(f"need at least 2 nodes, got {n}")
        canonical = []
        seen = set()
        for entry in self.edges:
            i, j, w = entry
            i, j, w = int(i), int(j), float(w)
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if i > j:
                i, j = j, i
            if not (1 <= i < j <= n):
                raise ValueError(f"edge ({i},{j}) out of range for n={n}")
            if w <= 0.0:
                raise ValueError(f"edge ({i},{j}) has non-positive weight {w}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i},{j})")
            seen.add((i, j))
            canonical.append((i, j, w))
        canonical.sort()
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(canonical))
        object.__setattr__(
            self, "_index", {(i, j): k for k, (i, j, _) in enumerate(canonical)}
        )

    @property
    def edge_count(self):
        return len(self.edges)

    def edge_position(self, i, j):
        if i > j:
            i, j = j, i
        return self._index[(i, j)]

    def has_edge(self, i, j):
        if i > j:
            i, j = j, i
        return (i, j) in self._index

    def weight(self, i, j):
        return self.edges[self.edge_position(i, j)][2]

    def adjacency(self):
        """Dense n x n weight matrix, zero on the diagonal and for non-edges."""
        W = np.zeros((self.n, self.n))
        for i, j, w in self.edges:
            W[i - 1, j - 1] = w
            W[j - 1, i - 1] = w
        return W

    def incident(self, i):
        """Edges touching node i as (position, other endpoint, weight)."""
        out = []
        for pos, (a, b, w) in enumerate(self.edges):
            if a == i:
                out.append((pos, b, w))
            elif b == i:
                out.append((pos, a, w))
        return out


@dataclass(frozen=True)
class EdgeSelection:
    """Binary indicator per edge of the parent graph, in the graph's edge order."""

    graph: WeightedGraph
    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError("selection bits must be 0 or 1")
        if len(bits) != self.graph.edge_count:
            raise SelectionMismatchError(
                f"selection has {len(bits)} bits for {self.graph.edge_count} edges"
            )
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_edges(cls, graph, pairs):
        bits = [0] * graph.edge_count
        for i, j in pairs:
            bits[graph.edge_position(i, j)] = 1
        return cls(graph, tuple(bits))

    @property
    def count(self):
        return sum(self.bits)

    def selected_edges(self):
        return tuple(e for e, b in zip(self.graph.edges, self.bits) if b)

    def degrees(self):
        """Unweighted degree of every node under the selected edges."""
        deg = [0] * self.graph.n
        for (i, j, _), b in zip(self.graph.edges, self.bits):
            if b:
                deg[i - 1] += 1
                deg[j - 1] += 1
        return tuple(deg)


@dataclass(frozen=True)
class NodeCut:
    """A node subset together with the parent-graph edges crossing it."""

    inside: frozenset
    cut_edges: tuple


def cutset(g, inside):
    """Edges of g with exactly one endpoint in `inside`."""
    inside = frozenset(int(v) for v in inside)
    if not inside or not inside < set(range(1, g.n + 1)):
        raise ValueError("cut side must be a proper nonempty subset of the nodes")
    crossing = tuple(
        (i, j) for i, j, _ in g.edges if (i in inside) != (j in inside)
    )
    return NodeCut(inside, crossing)


def complete_graph(n, weights=None):
    """Complete graph on n nodes; `weights` maps (i, j) to a weight, default 1."""
    edges = []
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            w = 1.0 if weights is None else weights[(i, j)]
            edges.append((i, j, w))
    return WeightedGraph(n, tuple(edges))


def is_complete(g):
    return g.edge_count == g.n * (g.n - 1) // 2


def _check_conformance(g, x):
    if x.graph is not g and x.graph != g:
        raise SelectionMismatchError("selection belongs to a different graph")


def edge_laplacian(n, i, j, w):
    """Laplacian of the single edge {i, j} with weight w on n nodes."""
    if not (1 <= i < j <= n):
        raise ValueError(f"invalid node pair ({i},{j}) for n={n}")
    if w <= 0.0:
        raise ValueError(f"non-positive weight {w}")
    L = np.zeros((n, n))
    L[i - 1, i - 1] = w
    L[j - 1, j - 1] = w
    L[i - 1, j - 1] = -w
    L[j - 1, i - 1] = -w
    return L


def weighted_laplacian(g, x):
    """Sum of edge Laplacians over the selected edges."""
    _check_conformance(g, x)
    L = np.zeros((g.n, g.n))
    for (i, j, w), b in zip(g.edges, x.bits):
        if b:
            L[i - 1, i - 1] += w
            L[j - 1, j - 1] += w
            L[i - 1, j - 1] -= w
            L[j - 1, i - 1] -= w
    return L


def connected_components(g, x):
    """Partition of {1..n} into maximal connected sets under the selected edges.

    Components are returned as frozensets ordered by their smallest node.
    """
    _check_conformance(g, x)
    parent = list(range(g.n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (i, j, _), b in zip(g.edges, x.bits):
        if b:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups = {}
    for v in range(1, g.n + 1):
        groups.setdefault(find(v), []).append(v)
    return [frozenset(members) for _, members in sorted(groups.items())]


def is_spanning_tree(g, x):
    """True iff exactly n-1 edges are selected and they connect all n nodes."""
    _check_conformance(g, x)
    if x.count != g.n - 1:
        return False
    return len(connected_components(g, x)) == 1


def _prufer_to_edges(seq, n):
    """Decode a Prufer sequence over 1..n into the n-1 edges of its tree."""
    if n == 2:
        return [(1, 2)]
    deg = [1] * (n + 1)
    for s in seq:
        deg[s] += 1
    ptr = 1
    while deg[ptr] != 1:
        ptr += 1
    leaf = ptr
    edges = []
    for s in seq:
        edges.append((leaf, s) if leaf < s else (s, leaf))
        deg[s] -= 1
        if deg[s] == 1 and s < ptr:
            leaf = s
        else:
            ptr += 1
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((leaf, n))
    return edges


def enumerate_spanning_trees(g, node_limit=ORACLE_NODE_LIMIT):
    """Yield every spanning tree of g exactly once.

    Complete graphs are enumerated through Prufer sequences; other graphs fall
    back to filtering all (n-1)-edge subsets. Refuses graphs above the
    configured node limit, which keeps exhaustive use at oracle scale.
    """
    if g.n > node_limit:
        raise ValueError(
            f"refusing exhaustive enumeration for n={g.n} > limit {node_limit}"
        )
    if is_complete(g):
        for seq in itertools.product(range(1, g.n + 1), repeat=g.n - 2):
            yield EdgeSelection.from_edges(g, _prufer_to_edges(seq, g.n))
    else:
        positions = range(g.edge_count)
        for subset in itertools.combinations(positions, g.n - 1):
            bits = [0] * g.edge_count
            for p in subset:
                bits[p] = 1
            x = EdgeSelection(g, tuple(bits))
            if is_spanning_tree(g, x):
                yield x


def random_spanning_tree(g, rng):
    """A random spanning tree; uniform (via Prufer) on complete graphs."""
    if is_complete(g):
        seq = tuple(int(v) for v in rng.integers(1, g.n + 1, size=max(g.n - 2, 0)))
        return EdgeSelection.from_edges(g, _prufer_to_edges(seq, g.n))
    order = rng.permutation(g.edge_count)
    parent = list(range(g.n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    chosen = []
    for p in order:
        i, j, _ = g.edges[int(p)]
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
            chosen.append((i, j))
    if len(chosen) != g.n - 1:
        raise ValueError("graph is not connected")
    return EdgeSelection.from_edges(g, chosen)
