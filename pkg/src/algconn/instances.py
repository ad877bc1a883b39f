"""Instance file I/O, seeded instance generation, and degree histograms.

The canonical file format is whitespace-delimited plain text: an optional
block of '#'-prefixed metadata lines, a header line "n m", then m lines
"i j w" in lexicographic edge order. Weights are written with repr so a
write/read round trip reproduces the graph exactly. A best-effort converter
also reads square weight-matrix files (one row per line, zero diagonal),
the layout instance collections are commonly published in.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .bruteforce import brute_force_optimum
from .graph import WeightedGraph, is_spanning_tree
from .heuristics import HeuristicParams, best_star, max_weight_spanning_tree, mch
from .oa import OAConfig

FILTER_ORACLE_LIMIT = 7


class InstanceFormatError(ValueError):
    """A problem in an instance file, with the offending line in the message."""


@dataclass(frozen=True)
class GeneratedInstance:
    graph: WeightedGraph
    seed: int
    attempt: int
    champion: float
    star: float
    max_weight: float


def canonical_text(g, metadata=None):
    lines = []
    for key in sorted(metadata or {}):
        lines.append(f"# {key}: {metadata[key]}")
    lines.append(f"{g.n} {g.edge_count}")
    for i, j, w in g.edges:
        lines.append(f"{i} {j} {w!r}")
    return "\n".join(lines) + "\n"


def write_instance(g, path, metadata=None):
    with open(path, "w") as fh:
        fh.write(canonical_text(g, metadata))


def _parse_edge_text(text, source):
    lines = [
        (no, line.strip())
        for no, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.strip().startswith("#")
    ]
    if not lines:
        raise InstanceFormatError(f"{source}: empty instance file")
    no, header = lines[0]
    parts = header.split()
    if len(parts) != 2:
        raise InstanceFormatError(f"{source}:{no}: malformed header {header!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise InstanceFormatError(f"{source}:{no}: malformed header {header!r}") from None
    records = lines[1:]
    if len(records) != m:
        raise InstanceFormatError(
            f"{source}: header promises {m} edges but {len(records)} present"
        )
    edges = []
    seen = set()
    for no, line in records:
        parts = line.split()
        if len(parts) != 3:
            raise InstanceFormatError(f"{source}:{no}: malformed edge line {line!r}")
        try:
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise InstanceFormatError(f"{source}:{no}: malformed edge line {line!r}") from None
        if i == j:
            raise InstanceFormatError(f"{source}:{no}: self-loop at node {i}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise InstanceFormatError(f"{source}:{no}: duplicate edge {key}")
        seen.add(key)
        if not math.isfinite(w) or w <= 0:
            raise InstanceFormatError(f"{source}:{no}: non-positive weight {parts[2]}")
        if not (1 <= key[0] < key[1] <= n):
            raise InstanceFormatError(f"{source}:{no}: node out of range in {line!r}")
        edges.append((key[0], key[1], w))
    return WeightedGraph(n, tuple(edges))


def _parse_matrix_text(text, source):
    rows = []
    for no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            rows.append([float(p) for p in stripped.replace(",", " ").split()])
        except ValueError:
            raise InstanceFormatError(f"{source}:{no}: malformed matrix row") from None
    n = len(rows)
    if n < 2 or any(len(r) != n for r in rows):
        raise InstanceFormatError(f"{source}: expected a square weight matrix")
    W = np.array(rows)
    if np.abs(W - W.T).max() > 1e-9 * max(1.0, np.abs(W).max()):
        raise InstanceFormatError(f"{source}: weight matrix is not symmetric")
    edges = []
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            w = W[i - 1, j - 1]
            if w < 0:
                raise InstanceFormatError(f"{source}: negative weight at ({i},{j})")
            if w > 0:
                edges.append((i, j, float(w)))
    return WeightedGraph(n, tuple(edges))


def read_instance(path, format="edges"):
    """Parse an instance file into a graph; `format` is 'edges' or 'matrix'."""
    with open(path) as fh:
        text = fh.read()
    if format in ("edges", "canonical"):
        return _parse_edge_text(text, str(path))
    if format in ("matrix", "published"):
        return _parse_matrix_text(text, str(path))
    raise ValueError(f"unknown instance format {format!r}")


def instance_digest(g):
    return hashlib.sha256(canonical_text(g).encode()).hexdigest()


def _nontrivial_champion(g, oracle_limit=FILTER_ORACLE_LIMIT):
    """Best tree value the filter can certify: exhaustive at small n, the
    maximum-cost heuristic with generous parameters above oracle scale."""
    if g.n <= oracle_limit:
        _, value = brute_force_optimum(g)
        return value
    k = math.ceil(g.n / 2)
    params = HeuristicParams(h1=min(5, g.n), h2=min(5, g.n - 1), k=k)
    return mch(g, params, OAConfig(sizes=(g.n,))).gamma_h


def generate_instances(n, count, weight_range=(1.0, 10.0), seed=0, retry_factor=50):
    """Seeded complete instances whose optimum beats the easy baselines.

    Draw t uses its own generator derived from (seed, t), so output does not
    depend on how rejected draws interleave. A draw is kept only when some
    certified tree has strictly higher connectivity than both the best star
    and the greedy maximum-weight tree; failures are redrawn up to
    retry_factor * count attempts.
    """
    lo, hi = float(weight_range[0]), float(weight_range[1])
    if n < 4:
        raise ValueError("instances need at least 4 nodes")
    if not (0 < lo <= hi):
        raise ValueError("weight range must be positive")
    kept = []
    attempts = 0
    cap = retry_factor * count
    while len(kept) < count:
        if attempts >= cap:
            raise RuntimeError(
                f"non-triviality filter accepted {len(kept)}/{count} after {attempts} draws"
            )
        t = attempts
        attempts += 1
        rng = np.random.default_rng((int(seed), t))
        weights = {}
        for i in range(1, n):
            for j in range(i + 1, n + 1):
                weights[(i, j)] = float(rng.uniform(lo, hi))
        g = WeightedGraph(n, tuple((i, j, w) for (i, j), w in weights.items()))
        star = best_star(g).gamma_h
        heavy = max_weight_spanning_tree(g).gamma_h
        champion = _nontrivial_champion(g)
        if champion > star + 1e-9 and champion > heavy + 1e-9:
            kept.append(GeneratedInstance(g, int(seed), t, champion, star, heavy))
    return kept


def degree_histogram(trees):
    """Percentages of nodes at each degree, pooled over the given trees."""
    if not trees:
        raise ValueError("need at least one tree")
    counts = {}
    total = 0
    for tree in trees:
        if not is_spanning_tree(tree.graph, tree):
            raise ValueError("histogram input contains a non-spanning selection")
        for d in tree.degrees():
            counts[d] = counts.get(d, 0) + 1
            total += 1
    return {d: 100.0 * c / total for d, c in sorted(counts.items())}
