"""Outer-approximation cutting planes for maximum algebraic connectivity.

The driver alternates MILP solves with scans of the lifted matrix W at the
incumbent point: every principal submatrix of a configured size whose
smallest eigenvalue is negative beyond tolerance yields a linear cut
(an eigenvector inequality, or for 2x2 blocks optionally the tangent-plane
form of the corresponding second-order cone condition). Connectivity of
integral candidates is enforced lazily inside each MILP solve. With the full
size n in the scan set the loop converges to an optimal spanning tree; with
smaller sizes only, it terminates at a valid upper bound.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .formulations import (
    base_relaxed_model,
    full_graph_connectivity,
    selection_from_values,
    spanning_tree_oracle,
)
from .graph import EdgeSelection, weighted_laplacian
from .linalg import SubmatrixIndex, algebraic_connectivity, violated_submatrices
from .milp import Constraint, Model, _cut_key, solve_lp, solve_milp


@dataclass(frozen=True)
class OAConfig:
    """Scan sizes, tolerances, and budgets for the cutting-plane driver."""

    sizes: tuple
    eps_psd: float = 1e-6
    eps_opt: float = 1e-4
    soc_mode: bool = False
    kelley_init: bool = False
    max_rounds: int = 10_000
    time_limit: float | None = None
    milp_rel_gap: float = 0.0
    max_cuts_per_round: int | None = None
    record_cuts: bool = True

    def __post_init__(self):
        sizes = tuple(sorted({int(m) for m in self.sizes}))
        if not sizes or sizes[0] < 1:
            raise ValueError("scan sizes must be a nonempty set of integers >= 1")
        if self.eps_psd <= 0 or self.eps_opt <= 0:
            raise ValueError("tolerances must be positive")
        object.__setattr__(self, "sizes", sizes)


@dataclass(frozen=True)
class RecordedCut:
    kind: str  # "eigen" or "soc"
    size: int
    indices: tuple
    coeffs: dict
    sense: str
    rhs: float


@dataclass
class OAResult:
    tree: object
    lower_bound: float
    upper_bound: float
    gap_percent: float
    eigen_cut_count: int = 0
    soc_cut_count: int = 0
    topology_cut_count: int = 0
    milp_solve_count: int = 0
    wall_time: float = 0.0
    status: str = "converged"
    trace: list = field(default_factory=list)
    cuts: list = field(default_factory=list)

    def trace_columns(self, sizes):
        cols = ["iteration", "upper_bound", "lower_bound"]
        cols += [f"eigen_cuts_m{m}" for m in sizes]
        cols += ["soc_cuts", "topology_cuts", "wall_time_s"]
        return cols


def initial_upper_bound(g):
    """Connectivity of the everything-selected graph.

    Removing edges can only shrink the Laplacian in the PSD order, so this
    value bounds the connectivity of every subgraph, trees included.
    """
    lam2 = full_graph_connectivity(g)
    if lam2 <= 1e-12:
        warnings.warn("full graph is disconnected; upper bound is 0", stacklevel=2)
        return 0.0
    return lam2


def eigenvector_cut(dm, J, v_minus):
    """Linear row demanding v.Wv >= 0 on the submatrix indexed by J."""
    idx = J.indices
    v = np.asarray(v_minus, dtype=float)
    if v.shape != (len(idx),):
        raise ValueError("eigenvector length does not match the index set")
    coeffs = {}
    for a in range(len(idx)):
        for b in range(a, len(idx)):
            key = (idx[a], idx[b])
            coef = v[a] * v[a] if a == b else 2.0 * v[a] * v[b]
            if coef != 0.0:
                coeffs[dm.w_map[key]] = coeffs.get(dm.w_map[key], 0.0) + coef
    label = "_".join(str(i) for i in idx)
    return Constraint(coeffs, ">=", 0.0, name=f"eig_{label}")


def soc_oa_cuts(dm, W_star, violated_pairs):
    """Tangent-plane cuts for violated 2x2 cone conditions W_ij^2 <= W_ii W_jj.

    Linearizes W_ij^2 / W_ii (convex for W_ii > 0) at the current point; each
    returned row is valid for every point of the cone, so in particular for
    every tree with gamma at most its connectivity.
    """
    cuts = []
    for i, j in violated_pairs:
        wii = W_star[i - 1, i - 1]
        if abs(wii) < 1e-9:
            raise ValueError(f"diagonal W_{i}{i} too small for a tangent cut")
        wij = W_star[i - 1, j - 1]
        coeffs = {
            dm.w_map[(min(i, j), max(i, j))]: 2.0 * wij / wii,
            dm.w_map[(i, i)]: -(wij * wij) / (wii * wii),
            dm.w_map[(j, j)]: -1.0,
        }
        cuts.append(Constraint(coeffs, "<=", 0.0, name=f"soc_{i}_{j}"))
    return cuts


def assemble_w(dm, values):
    """Read the lifted matrix W out of a model point."""
    n = dm.graph.n
    W = np.zeros((n, n))
    for (i, j), var in dm.w_map.items():
        W[i - 1, j - 1] = values[var]
        W[j - 1, i - 1] = values[var]
    return W


def lifted_matrix(g, x_values, gamma):
    """W = L(x) - gamma (I - J/n) evaluated directly from (x, gamma).

    Accepts binary or fractional selection values.
    """
    n = g.n
    W = np.full((n, n), gamma / n)
    W[np.diag_indices(n)] = -gamma * (n - 1) / n
    for (i, j, w), b in zip(g.edges, x_values):
        if b != 0:
            wb = w * float(b)
            W[i - 1, i - 1] += wb
            W[j - 1, j - 1] += wb
            W[i - 1, j - 1] -= wb
            W[j - 1, i - 1] -= wb
    return W


class _CompactMaster:
    """Equivalent master over (x, gamma, y) with the W block substituted out.

    The defining equalities make every W entry a homogeneous linear function
    of (x, gamma), so any row over W translates exactly; solving the reduced
    model yields the same optima while the LP tableaux stay several times
    smaller. x and gamma keep the indices they have in the full design model.
    """

    def __init__(self, dm):
        self.dm = dm
        g = dm.graph
        n = g.n
        self.model = Model("max")
        full_vars = dm.model.variables
        for (i, j), var in sorted(dm.x_map.items(), key=lambda kv: kv[1]):
            v = full_vars[var]
            assert self.model.add_variable(v.lb, v.ub, v.integer, v.name) == var
        gv = full_vars[dm.gamma_index]
        assert self.model.add_variable(gv.lb, gv.ub, gv.integer, gv.name) == dm.gamma_index
        self.y_map = None
        y_translate = {}
        if dm.y_map is not None:
            self.y_map = {}
            for i, var in sorted(dm.y_map.items()):
                v = full_vars[var]
                self.y_map[i] = self.model.add_variable(v.lb, v.ub, v.integer, v.name)
                y_translate[var] = self.y_map[i]
        self._translate_var = y_translate
        self._w_inverse = {var: key for key, var in dm.w_map.items()}
        w_vars = set(self._w_inverse)
        if any(v in w_vars for v in dm.model.objective):
            raise ValueError("cannot reduce a model whose objective touches W")
        self.model.set_objective(
            {y_translate.get(v, v): c for v, c in dm.model.objective.items()},
            dm.model.sense,
        )
        for con in dm.model.constraints:
            touches_w = any(v in w_vars for v in con.coeffs)
            if touches_w:
                if con.name.startswith(("diag_", "offdiag_")):
                    continue  # definitional rows are what the substitution encodes
                self.model.constraints.append(self.translate(con))
            else:
                coeffs = {self._translate_var.get(v, v): c for v, c in con.coeffs.items()}
                self.model.add_constraint(coeffs, con.sense, con.rhs, con.name)

    def translate(self, con):
        """Rewrite a row over (x, gamma, W, y) into (x, gamma, y) space."""
        dm = self.dm
        g = dm.graph
        n = g.n
        out = {}
        gamma_coef = 0.0
        for var, c in con.coeffs.items():
            key = self._w_inverse.get(var)
            if key is None:
                var = self._translate_var.get(var, var)
                out[var] = out.get(var, 0.0) + c
                continue
            i, j = key
            if i == j:
                gamma_coef -= c * (n - 1) / n
                for pos, other, w in g.incident(i):
                    xv = dm.x_map[(min(i, other), max(i, other))]
                    out[xv] = out.get(xv, 0.0) + c * w
            else:
                gamma_coef += c / n
                if g.has_edge(i, j):
                    xv = dm.x_map[(i, j)]
                    out[xv] = out.get(xv, 0.0) - c * g.weight(i, j)
        if gamma_coef != 0.0:
            out[dm.gamma_index] = out.get(dm.gamma_index, 0.0) + gamma_coef
        out = {v: c for v, c in out.items() if c != 0.0}
        return Constraint(out, con.sense, con.rhs, con.name)

    def add_cut(self, cut):
        """Install a W-space cut in both the full and the reduced model."""
        self.dm.model.constraints.append(cut)
        self.model.constraints.append(self.translate(cut))

    def tree_point(self, x, gamma, y_values=None):
        vals = np.zeros(len(self.model.variables))
        for (i, j), var in self.dm.x_map.items():
            vals[var] = float(x.bits[self.dm.graph.edge_position(i, j)])
        vals[self.dm.gamma_index] = gamma
        if self.y_map is not None and y_values is not None:
            for i, var in self.y_map.items():
                vals[var] = y_values[i]
        return vals


def assignment_for_tree(dm, x, gamma):
    """Model point induced by a tree and a gamma value (y markers left at 0).

    The W block is filled from its defining equalities, so the point satisfies
    the linking rows exactly; it is the reference point for cut audits.
    """
    g = dm.graph
    n = g.n
    values = np.zeros(len(dm.model.variables))
    strength = {i: 0.0 for i in range(1, n + 1)}
    for (i, j), var in dm.x_map.items():
        b = x.bits[g.edge_position(i, j)]
        values[var] = float(b)
        if b:
            w = g.weight(i, j)
            strength[i] += w
            strength[j] += w
    values[dm.gamma_index] = gamma
    for (i, j), var in dm.w_map.items():
        if i == j:
            values[var] = strength[i] - gamma * (n - 1) / n
        else:
            sel = x.bits[g.edge_position(i, j)] if g.has_edge(i, j) else 0
            w = g.weight(i, j) if sel else 0.0
            values[var] = -w + gamma / n
    return values


def run_algorithm1(g, dm, cfg):
    """Cutting-plane loop over the configured principal-submatrix sizes.

    Each round solves the MILP (with lazy connectivity cuts), refreshes the
    best tree and the running upper bound, then scans the sizes in ascending
    order adding one cut per violated submatrix; 2x2 violations become
    tangent-plane cone cuts in `soc_mode` whenever the pivot diagonal is
    positive. The loop stops once a round produces no cuts: with n among the
    sizes that certifies an optimal tree within tolerance, otherwise the
    final MILP value stands as a valid upper bound.
    """
    t0 = time.perf_counter()
    n = g.n
    if cfg.sizes[-1] > n:
        raise ValueError(f"scan size {cfg.sizes[-1]} exceeds n={n}")
    exact_mode = cfg.sizes[-1] == n

    master = _CompactMaster(dm)
    result = OAResult(None, 0.0, float("inf"), float("inf"))
    installed_keys = set()

    def install(cut, kind, m, J):
        key = _cut_key(cut.coeffs, cut.sense, cut.rhs)
        if key in installed_keys:
            return
        installed_keys.add(key)
        master.add_cut(cut)
        if kind == "eigen":
            result.eigen_cut_count += 1
        else:
            result.soc_cut_count += 1
        if cfg.record_cuts:
            result.cuts.append(
                RecordedCut(kind, m, J.indices, dict(cut.coeffs), cut.sense, cut.rhs)
            )

    # the 1x1 principal-minor cuts W_ii >= 0 are always valid and anchor
    # gamma against each node's selected strength from the first solve on
    for i in range(1, n + 1):
        J = SubmatrixIndex((i,))
        install(eigenvector_cut(dm, J, np.array([1.0])), "eigen", 1, J)
    # singleton connectivity cuts (degree >= 1) are the first rows the lazy
    # oracle would produce; installing them up front saves those round trips
    from .graph import cutset

    for i in range(1, n + 1):
        crossing = cutset(g, {i}).cut_edges
        row = Constraint(
            {dm.x_map[e]: 1.0 for e in crossing}, ">=", 1.0, name=f"conn_{i}"
        )
        dm.model.constraints.append(row)
        master.model.constraints.append(row)

    ub = initial_upper_bound(g)
    if cfg.kelley_init:
        ub = min(ub, kelley_relaxation_bound(g, cfg.eps_psd))
    result.upper_bound = ub
    gamma_var = dm.model.variables[dm.gamma_index]
    gamma_var.ub = min(gamma_var.ub, ub)
    master.model.variables[dm.gamma_index].ub = gamma_var.ub

    topology_oracle = spanning_tree_oracle(g, dm.x_map)
    x_positions = sorted(dm.x_map.values())
    candidate_pool = {}

    def oracle(values):
        # observe every connected integral candidate the search inspects;
        # their Fiedler vectors are further valid eigenvector cuts
        cuts = topology_oracle(values)
        if not cuts:
            bits = tuple(int(round(values[v])) for v in x_positions)
            if bits not in candidate_pool:
                y_bits = None
                if master.y_map is not None:
                    y_bits = {i: round(values[var]) for i, var in master.y_map.items()}
                candidate_pool[bits] = y_bits
        return cuts

    best_tree = None
    best_y = None
    lb = 0.0
    milp_budget = None
    hint = None
    cut_trees = set()

    for round_no in range(1, cfg.max_rounds + 1):
        if cfg.time_limit is not None:
            remaining = cfg.time_limit - (time.perf_counter() - t0)
            if remaining <= 0:
                result.status = "limit"
                break
            milp_budget = remaining
        mirror_from = len(master.model.constraints)
        sol = solve_milp(
            master.model, oracle, time_limit=milp_budget,
            rel_gap=cfg.milp_rel_gap, incumbent=hint,
        )
        # lazy topology cuts live in x space, so they transfer verbatim
        dm.model.constraints.extend(master.model.constraints[mirror_from:])
        result.milp_solve_count += 1
        result.topology_cut_count += sol.cut_count
        if sol.status == "infeasible":
            result.status = "infeasible"
            break
        if sol.status == "limit":
            result.status = "limit"
            break

        x = selection_from_values(g, dm.x_map, sol.values)
        for bits, y_bits in sorted(candidate_pool.items()):
            if bits in cut_trees:
                continue
            cut_trees.add(bits)
            tree = EdgeSelection(g, bits)
            lam2_c, fiedler = algebraic_connectivity(weighted_laplacian(g, tree))
            if best_tree is None or lam2_c > lb:
                lb, best_tree, best_y = lam2_c, tree, y_bits
            if exact_mode and bits != x.bits:
                J = SubmatrixIndex(tuple(range(1, n + 1)))
                install(eigenvector_cut(dm, J, fiedler), "eigen", n, J)
        lam2, _ = algebraic_connectivity(weighted_laplacian(g, x))
        if best_tree is None or lam2 > lb:
            lb, best_tree = lam2, x
            if master.y_map is not None:
                best_y = {i: round(sol.values[var]) for i, var in master.y_map.items()}
        ub = min(ub, sol.objective)
        gamma_var.ub = min(gamma_var.ub, ub)
        master.model.variables[dm.gamma_index].ub = gamma_var.ub
        hint = master.tree_point(best_tree, lb, best_y)

        W_star = lifted_matrix(g, x.bits, sol.values[dm.gamma_index])
        new_by_size = {}
        soc_added = 0
        for m in cfg.sizes:
            hits = violated_submatrices(W_star, m, cfg.eps_psd)
            if cfg.max_cuts_per_round is not None:
                hits = hits[: cfg.max_cuts_per_round]
            count = 0
            for J, lam_min, vec in hits:
                use_soc = (
                    cfg.soc_mode
                    and m == 2
                    and W_star[J.indices[0] - 1, J.indices[0] - 1] > 1e-9
                )
                if use_soc:
                    cut = soc_oa_cuts(dm, W_star, [J.indices])[0]
                    install(cut, "soc", m, J)
                    soc_added += 1
                else:
                    install(eigenvector_cut(dm, J, vec), "eigen", m, J)
                    count += 1
            new_by_size[m] = count
        result.trace.append(
            {
                "iteration": round_no,
                "upper_bound": ub,
                "lower_bound": lb,
                **{f"eigen_cuts_m{m}": new_by_size[m] for m in cfg.sizes},
                "soc_cuts": soc_added,
                "topology_cuts": sol.cut_count,
                "wall_time_s": time.perf_counter() - t0,
            }
        )
        if sum(new_by_size.values()) + soc_added == 0:
            result.status = "converged"
            break
    else:
        result.status = "limit"

    result.tree = best_tree
    result.lower_bound = lb
    result.upper_bound = ub
    result.gap_percent = 100.0 * (ub - lb) / lb if lb > 0 else float("inf")
    result.wall_time = time.perf_counter() - t0
    if exact_mode and result.status == "converged":
        gap = (ub - lb) / (ub + 1e-6)
        if gap > cfg.eps_opt:
            result.status = "limit"  # should not happen: clean scan implies tiny gap
    return result


def solve_exact(g, cfg=None):
    """Optimal spanning tree for the connectivity objective.

    Runs the cutting-plane loop with the full matrix size included in the
    scan set, which makes the terminal bound certify the incumbent tree.
    """
    if cfg is None:
        cfg = OAConfig(sizes=(g.n,), kelley_init=True)
    if cfg.sizes[-1] != g.n:
        raise ValueError("exact solve requires the full size n in the scan set")
    dm = base_relaxed_model(g)
    return run_algorithm1(g, dm, cfg)


def kelley_relaxation_bound(g, tol, max_iter=2000, return_cuts=False):
    """Upper bound from the binary-relaxed problem via plain cutting planes.

    Solves the x-relaxed LP and adds full-size eigenvector cuts until the
    lifted matrix at the LP optimum is PSD within `tol`. Every iterate's LP
    value already bounds the relaxed problem from above, hence also bounds
    the best spanning tree. With `return_cuts` the discovered (index set,
    eigenvector) pairs are returned alongside the bound.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    dm = base_relaxed_model(g)
    master = _CompactMaster(dm)
    for var in master.model.variables:
        var.integer = False
    for i in range(1, g.n + 1):
        J = SubmatrixIndex((i,))
        master.add_cut(eigenvector_cut(dm, J, np.array([1.0])))
    x_positions = sorted(dm.x_map.values())
    generated = []
    for _ in range(max_iter):
        sol = solve_lp(master.model)
        if sol.status != "optimal":
            raise RuntimeError(f"relaxation LP came back {sol.status}")
        W_star = lifted_matrix(g, sol.values[x_positions], sol.values[dm.gamma_index])
        hits = violated_submatrices(W_star, g.n, tol)
        if not hits:
            return (sol.objective, generated) if return_cuts else sol.objective
        J, _, vec = hits[0]
        generated.append((J, vec))
        master.add_cut(eigenvector_cut(dm, J, vec))
    raise RuntimeError("relaxation bound did not converge within the iteration cap")
