"""Self-contained LP and branch-and-cut mixed-integer solver.

The LP core is a two-phase primal simplex over bounded variables on a dense
tableau (Dantzig pricing with a Bland's-rule fallback once pivots stall).
Branch and bound uses best-bound node selection and branches on the most
fractional integer variable, lowest index on ties. A lazy-constraint oracle
may inspect every integral candidate; any cuts it returns must be violated
by that candidate and valid for all integer-feasible points, are appended to
the model globally, and are never removed.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

FEAS_TOL = 1e-6
INT_TOL = 1e-6
LP_TOL = 1e-9

_AT_LB, _AT_UB, _BASIC, _FREE = 0, 1, 2, 3
_SENSES = ("<=", ">=", "=")


class ModelError(ValueError):
    """Malformed model: bad bounds, senses, or variable references."""


class LazyCutError(RuntimeError):
    """A lazy oracle violated its contract."""


class SimplexStallError(RuntimeError):
    """The simplex failed to terminate within its iteration budget."""


@dataclass
class Variable:
    lb: float
    ub: float
    integer: bool = False
    name: str = ""


@dataclass(frozen=True)
class Constraint:
    coeffs: dict
    sense: str
    rhs: float
    name: str = ""


def constraint_slack(con, values):
    """Signed slack of a constraint at a point; >= 0 means satisfied.

    For equalities the slack is minus the absolute residual.
    """
    lhs = sum(c * values[i] for i, c in con.coeffs.items())
    if con.sense == "<=":
        return con.rhs - lhs
    if con.sense == ">=":
        return lhs - con.rhs
    return -abs(lhs - con.rhs)


class Model:
    """Linear model: bounded (possibly integer) variables, rows, one objective."""

    def __init__(self, sense="max"):
        if sense not in ("max", "min"):
            raise ModelError(f"objective sense must be max or min, got {sense!r}")
        self.sense = sense
        self.variables = []
        self.constraints = []
        self.objective = {}

    def add_variable(self, lb=0.0, ub=math.inf, integer=False, name=""):
        lb, ub = float(lb), float(ub)
        if lb > ub:
            raise ModelError(f"variable {name or len(self.variables)} has lb > ub")
        self.variables.append(Variable(lb, ub, bool(integer), name))
        return len(self.variables) - 1

    def _check_coeffs(self, coeffs):
        for idx in coeffs:
            if not (0 <= int(idx) < len(self.variables)):
                raise ModelError(f"coefficient references unknown variable {idx}")

    def add_constraint(self, coeffs, sense, rhs, name=""):
        if sense not in _SENSES:
            raise ModelError(f"unknown constraint sense {sense!r}")
        coeffs = {int(i): float(c) for i, c in coeffs.items() if float(c) != 0.0}
        self._check_coeffs(coeffs)
        self.constraints.append(Constraint(coeffs, sense, float(rhs), name))
        return len(self.constraints) - 1

    def set_objective(self, coeffs, sense=None):
        coeffs = {int(i): float(c) for i, c in coeffs.items()}
        self._check_coeffs(coeffs)
        self.objective = coeffs
        if sense is not None:
            if sense not in ("max", "min"):
                raise ModelError(f"objective sense must be max or min, got {sense!r}")
            self.sense = sense

    def copy(self):
        m = Model(self.sense)
        m.variables = [Variable(v.lb, v.ub, v.integer, v.name) for v in self.variables]
        m.constraints = list(self.constraints)
        m.objective = dict(self.objective)
        return m

    def write_lp(self, path):
        """Plain-text dump for debugging: objective, rows, bounds, integers."""
        lines = [f"{self.sense}: " + _row_text(self.objective, self)]
        lines.append("subject to:")
        for k, con in enumerate(self.constraints):
            label = con.name or f"c{k}"
            lines.append(f"  {label}: {_row_text(con.coeffs, self)} {con.sense} {con.rhs!r}")
        lines.append("bounds:")
        for i, v in enumerate(self.variables):
            lines.append(f"  {v.lb!r} <= {v.name or f'v{i}'} <= {v.ub!r}")
        ints = [v.name or f"v{i}" for i, v in enumerate(self.variables) if v.integer]
        if ints:
            lines.append("integers: " + " ".join(ints))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def _row_text(coeffs, model):
    parts = []
    for i in sorted(coeffs):
        name = model.variables[i].name or f"v{i}"
        parts.append(f"{coeffs[i]:+g} {name}")
    return " ".join(parts) if parts else "0"


@dataclass
class MilpSolution:
    status: str
    values: np.ndarray | None
    objective: float | None
    bound: float | None
    node_count: int = 0
    cut_count: int = 0
    wall_time: float = 0.0
    bound_trace: list = field(default_factory=list)


def dual_bound(solution):
    """Best remaining relaxation bound, the proof bound for the incumbent."""
    return solution.bound


# ---------------------------------------------------------------------------
# bounded-variable primal simplex
#
# The inner loop is written in plain loops over float64 arrays so numba can
# compile it; the identical source runs uncompiled if numba is unavailable.

try:
    from numba import njit as _njit

    _JIT = True
except ImportError:  # pragma: no cover - exercised only without numba
    _JIT = False

    def _njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


@_njit(cache=True)
def _simplex_core(T, c, lb, ub, xval, basis, state, max_iter):
    """Drive the current basic feasible point to optimality (maximization).

    Operates in place on the tableau T = B^-1 A. After 3N consecutive
    degenerate pivots, switches to Bland's rule until real progress resumes.
    Returns 0 (optimal), 1 (unbounded), or 2 (iteration budget exhausted).
    """
    m, N = T.shape
    bland_after = 3 * N
    degen = 0
    bland = False
    cB = np.empty(m)
    banned = np.zeros(N, dtype=np.bool_)
    for _ in range(max_iter):
        for i in range(m):
            cB[i] = c[basis[i]]
        d = c - cB @ T

        for k in range(N):
            banned[k] = False
        allow_tiny = False
        while True:
            j = -1
            up = True
            best = LP_TOL
            for jj in range(N):
                st = state[jj]
                if st == _BASIC or ub[jj] - lb[jj] <= 0.0 or banned[jj]:
                    continue
                dj = d[jj]
                if (st == _AT_LB or st == _FREE) and dj > LP_TOL:
                    if bland:
                        j = jj
                        up = True
                        break
                    if dj > best:
                        best = dj
                        j = jj
                        up = True
                elif (st == _AT_UB or st == _FREE) and dj < -LP_TOL:
                    if bland:
                        j = jj
                        up = False
                        break
                    if -dj > best:
                        best = -dj
                        j = jj
                        up = False
            if j < 0:
                if allow_tiny:
                    return 0
                # nothing left but columns with unusably small pivots
                allow_tiny = True
                for k in range(N):
                    banned[k] = False
                continue

            dirn = 1.0 if up else -1.0
            if state[j] == _AT_LB:
                t_enter = ub[j] - xval[j]
            elif state[j] == _AT_UB:
                t_enter = xval[j] - lb[j]
            else:
                t_enter = np.inf

            rmin = np.inf
            r = -1
            for i in range(m):
                mv = -dirn * T[i, j]
                bi = basis[i]
                if mv > 1e-12:
                    lim = (ub[bi] - xval[bi]) / mv
                elif mv < -1e-12:
                    lim = (lb[bi] - xval[bi]) / mv
                else:
                    continue
                if lim < 0.0:
                    lim = 0.0
                if r < 0 or lim < rmin - 1e-12:
                    rmin = lim
                    r = i
                elif lim <= rmin + 1e-12:
                    if bland:
                        if basis[i] < basis[r]:
                            r = i
                            if lim < rmin:
                                rmin = lim
                    elif abs(T[i, j]) > abs(T[r, j]):
                        r = i
                        if lim < rmin:
                            rmin = lim
            # a pivot on a near-zero element wrecks the tableau; try the
            # next-best entering column instead
            if (
                not allow_tiny
                and r >= 0
                and rmin <= t_enter + 1e-15
                and abs(T[r, j]) < 1e-7
            ):
                banned[j] = True
                continue
            break

        t = t_enter if t_enter < rmin else rmin
        if t == np.inf:
            return 1

        if t > 0.0:
            for i in range(m):
                xval[basis[i]] -= dirn * T[i, j] * t
            xval[j] += dirn * t

        if rmin > t_enter + 1e-15:
            # bound flip: entering variable jumps to its other bound
            if state[j] == _AT_LB:
                state[j] = _AT_UB
                xval[j] = ub[j]
            else:
                state[j] = _AT_LB
                xval[j] = lb[j]
            degen = 0
            continue

        leave = basis[r]
        if -dirn * T[r, j] > 0.0:
            xval[leave] = ub[leave]
            state[leave] = _AT_UB
        else:
            xval[leave] = lb[leave]
            state[leave] = _AT_LB
        state[j] = _BASIC
        basis[r] = j

        piv = T[r, j]
        for col in range(N):
            T[r, col] /= piv
        for i in range(m):
            if i != r:
                f = T[i, j]
                if f != 0.0:
                    for col in range(N):
                        T[i, col] -= f * T[r, col]
                    T[i, j] = 0.0
        T[r, j] = 1.0

        if t <= 1e-12:
            degen += 1
            if degen > bland_after:
                bland = True
        else:
            degen = 0
            bland = False
    return 2


def _simplex(T, c, lb, ub, xval, basis, state, max_iter=100_000):
    code = _simplex_core(T, c, lb, ub, xval, basis, state, max_iter)
    if code == 0:
        return "optimal"
    if code == 1:
        return "unbounded"
    raise SimplexStallError("simplex iteration budget exhausted")


@_njit(cache=True)
def _dual_steps(T, c, lb, ub, xval, basis, state, cutoff, max_iter):
    """Dual re-optimization after bound tightenings, from a dual-feasible basis.

    The running objective bounds the node optimum from above and only
    decreases, so the walk stops early once it cannot beat `cutoff`.
    Returns (code, objective): 0 primal feasible (optimal), 1 infeasible,
    2 objective fell to the cutoff, 3 iteration budget exhausted.
    """
    m, N = T.shape
    bland = False
    degen = 0
    cB = np.empty(m)
    for _ in range(max_iter):
        r = -1
        worst = 1e-9
        sigma = 1.0
        for i in range(m):
            bi = basis[i]
            v = xval[bi]
            if v > ub[bi] + 1e-9:
                if v - ub[bi] > worst:
                    worst = v - ub[bi]
                    r = i
                    sigma = 1.0
            elif v < lb[bi] - 1e-9:
                if lb[bi] - v > worst:
                    worst = lb[bi] - v
                    r = i
                    sigma = -1.0
        if r < 0:
            return 0, float(c @ xval)

        for i in range(m):
            cB[i] = c[basis[i]]
        d = c - cB @ T

        j = -1
        best_ratio = np.inf
        best_alpha = 0.0
        # prefer comfortably sized pivots; fall back to the loose threshold
        # only when no solid column exists
        for thresh in (1e-7, 1e-9):
            for k in range(N):
                st = state[k]
                if st == _BASIC or ub[k] - lb[k] <= 0.0:
                    continue
                alpha = sigma * T[r, k]
                ok = False
                if (st == _AT_LB or st == _FREE) and alpha > thresh:
                    ok = True
                elif (st == _AT_UB or st == _FREE) and alpha < -thresh:
                    ok = True
                if not ok:
                    continue
                ratio = -d[k] / alpha
                if ratio < 0.0:
                    ratio = 0.0
                if j < 0 or ratio < best_ratio - 1e-12:
                    j = k
                    best_ratio = ratio
                    best_alpha = abs(alpha)
                elif ratio <= best_ratio + 1e-12:
                    if bland:
                        if k < j:
                            j = k
                            best_alpha = abs(alpha)
                    elif abs(alpha) > best_alpha:
                        j = k
                        best_ratio = min(best_ratio, ratio)
                        best_alpha = abs(alpha)
            if j >= 0:
                break
        if j < 0:
            return 1, 0.0

        leave = basis[r]
        target = ub[leave] if sigma > 0 else lb[leave]
        dxj = (xval[leave] - target) / T[r, j]
        for i in range(m):
            xval[basis[i]] -= T[i, j] * dxj
        xval[j] += dxj
        xval[leave] = target
        state[leave] = _AT_UB if sigma > 0 else _AT_LB
        state[j] = _BASIC
        basis[r] = j

        piv = T[r, j]
        for col in range(N):
            T[r, col] /= piv
        for i in range(m):
            if i != r:
                f = T[i, j]
                if f != 0.0:
                    for col in range(N):
                        T[i, col] -= f * T[r, col]
                    T[i, j] = 0.0
        T[r, j] = 1.0

        if abs(dxj) <= 1e-12:
            degen += 1
            if degen > 3 * N:
                bland = True
        else:
            degen = 0
            bland = False

        obj = float(c @ xval)
        if obj <= cutoff + 1e-9:
            return 2, obj
    return 3, 0.0


def _pivot(T, r, j):
    T[r] = T[r] / T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    T[:, j] = 0.0
    T[r, j] = 1.0


def _repair_state(Afull, rhs, T, xval, basis, state):
    """Refactorize the tableau from the basis and recompute basic values.

    Product-form updates slowly lose accuracy; rebuilding T = B^-1 A and the
    basic solution restores it. Returns False when the basis matrix has
    become numerically singular (callers then restart from scratch).
    """
    B = Afull[:, basis]
    try:
        T[:, :] = np.linalg.solve(B, Afull)
    except np.linalg.LinAlgError:
        return False
    nonbasic = xval.copy()
    nonbasic[basis] = 0.0
    xval[basis] = np.linalg.solve(B, rhs - Afull @ nonbasic)
    return True


def _run_phase(Afull, rhs, T, c, lb, ub, xval, basis, state, repairs=3):
    """Primal simplex with residual verification and refactorization."""
    scale = max(1.0, float(np.abs(rhs).max()) if rhs.size else 0.0)
    for _ in range(repairs):
        status = _simplex(T, c, lb, ub, xval, basis, state)
        if status != "optimal":
            return status
        resid = float(np.abs(Afull @ xval - rhs).max()) if rhs.size else 0.0
        if resid <= 1e-7 * scale:
            return status
        if not _repair_state(Afull, rhs, T, xval, basis, state):
            raise SimplexStallError("basis became numerically singular")
    raise SimplexStallError("simplex could not reach a verified solution")


def _solve_lp_core(A, senses, rhs, cvec, lo, hi, want_state=False):
    """max cvec.x subject to rows (A, senses, rhs) and lo <= x <= hi.

    Returns (status, x, objective, reduced, guts) where x and the reduced
    costs cover the structural variables; `guts` carries the live simplex
    state for dual re-optimization when requested, else None.
    """
    m, n = A.shape
    slo = np.empty(m)
    shi = np.empty(m)
    for i, s in enumerate(senses):
        if s == "<=":
            slo[i], shi[i] = 0.0, math.inf
        elif s == ">=":
            slo[i], shi[i] = -math.inf, 0.0
        else:
            slo[i], shi[i] = 0.0, 0.0
    lb = np.concatenate([lo, slo])
    ub = np.concatenate([hi, shi])
    if (lb > ub).any():
        return "infeasible", None, None, None, None
    N = n + m

    xval = np.zeros(N)
    finite_lb = np.isfinite(lb[:n])
    finite_ub = np.isfinite(ub[:n])
    xval[:n] = np.where(finite_lb, lb[:n], np.where(finite_ub, ub[:n], 0.0))
    state = np.full(N, _AT_LB, dtype=np.int8)
    state[:n][~finite_lb & finite_ub] = _AT_UB
    state[:n][~finite_lb & ~finite_ub] = _FREE

    resid = rhs - A @ xval[:n]
    basis = np.arange(n, n + m)
    arts = []
    for i in range(m):
        v = resid[i]
        if slo[i] - LP_TOL <= v <= shi[i] + LP_TOL:
            xval[n + i] = v
            state[n + i] = _BASIC
        else:
            clipped = min(max(v, slo[i]), shi[i])
            xval[n + i] = clipped
            state[n + i] = _AT_LB if clipped == slo[i] else _AT_UB
            arts.append((i, v - clipped))

    Afull = np.hstack([A, np.eye(m)])
    if arts:
        k = len(arts)
        Aart = np.zeros((m, k))
        alb = np.empty(k)
        aub = np.empty(k)
        aval = np.empty(k)
        c1 = np.zeros(N + k)
        for t, (i, v) in enumerate(arts):
            Aart[i, t] = 1.0
            if v >= 0:
                alb[t], aub[t], c1[N + t] = 0.0, math.inf, -1.0
            else:
                alb[t], aub[t], c1[N + t] = -math.inf, 0.0, 1.0
            aval[t] = v
            basis[i] = N + t
        Afull = np.hstack([Afull, Aart])
        lb = np.concatenate([lb, alb])
        ub = np.concatenate([ub, aub])
        xval = np.concatenate([xval, aval])
        state = np.concatenate([state, np.full(k, _BASIC, dtype=np.int8)])
        T = Afull.copy()  # initial basis is an identity, so B^-1 A = A
        status = _run_phase(Afull, rhs, T, c1, lb, ub, xval, basis, state)
        if status != "optimal" or c1 @ xval < -1e-7:
            return "infeasible", None, None, None, None
        # pin artificials at zero; pivot basic ones out where a real column allows
        lb[N:] = 0.0
        ub[N:] = 0.0
        xval[N:] = np.where(np.abs(xval[N:]) < 1e-9, 0.0, xval[N:])
        for r in range(m):
            if basis[r] >= N:
                row = np.abs(T[r, :N])
                j = int(np.argmax(row))
                if row[j] > 1e-9 and state[j] != _BASIC:
                    old = basis[r]
                    state[old] = _AT_LB
                    xval[old] = 0.0
                    state[j] = _BASIC
                    basis[r] = j
                    _pivot(T, r, j)
        c2 = np.concatenate([cvec, np.zeros(m + k)])
    else:
        T = Afull.copy()
        c2 = np.concatenate([cvec, np.zeros(m)])

    status = _run_phase(Afull, rhs, T, c2, lb, ub, xval, basis, state)
    if status == "unbounded":
        return "unbounded", None, None, None, None
    x = xval[:n].copy()
    reduced = (c2 - c2[basis] @ T)[:n]
    guts = (T, c2, lb, ub, xval, basis, state) if want_state else None
    return "optimal", x, float(cvec @ x), reduced, guts


def _arrays_from_model(model):
    n = len(model.variables)
    lo = np.array([v.lb for v in model.variables])
    hi = np.array([v.ub for v in model.variables])
    sign = 1.0 if model.sense == "max" else -1.0
    cvec = np.zeros(n)
    for i, c in model.objective.items():
        cvec[i] = sign * c
    rows = []
    senses = []
    rhs = []
    for con in model.constraints:
        row = np.zeros(n)
        for i, c in con.coeffs.items():
            row[i] = c
        rows.append(row)
        senses.append(con.sense)
        rhs.append(con.rhs)
    return lo, hi, sign, cvec, rows, senses, rhs


def solve_lp(model):
    """Solve the continuous relaxation; integrality flags are ignored."""
    t0 = time.perf_counter()
    lo, hi, sign, cvec, rows, senses, rhs = _arrays_from_model(model)
    A = np.vstack(rows) if rows else np.zeros((0, len(model.variables)))
    status, x, obj, _, _ = _solve_lp_core(A, senses, np.array(rhs), cvec, lo, hi)
    wall = time.perf_counter() - t0
    if status != "optimal":
        return MilpSolution(status, None, None, None, wall_time=wall)
    obj = sign * obj
    return MilpSolution("optimal", x, obj, obj, wall_time=wall)


# ---------------------------------------------------------------------------
# branch and cut


def _cut_key(coeffs, sense, rhs):
    if not coeffs:
        return (sense, round(rhs, 9))
    scale = max(abs(c) for c in coeffs.values())
    items = tuple(sorted((i, round(c / scale, 9)) for i, c in coeffs.items()))
    return (sense, items, round(rhs / scale, 9))


class _Node:
    __slots__ = ("bound", "lo", "hi", "version", "sol")

    def __init__(self, bound, lo, hi, version, sol=None):
        self.bound = bound
        self.lo = lo
        self.hi = hi
        self.version = version
        self.sol = sol


def solve_milp(
    model, oracle=None, node_limit=None, time_limit=None, rel_gap=0.0, incumbent=None
):
    """Branch and cut to optimality (or a limit) on the given model.

    Every integer-feasible candidate is offered to `oracle` before it may
    become the incumbent; returned cuts reject the candidate, are appended to
    `model.constraints`, and apply to all nodes. `incumbent` may carry a
    known integer-feasible point; it is verified (and screened by the oracle)
    before seeding the search. The returned solution's `bound` is the proof
    bound; `bound_trace` records it at every node pop.
    """
    t0 = time.perf_counter()
    lo0, hi0, sign, cvec, rows, senses, rhs_list = _arrays_from_model(model)
    n = len(model.variables)
    int_idx = np.array([i for i, v in enumerate(model.variables) if v.integer], dtype=int)
    known_cuts = {_cut_key(c.coeffs, c.sense, c.rhs) for c in model.constraints}
    cut_version = 0
    cut_count = 0
    node_count = 0
    bound_trace = []

    # reduced-cost fixing state: bounds valid for every remaining improving
    # solution, derived from the root LP duals and the incumbent value
    glo, ghi = lo0.copy(), hi0.copy()
    root_info = None

    def run_lp(lo, hi):
        lo = np.maximum(lo, glo)
        hi = np.minimum(hi, ghi)
        if (lo > hi).any():
            return "infeasible", None, None, None, None
        A = np.vstack(rows) if rows else np.zeros((0, n))
        return _solve_lp_core(A, senses, np.array(rhs_list), cvec, lo, hi, want_state=True)

    def point_feasible(cand):
        for row, sense, b in zip(rows, senses, rhs_list):
            lhs = float(row @ cand)
            if sense == "<=" and lhs > b + FEAS_TOL:
                return False
            if sense == ">=" and lhs < b - FEAS_TOL:
                return False
            if sense == "=" and abs(lhs - b) > FEAS_TOL:
                return False
        return True

    def apply_reduced_cost_fixing():
        # a nonbasic integer variable whose reduced cost already eats the
        # root gap can be pinned at its bound for the rest of the search
        if root_info is None or best_obj == -math.inf:
            return
        obj_root, x_root, red = root_info
        slack = obj_root - best_obj
        for j in int_idx:
            if ghi[j] - glo[j] <= 0:
                continue
            dj = red[j]
            if abs(x_root[j] - glo[j]) <= 1e-9 and dj < 0 and slack + dj <= -1e-9:
                ghi[j] = glo[j]
            elif abs(x_root[j] - ghi[j]) <= 1e-9 and dj > 0 and slack - dj <= -1e-9:
                glo[j] = ghi[j]

    def out_of_budget():
        if node_limit is not None and node_count >= node_limit:
            return True
        if time_limit is not None and time.perf_counter() - t0 > time_limit:
            return True
        return False

    best_x = None
    best_obj = -math.inf
    if incumbent is not None:
        cand = np.asarray(incumbent, dtype=float)
        ok = (
            cand.shape == (n,)
            and (cand >= lo0 - FEAS_TOL).all()
            and (cand <= hi0 + FEAS_TOL).all()
            and (not int_idx.size or np.abs(cand[int_idx] - np.round(cand[int_idx])).max() <= INT_TOL)
            and all(constraint_slack(c, cand) >= -FEAS_TOL for c in model.constraints)
        )
        if ok and oracle is not None:
            ok = not oracle(cand)
        if ok:
            best_x = cand.copy()
            best_obj = float(cvec @ cand)
    heap = []
    seq = 0
    heapq.heappush(heap, (-math.inf, seq, _Node(math.inf, lo0, hi0, -1)))
    status = "optimal"
    root_unbounded = False

    while heap:
        if out_of_budget():
            status = "limit"
            break
        negb, _, node = heapq.heappop(heap)
        bound_trace.append(max(-negb, best_obj))
        if -negb <= best_obj + 1e-9:
            break  # best-bound order: everything left is dominated

        # process the popped node, then dive depth-first: each branch applies
        # one bound change to the live simplex state and dual re-optimizes,
        # falling back to a cold primal solve when the fast path cannot finish
        guts = None
        from_dual = False
        while True:
            if out_of_budget():
                status = "limit"
                seq += 1
                heapq.heappush(heap, (-node.bound, seq, node))
                break
            if guts is None:
                lp_status, x, obj, red, guts = run_lp(node.lo, node.hi)
                node_count += 1
                from_dual = False
                if root_info is None and lp_status == "optimal":
                    root_info = (obj, x.copy(), red)
                    apply_reduced_cost_fixing()
                if lp_status == "unbounded":
                    root_unbounded = True
                    break
                if lp_status != "optimal" or obj <= best_obj + 1e-9:
                    break
            node.bound = min(node.bound, obj)

            frac = np.abs(x[int_idx] - np.round(x[int_idx])) if int_idx.size else np.array([])
            if frac.size and frac.max() > INT_TOL:
                # branch on the most fractional integer variable
                rel = np.abs(x[int_idx] - np.floor(x[int_idx]) - 0.5)
                rel[frac <= INT_TOL] = math.inf
                pick = int(int_idx[int(np.argmin(rel))])
                val = x[pick]
                dive_up = val - math.floor(val) >= 0.5
                clo, chi = node.lo.copy(), node.hi.copy()
                if dive_up:
                    chi[pick] = math.floor(val)  # sibling keeps the down branch
                    node.lo[pick] = math.ceil(val)
                else:
                    clo[pick] = math.ceil(val)
                    node.hi[pick] = math.floor(val)
                if clo[pick] <= chi[pick]:
                    seq += 1
                    heapq.heappush(heap, (-obj, seq, _Node(obj, clo, chi, cut_version)))
                if node.lo[pick] > node.hi[pick]:
                    break
                T, c2, lb_live, ub_live, xval, basis, state_live = guts
                if dive_up:
                    lb_live[pick] = node.lo[pick]
                else:
                    ub_live[pick] = node.hi[pick]
                code, dobj = _dual_steps(
                    T, c2, lb_live, ub_live, xval, basis, state_live,
                    best_obj, 2000,
                )
                node_count += 1
                if code == 0:
                    obj = dobj
                    x = xval[:n].copy()
                    from_dual = True
                    if obj <= best_obj + 1e-9:
                        break
                    continue
                if code in (1, 2):
                    break  # infeasible or cannot beat the incumbent
                guts = None  # budget ran out: cold re-solve this child
                continue

            candidate = x.copy()
            if int_idx.size:
                candidate[int_idx] = np.round(candidate[int_idx])
            if from_dual and not point_feasible(candidate):
                guts = None  # numerical drift: recompute this node cold
                continue
            if oracle is not None:
                cuts = oracle(candidate)
                added = 0
                for cut in cuts:
                    slack = constraint_slack(cut, candidate)
                    if slack > -FEAS_TOL:
                        raise LazyCutError(
                            f"lazy cut {cut.name!r} is not violated by the candidate"
                        )
                    key = _cut_key(cut.coeffs, cut.sense, cut.rhs)
                    if key in known_cuts:
                        continue
                    known_cuts.add(key)
                    model.constraints.append(cut)
                    row = np.zeros(n)
                    for i, c in cut.coeffs.items():
                        row[i] = c
                    rows.append(row)
                    senses.append(cut.sense)
                    rhs_list.append(cut.rhs)
                    added += 1
                if cuts and not added:
                    raise LazyCutError(
                        "oracle returned violated cuts already present in the model"
                    )
                if added:
                    cut_count += added
                    cut_version += 1
                    guts = None
                    continue  # re-solve this node against the new cuts
            cand_obj = float(cvec @ candidate)
            if cand_obj > best_obj:
                best_obj = cand_obj
                best_x = candidate
                apply_reduced_cost_fixing()
            break

        if root_unbounded:
            break
        if best_obj > -math.inf and rel_gap > 0 and heap:
            top = -heap[0][0]
            if top - best_obj <= rel_gap * (abs(top) + 1e-9):
                break

    wall = time.perf_counter() - t0
    if root_unbounded:
        return MilpSolution("unbounded", None, None, None, node_count, cut_count, wall)
    open_bounds = [-b for b, _, _ in heap]
    if status == "limit":
        proof = max([best_obj] + open_bounds) if (open_bounds or best_x is not None) else math.inf
    else:
        proof = best_obj if best_x is not None else -math.inf
    if best_x is None:
        final_status = "limit" if status == "limit" else "infeasible"
        return MilpSolution(
            final_status, None, None, sign * proof if math.isfinite(proof) else None,
            node_count, cut_count, wall, bound_trace,
        )
    return MilpSolution(
        status,
        best_x,
        sign * best_obj,
        sign * proof,
        node_count,
        cut_count,
        wall,
        bound_trace,
    )
