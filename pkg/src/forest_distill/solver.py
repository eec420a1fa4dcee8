"""Exact solver for the cardinality-capped set-partitioning program.

The problem: pick binary indicators z_j over L coverage columns so that
each constrained row is covered exactly once, at most ``ell`` columns are
picked, and lambda * phi . z - (1 - lambda) * xi . z is maximal. Solved
by LP-relaxation branch-and-bound; the relaxation certificate comes from
HiGHS through scipy.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .model import Dataset, Ensemble
from .preprocess import RuleCatalog

OPTIMAL = "optimal"
BUDGET_EXHAUSTED = "budget_exhausted"
INFEASIBLE = "infeasible"

_INT_TOL = 1e-6
_PRUNE_TOL = 1e-9
_RESTART_PERIOD = 10_000


class InfeasibleProblemError(ValueError):
    """No feasible partition exists under the given cardinality cap."""

    def __init__(self, message, min_rules=None):
        super().__init__(message)
        self.min_rules = min_rules


@dataclass(frozen=True)
class SolverBudget:
    max_nodes: int = 1_000_000
    max_seconds: float = 60.0

    def __post_init__(self):
        if self.max_nodes < 1 or self.max_seconds <= 0:
            raise ValueError("budget must allow at least one node and positive time")


@dataclass(frozen=True)
class PartitionProblem:
    """An IP instance over remapped constrained rows.

    ``columns[j]`` lists the constrained-row indices covered by column j;
    ``c`` carries the objective coefficients.
    """

    columns: tuple[np.ndarray, ...]
    c: np.ndarray
    n_rows: int
    ell: int | None
    lam: float | None = None

    @property
    def n_columns(self) -> int:
        return len(self.columns)

    def to_debug_dict(self) -> dict:
        return {
            "format_version": 1,
            "n_rows": self.n_rows,
            "ell": self.ell,
            "lambda": self.lam,
            "columns": [col.tolist() for col in self.columns],
            "c": self.c.tolist(),
        }


@dataclass
class PartitionSolution:
    selected: tuple[int, ...]
    objective: float
    best_bound: float
    status: str
    node_count: int = 0
    wall_time: float = 0.0


def build_partition_problem(catalog: RuleCatalog, lam: float,
                            ell: int) -> PartitionProblem:
    """Assemble the IP instance from a preprocessed catalog.

    Rows exist only for points not listed as uncovered; their indices
    are remapped to a contiguous range.
    """
    if catalog.n_rules == 0:
        raise ValueError("empty rule catalog")
    if not 0 <= lam <= 1:
        raise ValueError("lambda must lie in [0, 1]")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    uncovered = set(catalog.uncovered_points)
    row_of = {}
    for i in range(catalog.n_points):
        if i not in uncovered:
            row_of[i] = len(row_of)
    columns = tuple(
        np.array([row_of[i] for i in col if i not in uncovered], dtype=int)
        for col in catalog.columns)
    n_rows = len(row_of)
    covered = np.zeros(n_rows, dtype=bool)
    for col in columns:
        covered[col] = True
    if not covered.all():
        raise ValueError("constrained point without any covering rule")
    c = lam * catalog.phi - (1.0 - lam) * catalog.xi
    return PartitionProblem(columns, c, n_rows, int(ell), lam)


def _dedup_columns(columns, c):
    """Keep one representative (max coefficient) per identical coverage set."""
    best: dict[bytes, int] = {}
    for j, col in enumerate(columns):
        key = np.sort(col).astype(np.int64).tobytes()
        k = best.get(key)
        if k is None or c[j] > c[k]:
            best[key] = j
    reps = sorted(best.values())
    rep_of = {np.sort(columns[j]).astype(np.int64).tobytes(): j for j in reps}

    def map_column(j):
        return rep_of[np.sort(columns[j]).astype(np.int64).tobytes()]

    return reps, map_column


def _check_partition(columns, n_rows, selected) -> bool:
    cover = np.zeros(n_rows, dtype=int)
    for j in selected:
        cover[columns[j]] += 1
    return bool(np.all(cover == 1))


def solve_exact(problem: PartitionProblem,
                budget: SolverBudget | None = None,
                warm: tuple[int, ...] | None = None) -> PartitionSolution:
    """Branch-and-bound maximization of the partition objective.

    Returns a certified optimum, the best incumbent with its bound when
    the budget runs out, or an infeasible status. A warm start must be a
    feasible partition respecting the cardinality cap.
    """
    budget = budget or SolverBudget()
    t0 = time.perf_counter()
    columns, c, n_rows, ell = problem.columns, problem.c, problem.n_rows, problem.ell
    L = len(columns)

    reps, map_col = _dedup_columns(columns, c)
    sub_cols = [columns[j] for j in reps]
    sub_c = c[np.array(reps)] if reps else np.zeros(0)
    Ls = len(reps)
    rep_pos = {j: pos for pos, j in enumerate(reps)}

    incumbent = None
    best_obj = -np.inf
    if warm is not None:
        warm_sub = tuple(sorted({rep_pos[map_col(j)] for j in warm}))
        if not _check_partition(sub_cols, n_rows, warm_sub) or \
                (ell is not None and len(warm_sub) > ell):
            raise ValueError("warm start is not a feasible partition")
        incumbent = warm_sub
        best_obj = float(sum(sub_c[j] for j in warm_sub))

    rows, cols = [], []
    for j, col in enumerate(sub_cols):
        rows.extend(col.tolist())
        cols.extend([j] * col.size)
    A_eq = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n_rows, Ls))
    b_eq = np.ones(n_rows)
    if ell is not None:
        A_ub = sp.csr_matrix(np.ones((1, Ls)))
        b_ub = np.array([float(ell)])
    else:
        A_ub, b_ub = None, None

    def lp_bound(lo, hi):
        res = linprog(-sub_c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                      bounds=np.column_stack([lo, hi]), method="highs")
        if not res.success:
            return None, None
        return -res.fun, res.x

    # Each stack entry: (parent bound, lower fix vector, upper fix vector).
    root = (np.inf, np.zeros(Ls), np.ones(Ls))
    stack = [root]
    node_count = 0
    status = OPTIMAL
    while stack:
        if node_count >= budget.max_nodes or time.perf_counter() - t0 > budget.max_seconds:
            status = BUDGET_EXHAUSTED
            break
        if node_count and node_count % _RESTART_PERIOD == 0:
            stack.sort(key=lambda n: n[0])  # best bound ends up on top
        parent_bound, lo, hi = stack.pop()
        if parent_bound <= best_obj + _PRUNE_TOL:
            continue
        node_count += 1
        bound, z = lp_bound(lo, hi)
        if bound is None or bound <= best_obj + _PRUNE_TOL:
            continue
        frac = np.abs(z - np.round(z))
        if np.all(frac <= _INT_TOL):
            candidate = tuple(np.nonzero(np.round(z) > 0)[0].tolist())
            if _check_partition(sub_cols, n_rows, candidate) and \
                    (ell is None or len(candidate) <= ell):
                obj = float(sum(sub_c[j] for j in candidate))
                if obj > best_obj:
                    best_obj = obj
                    incumbent = candidate
            continue
        # Most fractional variable, ties broken by larger coefficient.
        order = np.lexsort((-sub_c, -frac))
        branch = int(order[0])
        lo1, hi0 = lo.copy(), hi.copy()
        lo1[branch] = 1.0
        hi0[branch] = 0.0
        stack.append((bound, lo, hi0))
        stack.append((bound, lo1, hi))  # dive on z = 1 first

    wall = time.perf_counter() - t0
    if incumbent is None:
        if status == BUDGET_EXHAUSTED:
            return PartitionSolution((), -np.inf, np.inf, BUDGET_EXHAUSTED,
                                     node_count, wall)
        return PartitionSolution((), -np.inf, -np.inf, INFEASIBLE,
                                 node_count, wall)
    if status == OPTIMAL:
        best_bound = best_obj
    else:
        open_bounds = [n[0] for n in stack if n[0] > best_obj]
        best_bound = max(open_bounds, default=best_obj)
    selected = tuple(sorted(reps[j] for j in incumbent))
    assert _check_partition(columns, n_rows, selected)
    return PartitionSolution(selected, best_obj, float(best_bound), status,
                             node_count, wall)


def min_rules_bound(columns, n_rows: int,
                    budget: SolverBudget | None = None) -> int:
    """Minimum number of columns forming an exact cover of the rows."""
    return _cardinality_bound(columns, n_rows, sense=-1, budget=budget)


def max_rules_bound(columns, n_rows: int,
                    budget: SolverBudget | None = None) -> int:
    """Maximum number of columns forming an exact cover of the rows."""
    return _cardinality_bound(columns, n_rows, sense=+1, budget=budget)


def _cardinality_bound(columns, n_rows, sense, budget):
    columns = tuple(np.asarray(col, dtype=int) for col in columns)
    c = float(sense) * np.ones(len(columns))
    problem = PartitionProblem(columns, c, n_rows, ell=None)
    sol = solve_exact(problem, budget=budget)
    if sol.status == INFEASIBLE:
        raise InfeasibleProblemError("no exact cover exists")
    return len(sol.selected)


def heuristic_lower_bound(ens: Ensemble) -> int:
    """Leaf count of the smallest tree: its rules always form a partition."""
    return min(tree.n_leaves for tree in ens.trees)


def heuristic_upper_bound(ds: Dataset, alpha: float = 0.01) -> int:
    """Leaf count of a cost-complexity-pruned tree grown without depth cap."""
    from .forest import CartParams, train_cart

    params = CartParams(max_depth=max(1, ds.n_points), min_samples_leaf=1,
                        features_per_split="all", cost_complexity_alpha=alpha)
    return train_cart(ds, params).n_leaves


def sweep_ell(catalog: RuleCatalog, lam: float, ell_range: tuple[int, int],
              budget: SolverBudget | None = None) -> list[PartitionSolution]:
    """Solve the partition IP for each cap in the range, ascending.

    Each cap's incumbent warm-starts the next (a feasible partition for
    cap ell stays feasible for ell + 1), so objectives never decrease.
    """
    lo, hi = ell_range
    if lo > hi:
        raise ValueError("empty ell range")
    solutions = []
    warm = None
    for ell in range(lo, hi + 1):
        problem = build_partition_problem(catalog, lam, ell)
        sol = solve_exact(problem, budget=budget, warm=warm)
        if sol.status == INFEASIBLE:
            m = min_rules_bound(problem.columns, problem.n_rows, budget)
            raise InfeasibleProblemError(
                f"no partition with at most {ell} rules; minimum is {m}",
                min_rules=m)
        solutions.append(sol)
        warm = sol.selected if sol.selected else None
    return solutions
