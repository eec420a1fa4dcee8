"""Per-rule stability, loss, normalization and the assignment matrix.

The catalog flattens an ensemble into L rules and attaches everything
the partition solver needs: normalized stability and loss vectors, the
point/rule coverage columns, and bookkeeping for minimum-coverage
filtering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .evaluate import BulkEvaluator
from .model import CLASSIFICATION, Dataset, Ensemble, Rule, enumerate_rules


def dice_index(set_a: frozenset, set_b: frozenset) -> float:
    """Sorensen-Dice overlap 2|A&B| / (|A|+|B|) between splitting sets."""
    if not set_a or not set_b:
        raise ValueError("dice_index requires non-empty sets")
    return 2.0 * len(set_a & set_b) / (len(set_a) + len(set_b))


@dataclass(frozen=True)
class RuleCatalog:
    """Flattened ensemble rules plus preprocessed solver inputs.

    ``columns[j]`` holds the training point indices covered by rule j
    (the j-th column of the binary assignment matrix). ``phi`` and
    ``xi`` are the min-max normalized stability and loss vectors;
    ``raw_phi`` / ``raw_xi`` keep the pre-normalization values.
    """

    rules: tuple[Rule, ...]
    columns: tuple[np.ndarray, ...]
    raw_phi: np.ndarray
    raw_xi: np.ndarray
    phi: np.ndarray
    xi: np.ndarray
    n_points: int
    task: str
    uncovered_points: tuple[int, ...] = ()

    @property
    def n_rules(self) -> int:
        return len(self.rules)

    def coverage_counts(self) -> np.ndarray:
        return np.array([c.size for c in self.columns], dtype=int)

    def to_debug_dict(self) -> dict:
        return {
            "format_version": 1,
            "n_points": self.n_points,
            "task": self.task,
            "uncovered_points": list(self.uncovered_points),
            "rules": [
                {
                    "tree_id": r.tree_id,
                    "n_conditions": len(r.conditions),
                    "phi": float(self.phi[j]),
                    "xi": float(self.xi[j]),
                    "raw_phi": float(self.raw_phi[j]),
                    "raw_xi": float(self.raw_xi[j]),
                    "covered": self.columns[j].tolist(),
                }
                for j, r in enumerate(self.rules)
            ],
        }


def compute_stability(splitting_sets: list[frozenset],
                      weights: np.ndarray | None = None) -> np.ndarray:
    """Raw stability: weighted Dice overlap of each rule against all others.

    The sum runs over every other rule of the whole ensemble, same-tree
    rules included. O(L^2) pairs, evaluated through a sparse incidence
    matrix of splitting ids.
    """
    L = len(splitting_sets)
    if L == 0:
        return np.zeros(0)
    if weights is None:
        weights = np.ones(L)
    else:
        weights = np.abs(np.asarray(weights, dtype=float))
    ids: dict[tuple, int] = {}
    rows, cols = [], []
    for j, s in enumerate(splitting_sets):
        for splitting in s:
            u = ids.setdefault(splitting, len(ids))
            rows.append(j)
            cols.append(u)
    M = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(L, len(ids)))
    inter = (M @ M.T).toarray()  # |S_j & S_l|
    sizes = np.array([len(s) for s in splitting_sets], dtype=float)
    denom = sizes[:, None] + sizes[None, :]
    dice = 2.0 * inter / denom
    np.fill_diagonal(dice, 0.0)
    return dice @ weights


def compute_loss(columns: list[np.ndarray], ds: Dataset) -> np.ndarray:
    """Raw loss per rule over its covered training points.

    Classification: misclassified count under the covered majority.
    Regression: mean squared deviation from the covered mean. Rules
    covering nothing get loss 0 (they are dropped before the solver).
    """
    out = np.zeros(len(columns))
    for j, idx in enumerate(columns):
        if idx.size == 0:
            continue
        y = ds.targets[idx]
        if ds.task == CLASSIFICATION:
            _, counts = np.unique(y, return_counts=True)
            out[j] = idx.size - int(counts.max())
        else:
            out[j] = float(np.mean((y - np.mean(y)) ** 2))
    return out


def normalize(raw: np.ndarray) -> np.ndarray:
    """Min-max scale to [0, 1]; a constant vector maps to zeros."""
    raw = np.asarray(raw, dtype=float)
    if raw.size == 0:
        return raw.copy()
    lo, hi = raw.min(), raw.max()
    if hi - lo <= 0:
        return np.zeros_like(raw)
    return (raw - lo) / (hi - lo)


def assignment_columns(rules: list[Rule], ds: Dataset,
                       pool=None) -> list[np.ndarray]:
    """Covered point indices per rule (column-sparse assignment matrix)."""
    ev = BulkEvaluator(ds.points, pool)
    return [np.nonzero(ev.rule_mask(r))[0] for r in rules]


def assignment_matrix(rules: list[Rule], ds: Dataset, pool=None) -> np.ndarray:
    """Dense N x L binary assignment matrix (debugging helper)."""
    cols = assignment_columns(rules, ds, pool)
    A = np.zeros((ds.n_points, len(rules)), dtype=np.int8)
    for j, idx in enumerate(cols):
        A[idx, j] = 1
    return A


def build_catalog(ens: Ensemble, ds: Dataset) -> RuleCatalog:
    """Enumerate rules and preprocess stability, loss and assignments.

    Stability is computed on the full unfiltered catalog, then rules
    with zero training coverage are removed (they cannot satisfy any
    equality constraint and carry undefined loss). Regression rule
    predictions are recomputed as covered-set means so they stay
    consistent with the assignment matrix.
    """
    rules = enumerate_rules(ens)
    raw_phi = compute_stability([r.splitting_set for r in rules],
                                np.array([r.weight for r in rules]))
    columns = assignment_columns(rules, ds, ens.shapelet_pool)
    keep = [j for j, c in enumerate(columns) if c.size > 0]
    rules = [rules[j] for j in keep]
    columns = [columns[j] for j in keep]
    raw_phi = raw_phi[keep]
    refreshed = []
    for r, idx in zip(rules, columns):
        y = ds.targets[idx]
        pred = r.prediction if ds.task == CLASSIFICATION else float(np.mean(y))
        refreshed.append(r.with_prediction(pred).with_coverage(idx.size))
    rules = refreshed
    raw_xi = compute_loss(columns, ds)
    return RuleCatalog(
        rules=tuple(rules),
        columns=tuple(columns),
        raw_phi=raw_phi,
        raw_xi=raw_xi,
        phi=normalize(raw_phi),
        xi=normalize(raw_xi),
        n_points=ds.n_points,
        task=ds.task,
    )


def filter_min_coverage(catalog: RuleCatalog, n_min_fraction: float) -> RuleCatalog:
    """Drop rules covering fewer than ceil(n_min_fraction * N) points.

    Points stripped of every covering rule trigger a repair pass: their
    dropped rules are restored in descending coverage order until each
    point has a candidate again, or the point is recorded as uncovered
    and its equality constraint omitted downstream.
    """
    if not 0 <= n_min_fraction < 1:
        raise ValueError("n_min_fraction must be in [0, 1)")
    if n_min_fraction == 0:
        return catalog
    threshold = math.ceil(n_min_fraction * catalog.n_points)
    counts = catalog.coverage_counts()
    kept = set(np.nonzero(counts >= threshold)[0].tolist())
    dropped = [j for j in range(catalog.n_rules) if j not in kept]

    covered_by = [0] * catalog.n_points
    for j in kept:
        for i in catalog.columns[j]:
            covered_by[i] += 1

    uncovered = []
    dropped_sorted = sorted(dropped, key=lambda j: -counts[j])
    for i in range(catalog.n_points):
        if covered_by[i] > 0:
            continue
        restored = False
        for j in dropped_sorted:
            if j not in kept and i in catalog.columns[j]:
                kept.add(j)
                for p in catalog.columns[j]:
                    covered_by[p] += 1
                restored = True
                break
        if not restored:
            uncovered.append(i)

    order = sorted(kept)
    return replace(
        catalog,
        rules=tuple(catalog.rules[j] for j in order),
        columns=tuple(catalog.columns[j] for j in order),
        raw_phi=catalog.raw_phi[order],
        raw_xi=catalog.raw_xi[order],
        phi=catalog.phi[order],
        xi=catalog.xi[order],
        uncovered_points=tuple(uncovered),
    )
