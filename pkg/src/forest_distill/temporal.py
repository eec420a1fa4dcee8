"""Subsequence distance and a simplified random shapelet forest.

The forest grows bagged trees whose branch nodes test the minimum
sliding Euclidean distance between a series and a sampled subsequence.
Per node, a handful of candidate shapelets is drawn and the split with
the best impurity decrease wins; thresholds come from midpoints of the
sorted distance values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    GT,
    LE,
    Condition,
    Dataset,
    Ensemble,
    Rule,
    Shapelet,
    Tree,
    always_true_rule,
    shapelet_selector,
)
from .splitting import best_threshold, impurity, leaf_prediction


def subsequence_distance(x: np.ndarray, z: np.ndarray) -> float:
    """Minimum Euclidean distance between ``z`` and any window of ``x``.

    ``x`` has length P, ``z`` length J <= P; the minimum runs over all
    P - J + 1 contiguous windows of ``x``.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    P, J = x.shape[-1], z.shape[-1]
    if J > P:
        raise ValueError(f"shapelet length {J} exceeds series length {P}")
    windows = np.lib.stride_tricks.sliding_window_view(x, J)
    dists = np.sqrt(np.sum((windows - z) ** 2, axis=-1))
    return float(np.min(dists))


def subsequence_distances(X: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Vectorized ``subsequence_distance`` over the rows of ``X``."""
    X = np.asarray(X, dtype=float)
    z = np.asarray(z, dtype=float)
    windows = np.lib.stride_tricks.sliding_window_view(X, z.shape[-1], axis=1)
    d2 = np.sum((windows - z) ** 2, axis=-1)
    return np.sqrt(np.min(d2, axis=-1))


@dataclass(frozen=True)
class ShapeletForestParams:
    n_trees: int = 50
    max_depth: int = 3
    shapelets_per_node: int = 10
    length_bounds: tuple[int, int] | None = None  # defaults to (0.1 P, P)
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1 or self.max_depth < 1 or self.shapelets_per_node < 1:
            raise ValueError("n_trees, max_depth and shapelets_per_node must be >= 1")

    def resolved_bounds(self, series_length: int) -> tuple[int, int]:
        if self.length_bounds is None:
            lo = max(1, int(round(0.1 * series_length)))
            return lo, series_length
        lo, hi = self.length_bounds
        if not 1 <= lo <= hi <= series_length:
            raise ValueError(f"length bounds {self.length_bounds} invalid for P={series_length}")
        return lo, hi


def sample_shapelets(ds: Dataset, params: ShapeletForestParams,
                     rng: np.random.Generator) -> list[Shapelet]:
    """Draw ``shapelets_per_node`` subsequences uniformly from the data."""
    if ds.n_points == 0:
        raise ValueError("cannot sample shapelets from an empty dataset")
    lo, hi = params.resolved_bounds(ds.n_features)
    out = []
    for _ in range(params.shapelets_per_node):
        i = int(rng.integers(ds.n_points))
        J = int(rng.integers(lo, hi + 1))
        p = int(rng.integers(ds.n_features - J + 1))
        values = tuple(float(v) for v in ds.points[i, p:p + J])
        out.append(Shapelet(values, source=(i, p)))
    return out


def train_shapelet_tree(ds: Dataset, params: ShapeletForestParams,
                        rng: np.random.Generator,
                        tree_id: int = 0,
                        pool: dict[int, Shapelet] | None = None,
                        sample_indices: np.ndarray | None = None) -> Tree:
    """Grow one shapelet tree by recursive best-impurity splitting.

    ``pool`` collects the shapelets actually used, deduplicated by value,
    so multiple trees of an ensemble can share one store.
    """
    if pool is None:
        pool = {}
    pool_index: dict[tuple, int] = {s.values: sid for sid, s in pool.items()}
    idx = np.arange(ds.n_points) if sample_indices is None else np.asarray(sample_indices)
    rules: list[Rule] = []

    def intern(shapelet: Shapelet) -> int:
        sid = pool_index.get(shapelet.values)
        if sid is None:
            sid = len(pool)
            pool[sid] = shapelet
            pool_index[shapelet.values] = sid
        return sid

    def grow(node_idx: np.ndarray, conditions: tuple[Condition, ...], depth: int):
        y = ds.targets[node_idx]
        parent_imp = impurity(y, ds.task)
        if depth >= params.max_depth or node_idx.size < 2 or parent_imp <= 0.0:
            _emit_leaf(node_idx, conditions)
            return
        best = None  # (gain, threshold, shapelet, distances)
        for shapelet in sample_shapelets(ds, params, rng):
            dists = subsequence_distances(ds.points[node_idx], shapelet.as_array())
            cand = best_threshold(dists, y, ds.task, parent_imp)
            if cand is not None and (best is None or cand[0] > best[0]):
                best = (cand[0], cand[1], shapelet, dists)
        if best is None or best[0] <= 0.0:
            _emit_leaf(node_idx, conditions)
            return
        _, thr, shapelet, dists = best
        sid = intern(shapelet)
        sel = shapelet_selector(sid)
        left = dists <= thr
        grow(node_idx[left], conditions + (Condition(sel, thr, LE),), depth + 1)
        grow(node_idx[~left], conditions + (Condition(sel, thr, GT),), depth + 1)

    def _emit_leaf(node_idx: np.ndarray, conditions: tuple[Condition, ...]):
        pred = leaf_prediction(ds.targets[node_idx], ds.task)
        if conditions:
            rules.append(Rule(conditions, pred, tree_id, coverage=int(node_idx.size)))
        else:
            rules.append(always_true_rule(pred, tree_id).with_coverage(int(node_idx.size)))

    grow(idx, (), 0)
    return Tree(tree_id, tuple(rules))


def train_shapelet_forest(ds: Dataset, params: ShapeletForestParams) -> Ensemble:
    """Bag ``n_trees`` shapelet trees over bootstrap resamples of size N.

    Each tree's generator is derived from (seed, tree index), so a
    parallel build would reproduce the serial result bit for bit.
    """
    pool: dict[int, Shapelet] = {}
    trees = []
    for k in range(params.n_trees):
        tree_rng = np.random.default_rng([params.rng_seed, k])
        boot = tree_rng.integers(ds.n_points, size=ds.n_points)
        trees.append(train_shapelet_tree(ds, params, tree_rng, tree_id=k,
                                         pool=pool, sample_indices=boot))
    return Ensemble(tuple(trees), ds.task, pool)
