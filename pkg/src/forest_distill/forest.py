"""CART trainer, bagged random forest and impurity-based importance.

Trees are grown on axis-aligned midpoint splits with Gini (classification)
or variance (regression) impurity, optional cost-complexity pruning, and
converted to rule form for the rest of the toolkit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evaluate import BulkEvaluator
from .model import (
    AXIS,
    CLASSIFICATION,
    GT,
    LE,
    SHAPELET,
    Condition,
    Dataset,
    Ensemble,
    Rule,
    Tree,
    always_true_rule,
    axis_selector,
)
from .splitting import best_threshold, impurity, leaf_prediction


class UnsupportedSelectorError(TypeError):
    """Raised when an operation meets a selector kind it cannot handle."""


@dataclass(frozen=True)
class CartParams:
    max_depth: int = 3
    min_samples_leaf: int = 1
    n_trees: int = 100
    features_per_split: int | str = "all"  # "all", "sqrt", "third" or a count
    rng_seed: int = 0
    cost_complexity_alpha: float = 0.0

    def __post_init__(self):
        if self.max_depth < 1 or self.min_samples_leaf < 1 or self.n_trees < 1:
            raise ValueError("max_depth, min_samples_leaf and n_trees must be >= 1")
        if self.cost_complexity_alpha < 0:
            raise ValueError("cost_complexity_alpha must be >= 0")

    def resolved_features(self, n_features: int, task: str) -> int:
        f = self.features_per_split
        if f == "all":
            return n_features
        if f == "sqrt":
            return max(1, int(round(np.sqrt(n_features))))
        if f == "third":
            return max(1, n_features // 3)
        return min(int(f), n_features)


class _Node:
    __slots__ = ("feature", "threshold", "left", "right", "indices", "prediction")

    def __init__(self, indices):
        self.indices = indices
        self.feature = None
        self.threshold = None
        self.left = None
        self.right = None
        self.prediction = None

    @property
    def is_leaf(self):
        return self.feature is None


def _grow(ds: Dataset, params: CartParams, rng: np.random.Generator,
          n_candidates: int, indices: np.ndarray, depth: int) -> _Node:
    node = _Node(indices)
    y = ds.targets[indices]
    parent_imp = impurity(y, ds.task)
    node.prediction = leaf_prediction(y, ds.task)
    if (depth >= params.max_depth or indices.size < 2 * params.min_samples_leaf
            or parent_imp <= 0.0):
        return node
    if n_candidates < ds.n_features:
        features = np.sort(rng.choice(ds.n_features, size=n_candidates, replace=False))
    else:
        features = np.arange(ds.n_features)
    best = None  # (gain, feature, threshold); ties -> lowest feature, lowest threshold
    for p in features:
        cand = best_threshold(ds.points[indices, p], y, ds.task, parent_imp)
        if cand is not None and (best is None or cand[0] > best[0]):
            best = (cand[0], int(p), cand[1])
    if best is None or best[0] <= 0.0:
        return node
    _, p, thr = best
    left_mask = ds.points[indices, p] <= thr
    n_left = int(np.count_nonzero(left_mask))
    if n_left < params.min_samples_leaf or indices.size - n_left < params.min_samples_leaf:
        return node
    node.feature = p
    node.threshold = thr
    node.left = _grow(ds, params, rng, n_candidates, indices[left_mask], depth + 1)
    node.right = _grow(ds, params, rng, n_candidates, indices[~left_mask], depth + 1)
    return node


def _node_error(node: _Node, ds: Dataset) -> float:
    """Resubstitution error of the node treated as a leaf (unnormalized)."""
    y = ds.targets[node.indices]
    if ds.task == CLASSIFICATION:
        return float(node.indices.size - np.count_nonzero(y == node.prediction))
    return float(np.sum((y - np.mean(y)) ** 2))


def _prune(root: _Node, ds: Dataset, alpha: float) -> _Node:
    """Weakest-link cost-complexity pruning with complexity parameter alpha.

    Error terms are normalized by the training set size, matching the
    usual R(T) + alpha * |leaves| criterion.
    """
    n_total = ds.n_points

    def subtree_stats(node: _Node):
        # returns (subtree error, leaf count)
        if node.is_leaf:
            return _node_error(node, ds) / n_total, 1
        le, ln = subtree_stats(node.left)
        re, rn = subtree_stats(node.right)
        return le + re, ln + rn

    while not root.is_leaf:
        weakest = [None]  # (alpha_eff, node)

        def visit(node: _Node):
            if node.is_leaf:
                return
            sub_err, n_leaves = subtree_stats(node)
            own_err = _node_error(node, ds) / n_total
            alpha_eff = (own_err - sub_err) / (n_leaves - 1)
            if weakest[0] is None or alpha_eff < weakest[0][0]:
                weakest[0] = (alpha_eff, node)
            visit(node.left)
            visit(node.right)

        visit(root)
        alpha_eff, node = weakest[0]
        if alpha_eff > alpha:
            break
        node.feature = None
        node.threshold = None
        node.left = None
        node.right = None
    return root


def _to_rules(root: _Node, tree_id: int) -> Tree:
    rules: list[Rule] = []

    def walk(node: _Node, conditions: tuple[Condition, ...]):
        if node.is_leaf:
            if conditions:
                rules.append(Rule(conditions, node.prediction, tree_id,
                                  coverage=int(node.indices.size)))
            else:
                rules.append(always_true_rule(node.prediction, tree_id)
                             .with_coverage(int(node.indices.size)))
            return
        sel = axis_selector(node.feature)
        walk(node.left, conditions + (Condition(sel, node.threshold, LE),))
        walk(node.right, conditions + (Condition(sel, node.threshold, GT),))

    walk(root, ())
    return Tree(tree_id, tuple(rules))


def train_cart(ds: Dataset, params: CartParams,
               rng: np.random.Generator | None = None,
               tree_id: int = 0,
               sample_indices: np.ndarray | None = None) -> Tree:
    """Grow (and optionally prune) one axis-aligned CART tree."""
    if rng is None:
        rng = np.random.default_rng(params.rng_seed)
    idx = np.arange(ds.n_points) if sample_indices is None else np.asarray(sample_indices)
    n_candidates = params.resolved_features(ds.n_features, ds.task)
    root = _grow(ds, params, rng, n_candidates, idx, 0)
    if params.cost_complexity_alpha > 0.0:
        root = _prune(root, ds, params.cost_complexity_alpha)
    return _to_rules(root, tree_id)


def train_random_forest(ds: Dataset, params: CartParams) -> Ensemble:
    """Bag ``n_trees`` CART trees on bootstrap resamples of size N.

    When ``features_per_split`` is left at "all", the random-forest
    defaults apply: sqrt(P) candidates for classification, P/3 for
    regression. Per-tree generators derive from (seed, tree index).
    """
    fps = params.features_per_split
    if fps == "all":
        fps = "sqrt" if ds.task == CLASSIFICATION else "third"
    tree_params = CartParams(params.max_depth, params.min_samples_leaf,
                             params.n_trees, fps, params.rng_seed,
                             params.cost_complexity_alpha)
    trees = []
    for k in range(params.n_trees):
        tree_rng = np.random.default_rng([params.rng_seed, k])
        boot = tree_rng.integers(ds.n_points, size=ds.n_points)
        trees.append(train_cart(ds, tree_params, tree_rng, tree_id=k,
                                sample_indices=boot))
    return Ensemble(tuple(trees), ds.task)


def _branch_nodes(tree: Tree):
    """Reconstruct the branch nodes of a rule-form tree.

    Yields (prefix, splitting) pairs: each distinct proper prefix of the
    tree's rules is one internal node, and the splitting is the
    (selector, threshold) its children test.
    """
    seen = set()
    for rule in tree.rules:
        for depth in range(len(rule.conditions)):
            prefix = rule.conditions[:depth]
            if prefix in seen:
                continue
            seen.add(prefix)
            yield prefix, rule.conditions[depth].splitting


def impurity_decreases(ens: Ensemble, ds: Dataset) -> dict[tuple, float]:
    """Total weighted impurity decrease per selector, audited on ``ds``.

    Skips the vacuous condition of single-leaf trees (it never splits).
    """
    out: dict[tuple, float] = {}
    ev = BulkEvaluator(ds.points, ens.shapelet_pool)
    n_total = ds.n_points
    for tree in ens.trees:
        if tree.n_leaves == 1:
            continue
        for prefix, (selector, threshold) in _branch_nodes(tree):
            mask = np.ones(n_total, dtype=bool)
            for cond in prefix:
                mask &= ev.condition_mask(cond)
            n_node = int(np.count_nonzero(mask))
            if n_node == 0:
                continue
            left = mask & ev.condition_mask(Condition(selector, threshold, LE))
            right = mask & ~left
            n_left = int(np.count_nonzero(left))
            n_right = n_node - n_left
            decrease = (n_node / n_total) * impurity(ds.targets[mask], ds.task)
            if n_left:
                decrease -= (n_left / n_total) * impurity(ds.targets[left], ds.task)
            if n_right:
                decrease -= (n_right / n_total) * impurity(ds.targets[right], ds.task)
            out[selector] = out.get(selector, 0.0) + decrease
    return out


def mdi_importance(ens: Ensemble, ds: Dataset) -> np.ndarray:
    """Per-feature mean-decrease-impurity vector, normalized to sum 1.

    Only defined for axis-aligned (tabular) ensembles; use
    ``shapelet_importance`` for temporal ones.
    """
    decreases = impurity_decreases(ens, ds)
    if any(sel[0] != AXIS for sel in decreases):
        raise UnsupportedSelectorError(
            "mdi_importance only supports axis selectors; "
            "use shapelet_importance for temporal ensembles")
    imp = np.zeros(ds.n_features)
    for (_, p), value in decreases.items():
        imp[p] += value
    total = imp.sum()
    return imp / total if total > 0 else imp


def shapelet_importance(ens: Ensemble, ds: Dataset) -> dict[int, float]:
    """Importance per shapelet id for temporal ensembles, summing to 1."""
    decreases = impurity_decreases(ens, ds)
    if any(sel[0] != SHAPELET for sel in decreases):
        raise UnsupportedSelectorError("ensemble mixes selector kinds")
    total = sum(decreases.values())
    if total <= 0:
        return {sid: 0.0 for (_, sid) in decreases}
    return {sid: value / total for (_, sid), value in decreases.items()}
