"""Core domain types: datasets, conditions, rules, trees and ensembles.

A trained tree is stored as the set of its root-to-leaf rules. Every type
here is immutable after construction, so instances can be shared freely
across threads.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

import numpy as np

CLASSIFICATION = "classification"
REGRESSION = "regression"

LE = "le"
GT = "gt"

AXIS = "axis"
SHAPELET = "shapelet"

# Threshold used for the vacuous condition of a single-leaf tree: every
# finite value passes "x[0] <= max float".
ALWAYS_TRUE_THRESHOLD = sys.float_info.max


class CorruptedTreeError(Exception):
    """A tree's rules do not partition the feature space."""


class ShapeletReferenceError(KeyError):
    """A condition references a shapelet id missing from the pool."""


@dataclass(frozen=True)
class Dataset:
    """Training or evaluation data.

    ``points`` is an (N, P) float array holding either tabular feature
    vectors or time series of length P. Classification targets are
    contiguous integer class ids; ``label_names`` keeps the original
    labels when a reader remapped them.
    """

    points: np.ndarray
    targets: np.ndarray
    task: str
    feature_names: tuple[str, ...] | None = None
    label_names: tuple | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        tgt = np.asarray(self.targets)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("points must be a non-empty (N, P) array")
        if tgt.shape != (pts.shape[0],):
            raise ValueError("targets must have one entry per point")
        if self.task not in (CLASSIFICATION, REGRESSION):
            raise ValueError(f"unknown task {self.task!r}")
        if self.task == CLASSIFICATION:
            tgt = tgt.astype(int)
        else:
            tgt = tgt.astype(float)
            if not np.all(np.isfinite(tgt)):
                raise ValueError("regression targets must be finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "targets", tgt)
        if self.feature_names is not None and len(self.feature_names) != pts.shape[1]:
            raise ValueError("feature_names length must equal P")

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def n_features(self) -> int:
        return self.points.shape[1]

    @property
    def classes(self) -> np.ndarray:
        if self.task != CLASSIFICATION:
            raise ValueError("classes only defined for classification")
        return np.unique(self.targets)


@dataclass(frozen=True)
class Shapelet:
    """A stored subsequence acting as a temporal feature extractor."""

    values: tuple[float, ...]
    source: tuple[int, int] = (-1, -1)  # (series index, start position)

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError("shapelet must be non-empty")
        if not all(np.isfinite(v) for v in self.values):
            raise ValueError("shapelet values must be finite")

    @property
    def length(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


# A feature selector is a hashable pair: ("axis", p) selects the p-th
# coordinate, ("shapelet", sid) selects the subsequence distance to the
# pooled shapelet with id sid.
Selector = tuple


def axis_selector(p: int) -> Selector:
    return (AXIS, int(p))


def shapelet_selector(sid: int) -> Selector:
    return (SHAPELET, int(sid))


@dataclass(frozen=True)
class Condition:
    """One branch-node test: selector value compared against a threshold."""

    selector: Selector
    threshold: float
    sign: str  # LE or GT

    def __post_init__(self):
        if self.sign not in (LE, GT):
            raise ValueError(f"invalid sign {self.sign!r}")
        if not np.isfinite(self.threshold):
            raise ValueError("threshold must be finite")
        kind = self.selector[0]
        if kind not in (AXIS, SHAPELET):
            raise ValueError(f"invalid selector kind {kind!r}")

    @property
    def splitting(self) -> tuple:
        """The sign-stripped (selector, threshold) pair."""
        return (self.selector, self.threshold)

    def flipped(self) -> "Condition":
        return Condition(self.selector, self.threshold, GT if self.sign == LE else LE)


@dataclass(frozen=True)
class Rule:
    """Ordered conjunction of conditions along a root-to-leaf path."""

    conditions: tuple[Condition, ...]
    prediction: float | int
    tree_id: int = 0
    weight: float = 1.0
    coverage: int = 0

    def __post_init__(self):
        if len(self.conditions) == 0:
            raise ValueError("rule needs at least one condition")
        if self.coverage < 0:
            raise ValueError("coverage must be non-negative")
        if not np.isfinite(self.weight):
            raise ValueError("weight must be finite")

    @property
    def splitting_set(self) -> frozenset:
        """Conditions with their inequality signs stripped."""
        return frozenset(c.splitting for c in self.conditions)

    def with_coverage(self, coverage: int) -> "Rule":
        return Rule(self.conditions, self.prediction, self.tree_id,
                    self.weight, int(coverage))

    def with_prediction(self, prediction) -> "Rule":
        return Rule(self.conditions, prediction, self.tree_id,
                    self.weight, self.coverage)


@dataclass(frozen=True)
class Tree:
    """A decision tree represented by its leaf rules.

    The rules of a valid tree partition the feature space: every point
    satisfies exactly one of them.
    """

    tree_id: int
    rules: tuple[Rule, ...]

    def __post_init__(self):
        if len(self.rules) == 0:
            raise ValueError("tree needs at least one rule")
        if any(r.tree_id != self.tree_id for r in self.rules):
            raise ValueError("all rules must share the tree id")

    @property
    def depth(self) -> int:
        return max(len(r.conditions) for r in self.rules)

    @property
    def n_leaves(self) -> int:
        return len(self.rules)


@dataclass(frozen=True)
class Ensemble:
    """Disjoint union of trees, with an optional shapelet pool.

    Shapelets live once in the ensemble-level pool and conditions refer
    to them by id, so identical shapelet splittings in different trees
    compare equal.
    """

    trees: tuple[Tree, ...]
    task: str
    shapelet_pool: dict[int, Shapelet] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.trees) == 0:
            raise ValueError("ensemble needs at least one tree")
        if self.task not in (CLASSIFICATION, REGRESSION):
            raise ValueError(f"unknown task {self.task!r}")
        for tree in self.trees:
            for rule in tree.rules:
                for cond in rule.conditions:
                    if cond.selector[0] == SHAPELET and cond.selector[1] not in self.shapelet_pool:
                        raise ShapeletReferenceError(cond.selector[1])

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    @property
    def is_temporal(self) -> bool:
        return len(self.shapelet_pool) > 0


def selector_value(selector: Selector, x: np.ndarray,
                   pool: dict[int, Shapelet] | None = None) -> float:
    """Evaluate a feature selector on one point."""
    from .temporal import subsequence_distance  # local import, avoids cycle

    kind, ref = selector
    x = np.asarray(x, dtype=float)
    if kind == AXIS:
        if not 0 <= ref < x.shape[-1]:
            raise IndexError(f"axis index {ref} out of range for P={x.shape[-1]}")
        return float(x[ref])
    if kind == SHAPELET:
        if pool is None or ref not in pool:
            raise ShapeletReferenceError(ref)
        return subsequence_distance(x, pool[ref].as_array())
    raise ValueError(f"invalid selector kind {kind!r}")


def evaluate_condition(cond: Condition, x: np.ndarray,
                       pool: dict[int, Shapelet] | None = None) -> bool:
    """True when the point passes the condition's threshold test."""
    value = selector_value(cond.selector, x, pool)
    if cond.sign == LE:
        return value <= cond.threshold
    return value > cond.threshold


def rule_satisfied(rule: Rule, x: np.ndarray,
                   pool: dict[int, Shapelet] | None = None) -> bool:
    """Conjunction over the rule's conditions, short-circuiting."""
    return all(evaluate_condition(c, x, pool) for c in rule.conditions)


def tree_predict(tree: Tree, x: np.ndarray,
                 pool: dict[int, Shapelet] | None = None):
    """Prediction of the unique rule satisfied by ``x``."""
    matched = [r for r in tree.rules if rule_satisfied(r, x, pool)]
    if len(matched) != 1:
        raise CorruptedTreeError(
            f"tree {tree.tree_id}: point satisfied {len(matched)} rules")
    return matched[0].prediction


def ensemble_predict(ens: Ensemble, x: np.ndarray):
    """Majority vote (classification) or mean (regression) over trees.

    Vote ties are broken by the smallest class index.
    """
    preds = [tree_predict(t, x, ens.shapelet_pool) for t in ens.trees]
    if ens.task == REGRESSION:
        return float(np.mean(preds))
    labels, counts = np.unique(np.asarray(preds, dtype=int), return_counts=True)
    return int(labels[np.argmax(counts)])  # unique() sorts, argmax takes first max


def enumerate_rules(ens: Ensemble) -> list[Rule]:
    """All L rules of the ensemble in deterministic (tree, leaf) order."""
    out: list[Rule] = []
    for tree in ens.trees:
        out.extend(tree.rules)
    return out


def always_true_rule(prediction, tree_id: int = 0, weight: float = 1.0) -> Rule:
    """Single vacuous rule for a degenerate one-leaf tree."""
    cond = Condition(axis_selector(0), ALWAYS_TRUE_THRESHOLD, LE)
    return Rule((cond,), prediction, tree_id, weight)
