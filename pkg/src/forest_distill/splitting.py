"""Impurity measures and threshold search shared by the tree trainers."""

from __future__ import annotations

import numpy as np

from .model import CLASSIFICATION, REGRESSION


def gini(y: np.ndarray) -> float:
    _, counts = np.unique(y, return_counts=True)
    frac = counts / y.shape[0]
    return 1.0 - float(np.sum(frac * frac))


def variance(y: np.ndarray) -> float:
    return float(np.var(y))


def impurity(y: np.ndarray, task: str) -> float:
    return gini(y) if task == CLASSIFICATION else variance(y)


def leaf_prediction(y: np.ndarray, task: str):
    """Most frequent class (ties to the smallest label) or mean target."""
    if task == REGRESSION:
        return float(np.mean(y))
    labels, counts = np.unique(y, return_counts=True)
    return int(labels[np.argmax(counts)])


def best_threshold(values: np.ndarray, y: np.ndarray, task: str,
                   parent_impurity: float) -> tuple[float, float] | None:
    """Best midpoint split of ``values``, or None when all values tie.

    Returns (gain, threshold). Thresholds are midpoints between
    consecutive distinct sorted values; among equal gains the lowest
    threshold wins.
    """
    order = np.argsort(values, kind="stable")
    v, ys = values[order], y[order]
    distinct = np.nonzero(np.diff(v) > 0)[0]
    if distinct.size == 0:
        return None
    n = v.shape[0]
    best = None
    for cut in distinct:
        left, right = ys[:cut + 1], ys[cut + 1:]
        imp = (left.size / n) * impurity(left, task) \
            + (right.size / n) * impurity(right, task)
        gain = parent_impurity - imp
        thr = 0.5 * (v[cut] + v[cut + 1])
        if best is None or gain > best[0]:
            best = (gain, float(thr))
    return best
