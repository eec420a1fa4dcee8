"""Bulk evaluation of conditions and rules over a whole dataset.

Caches the selector value vector per distinct selector (one distance
computation per shapelet id, one column read per axis index) and the
boolean mask per distinct condition, so evaluating thousands of rules
stays cheap.
"""

from __future__ import annotations

import numpy as np

from .model import AXIS, LE, SHAPELET, Condition, Rule, Shapelet, ShapeletReferenceError


class BulkEvaluator:
    def __init__(self, points: np.ndarray, pool: dict[int, Shapelet] | None = None):
        self.points = np.asarray(points, dtype=float)
        self.pool = pool or {}
        self._values: dict[tuple, np.ndarray] = {}
        self._masks: dict[Condition, np.ndarray] = {}

    def selector_values(self, selector: tuple) -> np.ndarray:
        cached = self._values.get(selector)
        if cached is not None:
            return cached
        kind, ref = selector
        if kind == AXIS:
            if not 0 <= ref < self.points.shape[1]:
                raise IndexError(f"axis index {ref} out of range")
            values = self.points[:, ref]
        elif kind == SHAPELET:
            from .temporal import subsequence_distances

            if ref not in self.pool:
                raise ShapeletReferenceError(ref)
            values = subsequence_distances(self.points, self.pool[ref].as_array())
        else:
            raise ValueError(f"invalid selector kind {kind!r}")
        self._values[selector] = values
        return values

    def condition_mask(self, cond: Condition) -> np.ndarray:
        cached = self._masks.get(cond)
        if cached is not None:
            return cached
        values = self.selector_values(cond.selector)
        mask = values <= cond.threshold if cond.sign == LE else values > cond.threshold
        self._masks[cond] = mask
        return mask

    def rule_mask(self, rule: Rule) -> np.ndarray:
        mask = np.ones(self.points.shape[0], dtype=bool)
        for cond in rule.conditions:
            mask &= self.condition_mask(cond)
        return mask
