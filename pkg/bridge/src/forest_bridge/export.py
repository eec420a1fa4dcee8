"""Export fitted scikit-learn forests as ensemble interchange documents.

The bridge is one-way: it walks each tree's node arrays and writes the
format_version 1 JSON document that the distillation toolkit consumes.
It does not import that toolkit; the JSON schema is the only coupling.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1

# Threshold of the vacuous condition emitted for a single-leaf tree:
# every finite value passes "x[0] <= max float".
ALWAYS_TRUE_THRESHOLD = sys.float_info.max


class ExportError(ValueError):
    """The model cannot be represented in the interchange format."""


def _check_fitted_forest(model):
    if not hasattr(model, "estimators_"):
        raise ExportError(
            "model is not a fitted forest (missing estimators_); "
            "fit it before exporting")
    for est in model.estimators_:
        if not hasattr(est, "tree_"):
            raise ExportError("ensemble member has no tree_ attribute; "
                              "only axis-aligned tree forests are supported")


def _leaf_prediction(tree, node, is_classifier):
    value = tree.value[node]
    if is_classifier:
        # Class with the largest count; ties go to the lowest index,
        # matching both sklearn's tree predict and the consumer's vote
        # tie-break.
        return int(np.argmax(value[0]))
    return float(value[0][0])


def _tree_rules(tree, is_classifier):
    """One rule per leaf: ordered (selector, threshold, sign) conditions."""
    rules = []

    def walk(node, conditions):
        if tree.children_left[node] == -1:
            if not conditions:
                conditions = [{
                    "selector": {"axis": 0},
                    "threshold": repr(ALWAYS_TRUE_THRESHOLD),
                    "sign": "le",
                }]
            rules.append({
                "conditions": list(conditions),
                "prediction": _leaf_prediction(tree, node, is_classifier),
                "weight": 1.0,
                "coverage": int(tree.n_node_samples[node]),
            })
            return
        feature = int(tree.feature[node])
        threshold = repr(float(tree.threshold[node]))
        walk(tree.children_left[node], conditions + [
            {"selector": {"axis": feature}, "threshold": threshold,
             "sign": "le"}])
        walk(tree.children_right[node], conditions + [
            {"selector": {"axis": feature}, "threshold": threshold,
             "sign": "gt"}])

    walk(0, [])
    return rules


def forest_to_document(model, feature_names=None) -> dict:
    """Build the interchange document for a fitted sklearn forest.

    Classification leaves carry the majority-class index into the
    model's class array, which is recorded as ``class_labels`` so the
    original labels survive. Regression leaves carry the leaf mean.
    """
    _check_fitted_forest(model)
    is_classifier = hasattr(model, "classes_")
    n_features = int(model.n_features_in_)
    if feature_names is not None and len(feature_names) != n_features:
        raise ExportError(
            f"{len(feature_names)} feature names for {n_features} features")
    doc = {
        "format_version": FORMAT_VERSION,
        "task": "classification" if is_classifier else "regression",
        "n_features": n_features,
        "class_labels": ([str(c) for c in model.classes_]
                         if is_classifier else None),
        "trees": [
            {"tree_id": k, "rules": _tree_rules(est.tree_, is_classifier)}
            for k, est in enumerate(model.estimators_)
        ],
        "shapelet_pool": [],
    }
    if feature_names is not None:
        doc["feature_names"] = list(feature_names)
    return doc


def export_forest(model, out_path, feature_names=None) -> dict:
    """Write the interchange document for ``model`` to ``out_path``."""
    doc = forest_to_document(model, feature_names)
    Path(out_path).write_text(json.dumps(doc, indent=1))
    return doc
