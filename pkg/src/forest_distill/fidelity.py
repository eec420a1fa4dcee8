"""Internal and external fidelity of a rule list against its ensemble.

Internal fidelity counts how many trees share whole paths or single
conditions with the list; external fidelity measures prediction
disagreement between list and ensemble.
"""

from __future__ import annotations

import math

import numpy as np

from .forest import mdi_importance, shapelet_importance
from .model import AXIS, CLASSIFICATION, Dataset, Ensemble, ensemble_predict
from .pipeline import RuleListModel, predict_batch


def path_represented_fraction(model: RuleListModel, ens: Ensemble) -> float:
    """Fraction of trees sharing at least one complete rule with the list.

    Rule identity is exact equality of the ordered (selector, threshold,
    sign) sequence.
    """
    list_paths = {r.conditions for r in model.rules}
    hits = sum(1 for t in ens.trees
               if any(r.conditions in list_paths for r in t.rules))
    return hits / ens.n_trees


def node_represented_fraction(model: RuleListModel, ens: Ensemble) -> float:
    """Fraction of trees sharing at least one signed condition with the list."""
    list_conditions = {c for r in model.rules for c in r.conditions}
    hits = sum(1 for t in ens.trees
               if any(c in list_conditions for r in t.rules for c in r.conditions))
    return hits / ens.n_trees


def rules_represented_fraction(model: RuleListModel, ens: Ensemble) -> float:
    """Fraction of all forest rules that appear verbatim in the list."""
    list_paths = {r.conditions for r in model.rules}
    total = sum(t.n_leaves for t in ens.trees)
    hits = sum(1 for t in ens.trees for r in t.rules if r.conditions in list_paths)
    return hits / total


def _selected_feature_ids(model: RuleListModel) -> set:
    return {c.selector[1] for r in model.rules for c in r.conditions}


def importance_f1(model: RuleListModel, ens: Ensemble, ds: Dataset,
                  top_frac: float = 0.05) -> float:
    """F1 between the list's features and the ensemble's top importances.

    The truth set holds the ceil(top_frac * P) highest-ranked features
    (at least one). Temporal ensembles rank shapelet ids instead of axis
    indices, same formula.
    """
    if ens.is_temporal:
        ranking = shapelet_importance(ens, ds)
        universe = len(ranking)
        ordered = sorted(ranking, key=lambda k: -ranking[k])
    else:
        imp = mdi_importance(ens, ds)
        universe = ds.n_features
        ordered = list(np.argsort(-imp))
    k = max(1, math.ceil(top_frac * universe))
    truth = set(ordered[:k])
    predicted = _selected_feature_ids(model)
    if not predicted or not truth:
        return 0.0
    tp = len(predicted & truth)
    if tp == 0:
        return 0.0
    precision = tp / len(predicted)
    recall = tp / len(truth)
    return 2 * precision * recall / (precision + recall)


def disagreement(model: RuleListModel, ens: Ensemble, ds: Dataset) -> float:
    """Prediction mismatch between the list and the ensemble on ``ds``.

    Classification: fraction of misaligned labels. Regression: MSE
    between the two prediction vectors.
    """
    list_preds = predict_batch(model, ds.points)
    ens_preds = np.array([ensemble_predict(ens, x) for x in ds.points])
    if ds.task == CLASSIFICATION:
        return float(np.mean(list_preds != ens_preds))
    return float(np.mean((list_preds - ens_preds) ** 2))


def fidelity_report(model: RuleListModel, ens: Ensemble, ds: Dataset,
                    top_frac: float = 0.05) -> dict:
    """All fidelity measures in one serializable document."""
    return {
        "format_version": 1,
        "represented_trees": path_represented_fraction(model, ens),
        "represented_paths": rules_represented_fraction(model, ens),
        "node_represented_trees": node_represented_fraction(model, ens),
        "importance_f1": importance_f1(model, ens, ds, top_frac),
        "disagreement": disagreement(model, ens, ds),
        "extracted_rules": model.n_rules,
        "metadata": {
            "represented_paths_definition":
                "fraction of all forest rules appearing verbatim in the list",
            "represented_trees_definition":
                "fraction of trees sharing at least one complete rule with the list",
            "top_importance_fraction": top_frac,
        },
    }
