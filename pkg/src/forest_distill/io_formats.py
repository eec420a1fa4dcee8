"""Dataset readers, the ensemble interchange format and serialization.

All JSON schemas carry ``"format_version": 1``. Thresholds are written
as shortest round-trip decimal strings so splitting identity survives a
serialization round trip bit for bit.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .model import (
    AXIS,
    CLASSIFICATION,
    GT,
    LE,
    REGRESSION,
    SHAPELET,
    Condition,
    Dataset,
    Ensemble,
    Rule,
    Shapelet,
    Tree,
    rule_satisfied,
)
from .pipeline import RuleListModel

FORMAT_VERSION = 1


class FormatError(ValueError):
    """Malformed or incompatible document."""


def read_tabular_csv(path, target_column: str, task: str,
                     standardize_target: bool = False) -> tuple[Dataset, int]:
    """Read a headered numeric CSV into a Dataset.

    Rows containing empty cells are dropped; the count of dropped rows
    is returned alongside. Non-empty cells that fail to parse raise.
    With ``standardize_target`` the regression target is scaled to mean
    zero and unit variance.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file")
        if target_column not in header:
            raise FormatError(f"{path}: target column {target_column!r} not found")
        t_col = header.index(target_column)
        feature_names = tuple(h for i, h in enumerate(header) if i != t_col)
        rows, targets, dropped = [], [], 0
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise FormatError(f"{path}:{lineno}: expected {len(header)} cells")
            if any(cell.strip() == "" for cell in row):
                dropped += 1
                continue
            try:
                features = [float(cell) for i, cell in enumerate(row) if i != t_col]
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: non-numeric cell ({exc})")
            rows.append(features)
            targets.append(row[t_col].strip())
    if not rows:
        raise FormatError(f"{path}: no complete data rows")
    points = np.array(rows, dtype=float)
    label_names = None
    if task == CLASSIFICATION:
        uniq = sorted(set(targets))
        mapping = {label: i for i, label in enumerate(uniq)}
        y = np.array([mapping[t] for t in targets], dtype=int)
        label_names = tuple(uniq)
    else:
        try:
            y = np.array([float(t) for t in targets], dtype=float)
        except ValueError as exc:
            raise FormatError(f"{path}: non-numeric target ({exc})")
        if standardize_target:
            std = y.std()
            y = (y - y.mean()) / (std if std > 0 else 1.0)
    return Dataset(points, y, task, feature_names, label_names), dropped


def read_ucr_tsv(path) -> Dataset:
    """Read a UCR-layout file: label first, series values after.

    Class labels are remapped to contiguous ids; the original labels are
    kept on the dataset for reporting.
    """
    series, labels = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.replace(",", " ").split()
            if not parts:
                continue
            try:
                values = [float(v) for v in parts]
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: non-numeric value ({exc})")
            labels.append(values[0])
            series.append(values[1:])
            if len(series[0]) != len(series[-1]):
                raise FormatError(
                    f"{path}:{lineno}: row length {len(series[-1])} differs "
                    f"from first row {len(series[0])}")
    if not series:
        raise FormatError(f"{path}: no data rows")
    uniq = sorted(set(labels))
    mapping = {label: i for i, label in enumerate(uniq)}
    y = np.array([mapping[v] for v in labels], dtype=int)
    names = tuple(str(int(v)) if float(v).is_integer() else str(v) for v in uniq)
    return Dataset(np.array(series), y, CLASSIFICATION, label_names=names)


def _encode_threshold(value: float) -> str:
    return repr(float(value))


def _decode_threshold(raw) -> float:
    return float(raw)


def _encode_condition(cond: Condition) -> dict:
    kind, ref = cond.selector
    return {
        "selector": {kind: ref},
        "threshold": _encode_threshold(cond.threshold),
        "sign": cond.sign,
    }


def _decode_condition(doc: dict) -> Condition:
    sel = doc["selector"]
    if AXIS in sel:
        selector = (AXIS, int(sel[AXIS]))
    elif SHAPELET in sel:
        selector = (SHAPELET, int(sel[SHAPELET]))
    else:
        raise FormatError(f"unknown selector {sel!r}")
    sign = doc["sign"]
    if sign not in (LE, GT):
        raise FormatError(f"invalid sign token {sign!r}")
    return Condition(selector, _decode_threshold(doc["threshold"]), sign)


def _encode_rule(rule: Rule, task: str) -> dict:
    pred = int(rule.prediction) if task == CLASSIFICATION else float(rule.prediction)
    return {
        "conditions": [_encode_condition(c) for c in rule.conditions],
        "prediction": pred,
        "weight": rule.weight,
        "coverage": rule.coverage,
    }


def _decode_rule(doc: dict, task: str, tree_id: int) -> Rule:
    pred = doc["prediction"]
    pred = int(pred) if task == CLASSIFICATION else float(pred)
    return Rule(
        conditions=tuple(_decode_condition(c) for c in doc["conditions"]),
        prediction=pred,
        tree_id=tree_id,
        weight=float(doc.get("weight", 1.0)),
        coverage=int(doc.get("coverage", 0)),
    )


def ensemble_to_document(ens: Ensemble, n_features: int | None = None,
                         class_labels=None) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "task": ens.task,
        "n_features": n_features,
        "class_labels": list(class_labels) if class_labels is not None else None,
        "trees": [
            {
                "tree_id": t.tree_id,
                "rules": [_encode_rule(r, ens.task) for r in t.rules],
            }
            for t in ens.trees
        ],
        "shapelet_pool": [
            {"id": sid, "values": list(s.values), "source": list(s.source)}
            for sid, s in sorted(ens.shapelet_pool.items())
        ],
    }


def ensemble_from_document(doc: dict, validate: bool = True) -> Ensemble:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {version!r}")
    task = doc["task"]
    if task not in (CLASSIFICATION, REGRESSION):
        raise FormatError(f"unknown task {task!r}")
    pool = {
        int(s["id"]): Shapelet(tuple(float(v) for v in s["values"]),
                               tuple(s.get("source", (-1, -1))))
        for s in doc.get("shapelet_pool", [])
    }
    trees = []
    for t in doc["trees"]:
        tree_id = int(t["tree_id"])
        rules = tuple(_decode_rule(r, task, tree_id) for r in t["rules"])
        trees.append(Tree(tree_id, rules))
    ens = Ensemble(tuple(trees), task, pool)
    if validate:
        _spot_check_partition(ens, doc.get("n_features"))
    return ens


def _spot_check_partition(ens: Ensemble, n_features, n_samples: int = 16):
    """Sample random points and verify each tree matches exactly one rule.

    Axis-only ensembles are probed on a box spanned by their thresholds;
    temporal ensembles are skipped (no meaningful sampling box).
    """
    if ens.is_temporal:
        return
    max_axis = max((c.selector[1] for t in ens.trees for r in t.rules
                    for c in r.conditions if c.selector[0] == AXIS), default=0)
    P = n_features if n_features else max_axis + 1
    thresholds = [abs(c.threshold) for t in ens.trees for r in t.rules
                  for c in r.conditions if np.isfinite(c.threshold)]
    scale = max(thresholds) if thresholds else 1.0
    rng = np.random.default_rng(0)
    points = rng.uniform(-2 * scale - 1, 2 * scale + 1, size=(n_samples, P))
    for tree in ens.trees:
        for x in points:
            matched = sum(rule_satisfied(r, x) for r in tree.rules)
            if matched != 1:
                raise FormatError(
                    f"tree {tree.tree_id} is not a partition: sampled point "
                    f"matched {matched} rules")


def save_ensemble(ens: Ensemble, path, n_features: int | None = None,
                  class_labels=None):
    doc = ensemble_to_document(ens, n_features, class_labels)
    Path(path).write_text(json.dumps(doc, indent=1))


def load_ensemble(path, validate: bool = True) -> Ensemble:
    return ensemble_from_document(json.loads(Path(path).read_text()), validate)


def model_to_document(model: RuleListModel) -> dict:
    used = sorted({c.selector[1] for r in model.rules for c in r.conditions
                   if c.selector[0] == SHAPELET})
    fallback = (int(model.fallback) if model.task == CLASSIFICATION
                else float(model.fallback))
    return {
        "format_version": FORMAT_VERSION,
        "task": model.task,
        "fallback": fallback,
        "lambda": model.lam,
        "ell_used": model.ell_used,
        "solver_status": model.solver_status,
        "rules": [_encode_rule(r, model.task) for r in model.rules],
        "shapelet_pool": [
            {"id": sid, "values": list(model.shapelet_pool[sid].values),
             "source": list(model.shapelet_pool[sid].source)}
            for sid in used
        ],
    }


def model_from_document(doc: dict) -> RuleListModel:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {version!r}")
    task = doc["task"]
    pool = {
        int(s["id"]): Shapelet(tuple(float(v) for v in s["values"]),
                               tuple(s.get("source", (-1, -1))))
        for s in doc.get("shapelet_pool", [])
    }
    rules = tuple(_decode_rule(r, task, tree_id=0) for r in doc["rules"])
    fallback = int(doc["fallback"]) if task == CLASSIFICATION else float(doc["fallback"])
    for r in rules:
        for c in r.conditions:
            if c.selector[0] == SHAPELET and c.selector[1] not in pool:
                raise FormatError(f"dangling shapelet id {c.selector[1]}")
    return RuleListModel(rules, fallback, task, pool, doc.get("lambda", 0.5),
                         doc.get("ell_used"), doc.get("solver_status"))


def save_model(model: RuleListModel, path):
    Path(path).write_text(json.dumps(model_to_document(model), indent=1))


def load_model(path) -> RuleListModel:
    return model_from_document(json.loads(Path(path).read_text()))


def _condition_str(cond: Condition, feature_names=None) -> str:
    kind, ref = cond.selector
    op = "<=" if cond.sign == LE else ">"
    if kind == SHAPELET:
        return f"dist(x, s{ref}) {op} {cond.threshold:g}"
    name = feature_names[ref] if feature_names else f"x[{ref}]"
    return f"{name} {op} {cond.threshold:g}"


def _rule_str(rule: Rule, feature_names=None) -> str:
    conds = ", ".join(_condition_str(c, feature_names) for c in rule.conditions)
    return f"({conds}) -> {rule.prediction} [coverage {rule.coverage}]"


def _build_layout_tree(rules: list[Rule]):
    """Recursive complete-binary-tree detection via shared prefixes.

    Returns a nested (splitting, left, right) / ("leaf", prediction)
    structure, or None when the rules do not form a complete tree.
    """
    if len(rules) == 1 and not rules[0].conditions:
        return ("leaf", rules[0])
    if any(not r.conditions for r in rules) or len(rules) < 2:
        return None
    splittings = {r.conditions[0].splitting for r in rules}
    if len(splittings) != 1:
        return None
    left = [Rule(r.conditions[1:], r.prediction, r.tree_id, r.weight, r.coverage)
            if len(r.conditions) > 1 else _stub(r)
            for r in rules if r.conditions[0].sign == LE]
    right = [Rule(r.conditions[1:], r.prediction, r.tree_id, r.weight, r.coverage)
             if len(r.conditions) > 1 else _stub(r)
             for r in rules if r.conditions[0].sign == GT]
    if not left or not right:
        return None
    first = rules[0].conditions[0] if rules[0].conditions[0].sign == LE else \
        rules[0].conditions[0].flipped()
    lt = _build_layout_tree(left)
    rt = _build_layout_tree(right)
    if lt is None or rt is None:
        return None
    return (first, lt, rt)


class _Stub:
    """Rule whose remaining conditions are exhausted: a leaf."""

    def __init__(self, rule):
        self.conditions = ()
        self.prediction = rule.prediction
        self.coverage = rule.coverage


def _stub(rule):
    return _Stub(rule)


def render_rule_list(model: RuleListModel, fmt: str = "text",
                     feature_names=None) -> str:
    """Human-readable rendering of an extracted rule list.

    ``tree`` emits an indented decision-tree layout when the rules'
    shared prefixes form a complete binary tree, and otherwise falls
    back to the one-rule-per-line text form with a notice.
    """
    if fmt == "json":
        return json.dumps(model_to_document(model), indent=1)
    if fmt == "text":
        return "\n".join(_rule_str(r, feature_names) for r in model.rules)
    if fmt == "tree":
        layout = _build_layout_tree(list(model.rules))
        if layout is None:
            text = render_rule_list(model, "text", feature_names)
            return "# rules do not form a complete tree; text fallback\n" + text
        lines = []

        def emit(node, indent):
            pad = "  " * indent
            if node[0] == "leaf":
                lines.append(f"{pad}-> {node[1].prediction} "
                             f"[coverage {node[1].coverage}]")
                return
            cond, lt, rt = node
            lines.append(f"{pad}if {_condition_str(cond, feature_names)}:")
            emit(lt, indent + 1)
            lines.append(f"{pad}else:  # {_condition_str(cond.flipped(), feature_names)}")
            emit(rt, indent + 1)

        emit(layout, 0)
        return "\n".join(lines)
    raise ValueError(f"unknown format {fmt!r}")
