"""End-to-end rule extraction, cap validation, inference and metrics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .evaluate import BulkEvaluator
from .model import CLASSIFICATION, Dataset, Ensemble, Rule, Shapelet, rule_satisfied
from .preprocess import RuleCatalog, build_catalog, filter_min_coverage
from .solver import (
    PartitionSolution,
    SolverBudget,
    build_partition_problem,
    heuristic_lower_bound,
    heuristic_upper_bound,
    max_rules_bound,
    min_rules_bound,
    solve_exact,
    sweep_ell,
)


@dataclass(frozen=True)
class RuleListModel:
    """Extracted rule list with everything needed for inference.

    Rules keep their training coverage counts for the multi-match
    tie-break; the fallback handles points outside every rule.
    """

    rules: tuple[Rule, ...]
    fallback: float | int
    task: str
    shapelet_pool: dict[int, Shapelet] = field(default_factory=dict)
    lam: float = 0.5
    ell_used: int | None = None
    solver_status: str | None = None

    def __post_init__(self):
        if len(self.rules) == 0:
            raise ValueError("rule list must be non-empty")

    @property
    def n_rules(self) -> int:
        return len(self.rules)


@dataclass(frozen=True)
class ExtractionConfig:
    lam: float = 0.5
    ell: int | None = None                       # fixed cardinality cap
    ell_range: tuple[int, int] | None = None     # explicit validation range
    exact_bounds: bool = True                    # exact IP bounds vs heuristics
    n_min_fraction: float = 0.0
    budget: SolverBudget = field(default_factory=SolverBudget)
    val_fraction: float = 0.25
    upper_bound_alpha: float = 0.01
    rng_seed: int = 0

    def __post_init__(self):
        if self.ell is not None and self.ell < 1:
            raise ValueError("ell must be >= 1")
        if not 0 <= self.lam <= 1:
            raise ValueError("lambda must lie in [0, 1]")


def split_train_validation(ds: Dataset, val_fraction: float,
                           seed: int) -> tuple[Dataset, Dataset]:
    """Random split, stratified by class for classification tasks."""
    rng = np.random.default_rng(seed)
    n = ds.n_points
    if ds.task == CLASSIFICATION:
        val_idx = []
        for c in ds.classes:
            members = np.nonzero(ds.targets == c)[0]
            members = rng.permutation(members)
            n_val = int(round(val_fraction * members.size))
            n_val = min(max(n_val, 1 if members.size > 1 else 0), members.size - 1)
            val_idx.extend(members[:n_val].tolist())
        val_mask = np.zeros(n, dtype=bool)
        val_mask[val_idx] = True
    else:
        perm = rng.permutation(n)
        n_val = max(1, int(round(val_fraction * n)))
        val_mask = np.zeros(n, dtype=bool)
        val_mask[perm[:n_val]] = True
    train = Dataset(ds.points[~val_mask], ds.targets[~val_mask], ds.task,
                    ds.feature_names, ds.label_names)
    val = Dataset(ds.points[val_mask], ds.targets[val_mask], ds.task,
                  ds.feature_names, ds.label_names)
    return train, val


def _fallback_prediction(ds: Dataset):
    if ds.task == CLASSIFICATION:
        labels, counts = np.unique(ds.targets, return_counts=True)
        return int(labels[np.argmax(counts)])
    return float(np.mean(ds.targets))


def _model_from_solution(catalog: RuleCatalog, sol: PartitionSolution,
                         train: Dataset, ens: Ensemble, lam: float,
                         ell_used: int) -> RuleListModel:
    rules = tuple(catalog.rules[j] for j in sol.selected)
    return RuleListModel(
        rules=rules,
        fallback=_fallback_prediction(train),
        task=train.task,
        shapelet_pool=dict(ens.shapelet_pool),
        lam=lam,
        ell_used=ell_used,
        solver_status=sol.status,
    )


def extract(ens: Ensemble, train: Dataset,
            cfg: ExtractionConfig | None = None) -> RuleListModel:
    """Full extraction: enumerate, preprocess, filter, solve, package.

    With a fixed ``ell`` a single solve runs; otherwise the training
    data is split and the cap is validated over a bounded range.
    """
    cfg = cfg or ExtractionConfig()
    if cfg.ell is None:
        fit, val = split_train_validation(train, cfg.val_fraction, cfg.rng_seed)
        return validate_select(ens, fit, val, cfg)
    catalog = filter_min_coverage(build_catalog(ens, train), cfg.n_min_fraction)
    problem = build_partition_problem(catalog, cfg.lam, cfg.ell)
    sol = solve_exact(problem, budget=cfg.budget)
    if not sol.selected:
        m = min_rules_bound(problem.columns, problem.n_rows, cfg.budget)
        raise ValueError(f"no partition with at most {cfg.ell} rules; minimum is {m}")
    return _model_from_solution(catalog, sol, train, ens, cfg.lam, cfg.ell)


def _ell_bounds(catalog: RuleCatalog, ens: Ensemble, train: Dataset,
                cfg: ExtractionConfig) -> tuple[int, int]:
    if cfg.ell_range is not None:
        return cfg.ell_range
    problem = build_partition_problem(catalog, cfg.lam, ell=catalog.n_rules)
    if cfg.exact_bounds:
        lo = min_rules_bound(problem.columns, problem.n_rows, cfg.budget)
        hi = max_rules_bound(problem.columns, problem.n_rows, cfg.budget)
    else:
        lo = heuristic_lower_bound(ens)
        hi = heuristic_upper_bound(train, cfg.upper_bound_alpha)
    return lo, max(lo, hi)


def validate_select(ens: Ensemble, train: Dataset, val: Dataset,
                    cfg: ExtractionConfig | None = None) -> RuleListModel:
    """Sweep the cardinality cap and keep the best validation performer.

    Validation loss is the misclassification count (classification) or
    MSE (regression); ties go to the smaller cap, giving the sparser
    list.
    """
    cfg = cfg or ExtractionConfig()
    if val.n_points == 0:
        raise ValueError("validation set is empty")
    catalog = filter_min_coverage(build_catalog(ens, train), cfg.n_min_fraction)
    lo, hi = _ell_bounds(catalog, ens, train, cfg)
    solutions = sweep_ell(catalog, cfg.lam, (lo, hi), cfg.budget)
    best = None  # (loss, ell, model)
    for ell, sol in zip(range(lo, hi + 1), solutions):
        if not sol.selected:
            continue
        model = _model_from_solution(catalog, sol, train, ens, cfg.lam, ell)
        preds = predict_batch(model, val.points)
        if val.task == CLASSIFICATION:
            loss = float(np.count_nonzero(preds != val.targets))
        else:
            loss = float(np.mean((preds - val.targets) ** 2))
        if best is None or loss < best[0]:
            best = (loss, ell, model)
    if best is None:
        raise ValueError("no feasible cap in the validated range")
    return best[2]


def _match_indices(model: RuleListModel, x: np.ndarray) -> list[int]:
    return [j for j, r in enumerate(model.rules)
            if rule_satisfied(r, x, model.shapelet_pool)]


def predict_rule_list(model: RuleListModel, x: np.ndarray):
    """Inference heuristic for a single point.

    Exactly one matching rule wins outright; among several the one
    covering the most training data wins (ties to list order); no match
    falls back to the stored default prediction.
    """
    matches = _match_indices(model, x)
    if len(matches) == 1:
        return model.rules[matches[0]].prediction
    if len(matches) > 1:
        best = max(matches, key=lambda j: (model.rules[j].coverage, -j))
        return model.rules[best].prediction
    return model.fallback


def predict_batch(model: RuleListModel, X: np.ndarray) -> np.ndarray:
    """Vectorized ``predict_rule_list`` over the rows of ``X``."""
    ev = BulkEvaluator(X, model.shapelet_pool)
    masks = np.stack([ev.rule_mask(r) for r in model.rules])  # (R, N)
    coverages = np.array([r.coverage for r in model.rules])
    preds = np.array([r.prediction for r in model.rules], dtype=float)
    n_matches = masks.sum(axis=0)
    # Scores order rules by coverage, then earlier list position on ties.
    R = len(model.rules)
    scores = coverages[:, None] * R + (R - 1 - np.arange(R))[:, None]
    scores = np.where(masks, scores, -1)
    winner = np.argmax(scores, axis=0)
    out = preds[winner]
    out[n_matches == 0] = model.fallback
    if model.task == CLASSIFICATION:
        return out.astype(int)
    return out


def coverage_breakdown(model: RuleListModel, ds: Dataset) -> dict:
    """Fractions of points resolved by one rule, several, or the fallback."""
    ev = BulkEvaluator(ds.points, model.shapelet_pool)
    counts = np.zeros(ds.n_points, dtype=int)
    for r in model.rules:
        counts += ev.rule_mask(r)
    n = ds.n_points
    return {
        "unique": float(np.count_nonzero(counts == 1) / n),
        "multiple": float(np.count_nonzero(counts > 1) / n),
        "fallback": float(np.count_nonzero(counts == 0) / n),
    }


def evaluate(predictor, ds: Dataset) -> dict:
    """Accuracy or MSE of a rule list or an ensemble on a dataset."""
    from .model import ensemble_predict

    if isinstance(predictor, RuleListModel):
        if predictor.task != ds.task:
            raise ValueError("task mismatch between model and dataset")
        preds = predict_batch(predictor, ds.points)
        coverage = coverage_breakdown(predictor, ds)
    elif isinstance(predictor, Ensemble):
        if predictor.task != ds.task:
            raise ValueError("task mismatch between ensemble and dataset")
        preds = np.array([ensemble_predict(predictor, x) for x in ds.points])
        coverage = None
    else:
        raise TypeError(f"cannot evaluate {type(predictor).__name__}")
    report = {"task": ds.task, "n_points": ds.n_points}
    if ds.task == CLASSIFICATION:
        report["accuracy"] = float(np.mean(preds == ds.targets))
    else:
        report["mse"] = float(np.mean((preds - ds.targets) ** 2))
    if coverage is not None:
        report["coverage"] = coverage
    return report
