"""Command line front end: train, extract, evaluate, fidelity.

Exit codes: 0 success, 1 data or runtime error, 2 usage error. All
randomness hangs off a single --seed; a JSON --config file may supply
any flag's value, with explicit flags winning.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import fidelity as fidelity_mod
from . import io_formats
from .forest import CartParams, train_random_forest
from .model import CLASSIFICATION, REGRESSION
from .pipeline import (
    ExtractionConfig,
    evaluate,
    split_train_validation,
    validate_select,
)
from .preprocess import build_catalog, filter_min_coverage
from .solver import (
    SolverBudget,
    build_partition_problem,
    max_rules_bound,
    min_rules_bound,
    solve_exact,
)
from .temporal import ShapeletForestParams, train_shapelet_forest

TASKS = {"clf": CLASSIFICATION, "reg": REGRESSION}


def _load_data(path, ensemble_or_kind, task, target):
    """Read a dataset matching the ensemble kind: UCR layout or CSV."""
    temporal = (ensemble_or_kind == "shapelet"
                or getattr(ensemble_or_kind, "is_temporal", False))
    if temporal:
        return io_formats.read_ucr_tsv(path)
    if target is None:
        raise io_formats.FormatError("--target is required for tabular data")
    ds, dropped = io_formats.read_tabular_csv(path, target, task,
                                              standardize_target=(task == REGRESSION))
    if dropped:
        print(f"dropped {dropped} rows with missing values", file=sys.stderr)
    return ds


def cmd_train(args) -> int:
    task = TASKS[args.task]
    ds = _load_data(args.data, args.kind, task, args.target)
    if args.kind == "shapelet":
        if task != CLASSIFICATION:
            raise io_formats.FormatError("shapelet training expects classification data")
        params = ShapeletForestParams(n_trees=args.trees, max_depth=args.depth,
                                      rng_seed=args.seed)
        ens = train_shapelet_forest(ds, params)
    else:
        params = CartParams(max_depth=args.depth, n_trees=args.trees,
                            rng_seed=args.seed)
        ens = train_random_forest(ds, params)
    labels = ds.label_names if task == CLASSIFICATION else None
    io_formats.save_ensemble(ens, args.out, n_features=ds.n_features,
                             class_labels=labels)
    n_rules = sum(t.n_leaves for t in ens.trees)
    print(f"wrote {args.out}: {ens.n_trees} trees, {n_rules} rules")
    return 0


def _parse_ell_range(raw):
    if raw == "auto":
        return "auto"
    lo, _, hi = raw.partition(":")
    return int(lo), int(hi)


def cmd_extract(args) -> int:
    if args.ell is not None and args.ell < 1:
        raise UsageError("--ell must be >= 1")
    if args.ell is None and args.ell_range is None:
        raise UsageError("one of --ell or --ell-range is required")
    ens = io_formats.load_ensemble(args.ensemble)
    ds = _load_data(args.data, ens, ens.task, args.target)
    budget = SolverBudget(max_seconds=args.budget_seconds)

    t0 = time.perf_counter()
    if args.ell is not None:
        catalog = filter_min_coverage(build_catalog(ens, ds), args.nmin)
        t_pre = time.perf_counter() - t0
        problem = build_partition_problem(catalog, getattr(args, "lambda"), args.ell)
        sol = solve_exact(problem, budget=budget)
        t_solve = sol.wall_time
        if not sol.selected:
            m = min_rules_bound(problem.columns, problem.n_rows, budget)
            print(f"infeasible: no partition with at most {args.ell} rules; "
                  f"minimum is {m}", file=sys.stderr)
            return 1
        from .pipeline import _model_from_solution

        model = _model_from_solution(catalog, sol, ds, ens, getattr(args, "lambda"),
                                     args.ell)
        objective, status = sol.objective, sol.status
    else:
        rng_range = _parse_ell_range(args.ell_range)
        fit, val = split_train_validation(ds, 0.25, args.seed)
        cfg = ExtractionConfig(
            lam=getattr(args, "lambda"),
            ell_range=None if rng_range == "auto" else rng_range,
            n_min_fraction=args.nmin,
            budget=budget,
            rng_seed=args.seed,
        )
        model = validate_select(ens, fit, val, cfg)
        t_solve = time.perf_counter() - t0
        t_pre = 0.0
        objective, status = float("nan"), model.solver_status
        print(f"validated ell: {model.ell_used}")
    io_formats.save_model(model, args.out)
    print(f"wrote {args.out}: {model.n_rules} rules, status {status}, "
          f"objective {objective:.6f}")
    print(f"preprocessing {t_pre:.2f}s, solver {t_solve:.2f}s")
    return 0


def cmd_evaluate(args) -> int:
    model = io_formats.load_model(args.model)
    ds = _load_data(args.data, "shapelet" if model.shapelet_pool else "tabular",
                    model.task, args.target)
    report = evaluate(model, ds)
    if args.format == "json":
        print(json.dumps(report, indent=1))
    else:
        metric = "accuracy" if "accuracy" in report else "mse"
        print(f"{metric}: {report[metric]:.4f}  (n={report['n_points']})")
        cov = report["coverage"]
        print(f"coverage: unique {cov['unique']:.3f}, multiple "
              f"{cov['multiple']:.3f}, fallback {cov['fallback']:.3f}")
    return 0


def cmd_fidelity(args) -> int:
    model = io_formats.load_model(args.model)
    ens = io_formats.load_ensemble(args.ensemble)
    if model.task != ens.task:
        print("warning: model and ensemble task differ", file=sys.stderr)
    ds = _load_data(args.data, ens, ens.task, args.target)
    report = fidelity_mod.fidelity_report(model, ens, ds)
    if args.format == "json":
        print(json.dumps(report, indent=1))
    else:
        for key in ("represented_trees", "represented_paths",
                    "node_represented_trees", "importance_f1", "disagreement"):
            print(f"{key}: {report[key]:.4f}")
        print(f"extracted_rules: {report['extracted_rules']}")
    return 0


class UsageError(Exception):
    pass


def build_parser(config: dict | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forest-distill",
        description="Distill tree ensembles into interpretable rule lists.")
    parser.add_argument("--config", help="JSON file of default flag values")
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("FOREST_DISTILL_THREADS", "0")),
                        help="worker cap (0 = automatic)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a forest and write the ensemble file")
    p.add_argument("--data", required=True)
    p.add_argument("--task", choices=("clf", "reg"), required=True)
    p.add_argument("--kind", choices=("tabular", "shapelet"), default="tabular")
    p.add_argument("--target", help="target column for tabular CSV data")
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("extract", help="extract a rule list from an ensemble")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--target")
    p.add_argument("--ell", type=int)
    p.add_argument("--ell-range", help='"auto" or "lo:hi"')
    p.add_argument("--lambda", type=float, default=0.5)
    p.add_argument("--nmin", type=float, default=0.0)
    p.add_argument("--budget-seconds", type=float, default=60.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("evaluate", help="evaluate a rule list on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--target")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("fidelity", help="fidelity of a rule list vs its ensemble")
    p.add_argument("--model", required=True)
    p.add_argument("--ensemble", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--target")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_fidelity)

    if config:
        # Config values act as defaults everywhere; subparsers re-apply
        # their own defaults, so each one needs the overrides too.
        parser.set_defaults(**config)
        for action in parser._subparsers._group_actions:
            for sub_p in action.choices.values():
                sub_p.set_defaults(**config)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    config = None
    if "--config" in argv:
        cfg_path = argv[argv.index("--config") + 1]
        try:
            config = json.loads(Path(cfg_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: bad config file: {exc}", file=sys.stderr)
            return 1
    parser = build_parser(config)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (io_formats.FormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
