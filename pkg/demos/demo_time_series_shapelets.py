"""Distill a shapelet forest trained on daily power demand curves.

Series-valued version of the pipeline: conditions threshold the minimum
sliding-window distance to sampled subsequences instead of raw feature
values. The rule list cap is picked on a held-out validation split.
"""

from forest_distill import (
    ExtractionConfig,
    ShapeletForestParams,
    evaluate,
    fidelity_report,
    make_power_demand_like,
    render_rule_list,
    train_shapelet_forest,
)
from forest_distill.pipeline import split_train_validation

train_full, test = make_power_demand_like(n_train=80, n_test=400, seed=0)
print(f"training series: {train_full.n_points}, length {train_full.points.shape[1]}")

ens = train_shapelet_forest(
    train_full,
    ShapeletForestParams(n_trees=50, max_depth=3, shapelets_per_node=10,
                         rng_seed=0),
)
print(f"forest: {ens.n_trees} trees, {len(ens.shapelet_pool)} pooled shapelets")
print(f"forest test accuracy: {evaluate(ens, test)['accuracy']:.3f}")

# Hold out part of the training data to choose the cardinality cap.
train, val = split_train_validation(train_full, 0.25, seed=0)
from forest_distill import validate_select

model = validate_select(ens, train, val, ExtractionConfig(rng_seed=0))
print(f"\nselected cap {model.ell_used}, {model.n_rules} rules, "
      f"status {model.solver_status}")
print(render_rule_list(model))

report = evaluate(model, test)
print(f"\nrule list test accuracy: {report['accuracy']:.3f}")
cov = report["coverage"]
print(f"coverage on test data: unique {cov['unique']:.2f}, "
      f"multiple {cov['multiple']:.2f}, fallback {cov['fallback']:.2f}")

fid = fidelity_report(model, ens, test)
print(f"disagreement with the forest: {fid['disagreement']:.3f}")
