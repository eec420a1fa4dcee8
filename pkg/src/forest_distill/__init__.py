"""Distill trained tree ensembles into optimal interpretable rule lists.

The toolkit trains (or imports) random forests over tabular data and
shapelet forests over time series, condenses them into a short list of
rules by solving an exact set-partitioning integer program, and scores
the list's predictive performance and fidelity to the source ensemble.
"""

from .datasets import (
    make_ecg_days_like,
    make_gaussian_classes,
    make_power_demand_like,
    make_single_feature_regression,
    make_two_level_series,
    make_xor,
)
from .fidelity import (
    disagreement,
    fidelity_report,
    importance_f1,
    node_represented_fraction,
    path_represented_fraction,
)
from .forest import CartParams, mdi_importance, train_cart, train_random_forest
from .io_formats import (
    load_ensemble,
    load_model,
    read_tabular_csv,
    read_ucr_tsv,
    render_rule_list,
    save_ensemble,
    save_model,
)
from .model import (
    CLASSIFICATION,
    REGRESSION,
    Condition,
    Dataset,
    Ensemble,
    Rule,
    Shapelet,
    Tree,
    ensemble_predict,
    enumerate_rules,
    evaluate_condition,
    rule_satisfied,
    tree_predict,
)
from .pipeline import (
    ExtractionConfig,
    RuleListModel,
    evaluate,
    extract,
    predict_batch,
    predict_rule_list,
    validate_select,
)
from .preprocess import (
    RuleCatalog,
    build_catalog,
    compute_loss,
    compute_stability,
    dice_index,
    filter_min_coverage,
)
from .solver import (
    PartitionProblem,
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
from .temporal import (
    ShapeletForestParams,
    sample_shapelets,
    subsequence_distance,
    train_shapelet_forest,
    train_shapelet_tree,
)

__version__ = "0.1.0"
