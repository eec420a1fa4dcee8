"""Peek inside the extraction pipeline: catalog, bounds, and the cap sweep.

The high-level ``extract`` call hides the intermediate objects. This
script runs them one at a time on a small forest so the catalog
statistics, the exact cardinality bounds, and the warm-started sweep
over caps are all visible.
"""

import numpy as np

from forest_distill import (
    CartParams,
    build_catalog,
    build_partition_problem,
    heuristic_lower_bound,
    heuristic_upper_bound,
    make_gaussian_classes,
    max_rules_bound,
    min_rules_bound,
    solve_exact,
    sweep_ell,
    train_random_forest,
)

ds = make_gaussian_classes(n_points=150, n_features=4, separation=1.0, seed=3)
ens = train_random_forest(ds, CartParams(n_trees=20, max_depth=3, rng_seed=3))

# Step 1: the rule catalog. Stability is computed over every enumerated
# rule before zero-coverage rules are dropped.
catalog = build_catalog(ens, ds)
print(f"catalog: {catalog.n_rules} rules over {ds.n_points} points")
print(f"normalized stability range: [{catalog.phi.min():.3f}, {catalog.phi.max():.3f}]")
print(f"normalized loss range:      [{catalog.xi.min():.3f}, {catalog.xi.max():.3f}]")

# Step 2: how short or long can an exact partition be? The exact bounds
# come from the same branch-and-bound with a cardinality objective; the
# heuristics bracket them from cheap structural facts.
problem = build_partition_problem(catalog, lam=0.5, ell=catalog.n_rules)
lo = min_rules_bound(problem.columns, problem.n_rows)
hi = max_rules_bound(problem.columns, problem.n_rows)
print(f"\nexact cardinality bounds: [{lo}, {hi}]")
print(f"heuristic bounds: [{heuristic_lower_bound(ens)}, "
      f"{heuristic_upper_bound(ds)}]")

# Step 3: sweep the cap over the bottom of the exact range. Each cap's
# incumbent warm-starts the next solve, so objectives never decrease.
top = min(hi, lo + 5)
print(f"\nsweep over caps {lo}..{top}:")
solutions = sweep_ell(catalog, lam=0.5, ell_range=(lo, top))
for ell, sol in zip(range(lo, top + 1), solutions):
    print(f"  cap {ell}: objective {sol.objective:+.4f}, "
          f"{len(sol.selected)} rules, {sol.node_count} nodes, "
          f"status {sol.status}")

# Sanity check: a direct solve at the largest cap matches the sweep.
direct = solve_exact(build_partition_problem(catalog, lam=0.5, ell=top))
assert np.isclose(direct.objective, solutions[-1].objective)
print(f"\ndirect solve at cap {top} matches the sweep: "
      f"{direct.objective:+.4f}")
