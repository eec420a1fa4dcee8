"""Move models across process boundaries through the JSON formats.

Three round trips: an ensemble document, a rule list document, and an
import of a scikit-learn forest exported by the companion
``forest-distill-bridge`` package (skipped if it is not installed).
"""

import tempfile
from pathlib import Path

import numpy as np

from forest_distill import (
    CartParams,
    ExtractionConfig,
    ensemble_predict,
    evaluate,
    extract,
    load_ensemble,
    load_model,
    make_gaussian_classes,
    predict_batch,
    save_ensemble,
    save_model,
    train_random_forest,
)

ds = make_gaussian_classes(n_points=200, n_features=4, separation=2.0, seed=7)
ens = train_random_forest(ds, CartParams(n_trees=30, max_depth=3, rng_seed=7))
model = extract(ens, ds, ExtractionConfig(ell=6))

workdir = Path(tempfile.mkdtemp())

# Ensemble round trip. Thresholds are serialized as repr strings, so
# the reloaded forest predicts identically bit for bit.
ens_path = workdir / "forest.json"
save_ensemble(ens, ens_path, n_features=ds.points.shape[1])
reloaded = load_ensemble(ens_path)
same = all(ensemble_predict(reloaded, x) == ensemble_predict(ens, x)
           for x in ds.points)
print(f"ensemble round trip ({ens_path.stat().st_size} bytes): "
      f"predictions identical = {same}")

# Rule list round trip.
model_path = workdir / "rules.json"
save_model(model, model_path)
model2 = load_model(model_path)
np.testing.assert_array_equal(predict_batch(model2, ds.points),
                              predict_batch(model, ds.points))
print(f"rule list round trip ({model_path.stat().st_size} bytes): "
      f"{model2.n_rules} rules, predictions identical = True")

# Bridge import: a scikit-learn forest exported to the same schema.
try:
    from sklearn.ensemble import RandomForestClassifier

    from forest_bridge import export_forest
except ImportError:
    print("bridge/scikit-learn not installed; skipping the import leg")
else:
    sk_model = RandomForestClassifier(n_estimators=30, max_depth=3,
                                      random_state=7)
    sk_model.fit(ds.points, ds.targets)
    sk_path = workdir / "sklearn_forest.json"
    export_forest(sk_model, sk_path)
    imported = load_ensemble(sk_path)
    print(f"\nimported scikit-learn forest: {imported.n_trees} trees, "
          f"accuracy {evaluate(imported, ds)['accuracy']:.3f}")
    distilled = extract(imported, ds, ExtractionConfig(ell=6))
    print(f"distilled the import into {distilled.n_rules} rules, "
          f"accuracy {evaluate(distilled, ds)['accuracy']:.3f}")
