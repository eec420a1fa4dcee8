"""Dataset readers, JSON interchange round trips and rendering."""

import json

import numpy as np
import pytest

from forest_distill.datasets import make_gaussian_classes, make_two_level_series
from forest_distill.forest import CartParams, train_random_forest
from forest_distill.io_formats import (
    FormatError,
    ensemble_from_document,
    ensemble_to_document,
    load_ensemble,
    load_model,
    model_from_document,
    model_to_document,
    read_tabular_csv,
    read_ucr_tsv,
    render_rule_list,
    save_ensemble,
    save_model,
)
from forest_distill.model import (
    CLASSIFICATION,
    GT,
    LE,
    REGRESSION,
    Condition,
    Ensemble,
    Rule,
    Tree,
    axis_selector,
    ensemble_predict,
    shapelet_selector,
    tree_predict,
)
from forest_distill.pipeline import RuleListModel, predict_batch
from forest_distill.temporal import ShapeletForestParams, train_shapelet_forest


def cond(p, thr, sign=LE):
    return Condition(axis_selector(p), thr, sign)


class TestReadTabularCsv:
    def test_missing_cell_dropped(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("a,b,y\n1,2,0\n3,,1\n5,6,1\n")
        ds, dropped = read_tabular_csv(path, "y", CLASSIFICATION)
        assert ds.n_points == 2
        assert dropped == 1
        assert ds.feature_names == ("a", "b")

    def test_standardized_regression_target(self, tmp_path):
        path = tmp_path / "data.csv"
        rows = "\n".join(f"{i},{2 * i + 1}" for i in range(10))
        path.write_text("x,y\n" + rows + "\n")
        ds, _ = read_tabular_csv(path, "y", REGRESSION, standardize_target=True)
        assert abs(ds.targets.mean()) < 1e-9
        assert abs(ds.targets.var() - 1.0) < 1e-9

    def test_empty_data_section(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("a,y\n")
        with pytest.raises(FormatError):
            read_tabular_csv(path, "y", CLASSIFICATION)

    def test_missing_target_column(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(FormatError):
            read_tabular_csv(path, "y", CLASSIFICATION)

    def test_label_remapping(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("a,y\n1,cat\n2,dog\n3,cat\n")
        ds, _ = read_tabular_csv(path, "y", CLASSIFICATION)
        assert ds.label_names == ("cat", "dog")
        assert ds.targets.tolist() == [0, 1, 0]


class TestReadUcrTsv:
    def test_basic_layout(self, tmp_path):
        path = tmp_path / "data.tsv"
        rows = ["\t".join(["1"] + [str(v) for v in range(24)]),
                "\t".join(["2"] + [str(v) for v in range(24)])]
        path.write_text("\n".join(rows) + "\n")
        ds = read_ucr_tsv(path)
        assert ds.n_points == 2
        assert ds.n_features == 24

    def test_negative_labels_remapped(self, tmp_path):
        path = tmp_path / "data.tsv"
        path.write_text("-1\t0.0\t1.0\n1\t1.0\t0.0\n")
        ds = read_ucr_tsv(path)
        assert sorted(ds.targets.tolist()) == [0, 1]
        assert ds.label_names == ("-1", "1")

    def test_ragged_row_names_line(self, tmp_path):
        path = tmp_path / "data.tsv"
        path.write_text("1\t0.0\t1.0\n1\t1.0\n")
        with pytest.raises(FormatError, match="2"):
            read_ucr_tsv(path)


class TestEnsembleRoundTrip:
    def test_tabular_bitwise_predictions(self, tmp_path):
        ds = make_gaussian_classes(n_points=60, seed=0)
        ens = train_random_forest(ds, CartParams(n_trees=5, rng_seed=0))
        path = tmp_path / "forest.json"
        save_ensemble(ens, path, n_features=ds.n_features)
        loaded = load_ensemble(path)
        rng = np.random.default_rng(1)
        X = rng.uniform(-5, 5, size=(1000, ds.n_features))
        for x in X:
            assert ensemble_predict(loaded, x) == ensemble_predict(ens, x)

    def test_threshold_bit_exact(self, tmp_path):
        ds = make_gaussian_classes(n_points=40, seed=1)
        ens = train_random_forest(ds, CartParams(n_trees=3, rng_seed=1))
        doc = ensemble_to_document(ens)
        loaded = ensemble_from_document(json.loads(json.dumps(doc)))
        orig = [c.threshold for t in ens.trees for r in t.rules for c in r.conditions]
        back = [c.threshold for t in loaded.trees for r in t.rules
                for c in r.conditions]
        assert orig == back

    def test_temporal_round_trip(self, tmp_path):
        ds = make_two_level_series(n_points=16, seed=0)
        ens = train_shapelet_forest(ds, ShapeletForestParams(n_trees=3, rng_seed=0))
        path = tmp_path / "forest.json"
        save_ensemble(ens, path)
        loaded = load_ensemble(path)
        for x in ds.points:
            assert ensemble_predict(loaded, x) == ensemble_predict(ens, x)

    def test_bad_version_rejected(self):
        with pytest.raises(FormatError):
            ensemble_from_document({"format_version": 99, "task": CLASSIFICATION,
                                    "trees": []})

    def test_corrupt_tree_caught_by_validation(self):
        doc = {
            "format_version": 1,
            "task": CLASSIFICATION,
            "n_features": 1,
            "trees": [{
                "tree_id": 0,
                "rules": [
                    {"conditions": [{"selector": {"axis": 0},
                                     "threshold": "1.0", "sign": "le"}],
                     "prediction": 0},
                    {"conditions": [{"selector": {"axis": 0},
                                     "threshold": "2.0", "sign": "le"}],
                     "prediction": 1},
                ],
            }],
            "shapelet_pool": [],
        }
        with pytest.raises(FormatError, match="partition"):
            ensemble_from_document(doc)

    def test_fig1_hand_encoded(self):
        doc = {
            "format_version": 1,
            "task": CLASSIFICATION,
            "n_features": 10,
            "trees": [{
                "tree_id": 0,
                "rules": [
                    {"conditions": [
                        {"selector": {"axis": 9}, "threshold": "0.7", "sign": "le"},
                        {"selector": {"axis": 7}, "threshold": "12.2", "sign": "le"},
                    ], "prediction": 0},
                    {"conditions": [
                        {"selector": {"axis": 9}, "threshold": "0.7", "sign": "le"},
                        {"selector": {"axis": 7}, "threshold": "12.2", "sign": "gt"},
                    ], "prediction": 1},
                    {"conditions": [
                        {"selector": {"axis": 9}, "threshold": "0.7", "sign": "gt"},
                        {"selector": {"axis": 1}, "threshold": "97.8", "sign": "le"},
                    ], "prediction": 0},
                    {"conditions": [
                        {"selector": {"axis": 9}, "threshold": "0.7", "sign": "gt"},
                        {"selector": {"axis": 1}, "threshold": "97.8", "sign": "gt"},
                    ], "prediction": 1},
                ],
            }],
            "shapelet_pool": [],
        }
        ens = ensemble_from_document(doc)
        tree = ens.trees[0]
        assert tree.n_leaves == 4
        x = np.zeros(10)
        x[9], x[7] = 0.5, 10.0
        assert tree_predict(tree, x) == 0
        x[7] = 20.0
        assert tree_predict(tree, x) == 1


class TestModelRoundTrip:
    def test_tabular_model(self, tmp_path):
        rules = (
            Rule((cond(0, 0.5, LE),), 0, coverage=10),
            Rule((cond(0, 0.5, GT),), 1, coverage=5),
        )
        model = RuleListModel(rules, fallback=0, task=CLASSIFICATION,
                              lam=0.5, ell_used=2, solver_status="optimal")
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.rules == tuple(
            Rule(r.conditions, r.prediction, 0, r.weight, r.coverage)
            for r in rules)
        assert loaded.ell_used == 2
        X = np.random.default_rng(0).uniform(0, 1, size=(100, 1))
        np.testing.assert_array_equal(predict_batch(loaded, X),
                                      predict_batch(model, X))

    def test_dangling_shapelet_rejected(self):
        doc = {
            "format_version": 1,
            "task": CLASSIFICATION,
            "fallback": 0,
            "rules": [{"conditions": [{"selector": {"shapelet": 3},
                                       "threshold": "1.0", "sign": "le"}],
                       "prediction": 0}],
            "shapelet_pool": [],
        }
        with pytest.raises(FormatError, match="shapelet"):
            model_from_document(doc)

    def test_pool_pruned_to_used_shapelets(self):
        from forest_distill.model import Shapelet

        pool = {0: Shapelet((1.0, 2.0)), 1: Shapelet((3.0, 4.0))}
        rules = (Rule((Condition(shapelet_selector(1), 2.5, LE),), 0, coverage=1),)
        model = RuleListModel(rules, 0, CLASSIFICATION, pool)
        doc = model_to_document(model)
        assert [s["id"] for s in doc["shapelet_pool"]] == [1]


class TestRender:
    def complete_tree_model(self):
        rules = (
            Rule((cond(121, 59.20, LE), cond(121, 47.25, LE)), 2.12, coverage=3),
            Rule((cond(121, 59.20, LE), cond(121, 47.25, GT)), 0.84, coverage=4),
            Rule((cond(121, 59.20, GT), cond(121, 67.20, LE)), -0.13, coverage=5),
            Rule((cond(121, 59.20, GT), cond(121, 67.20, GT)), -0.80, coverage=6),
        )
        return RuleListModel(rules, 0.0, REGRESSION)

    def test_text_format(self):
        out = render_rule_list(self.complete_tree_model(), "text")
        assert out.count("\n") == 3
        assert "x[121] <= 59.2" in out

    def test_tree_layout_for_complete_tree(self):
        out = render_rule_list(self.complete_tree_model(), "tree")
        assert out.startswith("if x[121] <= 59.2:")
        assert "else:" in out
        assert "-> 0.84" in out

    def test_non_tree_falls_back_to_text(self):
        rules = (
            Rule((cond(0, 1.0, LE),), 0, coverage=2),
            Rule((cond(1, 2.0, GT),), 1, coverage=2),
        )
        model = RuleListModel(rules, 0, CLASSIFICATION)
        out = render_rule_list(model, "tree")
        assert out.startswith("#")
        assert "x[0] <= 1" in out

    def test_shapelet_condition_rendering(self):
        from forest_distill.model import Shapelet

        pool = {1: Shapelet((0.5, 0.5))}
        rules = (Rule((Condition(shapelet_selector(1), 3.53, LE),), 1, coverage=2),)
        model = RuleListModel(rules, 0, CLASSIFICATION, pool)
        out = render_rule_list(model, "text")
        assert "dist(x, s1) <= 3.53" in out

    def test_json_format_parses(self):
        out = render_rule_list(self.complete_tree_model(), "json")
        doc = json.loads(out)
        assert doc["format_version"] == 1

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            render_rule_list(self.complete_tree_model(), "yaml")

    def test_feature_names_used(self):
        rules = (Rule((cond(0, 1.0, LE),), 0, coverage=1),)
        model = RuleListModel(rules, 0, CLASSIFICATION)
        out = render_rule_list(model, "text", feature_names=["age"])
        assert "age <= 1" in out
