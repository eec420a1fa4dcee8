"""Core model types: conditions, rules, trees, ensembles."""

import numpy as np
import pytest

from forest_distill.model import (
    ALWAYS_TRUE_THRESHOLD,
    CLASSIFICATION,
    GT,
    LE,
    REGRESSION,
    Condition,
    CorruptedTreeError,
    Dataset,
    Ensemble,
    Rule,
    Shapelet,
    ShapeletReferenceError,
    Tree,
    always_true_rule,
    axis_selector,
    ensemble_predict,
    enumerate_rules,
    evaluate_condition,
    rule_satisfied,
    shapelet_selector,
    tree_predict,
)


def cond(p, thr, sign=LE):
    return Condition(axis_selector(p), thr, sign)


def make_fig1_tree(tree_id=0):
    """The depth-2 tabular example tree: root on feature 10 (axis 9) at
    0.7, children on feature 8 (axis 7) at 12.2 and feature 2 (axis 1)
    at 97.8. Leaf labels 0/1 alternate."""
    r1 = Rule((cond(9, 0.7, LE), cond(7, 12.2, LE)), 0, tree_id)
    r2 = Rule((cond(9, 0.7, LE), cond(7, 12.2, GT)), 1, tree_id)
    r3 = Rule((cond(9, 0.7, GT), cond(1, 97.8, LE)), 0, tree_id)
    r4 = Rule((cond(9, 0.7, GT), cond(1, 97.8, GT)), 1, tree_id)
    return Tree(tree_id, (r1, r2, r3, r4))


class TestCondition:
    def test_boundary_belongs_to_left_child(self):
        c = cond(0, 0.7, LE)
        assert evaluate_condition(c, np.array([0.7]))

    def test_root_split_gt(self):
        c = cond(9, 0.7, GT)
        x = np.zeros(10)
        x[9] = 0.8
        assert evaluate_condition(c, x)

    def test_shapelet_distance_le(self):
        pool = {1: Shapelet((0.0, 0.0))}
        c = Condition(shapelet_selector(1), 4.65, LE)
        x = np.full(8, 2.60 / np.sqrt(2.0))  # dist to the zero shapelet = 2.60
        assert evaluate_condition(c, x, pool)

    def test_invalid_sign_rejected(self):
        with pytest.raises(ValueError):
            Condition(axis_selector(0), 0.5, "lt")

    def test_non_finite_threshold_rejected(self):
        with pytest.raises(ValueError):
            Condition(axis_selector(0), np.inf, LE)

    def test_splitting_strips_sign(self):
        assert cond(3, 1.5, LE).splitting == cond(3, 1.5, GT).splitting

    def test_flipped_involution(self):
        c = cond(2, 0.1, LE)
        assert c.flipped().sign == GT
        assert c.flipped().flipped() == c

    def test_missing_shapelet_raises(self):
        c = Condition(shapelet_selector(7), 1.0, LE)
        with pytest.raises(ShapeletReferenceError):
            evaluate_condition(c, np.zeros(4), pool={})

    def test_axis_out_of_range(self):
        with pytest.raises(IndexError):
            evaluate_condition(cond(5, 0.0), np.zeros(3))


class TestRule:
    def test_one_failing_condition_fails_rule(self):
        r = Rule((cond(9, 0.7, LE), cond(7, 12.2, LE)), 0)
        x = np.zeros(10)
        x[9], x[7] = 0.5, 13.0
        assert not rule_satisfied(r, x)

    def test_both_boundaries_inclusive_left(self):
        r = Rule((cond(9, 0.7, LE), cond(7, 12.2, LE)), 0)
        x = np.zeros(10)
        x[9], x[7] = 0.5, 12.2
        assert rule_satisfied(r, x)

    def test_always_true_rule(self):
        r = always_true_rule(3)
        for v in (-1e300, 0.0, 1e300):
            assert rule_satisfied(r, np.array([v]))
        assert r.conditions[0].threshold == ALWAYS_TRUE_THRESHOLD

    def test_empty_rule_rejected(self):
        with pytest.raises(ValueError):
            Rule((), 0)

    def test_splitting_set_ignores_sign_and_duplicates(self):
        r = Rule((cond(0, 1.0, LE), cond(0, 1.0, GT), cond(1, 2.0, LE)), 0)
        assert r.splitting_set == frozenset({(("axis", 0), 1.0), (("axis", 1), 2.0)})


class TestTreePredict:
    def test_fig1_routing(self):
        tree = make_fig1_tree()
        x = np.zeros(10)
        x[9], x[1] = 0.8, 100.0
        assert tree_predict(tree, x) == 1

    def test_degenerate_tree_constant(self):
        tree = Tree(0, (always_true_rule(7),))
        assert tree_predict(tree, np.array([123.0])) == 7

    def test_tecator_tree_leaf(self):
        # Depth-2 regression tree over feature 122 (axis 121): root 59.20,
        # left split 47.25 (leaves 2.12 / 0.84), right 67.20 (-0.13 / -0.80).
        t = Tree(0, (
            Rule((cond(121, 59.20, LE), cond(121, 47.25, LE)), 2.12),
            Rule((cond(121, 59.20, LE), cond(121, 47.25, GT)), 0.84),
            Rule((cond(121, 59.20, GT), cond(121, 67.20, LE)), -0.13),
            Rule((cond(121, 59.20, GT), cond(121, 67.20, GT)), -0.80),
        ))
        x = np.zeros(124)
        x[121] = 50.0
        assert tree_predict(t, x) == 0.84

    def test_corrupted_tree_detected(self):
        # Two overlapping rules: a point satisfying both must raise.
        t = Tree(0, (
            Rule((cond(0, 1.0, LE),), 0),
            Rule((cond(0, 2.0, LE),), 1),
        ))
        with pytest.raises(CorruptedTreeError):
            tree_predict(t, np.array([0.5]))


class TestEnsemblePredict:
    def constant_tree(self, tree_id, pred):
        return Tree(tree_id, (always_true_rule(pred, tree_id),))

    def test_majority_vote(self):
        ens = Ensemble((self.constant_tree(0, 0), self.constant_tree(1, 0),
                        self.constant_tree(2, 1)), CLASSIFICATION)
        assert ensemble_predict(ens, np.array([0.0])) == 0

    def test_regression_mean(self):
        ens = Ensemble((self.constant_tree(0, 1.0), self.constant_tree(1, 3.0)),
                       REGRESSION)
        assert ensemble_predict(ens, np.array([0.0])) == 2.0

    def test_tie_break_smallest_class(self):
        ens = Ensemble((self.constant_tree(0, 1), self.constant_tree(1, 0)),
                       CLASSIFICATION)
        assert ensemble_predict(ens, np.array([0.0])) == 0

    def test_dangling_shapelet_in_ensemble_rejected(self):
        r = Rule((Condition(shapelet_selector(3), 1.0, LE),), 0)
        with pytest.raises(ShapeletReferenceError):
            Ensemble((Tree(0, (r,)),), CLASSIFICATION, shapelet_pool={})


class TestEnumerateRules:
    def test_fig1_tree_four_rules(self):
        rules = enumerate_rules(Ensemble((make_fig1_tree(),), CLASSIFICATION))
        assert len(rules) == 4
        assert all(len(r.conditions) == 2 for r in rules)

    def test_k_copies(self):
        trees = tuple(make_fig1_tree(k) for k in range(5))
        rules = enumerate_rules(Ensemble(trees, CLASSIFICATION))
        assert len(rules) == 20
        assert [r.tree_id for r in rules] == sorted(r.tree_id for r in rules)

    def test_shapelet_tree_shape(self):
        pool = {1: Shapelet((0.0, 1.0)), 2: Shapelet((1.0, 0.0))}
        s1, s2 = shapelet_selector(1), shapelet_selector(2)
        t = Tree(0, (
            Rule((Condition(s1, 4.65, LE), Condition(s2, 4.30, LE)), 0),
            Rule((Condition(s1, 4.65, LE), Condition(s2, 4.30, GT)), 1),
            Rule((Condition(s1, 4.65, GT),), 1),
        ))
        rules = enumerate_rules(Ensemble((t,), CLASSIFICATION, pool))
        assert sorted(len(r.conditions) for r in rules) == [1, 2, 2]
        # Series at distance 5.0 from s1 takes the length-1 rule.
        assert tree_predict(t, np.full(4, 5.0 / np.sqrt(2) + 0.5), pool) == 1


class TestDataset:
    def test_validation(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros((0, 3)), np.zeros(0), CLASSIFICATION)
        with pytest.raises(ValueError):
            Dataset(np.zeros((4, 3)), np.zeros(3), CLASSIFICATION)
        with pytest.raises(ValueError):
            Dataset(np.zeros((4, 3)), np.zeros(4), "ranking")
        with pytest.raises(ValueError):
            Dataset(np.zeros((2, 2)), np.array([1.0, np.nan]), REGRESSION)

    def test_classes_sorted(self):
        ds = Dataset(np.zeros((4, 1)), np.array([2, 0, 2, 1]), CLASSIFICATION)
        assert ds.classes.tolist() == [0, 1, 2]
