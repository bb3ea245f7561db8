#!/usr/bin/env python3
"""
Unit tests for embedding evaluation
"""

import pytest
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from argew_augment import Corpus
from errors import EvaluationError
from eval_suite import (
    OvrLogisticRegression,
    classification_protocol,
    coappearance_distribution,
    cosine,
    f1_scores,
    sample_nonedges,
    similarity_by_weight_bin,
    stratified_split,
    train_ovr_logreg,
)
from graph_core import build_graph
from synth_roles import build_roles_graph


def brute_force_f1(true_labels, predicted_labels):
    """Per-category counts over the union of seen categories"""
    categories = sorted(set(true_labels) | set(predicted_labels))
    correct = sum(t == p for t, p in zip(true_labels, predicted_labels))
    micro = correct / len(true_labels)
    per_category = []
    for c in categories:
        tp = sum(t == c and p == c for t, p in zip(true_labels, predicted_labels))
        fp = sum(t != c and p == c for t, p in zip(true_labels, predicted_labels))
        fn = sum(t == c and p != c for t, p in zip(true_labels, predicted_labels))
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        total = precision + recall
        per_category.append(2 * precision * recall / total if total else 0.0)
    return micro, sum(per_category) / len(per_category)


def blobs(rng, per_class=20):
    features = np.vstack(
        [
            rng.normal(loc=-3.0, scale=0.5, size=(per_class, 2)),
            rng.normal(loc=3.0, scale=0.5, size=(per_class, 2)),
        ]
    )
    labels = np.array(["left"] * per_class + ["right"] * per_class)
    return features, labels


class TestCosine:
    """Tests for cosine similarity"""

    def test_examples(self):
        """Test orthogonal, parallel and opposite vectors"""
        assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0
        assert cosine([1.0, 1.0], [2.0, 2.0]) == pytest.approx(1.0)
        assert cosine([1.0, 0.0], [-1.0, 0.0]) == pytest.approx(-1.0)

    def test_clipped(self):
        """Test round-off never leaves [-1, 1]"""
        v = np.random.default_rng(0).normal(size=50)
        assert -1.0 <= cosine(v, 3.0 * v) <= 1.0

    def test_zero_vector(self):
        """Test a zero vector is rejected"""
        with pytest.raises(EvaluationError, match="zero"):
            cosine([0.0, 0.0], [1.0, 0.0])

    def test_shape_mismatch(self):
        """Test vectors of different length are rejected"""
        with pytest.raises(EvaluationError):
            cosine([1.0, 0.0], [1.0, 0.0, 0.0])


class TestSimilarityByWeightBin:
    """Tests for the binned similarity report"""

    def test_roles_graph_bins(self):
        """Test the roles graph splits 12 / 12 / 30 over three bins"""
        g = build_roles_graph()
        emb = np.random.default_rng(1).normal(size=(g.node_count, 4))
        report = similarity_by_weight_bin(g, emb, n_bins=3)

        assert len(report.bins) == 4
        assert [b.pair_count for b in report.edge_bins] == [12, 12, 30]
        assert [(b.low, b.high) for b in report.edge_bins] == [(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]
        assert report.nonedge.pair_count == 19 * 18 // 2 - 54

    def test_statistics_bounded(self):
        """Test min <= median <= max and every value lies in [-1, 1]"""
        g = build_roles_graph()
        emb = np.random.default_rng(2).normal(size=(g.node_count, 8))
        report = similarity_by_weight_bin(g, emb, n_bins=3)

        for b in report.bins:
            assert -1.0 <= b.min <= b.median <= b.max <= 1.0
            assert b.min <= b.mean <= b.max

    def test_single_weight_in_last_bin(self):
        """Test every edge of a uniform graph lands in the last bin"""
        g = build_graph([(0, 1, 2.0), (1, 2, 2.0), (2, 3, 2.0)])
        emb = np.eye(4) + 0.1
        report = similarity_by_weight_bin(g, emb, n_bins=4)

        assert [b.pair_count for b in report.edge_bins] == [0, 0, 0, 3]
        assert report.edge_bins[0].median is None
        assert report.nonedge.pair_count == 3

    def test_zero_nonedge_cap(self):
        """Test a zero non-edge cap leaves bin 0 empty and keeps the edge bins"""
        g = build_roles_graph()
        emb = np.random.default_rng(4).normal(size=(g.node_count, 4))
        report = similarity_by_weight_bin(g, emb, n_bins=3, nonedge_cap=0)

        assert report.nonedge.pair_count == 0
        assert report.nonedge.median is None
        assert [b.pair_count for b in report.edge_bins] == [12, 12, 30]

    def test_identical_embeddings(self):
        """Test identical vectors give similarity 1 everywhere"""
        g = build_graph([(0, 1, 1.0), (1, 2, 3.0)])
        report = similarity_by_weight_bin(g, np.ones((3, 5)), n_bins=2)

        for b in report.bins:
            if b.pair_count:
                assert b.median == pytest.approx(1.0)

    def test_edgeless_rejected(self):
        """Test a graph without edges is rejected"""
        g = build_graph([], node_count=3)
        with pytest.raises(EvaluationError):
            similarity_by_weight_bin(g, np.ones((3, 2)), n_bins=2)

    def test_invalid_bins(self):
        """Test n_bins < 1 is rejected"""
        g = build_graph([(0, 1, 1.0)])
        with pytest.raises(EvaluationError):
            similarity_by_weight_bin(g, np.ones((2, 2)), n_bins=0)

    def test_zero_embedding_rejected(self):
        """Test a zero embedding row is rejected"""
        g = build_graph([(0, 1, 1.0)])
        with pytest.raises(EvaluationError, match="zero"):
            similarity_by_weight_bin(g, np.array([[1.0, 0.0], [0.0, 0.0]]), n_bins=1)


class TestSampleNonedges:
    """Tests for non-edge pair sampling"""

    def test_exhaustive_under_cap(self):
        """Test every non-edge pair is returned when under the cap"""
        g = build_graph([(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
        us, vs = sample_nonedges(g, 100, np.random.default_rng(0))

        assert list(zip(us.tolist(), vs.tolist())) == [(0, 2), (0, 3), (1, 3)]

    def test_zero_cap(self):
        """Test a zero cap returns two empty id arrays"""
        g = build_graph([(i, i + 1, 1.0) for i in range(9)])
        us, vs = sample_nonedges(g, 0, np.random.default_rng(0))

        assert us.shape == vs.shape == (0,)
        assert us.dtype == vs.dtype == np.int64

    def test_sampled_over_cap(self):
        """Test a capped sample holds distinct valid non-edges"""
        g = build_graph([(i, i + 1, 1.0) for i in range(29)])
        us, vs = sample_nonedges(g, 40, np.random.default_rng(3))
        pairs = list(zip(us.tolist(), vs.tolist()))

        assert len(pairs) == 40
        assert len(set(pairs)) == 40
        for u, v in pairs:
            assert u < v
            assert not g.has_edge(u, v)


class TestStratifiedSplit:
    """Tests for stratified train/test splits"""

    def test_per_category_sizes(self):
        """Test 4 + 6 items split 2 + 3 into train"""
        labels = ["a"] * 4 + ["b"] * 6
        train, test = stratified_split(labels, 0.5, seed=0)
        y = np.array(labels)

        assert list(y[train]).count("a") == 2
        assert list(y[train]).count("b") == 3
        assert sorted(train.tolist() + test.tolist()) == list(range(10))

    def test_both_sides_nonempty(self):
        """Test a two-member category keeps one member on each side"""
        labels = ["a", "a", "b", "b", "b", "b"]
        train, test = stratified_split(labels, 0.9, seed=1)
        y = np.array(labels)

        assert list(y[train]).count("a") == 1
        assert list(y[test]).count("a") == 1

    def test_deterministic(self):
        """Test the same seed gives the same split"""
        labels = ["a"] * 10 + ["b"] * 10
        first = stratified_split(labels, 0.5, seed=7)
        second = stratified_split(labels, 0.5, seed=7)

        assert np.array_equal(first[0], second[0])
        assert np.array_equal(first[1], second[1])

    def test_single_member_rejected(self):
        """Test a category with one member is rejected"""
        with pytest.raises(EvaluationError, match="single member"):
            stratified_split(["a", "a", "b"], 0.5, seed=0)

    @pytest.mark.parametrize("fraction", [0.0, 1.0, 1.5])
    def test_invalid_fraction(self, fraction):
        """Test a fraction outside (0, 1) is rejected"""
        with pytest.raises(EvaluationError):
            stratified_split(["a", "a"], fraction, seed=0)


class TestLogisticRegression:
    """Tests for one-vs-rest logistic regression"""

    def test_separable_blobs(self):
        """Test two well separated blobs are classified perfectly"""
        features, labels = blobs(np.random.default_rng(4))
        model = OvrLogisticRegression().fit(features, labels)

        assert (model.predict(features) == labels).all()

    def test_strong_regularization(self):
        """Test a huge L2 strength keeps the weights near zero"""
        features, labels = blobs(np.random.default_rng(5))
        model = OvrLogisticRegression(l2_strength=1e6).fit(features, labels)

        assert np.linalg.norm(model.weights_) < 0.01

    def test_train_ids_subset(self):
        """Test only the listed rows are used for fitting"""
        features, labels = blobs(np.random.default_rng(6))
        train_ids = list(range(0, 40, 2))
        model = train_ovr_logreg(features, labels, train_ids)

        assert (model.predict(features) == labels).all()

    def test_single_class_rejected(self):
        """Test fitting needs two categories"""
        with pytest.raises(EvaluationError):
            OvrLogisticRegression().fit(np.ones((3, 2)), ["a", "a", "a"])

    def test_negative_strength_rejected(self):
        """Test l2_strength must be non-negative"""
        with pytest.raises(EvaluationError):
            OvrLogisticRegression(l2_strength=-1.0)


class TestF1:
    """Tests for micro and macro F1"""

    def test_examples(self):
        """Test the hand-computed examples"""
        micro, macro = f1_scores(["a", "a", "b", "b"], ["a", "b", "b", "b"])
        assert micro == pytest.approx(0.75)
        assert macro == pytest.approx((2 / 3 + 0.8) / 2)

        micro, macro = f1_scores(["a", "b"], ["a", "a"])
        assert micro == pytest.approx(0.5)
        assert macro == pytest.approx(1 / 3)

    def test_matches_brute_force(self):
        """Test against direct counting on 1000 random labelings"""
        rng = np.random.default_rng(9)
        for _ in range(1000):
            size = int(rng.integers(1, 12))
            true_labels = rng.choice(["a", "b", "c", "d"], size=size).tolist()
            predicted = rng.choice(["a", "b", "c", "d"], size=size).tolist()

            micro, macro = f1_scores(true_labels, predicted)
            expected_micro, expected_macro = brute_force_f1(true_labels, predicted)
            assert micro == pytest.approx(expected_micro)
            assert macro == pytest.approx(expected_macro)

    def test_length_mismatch(self):
        """Test different lengths are rejected"""
        with pytest.raises(EvaluationError):
            f1_scores(["a"], ["a", "b"])

    def test_empty(self):
        """Test empty input is rejected"""
        with pytest.raises(EvaluationError):
            f1_scores([], [])


class TestClassificationProtocol:
    """Tests for the split / train / score protocol"""

    def test_one_hot_features(self):
        """Test features that encode the label give F1 = 1"""
        labels = ["a"] * 6 + ["b"] * 6 + ["c"] * 6
        features = np.repeat(np.eye(3), 6, axis=0)
        report = classification_protocol(features, labels, seed=0)

        assert report.micro_f1 == pytest.approx(1.0)
        assert report.macro_f1 == pytest.approx(1.0)
        assert len(report.split_scores) == 10

    def test_rows(self):
        """Test one row per split plus the mean row"""
        labels = ["a"] * 4 + ["b"] * 4
        features = np.repeat(np.eye(2), 4, axis=0)
        report = classification_protocol(features, labels, seed=1, splits=3)
        rows = report.rows()

        assert [r[0] for r in rows] == ["0", "1", "2", "mean"]
        assert rows[-1][1] == report.micro_f1

    def test_deterministic(self):
        """Test the same seed gives identical scores"""
        rng = np.random.default_rng(2)
        features = rng.normal(size=(20, 3))
        labels = ["a"] * 10 + ["b"] * 10

        first = classification_protocol(features, labels, seed=5, splits=4)
        second = classification_protocol(features, labels, seed=5, splits=4)
        assert first.split_scores == second.split_scores

    def test_single_category_rejected(self):
        """Test a single category is rejected"""
        with pytest.raises(EvaluationError, match="2 categories"):
            classification_protocol(np.ones((4, 2)), ["a"] * 4, seed=0)

    def test_label_count_mismatch(self):
        """Test labels must cover every embedded node"""
        with pytest.raises(EvaluationError):
            classification_protocol(np.ones((4, 2)), ["a", "b"], seed=0)


class TestCoappearance:
    """Tests for coappearance distributions"""

    TYPES = {0: "x", 1: "y", 2: "z"}

    def test_plain_windows(self):
        """Test proportions from unweighted windows"""
        table = coappearance_distribution([(0, 1, 2), (0, 1, 1), (1, 0)], self.TYPES)

        assert table.types == ["x", "y", "z"]
        assert table.proportion("x", "y") == pytest.approx(0.75)
        assert table.proportion("x", "z") == pytest.approx(0.25)
        assert table.proportion("x", "x") == 0.0
        assert table.proportion("y", "x") == 1.0
        assert "z" not in table.rows

    def test_weighted_corpus(self):
        """Test window counts weight the proportions"""
        corpus = Corpus([((0, 1), 3), ((0, 2), 1)])
        table = coappearance_distribution(corpus, self.TYPES)

        assert table.proportion("x", "y") == pytest.approx(0.75)
        assert table.proportion("x", "z") == pytest.approx(0.25)

    def test_rows_sum_to_one(self):
        """Test every present row is a distribution"""
        table = coappearance_distribution([(0, 1, 2), (2, 2, 0), (1, 2)], self.TYPES)
        for row in table.rows.values():
            assert sum(row.values()) == pytest.approx(1.0)

    def test_given_type_order(self):
        """Test explicit types fix the column order"""
        table = coappearance_distribution([(2, 0)], self.TYPES.get, types=["z", "y", "x"])

        assert table.types == ["z", "y", "x"]
        assert table.table_rows() == [("z", 0.0, 0.0, 1.0)]

    def test_empty_rejected(self):
        """Test no windows is an error"""
        with pytest.raises(EvaluationError):
            coappearance_distribution([], self.TYPES)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
