#!/usr/bin/env python3
"""
Unit tests for the synthetic benchmark graphs
"""

import pytest
import sys
import os
from collections import Counter

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from argew_augment import Corpus
from errors import GraphError
from eval_suite import CoappearanceTable
from graph_core import weight_stats
from synth_roles import (
    ROLES_NODE_COUNT,
    NodeType,
    build_roles_graph,
    build_two_cliques,
    coappearance_corpus,
    coappearance_differences,
    internal_etc_assignment,
    node_type,
    roles_labels,
    run_coappearance_experiment,
    two_cliques_labels,
)


class TestRolesGraph:
    """Tests for the 19-node structural-roles graph"""

    def test_size(self):
        """Test 19 nodes and 54 edges"""
        g = build_roles_graph()
        assert g.node_count == ROLES_NODE_COUNT
        assert g.edge_count == 54

    def test_degrees(self):
        """Test bridges have degree 8, internals 5 and etc nodes 6"""
        g = build_roles_graph()
        for v in (4, 13, 18):
            assert g.degree(v) == 8
        for v in (0, 1, 2, 3, 9, 10, 11, 12, 14, 15, 16, 17):
            assert g.degree(v) == 5
        for v in (5, 6, 7, 8):
            assert g.degree(v) == 6

    def test_weights(self):
        """Test community, bridge-etc and missing edge weights"""
        g = build_roles_graph()
        assert g.weight(13, 9) == 3.0
        assert g.weight(13, 5) == 2.0
        assert g.weight(4, 13) == 0.0

    def test_weight_multiset(self):
        """Test 30 community, 12 bridge-etc and 12 internal-etc edges"""
        g = build_roles_graph()
        assert Counter(g.edge_weights().tolist()) == {3.0: 30, 2.0: 12, 1.0: 12}
        assert weight_stats(g).median_weight == 3.0

    def test_internal_etc_round_robin(self):
        """Test each etc node gets three internals, one per community"""
        assignment = internal_etc_assignment()
        assert len(assignment) == 12
        assert Counter(assignment.values()) == {5: 3, 6: 3, 7: 3, 8: 3}
        assert assignment[0] == 5
        assert assignment[9] == 5


class TestNodeType:
    """Tests for node-type categorization"""

    @pytest.mark.parametrize(
        "node,expected",
        [
            (4, NodeType.C4_BRIDGE),
            (0, NodeType.C4_INTERNAL),
            (12, NodeType.C13_INTERNAL),
            (13, NodeType.C13_BRIDGE),
            (17, NodeType.C18_INTERNAL),
            (18, NodeType.C18_BRIDGE),
            (7, NodeType.ETC),
        ],
    )
    def test_examples(self, node, expected):
        """Test hand-picked node types"""
        assert node_type(node) == expected

    def test_numpy_ids(self):
        """Test numpy integer ids are accepted"""
        assert node_type(np.int64(5)) == NodeType.ETC

    @pytest.mark.parametrize("node", [-1, 19, 100])
    def test_out_of_range(self, node):
        """Test ids outside 0..18 are rejected"""
        with pytest.raises(GraphError):
            node_type(node)

    def test_labels(self):
        """Test labels list seven categories over 19 nodes"""
        labels = roles_labels()
        assert len(labels) == 19
        assert len(set(labels)) == 7
        assert labels[4] == "c4bridge"


class TestCoappearanceExperiment:
    """Tests for the roles-graph coappearance experiment"""

    def test_deterministic(self):
        """Test the same seed gives the same table"""
        first = run_coappearance_experiment(False, 1.0, 1.0, seed=3)
        second = run_coappearance_experiment(False, 1.0, 1.0, seed=3)
        assert first == second

    def test_rows_sum_to_one(self):
        """Test every row of both variants is a distribution"""
        for use_argew in (False, True):
            table = run_coappearance_experiment(use_argew, 1.0, 4.0, seed=0)
            assert table.types == [t.value for t in NodeType]
            for row in table.rows.values():
                assert sum(row.values()) == pytest.approx(1.0)

    def test_walk_counts(self):
        """Test 20 walks per node without ARGEW and 5 with it"""
        baseline = coappearance_corpus(False, 1.0, 1.0, seed=0)
        # 19 nodes * 20 walks * 8 windows of 3 nodes in a 10-step walk
        assert baseline.total_windows() == 19 * 20 * 8

    def test_argew_is_identity_on_roles_graph(self):
        """Test no substitute weight exceeds the median, so windows pass through"""
        augmented = coappearance_corpus(True, 1.0, 1.0, seed=0)
        assert augmented.total_windows() == 19 * 5 * 8

    def test_bridges_meet_etc_more_often(self):
        """Test bridges coappear with etc nodes more than their internals at q = 4"""
        table = run_coappearance_experiment(False, 1.0, 4.0, seed=1)
        for community, bridge, internal in (
            (4, "c4bridge", "c4internal"),
            (13, "c13bridge", "c13internal"),
            (18, "c18bridge", "c18internal"),
        ):
            assert table.proportion(bridge, "etc") > table.proportion(internal, "etc")

    def test_low_q_differences_small(self):
        """Test both bridge-vs-internal differences average under 0.15 at q = 0.25"""
        differences = np.array(
            [
                coappearance_differences(run_coappearance_experiment(False, 1.0, 0.25, seed=seed), community)
                for seed in range(5)
                for community in (4, 13, 18)
            ]
        )
        internal_mean, etc_mean = differences.mean(axis=0)

        assert internal_mean < 0.15
        assert etc_mean < 0.15

    def test_differences(self):
        """Test absolute row differences on a hand-built table"""
        types = ["c4internal", "c4bridge", "etc"]
        table = CoappearanceTable(
            types=types,
            rows={
                "c4internal": {"c4internal": 0.5, "c4bridge": 0.3, "etc": 0.2},
                "c4bridge": {"c4internal": 0.4, "c4bridge": 0.0, "etc": 0.6},
            },
        )
        internal_diff, etc_diff = coappearance_differences(table, 4)
        assert internal_diff == pytest.approx(0.1)
        assert etc_diff == pytest.approx(0.4)

    def test_differences_need_a_bridge(self):
        """Test a non-bridge community id is rejected"""
        table = CoappearanceTable(types=[], rows={})
        with pytest.raises(GraphError):
            coappearance_differences(table, 5)


class TestTwoCliques:
    """Tests for the two-clique smoke graph"""

    def test_structure(self):
        """Test two disjoint cliques of size k"""
        g = build_two_cliques(4)
        assert g.node_count == 8
        assert g.edge_count == 12
        assert g.has_edge(0, 3)
        assert not g.has_edge(3, 4)

    def test_labels(self):
        """Test labels follow the clique membership"""
        assert two_cliques_labels(3) == ["a", "a", "a", "b", "b", "b"]

    def test_too_small(self):
        """Test a clique needs at least two nodes"""
        with pytest.raises(GraphError):
            build_two_cliques(1)

    def test_corpus_type(self):
        """Test the experiment corpus is a window multiset"""
        assert isinstance(coappearance_corpus(False, 1.0, 1.0, seed=0), Corpus)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
