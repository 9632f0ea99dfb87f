"""Fluid community detection: update rule, fixed points, and invariants."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.metrics import adjusted_rand_score

from celink.communities import (
    CommunityPartition,
    _run_fluidc,
    _sweep,
    fluidc,
    load_partition_csv,
    partition_matrix,
    save_partition_csv,
)
from celink.graph import build_graph

from conftest import graphs

TRIANGLE_PAIR = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]
BRIDGED = TRIANGLE_PAIR + [(2, 3)]


class TestSweepRule:
    def test_unlabeled_node_adopts_smallest_winning_label(self):
        # path 0-1-2 with endpoints seeded; the middle node sees a tie
        # between two size-1 communities and must take the smaller label
        g = build_graph([(0, 1), (1, 2)], 3)
        label = np.array([0, -1, 1])
        sizes = np.array([1, 1])
        changes = _sweep(g, label, sizes, np.array([1]))
        assert changes == 1
        assert label.tolist() == [0, 0, 1]
        assert sizes.tolist() == [2, 1]

    def test_tied_node_keeps_current_label(self):
        # node 1 scores 1.0 for both labels (neighbor 0 alone vs itself
        # plus neighbor 2 at half weight); ties never displace the holder
        g = build_graph([(0, 1), (1, 2)], 3)
        label = np.array([0, 1, 1])
        sizes = np.array([1, 2])
        changes = _sweep(g, label, sizes, np.array([1]))
        assert changes == 0
        assert label.tolist() == [0, 1, 1]

    def test_node_with_no_labeled_contact_stays_unlabeled(self):
        g = build_graph([(0, 1), (2, 3)], 4)
        label = np.array([0, 0, -1, -1])
        sizes = np.array([2])
        changes = _sweep(g, label, sizes, np.array([2, 3]))
        assert changes == 0
        assert label.tolist() == [0, 0, -1, -1]

    def test_converged_state_is_a_fixed_point(self):
        g = build_graph(TRIANGLE_PAIR, 6)
        rng = np.random.default_rng(0)
        label = _run_fluidc(g, np.array([0, 3]), 100, rng)
        sizes = np.bincount(label, minlength=2)
        for trial in range(5):
            assert _sweep(g, label, sizes, rng.permutation(g.n)) == 0


class TestRunFluidc:
    def test_disjoint_triangles_split_exactly(self):
        # labels cannot cross components, so one seed per triangle must
        # recover the component partition for every update order
        g = build_graph(TRIANGLE_PAIR, 6)
        for s in range(20):
            label = _run_fluidc(g, np.array([0, 3]), 100, np.random.default_rng(s))
            assert label.tolist() == [0, 0, 0, 1, 1, 1]

    def test_unseeded_component_folds_into_smallest_community(self):
        # triangle holds both seeds; nodes 3..5 never hear a vote and are
        # assigned round-robin to whichever community is smallest
        g = build_graph([(0, 1), (0, 2), (1, 2), (3, 4)], 6)
        for s in range(10):
            label = _run_fluidc(g, np.array([0, 1]), 100, np.random.default_rng(s))
            assert label.tolist() == [0, 1, 0, 1, 0, 1]


class TestFluidc:
    def test_bridged_triangles_recover_planted_split(self):
        g = build_graph(BRIDGED, 6)
        planted = [0, 0, 0, 1, 1, 1]
        perfect = sum(
            adjusted_rand_score(planted, fluidc(g, 2, seed=s).assignment) == 1.0
            for s in range(100)
        )
        assert perfect >= 95

    def test_same_seed_is_deterministic(self):
        g = build_graph(BRIDGED, 6)
        a = fluidc(g, 3, seed=42)
        b = fluidc(g, 3, seed=42)
        assert np.array_equal(a.assignment, b.assignment)

    def test_rejects_bad_k(self):
        g = build_graph([(0, 1)], 2)
        with pytest.raises(ValueError):
            fluidc(g, 0)
        with pytest.raises(ValueError):
            fluidc(g, 3)

    def test_k_equals_n_gives_singletons(self):
        g = build_graph([(0, 1), (1, 2), (0, 2)], 3)
        p = fluidc(g, 3, seed=1)
        assert sorted(p.assignment.tolist()) == [0, 1, 2]

    @settings(max_examples=40, deadline=None)
    @given(graphs(min_nodes=2, max_nodes=20), st.integers(0, 3), st.integers(0, 99))
    def test_partition_invariants(self, g, k_off, seed):
        k = 1 + k_off % g.n
        p = fluidc(g, k, seed=seed)
        assert p.assignment.shape == (g.n,)
        assert p.assignment.min() >= 0 and p.assignment.max() < k
        # every community keeps at least its seed node
        assert np.all(p.sizes() >= 1)


class TestPartitionContainer:
    def test_members_and_sizes(self):
        p = CommunityPartition(k=3, assignment=np.array([0, 2, 0, 1, 2]))
        assert p.members(0).tolist() == [0, 2]
        assert p.sizes().tolist() == [2, 1, 2]

    def test_with_centers_validates_shape(self):
        p = CommunityPartition(k=2, assignment=np.array([0, 1]))
        with pytest.raises(ValueError):
            p.with_centers(np.array([0, 1, 1]))
        q = p.with_centers(np.array([0, 1]))
        assert q.centers.tolist() == [0, 1]
        assert p.centers is None

    def test_partition_matrix_is_one_hot(self):
        p = CommunityPartition(k=3, assignment=np.array([1, 0, 1, 2]))
        s = partition_matrix(p)
        assert s.shape == (4, 3)
        assert np.array_equal(s.sum(axis=1), np.ones(4))
        assert np.array_equal(np.argmax(s, axis=1), p.assignment)

    def test_csv_roundtrip(self, tmp_path):
        p = CommunityPartition(k=3, assignment=np.array([2, 0, 1, 1, 2]))
        path = tmp_path / "part.csv"
        save_partition_csv(p, path)
        q = load_partition_csv(path)
        assert q.k == p.k
        assert np.array_equal(q.assignment, p.assignment)

    def test_load_rejects_wrong_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("node,label\n0,0\n")
        with pytest.raises(ValueError, match="header"):
            load_partition_csv(path)
