import numpy as np
import pytest

from drcf.core import CfRequest, Counterfactual, Dataset
from drcf.diverse import (
    BaselineWeights,
    aggregate_attribution,
    diverse_counterfactuals,
    diversity,
    model_agnostic_diverse,
)
from drcf.errors import InputError, SolverError
from drcf.linear import LinearProjector


def cf_with_delta(x_orig, delta, p, y_cf):
    return Counterfactual.build(np.asarray(x_orig, float), np.asarray(x_orig, float) + delta, p, y_cf)


@pytest.fixture
def sum_projector():
    return LinearProjector(np.array([[1.0, 1.0, 1.0]]), np.zeros(1))


class TestDiversity:
    def test_disjoint_changes(self, sum_projector):
        y = np.zeros(1)
        a = cf_with_delta([0, 0, 0], np.array([1.0, 0, 0]), sum_projector, y)
        b = cf_with_delta([0, 0, 0], np.array([0, 1.0, 0]), sum_projector, y)
        assert diversity(a, b) == 0

    def test_full_overlap(self, sum_projector):
        y = np.zeros(1)
        a = cf_with_delta([0, 0, 0], np.array([1.0, 2.0, 0]), sum_projector, y)
        assert diversity(a, a) == 2

    def test_subtolerance_changes_ignored(self, sum_projector):
        y = np.zeros(1)
        a = cf_with_delta([0, 0, 0], np.array([1e-9, 1.0, 0]), sum_projector, y)
        b = cf_with_delta([0, 0, 0], np.array([1.0, 1.0, 0]), sum_projector, y)
        assert diversity(a, b) == 1

    def test_dimension_mismatch(self, sum_projector):
        y = np.zeros(1)
        a = cf_with_delta([0, 0, 0], np.zeros(3), sum_projector, y)
        p2 = LinearProjector(np.array([[1.0, 1.0]]), np.zeros(1))
        b = cf_with_delta([0, 0], np.zeros(2), p2, y)
        with pytest.raises(InputError):
            diversity(a, b)


class TestDiverseCounterfactuals:
    def test_weighted_sum_map_yields_three_disjoint_single_coordinates(self):
        # strictly decreasing weights make one coordinate the unique cheapest
        # lever at every iteration, so the three members are single-feature
        # moves on coordinates 0, 1 and 2 in that order
        p = LinearProjector(np.array([[1.0, 0.8, 0.6, 0.4]]), np.zeros(1))
        req = CfRequest(x_orig=np.zeros(4), y_cf=np.array([3.0]), C=100.0)
        out = diverse_counterfactuals(req, 3, p)
        assert len(out.members) == 3
        assert not out.shortfall
        changed = [m.changed_features for m in out.members]
        assert changed == [(0,), (1,), (2,)]
        assert out.pairwise_div.max() == 0
        for m, a in zip(out.members, (1.0, 0.8, 0.6)):
            assert abs(m.delta.sum() - 3.0 / a) < 0.1

    def test_k_one_is_single_solve(self, pca_toy, toy):
        req = CfRequest(x_orig=toy.X[0], y_cf=np.array([1.0, 0.0]), C=100.0)
        out = diverse_counterfactuals(req, 1, pca_toy)
        assert len(out.members) == 1 and not out.shortfall

    def test_shortfall_when_features_run_out(self):
        p = LinearProjector(np.array([[1.0, 1.0]]), np.zeros(1))
        req = CfRequest(x_orig=np.zeros(2), y_cf=np.array([2.0]), C=100.0)
        out = diverse_counterfactuals(req, 3, p)
        assert out.shortfall
        assert 1 <= len(out.members) < 3

    def test_initial_blacklist_respected_everywhere(self, pca_toy, toy):
        x = toy.X[5]
        req = CfRequest(x_orig=x, y_cf=np.array([1.0, 1.0]), blacklist=(2, 7), C=100.0)
        out = diverse_counterfactuals(req, 3, pca_toy)
        for m in out.members:
            assert m.x_cf[2] == x[2] and m.x_cf[7] == x[7]

    def test_rejects_bad_k(self, pca_toy, toy):
        req = CfRequest(x_orig=toy.X[0], y_cf=np.zeros(2))
        with pytest.raises(InputError):
            diverse_counterfactuals(req, 0, pca_toy)


class TestModelAgnostic:
    def setup_data(self):
        # relative to row 0: row 1 and 3 change only feature 0, row 2 only
        # feature 1, row 4 changes both (structure survives standardization)
        raw = np.array(
            [
                [0.0, 0.0],
                [1.0, 0.0],
                [0.0, 1.0],
                [2.0, 0.0],
                [3.0, 5.0],
            ]
        )
        return Dataset.standardize(raw, np.zeros(5, dtype=np.int64))

    def test_large_map_weight_picks_exact_hit(self):
        ds = self.setup_data()
        p = LinearProjector(np.eye(2), np.zeros(2))
        req = CfRequest(x_orig=ds.X[0], y_cf=p.project(ds.X[1]))
        out = model_agnostic_diverse(req, 1, ds, BaselineWeights(C2=1e3), p)
        np.testing.assert_array_equal(out.members[0].x_cf, ds.X[1])

    def test_excludes_query_row(self):
        ds = self.setup_data()
        p = LinearProjector(np.eye(2), np.zeros(2))
        req = CfRequest(x_orig=ds.X[0], y_cf=p.project(ds.X[0]))
        out = model_agnostic_diverse(req, 4, ds, BaselineWeights(), p)
        for m in out.members:
            assert not np.array_equal(m.x_cf, req.x_orig)

    def test_overlap_weight_steers_second_pick(self):
        ds = self.setup_data()
        p = LinearProjector(np.eye(2), np.zeros(2))
        req = CfRequest(x_orig=ds.X[0], y_cf=p.project(ds.X[1]))
        out = model_agnostic_diverse(req, 2, ds, BaselineWeights(C2=1e3, C3=1e6), p)
        # first hits the target exactly; second must avoid reusing feature 0
        first, second = out.members
        np.testing.assert_array_equal(first.x_cf, ds.X[1])
        np.testing.assert_array_equal(second.x_cf, ds.X[2])
        assert out.pairwise_div[0, 1] == 0

    def test_k_exceeds_dataset(self, pca_toy, toy):
        req = CfRequest(x_orig=toy.X[0], y_cf=np.zeros(2))
        with pytest.raises(InputError):
            model_agnostic_diverse(req, toy.m + 1, toy, BaselineWeights(), pca_toy)

    def test_rejects_nonpositive_weight(self):
        with pytest.raises(InputError):
            BaselineWeights(C2=0.0)

    def test_deterministic(self, pca_toy, toy):
        req = CfRequest(x_orig=toy.X[1], y_cf=np.array([0.5, -0.5]))
        a = model_agnostic_diverse(req, 3, toy, BaselineWeights(), pca_toy)
        b = model_agnostic_diverse(req, 3, toy, BaselineWeights(), pca_toy)
        for ma, mb in zip(a.members, b.members):
            np.testing.assert_array_equal(ma.x_cf, mb.x_cf)


class TestAggregateAttribution:
    def test_single_aligned_target_is_one_hot(self):
        p = LinearProjector(np.array([[1.0, 0.0, 0.0]]), np.zeros(1))
        w, n_failed, fallback = aggregate_attribution(
            np.zeros(3), [np.array([4.0])], p, C=100.0
        )
        assert n_failed == 0 and not fallback
        np.testing.assert_allclose(w, [1.0, 0.0, 0.0], atol=1e-9)
        assert abs(w.sum() - 1.0) <= 1e-12

    def test_two_orthogonal_targets_split_evenly(self):
        p = LinearProjector(np.eye(2), np.zeros(2))
        w, _, fallback = aggregate_attribution(
            np.zeros(2), [np.array([2.0, 0.0]), np.array([0.0, 2.0])], p, C=100.0
        )
        assert not fallback
        np.testing.assert_allclose(w, [0.5, 0.5], atol=1e-6)

    def test_zero_targets_trigger_uniform_fallback(self):
        p = LinearProjector(np.array([[1.0, 0.0]]), np.zeros(1))
        w, _, fallback = aggregate_attribution(np.zeros(2), [np.zeros(1)], p, C=100.0)
        assert fallback
        np.testing.assert_array_equal(w, [0.5, 0.5])

    def test_empty_targets_rejected(self, pca_toy):
        with pytest.raises(InputError):
            aggregate_attribution(np.zeros(10), [], pca_toy)
