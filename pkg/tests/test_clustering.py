import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slrr.clustering import (
    affinity_from_w,
    clustering_accuracy,
    euclidean_affinity,
    geodesic_affinity,
    ncut,
)
from slrr.errors import DegenerateAffinityError, LengthMismatchError

from oracles import brute_force_accuracy


class TestAffinity:
    def test_zero_and_identity(self):
        assert np.all(affinity_from_w(np.zeros((3, 3))) == 0)
        assert np.all(affinity_from_w(np.eye(3)) == 0)

    def test_symmetrized_magnitudes(self):
        W = np.zeros((3, 3))
        W[0, 1], W[1, 0] = 2.0, -4.0
        A = affinity_from_w(W)
        assert A[0, 1] == A[1, 0] == 3.0

    def test_wtw(self):
        W = np.array([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_array_equal(affinity_from_w(W, "wtw"), np.zeros((2, 2)))
        with pytest.raises(ValueError):
            affinity_from_w(W, "max")

    def test_geodesic_kernel(self):
        X = np.array([[1.0, 0, 0], [0, 1.0, 0], [0, 1.0, 0]])
        A = geodesic_affinity(X, sigma_a=1.0)
        assert A[0, 1] == pytest.approx(np.exp(-np.pi**2 / 4))
        assert A[1, 2] == 1.0
        assert np.all(np.diag(A) == 0)

    def test_euclidean_kernel_default_scale(self):
        A = euclidean_affinity(np.array([[0.0], [1.0], [3.0]]))
        assert A[0, 1] == pytest.approx(np.exp(-(1 / 2) ** 2))


class TestNcut:
    def test_two_blocks(self):
        A = np.zeros((6, 6))
        A[:3, :3] = A[3:, 3:] = 1.0
        res = ncut(A, 2)
        assert clustering_accuracy(res.labels, [0, 0, 0, 1, 1, 1]) == 1.0

    def test_k_one(self):
        assert np.all(ncut(np.ones((4, 4)), 1).labels == 0)

    def test_planted_partition(self):
        rng = np.random.default_rng(5)
        truth = np.repeat(np.arange(3), 30)
        A = (truth[:, None] == truth[None, :]).astype(float)
        noise = np.triu(rng.random((90, 90)) < 0.05, 1)
        noise = noise | noise.T
        A[noise & (A == 0)] = 1.0
        np.fill_diagonal(A, 0.0)
        assert clustering_accuracy(ncut(A, 3, seed=0).labels, truth) >= 0.95

    def test_deterministic(self):
        rng = np.random.default_rng(1)
        A = rng.random((20, 20))
        A = A + A.T
        assert np.array_equal(ncut(A, 3, seed=4).labels, ncut(A, 3, seed=4).labels)

    def test_errors(self):
        with pytest.raises(DegenerateAffinityError):
            ncut(np.zeros((4, 4)), 2)
        with pytest.raises(ValueError):
            ncut(np.ones((3, 3)), 4)
        with pytest.raises(ValueError):
            ncut(np.ones((3, 4)), 2)


class TestAccuracy:
    def test_examples(self):
        assert clustering_accuracy([0, 1, 2], [0, 1, 2]) == 1.0
        assert clustering_accuracy([2, 0, 1], [0, 1, 2]) == 1.0
        assert clustering_accuracy([0, 0, 1, 1], [0, 1, 0, 1]) == 0.5

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            clustering_accuracy([0, 1], [0])

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=30))
    def test_matches_brute_force(self, pairs):
        pred, truth = zip(*pairs)
        assert clustering_accuracy(pred, truth) == pytest.approx(brute_force_accuracy(pred, truth))
