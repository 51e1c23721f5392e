"""Nearest-neighbour classifiers on the sphere and on low-rank features.

Both classifiers break distance ties by the lower training index and vote
ties by the smaller class id.
"""
from __future__ import annotations

import numpy as np

from .errors import EmptyTrainError, LengthMismatchError
from .geometry import as_data_matrix
from .synth import LabeledSphereSet


def _vote(labels, order, k):
    votes = labels[order[:k]]
    classes, counts = np.unique(votes, return_counts=True)
    return int(classes[np.argmax(counts)])


def _check_k(k, n):
    if n == 0:
        raise EmptyTrainError("training set is empty")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got {k}")


def gknn_predict(train: LabeledSphereSet, query, k: int = 1) -> int:
    """Majority label among the ``k`` geodesically nearest training points."""
    _check_k(k, len(train))
    q = np.asarray(query, dtype=float).ravel()
    d = np.arccos(np.clip(train.points @ q, -1.0, 1.0))
    return _vote(train.labels, np.argsort(d, kind="stable"), k)


def gknn_predict_many(train: LabeledSphereSet, queries, k: int = 1) -> np.ndarray:
    Q = as_data_matrix(queries)
    return np.array([gknn_predict(train, q, k) for q in Q], dtype=int)


def euclidean_knn_predict(train_X, train_labels, queries, k: int = 1) -> np.ndarray:
    train_X = np.asarray(train_X, dtype=float)
    labels = np.asarray(train_labels, dtype=int)
    if len(train_X) != len(labels):
        raise LengthMismatchError("train features and labels differ in length")
    _check_k(k, len(labels))
    out = []
    for q in np.atleast_2d(np.asarray(queries, dtype=float)):
        d = np.linalg.norm(train_X - q, axis=1)
        out.append(_vote(labels, np.argsort(d, kind="stable"), k))
    return np.array(out, dtype=int)


def lrr_feature_predict(W, labels, train_cols, test_cols, k: int = 1) -> np.ndarray:
    """Classify columns of a jointly solved ``W`` by kNN over training columns.

    Parameters
    ----------
    W : ndarray, shape (n, n)
        Coefficient matrix from a solve over train and test points together.
    labels : array of int
        Labels of ``train_cols``, in the same order.
    train_cols, test_cols : sequences of int
        Column indices of ``W``.
    """
    W = np.asarray(W, dtype=float)
    n = W.shape[1]
    train_cols = np.asarray(train_cols, dtype=int)
    test_cols = np.asarray(test_cols, dtype=int)
    for cols in (train_cols, test_cols):
        if cols.size and (cols.min() < 0 or cols.max() >= n):
            raise IndexError(f"column index out of range for W with {n} columns")
    feats = W.T
    return euclidean_knn_predict(feats[train_cols], labels, feats[test_cols], k)


def accuracy(pred, truth) -> float:
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise LengthMismatchError(f"{pred.shape} vs {truth.shape}")
    if pred.size == 0:
        return 0.0
    return float(np.mean(pred == truth))
