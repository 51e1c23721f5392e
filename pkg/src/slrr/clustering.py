"""Affinity construction, normalized-cut spectral clustering and scoring."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.cluster import KMeans

from .errors import DegenerateAffinityError, LengthMismatchError
from .geometry import as_data_matrix, pairwise_geodesic

N_INIT = 20


@dataclass
class ClusterResult:
    labels: np.ndarray
    k: int
    accuracy: float | None = None


def _finish(A):
    A = 0.5 * (A + A.T)
    np.fill_diagonal(A, 0.0)
    return A


def affinity_from_w(W, mode: str = "abs") -> np.ndarray:
    """Symmetric affinity from a coefficient matrix.

    ``"abs"`` gives ``(|W| + |W|^T) / 2``; ``"wtw"`` gives ``|W|^T |W|``.
    The diagonal is zeroed in both cases.
    """
    W = np.asarray(W, dtype=float)
    if not np.all(np.isfinite(W)):
        raise ValueError("W has non-finite entries")
    if mode == "abs":
        return _finish(np.abs(W))
    if mode == "wtw":
        Wa = np.abs(W)
        return _finish(Wa.T @ Wa)
    raise ValueError(f"unknown affinity mode {mode!r}")


def geodesic_affinity(data, sigma_a: float | None = None) -> np.ndarray:
    """Gaussian kernel ``exp(-d_g^2 / sigma_a^2)`` on geodesic distances.

    ``sigma_a`` defaults to the median off-diagonal distance.
    """
    D = pairwise_geodesic(as_data_matrix(data))
    return _gaussian(D, sigma_a)


def euclidean_affinity(X, sigma_a: float | None = None) -> np.ndarray:
    """Gaussian kernel on Euclidean distances between rows of ``X``."""
    X = np.asarray(X, dtype=float)
    sq = np.einsum("ij,ij->i", X, X)
    D = np.sqrt(np.maximum(sq[:, None] + sq[None, :] - 2.0 * X @ X.T, 0.0))
    return _gaussian(0.5 * (D + D.T), sigma_a)


def _gaussian(D, sigma_a):
    n = D.shape[0]
    if sigma_a is None:
        off = D[~np.eye(n, dtype=bool)]
        sigma_a = float(np.median(off)) if off.size else 1.0
        if sigma_a <= 0:
            sigma_a = 1.0
    if not sigma_a > 0:
        raise ValueError("sigma_a must be positive")
    return _finish(np.exp(-(D / sigma_a) ** 2))


def spectral_embedding(A, k: int) -> np.ndarray:
    """Row-normalized bottom-k eigenvectors of the symmetric normalized Laplacian."""
    A = np.asarray(A, dtype=float)
    deg = A.sum(axis=1)
    deg[deg <= 0] = 1.0
    dinv = 1.0 / np.sqrt(deg)
    L = np.eye(len(A)) - dinv[:, None] * A * dinv[None, :]
    _, vecs = np.linalg.eigh(0.5 * (L + L.T))
    E = vecs[:, :k]
    nrm = np.linalg.norm(E, axis=1, keepdims=True)
    nrm[nrm == 0] = 1.0
    return E / nrm


def ncut(A, k: int, seed: int = 0, n_init: int = N_INIT) -> ClusterResult:
    """Normalized-cut spectral clustering into ``k`` groups.

    k-means++ with ``n_init`` restarts runs on the row-normalized spectral
    embedding; the lowest-inertia restart wins.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if A.ndim != 2 or A.shape != (n, n):
        raise ValueError("affinity must be square")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n (k={k}, n={n})")
    if k == 1:
        return ClusterResult(np.zeros(n, dtype=int), 1)
    if not np.any(A > 0):
        raise DegenerateAffinityError("affinity matrix is identically zero")
    E = spectral_embedding(A, k)
    km = KMeans(n_clusters=k, init="k-means++", n_init=n_init, random_state=seed)
    labels = km.fit_predict(E)
    return ClusterResult(labels.astype(int), k)


def contingency(pred, truth):
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise LengthMismatchError(f"{pred.shape} vs {truth.shape}")
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    C = np.zeros((p.max(initial=-1) + 1, t.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(C, (p, t), 1)
    return C


def clustering_accuracy(pred, truth) -> float:
    """Best agreement over one-to-one matchings of predicted to true ids."""
    C = contingency(pred, truth)
    if C.size == 0:
        return 1.0
    r, c = linear_sum_assignment(C, maximize=True)
    return float(C[r, c].sum() / C.sum())
