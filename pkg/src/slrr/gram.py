"""Per-point quadratic-form matrices and geodesic ℓ1 weights.

For every data point ``x_i`` the tangent factor ``V_i`` stacks the log maps
``log_{x_i}(x_j)`` as columns, and ``Q_i = V_i^T V_i``.  The quadratic cost of
representing ``x_i`` by coefficients ``w`` is then ``w^T Q_i w``, which is PSD
by construction.

Arrays are laid out as ``V[i]`` of shape ``(d, n)`` and ``Q[i]`` of shape
``(n, n)``, so a whole set is a single ``(n, d, n)`` or ``(n, n, n)`` array.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import kernels
from .errors import DimensionError
from .geometry import as_data_matrix, check_no_antipodal, pairwise_geodesic

N_MAX = 2000


def thread_count() -> int:
    """Worker count from ``SLRR_THREADS`` (default: CPU count)."""
    raw = os.environ.get("SLRR_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"SLRR_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def _parallel_rows(fn, src, out, n, threads=None):
    # each worker owns a disjoint row range, so output is schedule-independent
    threads = min(thread_count() if threads is None else threads, n)
    if threads <= 1:
        fn(src, out, 0, n)
        return out
    bounds = np.linspace(0, n, threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, src, out, int(a), int(b))
                   for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        for f in futures:
            f.result()
    return out


def _check_size(n, n_max):
    if n < 2:
        raise DimensionError("need at least two data points")
    if n > n_max:
        raise DimensionError(f"n={n} exceeds n_max={n_max}; Q storage grows as n^3")


def build_tangent_factors(data, *, n_max=N_MAX, threads=None) -> np.ndarray:
    """Tangent factors ``V`` with ``V[i][:, j] = log_{x_i}(x_j)``.

    Parameters
    ----------
    data : sequence of SpherePoint or array of shape (n, d)
        Unit vectors, one per row.

    Returns
    -------
    ndarray, shape (n, d, n)

    Raises
    ------
    AntipodalError
        If any pair of points is antipodal.
    """
    X = np.ascontiguousarray(as_data_matrix(data))
    n, d = X.shape
    _check_size(n, n_max)
    check_no_antipodal(X)
    out = np.empty((n, d, n))
    return _parallel_rows(kernels.tangent_factors, X, out, n, threads)


def build_euclidean_factors(X, *, n_max=N_MAX, threads=None) -> np.ndarray:
    """Euclidean analogue of :func:`build_tangent_factors`: columns ``x_j - x_i``."""
    X = np.ascontiguousarray(np.asarray(X, dtype=float))
    if X.ndim != 2:
        raise DimensionError("expected an (n, d) array")
    n, d = X.shape
    _check_size(n, n_max)
    out = np.empty((n, d, n))
    return _parallel_rows(kernels.euclidean_factors, X, out, n, threads)


def build_gram(factors, *, threads=None) -> np.ndarray:
    """Stack of ``Q_i = V_i^T V_i``, shape (n, n, n)."""
    V = np.ascontiguousarray(np.asarray(factors, dtype=float))
    if V.ndim != 3 or V.shape[0] != V.shape[2]:
        raise DimensionError(f"factors must have shape (n, d, n), got {V.shape}")
    n = V.shape[0]
    out = np.empty((n, n, n))
    return _parallel_rows(kernels.gram_from_factors, V, out, n, threads)


def build_geodesic_weights(data, sigma: float = 1.0) -> np.ndarray:
    """Weights ``exp(d_g(x_i, x_j) / sigma)`` off the diagonal, zero on it."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    D = pairwise_geodesic(as_data_matrix(data))
    G = np.exp(D / sigma)
    np.fill_diagonal(G, 0.0)
    return G


def unit_weights(n: int) -> np.ndarray:
    G = np.ones((n, n))
    np.fill_diagonal(G, 0.0)
    return G


def lipschitz_bound(grams: np.ndarray) -> float:
    """Largest eigenvalue over all ``Q_i`` (Lipschitz constant of the quadratic part)."""
    if grams.shape[0] == 0:
        return 0.0
    return float(max(np.linalg.eigvalsh(grams)[:, -1].max(), 0.0))
