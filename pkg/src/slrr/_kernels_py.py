"""Pure numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_kernels.pyx``.
Outputs are written into caller-owned arrays so that row ranges can be
filled from several threads.
"""
import numpy as np

ZERO_NORM = 1e-12
CHORD_SWITCH = 0.9


def angles(X, xi, c):
    """Geodesic angles from ``xi`` to the rows of X given their cosines ``c``."""
    theta = np.arccos(c)
    close = c > CHORD_SWITCH
    if np.any(close):
        chord = np.linalg.norm(X[close] - xi, axis=1)
        theta[close] = 2.0 * np.arcsin(np.minimum(chord / 2.0, 1.0))
    return theta


def tangent_factors(X, out, start, stop):
    """Fill ``out[i]`` (d x n) with the log maps of every row of X at row i."""
    for i in range(start, stop):
        xi = X[i]
        c = np.clip(X @ xi, -1.0, 1.0)
        U = X - c[:, None] * xi
        un = np.sqrt(np.einsum("jk,jk->j", U, U))
        scale = np.zeros_like(un)
        ok = un >= ZERO_NORM
        scale[ok] = angles(X, xi, c)[ok] / un[ok]
        L = U * scale[:, None]
        L[i] = 0.0
        out[i] = L.T


def euclidean_factors(X, out, start, stop):
    for i in range(start, stop):
        out[i] = (X - X[i]).T


def gram_from_factors(V, out, start, stop):
    """Fill ``out[i] = V[i]^T V[i]`` for i in [start, stop)."""
    for i in range(start, stop):
        Qi = V[i].T @ V[i]
        out[i] = 0.5 * (Qi + Qi.T)


def quad_form_sum(Q, W):
    """Return sum_i w_i^T Q_i w_i where w_i is column i of W."""
    QW = np.einsum("ijk,ki->ij", Q, W)
    return float(np.einsum("ij,ji->", QW, W))


def gradient(Q, W, y, beta, nu, GW, out):
    """Column i: Q_i w_i + nu g_i*sign(w_i) + (y_i + beta (sum w_i - 1)) 1."""
    QW = np.einsum("ijk,ki->ji", Q, W)
    viol = W.sum(axis=0) - 1.0
    out[...] = QW + nu * GW * np.sign(W) + (y + beta * viol)[None, :]
