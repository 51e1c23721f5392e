"""Unit-sphere primitives: geodesic distance, exponential and logarithm maps.

Points are unit vectors in R^(m+1).  The scalar functions accept either
:class:`SpherePoint` instances or plain array-likes; the ``pairwise_*``
helpers work on row-stacked data matrices and are what the solver uses.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AntipodalError, BaseMismatchError, DimensionError

UNIT_TOL = 1e-10
TANGENT_TOL = 1e-9
ANTIPODAL_EPS = 1e-8
ZERO_NORM = 1e-12
# above this cosine the chord formula replaces arccos, which loses
# precision near 1 (an error of 1 ulp in x.y gives ~1e-8 rad)
CHORD_SWITCH = 0.9


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """A unit-norm vector on S^m (the square root of a discrete density)."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float, copy=True).ravel()
        if c.size == 0:
            raise DimensionError("sphere point must have at least one coordinate")
        if not np.all(np.isfinite(c)):
            raise ValueError("sphere point has non-finite coordinates")
        if abs(np.linalg.norm(c) - 1.0) > UNIT_TOL:
            raise ValueError(f"not a unit vector (norm={np.linalg.norm(c)!r})")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_vector(cls, v) -> "SpherePoint":
        """Project an arbitrary nonzero vector onto the sphere."""
        v = np.asarray(v, dtype=float).ravel()
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(v / nrm)

    @property
    def dim(self) -> int:
        return self.coords.size

    def __array__(self, dtype=None, copy=None):
        return self.coords if dtype is None else self.coords.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, SpherePoint):
            return NotImplemented
        return np.array_equal(self.coords, other.coords)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A vector in the tangent space at ``base`` (orthogonal to it)."""

    base: SpherePoint
    vec: np.ndarray

    def __post_init__(self):
        v = np.array(self.vec, dtype=float, copy=True).ravel()
        if v.shape != self.base.coords.shape:
            raise DimensionError("tangent vector and base point differ in length")
        nrm = np.linalg.norm(v)
        if abs(v @ self.base.coords) > TANGENT_TOL * nrm + 1e-15:
            raise ValueError("vector is not orthogonal to its base point")
        v.setflags(write=False)
        object.__setattr__(self, "vec", v)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))


def _coords(x) -> np.ndarray:
    if isinstance(x, SpherePoint):
        return x.coords
    return np.asarray(x, dtype=float).ravel()


def _point(x) -> SpherePoint:
    return x if isinstance(x, SpherePoint) else SpherePoint(x)


def _angle(a, b, c):
    if c > CHORD_SWITCH:
        return 2.0 * np.arcsin(min(np.linalg.norm(a - b) / 2.0, 1.0))
    return np.arccos(max(c, -1.0))


def geodesic_distance(x, y) -> float:
    """Great-circle distance ``arccos(x . y)`` in radians, in ``[0, pi]``.

    The dot product is clamped to [-1, 1]; for nearby points the equivalent
    chord form ``2 arcsin(|x - y| / 2)`` is evaluated instead.
    """
    a, b = _coords(x), _coords(y)
    if a.shape != b.shape:
        raise DimensionError("points differ in dimension")
    return float(_angle(a, b, float(a @ b)))


def log_map(x, y) -> TangentVector:
    """Logarithm map of ``y`` at base ``x``.

    Returns ``u * arccos(x.y) / |u|`` with ``u = y - (x.y) x``.  When ``y``
    coincides with ``x`` (``|u|`` below 1e-12) the zero vector is returned.

    Raises
    ------
    AntipodalError
        If ``x . y <= -1 + 1e-8``; the map is multivalued there.
    """
    xp = _point(x)
    a, b = xp.coords, _coords(y)
    if a.shape != b.shape:
        raise DimensionError("points differ in dimension")
    c = float(a @ b)
    if c <= -1.0 + ANTIPODAL_EPS:
        raise AntipodalError(f"points are antipodal (x.y={c!r})")
    u = b - c * a
    nu = np.linalg.norm(u)
    if nu < ZERO_NORM:
        return TangentVector(xp, np.zeros_like(a))
    v = u * (_angle(a, b, c) / nu)
    # strip the rounding residue along x so the tangent invariant holds
    v -= (v @ a) * a
    return TangentVector(xp, v)


def exp_map(v: TangentVector) -> SpherePoint:
    """Exponential map ``cos|v| x + sin|v| v/|v|``, renormalized to unit norm."""
    x = v.base.coords
    t = np.linalg.norm(v.vec)
    if t < ZERO_NORM:
        return v.base
    p = np.cos(t) * x + np.sin(t) * (v.vec / t)
    return SpherePoint(p / np.linalg.norm(p))


def tangent_inner(a: TangentVector, b: TangentVector) -> float:
    """Euclidean inner product of two tangent vectors at the same base point."""
    if np.max(np.abs(a.base.coords - b.base.coords)) > UNIT_TOL:
        raise BaseMismatchError("tangent vectors have different base points")
    return float(a.vec @ b.vec)


def as_data_matrix(data) -> np.ndarray:
    """Stack a sequence of points into an ``(n, m+1)`` float array.

    Rows are validated against the unit-norm invariant.
    """
    if isinstance(data, np.ndarray):
        X = np.asarray(data, dtype=float)
    else:
        X = np.asarray([_coords(p) for p in data], dtype=float)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise DimensionError(f"expected a non-empty (n, d) array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("data contains non-finite values")
    bad = np.abs(np.linalg.norm(X, axis=1) - 1.0) > UNIT_TOL
    if np.any(bad):
        raise ValueError(f"rows {np.flatnonzero(bad)[:5].tolist()} are not unit vectors")
    return X


def pairwise_inner(X: np.ndarray) -> np.ndarray:
    G = X @ X.T
    np.clip(G, -1.0, 1.0, out=G)
    return G


def pairwise_geodesic(X: np.ndarray) -> np.ndarray:
    """Matrix of geodesic distances between the rows of ``X``."""
    G = pairwise_inner(X)
    D = np.arccos(G)
    close = G > CHORD_SWITCH
    if np.any(close):
        i, j = np.nonzero(close)
        chord = np.linalg.norm(X[i] - X[j], axis=1)
        D[i, j] = 2.0 * np.arcsin(np.minimum(chord / 2.0, 1.0))
    np.fill_diagonal(D, 0.0)
    return 0.5 * (D + D.T)


def check_no_antipodal(X: np.ndarray) -> None:
    G = X @ X.T
    i, j = np.nonzero(G <= -1.0 + ANTIPODAL_EPS)
    if i.size:
        raise AntipodalError(f"points {int(i[0])} and {int(j[0])} are antipodal")
