"""Synthetic clustered datasets on the sphere."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import SeparationUnsatisfiable
from .geometry import pairwise_geodesic

MAX_ATTEMPTS = 100_000


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of a planted-cluster dataset.

    ``spread`` is the RMS angular deviation of a point from its centroid
    (radians); ``min_sep`` is the minimum geodesic distance between centroids.
    """

    k: int = 3
    n_per: int = 30
    m: int = 9
    spread: float = 0.05
    min_sep: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.n_per < 1 or self.k * self.n_per < 2:
            raise ValueError("need k >= 1, n_per >= 1 and k * n_per >= 2")
        if self.m < 1:
            raise ValueError("sphere dimension m must be >= 1")
        if self.spread < 0 or self.min_sep < 0:
            raise ValueError("spread and min_sep must be nonnegative")
        if self.k > 1 and self.spread >= self.min_sep / 2:
            warnings.warn("spread >= min_sep/2: clusters will overlap", stacklevel=3)


@dataclass
class LabeledSphereSet:
    """Points on the sphere (rows of ``points``) with integer class labels."""

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.points.ndim != 2 or len(self.points) != len(self.labels):
            raise ValueError("points and labels must have equal length")

    def __len__(self):
        return len(self.labels)


def _centroids(spec, rng):
    d = spec.m + 1
    for _ in range(MAX_ATTEMPTS):
        C = np.abs(rng.standard_normal((spec.k, d)))
        C /= np.linalg.norm(C, axis=1, keepdims=True)
        if spec.k == 1:
            return C
        D = pairwise_geodesic(C)
        if D[np.triu_indices(spec.k, 1)].min() >= spec.min_sep:
            return C
    raise SeparationUnsatisfiable(
        f"no {spec.k} centroids with separation {spec.min_sep} after {MAX_ATTEMPTS} draws")


def generate(spec: SynthSpec) -> LabeledSphereSet:
    """Draw ``k * n_per`` points around ``k`` nonnegative-orthant centroids.

    Each point is the exponential map at its centroid of an isotropic
    Gaussian tangent vector with per-axis std ``spread / sqrt(m)``.
    """
    rng = np.random.default_rng(spec.seed)
    C = _centroids(spec, rng)
    d = spec.m + 1
    labels = np.repeat(np.arange(spec.k), spec.n_per)
    X = np.empty((labels.size, d))
    per_axis = spec.spread / np.sqrt(spec.m)
    for row, lab in enumerate(labels):
        c = C[lab]
        g = rng.standard_normal(d) * per_axis
        v = g - (g @ c) * c
        t = np.linalg.norm(v)
        if t < 1e-12:
            X[row] = c
            continue
        p = np.cos(t) * c + np.sin(t) * (v / t)
        X[row] = p / np.linalg.norm(p)
    return LabeledSphereSet(X, labels)
