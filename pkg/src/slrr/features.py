"""Histogram features, the square-root density map, and noise injection."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import EmptyRangeError
from .geometry import SpherePoint

RIGHT_PAD = 1e-12


@dataclass(frozen=True, eq=False)
class RawSample:
    values: np.ndarray
    id: str = ""
    class_label: int | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size == 0:
            raise ValueError("sample has no values")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"sample {self.id!r} has non-finite values")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True, eq=False)
class Histogram:
    counts: np.ndarray
    bin_edges: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=float).ravel()
        if np.any(c < 0) or not c.sum() > 0:
            raise ValueError("histogram counts must be nonnegative with positive total")
        object.__setattr__(self, "counts", c)
        object.__setattr__(self, "bin_edges", np.asarray(self.bin_edges, dtype=float))


def _values(sample):
    return sample.values if isinstance(sample, RawSample) else RawSample(sample).values


def bin_edges(lo, hi, bins) -> np.ndarray:
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if not hi > lo:
        if bins > 1:
            raise EmptyRangeError(f"range ({lo}, {hi}) has zero width")
        hi = lo + max(RIGHT_PAD, abs(lo) * 4e-16)
    return np.linspace(lo, hi, bins + 1)


def _bin_index(v, edges):
    # bins are (e_b, e_{b+1}], the first also holds its left edge; out-of-range
    # values are clipped into the end bins
    idx = np.searchsorted(edges, v, side="left") - 1
    return np.clip(idx, 0, len(edges) - 2)


def histogram(sample, bins: int, range=None) -> Histogram:
    """Equal-width histogram of a sample's values.

    Without ``range`` the sample's own min and max are used, with the right
    edge padded by 1e-12.  Every value lands in exactly one bin; values
    outside an explicit range go to the nearest end bin.
    """
    v = _values(sample)
    if range is None:
        lo, hi = float(v.min()), float(v.max())
        if hi > lo:
            hi += RIGHT_PAD
    else:
        lo, hi = map(float, range)
    edges = bin_edges(lo, hi, bins)
    counts = np.bincount(_bin_index(v, edges), minlength=bins).astype(float)
    return Histogram(counts, edges)


def histogram_nd(sample, bins: int, dims: int, ranges=None) -> Histogram:
    """Joint histogram of ``dims``-dimensional vectors, flattened to ``bins**dims``.

    The sample's values are read as consecutive ``dims``-tuples.  ``ranges``
    is a sequence of per-axis ``(lo, hi)``; axes default to the data range.
    ``bin_edges`` of the result holds the per-axis edges, shape (dims, bins+1).
    """
    v = _values(sample)
    if v.size % dims:
        raise ValueError(f"{v.size} values cannot be split into {dims}-vectors")
    P = v.reshape(-1, dims)
    flat = np.zeros(P.shape[0], dtype=np.int64)
    all_edges = []
    for a in np.arange(dims):
        if ranges is None:
            lo, hi = float(P[:, a].min()), float(P[:, a].max())
            hi = hi + RIGHT_PAD if hi > lo else hi
        else:
            lo, hi = map(float, ranges[a])
        edges = bin_edges(lo, hi, bins)
        all_edges.append(edges)
        flat = flat * bins + _bin_index(P[:, a], edges)
    counts = np.bincount(flat, minlength=bins**dims).astype(float)
    return Histogram(counts, np.vstack(all_edges))


def to_sqrt_density(h, alpha: float = 0.0) -> SpherePoint:
    """Square root of the normalized histogram: a point in the nonnegative orthant of the sphere.

    ``alpha`` adds a pseudo-count to every bin before normalizing.
    """
    counts = h.counts if isinstance(h, Histogram) else np.asarray(h, dtype=float)
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    c = counts + alpha
    if np.any(c < 0) or not c.sum() > 0:
        raise ValueError("counts must be nonnegative with positive total")
    return SpherePoint(np.sqrt(c / c.sum()))


def sqrt_density_rows(C, alpha: float = 0.0) -> np.ndarray:
    """Row-wise :func:`to_sqrt_density` for a counts matrix."""
    C = np.asarray(C, dtype=float) + alpha
    s = C.sum(axis=1, keepdims=True)
    if np.any(C < 0) or np.any(s <= 0):
        raise ValueError("every row needs nonnegative counts with positive total")
    return np.sqrt(C / s)


def derive_seed(seed: int, sample_id) -> int:
    """Stable per-sample seed, independent of processing order."""
    h = hashlib.blake2b(f"{int(seed)}:{sample_id}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def snr_from_db(db: float) -> float:
    return float(10.0 ** (db / 10.0))


def add_noise_snr(sample, snr: float, seed: int) -> RawSample:
    """Add white Gaussian noise at linear power ratio ``snr``.

    Per-element noise variance is ``mean(values**2) / snr``.
    """
    if not snr > 0:
        raise ValueError("snr must be positive")
    s = sample if isinstance(sample, RawSample) else RawSample(sample)
    power = float(np.mean(s.values**2))
    rng = np.random.default_rng(seed)
    noisy = s.values + rng.standard_normal(s.values.size) * np.sqrt(power / snr)
    return RawSample(noisy, s.id, s.class_label)
