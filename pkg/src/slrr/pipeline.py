"""Datasets, featurization and the end-to-end clustering/classification methods.

Cluster methods: ``proposed`` (sphere LRR + Ncut), ``ncut-raw`` (Ncut on a
Gaussian kernel over the Euclidean features), ``lrr-euclid`` (Euclidean LRR +
Ncut), ``gncut`` (Ncut on a geodesic kernel) and ``sc`` (sphere model with the
ℓ1 term only).  Classification methods pair the same representations with
nearest-neighbour voting; see :data:`CLASSIFY_METHODS`.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from . import classify, clustering, features
from .geometry import UNIT_TOL
from .solver import SolverConfig, solve

CLUSTER_METHODS = ("proposed", "ncut-raw", "lrr-euclid", "gncut", "sc")
CLASSIFY_METHODS = ("proposed", "gknn", "lrr-euclid", "sc", "knn-raw")
KINDS = ("raw", "hist", "sphere")


@dataclass
class Dataset:
    """Rows of ``values`` are samples; their meaning depends on ``kind``.

    ``raw``: measurements to be histogrammed; ``hist``: bin counts;
    ``sphere``: unit vectors used as-is.
    """

    kind: str
    values: np.ndarray
    labels: np.ndarray | None = None
    ids: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.values.size == 0:
            raise ValueError("dataset is empty")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("dataset contains non-finite values")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if len(self.labels) != len(self.values):
                raise ValueError("label column length differs from row count")
        if not self.ids:
            self.ids = [str(i) for i in range(len(self.values))]

    def __len__(self):
        return len(self.values)

    def subset(self, rows):
        rows = np.asarray(rows, dtype=int)
        labels = None if self.labels is None else self.labels[rows]
        return Dataset(self.kind, self.values[rows], labels, [self.ids[r] for r in rows])


@dataclass(frozen=True)
class FeatureSpec:
    bins: int = 6
    dims: int = 1
    alpha: float = 0.0


def validate_sphere_rows(values) -> None:
    bad = np.abs(np.linalg.norm(values, axis=1) - 1.0) > UNIT_TOL
    if np.any(bad):
        raise ValueError(f"rows {np.flatnonzero(bad)[:5].tolist()} are not unit vectors")


def _counts(ds: Dataset, fs: FeatureSpec) -> np.ndarray:
    if ds.kind == "hist":
        return np.maximum(ds.values, 0.0)
    # shared bin edges across the dataset so histograms are comparable
    P = ds.values.reshape(len(ds), -1, fs.dims)
    ranges = []
    for a in range(fs.dims):
        lo, hi = float(P[:, :, a].min()), float(P[:, :, a].max())
        ranges.append((lo, hi + features.RIGHT_PAD if hi > lo else hi))
    rows = [features.histogram_nd(v, fs.bins, fs.dims, ranges).counts for v in ds.values]
    return np.vstack(rows)


def _normalize_counts(C, alpha):
    C = C + alpha
    s = C.sum(axis=1, keepdims=True)
    empty = s[:, 0] <= 0
    C[empty] = 1.0  # no mass left: fall back to the uniform density
    s[empty] = C.shape[1]
    return C / s


def sphere_features(ds: Dataset, fs: FeatureSpec = FeatureSpec()) -> np.ndarray:
    """Square-root density of every sample, shape (n, d)."""
    if ds.kind == "sphere":
        X = ds.values
        return X / np.linalg.norm(X, axis=1, keepdims=True)
    return np.sqrt(_normalize_counts(_counts(ds, fs), fs.alpha))


def euclidean_features(ds: Dataset, fs: FeatureSpec = FeatureSpec()) -> np.ndarray:
    """Vectorized features for the Euclidean baselines.

    Normalized histograms for ``raw``/``hist`` data, the coordinates
    themselves for ``sphere`` data.
    """
    if ds.kind == "sphere":
        return sphere_features(ds, fs)
    return _normalize_counts(_counts(ds, fs), fs.alpha)


def corrupt(ds: Dataset, snr: float, seed: int) -> Dataset:
    """Add white noise at ``snr`` to every sample's stored values."""
    rows = []
    for sid, v in zip(ds.ids, ds.values):
        s = features.RawSample(v, sid)
        rows.append(features.add_noise_snr(s, snr, features.derive_seed(seed, sid)).values)
    return Dataset(ds.kind, np.vstack(rows), ds.labels, list(ds.ids))


def method_config(method: str, config: SolverConfig) -> SolverConfig:
    """Solver configuration used by an LRR-based method."""
    if method == "proposed":
        return config
    if method == "lrr-euclid":
        return dataclasses.replace(config, geometry="euclidean")
    if method == "sc":
        if not config.nu > 0:
            raise ValueError("the sc method needs nu > 0")
        return dataclasses.replace(config, lam=0.0, forbid_diagonal=True)
    raise ValueError(f"{method!r} does not use the LRR solver")


@dataclass
class MethodOutput:
    labels: np.ndarray
    converged: bool = True
    W: np.ndarray | None = None


def cluster(ds: Dataset, method: str, k: int, config: SolverConfig,
            fs: FeatureSpec = FeatureSpec(), seed: int = 0, affinity: str = "abs",
            threads=None) -> MethodOutput:
    if method not in CLUSTER_METHODS:
        raise ValueError(f"unknown cluster method {method!r}")
    if method == "ncut-raw":
        A = clustering.euclidean_affinity(euclidean_features(ds, fs))
        return MethodOutput(clustering.ncut(A, k, seed).labels)
    if method == "gncut":
        A = clustering.geodesic_affinity(sphere_features(ds, fs))
        return MethodOutput(clustering.ncut(A, k, seed).labels)
    cfg = method_config(method, config)
    X = euclidean_features(ds, fs) if cfg.geometry == "euclidean" else sphere_features(ds, fs)
    res = solve(X, cfg, threads=threads)
    A = clustering.affinity_from_w(res.W, affinity)
    return MethodOutput(clustering.ncut(A, k, seed).labels, res.converged, res.W)


def split_indices(labels, train_frac: float, seed: int):
    """Seeded stratified split; each class keeps at least one training row."""
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        idx = idx[rng.permutation(idx.size)]
        n_train = min(max(1, int(round(train_frac * idx.size))), idx.size)
        train.extend(idx[:n_train])
        test.extend(idx[n_train:])
    return np.sort(np.array(train, dtype=int)), np.sort(np.array(test, dtype=int))


def classify_split(ds: Dataset, method: str, train, test, config: SolverConfig,
                   fs: FeatureSpec = FeatureSpec(), k: int = 1, threads=None):
    """Predict labels of ``train`` and ``test`` rows; returns (train_pred, test_pred, converged).

    LRR-based methods solve jointly over all rows (transductive).
    """
    if method not in CLASSIFY_METHODS:
        raise ValueError(f"unknown classify method {method!r}")
    y = ds.labels
    if method == "gknn":
        X = sphere_features(ds, fs)
        tr = classify.LabeledSphereSet(X[train], y[train])
        return (classify.gknn_predict_many(tr, X[train], k),
                classify.gknn_predict_many(tr, X[test], k) if len(test) else np.array([], int),
                True)
    if method == "knn-raw":
        X = euclidean_features(ds, fs)
        pred = lambda rows: (classify.euclidean_knn_predict(X[train], y[train], X[rows], k)
                             if len(rows) else np.array([], int))
        return pred(train), pred(test), True
    cfg = method_config(method, config)
    X = euclidean_features(ds, fs) if cfg.geometry == "euclidean" else sphere_features(ds, fs)
    res = solve(X, cfg, threads=threads)
    pred = lambda rows: (classify.lrr_feature_predict(res.W, y[train], train, rows, k)
                         if len(rows) else np.array([], int))
    return pred(train), pred(test), res.converged
