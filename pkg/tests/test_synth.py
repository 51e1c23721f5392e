import numpy as np
import pytest

from slrr.errors import SeparationUnsatisfiable
from slrr.geometry import pairwise_geodesic
from slrr.synth import SynthSpec, generate


def test_zero_spread_gives_centroids():
    d = generate(SynthSpec(k=2, n_per=4, spread=0.0, seed=1))
    for lab in (0, 1):
        rows = d.points[d.labels == lab]
        assert np.all(rows == rows[0])


def test_single_cluster():
    d = generate(SynthSpec(k=1, n_per=5))
    assert np.all(d.labels == 0) and len(d) == 5


def test_distance_profile():
    d = generate(SynthSpec(k=3, n_per=30, m=9, spread=0.05, min_sep=0.8, seed=0))
    D = pairwise_geodesic(d.points)
    same = d.labels[:, None] == d.labels[None, :]
    off = ~np.eye(len(d), dtype=bool)
    assert D[same & off].mean() < 0.15
    assert D[~same].mean() > 0.6
    np.testing.assert_allclose(np.linalg.norm(d.points, axis=1), 1.0, atol=1e-12)
    assert np.all(d.points.shape == (90, 10))


def test_deterministic():
    a = generate(SynthSpec(seed=3))
    b = generate(SynthSpec(seed=3))
    assert np.array_equal(a.points, b.points) and np.array_equal(a.labels, b.labels)


def test_validation():
    with pytest.raises(ValueError):
        SynthSpec(k=0)
    with pytest.raises(ValueError):
        SynthSpec(spread=-1)
    with pytest.warns(UserWarning):
        SynthSpec(spread=0.5, min_sep=0.8)

def test_unsatisfiable_separation(monkeypatch):
    from slrr import synth

    monkeypatch.setattr(synth, "MAX_ATTEMPTS", 200)
    # five points in a quarter circle cannot be 1.5 rad apart
    with pytest.raises(SeparationUnsatisfiable):
        generate(SynthSpec(k=5, m=1, min_sep=1.5, spread=0.0))
