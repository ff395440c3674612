import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hte.core import (
    ConfigError,
    Covariate,
    HolderSpec,
    ObservationSet,
    RngSeed,
    euclidean_distance,
    k_nearest,
)


def test_euclidean_distance_examples():
    assert euclidean_distance([0, 0], [0, 0]) == 0.0
    assert euclidean_distance([0, 0], [3 / 5, 4 / 5]) == pytest.approx(1.0, abs=1e-15)
    assert euclidean_distance([0.1], [0.4]) == pytest.approx(0.3, abs=1e-15)


def test_euclidean_distance_dimension_mismatch():
    with pytest.raises(ConfigError):
        euclidean_distance([0.1, 0.2], [0.1])


def test_k_nearest_examples():
    pts = [0.1, 0.4, 0.6, 0.9]
    assert list(k_nearest(0.5, pts, 2)) == [1, 2]
    # symmetric tie resolves to the lower index first
    assert list(k_nearest(0.5, [0.4, 0.6], 2)) == [0, 1]
    assert list(k_nearest(0.6, pts, 1)) == [2]


def test_k_nearest_errors():
    with pytest.raises(ConfigError):
        k_nearest(0.5, [], 1)
    with pytest.raises(ConfigError):
        k_nearest(0.5, [0.1, 0.2], 3)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 40), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_k_nearest_sorted_and_complete(n, d, seed):
    rng = np.random.default_rng(seed)
    pts = rng.random((n, d))
    q = rng.random(d)
    k = int(rng.integers(1, n + 1))
    idx = k_nearest(q, pts, k)
    dists = np.linalg.norm(pts[idx] - q, axis=1)
    assert np.all(np.diff(dists) >= 0)
    full = k_nearest(q, pts, n)
    assert sorted(full) == list(range(n))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_triangle_inequality(d, seed):
    rng = np.random.default_rng(seed)
    a, b, c = rng.random((3, d))
    assert euclidean_distance(a, c) <= euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-12


def test_covariate_validation():
    cov = Covariate([0.2, 0.8])
    assert len(cov) == 2
    with pytest.raises(ConfigError):
        Covariate([1.2])
    with pytest.raises(ConfigError):
        Covariate([-0.1, 0.5])


def test_holder_spec_validation():
    HolderSpec(1, 0.5, 1.0)
    with pytest.raises(ConfigError):
        HolderSpec(1, 0.0)
    with pytest.raises(ConfigError):
        HolderSpec(1, 1.0, -1.0)


def test_observation_set_unequal_groups_and_immutability():
    data = ObservationSet(
        np.array([[0.1], [0.2], [0.3]]), np.zeros(3), np.array([[0.5]]), np.ones(1)
    )
    assert data.n_control == 3 and data.n_treatment == 1
    with pytest.raises((ValueError, AttributeError)):
        data.control_y[0] = 5.0
    with pytest.raises(AttributeError):
        data.dimension = 2
    with pytest.raises(ConfigError):
        ObservationSet(np.array([[1.5]]), np.zeros(1), np.array([[0.5]]), np.zeros(1))
    with pytest.raises(ConfigError):
        ObservationSet(np.array([[0.5, 0.5]]), np.zeros(1), np.array([[0.5]]), np.zeros(1))


def test_rng_seed_substreams_reproducible_and_distinct():
    seed = RngSeed(123)
    a1 = seed.generator(0, 0).standard_normal(5)
    a2 = seed.generator(0, 0).standard_normal(5)
    b = seed.generator(0, 1).standard_normal(5)
    c = seed.generator(1, 0).standard_normal(5)
    assert np.array_equal(a1, a2)
    assert not np.array_equal(a1, b)
    assert not np.array_equal(a1, c)
    with pytest.raises(ConfigError):
        RngSeed(-1)
