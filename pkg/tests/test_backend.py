import os
import subprocess
import sys

import numpy as np
import pytest

from hte import _backend
from hte._backend import _ref

try:
    from hte._backend import _native
except ImportError:
    _native = None

needs_native = pytest.mark.skipif(_native is None, reason="compiled backend unavailable")


def random_cloud(rng, n, d):
    return rng.random((n, d))


@needs_native
def test_sqdist_matrix_bitwise_equal():
    rng = np.random.default_rng(0)
    for d in (1, 2, 3):
        q, p = random_cloud(rng, 37, d), random_cloud(rng, 53, d)
        assert np.array_equal(_native.sqdist_matrix(q, p), _ref.sqdist_matrix(q, p))


@needs_native
def test_match_nearest_bitwise_equal():
    rng = np.random.default_rng(1)
    for d in (1, 2):
        a, b = random_cloud(rng, 64, d), random_cloud(rng, 41, d)
        d2n, jn = _native.match_nearest(a, b)
        d2r, jr = _ref.match_nearest(a, b)
        assert np.array_equal(d2n, d2r)
        assert np.array_equal(jn, jr)


@needs_native
def test_match_nearest_tie_breaks_to_lowest_index():
    a = np.array([[0.5]])
    b = np.array([[0.4], [0.6], [0.4]])
    for impl in (_native, _ref):
        _, j = impl.match_nearest(a, b)
        assert j[0] == 0


@needs_native
def test_nw_smooth_matches_reference():
    rng = np.random.default_rng(2)
    coeffs = np.array([0.75, 0.0, -0.75])
    for d in (1, 2):
        p = random_cloud(rng, 200, d)
        v = rng.standard_normal(200)
        q = random_cloud(rng, 50, d)
        a = _native.nw_smooth(p, v, q, 0.17, coeffs)
        b = _ref.nw_smooth(p, v, q, 0.17, coeffs)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


@needs_native
def test_nw_smooth_empty_window_fallback():
    p = np.array([[0.1], [0.9]])
    v = np.array([3.0, 7.0])
    q = np.array([[0.45]])
    for impl in (_native, _ref):
        out = impl.nw_smooth(p, v, q, 0.05, np.array([0.5]))
        assert out[0] == 3.0


def test_backend_env_override():
    code = (
        "import hte._backend as b; print(b.BACKEND)"
    )
    env = dict(os.environ, HTE_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "python"


def test_active_backend_reported():
    assert _backend.BACKEND in ("native", "python")
