import math

import numpy as np
import pytest

from hte.core import ConfigError
from hte.synth import PiecewiseDensity, two_level_density
from hte.theory import (
    DENSITY_BOUND_CONSTANT,
    RateInput,
    builtin_density_family,
    calibrate_density_bound_constant,
    default_radius_grid,
    fixed_rate,
    minimal_function,
    random_rate,
    spike_floor_density,
    verify_minimal_inequality,
)


def test_fixed_rate_examples():
    assert fixed_rate(RateInput(100, 1, 0.5, 1.0, 0.0, delta_inf=0.0)) == 0.0
    got = fixed_rate(RateInput(1000, 1, 0.5, 1.0, 0.0, delta_inf=1 / 2000))
    assert got == pytest.approx(1000**-0.5 * 0.5**0.5, rel=1e-12)
    got = fixed_rate(RateInput(1000, 1, 0.5, 1.0, 1.0, delta_inf=0.0))
    assert got == pytest.approx(1000 ** (-1 / 3), rel=1e-12)


def test_random_rate_example_terms():
    rate = random_rate(RateInput(10**6, 1, 1.0, 1.0, 1.0, kappa=1.0))
    assert rate.terms[0] == pytest.approx(1e-6, rel=1e-9)
    assert rate.terms[1] == pytest.approx(1e-3, rel=1e-9)
    assert rate.terms[2] == pytest.approx(1e-2, rel=1e-9)
    assert rate.dominant == "estimation_noise"


def test_random_rate_zero_noise():
    rate = random_rate(RateInput(1000, 2, 0.5, 1.0, 0.0, kappa=1.0))
    assert rate.terms[1] == 0.0 and rate.terms[2] == 0.0
    assert rate.dominant == "matching_bias"
    assert rate.total == rate.terms[0]


def test_random_rate_errors():
    with pytest.raises(ConfigError):
        random_rate(RateInput(100, 1, 0.5, 1.5, 1.0, kappa=1.0))
    with pytest.raises(ConfigError):
        random_rate(RateInput(100, 1, 0.5, 1.0, 1.0, kappa=200.0))


def test_random_rate_monotonicity():
    base = dict(d=1, beta_mu=0.5, beta_tau=1.0)
    for i in range(3):
        for n, kappa, sigma in ((500, 2.0, 0.3), (2000, 4.0, 1.0)):
            t = random_rate(RateInput(n=n, sigma=sigma, kappa=kappa, **base)).terms[i]
            t_n = random_rate(RateInput(n=2 * n, sigma=sigma, kappa=kappa, **base)).terms[i]
            t_k = random_rate(RateInput(n=n, sigma=sigma, kappa=2 * kappa, **base)).terms[i]
            t_s = random_rate(RateInput(n=n, sigma=2 * sigma, kappa=kappa, **base)).terms[i]
            assert t_n < t
            assert t_k >= t
            assert t_s >= t


def test_dominant_exponent_piecewise_linear_in_noise_exponent():
    # With sigma = n^c the negated exponent of the dominant term is piecewise
    # linear in c with at most three pieces.
    d, bm, bt = 2, 0.4, 1.0
    inv = 1 / bm + 1 / bt
    cs = np.linspace(0.0, 1.0, 201)
    exps = []
    for c in cs:
        exps.append(
            max(
                -2.0 / (d * inv),
                (2 * c - 2.0) / (2.0 + d * inv),
                (2 * c - 1.0) * bt / (2 * bt + d),
            )
        )
    neg = -np.asarray(exps)
    slopes = np.round(np.diff(neg) / np.diff(cs), 6)
    assert len(set(slopes.tolist())) <= 3
    # and the asymptotic exponents agree with random_rate's dominant term
    for c in (0.05, 0.5, 0.95):
        n = 10**7
        rate = random_rate(RateInput(n, d, bm, bt, float(n) ** c, kappa=1.0))
        direct = max(
            (1 / n**2) ** (1 / (d * inv)),
            (n ** (2 * c) / n**2) ** (1 / (2 + d * inv)),
            (n ** (2 * c) / n) ** (bt / (2 * bt + d)),
        )
        assert rate.terms[np.argmax(rate.terms)] == pytest.approx(direct, rel=1e-9)


def test_minimal_function_uniform():
    uniform = PiecewiseDensity((0.0, 1.0), (1.0,))
    assert minimal_function(uniform, 0.5) == pytest.approx(0.5, abs=1e-15)
    assert minimal_function(uniform, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert minimal_function(uniform, 0.9) == pytest.approx(0.5, abs=1e-15)


def test_minimal_function_vanishing_density_region():
    # Density concentrated away from x gives a small minimal value at x.
    spike = spike_floor_density(0.99, 0.01)
    assert minimal_function(spike, 0.05) < 0.05
    assert minimal_function(spike, 0.5) == pytest.approx(0.5, abs=1e-12)


def test_minimal_function_below_density_at_continuity_points():
    g0, _ = two_level_density(4.0)
    for x in (0.1, 0.3, 0.7, 0.9):
        assert minimal_function(g0, x) <= g0.pdf(np.array([x]))[0] + 1e-12


def test_minimal_function_monotone_under_refinement():
    g0, _ = two_level_density(10.0)
    coarse = default_radius_grid(size=50)
    fine = default_radius_grid(size=1000)
    for x in (0.05, 0.45, 0.55, 0.96):
        assert minimal_function(g0, x, fine) <= minimal_function(g0, x, coarse) + 1e-15


def test_verify_uniform_exact_value():
    uniform = PiecewiseDensity((0.0, 1.0), (1.0,))
    for lam in (1.0, 10.0, 100.0, 1000.0):
        chk = verify_minimal_inequality(uniform, lam)
        assert chk.lhs == pytest.approx(math.exp(-lam / 2.0), rel=1e-12)
        assert chk.holds


def test_verify_family_sweep_with_calibrated_constant():
    for name, density in builtin_density_family():
        for lam in (1.0, 10.0, 100.0, 1000.0):
            chk = verify_minimal_inequality(density, lam)
            assert chk.holds, (name, lam, chk)


def test_verify_small_lambda_limit():
    g0, _ = two_level_density(2.0)
    chk = verify_minimal_inequality(g0, 1e-6)
    assert chk.lhs == pytest.approx(1.0, abs=1e-5)
    assert chk.bound == pytest.approx(1.0, abs=1e-5)
    assert chk.holds


def test_calibrated_constant_is_frozen_value():
    assert calibrate_density_bound_constant() == DENSITY_BOUND_CONSTANT
