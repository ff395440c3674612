import json
import math

import numpy as np
import pytest
from scipy import stats

from hte.core import ConfigError
from hte.fixed_design import GridDesign
from hte.synth import (
    FunctionSpec,
    PiecewiseDensity,
    RandomDesign,
    ScenarioConfig,
    build_function,
    reference_scenario,
    sample_scenario,
    two_level_density,
    unit_bump,
)


def test_reference_mu0_matches_mixture_oracle():
    mu0 = build_function(FunctionSpec("reference_mu0"))
    for x in (0.05, 0.4, 0.77):
        expected = (
            2.0 * stats.norm.pdf(x, 0.1, 0.15)
            + 2.5 * stats.norm.pdf(x, 0.4, 0.05)
            + 4.0 * stats.norm.pdf(x, 0.8, 0.1)
        )
        assert mu0(np.array([[x]])) == pytest.approx(expected, rel=1e-12)
    # the sharp middle spike dominates at its center
    assert mu0(np.array([[0.4]])) == pytest.approx(2.5 / (0.05 * math.sqrt(2 * math.pi)), rel=0.05)


def test_reference_tau_at_center():
    tau = build_function(FunctionSpec("reference_tau"))
    assert tau(np.array([[0.5]])) == pytest.approx(1.0 / math.sqrt(2 * math.pi), rel=1e-12)
    assert tau(np.array([[0.5]])) == pytest.approx(stats.norm.pdf(0.0), rel=1e-12)


def test_reference_functions_reduce_dimension():
    mu0 = build_function(FunctionSpec("reference_mu0"))
    # at the cube center the reduced coordinate is 1/2 in any dimension
    assert mu0(np.array([[0.5, 0.5, 0.5]])) == pytest.approx(mu0(np.array([[0.5]])))


def test_two_level_density_kappa_one_is_uniform():
    g0, g1 = two_level_density(1.0)
    x = np.linspace(0, 1, 7)
    assert np.allclose(g0.pdf(x), 1.0)
    assert np.allclose(g1.pdf(x), 1.0)


def test_density_ratio_certificate_exact():
    for kappa in (1.0, 2.0, 4.0, 10.0):
        g0, g1 = two_level_density(kappa)
        assert g0.ratio_bound(g1) == pytest.approx(kappa, rel=1e-12)


def test_density_cdf_ppf_roundtrip():
    g0, _ = two_level_density(3.0)
    u = np.linspace(0, 1, 101)
    assert np.allclose(g0.cdf(g0.ppf(u)), u, atol=1e-12)
    assert g0.cdf(np.array([0.5]))[0] == pytest.approx(3.0 / 4.0)


def test_grid_sampling_is_deterministic_grid():
    design = GridDesign(4, (0.1,))
    scenario = ScenarioConfig(
        design=design, mu0=FunctionSpec("zero"), tau=FunctionSpec("zero"),
        sigma=0.0, n=4, d=1, kappa=1.0, seed=0,
    )
    data = sample_scenario(scenario)
    assert np.allclose(data.control_x[:, 0], [0.0, 0.25, 0.5, 0.75])
    assert np.allclose(data.treatment_x[:, 0], [0.1, 0.35, 0.6, 0.85])


def test_noiseless_outcomes_equal_functions():
    scenario = reference_scenario(50, 1, 2.0, 7, sigma=0.0)
    data = sample_scenario(scenario)
    mu0 = build_function(scenario.mu0)
    tau = build_function(scenario.tau)
    assert np.array_equal(data.control_y, mu0(data.control_x))
    assert np.array_equal(data.treatment_y, mu0(data.treatment_x) + tau(data.treatment_x))


def test_seeded_determinism_and_replication_streams():
    scenario = reference_scenario(100, 2, 4.0, 99)
    a = sample_scenario(scenario, replication=3)
    b = sample_scenario(scenario, replication=3)
    c = sample_scenario(scenario, replication=4)
    assert np.array_equal(a.control_x, b.control_x)
    assert np.array_equal(a.treatment_y, b.treatment_y)
    assert not np.array_equal(a.control_x, c.control_x)


def test_left_half_frequency_matches_target():
    kappa = 4.0
    scenario = reference_scenario(10_000, 1, kappa, 123, sigma=0.0)
    data = sample_scenario(scenario)
    frac = float(np.mean(data.control_x[:, 0] <= 0.5))
    target = kappa / (kappa + 1.0)
    band = 3.0 * math.sqrt(target * (1 - target) / 10_000)
    assert abs(frac - target) <= band


def test_first_coordinate_marginal_ks():
    kappa = 4.0
    scenario = reference_scenario(10_000, 1, kappa, 2024, sigma=0.0)
    data = sample_scenario(scenario)
    g0, _ = two_level_density(kappa)
    xs = np.sort(data.control_x[:, 0])
    emp_hi = np.arange(1, xs.size + 1) / xs.size
    emp_lo = np.arange(0, xs.size) / xs.size
    cdf = g0.cdf(xs)
    ks = max(np.abs(emp_hi - cdf).max(), np.abs(emp_lo - cdf).max())
    critical_1pct = 1.6276 / math.sqrt(xs.size)
    assert ks < critical_1pct


def test_scenario_json_roundtrip_and_digest_stability():
    scenario = reference_scenario(200, 1, 4.0, 17)
    text = scenario.to_json()
    again = ScenarioConfig.from_json(text)
    assert again.to_json() == text
    assert again.digest() == scenario.digest()
    a = sample_scenario(scenario, replication=1)
    b = sample_scenario(again, replication=1)
    assert np.array_equal(a.control_x, b.control_x)
    assert np.array_equal(a.treatment_y, b.treatment_y)


def test_grid_scenario_json_roundtrip():
    scenario = ScenarioConfig(
        design=GridDesign(5, (0.05,)),
        mu0=FunctionSpec("gaussian_mixture", {"weights": [1.0], "means": [0.5], "sds": [0.2]}),
        tau=FunctionSpec("constant", {"value": 0.3}),
        sigma=0.1, n=5, d=1, kappa=1.0, seed=4,
    )
    doc = json.loads(scenario.to_json())
    assert doc["design"]["type"] == "grid"
    again = ScenarioConfig.from_json(scenario.to_json())
    assert np.array_equal(
        sample_scenario(scenario).treatment_y, sample_scenario(again).treatment_y
    )


def test_bare_callables_not_serializable():
    scenario = ScenarioConfig(
        design=RandomDesign(*two_level_density(1.0)),
        mu0=lambda x: np.zeros(np.atleast_2d(x).shape[0]),
        tau=FunctionSpec("zero"),
        sigma=0.0, n=10, d=1, kappa=1.0, seed=0,
    )
    data = sample_scenario(scenario)
    assert np.allclose(data.control_y, 0.0)
    with pytest.raises(ConfigError):
        scenario.to_json()


def test_scenario_validation():
    g0, g1 = two_level_density(4.0)
    with pytest.raises(ConfigError):
        ScenarioConfig(
            design=RandomDesign(g0, g1), mu0=FunctionSpec("zero"), tau=FunctionSpec("zero"),
            sigma=0.0, n=10, d=1, kappa=2.0, seed=0,  # declared kappa below true ratio
        )
    with pytest.raises(ConfigError):
        ScenarioConfig(
            design=GridDesign(4, (0.1,)), mu0=FunctionSpec("zero"), tau=FunctionSpec("zero"),
            sigma=0.0, n=5, d=1, kappa=1.0, seed=0,  # n mismatch
        )
    with pytest.raises(ConfigError):
        PiecewiseDensity((0.0, 0.5, 1.0), (1.0, 0.5))  # does not integrate to 1


def test_unit_bump_plateau_and_support():
    x = np.array([[0.25], [0.5], [0.75]])
    assert np.allclose(unit_bump(x), 1.0)
    assert unit_bump(np.array([[0.0]]))[0] == 0.0
    assert unit_bump(np.array([[1.0]]))[0] == 0.0
    assert 0.0 < unit_bump(np.array([[0.1]]))[0] < 1.0
