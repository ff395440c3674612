import numpy as np
import pytest

from hte.adversarial import (
    _sampled_holder_ratio,
    fixed_adversary,
    indistinguishability_check,
    random_adversary,
)
from hte.core import ObservationSet
from hte.fixed_design import GridDesign
from hte.random_design import RandomConfig, estimate_random
from hte.synth import build_function


def zero_outcome_data(design):
    return ObservationSet(
        design.control_points(), np.zeros(design.n), design.treatment_points(), np.zeros(design.n)
    )


def uniform_data(n, seed, d=1):
    rng = np.random.default_rng(seed)
    return ObservationSet(
        rng.random((n, d)), np.zeros(n), rng.random((n, d)), np.zeros(n)
    )


def test_fixed_adversary_zero_shift_is_trivial():
    inst = fixed_adversary(GridDesign(10, (0.0,)), 0.5, 1.0)
    assert inst.certificate.objective == 0.0
    tau = build_function(inst.tau)
    assert np.allclose(tau(np.random.default_rng(0).random((20, 1))), 0.0)


def test_fixed_adversary_constraints_and_hiding():
    design = GridDesign(10, (0.05,))
    inst = fixed_adversary(design, 0.5, 1.0)
    mu0 = build_function(inst.mu0)
    assert np.abs(mu0(design.control_points())).max() <= 1e-12
    assert inst.certificate.max_constraint_violation <= 1e-12
    assert indistinguishability_check(inst, zero_outcome_data(design)) <= 1e-12


def test_fixed_adversary_objective_scaling():
    # |tau| integrates to amplitude * |bump|_1 with amplitude
    # c m^(-beta) (m delta (1 - m delta))^beta; verified by quadrature.
    design = GridDesign(10, (0.05,))
    beta = 0.5
    inst = fixed_adversary(design, beta, 1.0)
    c = inst.mu0.params["scale"]
    amp = c * 10 ** (-beta) * (0.5 * 0.5) ** beta
    bump_l1 = np.trapezoid(
        build_function(inst.tau)(np.linspace(0, 1, 2001)[:, None]) / (-amp), np.linspace(0, 1, 2001)
    )
    assert inst.certificate.objective == pytest.approx(amp * bump_l1, rel=1e-3)
    assert inst.certificate.objective >= 0.1 * c * 10 ** (-0.5) * 0.5**0.5


def test_fixed_adversary_holder_membership():
    design = GridDesign(25, (0.02,))
    inst = fixed_adversary(design, 0.5, 1.0)
    rng = np.random.default_rng(123)
    mu0 = build_function(inst.mu0)
    tau = build_function(inst.tau)
    assert _sampled_holder_ratio(mu0, 1, 0.5, rng, n_pairs=1000) <= 1.0 + 1e-6
    assert _sampled_holder_ratio(tau, 1, 1.0, rng, n_pairs=1000) <= 1.0 + 1e-6


def test_indistinguishability_of_zero_functions():
    from hte.adversarial import AdversarialInstance, Certificate
    from hte.synth import FunctionSpec

    inst = AdversarialInstance(
        mu0=FunctionSpec("zero"), tau=FunctionSpec("zero"),
        certificate=Certificate(0.0, 0.0), beta_mu=1.0, beta_tau=1.0, radius=1.0,
    )
    assert indistinguishability_check(inst, uniform_data(10, 0)) == 0.0


def test_random_adversary_identical_groups_gives_zero():
    rng = np.random.default_rng(3)
    x = rng.random((20, 1))
    data = ObservationSet(x, np.zeros(20), x, np.zeros(20))
    inst = random_adversary(data, 1.0, 1.0)
    assert inst.certificate.objective <= 1e-12
    assert inst.certificate.max_constraint_violation <= 1e-12


def test_random_adversary_value_spec_inequalities():
    # The pinned values must satisfy the pairwise conditions directly:
    # against controls with the rough exponent, among treatments with the
    # smooth one.
    for seed in range(5):
        data = uniform_data(60, seed)
        beta_mu, beta_tau = 0.7, 1.0
        inst = random_adversary(data, beta_mu, beta_tau)
        mu0 = build_function(inst.mu0)
        vals = mu0(data.treatment_x)
        x1, x0 = data.treatment_x, data.control_x
        cross = np.sqrt(((x1[:, None, :] - x0[None, :, :]) ** 2).sum(-1))
        assert np.all(vals[:, None] <= cross**beta_mu + 1e-9)
        tt = np.sqrt(((x1[:, None, :] - x1[None, :, :]) ** 2).sum(-1))
        dv = np.abs(vals[:, None] - vals[None, :])
        iu = np.triu_indices(60, k=1)
        assert np.all(dv[iu] <= tt[iu] ** beta_tau + 1e-9)


def test_random_adversary_certificates_and_hiding():
    data = uniform_data(80, 11)
    inst = random_adversary(data, 1.0, 1.0)
    assert inst.certificate.max_constraint_violation <= 1e-9
    assert indistinguishability_check(inst, data) <= 1e-9
    assert inst.certificate.objective > 0.0


def test_random_adversary_holder_membership_sampled():
    data = uniform_data(50, 21)
    inst = random_adversary(data, 0.8, 1.0)
    rng = np.random.default_rng(77)
    assert _sampled_holder_ratio(build_function(inst.mu0), 1, 0.8, rng, 1000) <= 1.0 + 1e-6
    assert _sampled_holder_ratio(build_function(inst.tau), 1, 1.0, rng, 1000) <= 1.0 + 1e-6


def test_error_floor_against_hidden_truth():
    # Data generated by the worst-case pair is identical to all-zero data,
    # so the estimate's errors against the two truths sum to at least the
    # effect's mass on the query grid.
    data = uniform_data(60, 31)
    inst = random_adversary(data, 1.0, 1.0)
    scenario_data = ObservationSet(
        data.control_x,
        build_function(inst.mu0)(data.control_x),
        data.treatment_x,
        build_function(inst.mu0)(data.treatment_x) + build_function(inst.tau)(data.treatment_x),
    )
    queries = np.linspace(0, 1, 512)[:, None]
    est = estimate_random(scenario_data, RandomConfig(m1=10, m2=4), queries)
    tau_vals = build_function(inst.tau)(queries)
    err_adv = np.mean(np.abs(est - tau_vals))
    err_zero = np.mean(np.abs(est))
    tau_mass = np.mean(np.abs(tau_vals))
    assert err_adv + err_zero >= tau_mass - 1e-12
    assert max(err_adv, err_zero) >= 0.5 * tau_mass
    assert err_adv >= 0.5 * tau_mass  # the estimate is pinned to the zero scenario


def test_random_adversary_rejects_bad_smoothness():
    data = uniform_data(10, 1)
    with pytest.raises(Exception):
        random_adversary(data, 1.0, 1.5)
