"""Worst-case instance generators.

Both constructions produce a nonzero (mu0, tau) pair whose outcomes vanish
at every observed covariate, so the data they generate is identical to the
all-zero scenario's data. Any estimator must then err by at least half the
effect's L1 norm against one of the two truths, which exhibits the matching
bias floor empirically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .core import ConfigError, HolderSpec, ObservationSet
from .fixed_design import GridDesign
from .holder import ValueSpec, is_holder_feasible
from .synth import FunctionSpec, build_function

HOLDER_MARGIN = 0.9
_CALIBRATION_SEED = 74639
_QUAD_NODES = {1: 1000, 2: 100}


@dataclass(frozen=True)
class Certificate:
    """Numeric evidence that an instance is feasible and nontrivial."""

    objective: float
    max_constraint_violation: float


@dataclass(frozen=True)
class AdversarialInstance:
    mu0: FunctionSpec
    tau: FunctionSpec
    certificate: Certificate
    beta_mu: float
    beta_tau: float
    radius: float


def _quadrature_l1(fn, d: int) -> float:
    nodes = _QUAD_NODES.get(d, max(8, int(round(1000 ** (1.0 / d)))))
    axes = [np.linspace(0.0, 1.0, nodes)] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    vals = np.abs(np.asarray(fn(pts), dtype=float)).reshape((nodes,) * d)
    for axis in reversed(range(d)):
        vals = np.trapezoid(vals, axes[axis], axis=-1)
    return float(vals)


def _sampled_holder_ratio(fn, d: int, beta: float, rng, n_pairs: int = 4000) -> float:
    """Largest sampled quotient |f(x) - f(y)| / ||x - y||^beta.

    Half the pairs are drawn at log-spaced separations so short-range
    roughness (where dilated constructions peak) is probed as well as
    long-range behavior.
    """
    x = rng.random((n_pairs, d))
    step = rng.standard_normal((n_pairs, d))
    step /= np.linalg.norm(step, axis=1, keepdims=True)
    scale = 10.0 ** rng.uniform(-5.0, 0.0, size=(n_pairs, 1))
    y_near = np.clip(x + scale * step, 0.0, 1.0)
    y_far = rng.random((n_pairs, d))
    ratios = []
    for y in (y_near, y_far):
        dist = np.linalg.norm(x - y, axis=1)
        keep = dist > 0.0
        dv = np.abs(np.asarray(fn(x[keep])) - np.asarray(fn(y[keep])))
        ratios.append(float((dv / dist[keep] ** beta).max(initial=0.0)))
    return max(ratios)


def fixed_adversary(
    design: GridDesign, beta_mu: float, beta_tau: float, radius: float = 1.0
) -> AdversarialInstance:
    """Grid-aligned worst case: a cell-periodic dilation for the baseline and
    a matching constant-times-bump effect.

    The baseline vanishes on the control grid and equals the negated effect
    on the shifted treatment grid, so both groups observe identically zero
    outcomes while the effect's L1 norm scales like
    m^(-beta_mu) (m * shift)^(min(beta_mu, 1)).
    """
    if not (0.0 < beta_mu <= beta_tau):
        raise ConfigError("need 0 < beta_mu <= beta_tau")
    d = design.dimension
    axis = int(np.argmax(design.shift))
    delta = design.shift[axis]
    m = design.m
    wedge = min(beta_mu, 1.0)

    mu0_unit = build_function(
        FunctionSpec("grid_dilation", {"m": m, "axis": axis, "beta_mu": beta_mu, "scale": 1.0})
    )
    amp_unit = m ** (-beta_mu) * (m * delta * (1.0 - m * delta)) ** wedge
    tau_unit = build_function(FunctionSpec("bump", {"scale": -amp_unit}))

    rng = np.random.default_rng(_CALIBRATION_SEED)
    ratio = max(
        _sampled_holder_ratio(mu0_unit, d, beta_mu, rng),
        _sampled_holder_ratio(tau_unit, d, beta_tau, rng),
        1e-12,
    )
    c = HOLDER_MARGIN * radius / ratio

    mu0 = FunctionSpec(
        "grid_dilation", {"m": m, "axis": axis, "beta_mu": beta_mu, "scale": c}
    )
    tau = FunctionSpec("bump", {"scale": -c * amp_unit})
    fm, ft = build_function(mu0), build_function(tau)
    x0, x1 = design.control_points(), design.treatment_points()
    violation = max(
        float(np.abs(np.asarray(fm(x0))).max(initial=0.0)),
        float(np.abs(np.asarray(fm(x1)) + np.asarray(ft(x1))).max(initial=0.0)),
    )
    objective = _quadrature_l1(ft, d)
    return AdversarialInstance(
        mu0=mu0,
        tau=tau,
        certificate=Certificate(objective=objective, max_constraint_violation=violation),
        beta_mu=beta_mu,
        beta_tau=beta_tau,
        radius=radius,
    )


def _dedup_spec(points: np.ndarray, values: np.ndarray):
    # Exactly coincident covariates must carry one consistent value.
    seen = {}
    keep_pts, keep_vals = [], []
    for p, v in zip(points, values):
        key = p.tobytes()
        if key in seen:
            if abs(seen[key] - v) > 1e-12:
                raise ConfigError("conflicting values at a shared covariate")
            continue
        seen[key] = v
        keep_pts.append(p)
        keep_vals.append(v)
    return np.asarray(keep_pts), np.asarray(keep_vals)


def random_adversary(
    data: ObservationSet, beta_mu: float, beta_tau: float, radius: float = 1.0
) -> AdversarialInstance:
    """Worst case adapted to sampled covariates.

    The baseline is pinned to zero on the controls and, on each treatment
    covariate, to the smallest combined cost of hopping to a nearby
    treatment point and matching it to a control; the effect offsets it
    there. Both pinned value sets are certified pairwise-feasible and then
    extended to the cube by the envelope midpoint.
    """
    if not (0.0 < beta_mu <= beta_tau):
        raise ConfigError("need 0 < beta_mu <= beta_tau")
    if beta_tau > 1.0:
        raise ConfigError("envelope extension requires beta_tau <= 1")
    x0, x1 = data.control_x, data.treatment_x
    if x1.shape[0] == 0 or x0.shape[0] == 0:
        raise ConfigError("both groups must be non-empty")
    d = data.dimension

    tt = np.sqrt(_backend.sqdist_matrix(x1, x1))
    tc = np.sqrt(_backend.match_nearest(x1, x0)[0])
    v = (tt**beta_tau + (tc**beta_mu)[None, :]).min(axis=1)

    pair_d = tt[np.triu_indices(x1.shape[0], k=1)]
    pair_dv = np.abs(v[:, None] - v[None, :])[np.triu_indices(x1.shape[0], k=1)]
    cross_d = np.sqrt(_backend.sqdist_matrix(x1, x0))
    ratio = 1e-12
    if pair_d.size:
        ratio = max(ratio, float((pair_dv / pair_d**beta_tau).max(initial=0.0)))
        ratio = max(ratio, float((pair_dv / pair_d**beta_mu).max(initial=0.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        cross_ratio = np.where(cross_d > 0.0, v[:, None] / cross_d**beta_mu, 0.0)
    ratio = max(ratio, float(cross_ratio.max(initial=0.0)))
    c = HOLDER_MARGIN * radius / ratio
    values = c * v

    mu_pts, mu_vals = _dedup_spec(
        np.concatenate([x0, x1], axis=0),
        np.concatenate([np.zeros(x0.shape[0]), values]),
    )
    tau_pts, tau_vals = _dedup_spec(x1, -values)

    mu_spec = ValueSpec(mu_pts, mu_vals)
    tau_spec = ValueSpec(tau_pts, tau_vals)
    if not is_holder_feasible(mu_spec, HolderSpec(d, beta_mu, radius)):
        raise ConfigError("baseline value specification is infeasible")
    if not is_holder_feasible(tau_spec, HolderSpec(d, beta_tau, radius)):
        raise ConfigError("effect value specification is infeasible")

    mu0 = FunctionSpec(
        "holder_envelope",
        {
            "points": mu_pts.tolist(),
            "values": mu_vals.tolist(),
            "beta": beta_mu,
            "radius": radius,
        },
    )
    tau = FunctionSpec(
        "holder_envelope",
        {
            "points": tau_pts.tolist(),
            "values": tau_vals.tolist(),
            "beta": beta_tau,
            "radius": radius,
        },
    )
    fm, ft = build_function(mu0), build_function(tau)
    violation = max(
        float(np.abs(np.asarray(fm(x0))).max(initial=0.0)),
        float(np.abs(np.asarray(fm(x1)) + np.asarray(ft(x1))).max(initial=0.0)),
    )
    objective = _quadrature_l1(ft, d)
    return AdversarialInstance(
        mu0=mu0,
        tau=tau,
        certificate=Certificate(objective=objective, max_constraint_violation=violation),
        beta_mu=beta_mu,
        beta_tau=beta_tau,
        radius=radius,
    )


def indistinguishability_check(instance: AdversarialInstance, data: ObservationSet) -> float:
    """Largest absolute noiseless outcome the instance produces at the
    observed covariates. Near zero means the instance's data cannot be told
    apart from the all-zero scenario's."""
    fm = build_function(instance.mu0)
    ft = build_function(instance.tau)
    worst = 0.0
    if data.n_control:
        worst = max(worst, float(np.abs(np.asarray(fm(data.control_x))).max()))
    if data.n_treatment:
        worst = max(
            worst,
            float(
                np.abs(
                    np.asarray(fm(data.treatment_x)) + np.asarray(ft(data.treatment_x))
                ).max()
            ),
        )
    return worst
