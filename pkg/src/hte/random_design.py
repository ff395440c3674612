"""Two-stage selected-matching estimator for random covariate designs.

Per query: collect the m1 nearest control covariates, compute each one's
nearest-treatment matching distance, keep only the m2 best-matched pairs,
and average their outcome differences. Discarding poorly matched pairs is
what separates this estimator from plain full matching, and the closed-form
parameter rule below trades the two bias terms against the noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import _backend
from .core import ConfigError, EstimationError, ObservationSet, point_array, points_matrix


@dataclass(frozen=True)
class RandomConfig:
    """Neighbor counts for the two matching stages.

    `kappa` is the density-ratio bound the tuning was derived for; the
    estimator itself never reads it, but configurations violating
    m1 >= kappa * m2 are rejected because the variance control rests on it.
    """

    m1: int
    m2: int
    kappa: float = 1.0

    def __post_init__(self):
        if self.m1 < 1 or self.m2 < 1:
            raise ConfigError("neighbor counts must be positive")
        if self.m2 > self.m1:
            raise ConfigError("m2 must not exceed m1")
        if self.kappa < 1.0:
            raise ConfigError("kappa must be >= 1")
        if self.m1 + 1e-9 < self.kappa * self.m2:
            raise ConfigError("need m1 >= kappa * m2")


@dataclass(frozen=True)
class RegimeSelection:
    """Closed-form (m1, m2) choice plus the noise regime it came from."""

    m1: int
    m2: int
    regime: str
    sigma1: float
    sigma2: float


@dataclass(frozen=True)
class MatchingDiagnostics:
    """Per-query matching geometry: the m2-th smallest stage-2 matching
    distance (d1), the query's m1-th nearest-control distance (d2), and the
    kept/matched index sets."""

    d1: float
    d2: float
    kept_indices: np.ndarray
    matched_indices: np.ndarray


def noise_thresholds(
    n: int, d: int, beta_mu: float, beta_tau: float, kappa: float
) -> Tuple[float, float]:
    """Boundaries (sigma1, sigma2) between the three noise regimes."""
    inv = 1.0 / beta_mu + 1.0 / beta_tau
    sigma1 = (kappa / n**2) ** (1.0 / (d * inv))
    sigma2 = n ** ((beta_tau - beta_mu) / (2.0 * beta_tau) - beta_mu / d) / math.sqrt(kappa)
    return sigma1, sigma2


def _branch_values(
    n: int, d: int, beta_mu: float, beta_tau: float, kappa: float, sigma: float
) -> dict:
    """Raw real-valued (m1, m2) formulas per regime, before rounding."""
    bsum = beta_mu + beta_tau
    bprod = beta_mu * beta_tau
    dd = 2.0 * bprod + d * bsum
    return {
        "low_noise": (
            kappa ** (beta_mu / bsum) * n ** ((beta_tau - beta_mu) / bsum),
            1.0,
        ),
        "intermediate": (
            n * (kappa * sigma**2 / n**2) ** (d * beta_mu / dd),
            (n**2 / kappa) ** (2.0 * bprod / dd) * sigma ** (2.0 * d * bsum / dd),
        ),
        "high_noise": (
            n ** (2.0 * beta_tau / (2.0 * beta_tau + d))
            * (sigma**2 * kappa) ** (d / (2.0 * beta_tau + d)),
            (n / kappa) ** (2.0 * beta_tau / (2.0 * beta_tau + d))
            * sigma ** (2.0 * d / (2.0 * beta_tau + d)),
        ),
    }


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def select_parameters(
    n: int,
    d: int,
    beta_mu: float,
    beta_tau: float,
    kappa: float,
    sigma: float,
    m1_const: float = 1.0,
    m2_const: float = 1.0,
) -> RegimeSelection:
    """Regime-dependent neighbor counts for the two-stage estimator.

    Evaluates the three-branch closed form with unit constants (the
    `*_const` multipliers expose the free constants), rounds half up, then
    clamps: m2 at least max(1, ceil(log n)) so the selection stage
    concentrates, m1 at least ceil(kappa * m2), and m1 at most n. When the
    cap m1 <= n bites, m2 is lowered to keep m1 >= kappa * m2 feasible.
    """
    if not (0.0 < beta_mu <= beta_tau):
        raise ConfigError("need 0 < beta_mu <= beta_tau")
    if beta_tau > 1.0:
        raise ConfigError("selection rule only covers beta_tau <= 1")
    if kappa < 1.0:
        raise ConfigError("kappa must be >= 1")
    if kappa > n:
        raise ConfigError("kappa must not exceed n")
    if sigma < 0.0:
        raise ConfigError("sigma must be nonnegative")
    sigma1, sigma2 = noise_thresholds(n, d, beta_mu, beta_tau, kappa)
    if sigma <= sigma1:
        regime = "low_noise"
    elif sigma <= sigma2:
        regime = "intermediate"
    else:
        regime = "high_noise"
    raw_m1, raw_m2 = _branch_values(n, d, beta_mu, beta_tau, kappa, sigma)[regime]
    m2 = _round_half_up(m2_const * raw_m2)
    m2 = max(m2, 1, math.ceil(math.log(n))) if n > 1 else max(m2, 1)
    m1 = _round_half_up(m1_const * raw_m1)
    m1 = max(m1, math.ceil(kappa * m2))
    if m1 > n:
        m1 = n
        m2 = min(m2, max(1, int(math.floor(m1 / kappa))))
    return RegimeSelection(m1=m1, m2=m2, regime=regime, sigma1=sigma1, sigma2=sigma2)


def _validate(data: ObservationSet, config: RandomConfig):
    if data.n_treatment == 0:
        raise EstimationError("empty treatment group")
    if config.m1 > data.n_control:
        raise EstimationError(
            f"m1={config.m1} exceeds control group size {data.n_control}"
        )


def match_distances(data: ObservationSet) -> Tuple[np.ndarray, np.ndarray]:
    """Squared nearest-treatment distance and matched index per control point."""
    if data.n_treatment == 0:
        raise EstimationError("empty treatment group")
    return _backend.match_nearest(data.control_x, data.treatment_x)


def _select_pairs(q_d2, match_d2, m1: int, m2: int):
    # Stage 1 by (distance to query, index); stage 2 by (matching distance,
    # index). Returns kept control indices in ascending order.
    stage1 = np.argsort(q_d2, kind="stable")[:m1]
    order2 = np.lexsort((stage1, match_d2[stage1]))
    return np.sort(stage1[order2[:m2]]), stage1


def estimate_random(data: ObservationSet, config: RandomConfig, queries) -> np.ndarray:
    """Selected-matching estimate at each query point.

    The average over kept pairs runs in ascending control-index order, so
    output is reproducible bit for bit across backends and runs.
    """
    _validate(data, config)
    q = points_matrix(queries)
    if q.shape[1] != data.dimension:
        raise ConfigError("query dimension does not match data")
    match_d2, match_j = match_distances(data)
    diffs = data.treatment_y[match_j] - data.control_y
    q_d2 = _backend.sqdist_matrix(q, data.control_x)
    out = np.empty(q.shape[0])
    for i in range(q.shape[0]):
        kept, _ = _select_pairs(q_d2[i], match_d2, config.m1, config.m2)
        out[i] = np.cumsum(diffs[kept])[-1] / config.m2
    return out


def matching_diagnostics(
    data: ObservationSet, config: RandomConfig, query
) -> MatchingDiagnostics:
    """Matching geometry used by the bias decomposition at one query."""
    _validate(data, config)
    qv = point_array(query)
    if qv.size != data.dimension:
        raise ConfigError("query dimension does not match data")
    match_d2, match_j = match_distances(data)
    q_d2 = _backend.sqdist_matrix(qv[None, :], data.control_x)[0]
    kept, stage1 = _select_pairs(q_d2, match_d2, config.m1, config.m2)
    return MatchingDiagnostics(
        d1=float(np.sqrt(match_d2[kept].max())),
        d2=float(np.sqrt(q_d2[stage1].max())),
        kept_indices=kept,
        matched_indices=match_j[kept].copy(),
    )
