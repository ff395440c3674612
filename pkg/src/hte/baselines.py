"""Comparison estimators: full matching and per-group differencing.

Full matching is the two-stage estimator with the selection stage disabled
(m2 = m1, nothing discarded). The differencing estimators fit each group's
baseline separately with k-NN averages or kernel smoothing and subtract,
which exposes them to the roughness of the baselines.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _backend
from .core import ConfigError, EstimationError, ObservationSet, points_matrix
from .kernels import make_kernel
from .random_design import RandomConfig, estimate_random

VARIANTS = ("full_matching", "knn_diff", "kernel_diff")


@dataclass(frozen=True)
class BaselineConfig:
    variant: str
    k: Optional[int] = None
    bandwidth: Optional[float] = None
    m1: Optional[int] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown baseline variant {self.variant!r}")
        if self.variant == "full_matching" and (self.m1 is None or self.m1 < 1):
            raise ConfigError("full_matching requires a positive m1")
        if self.variant == "knn_diff" and (self.k is None or self.k < 1):
            raise ConfigError("knn_diff requires a positive k")
        if self.variant == "kernel_diff" and (
            self.bandwidth is None or not (0.0 < self.bandwidth < 1.0)
        ):
            raise ConfigError("kernel_diff requires a bandwidth in (0, 1)")


def estimate_full_matching(data: ObservationSet, m1: int, queries) -> np.ndarray:
    """Matching without selection: every stage-1 pair is kept (m2 = m1)."""
    return estimate_random(data, RandomConfig(m1=m1, m2=m1, kappa=1.0), queries)


def _knn_regress(x: np.ndarray, y: np.ndarray, queries: np.ndarray, k: int) -> np.ndarray:
    if k > x.shape[0]:
        raise EstimationError(f"k={k} exceeds group size {x.shape[0]}")
    d2 = _backend.sqdist_matrix(queries, x)
    out = np.empty(queries.shape[0])
    for i in range(queries.shape[0]):
        sel = np.sort(np.argsort(d2[i], kind="stable")[:k])
        out[i] = float(np.mean(y[sel]))
    return out


def _kernel_regress(
    x: np.ndarray, y: np.ndarray, queries: np.ndarray, bandwidth: float
) -> np.ndarray:
    kern = make_kernel(0, x.shape[1])
    return _backend.nw_smooth(x, y, queries, bandwidth, np.asarray(kern.coeffs))


def estimate_differencing(
    data: ObservationSet, config: BaselineConfig, queries
) -> np.ndarray:
    """Difference of per-group regression fits, mu1_hat - mu0_hat.

    Both groups use the same smoothing parameter; empty kernel windows fall
    back to the nearest observation in the group being fitted.
    """
    q = points_matrix(queries)
    if q.shape[1] != data.dimension:
        raise ConfigError("query dimension does not match data")
    if data.n_control == 0 or data.n_treatment == 0:
        raise EstimationError("both groups must be non-empty")
    if config.variant == "knn_diff":
        mu1 = _knn_regress(data.treatment_x, data.treatment_y, q, config.k)
        mu0 = _knn_regress(data.control_x, data.control_y, q, config.k)
    elif config.variant == "kernel_diff":
        mu1 = _kernel_regress(data.treatment_x, data.treatment_y, q, config.bandwidth)
        mu0 = _kernel_regress(data.control_x, data.control_y, q, config.bandwidth)
    else:
        raise ConfigError(f"{config.variant!r} is not a differencing variant")
    return mu1 - mu0
