"""Grid-design HTE estimator: interpolation weights, pseudo-observations,
and Nadaraya-Watson smoothing of the pseudo-differences.

The control covariates sit on the regular grid {0, 1/m, ..., (m-1)/m}^d and
the treatment covariates on the same grid shifted by a vector with sup-norm
at most 1/(2m). Treatment outcomes are interpolated onto each control
covariate with moment-matched weights, and the smoother runs on the
resulting pseudo-differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from . import _backend
from .core import ConfigError, ObservationSet, points_matrix
from .kernels import make_kernel

_GRID_TOL = 1e-9


@dataclass(frozen=True)
class GridDesign:
    """Control grid {0, 1/m, ..., (m-1)/m}^d and its shifted treatment copy.

    Shifts are per-axis, nonnegative, and at most half a grid cell, so the
    treatment grid stays inside the unit cube.
    """

    m: int
    shift: Tuple[float, ...]

    def __init__(self, m: int, shift):
        if isinstance(shift, (int, float)):
            shift = (float(shift),)
        shift = tuple(float(s) for s in shift)
        if m < 1:
            raise ConfigError("grid must have at least one point per axis")
        if not shift:
            raise ConfigError("shift must have at least one coordinate")
        for s in shift:
            if not (0.0 <= s <= 0.5 / m + 1e-15):
                raise ConfigError(
                    f"shift {s} outside [0, 1/(2m)] = [0, {0.5 / m}]"
                )
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "shift", shift)

    @property
    def dimension(self) -> int:
        return len(self.shift)

    @property
    def n(self) -> int:
        return self.m**self.dimension

    def axis_coords(self, axis: int) -> np.ndarray:
        """Treatment grid coordinates along one axis."""
        return self.shift[axis] + np.arange(self.m) / self.m

    def control_points(self) -> np.ndarray:
        return self._lattice(np.zeros(self.dimension))

    def treatment_points(self) -> np.ndarray:
        return self._lattice(np.asarray(self.shift))

    def _lattice(self, offset: np.ndarray) -> np.ndarray:
        axes = [offset[j] + np.arange(self.m) / self.m for j in range(self.dimension)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=1)


@dataclass(frozen=True)
class FixedConfig:
    """Tuning for the grid-design estimator.

    `beta_mu` sets the interpolation stencil size t = floor(beta_mu) + 1,
    `beta_tau` the kernel order floor(beta_tau), and `bandwidth` the
    smoothing scale in (0, 1).
    """

    beta_mu: float
    beta_tau: float
    bandwidth: float

    def __post_init__(self):
        if not (0.0 < self.beta_mu <= self.beta_tau):
            raise ConfigError("need 0 < beta_mu <= beta_tau")
        if not (0.0 < self.bandwidth < 1.0):
            raise ConfigError("bandwidth must lie in (0, 1)")

    @property
    def t(self) -> int:
        return int(math.floor(self.beta_mu)) + 1


def default_bandwidth(n: int, d: int, beta_tau: float) -> float:
    """Rate-balanced smoothing bandwidth n^{-1/(2 beta_tau + d)}.

    The unit constant is deliberate; the benchmark harness exposes a
    multiplier. Degenerate sample sizes where the raw value reaches 1 are
    clamped to 0.5 so the bandwidth stays in (0, 1).
    """
    if n < 1:
        raise ConfigError("n must be positive")
    raw = float(n) ** (-1.0 / (2.0 * beta_tau + d))
    return raw if raw < 1.0 else 0.5


def interpolation_weights(x_coord: float, grid_coords) -> np.ndarray:
    """Weights w solving the t moment equations
    sum_i w_i (g_i - x)^l = 1(l = 0) for l = 0, ..., t-1.

    This is a t x t Vandermonde system in the offsets g_i - x; the offsets
    are rescaled to O(1) before solving, which leaves the (scale-invariant)
    solution unchanged but keeps the system well conditioned.
    """
    g = np.asarray(grid_coords, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ConfigError("grid_coords must be a non-empty 1-d sequence")
    if np.unique(g).size != g.size:
        raise ConfigError("duplicate grid coordinates make the system singular")
    t = g.size
    z = g - float(x_coord)
    scale = np.abs(z).max()
    if scale == 0.0:
        return np.ones(1)
    zs = z / scale
    vand = np.vander(zs, N=t, increasing=True).T
    rhs = np.zeros(t)
    rhs[0] = 1.0
    return np.linalg.solve(vand, rhs)


def weight_bounds_check(weights, m: int, delta: float, t: int) -> bool:
    """Check the explicit envelope on nearest-first interpolation weights:
    |w_0| <= 1 + t (t+1)^(t-1) and |w_j| <= (t+1)^(t-1) * m * delta for
    j >= 1. Holds for any stencil of the t nearest shifted-grid points."""
    w = np.asarray(weights, dtype=float)
    if w.size != t:
        raise ConfigError("weight count does not match t")
    growth = float((t + 1) ** (t - 1))
    slack = 1e-9
    if abs(w[0]) > 1.0 + t * growth + slack:
        return False
    if t > 1 and np.abs(w[1:]).max() > growth * m * delta + slack:
        return False
    return True


@lru_cache(maxsize=4096)
def _axis_stencil(x: float, delta: float, m: int, t: int):
    # t nearest treatment-grid coordinates along one axis, nearest first,
    # distance ties broken by ascending grid index.
    if t > m:
        raise ConfigError(f"stencil size t={t} exceeds grid size m={m}")
    i0 = int(np.clip(round((x - delta) * m), 0, m - 1))
    lo, hi = max(0, i0 - t), min(m - 1, i0 + t)
    cand = np.arange(lo, hi + 1)
    coords = delta + cand / m
    dist = np.abs(coords - x)
    order = np.argsort(dist, kind="stable")[:t]
    sel = cand[order]
    sel_coords = coords[order]
    if dist[order[0]] == 0.0:
        w = np.zeros(t)
        w[0] = 1.0
    else:
        w = interpolation_weights(x, sel_coords)
    w.flags.writeable = False
    sel.flags.writeable = False
    return sel, w


def weight_bound_sweep(
    n_draws: int = 1000, seed: int = 0, t_max: int = 4, m_max: int = 100
) -> dict:
    """Randomized audit of the interpolation weights.

    Draws random (t, m, shift, grid point) combinations, rebuilds the
    nearest-first stencil and its weights, and records the worst moment
    residual plus whether the explicit weight envelope ever fails.
    """
    rng = np.random.default_rng(seed)
    worst_residual = 0.0
    bounds_ok = True
    for _ in range(n_draws):
        t = int(rng.integers(1, t_max + 1))
        m = int(rng.integers(max(t, 2), m_max + 1))
        delta = float(rng.uniform(0.0, 0.5 / m))
        x = int(rng.integers(0, m)) / m
        sel, w = _axis_stencil(x, delta, m, t)
        coords = delta + sel / m
        for ell in range(t):
            target = 1.0 if ell == 0 else 0.0
            worst_residual = max(worst_residual, abs(np.sum(w * (coords - x) ** ell) - target))
        bounds_ok = bounds_ok and weight_bounds_check(w, m, delta, t)
    return {"worst_moment_residual": worst_residual, "bounds_ok": bounds_ok, "draws": n_draws}


def _validate_grid_match(data: ObservationSet, design: GridDesign):
    if data.dimension != design.dimension:
        raise ConfigError("data dimension does not match design")
    if data.n_control != design.n or data.n_treatment != design.n:
        raise ConfigError(
            f"grid design expects {design.n} points per group, got "
            f"{data.n_control} control / {data.n_treatment} treatment"
        )
    m = design.m
    shift = np.asarray(design.shift)
    for x, offset, label in (
        (data.control_x, 0.0, "control"),
        (data.treatment_x, shift, "treatment"),
    ):
        k = np.rint((x - offset) * m).astype(np.int64)
        if k.min() < 0 or k.max() > m - 1:
            raise ConfigError(f"{label} covariates do not sit on the design grid")
        if np.abs((x - offset) * m - k).max() > _GRID_TOL * m:
            raise ConfigError(f"{label} covariates do not sit on the design grid")
        flat = np.ravel_multi_index(k.T, (m,) * design.dimension)
        if np.unique(flat).size != flat.size:
            raise ConfigError(f"duplicate {label} grid points")


def _treatment_on_grid(data: ObservationSet, design: GridDesign) -> np.ndarray:
    m = design.m
    shift = np.asarray(design.shift)
    k = np.rint((data.treatment_x - shift) * m).astype(np.int64)
    grid = np.empty((m,) * design.dimension)
    grid[tuple(k.T)] = data.treatment_y
    return grid


def pseudo_observations(
    data: ObservationSet, design: GridDesign, config: FixedConfig
) -> np.ndarray:
    """Interpolated treatment outcome at each control covariate.

    Along every axis the t nearest treatment grid coordinates are selected
    and moment-matched weights computed; the multi-dimensional weight of a
    stencil point is the product of its per-axis weights. Returns one value
    per control covariate, in data order.
    """
    _validate_grid_match(data, design)
    d = design.dimension
    y1 = _treatment_on_grid(data, design)
    out = np.empty(data.n_control)
    for i in range(data.n_control):
        block = y1
        for axis in range(d):
            x = float(data.control_x[i, axis])
            sel, w = _axis_stencil(x, design.shift[axis], design.m, config.t)
            block = np.tensordot(w, np.take(block, sel, axis=0), axes=(0, 0))
        out[i] = block
    return out


def estimate_fixed(
    data: ObservationSet, design: GridDesign, config: FixedConfig, queries
) -> np.ndarray:
    """Smoothed treatment-effect estimate at each query point.

    Nadaraya-Watson smoothing of the pseudo-differences with a kernel of
    order floor(beta_tau); queries whose kernel window is empty fall back to
    the pseudo-difference at the nearest control covariate.
    """
    q = points_matrix(queries)
    if q.shape[1] != data.dimension:
        raise ConfigError("query dimension does not match data")
    pseudo = pseudo_observations(data, design, config)
    diffs = pseudo - data.control_y
    kern = make_kernel(int(math.floor(config.beta_tau)), data.dimension)
    return _backend.nw_smooth(
        data.control_x, diffs, q, config.bandwidth, np.asarray(kern.coeffs)
    )
