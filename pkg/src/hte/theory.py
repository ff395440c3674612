"""Reference oracles for the theoretical error rates and a numeric check of
the minimal-function integral inequality.

The rate formulas use unit constants; slope-based tests compare empirical
errors against the exponents only, never the constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import ConfigError
from .synth import PiecewiseDensity, two_level_density

#: Dimension constant for the minimal-function inequality, calibrated as the
#: smallest power of two under which the bound holds across the built-in
#: density family for noise scales spanning three decades (d = 1).
DENSITY_BOUND_CONSTANT = 1.0

_CALIBRATION_LAMBDAS = (1.0, 10.0, 100.0, 1000.0)


@dataclass(frozen=True)
class RateInput:
    """Parameters entering the error-rate formulas. `delta_inf` is the grid
    shift sup-norm (fixed design); `kappa` the density-ratio bound (random
    design)."""

    n: int
    d: int
    beta_mu: float
    beta_tau: float
    sigma: float
    kappa: Optional[float] = None
    delta_inf: Optional[float] = None

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ConfigError("n and d must be positive")
        if not (0.0 < self.beta_mu <= self.beta_tau):
            raise ConfigError("need 0 < beta_mu <= beta_tau")
        if self.sigma < 0.0:
            raise ConfigError("sigma must be nonnegative")


def fixed_rate(inp: RateInput) -> float:
    """Matching-bias plus estimation-noise rate for the grid design:
    n^(-beta_mu/d) (n^(1/d) |shift|)^(beta_mu ^ 1) + (sigma^2/n)^(beta_tau/(2 beta_tau + d))."""
    if inp.delta_inf is None or inp.delta_inf < 0.0:
        raise ConfigError("fixed_rate needs a nonnegative delta_inf")
    wedge = min(inp.beta_mu, 1.0)
    bias = inp.n ** (-inp.beta_mu / inp.d) * (inp.n ** (1.0 / inp.d) * inp.delta_inf) ** wedge
    noise = (inp.sigma**2 / inp.n) ** (inp.beta_tau / (2.0 * inp.beta_tau + inp.d))
    return float(bias + noise)


REGIME_LABELS = ("matching_bias", "intermediate", "estimation_noise")


@dataclass(frozen=True)
class RandomRate:
    total: float
    terms: Tuple[float, float, float]
    dominant: str


def random_rate(inp: RateInput) -> RandomRate:
    """Three-regime rate for the random design; reports each term, their
    sum, and which one dominates."""
    if inp.kappa is None or inp.kappa < 1.0:
        raise ConfigError("random_rate needs kappa >= 1")
    if inp.beta_tau > 1.0:
        raise ConfigError("random-design rate only covers beta_tau <= 1")
    if inp.kappa > inp.n:
        raise ConfigError("kappa must not exceed n")
    inv = 1.0 / inp.beta_mu + 1.0 / inp.beta_tau
    t1 = (inp.kappa / inp.n**2) ** (1.0 / (inp.d * inv))
    t2 = (inp.kappa * inp.sigma**2 / inp.n**2) ** (1.0 / (2.0 + inp.d * inv))
    t3 = (inp.kappa * inp.sigma**2 / inp.n) ** (inp.beta_tau / (2.0 * inp.beta_tau + inp.d))
    terms = (float(t1), float(t2), float(t3))
    dominant = REGIME_LABELS[int(np.argmax(terms))]
    return RandomRate(total=float(sum(terms)), terms=terms, dominant=dominant)


# ---------------------------------------------------------------------------
# Minimal function and its integral inequality

DensityLike = Union[PiecewiseDensity, Callable[[np.ndarray], np.ndarray]]


def default_radius_grid(d: int = 1, size: int = 1000) -> np.ndarray:
    """Log-spaced radii spanning (0, sqrt(d)]."""
    return np.geomspace(1e-4, math.sqrt(d), size)


def _cdf_function(density: DensityLike) -> Callable[[np.ndarray], np.ndarray]:
    if hasattr(density, "cdf"):
        return lambda x: np.asarray(density.cdf(np.clip(x, 0.0, 1.0)), dtype=float)
    grid = np.linspace(0.0, 1.0, 200001)
    pdf = np.asarray(density(grid), dtype=float)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid))])
    return lambda x: np.interp(np.clip(x, 0.0, 1.0), grid, cum)


def _minimal_values(cdf, xs: np.ndarray, r_grid: np.ndarray) -> np.ndarray:
    mass = cdf(xs[:, None] + r_grid[None, :]) - cdf(xs[:, None] - r_grid[None, :])
    return (mass / (2.0 * r_grid[None, :])).min(axis=1)


def minimal_function(density: DensityLike, x: float, r_grid=None) -> float:
    """Smallest window-averaged mass around x over the radius grid:
    min_r (integral of the density over [x-r, x+r], zero outside [0,1]) / (2r).

    Grid minimization approaches the true infimum from above and is
    monotone under grid refinement.
    """
    r = np.asarray(r_grid, dtype=float) if r_grid is not None else default_radius_grid()
    if r.ndim != 1 or r.size == 0 or r.min() <= 0.0:
        raise ConfigError("radius grid must be positive and non-empty")
    cdf = _cdf_function(density)
    return float(_minimal_values(cdf, np.asarray([float(x)]), r)[0])


@dataclass(frozen=True)
class MinimalInequalityCheck:
    lhs: float
    bound: float
    holds: bool


def verify_minimal_inequality(
    density: DensityLike,
    lam: float,
    c_d: float = DENSITY_BOUND_CONSTANT,
    x_nodes: int = 4001,
    r_grid=None,
) -> MinimalInequalityCheck:
    """Quadrature check of
    integral f(x) exp(-lam * m[f](x)) dx <= exp(-lam/(e c)) or c/lam,
    the bound switching branches at lam = e c.

    Piecewise-constant densities are integrated piece by piece so their
    jumps introduce no quadrature bias.
    """
    if lam <= 0.0:
        raise ConfigError("lam must be positive")
    r = np.asarray(r_grid, dtype=float) if r_grid is not None else default_radius_grid()
    cdf = _cdf_function(density)
    if isinstance(density, PiecewiseDensity):
        lhs = 0.0
        for lo, hi, value in zip(density.breaks, density.breaks[1:], density.values):
            nodes = max(16, int(round(x_nodes * (hi - lo))))
            xs = np.linspace(lo, hi, nodes)
            m = _minimal_values(cdf, xs, r)
            lhs += value * float(np.trapezoid(np.exp(-lam * m), xs))
    else:
        xs = np.linspace(0.0, 1.0, x_nodes)
        m = _minimal_values(cdf, xs, r)
        f = np.asarray(density(xs), dtype=float)
        lhs = float(np.trapezoid(f * np.exp(-lam * m), xs))
    if lam < math.e * c_d:
        bound = math.exp(-lam / (math.e * c_d))
    else:
        bound = c_d / lam
    return MinimalInequalityCheck(lhs=lhs, bound=bound, holds=lhs <= bound + 1e-12)


def spike_floor_density(spike_mass: float, width: float) -> PiecewiseDensity:
    """Uniform floor carrying mass (1 - spike_mass) plus a centered narrow
    spike carrying the rest."""
    if not (0.0 < spike_mass < 1.0) or not (0.0 < width < 1.0):
        raise ConfigError("need spike_mass and width in (0, 1)")
    lo, hi = 0.5 - width / 2.0, 0.5 + width / 2.0
    floor = 1.0 - spike_mass
    return PiecewiseDensity((0.0, lo, hi, 1.0), (floor, floor + spike_mass / width, floor))


def builtin_density_family() -> List[Tuple[str, PiecewiseDensity]]:
    """Densities used to calibrate and test the minimal-function bound."""
    family: List[Tuple[str, PiecewiseDensity]] = [
        ("uniform", PiecewiseDensity((0.0, 1.0), (1.0,)))
    ]
    for kappa in (2.0, 4.0, 10.0):
        family.append((f"two_level_{int(kappa)}", two_level_density(kappa)[0]))
    for eps, width in ((0.1, 0.01), (0.5, 0.003), (0.9, 0.001)):
        family.append((f"spike_{eps}", spike_floor_density(eps, width)))
    return family


def calibrate_density_bound_constant(
    lambdas: Sequence[float] = _CALIBRATION_LAMBDAS,
) -> float:
    """Smallest power of two c making `verify_minimal_inequality` hold for
    every built-in density at every lambda."""
    for exponent in range(-3, 9):
        c = 2.0**exponent
        ok = all(
            verify_minimal_inequality(density, lam, c_d=c).holds
            for _, density in builtin_density_family()
            for lam in lambdas
        )
        if ok:
            return c
    raise ConfigError("no power-of-two constant up to 256 satisfies the bound")
