"""Synthetic scenario generation.

A scenario bundles a covariate design (regular grids with a shift, or
i.i.d. draws from piecewise-constant densities with a bounded ratio), the
baseline and treatment-effect functions, a noise level, and a seed. The
built-in benchmark scenario uses a volatile three-spike Gaussian-mixture
baseline against a smooth bell-shaped effect, with group densities that tilt
mass to opposite halves of the cube so the density ratio equals kappa
exactly.

Function handles are named registry entries with JSON-serializable
parameters, so scenarios round-trip through config files; bare callables are
accepted in memory but refuse to serialize.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Tuple, Union

import numpy as np

from .core import ConfigError, HolderSpec, ObservationSet, RngSeed, as_seed
from .fixed_design import GridDesign
from .holder import HolderExtension, ValueSpec

STREAM_CONTROL_X = 0
STREAM_TREATMENT_X = 1
STREAM_CONTROL_NOISE = 2
STREAM_TREATMENT_NOISE = 3

_RATIO_TOL = 1e-9


@dataclass(frozen=True)
class PiecewiseDensity:
    """Piecewise-constant density for the first coordinate on [0, 1].

    Pieces are right-closed, matching the convention that the high-density
    region is the closed left half. The remaining coordinates are uniform.
    """

    breaks: Tuple[float, ...]
    values: Tuple[float, ...]

    def __init__(self, breaks, values):
        breaks = tuple(float(b) for b in breaks)
        values = tuple(float(v) for v in values)
        if len(breaks) != len(values) + 1 or len(values) == 0:
            raise ConfigError("need len(breaks) == len(values) + 1 >= 2")
        if breaks[0] != 0.0 or breaks[-1] != 1.0:
            raise ConfigError("breaks must span [0, 1]")
        if any(b2 <= b1 for b1, b2 in zip(breaks, breaks[1:])):
            raise ConfigError("breaks must be strictly increasing")
        if any(v <= 0.0 for v in values):
            raise ConfigError("piece values must be positive")
        total = sum(v * (b2 - b1) for v, b1, b2 in zip(values, breaks, breaks[1:]))
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"density integrates to {total}, not 1")
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "values", values)

    def _piece(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.breaks, x, side="left") - 1
        return np.clip(idx, 0, len(self.values) - 1)

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        vals = np.asarray(self.values)[self._piece(x)]
        return np.where((x < 0.0) | (x > 1.0), 0.0, vals)

    def cdf(self, x) -> np.ndarray:
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        breaks = np.asarray(self.breaks)
        vals = np.asarray(self.values)
        cum = np.concatenate([[0.0], np.cumsum(vals * np.diff(breaks))])
        idx = self._piece(x)
        return cum[idx] + vals[idx] * (x - breaks[idx])

    def ppf(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        breaks = np.asarray(self.breaks)
        vals = np.asarray(self.values)
        cum = np.concatenate([[0.0], np.cumsum(vals * np.diff(breaks))])
        cum[-1] = 1.0
        idx = np.clip(np.searchsorted(cum, u, side="left") - 1, 0, len(vals) - 1)
        return breaks[idx] + (u - cum[idx]) / vals[idx]

    def ratio_bound(self, other: "PiecewiseDensity") -> float:
        """Exact sup over [0, 1] of max(self/other, other/self)."""
        merged = sorted(set(self.breaks) | set(other.breaks))
        worst = 1.0
        for lo, hi in zip(merged, merged[1:]):
            mid = np.asarray([(lo + hi) / 2.0])
            r = float(self.pdf(mid)[0] / other.pdf(mid)[0])
            worst = max(worst, r, 1.0 / r)
        return worst


def two_level_density(kappa: float) -> Tuple[PiecewiseDensity, PiecewiseDensity]:
    """Complementary density pair with exact ratio bound kappa: the control
    density is 2 kappa / (kappa + 1) on [0, 1/2] and the treatment density
    mirrors it, so g0 + g1 = 2."""
    if kappa < 1.0:
        raise ConfigError("kappa must be >= 1")
    hi = 2.0 * kappa / (kappa + 1.0)
    lo = 2.0 / (kappa + 1.0)
    g0 = PiecewiseDensity((0.0, 0.5, 1.0), (hi, lo))
    g1 = PiecewiseDensity((0.0, 0.5, 1.0), (lo, hi))
    return g0, g1


@dataclass(frozen=True)
class RandomDesign:
    """Independent draws from a pair of ratio-bounded densities."""

    g0: PiecewiseDensity
    g1: PiecewiseDensity


# ---------------------------------------------------------------------------
# Function registry


@dataclass
class FunctionSpec:
    """Named, parameterized function handle resolvable from JSON configs."""

    name: str
    params: Dict = field(default_factory=dict)

    def build(self) -> Callable[[np.ndarray], np.ndarray]:
        if self.name not in _REGISTRY:
            raise ConfigError(f"unknown function {self.name!r}")
        return _REGISTRY[self.name](**self.params)


FunctionLike = Union[FunctionSpec, Callable]

_REGISTRY: Dict[str, Callable] = {}


def register_function(name: str):
    def deco(factory):
        _REGISTRY[name] = factory
        return factory

    return deco


def build_function(f: FunctionLike) -> Callable[[np.ndarray], np.ndarray]:
    """Resolve a FunctionSpec (or pass a bare callable through)."""
    if isinstance(f, FunctionSpec):
        return f.build()
    if callable(f):
        return f
    raise ConfigError("expected a FunctionSpec or callable")


def _vectorized(fn):
    def wrapped(x):
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 1:
            return float(fn(arr[None, :])[0])
        return fn(arr)

    return wrapped


def _smoothstep(s: np.ndarray) -> np.ndarray:
    # C-infinity ramp: 0 for s <= 0, 1 for s >= 1.
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(s > 0.0, np.exp(-1.0 / np.maximum(s, 1e-300)), 0.0)
        b = np.where(s < 1.0, np.exp(-1.0 / np.maximum(1.0 - s, 1e-300)), 0.0)
    return a / (a + b)


def unit_bump(x: np.ndarray) -> np.ndarray:
    """Smooth plateau bump: 1 on [1/4, 3/4]^d, 0 outside (0, 1)^d."""
    arr = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.ones(arr.shape[0])
    for j in range(arr.shape[1]):
        out *= _smoothstep(4.0 * arr[:, j]) * _smoothstep(4.0 * (1.0 - arr[:, j]))
    return out


def reduced_coordinate(x: np.ndarray) -> np.ndarray:
    """Map a d-dimensional point to the scalar sqrt(d) (xbar - 1/2) + 1/2,
    with xbar the coordinate mean; identity in one dimension."""
    arr = np.atleast_2d(np.asarray(x, dtype=float))
    d = arr.shape[1]
    return math.sqrt(d) * (arr.mean(axis=1) - 0.5) + 0.5


def _normal_pdf(z: np.ndarray, mean: float, sd: float) -> np.ndarray:
    return np.exp(-0.5 * ((z - mean) / sd) ** 2) / (sd * math.sqrt(2.0 * math.pi))


REFERENCE_MIXTURE = ((2.0, 0.1, 0.15), (2.5, 0.4, 0.05), (4.0, 0.8, 0.1))


@register_function("zero")
def _zero_factory():
    return _vectorized(lambda x: np.zeros(x.shape[0]))


@register_function("constant")
def _constant_factory(value: float):
    return _vectorized(lambda x: np.full(x.shape[0], float(value)))


@register_function("gaussian_mixture")
def _gaussian_mixture_factory(weights, means, sds):
    weights = tuple(float(w) for w in weights)
    means = tuple(float(m) for m in means)
    sds = tuple(float(s) for s in sds)
    if not (len(weights) == len(means) == len(sds)):
        raise ConfigError("mixture parameter lengths differ")

    def fn(x):
        z = reduced_coordinate(x)
        out = np.zeros(z.shape[0])
        for w, m, s in zip(weights, means, sds):
            out += w * _normal_pdf(z, m, s)
        return out

    return _vectorized(fn)


@register_function("reference_mu0")
def _reference_mu0_factory():
    weights, means, sds = zip(*REFERENCE_MIXTURE)
    return _gaussian_mixture_factory(weights, means, sds)


@register_function("reference_tau")
def _reference_tau_factory():
    return _vectorized(lambda x: _normal_pdf(2.0 * reduced_coordinate(x) - 1.0, 0.0, 1.0))


@register_function("bump")
def _bump_factory(scale: float = 1.0):
    return _vectorized(lambda x: float(scale) * unit_bump(x))


@register_function("grid_dilation")
def _grid_dilation_factory(m: int, axis: int, beta_mu: float, scale: float):
    # Cell-periodic profile vanishing on the grid, dilated to preserve the
    # requested smoothness; the bump ties it to zero at the cube boundary.
    m = int(m)
    wedge = min(float(beta_mu), 1.0)
    amp = float(scale) * float(m) ** (-float(beta_mu))

    def fn(x):
        u = m * x[:, int(axis)]
        frac = u - np.floor(u)
        # Snap to the cell boundary so the profile vanishes exactly on grid
        # points despite rounding in m * (k / m).
        frac = np.where(np.abs(u - np.rint(u)) <= 1e-9, 0.0, frac)
        return amp * (frac * (1.0 - frac)) ** wedge * unit_bump(x)

    return _vectorized(fn)


@register_function("holder_envelope")
def _holder_envelope_factory(points, values, beta: float, radius: float):
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    spec = ValueSpec(pts, np.asarray(values, dtype=float))
    ext = HolderExtension(spec, HolderSpec(pts.shape[1], float(beta), float(radius)))
    return _vectorized(lambda x: np.asarray(ext(x)))


# ---------------------------------------------------------------------------
# Scenarios


@dataclass
class ScenarioConfig:
    """Complete synthetic-experiment description."""

    design: Union[GridDesign, RandomDesign]
    mu0: FunctionLike
    tau: FunctionLike
    sigma: float
    n: int
    d: int
    kappa: float
    seed: RngSeed

    def __post_init__(self):
        self.seed = as_seed(self.seed)
        if self.sigma < 0.0:
            raise ConfigError("sigma must be nonnegative")
        if self.n < 1 or self.d < 1:
            raise ConfigError("n and d must be positive")
        if self.kappa < 1.0:
            raise ConfigError("kappa must be >= 1")
        if isinstance(self.design, GridDesign):
            if self.design.dimension != self.d or self.design.n != self.n:
                raise ConfigError("grid design does not match n, d")
        elif isinstance(self.design, RandomDesign):
            bound = self.design.g0.ratio_bound(self.design.g1)
            if bound > self.kappa + _RATIO_TOL:
                raise ConfigError(
                    f"density ratio {bound} exceeds declared kappa {self.kappa}"
                )
        else:
            raise ConfigError("design must be a GridDesign or RandomDesign")

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        if isinstance(self.design, GridDesign):
            design = {"type": "grid", "m": self.design.m, "shift": list(self.design.shift)}
        else:
            design = {
                "type": "random",
                "g0": {"breaks": list(self.design.g0.breaks), "values": list(self.design.g0.values)},
                "g1": {"breaks": list(self.design.g1.breaks), "values": list(self.design.g1.values)},
            }
        return {
            "design": design,
            "mu0": _function_to_dict(self.mu0),
            "tau": _function_to_dict(self.tau),
            "sigma": self.sigma,
            "n": self.n,
            "d": self.d,
            "kappa": self.kappa,
            "seed": self.seed.value,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioConfig":
        try:
            dd = doc["design"]
            if dd["type"] == "grid":
                design: Union[GridDesign, RandomDesign] = GridDesign(dd["m"], dd["shift"])
            elif dd["type"] == "random":
                design = RandomDesign(
                    PiecewiseDensity(dd["g0"]["breaks"], dd["g0"]["values"]),
                    PiecewiseDensity(dd["g1"]["breaks"], dd["g1"]["values"]),
                )
            else:
                raise ConfigError(f"unknown design type {dd['type']!r}")
            return cls(
                design=design,
                mu0=FunctionSpec(doc["mu0"]["name"], doc["mu0"].get("params", {})),
                tau=FunctionSpec(doc["tau"]["name"], doc["tau"].get("params", {})),
                sigma=float(doc["sigma"]),
                n=int(doc["n"]),
                d=int(doc["d"]),
                kappa=float(doc["kappa"]),
                seed=as_seed(doc["seed"]),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed scenario document: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid scenario JSON: {exc}") from exc
        return cls.from_dict(doc)

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:12]


def _function_to_dict(f: FunctionLike) -> dict:
    if isinstance(f, FunctionSpec):
        return {"name": f.name, "params": f.params}
    raise ConfigError("bare callables cannot be serialized; use a FunctionSpec")


def reference_scenario(n: int, d: int, kappa: float, seed, sigma: float = None) -> ScenarioConfig:
    """The built-in benchmark scenario: volatile mixture baseline, smooth
    bell effect, complementary two-level densities, noise 2/sqrt(n) unless
    overridden."""
    g0, g1 = two_level_density(kappa)
    return ScenarioConfig(
        design=RandomDesign(g0, g1),
        mu0=FunctionSpec("reference_mu0"),
        tau=FunctionSpec("reference_tau"),
        sigma=2.0 / math.sqrt(n) if sigma is None else float(sigma),
        n=n,
        d=d,
        kappa=float(kappa),
        seed=as_seed(seed),
    )


def _draw_covariates(density: PiecewiseDensity, n: int, d: int, rng) -> np.ndarray:
    u = rng.random((n, d))
    x = u.copy()
    x[:, 0] = density.ppf(u[:, 0])
    return x


def sample_scenario(config: ScenarioConfig, replication: int = 0) -> ObservationSet:
    """Draw one dataset from the scenario; deterministic given the seed and
    replication index (grid covariates are deterministic, only the noise and
    random-design draws consume randomness)."""
    mu0 = build_function(config.mu0)
    tau = build_function(config.tau)
    seed = config.seed
    if isinstance(config.design, GridDesign):
        x0 = config.design.control_points()
        x1 = config.design.treatment_points()
    else:
        x0 = _draw_covariates(
            config.design.g0, config.n, config.d, seed.generator(replication, STREAM_CONTROL_X)
        )
        x1 = _draw_covariates(
            config.design.g1, config.n, config.d, seed.generator(replication, STREAM_TREATMENT_X)
        )
    y0 = np.asarray(mu0(x0), dtype=float)
    y1 = np.asarray(mu0(x1), dtype=float) + np.asarray(tau(x1), dtype=float)
    if config.sigma > 0.0:
        y0 = y0 + config.sigma * seed.generator(replication, STREAM_CONTROL_NOISE).standard_normal(x0.shape[0])
        y1 = y1 + config.sigma * seed.generator(replication, STREAM_TREATMENT_NOISE).standard_normal(x1.shape[0])
    return ObservationSet(x0, y0, x1, y1)
