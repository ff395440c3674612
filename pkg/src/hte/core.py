"""Shared domain types, exact nearest-neighbor queries, and seeded randomness.

Everything downstream (estimators, scenario generators, the benchmark
harness) builds on the types defined here. All containers are immutable
after construction and all operations are pure functions, so values can be
shared freely across worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np


class ConfigError(ValueError):
    """Invalid configuration, data layout, or parameter combination."""


class EstimationError(RuntimeError):
    """An estimator could not be evaluated on the given data."""


@dataclass(frozen=True)
class Covariate:
    """A covariate vector constrained to the unit cube [0, 1]^d."""

    coords: Tuple[float, ...]

    def __init__(self, coords: Iterable[float]):
        coords = tuple(float(c) for c in coords)
        if not coords:
            raise ConfigError("covariate must have at least one coordinate")
        for c in coords:
            if not (0.0 <= c <= 1.0):
                raise ConfigError(f"coordinate {c} outside [0, 1]")
        object.__setattr__(self, "coords", coords)

    def __len__(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


@dataclass(frozen=True)
class HolderSpec:
    """A Holder ball: dimension, smoothness exponent, and radius.

    For beta <= 1 membership reduces to |f(x) - f(y)| <= radius * ||x - y||^beta.
    """

    dimension: int
    beta: float
    radius: float = 1.0

    def __post_init__(self):
        if self.dimension < 1:
            raise ConfigError("dimension must be a positive integer")
        if not (self.beta > 0.0):
            raise ConfigError("beta must be positive")
        if not (self.radius > 0.0):
            raise ConfigError("radius must be positive")


@dataclass(frozen=True)
class RngSeed:
    """64-bit seed from which every random draw in an experiment derives.

    Randomness is organized in named substreams keyed by
    ``(replication, stream)`` so that replications are reproducible and
    independently parallelizable, and so that toggling one source of
    randomness (say the noise level) never shifts another (the covariate
    draws). Stream ids used by the scenario sampler: 0 control covariates,
    1 treatment covariates, 2 control noise, 3 treatment noise.
    """

    value: int

    def __post_init__(self):
        if not isinstance(self.value, int) or not (0 <= self.value < 2**64):
            raise ConfigError("seed must be an integer in [0, 2^64)")

    def generator(self, *path: int) -> np.random.Generator:
        """Generator for the substream addressed by `path`."""
        ss = np.random.SeedSequence(entropy=self.value, spawn_key=tuple(path))
        return np.random.Generator(np.random.PCG64(ss))


def as_seed(seed) -> RngSeed:
    return seed if isinstance(seed, RngSeed) else RngSeed(int(seed))


def point_array(x) -> np.ndarray:
    """Coerce a point-like object (Covariate, scalar, sequence) to a 1-d vector."""
    if isinstance(x, Covariate):
        return x.as_array()
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise ConfigError(f"expected a single point, got shape {arr.shape}")
    return arr


def points_matrix(points) -> np.ndarray:
    """Coerce a sequence of points to an (n, d) matrix.

    A flat sequence of scalars is read as n one-dimensional points.
    """
    if isinstance(points, np.ndarray) and points.ndim == 2:
        return np.ascontiguousarray(points, dtype=float)
    rows = [point_array(p) for p in points]
    if not rows:
        return np.empty((0, 1))
    widths = {r.size for r in rows}
    if len(widths) != 1:
        raise ConfigError("points have inconsistent dimensions")
    return np.ascontiguousarray(rows, dtype=float)


class ObservationSet:
    """Paired covariate/outcome samples for the control and treatment groups.

    The two groups may have different sizes. Arrays are validated to live in
    [0, 1]^d and are frozen after construction.
    """

    __slots__ = ("dimension", "control_x", "control_y", "treatment_x", "treatment_y")

    def __init__(self, control_x, control_y, treatment_x, treatment_y):
        cx = np.ascontiguousarray(control_x, dtype=float)
        tx = np.ascontiguousarray(treatment_x, dtype=float)
        if cx.ndim == 1:
            cx = cx[:, None]
        if tx.ndim == 1:
            tx = tx[:, None]
        cy = np.ascontiguousarray(control_y, dtype=float)
        ty = np.ascontiguousarray(treatment_y, dtype=float)
        if cx.ndim != 2 or tx.ndim != 2:
            raise ConfigError("covariates must form 2-d arrays")
        if cx.shape[1] != tx.shape[1]:
            raise ConfigError("control and treatment dimensions differ")
        if cy.shape != (cx.shape[0],) or ty.shape != (tx.shape[0],):
            raise ConfigError("outcome lengths do not match covariate counts")
        for arr in (cx, tx):
            if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
                raise ConfigError("covariates must lie in [0, 1]^d")
        for arr in (cx, cy, tx, ty):
            arr.flags.writeable = False
        object.__setattr__(self, "dimension", cx.shape[1])
        object.__setattr__(self, "control_x", cx)
        object.__setattr__(self, "control_y", cy)
        object.__setattr__(self, "treatment_x", tx)
        object.__setattr__(self, "treatment_y", ty)

    def __setattr__(self, name, value):
        raise AttributeError("ObservationSet is immutable")

    @classmethod
    def from_pairs(cls, control, treatment) -> "ObservationSet":
        """Build from sequences of (covariate, outcome) pairs."""
        cxy = [(point_array(c), float(y)) for c, y in control]
        txy = [(point_array(c), float(y)) for c, y in treatment]
        cx = np.asarray([c for c, _ in cxy]) if cxy else np.empty((0, 1))
        tx = np.asarray([c for c, _ in txy]) if txy else np.empty((0, cx.shape[1]))
        return cls(cx, [y for _, y in cxy], tx, [y for _, y in txy])

    @property
    def n_control(self) -> int:
        return self.control_x.shape[0]

    @property
    def n_treatment(self) -> int:
        return self.treatment_x.shape[0]


def euclidean_distance(a, b) -> float:
    """Euclidean distance between two points of equal dimension."""
    av, bv = point_array(a), point_array(b)
    if av.size != bv.size:
        raise ConfigError(f"dimension mismatch: {av.size} vs {bv.size}")
    diff = av - bv
    return float(np.sqrt(np.dot(diff, diff)))


def k_nearest(query, points, k: int) -> np.ndarray:
    """Indices of the k points nearest to `query`, sorted by distance.

    Exact brute-force search. Equal distances are broken by ascending
    original index so results are reproducible.
    """
    q = point_array(query)
    pts = points_matrix(points)
    n = pts.shape[0]
    if n == 0:
        raise ConfigError("empty point set")
    if pts.shape[1] != q.size:
        raise ConfigError(f"dimension mismatch: {pts.shape[1]} vs {q.size}")
    if not (1 <= k <= n):
        raise ConfigError(f"k={k} must be in [1, {n}]")
    d2 = ((pts - q) ** 2).sum(axis=1)
    order = np.argsort(d2, kind="stable")
    return order[:k].copy()
