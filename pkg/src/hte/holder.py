"""Holder-ball machinery: feasibility of value specifications, min/max
envelope extension, and divided differences.

A value specification pins function values at finitely many covariates. For
smoothness beta <= 1 there is an exact pairwise criterion for whether some
function in the Holder ball interpolates it, and an explicit extension built
from the upper and lower cone envelopes. For beta > 1 no such simple
criterion exists (see `counterexample_intervals`), so those inputs are
rejected rather than guessed at.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np

from .core import ConfigError, HolderSpec, point_array, points_matrix

FEASIBILITY_SLACK = 1e-12


@dataclass(frozen=True)
class ValueSpec:
    """Covariate/value pairs with pairwise-distinct covariates."""

    points: np.ndarray
    values: np.ndarray

    def __init__(self, points, values):
        pts = points_matrix(points)
        vals = np.asarray(values, dtype=float)
        if pts.shape[0] != vals.shape[0]:
            raise ConfigError("points and values lengths differ")
        if pts.shape[0] == 0:
            raise ConfigError("value specification must be non-empty")
        d2 = _pairwise_sqdist(pts)
        iu = np.triu_indices(pts.shape[0], k=1)
        if iu[0].size and d2[iu].min() == 0.0:
            raise ConfigError("duplicate covariates in value specification")
        pts.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_pairs(cls, pairs) -> "ValueSpec":
        pairs = [(point_array(x), float(y)) for x, y in pairs]
        return cls([x for x, _ in pairs], [y for _, y in pairs])

    def __len__(self) -> int:
        return self.points.shape[0]


def _pairwise_sqdist(pts: np.ndarray) -> np.ndarray:
    diff = pts[:, None, :] - pts[None, :, :]
    return (diff * diff).sum(axis=-1)


def _check_ball(spec: ValueSpec, ball: HolderSpec):
    if ball.beta > 1.0:
        raise ConfigError(
            "the pairwise criterion only certifies smoothness beta <= 1; "
            "no simple analogue exists beyond that"
        )
    if spec.points.shape[1] != ball.dimension:
        raise ConfigError("value specification dimension does not match ball")


def is_holder_feasible(spec: ValueSpec, ball: HolderSpec) -> bool:
    """Whether some Holder function (radius L, smoothness beta <= 1)
    interpolates the specification: |y_i - y_j| <= L ||x_i - x_j||^beta for
    every pair, checked exactly in O(n^2) with a small additive slack for
    floating-point noise."""
    _check_ball(spec, ball)
    d = np.sqrt(_pairwise_sqdist(spec.points))
    dv = np.abs(spec.values[:, None] - spec.values[None, :])
    bound = ball.radius * d**ball.beta
    iu = np.triu_indices(len(spec), k=1)
    return bool(np.all(dv[iu] <= bound[iu] + FEASIBILITY_SLACK))


class HolderExtension:
    """Midpoint of the admissible envelope over a feasible value spec.

    At any query q the admissible values form the interval
    [max_j(y_j - L d(q,x_j)^beta), min_i(y_i + L d(q,x_i)^beta)]; this
    function returns its midpoint, which interpolates the specification
    exactly and inherits the full Holder bound.
    """

    def __init__(self, spec: ValueSpec, ball: HolderSpec):
        _check_ball(spec, ball)
        if not is_holder_feasible(spec, ball):
            raise ConfigError("value specification is not Holder-feasible")
        self.spec = spec
        self.ball = ball

    def __call__(self, query):
        q = np.asarray(query, dtype=float)
        single = q.ndim == 1
        qm = q[None, :] if single else q
        diff = qm[:, None, :] - self.spec.points[None, :, :]
        cone = self.ball.radius * ((diff * diff).sum(axis=-1)) ** (self.ball.beta / 2.0)
        upper = (self.spec.values[None, :] + cone).min(axis=1)
        lower = (self.spec.values[None, :] - cone).max(axis=1)
        mid = 0.5 * (upper + lower)
        return float(mid[0]) if single else mid


def extend_holder(spec: ValueSpec, ball: HolderSpec, query) -> float:
    """Evaluate the envelope-midpoint extension of `spec` at one query point."""
    return HolderExtension(spec, ball)(point_array(query))


def divided_difference(points: Sequence[Tuple[float, float]]) -> float:
    """Divided difference of tabulated 1-d values:
    sum_i y_i * prod_{j != i} 1 / (x_i - x_j)."""
    xs = np.asarray([float(x) for x, _ in points])
    ys = np.asarray([float(y) for _, y in points])
    if xs.size == 0:
        raise ConfigError("need at least one point")
    if np.unique(xs).size != xs.size:
        raise ConfigError("duplicate abscissae")
    total = 0.0
    for i in range(xs.size):
        w = 1.0
        for j in range(xs.size):
            if j != i:
                w /= xs[i] - xs[j]
        total += ys[i] * w
    return float(total)


def counterexample_intervals() -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """Admissible ranges of the middle value v = f(0) given
    f(-3) = f(-1) = 1 and f(1) = f(3) = 0 under the two divided-difference
    caps |f[-3,-1,0]| <= 1/8 and |f[0,1,3]| <= 1/8.

    Solved in exact rational arithmetic; the endpoints are dyadic so the
    returned floats are exact. The two ranges are disjoint, which is why the
    bounded-divided-difference criterion cannot certify second-order Holder
    extension: each cap alone is satisfiable, both together are not.
    """

    def admissible(known, bound):
        # Divided difference is affine in v: const + slope * v.
        xs = [Fraction(x) for x, _ in known]
        const = Fraction(0)
        for i, (_, y) in enumerate(known):
            if y is None:
                continue
            w = Fraction(1)
            for j, xj in enumerate(xs):
                if j != i:
                    w /= xs[i] - xj
            const += Fraction(y) * w
        vi = next(i for i, (_, y) in enumerate(known) if y is None)
        slope = Fraction(1)
        for j, xj in enumerate(xs):
            if j != vi:
                slope /= xs[vi] - xj
        lo, hi = sorted(((-bound - const) / slope, (bound - const) / slope))
        return (float(lo), float(hi))

    first = admissible([(-3, 1), (-1, 1), (0, None)], Fraction(1, 8))
    second = admissible([(0, None), (1, 0), (3, 0)], Fraction(1, 8))
    return first, second
