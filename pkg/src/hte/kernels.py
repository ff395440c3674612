"""Construction and evaluation of compactly supported smoothing kernels.

A kernel of order k integrates to one and has vanishing directional moments
up to order k. Multivariate kernels are products of a single 1-d factor
supported on [-1, 1], so the d-dimensional support is the unit sup-norm box
in bandwidth units.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.polynomial import legendre

from .core import ConfigError


@dataclass(frozen=True)
class Kernel:
    """Product kernel with a polynomial 1-d factor on [-1, 1].

    `coeffs` are ascending power coefficients of the factor; the factor is
    zero outside the support radius.
    """

    order: int
    dimension: int
    coeffs: Tuple[float, ...]
    support_radius: float = 1.0

    def factor(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        val = np.polynomial.polynomial.polyval(u, np.asarray(self.coeffs))
        return np.where(np.abs(u) <= self.support_radius, val, 0.0)

    def evaluate(self, point):
        """Kernel value at a point (d,) or a batch of points (k, d)."""
        p = np.asarray(point, dtype=float)
        single = p.ndim == 1
        pm = p[None, :] if single else p
        if pm.shape[1] != self.dimension:
            raise ConfigError(
                f"kernel dimension {self.dimension} does not match point "
                f"dimension {pm.shape[1]}"
            )
        vals = self.factor(pm).prod(axis=1)
        return float(vals[0]) if single else vals

    __call__ = evaluate


def _legendre_factor_coeffs(order: int) -> Tuple[float, ...]:
    # Projection of the point evaluation at 0 onto polynomials of degree
    # <= order, in the L2([-1, 1]) orthonormal Legendre basis:
    #   kappa(u) = sum_m (2m+1)/2 * P_m(0) * P_m(u).
    # Odd-degree terms vanish, so the factor is even and the construction
    # yields exact moment cancellation up to the requested order.
    series = np.zeros(order + 1)
    for m in range(order + 1):
        basis = np.zeros(m + 1)
        basis[m] = 1.0
        series[m] = (2 * m + 1) / 2.0 * legendre.legval(0.0, basis)
    return tuple(legendre.leg2poly(series))


def make_kernel(order: int, dimension: int) -> Kernel:
    """Product kernel of the requested moment order.

    Order 0 is the flat factor, order 1 the parabolic (Epanechnikov) factor
    whose first moment vanishes by symmetry, and higher orders come from the
    Legendre construction above.
    """
    if order < 0:
        raise ConfigError("kernel order must be nonnegative")
    if dimension < 1:
        raise ConfigError("kernel dimension must be positive")
    if order == 0:
        coeffs: Tuple[float, ...] = (0.5,)
    elif order == 1:
        coeffs = (0.75, 0.0, -0.75)
    else:
        coeffs = _legendre_factor_coeffs(order)
    return Kernel(order=order, dimension=dimension, coeffs=coeffs)


def kernel_eval(kernel: Kernel, point):
    """Evaluate `kernel` at `point`; zero outside the support box."""
    return kernel.evaluate(point)
