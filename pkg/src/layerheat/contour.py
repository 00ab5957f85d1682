"""Quadrature grids for the contour integrals and the real-line term.

The complex contours are the hyperbolas

    nu(theta) = +/- r * i * sin(alpha - i*theta),   theta in [-theta_max, theta_max],

traversed with increasing ``theta``.  For the upper curve this runs from
left to right (the orientation of the deformed real line), for the lower
curve from right to left, so the weights below integrate over the plus and
minus boundary contours with their standard orientation.

With the default ``alpha = pi/8`` the curve's asymptotes sit at angles
``pi/8`` and ``7pi/8``, where ``exp(-nu**2 t)`` decays like a Gaussian; only
the stretch around ``theta = 0`` lies inside the sector ``Re(nu**2) < 0``.
``alpha = pi/4`` gives the hyperbola ``Re(nu**2) = -r**2/2`` that stays
inside that sector, which is the curve to use with a spectral horizon
larger than the evaluation time.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveTime

DEFAULT_THETA_MAX = 12.0
DEFAULT_COUNT = 2401
DEFAULT_ANGLE = math.pi / 8
INNER_ANGLE = math.pi / 4


class Half(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self):
        return 1.0 if self is Half.PLUS else -1.0


@dataclass(frozen=True, eq=False)
class ContourGrid:
    """Nodes and trapezoid weights on one contour.

    ``weights[i]`` is ``dnu/dtheta(theta_i) * dtheta`` times the trapezoid
    factor, so ``sum(F(nodes) * weights)`` approximates the contour integral.
    """

    half: Half
    theta: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    theta_max: float
    radius: float = 1.0
    angle: float = DEFAULT_ANGLE

    @property
    def count(self):
        return len(self.theta)

    def mirrored(self):
        """The same grid for the other half (nodes negated node-wise)."""
        return ContourGrid(Half.MINUS if self.half is Half.PLUS else Half.PLUS,
                           self.theta, -self.nodes, -self.weights,
                           self.theta_max, self.radius, self.angle)


def contour_nodes(half=Half.PLUS, theta_max=DEFAULT_THETA_MAX, count=DEFAULT_COUNT,
                  radius=1.0, angle=DEFAULT_ANGLE) -> ContourGrid:
    """Equally spaced trapezoid grid on ``nu = +/- radius * i sin(angle - i theta)``."""
    half = Half(half)
    if theta_max <= 0:
        raise ValueError("theta_max must be positive")
    if count < 16:
        raise ValueError("need at least 16 nodes")
    theta = np.linspace(-theta_max, theta_max, count)
    dtheta = theta[1] - theta[0]
    arg = angle - 1j * theta
    nodes = half.sign * radius * 1j * np.sin(arg)
    # d/dtheta [i sin(angle - i theta)] = cos(angle - i theta)
    dnu = half.sign * radius * np.cos(arg)
    trap = np.full(count, dtheta)
    trap[[0, -1]] *= 0.5
    return ContourGrid(half, theta, nodes, dnu * trap, float(theta_max), float(radius), float(angle))


@dataclass(frozen=True, eq=False)
class RealAxisGrid:
    """Trapezoid grid on ``[-K, K]`` for the initial-data term of one layer."""

    nodes: np.ndarray
    weights: np.ndarray
    truncation: float
    sigma: float
    t: float


def real_axis_nodes(sigma, t, tol=1e-16, length=1.0, layer_width=None) -> RealAxisGrid:
    """Grid for ``int exp(i k x - sigma**2 k**2 t) uhat0(k) dk``.

    ``K`` solves ``exp(-sigma**2 K**2 t) = tol``.  The trapezoid sum equals the
    exact integral plus copies of the free-space solution shifted by multiples
    of ``2 pi / dk``; the spacing keeps those copies a Gaussian tail below
    ``tol`` away from the slab, and never exceeds ``pi / (2 length)``.
    """
    if t <= 0:
        raise NonPositiveTime(f"real-axis quadrature needs t > 0, got {t}")
    log_tol = math.log(1.0 / tol)
    K = math.sqrt(log_tol) / (sigma * math.sqrt(t))
    width = length if layer_width is None else layer_width
    period = max(4.0 * length, length + width + 2.2 * sigma * math.sqrt(t * log_tol))
    dk = 2.0 * math.pi / period
    half_count = max(int(math.ceil(K / dk)), 8)
    k = np.linspace(-K, K, 2 * half_count + 1)
    w = np.full(k.shape, k[1] - k[0])
    w[[0, -1]] *= 0.5
    return RealAxisGrid(k, w, K, float(sigma), float(t))
