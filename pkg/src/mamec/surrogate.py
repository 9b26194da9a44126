"""Convex surrogates used inside the block-coordinate inner loop.

Three local approximations, each tight at its expansion point:

* a tangent upper bound on ``log2(1 + eta)`` turning the rate constraint
  affine in ``(C, eta)``;
* the standard lower bound on the quadratic-over-linear form ``|u|^2/eta``
  (convex jointly in ``(u, eta)`` for ``eta > 0``);
* a supporting halfspace for the nonconvex minimum-distance constraint
  ``norm(v) >= D``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LN2 = math.log(2.0)


@dataclass(frozen=True)
class RateTangent:
    """Affine model of log2(1+eta) around ``anchor``: offset + slope*eta.

    ``slope_scale=1.0`` is the true first-order expansion.  ``0.5`` keeps the
    halved slope that appears in some treatments; it is not tight and exists
    only for comparison.
    """

    anchor: float
    offset: float
    slope: float

    def __call__(self, eta: float) -> float:
        return self.offset + self.slope * eta


def linearize_rate_bound(eta_prev: float,
                         slope_scale: float = 1.0) -> RateTangent:
    if eta_prev < 0:
        raise ValueError(f"rate-bound anchor must be >= 0, got {eta_prev}")
    slope = slope_scale / (LN2 * (1.0 + eta_prev))
    offset = math.log2(1.0 + eta_prev) - slope * eta_prev
    return RateTangent(anchor=eta_prev, offset=offset, slope=slope)


@dataclass(frozen=True)
class QuadOverLinearBound:
    """Lower bound of |u|^2/eta around (u_prev, eta_prev).

    Value is 2*Re(<u_prev, u>)/eta_prev - |u_prev|^2 * eta / eta_prev^2,
    where <.,.> is the complex inner product (sum over vector components).
    """

    u_prev: np.ndarray
    eta_prev: float

    def __call__(self, u, eta: float) -> float:
        lin = 2.0 * np.real(np.vdot(self.u_prev, u)) / self.eta_prev
        curv = (np.vdot(self.u_prev, self.u_prev).real
                / self.eta_prev ** 2) * eta
        return float(lin - curv)


def linearize_quadratic_over_linear(u_prev, eta_prev: float
                                    ) -> QuadOverLinearBound:
    if eta_prev <= 0:
        raise ValueError(
            f"quadratic-over-linear anchor needs eta_prev > 0, got {eta_prev}")
    return QuadOverLinearBound(u_prev=np.atleast_1d(np.asarray(u_prev)),
                               eta_prev=float(eta_prev))


@dataclass(frozen=True)
class DistanceHalfspace:
    """Supporting halfspace unit_dir @ v >= D of the set norm(v) >= D."""

    unit_dir: np.ndarray
    D: float

    def satisfied(self, v, tol: float = 0.0) -> bool:
        return float(self.unit_dir @ np.asarray(v)) >= self.D - tol

    def value(self, v) -> float:
        return float(self.unit_dir @ np.asarray(v))


def linearize_min_distance(v_prev, D: float) -> DistanceHalfspace:
    v_prev = np.asarray(v_prev, dtype=float)
    nrm = np.linalg.norm(v_prev)
    if nrm <= 0.0:
        raise ValueError("minimum-distance anchor must be nonzero")
    return DistanceHalfspace(unit_dir=v_prev / nrm, D=float(D))
