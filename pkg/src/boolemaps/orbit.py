"""Pointwise dynamics of the generalized Boole transform family.

The family is the one-parameter group of maps

    xi -> alpha * (xi - 1/xi),        0 < alpha < 1,

acting on the real line minus the pole at 0.  Each member is chaotic with an
invariant Cauchy law of location 0 and scale sqrt(alpha/(1-alpha)); its
companion map gamma -> alpha * (gamma + 1/gamma) governs the scale dynamics
on the positive axis.  This module provides the maps themselves, their
two-branch preimages, guarded orbit iteration, and the Cauchy pdf/cdf/
quantile trio that the density-level verifiers build on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularInputError

#: Inputs closer to the pole at 0 than this are treated as singular.
POLE_EPS = 1e-300


def check_alpha(alpha: float) -> float:
    """Validate the map parameter; must lie strictly inside (0, 1)."""
    alpha = float(alpha)
    if not math.isfinite(alpha) or not 0.0 < alpha < 1.0:
        raise ValueError(f"map parameter must satisfy 0 < alpha < 1, got {alpha!r}")
    return alpha


def invariant_scale(alpha: float) -> float:
    """Scale of the invariant Cauchy law, sqrt(alpha / (1 - alpha))."""
    alpha = check_alpha(alpha)
    return math.sqrt(alpha / (1.0 - alpha))


def boole_transform(alpha: float, xi: float, eps: float = POLE_EPS) -> float:
    """Apply xi -> alpha*(xi - 1/xi).

    Raises SingularInputError when ``|xi| < eps`` (the pole guard); exact
    pre-poles are measure zero, so no attempt is made to enumerate them.
    """
    alpha = check_alpha(alpha)
    if not math.isfinite(xi) or abs(xi) < eps:
        raise SingularInputError(f"point {xi!r} is inside the pole guard |xi| < {eps}")
    return alpha * (xi - 1.0 / xi)


def g_transform(alpha: float, gamma: float) -> float:
    """Apply the companion scale map gamma -> alpha*(gamma + 1/gamma).

    Defined for gamma > 0 only; the positive axis is invariant.
    """
    alpha = check_alpha(alpha)
    if not math.isfinite(gamma) or gamma <= 0.0:
        raise SingularInputError(f"scale map needs gamma > 0, got {gamma!r}")
    return alpha * (gamma + 1.0 / gamma)


def preimages(alpha: float, xi_prime: float) -> tuple[float, float]:
    """Both solutions of alpha*(xi - 1/xi) = xi_prime, ordered low/high.

    The quadratic is solved in the cancellation-free form: the root whose
    magnitude matches sign(xi_prime) is computed from the discriminant, the
    other from the exact product xi_minus * xi_plus = -1.  The naive formula
    loses all significant digits for |xi_prime| >> alpha.
    """
    alpha = check_alpha(alpha)
    disc = math.sqrt(xi_prime * xi_prime + 4.0 * alpha * alpha)
    if xi_prime >= 0.0:
        hi = (xi_prime + disc) / (2.0 * alpha)
        lo = -1.0 / hi
    else:
        lo = (xi_prime - disc) / (2.0 * alpha)
        hi = -1.0 / lo
    return lo, hi


@dataclass(frozen=True)
class OrbitResult:
    """Orbit of the map, possibly cut short by the pole guard.

    ``points`` holds the iterates actually produced, starting with the seed;
    when ``truncated`` is true the final stored point landed inside the pole
    guard and ``last_index`` is its position.
    """

    points: np.ndarray
    truncated: bool
    last_index: int


def iterate_orbit(alpha: float, xi0: float, n: int, eps: float = POLE_EPS) -> OrbitResult:
    """Iterate the map ``n`` times from ``xi0``.

    Returns n+1 points on a clean run.  If an iterate lands within ``eps``
    of the pole the orbit is truncated there and flagged rather than raising,
    so callers can see how far it got.
    """
    alpha = check_alpha(alpha)
    if n < 0:
        raise ValueError("orbit length must be nonnegative")
    if not math.isfinite(xi0) or abs(xi0) < eps:
        raise SingularInputError(f"seed {xi0!r} is inside the pole guard")
    points = np.empty(n + 1)
    points[0] = x = xi0
    for i in range(1, n + 1):
        if abs(x) < eps:
            return OrbitResult(points[:i].copy(), truncated=True, last_index=i - 1)
        x = alpha * (x - 1.0 / x)
        points[i] = x
    return OrbitResult(points, truncated=False, last_index=n)


@dataclass(frozen=True)
class CauchyParams:
    """Location/scale pair of a Cauchy law; the scale must be positive."""

    nu: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.nu) and math.isfinite(self.gamma)):
            raise ValueError("Cauchy parameters must be finite")
        if self.gamma <= 0.0:
            raise ValueError(f"Cauchy scale must be positive, got {self.gamma!r}")


def cauchy_pdf(p: CauchyParams, xi):
    """Density gamma / (pi * ((xi - nu)^2 + gamma^2)); accepts arrays."""
    d = np.asarray(xi, dtype=float) - p.nu
    out = p.gamma / (np.pi * (d * d + p.gamma * p.gamma))
    return float(out) if np.isscalar(xi) else out


def cauchy_cdf(p: CauchyParams, xi):
    """Cumulative probability 1/2 + arctan((xi - nu)/gamma)/pi; accepts arrays."""
    z = (np.asarray(xi, dtype=float) - p.nu) / p.gamma
    out = 0.5 + np.arctan(z) / np.pi
    return float(out) if np.isscalar(xi) else out


def cauchy_quantile(p: CauchyParams, u):
    """Inverse CDF nu + gamma*tan(pi*(u - 1/2)) for u strictly inside (0, 1)."""
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr <= 0.0) or np.any(u_arr >= 1.0):
        raise ValueError("quantile level must lie strictly inside (0, 1)")
    out = p.nu + p.gamma * np.tan(np.pi * (u_arr - 0.5))
    return float(out) if np.isscalar(u) else out


def invariant_params(alpha: float) -> CauchyParams:
    """Parameters of the invariant Cauchy law for the given alpha."""
    return CauchyParams(0.0, invariant_scale(alpha))
