"""Square-root slope transform and the warping group action on it.

The transform q = sign(df/dt) * sqrt(|df/dt|) turns time warping into an
L2 isometry: warping a function and warping its q by the same gamma move
the representation by (q o gamma) * sqrt(dgamma/dt), which preserves norms
and pairwise distances.  A function is recovered from (q, f(0)) by
integrating q|q|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidGridError
from .numerics import (
    SampledFunction,
    cumtrapz_values,
    gradient_values,
    l2_norm_values,
    require_same_grid,
    smooth_values,
    validate_grid,
)
from .warp_geometry import WarpingFunction


@dataclass(frozen=True)
class Srsf:
    """Square-root slope values q on a grid, plus the initial value f(0)."""

    t: np.ndarray
    values: np.ndarray
    f0: float = 0.0

    def __post_init__(self):
        t = validate_grid(self.t)
        q = np.asarray(self.values, dtype=float)
        if q.shape != t.shape:
            raise InvalidGridError("q values must match grid shape")
        if not (np.all(np.isfinite(q)) and np.isfinite(self.f0)):
            raise ValueError("q values and f0 must be finite")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", q)
        object.__setattr__(self, "f0", float(self.f0))

    def norm(self) -> float:
        return l2_norm_values(self.values, self.t)


def to_srsf(f: SampledFunction, smooth_window: int = 0) -> Srsf:
    """Square-root slope transform of ``f``.

    ``smooth_window`` pre-smooths the samples before differentiating
    (useful for noisy data such as ECG traces); 0 uses raw samples.
    """
    y = smooth_values(f.values, smooth_window)
    df = gradient_values(y, f.t)
    # sign(0) * sqrt(0) = 0 keeps q continuous at critical points
    q = np.sign(df) * np.sqrt(np.abs(df))
    return Srsf(f.t, q, f0=float(f.values[0]))


def from_srsf(q: Srsf) -> SampledFunction:
    """Recover the function: f(t) = f(0) + integral of q|q|."""
    return SampledFunction(q.t, q.f0 + cumtrapz_values(q.values * np.abs(q.values), q.t))


def warp_srsf_values(q_values: np.ndarray, gamma_values: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Array form of :func:`warp_srsf`."""
    dg = gradient_values(gamma_values, t)
    warped = np.interp(gamma_values, t, q_values)
    return warped * np.sqrt(np.maximum(dg, 0.0))


def warp_srsf(q: Srsf, gamma: WarpingFunction) -> Srsf:
    """Group action (q o gamma) * sqrt(dgamma/dt); an L2 isometry."""
    require_same_grid(q.t, gamma.t)
    return Srsf(q.t, warp_srsf_values(q.values, gamma.values, q.t), f0=q.f0)


def srsf_distance(q1: Srsf, q2: Srsf) -> float:
    """Plain L2 distance between two SRSFs on a shared grid."""
    require_same_grid(q1.t, q2.t)
    return l2_norm_values(q1.values - q2.values, q1.t)
