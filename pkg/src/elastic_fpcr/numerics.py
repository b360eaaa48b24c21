"""Grid-based calculus shared by every module.

Functions are represented by their values on a strictly increasing grid over
[0, 1].  Everything here is a pure function of its inputs: resampling,
second-order finite differences, trapezoidal quadrature, and the L2 inner
product built on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, InvalidGridError, ParameterError

GRID_TOL = 1e-8


def validate_grid(t) -> np.ndarray:
    """Return ``t`` as a float array after checking the grid invariants."""
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < 3:
        raise InvalidGridError(f"grid must be 1-D with T >= 3 points, got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        raise InvalidGridError("grid contains non-finite times")
    if np.any(np.diff(t) <= 0.0):
        raise InvalidGridError("grid times must be strictly increasing")
    if abs(t[0]) > GRID_TOL or abs(t[-1] - 1.0) > GRID_TOL:
        raise InvalidGridError(f"grid must span [0, 1], got [{t[0]!r}, {t[-1]!r}]")
    return t


def uniform_grid(n_points: int) -> np.ndarray:
    """Uniform grid of ``n_points`` samples on [0, 1]."""
    if n_points < 3:
        raise InvalidGridError("need at least 3 grid points")
    return np.linspace(0.0, 1.0, n_points)


def same_grid(t1: np.ndarray, t2: np.ndarray) -> bool:
    return t1.shape == t2.shape and np.allclose(t1, t2, rtol=0.0, atol=GRID_TOL)


def require_same_grid(t1: np.ndarray, t2: np.ndarray) -> None:
    if not same_grid(t1, t2):
        raise GridMismatchError("operands must share a grid; resample first")


@dataclass(frozen=True)
class SampledFunction:
    """Real-valued function sampled on a grid over [0, 1]."""

    t: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = validate_grid(self.t)
        v = np.asarray(self.values, dtype=float)
        if v.shape != t.shape:
            raise InvalidGridError(f"values shape {v.shape} does not match grid shape {t.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("function values must be finite")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.t.size


# --- array-level kernels (shared grid assumed where two arrays appear) ---


def trapezoid_weights(t: np.ndarray) -> np.ndarray:
    """Quadrature weights w with sum(w * y) == trapezoid integral of y."""
    w = np.empty_like(t)
    dt = np.diff(t)
    w[0] = dt[0] / 2.0
    w[-1] = dt[-1] / 2.0
    w[1:-1] = (dt[:-1] + dt[1:]) / 2.0
    return w


def integrate_values(y: np.ndarray, t: np.ndarray) -> float:
    return float(np.trapezoid(y, t))


def cumtrapz_values(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Cumulative trapezoid integral, starting at 0."""
    out = np.empty_like(y)
    out[0] = 0.0
    np.cumsum((y[1:] + y[:-1]) / 2.0 * np.diff(t), out=out[1:])
    return out


def inner_values(y1: np.ndarray, y2: np.ndarray, t: np.ndarray) -> float:
    return integrate_values(y1 * y2, t)


def l2_norm_values(y: np.ndarray, t: np.ndarray) -> float:
    return float(np.sqrt(max(integrate_values(y * y, t), 0.0)))


def gradient_values(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    # centered second-order differences inside, one-sided second-order at the ends
    return np.gradient(y, t, edge_order=2)


def smooth_values(y: np.ndarray, window: int) -> np.ndarray:
    """Moving-average smoothing with an odd window; window <= 1 is a no-op."""
    if window <= 1:
        return y
    if window % 2 == 0:
        raise ParameterError(f"smoothing window must be odd, got {window}")
    half = window // 2
    padded = np.pad(y, half, mode="edge")
    return np.convolve(padded, np.full(window, 1.0 / window), mode="valid")


# --- SampledFunction-level operations ---


def resample(f: SampledFunction, grid) -> SampledFunction:
    """Piecewise-linear interpolation of ``f`` onto ``grid``."""
    grid = validate_grid(np.asarray(grid, dtype=float))
    if same_grid(f.t, grid):
        return f
    return SampledFunction(grid, np.interp(grid, f.t, f.values))


def gradient(f: SampledFunction, smooth_window: int = 0) -> SampledFunction:
    """Second-order finite-difference derivative of ``f``.

    ``smooth_window`` applies a moving average before differentiating, for
    noisy inputs; 0 (default) differentiates the raw samples.
    """
    y = smooth_values(f.values, smooth_window)
    return SampledFunction(f.t, gradient_values(y, f.t))


def integrate(f: SampledFunction) -> float:
    """Trapezoidal integral of ``f`` over [0, 1]."""
    return integrate_values(f.values, f.t)


def cumulative_integral(f: SampledFunction) -> SampledFunction:
    """Running trapezoidal integral; value 0 at t = 0."""
    return SampledFunction(f.t, cumtrapz_values(f.values, f.t))


def inner_product(f: SampledFunction, g: SampledFunction) -> float:
    """L2 inner product of two functions sampled on the same grid."""
    require_same_grid(f.t, g.t)
    return inner_values(f.values, g.values, f.t)


def l2_norm(f: SampledFunction) -> float:
    return l2_norm_values(f.values, f.t)
