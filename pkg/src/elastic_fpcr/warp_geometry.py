"""Geometry of boundary-pinned monotone warping functions.

A warp gamma is represented by the square root of its derivative,
psi = sqrt(dgamma/dt).  Because the integral of gamma's derivative is 1,
every psi is a unit vector in L2, so the collection of warps becomes (the
positive orthant of) the unit Hilbert sphere.  Statistics on warps are done
in a tangent space of that sphere via the exponential map and its inverse;
the phase distance between two warps is the arc length between their psi
representations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    InjectivityRadiusError,
    InvalidWarpError,
    UndefinedLogError,
)
from .numerics import (
    GRID_TOL,
    SampledFunction,
    cumtrapz_values,
    gradient_values,
    inner_values,
    l2_norm_values,
    require_same_grid,
    trapezoid_weights,
    validate_grid,
)

# renormalize psi when quadrature drift of ||psi|| exceeds this
PSI_NORM_DRIFT = 1e-8
# give up instead of silently renormalizing a badly scaled psi
PSI_NORM_LIMIT = 0.1


@dataclass(frozen=True)
class WarpingFunction:
    """Monotone map of [0, 1] onto itself with pinned endpoints."""

    t: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = validate_grid(self.t)
        g = np.asarray(self.values, dtype=float)
        if g.shape != t.shape:
            raise InvalidWarpError("warp values must match grid shape")
        if not np.all(np.isfinite(g)):
            raise InvalidWarpError("warp values must be finite")
        if abs(g[0]) > GRID_TOL or abs(g[-1] - 1.0) > GRID_TOL:
            raise InvalidWarpError(f"warp endpoints must be 0 and 1, got {g[0]!r}, {g[-1]!r}")
        if np.any(np.diff(g) <= 0.0):
            raise InvalidWarpError("warp must be strictly increasing")
        g = g.copy()
        g[0], g[-1] = 0.0, 1.0
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", g)


@dataclass(frozen=True)
class PsiFunction:
    """Square-root-derivative representation of a warp; unit L2 norm."""

    t: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = validate_grid(self.t)
        v = np.asarray(self.values, dtype=float)
        if v.shape != t.shape or not np.all(np.isfinite(v)):
            raise InvalidWarpError("psi values must be finite and match the grid")
        nrm = l2_norm_values(v, t)
        if abs(nrm - 1.0) > PSI_NORM_LIMIT:
            raise InvalidWarpError(f"psi must have unit L2 norm, got {nrm}")
        if abs(nrm - 1.0) > PSI_NORM_DRIFT:
            v = v / nrm
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class ShootingVector:
    """Tangent vector at ``base`` on the unit sphere of psi functions."""

    t: np.ndarray
    values: np.ndarray
    base: PsiFunction

    def __post_init__(self):
        t = validate_grid(self.t)
        v = np.asarray(self.values, dtype=float)
        require_same_grid(t, self.base.t)
        if v.shape != t.shape or not np.all(np.isfinite(v)):
            raise InvalidWarpError("shooting vector values must be finite and match the grid")
        if abs(inner_values(v, self.base.values, t)) > 1e-6:
            raise InvalidWarpError("shooting vector is not tangent to its base point")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)

    def norm(self) -> float:
        return l2_norm_values(self.values, self.t)


def identity_warp(t) -> WarpingFunction:
    t = validate_grid(np.asarray(t, dtype=float))
    return WarpingFunction(t, t.copy())


def identity_psi(t) -> PsiFunction:
    t = validate_grid(np.asarray(t, dtype=float))
    return PsiFunction(t, np.ones_like(t))


def to_psi_values(gamma_values: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Array form of :func:`to_psi`: unit-norm sqrt of the warp derivative."""
    dg = gradient_values(gamma_values, t)
    # one-sided endpoint estimates can dip just below zero for flat starts
    psi = np.sqrt(np.maximum(dg, 0.0))
    return psi / l2_norm_values(psi, t)


def to_psi(gamma: WarpingFunction) -> PsiFunction:
    """Square root of the warp's derivative, renormalized to unit norm."""
    return PsiFunction(gamma.t, to_psi_values(gamma.values, gamma.t))


def from_psi_values(psi_values: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Array form of :func:`from_psi`: integrate psi^2, pin the endpoint."""
    g = cumtrapz_values(psi_values * psi_values, t)
    if g[-1] <= 0.0:
        raise InvalidWarpError("psi^2 integrates to zero; cannot form a warp")
    return g / g[-1]


def from_psi(psi: PsiFunction) -> WarpingFunction:
    """Integrate psi^2 and renormalize the endpoint to recover the warp."""
    return WarpingFunction(psi.t, from_psi_values(psi.values, psi.t))


def tangent_project(values: np.ndarray, base: PsiFunction) -> np.ndarray:
    """Remove the component of ``values`` along ``base``."""
    return values - inner_values(values, base.values, base.t) * base.values


def exp_map(base: PsiFunction, v: ShootingVector) -> PsiFunction:
    """Follow the geodesic from ``base`` in direction ``v`` for length ||v||."""
    require_same_grid(base.t, v.t)
    r = v.norm()
    if r >= np.pi:
        raise InjectivityRadiusError(f"||v|| = {r} >= pi")
    if r < 1e-14:
        return base
    vals = np.cos(r) * base.values + (np.sin(r) / r) * v.values
    return PsiFunction(base.t, vals)


def inv_exp_map(base: PsiFunction, psi1: PsiFunction) -> ShootingVector:
    """Tangent vector at ``base`` pointing to ``psi1``, with length d(base, psi1)."""
    require_same_grid(base.t, psi1.t)
    ip = np.clip(inner_values(base.values, psi1.values, base.t), -1.0, 1.0)
    theta = float(np.arccos(ip))
    if theta > np.pi - 1e-6:
        raise UndefinedLogError("inverse exponential map undefined for antipodal points")
    if theta < 1e-14:
        return ShootingVector(base.t, np.zeros_like(base.values), base)
    vals = (theta / np.sin(theta)) * (psi1.values - ip * base.values)
    return ShootingVector(base.t, tangent_project(vals, base), base)


def phase_distance(gamma1: WarpingFunction, gamma2: WarpingFunction) -> float:
    """Arc length on the unit sphere between the warps' psi representations."""
    require_same_grid(gamma1.t, gamma2.t)
    if np.array_equal(gamma1.values, gamma2.values):
        return 0.0
    p1 = to_psi(gamma1)
    p2 = to_psi(gamma2)
    ip = np.clip(inner_values(p1.values, p2.values, p1.t), -1.0, 1.0)
    return float(np.arccos(ip))


def invert_warp(gamma: WarpingFunction) -> WarpingFunction:
    """Inverse warp on the same grid, by exchanging axes and re-interpolating."""
    return WarpingFunction(gamma.t, np.interp(gamma.t, gamma.values, gamma.t))


def compose_warps(outer: WarpingFunction, inner: WarpingFunction) -> WarpingFunction:
    """Pointwise composition outer(inner(t))."""
    require_same_grid(outer.t, inner.t)
    return WarpingFunction(outer.t, np.interp(inner.values, outer.t, outer.values))


def apply_warp(f: SampledFunction, gamma: WarpingFunction) -> SampledFunction:
    """Time-warped function f(gamma(t)) on the shared grid."""
    require_same_grid(f.t, gamma.t)
    return SampledFunction(f.t, np.interp(gamma.values, f.t, f.values))


def _log_rows(psis: np.ndarray, mu: np.ndarray, w: np.ndarray) -> np.ndarray:
    ips = np.clip(psis @ (w * mu), -1.0, 1.0)
    theta = np.arccos(ips)
    scale = np.where(theta < 1e-14, 0.0, theta / np.maximum(np.sin(theta), 1e-300))
    return scale[:, None] * (psis - ips[:, None] * mu[None, :])


def karcher_mean_psis(
    psis: np.ndarray,
    t: np.ndarray,
    step: float = 0.3,
    tol: float = 1e-6,
    max_iter: int = 50,
):
    """Array core of the intrinsic warp mean.

    ``psis`` holds one unit-norm psi per row.  Returns the mean psi values
    and each row's tangent image there, already projected exactly tangent.

    Raises
    ------
    ConvergenceError
        If the mean tangent norm does not drop below ``tol`` within
        ``max_iter`` iterations; carries the last iterate (as warp values).
    """
    w = trapezoid_weights(t)
    mu = psis.mean(axis=0)
    mu = mu / l2_norm_values(mu, t)

    mean_v = np.zeros_like(mu)
    converged = False
    for _ in range(max_iter):
        tangents = _log_rows(psis, mu, w)
        mean_v = tangents.mean(axis=0)
        resid = l2_norm_values(mean_v, t)
        if resid < tol:
            converged = True
            break
        r = step * resid
        mu = np.cos(r) * mu + np.sin(r) * (mean_v / resid)
        # keep on the sphere despite quadrature drift
        mu = mu / l2_norm_values(mu, t)
    if not converged:
        raise ConvergenceError(
            f"warp mean did not converge in {max_iter} iterations",
            last_iterate=from_psi_values(mu, t),
            residual=l2_norm_values(mean_v, t),
        )
    tangents = _log_rows(psis, mu, w)
    tangents -= ((tangents @ (w * mu))[:, None]) * mu[None, :]
    return mu, tangents


def warp_karcher_mean(
    warps,
    step: float = 0.3,
    tol: float = 1e-6,
    max_iter: int = 50,
):
    """Intrinsic mean of warps on the psi sphere.

    Gradient descent on the Frechet objective: map every psi to the tangent
    space at the current estimate, average, and step along the mean tangent.
    Returns the mean warp together with the shooting vectors of all inputs at
    the converged mean.

    Raises
    ------
    ConvergenceError
        If the mean tangent norm does not drop below ``tol`` within
        ``max_iter`` iterations; carries the last iterate.
    """
    warps = list(warps)
    if not warps:
        raise ValueError("need at least one warp")
    t = warps[0].t
    for g in warps[1:]:
        require_same_grid(t, g.t)
    psis = np.vstack([to_psi_values(g.values, t) for g in warps])
    mu, tangents = karcher_mean_psis(psis, t, step=step, tol=tol, max_iter=max_iter)
    mu_psi = PsiFunction(t, mu)
    shooting = [ShootingVector(t, row, mu_psi) for row in tangents]
    return from_psi(PsiFunction(t, mu)), shooting


def random_warp(amplitude: float, seed: int, t) -> WarpingFunction:
    """Seeded random warp; geodesic distance to identity is at most ``amplitude``.

    Draws a tangent direction at the identity from a low-order sine span
    (sin(k pi t), k = 1..4), scales it to a random length in [0, amplitude],
    and shoots.  Draws whose psi representation dips to zero or below are
    rejected and redrawn, with the same seeded stream, so results stay
    deterministic per seed.
    """
    if amplitude < 0:
        raise ValueError("amplitude must be >= 0")
    t = validate_grid(np.asarray(t, dtype=float))
    psi_id = identity_psi(t)
    if amplitude == 0.0:
        return identity_warp(t)

    rng = np.random.default_rng(seed)
    modes = np.vstack([np.sin(k * np.pi * t) for k in range(1, 5)])
    amp = amplitude
    for _ in range(100):
        coeffs = rng.standard_normal(4) / np.arange(1, 5)
        direction = tangent_project(coeffs @ modes, psi_id)
        nrm = l2_norm_values(direction, t)
        if nrm < 1e-12:
            continue
        r = amp * rng.random()
        v = ShootingVector(t, direction * (r / nrm), psi_id)
        psi = exp_map(psi_id, v)
        if np.min(psi.values) > 0.05:
            return from_psi(psi)
        amp *= 0.8  # shrink until the draw stays in the positive orthant
    raise ConvergenceError("could not draw a valid random warp")
