"""Pairwise and groupwise elastic alignment of functions via their SRSFs.

Pairwise alignment solves, by dynamic programming on a T x T lattice, for
the monotone warp minimizing the L2 distance between one SRSF and the
warped other.  Lattice edges use coprime steps up to 5, so representable
local slopes range over [1/5, 5].  Groupwise alignment iterates template
updates with pairwise alignment, then centers the warps so their intrinsic
mean is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm

import numpy as np

from .errors import ConvergenceError, InvalidGridError
from .numerics import SampledFunction, l2_norm_values, require_same_grid
from .srsf import Srsf, from_srsf, to_srsf, warp_srsf, warp_srsf_values
from .warp_geometry import (
    PsiFunction,
    ShootingVector,
    WarpingFunction,
    from_psi_values,
    karcher_mean_psis,
    to_psi_values,
)

try:  # pragma: no cover - exercised implicitly by every DP call
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def _coprime_steps(max_step: int) -> np.ndarray:
    pairs = [
        (p, q)
        for p in range(1, max_step + 1)
        for q in range(1, max_step + 1)
        if gcd(p, q) == 1
    ]
    return np.array(pairs, dtype=np.int64)


_MAX_STEP = 5
_DP_STEPS = _coprime_steps(_MAX_STEP)
# both q arrays are pre-interpolated at index resolution 1/_REFINE, so every
# sample the edge-cost loop needs sits at an integer offset
_REFINE = lcm(*range(1, _MAX_STEP + 1))
_BIG = 1e300


@njit(cache=True)
def _dp_tables(q1_fine, q2_fine, refine, steps, n_grid):
    """Fill cost/parent tables for the alignment lattice.

    Edge from (i-di, j-dj) to (i, j) carries the trapezoid approximation of
    the segment's contribution to || q1 - (q2 o gamma) sqrt(slope) ||^2,
    sampled at max(di, dj) + 1 points along the segment.  Cells no monotone
    path within the slope cone can pass through are skipped outright.
    """
    h = 1.0 / (n_grid - 1)
    n_steps = steps.shape[0]
    roots = np.empty(n_steps)
    npts_arr = np.empty(n_steps, dtype=np.int64)
    stride1 = np.empty(n_steps, dtype=np.int64)
    stride2 = np.empty(n_steps, dtype=np.int64)
    coef = np.empty(n_steps)
    smax = 1
    for s in range(n_steps):
        di = steps[s, 0]
        dj = steps[s, 1]
        if di > smax:
            smax = di
        if dj > smax:
            smax = dj
        npts = di if di > dj else dj
        roots[s] = np.sqrt(dj / di)
        npts_arr[s] = npts
        stride1[s] = di * refine // npts
        stride2[s] = dj * refine // npts
        coef[s] = h * di / npts

    top = n_grid - 1
    cost = np.full((n_grid, n_grid), _BIG)
    choice = np.full((n_grid, n_grid), -1, dtype=np.int64)
    cost[0, 0] = 0.0
    for i in range(1, n_grid):
        # reachable slope cone from (0, 0) and to (top, top)
        jlo = (i + smax - 1) // smax
        alt = top - smax * (top - i)
        if alt > jlo:
            jlo = alt
        if jlo < 1:
            jlo = 1
        jhi = smax * i
        alt = top - ((top - i) + smax - 1) // smax
        if alt < jhi:
            jhi = alt
        if jhi > top:
            jhi = top
        for j in range(jlo, jhi + 1):
            best = _BIG
            arg = -1
            for s in range(n_steps):
                i0 = i - steps[s, 0]
                j0 = j - steps[s, 1]
                if i0 < 0 or j0 < 0:
                    continue
                base = cost[i0, j0]
                if base >= _BIG:
                    continue
                root = roots[s]
                npts = npts_arr[s]
                u1 = i0 * refine
                u2 = j0 * refine
                acc = 0.5 * (q1_fine[u1] - root * q2_fine[u2]) ** 2
                for k in range(1, npts):
                    d = q1_fine[u1 + k * stride1[s]] - root * q2_fine[u2 + k * stride2[s]]
                    acc += d * d
                d = q1_fine[u1 + npts * stride1[s]] - root * q2_fine[u2 + npts * stride2[s]]
                acc += 0.5 * d * d
                val = base + acc * coef[s]
                if val < best:
                    best = val
                    arg = s
            cost[i, j] = best
            choice[i, j] = arg
    return cost, choice


def _refine_values(values: np.ndarray) -> np.ndarray:
    n = values.size
    fine_idx = np.arange((n - 1) * _REFINE + 1) / _REFINE
    return np.interp(fine_idx, np.arange(n, dtype=float), values)


def _backtrack(choice: np.ndarray, steps: np.ndarray) -> np.ndarray:
    n_grid = choice.shape[0]
    anchors_i = [n_grid - 1]
    anchors_j = [n_grid - 1]
    i = j = n_grid - 1
    while i > 0 or j > 0:
        s = choice[i, j]
        if s < 0:  # unreachable: the (1, 1) step always connects the corners
            raise RuntimeError("dynamic program produced no path")
        i -= int(steps[s, 0])
        j -= int(steps[s, 1])
        anchors_i.append(i)
        anchors_j.append(j)
    anchors_i.reverse()
    anchors_j.reverse()
    idx = np.arange(n_grid, dtype=float)
    return np.interp(idx, np.asarray(anchors_i, float), np.asarray(anchors_j, float))


def _check_uniform(t: np.ndarray) -> None:
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-6, atol=1e-12):
        raise InvalidGridError("dynamic-programming alignment needs a uniform grid")


def _optimal_path(q1_values: np.ndarray, q2_values: np.ndarray) -> np.ndarray:
    """Warp values (array core of :func:`optimal_warp`); grids assumed checked."""
    n_grid = q1_values.size
    _, choice = _dp_tables(
        _refine_values(q1_values), _refine_values(q2_values), _REFINE, _DP_STEPS, n_grid
    )
    return _backtrack(choice, _DP_STEPS) / (n_grid - 1)


def optimal_warp(q1: Srsf, q2: Srsf) -> WarpingFunction:
    """Warp gamma minimizing || q1 - (q2 o gamma) sqrt(dgamma) || on the DP lattice."""
    require_same_grid(q1.t, q2.t)
    _check_uniform(q1.t)
    if q1.t.size < 8:
        raise InvalidGridError("alignment needs T >= 8 grid points")
    return WarpingFunction(q1.t, _optimal_path(q1.values, q2.values))


def warp_cost(q1: Srsf, q2: Srsf, gamma: WarpingFunction) -> float:
    """Alignment objective || q1 - (q2 o gamma) sqrt(dgamma) || for any warp."""
    warped = warp_srsf(q2, gamma)
    return l2_norm_values(q1.values - warped.values, q1.t)


def amplitude_distance(f1: SampledFunction, f2: SampledFunction) -> float:
    """Warping-invariant distance: align f2's SRSF to f1's, then the L2 gap."""
    q1 = to_srsf(f1)
    q2 = to_srsf(f2)
    return warp_cost(q1, q2, optimal_warp(q1, q2))


@dataclass(frozen=True)
class AlignedSet:
    """Result of groupwise alignment.

    ``warps`` are centered: their intrinsic mean is the identity, and the
    ``shooting_vectors`` (tangent images of the warps at ``psi_mean``)
    average to nearly zero.  ``mean_srsf`` is the cross-sectional mean of
    the aligned SRSFs, with f0 the mean initial value.
    """

    mean_srsf: Srsf
    aligned_srsfs: list
    aligned_functions: list
    warps: list
    shooting_vectors: list
    psi_mean: PsiFunction

    def __len__(self) -> int:
        return len(self.aligned_srsfs)


def _recenter_rows(gamma_rows: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Compose every warp row with the inverse of their intrinsic mean."""
    psis = np.vstack([to_psi_values(row, t) for row in gamma_rows])
    mu, _ = karcher_mean_psis(psis, t)
    mean_inv = np.interp(t, from_psi_values(mu, t), t)
    return np.vstack([np.interp(mean_inv, t, row) for row in gamma_rows])


def align_set(
    functions,
    tol: float = 1e-4,
    max_iter: int = 20,
    polish_rounds: int = 3,
) -> AlignedSet:
    """Align a family of functions to their evolving mean SRSF.

    Iterates (pairwise DP alignment to the template, template update by the
    cross-sectional mean) until the relative change of the template's norm
    drops below ``tol``, then centers the warps so their Karcher mean is
    the identity.  Up to ``polish_rounds`` extra rounds re-align the
    aligned SRSFs to their own mean and recenter, which makes the output a
    fixed point: re-running the pairwise alignment against ``mean_srsf``
    moves nothing by more than about a grid step.

    Raises
    ------
    ConvergenceError
        If the template keeps moving after ``max_iter`` iterations.
    """
    functions = list(functions)
    n = len(functions)
    if n < 2:
        raise ValueError("groupwise alignment needs at least two functions")
    t = functions[0].t
    for f in functions[1:]:
        require_same_grid(t, f.t)
    _check_uniform(t)
    step = t[1] - t[0]

    qs = [to_srsf(f) for f in functions]
    qmat = np.vstack([q.values for q in qs])

    # start from the sample closest to the cross-sectional mean
    qbar = qmat.mean(axis=0)
    start = int(np.argmin([l2_norm_values(row - qbar, t) for row in qmat]))
    mu = qmat[start].copy()
    mu_norm = l2_norm_values(mu, t)

    change = np.inf
    converged = False
    for iteration in range(max_iter):
        gamma_rows = np.vstack([_optimal_path(mu, row) for row in qmat])
        aligned = np.vstack(
            [warp_srsf_values(row, g, t) for row, g in zip(qmat, gamma_rows)]
        )
        mu = aligned.mean(axis=0)
        new_norm = l2_norm_values(mu, t)
        change = abs(new_norm - mu_norm) / max(mu_norm, 1e-300)
        mu_norm = new_norm
        # the first pass swaps the seed sample for a true mean; never stop on it
        if iteration >= 1 and change < tol:
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"groupwise alignment did not settle in {max_iter} iterations",
            last_iterate=Srsf(t, mu),
            residual=change,
        )

    gamma_rows = _recenter_rows(gamma_rows, t)
    for _ in range(polish_rounds):
        aligned = np.vstack(
            [warp_srsf_values(row, g, t) for row, g in zip(qmat, gamma_rows)]
        )
        mu = aligned.mean(axis=0)
        deltas = np.vstack([_optimal_path(mu, row) for row in aligned])
        drift = np.max(np.abs(deltas - t))
        if drift <= step * (1.0 + 1e-9):  # already a fixed point
            break
        composed = np.vstack(
            [np.interp(d, t, g) for g, d in zip(gamma_rows, deltas)]
        )
        gamma_rows = _recenter_rows(composed, t)
    # each recentering pass contracts the residual of the warps' intrinsic
    # mean toward the identity by a few-fold; two more passes cost no DP
    for _ in range(2):
        gamma_rows = _recenter_rows(gamma_rows, t)

    gammas = [WarpingFunction(t, row) for row in gamma_rows]
    aligned_srsfs = [
        Srsf(t, warp_srsf_values(row, g, t), f0=q.f0)
        for row, g, q in zip(qmat, gamma_rows, qs)
    ]
    aligned_functions = [from_srsf(q) for q in aligned_srsfs]
    mean_values = np.vstack([q.values for q in aligned_srsfs]).mean(axis=0)
    mean_f0 = float(np.mean([q.f0 for q in aligned_srsfs]))

    psis = np.vstack([to_psi_values(row, t) for row in gamma_rows])
    mu_psi_values, tangents = karcher_mean_psis(psis, t)
    psi_mean = PsiFunction(t, mu_psi_values)
    shooting = [ShootingVector(t, row, psi_mean) for row in tangents]

    return AlignedSet(
        mean_srsf=Srsf(t, mean_values, f0=mean_f0),
        aligned_srsfs=aligned_srsfs,
        aligned_functions=aligned_functions,
        warps=gammas,
        shooting_vectors=shooting,
        psi_mean=psi_mean,
    )
