import numpy as np
import pytest

from elastic_fpcr.numerics import SampledFunction, l2_norm_values, uniform_grid
from elastic_fpcr.warp_geometry import (
    ShootingVector,
    exp_map,
    from_psi,
    identity_psi,
    tangent_project,
)


def banded_warp(norm, seed, t, lo=1 / 3, hi=3.0, n_modes=4):
    """Fixed-norm random warp whose slopes stay inside [lo, hi].

    Draws sine-span tangent vectors at the identity and redraws until the
    resulting warp's finite-difference slopes fit the band, so the DP
    lattice (slopes in [1/5, 5]) can represent the warp exactly enough
    for construct-and-recover oracles.
    """
    rng = np.random.default_rng(seed)
    psi_id = identity_psi(t)
    modes = np.vstack([np.sin(k * np.pi * t) for k in range(1, n_modes + 1)])
    for _ in range(500):
        coeffs = rng.standard_normal(n_modes) / np.arange(1, n_modes + 1)
        direction = tangent_project(coeffs @ modes, psi_id)
        scale = l2_norm_values(direction, t)
        if scale < 1e-12:
            continue
        gamma = from_psi(
            exp_map(psi_id, ShootingVector(t, direction * (norm / scale), psi_id))
        )
        slopes = np.diff(gamma.values) / np.diff(t)
        if slopes.min() >= lo and slopes.max() <= hi:
            return gamma
    raise RuntimeError(f"no banded warp found for norm={norm}, seed={seed}")


def two_bump_function(t) -> SampledFunction:
    """Smooth test function with structure everywhere on [0, 1]."""
    return SampledFunction(t, np.sin(2 * np.pi * t) + 0.6 * np.sin(4 * np.pi * t + 1.0))


@pytest.fixture(scope="session")
def grid_128():
    return uniform_grid(128)


@pytest.fixture(scope="session")
def grid_101():
    return uniform_grid(101)


@pytest.fixture(scope="session", autouse=True)
def _warm_alignment_kernel():
    # load/compile the jitted DP kernel once, outside any timed region
    from elastic_fpcr.alignment import optimal_warp
    from elastic_fpcr.srsf import to_srsf

    t = uniform_grid(16)
    q = to_srsf(SampledFunction(t, np.sin(2 * np.pi * t)))
    optimal_warp(q, q)
