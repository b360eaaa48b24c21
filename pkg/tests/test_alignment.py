import numpy as np
import pytest

from elastic_fpcr.alignment import AlignedSet, align_set, amplitude_distance, optimal_warp, warp_cost
from elastic_fpcr.errors import GridMismatchError, InvalidGridError
from elastic_fpcr.numerics import SampledFunction, l2_norm_values, uniform_grid
from elastic_fpcr.srsf import to_srsf, warp_srsf
from elastic_fpcr.warp_geometry import (
    apply_warp,
    identity_warp,
    phase_distance,
    random_warp,
    warp_karcher_mean,
)

from conftest import banded_warp, two_bump_function


def _pairwise_sum(rows, t):
    total = 0.0
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            total += l2_norm_values(rows[i] - rows[j], t)
    return total


def test_optimal_warp_self_is_identity(grid_128):
    q = to_srsf(two_bump_function(grid_128))
    gamma = optimal_warp(q, q)
    step = 1.0 / (grid_128.size - 1)
    assert np.max(np.abs(gamma.values - grid_128)) <= step + 1e-12


def test_optimal_warp_requirements():
    t = uniform_grid(128)
    q = to_srsf(two_bump_function(t))
    other = to_srsf(two_bump_function(uniform_grid(64)))
    with pytest.raises(GridMismatchError):
        optimal_warp(q, other)
    tiny = uniform_grid(5)
    with pytest.raises(InvalidGridError):
        optimal_warp(to_srsf(SampledFunction(tiny, tiny.copy())),
                     to_srsf(SampledFunction(tiny, tiny.copy())))
    # non-uniform grid
    bent = np.linspace(0, 1, 128) ** 1.3
    bent[0], bent[-1] = 0.0, 1.0
    qb = to_srsf(SampledFunction(np.sort(bent), np.sin(np.sort(bent))))
    with pytest.raises(InvalidGridError):
        optimal_warp(qb, qb)


def test_construct_and_recover(grid_128):
    t = grid_128
    q1 = to_srsf(two_bump_function(t))
    step = 1.0 / (t.size - 1)
    for seed in range(20):
        gamma0 = banded_warp(0.3, seed, t)
        q2 = warp_srsf(q1, gamma0)
        recovered = optimal_warp(q2, q1)
        deviation = np.max(np.abs(recovered.values - gamma0.values)) / step
        assert deviation <= 3.0, f"seed {seed}: {deviation:.2f} grid steps"
        residual = warp_cost(q2, q1, recovered)
        pre = l2_norm_values(q1.values - q2.values, t)
        assert residual < 0.05 * pre, f"seed {seed}: {residual / pre:.3f}"


def test_dp_beats_random_search(grid_128):
    t = grid_128
    q1 = to_srsf(two_bump_function(t))
    q2 = warp_srsf(q1, banded_warp(0.3, 42, t))
    best = warp_cost(q1, q2, optimal_warp(q1, q2))
    for seed in range(1000):
        candidate = random_warp(0.4, seed, t)
        assert best <= warp_cost(q1, q2, candidate) + 1e-12


def test_dp_residual_nonincreasing_under_refinement():
    resids = []
    for n in (64, 128, 256):
        t = uniform_grid(n)
        q1 = to_srsf(two_bump_function(t))
        gamma0 = banded_warp(0.3, 7, t)
        q2 = warp_srsf(q1, gamma0)
        resids.append(warp_cost(q2, q1, optimal_warp(q2, q1)))
    assert resids[0] >= resids[1] - 1e-9 and resids[1] >= resids[2] - 1e-9


def test_amplitude_distance_self_and_invariance(grid_128):
    t = grid_128
    f = two_bump_function(t)
    assert amplitude_distance(f, f) < 1e-8
    qn = to_srsf(f).norm()
    for seed in range(5):
        warped = apply_warp(f, banded_warp(0.25, seed, t))
        assert amplitude_distance(f, warped) < 0.05 * qn


def test_amplitude_distance_double_warp(grid_128):
    t = grid_128
    f1 = two_bump_function(t)
    f2 = SampledFunction(t, 1.25 * np.sin(2 * np.pi * t) + 0.45 * np.sin(4 * np.pi * t + 1.0))
    base = amplitude_distance(f1, f2)
    for seed in range(6):
        g1 = banded_warp(0.2, seed, t)
        g2 = banded_warp(0.2, 100 + seed, t)
        moved = amplitude_distance(apply_warp(f1, g1), apply_warp(f2, g2))
        assert abs(moved - base) < 0.25 * base


def test_align_set_identical_inputs(grid_101):
    t = grid_101
    f = two_bump_function(t)
    result = align_set([SampledFunction(t, f.values.copy()) for _ in range(5)])
    step = 1.0 / (t.size - 1)
    for gamma in result.warps:
        assert np.max(np.abs(gamma.values - t)) <= step + 1e-9
    q = to_srsf(f)
    assert np.max(np.abs(result.mean_srsf.values - q.values)) < 1e-8
    for q_aligned in result.aligned_srsfs:
        assert np.max(np.abs(q_aligned.values - q.values)) < 1e-8


def test_align_set_warped_family_collapses(grid_128):
    t = grid_128
    f = two_bump_function(t)
    family = [apply_warp(f, banded_warp(0.25, 200 + s, t)) for s in range(12)]
    result = align_set(family)
    pre = _pairwise_sum([g.values for g in family], t)
    post = _pairwise_sum([g.values for g in result.aligned_functions], t)
    assert post < 0.05 * pre


def test_align_set_bumps_variance_reduction(grid_101):
    t = grid_101
    rng = np.random.default_rng(0)
    family = []
    for s in range(10):
        peak = 0.35 + 0.08 * rng.random()
        height = 3.0 + rng.random()
        family.append(SampledFunction(t, height * np.exp(-((t - peak) ** 2) / (2 * 0.075**2))))
    result = align_set(family)
    pre_var = np.vstack([to_srsf(f).values for f in family]).var(axis=0).mean()
    post_var = np.vstack([q.values for q in result.aligned_srsfs]).var(axis=0).mean()
    assert post_var < pre_var


def test_align_set_is_a_fixed_point(grid_101):
    t = grid_101
    f = two_bump_function(t)
    family = [apply_warp(f, banded_warp(0.25, 300 + s, t)) for s in range(10)]
    result = align_set(family)
    step = 1.0 / (t.size - 1)
    for q_aligned in result.aligned_srsfs:
        gamma = optimal_warp(result.mean_srsf, q_aligned)
        assert np.max(np.abs(gamma.values - t)) <= step * (1 + 1e-9)


def test_align_set_centering_invariants(grid_101):
    t = grid_101
    f = two_bump_function(t)
    family = [apply_warp(f, banded_warp(0.3, 400 + s, t)) for s in range(12)]
    result = align_set(family)
    mean_warp, _ = warp_karcher_mean(result.warps)
    assert phase_distance(mean_warp, identity_warp(t)) < 1e-3
    mean_v = np.mean([v.values for v in result.shooting_vectors], axis=0)
    assert l2_norm_values(mean_v, t) < 1e-3


def test_align_set_permutation_invariance(grid_101):
    t = grid_101
    f = two_bump_function(t)
    family = [apply_warp(f, banded_warp(0.25, 500 + s, t)) for s in range(8)]
    first = align_set(family)
    order = [5, 2, 7, 0, 3, 6, 1, 4]
    second = align_set([family[i] for i in order])
    assert np.max(np.abs(first.mean_srsf.values - second.mean_srsf.values)) < 1e-6
    for new_pos, old_pos in enumerate(order):
        a = first.aligned_srsfs[old_pos].values
        b = second.aligned_srsfs[new_pos].values
        assert np.max(np.abs(a - b)) < 1e-6


def test_align_set_needs_two_functions(grid_101):
    with pytest.raises(ValueError):
        align_set([two_bump_function(grid_101)])


def test_aligned_set_len(grid_101):
    t = grid_101
    f = two_bump_function(t)
    family = [apply_warp(f, banded_warp(0.2, 600 + s, t)) for s in range(4)]
    result = align_set(family)
    assert isinstance(result, AlignedSet)
    assert len(result) == 4
    assert len(result.warps) == len(result.shooting_vectors) == 4


def test_align_set_nonconvergence_carries_iterate(grid_101):
    t = grid_101
    f = two_bump_function(t)
    family = [apply_warp(f, banded_warp(0.2, 650 + s, t)) for s in range(4)]
    from elastic_fpcr.errors import ConvergenceError
    with pytest.raises(ConvergenceError) as err:
        align_set(family, max_iter=1)
    assert err.value.last_iterate is not None
