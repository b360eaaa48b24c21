import numpy as np
import pytest

from elastic_fpcr.errors import GridMismatchError, InvalidGridError
from elastic_fpcr.numerics import (
    SampledFunction,
    cumulative_integral,
    gradient,
    inner_product,
    integrate,
    resample,
    uniform_grid,
    validate_grid,
)


def test_grid_validation_rejects_bad_grids():
    with pytest.raises(InvalidGridError):
        validate_grid([0.0, 0.5])  # too short
    with pytest.raises(InvalidGridError):
        validate_grid([0.0, 0.5, 0.4, 1.0])  # not increasing
    with pytest.raises(InvalidGridError):
        validate_grid([0.1, 0.5, 1.0])  # does not start at 0
    with pytest.raises(InvalidGridError):
        validate_grid([0.0, 0.5, 0.9])  # does not end at 1


def test_sampled_function_rejects_nonfinite():
    t = uniform_grid(5)
    with pytest.raises(ValueError):
        SampledFunction(t, [0.0, 1.0, np.nan, 2.0, 3.0])


def test_resample_linear_is_exact():
    t = uniform_grid(10)
    f = SampledFunction(t, t.copy())
    g = uniform_grid(37)
    out = resample(f, g)
    assert np.allclose(out.values, g, atol=1e-15)


def test_resample_identity_grid_returns_same_values():
    t = uniform_grid(12)
    f = SampledFunction(t, np.sin(t))
    out = resample(f, t)
    assert np.array_equal(out.values, f.values)


def test_resample_quadratic_accuracy():
    t = uniform_grid(501)
    f = SampledFunction(t, t**2)
    g = uniform_grid(251)
    out = resample(f, g)
    assert np.max(np.abs(out.values - g**2)) < 1e-5


def test_resample_rejects_invalid_target_grid():
    f = SampledFunction(uniform_grid(10), np.zeros(10))
    with pytest.raises(InvalidGridError):
        resample(f, [0.0, 0.7, 0.6, 1.0])


def test_gradient_exact_for_affine():
    t = uniform_grid(50)
    assert np.allclose(gradient(SampledFunction(t, 3.0 * t)).values, 3.0, atol=1e-12)
    assert np.allclose(gradient(SampledFunction(t, np.full(50, 2.5))).values, 0.0, atol=1e-12)


def test_gradient_sine_accuracy():
    t = uniform_grid(256)
    df = gradient(SampledFunction(t, np.sin(2 * np.pi * t)))
    exact = 2 * np.pi * np.cos(2 * np.pi * t)
    assert np.max(np.abs(df.values - exact)) < 1e-2


def test_integrate_basic_values():
    t = uniform_grid(64)
    assert integrate(SampledFunction(t, np.ones(64))) == pytest.approx(1.0, abs=1e-14)
    assert integrate(SampledFunction(t, t.copy())) == pytest.approx(0.5, abs=1e-14)
    t = uniform_grid(256)
    assert integrate(SampledFunction(t, t**2)) == pytest.approx(1 / 3, abs=1e-5)


def test_inner_product_values_and_errors():
    t = uniform_grid(512)
    f = SampledFunction(t, np.sin(2 * np.pi * t))
    g = SampledFunction(t, np.cos(2 * np.pi * t))
    one = SampledFunction(t, np.ones(512))
    zero = SampledFunction(t, np.zeros(512))
    assert inner_product(f, zero) == 0.0
    assert inner_product(one, one) == pytest.approx(1.0, abs=1e-14)
    assert abs(inner_product(f, g)) < 1e-6
    with pytest.raises(GridMismatchError):
        inner_product(f, SampledFunction(uniform_grid(100), np.zeros(100)))


def test_integrate_is_linear():
    t = uniform_grid(93)
    rng = np.random.default_rng(0)
    f = SampledFunction(t, rng.standard_normal(93))
    g = SampledFunction(t, rng.standard_normal(93))
    a, b = 1.7, -0.4
    combined = SampledFunction(t, a * f.values + b * g.values)
    assert abs(integrate(combined) - (a * integrate(f) + b * integrate(g))) < 1e-12


def test_inner_product_is_nonnegative_on_diagonal():
    t = uniform_grid(64)
    rng = np.random.default_rng(1)
    for _ in range(5):
        f = SampledFunction(t, rng.standard_normal(64))
        assert inner_product(f, f) >= 0.0


def test_gradient_of_cumulative_integral_roundtrip():
    errs = []
    for n in (128, 256, 512):
        t = uniform_grid(n)
        f = SampledFunction(t, np.sin(2 * np.pi * t) + 0.5 * np.cos(4 * np.pi * t))
        back = gradient(cumulative_integral(f))
        errs.append(np.max(np.abs(back.values - f.values)))
    assert errs[0] < 5e-2
    assert errs[0] > errs[1] > errs[2]


def test_gradient_smoothing_window():
    t = uniform_grid(200)
    rng = np.random.default_rng(2)
    noisy = SampledFunction(t, 3.0 * t + 0.01 * rng.standard_normal(200))
    raw = gradient(noisy)
    smoothed = gradient(noisy, smooth_window=9)
    assert np.std(smoothed.values) < np.std(raw.values)
