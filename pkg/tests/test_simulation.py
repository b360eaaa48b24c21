import numpy as np
import pytest

from elastic_fpcr.errors import ParameterError
from elastic_fpcr.numerics import SampledFunction, uniform_grid
from elastic_fpcr.simulation import (
    ScenarioSpec,
    beta_true,
    generate,
    linear_response,
    scenario_spec,
)


def test_spec_presets_match_published_parameters():
    spec = scenario_spec("combined", "linear")
    assert spec.mus == (0.35, 0.37, 0.40) and spec.ds == (4.0, 3.0, 2.0)
    spec = scenario_spec("vertical", "linear")
    assert spec.mus == (0.35, 0.35, 0.35) and spec.ds == (4.0, 3.7, 4.0)
    spec = scenario_spec("horizontal", "linear")
    assert spec.mus == (0.35, 0.40, 0.50) and spec.ds == (4.0, 4.0, 4.0)
    spec = scenario_spec("combined", "logistic")
    assert spec.mus == (0.35, 0.37) and spec.ds == (4.0, 3.0)
    assert spec.sigma == 0.075 and spec.n_per_class == 20


def test_spec_validation():
    with pytest.raises(ParameterError):
        scenario_spec("diagonal", "linear")
    with pytest.raises(ParameterError):
        ScenarioSpec(kind="combined", target="linear", mus=(0.3, 0.4), ds=(1.0, 2.0))
    with pytest.raises(ParameterError):
        ScenarioSpec(kind="combined", target="linear", mus=(0.3,) * 3, ds=(1.0,) * 3, sigma=0.0)


def test_generate_counts_and_determinism():
    spec = scenario_spec("combined", "linear", seed=3)
    data1, truth1 = generate(spec)
    assert len(data1) == 60
    data2, truth2 = generate(spec)
    for f1, f2 in zip(data1.functions, data2.functions):
        assert np.array_equal(f1.values, f2.values)
    assert np.array_equal(data1.responses, data2.responses)
    data3, _ = generate(scenario_spec("combined", "linear", seed=4))
    assert not np.array_equal(data1.responses, data3.responses)


def test_generate_degenerate_draws_are_identical_within_class():
    spec = scenario_spec("combined", "linear", seed=0, warp_amplitude=0.0, a_sd=0.0)
    data, truth = generate(spec)
    for klass in (1, 2, 3):
        rows = [f.values for f, c in zip(data.functions, truth["classes"]) if c == klass]
        for row in rows[1:]:
            assert np.array_equal(row, rows[0])


def test_generate_label_targets():
    data, _ = generate(scenario_spec("combined", "logistic", seed=1))
    assert set(np.unique(data.responses)) == {-1.0, 1.0}
    assert len(data) == 40
    data, _ = generate(scenario_spec("combined", "multinomial", seed=1))
    assert set(np.unique(data.responses)) == {1, 2, 3}


def test_beta_true_values():
    t = uniform_grid(1001)
    beta = beta_true(t)
    assert beta.values[0] == pytest.approx(0.9, abs=1e-12)
    quarter = np.argmin(np.abs(t - 0.25))
    assert beta.values[quarter] == pytest.approx(0.5, abs=1e-12)
    assert abs(np.trapezoid(beta.values, t)) < 1e-6


def test_linear_response_constant_function_sees_only_intercept():
    t = uniform_grid(101)
    beta = beta_true(t)
    zero = SampledFunction(t, np.zeros(101))
    const = SampledFunction(t, np.full(101, 3.3))
    y = linear_response([zero, const], beta, alpha=1.25, noise_sd=0.0)
    assert y[0] == pytest.approx(1.25, abs=1e-12)
    assert y[1] == pytest.approx(1.25, abs=1e-9)


def test_linear_response_matches_fine_grid_quadrature():
    t = uniform_grid(101)
    beta = beta_true(t)
    bump = SampledFunction(
        t, 4.0 / np.sqrt(2 * np.pi * 0.075**2) * np.exp(-((t - 0.35) ** 2) / (2 * 0.075**2))
    )
    coarse = linear_response([bump], beta, alpha=0.0, noise_sd=0.0)[0]
    fine_t = uniform_grid(4001)
    fine_vals = 4.0 / np.sqrt(2 * np.pi * 0.075**2) * np.exp(
        -((fine_t - 0.35) ** 2) / (2 * 0.075**2)
    )
    fine = np.trapezoid(fine_vals * beta_true(fine_t).values, fine_t)
    assert coarse == pytest.approx(fine, abs=1e-4)


def test_noise_free_responses_stable_under_refinement():
    mus = (0.35, 0.37, 0.40)
    values = []
    for n_points in (101, 201):
        spec = scenario_spec(
            "combined", "linear", seed=5, n_points=n_points, noise_sd=0.0, warp_amplitude=0.0
        )
        data, _ = generate(spec)
        values.append(data.responses)
    assert np.max(np.abs(values[0] - values[1])) < 1e-4


def test_amplitude_draws_center_on_class_levels():
    spec = scenario_spec("combined", "linear", seed=6, n_per_class=10_000 // 3 + 1)
    # draw amplitudes only; use the truth record to avoid warping 10k functions
    rng = np.random.default_rng(6)
    n = spec.n_per_class
    for d in spec.ds:
        draws = d + spec.a_sd * rng.standard_normal(n)
        se = spec.a_sd / np.sqrt(n)
        assert abs(draws.mean() - d) < 3 * se
