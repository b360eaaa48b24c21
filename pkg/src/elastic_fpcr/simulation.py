"""Synthetic bump-function scenarios with controlled phase/amplitude structure.

Each scenario draws Gaussian bumps a_i * N(mu_j, sigma) pdf per class,
computes responses from the clean curves, and only then composes each
curve with a random warp, so phase variability acts purely as
observation noise.  Three class structures are provided:

* ``combined``   - classes differ in both bump location and height
* ``vertical``   - classes differ in height only (amplitude)
* ``horizontal`` - classes differ in location only (phase)
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError
from .numerics import SampledFunction, trapezoid_weights, uniform_grid
from .regression import TrainingData
from .warp_geometry import apply_warp, random_warp

# class means (bump locations) and amplitude centers per scenario;
# two-class variants serve the logistic target
_PRESETS_3 = {
    "combined": ((0.35, 0.37, 0.40), (4.0, 3.0, 2.0)),
    "vertical": ((0.35, 0.35, 0.35), (4.0, 3.7, 4.0)),
    "horizontal": ((0.35, 0.40, 0.50), (4.0, 4.0, 4.0)),
}
_PRESETS_2 = {
    "combined": ((0.35, 0.37), (4.0, 3.0)),
    "vertical": ((0.35, 0.35), (4.0, 3.7)),
    "horizontal": ((0.35, 0.40), (4.0, 4.0)),
}

SCENARIOS = tuple(_PRESETS_3)
TARGETS = ("linear", "logistic", "multinomial")


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    target: str
    mus: tuple
    ds: tuple
    n_per_class: int = 20
    sigma: float = 0.075
    warp_amplitude: float = 0.4
    a_sd: float = float(np.sqrt(0.05))
    noise_sd: float = 0.01
    n_points: int = 101
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SCENARIOS:
            raise ParameterError(f"scenario kind must be one of {SCENARIOS}")
        if self.target not in TARGETS:
            raise ParameterError(f"target must be one of {TARGETS}")
        if self.sigma <= 0:
            raise ParameterError("sigma must be positive")
        expected = 2 if self.target == "logistic" else 3
        if not (len(self.mus) == len(self.ds) == expected):
            raise ParameterError(
                f"{self.target} target needs {expected} classes; got "
                f"{len(self.mus)} bump locations and {len(self.ds)} amplitudes"
            )

    @property
    def n_classes(self) -> int:
        return len(self.mus)


def scenario_spec(kind: str, target: str, seed: int = 0, **overrides) -> ScenarioSpec:
    """Preset scenario parameters for a (kind, target) pair."""
    presets = _PRESETS_2 if target == "logistic" else _PRESETS_3
    if kind not in presets:
        raise ParameterError(f"scenario kind must be one of {SCENARIOS}")
    mus, ds = presets[kind]
    spec = ScenarioSpec(kind=kind, target=target, mus=mus, ds=ds, seed=seed)
    return replace(spec, **overrides) if overrides else spec


def beta_true(t) -> SampledFunction:
    """Regression coefficient function used by the linear target."""
    t = np.asarray(t, dtype=float)
    return SampledFunction(t, 0.5 * np.sin(2 * np.pi * t) + 0.9 * np.cos(2 * np.pi * t))


def linear_response(functions, beta: SampledFunction, alpha: float = 0.0,
                    noise_sd: float = 0.0, seed: int = 0) -> np.ndarray:
    """y_i = alpha + <f_i, beta> + noise, by trapezoidal quadrature."""
    functions = list(functions)
    w = trapezoid_weights(beta.t) * beta.values
    y = np.array([alpha + float(f.values @ w) for f in functions])
    if noise_sd > 0:
        y = y + noise_sd * np.random.default_rng(seed).standard_normal(len(functions))
    return y


def _bump(t: np.ndarray, amplitude: float, mu: float, sigma: float) -> np.ndarray:
    return amplitude / np.sqrt(2 * np.pi * sigma**2) * np.exp(-((t - mu) ** 2) / (2 * sigma**2))


def generate(spec: ScenarioSpec):
    """Draw one dataset: (warped observations with responses, ground truth).

    The ground-truth record carries the clean (unwarped) curves, the warps
    applied, the amplitude draws, beta (linear target), and the noiseless
    responses.  Everything is deterministic per spec.seed.
    """
    rng = np.random.default_rng(spec.seed)
    t = uniform_grid(spec.n_points)
    n_total = spec.n_per_class * spec.n_classes

    amplitudes = np.concatenate(
        [d + spec.a_sd * rng.standard_normal(spec.n_per_class) for d in spec.ds]
    )
    class_of = np.repeat(np.arange(1, spec.n_classes + 1), spec.n_per_class)
    originals = [
        SampledFunction(t, _bump(t, a, spec.mus[c - 1], spec.sigma))
        for a, c in zip(amplitudes, class_of)
    ]

    beta = beta_true(t)
    if spec.target == "linear":
        clean = linear_response(originals, beta, alpha=0.0)
        responses = clean + spec.noise_sd * rng.standard_normal(n_total)
    elif spec.target == "logistic":
        clean = np.where(class_of == 1, 1, -1).astype(float)
        responses = clean.copy()
    else:
        clean = class_of.astype(int)
        responses = clean.copy()

    warp_seeds = rng.integers(0, 2**31 - 1, size=n_total)
    warps = [random_warp(spec.warp_amplitude, int(s), t) for s in warp_seeds]
    observed = [apply_warp(f, g) for f, g in zip(originals, warps)]

    truth = {
        "originals": originals,
        "warps": warps,
        "amplitudes": amplitudes,
        "classes": class_of,
        "beta": beta,
        "noiseless_responses": clean,
    }
    return TrainingData(observed, responses), truth
