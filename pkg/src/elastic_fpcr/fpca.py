"""Functional PCA over the amplitude, phase, and joint representations.

Four model kinds share one fitting core (SVD of the centered sample
matrix) and differ only in what each sample's representation vector is:

* ``vertical``   - aligned SRSF stacked with the initial value, [q_i, f_i(0)]
* ``horizontal`` - shooting vector v_i of the warp at the mean psi
* ``combined``   - [q_i, C v_i], with C > 0 balancing the two blocks
* ``standard``   - the raw sampled values, no alignment (baseline)

Coefficients are plain dot products of centered representations with the
orthonormal basis columns, so full-rank models reconstruct the training
representations exactly.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .alignment import AlignedSet
from .errors import DegeneratePhaseWarning, ParameterError
from .numerics import SampledFunction
from .srsf import Srsf, from_srsf
from .warp_geometry import (
    PsiFunction,
    ShootingVector,
    WarpingFunction,
    exp_map,
    from_psi,
    identity_warp,
    tangent_project,
)

KINDS = ("vertical", "horizontal", "combined", "standard")


@dataclass(frozen=True)
class FpcaModel:
    """Fitted functional PCA model.

    ``mean`` and the columns of ``basis`` live in the representation space
    of the given ``kind``; ``singular_values`` are the covariance
    eigenvalues (variances) of the retained directions, non-increasing.
    The alignment anchors (``mean_srsf``, ``f0_mean``, ``psi_mean``) are
    carried so that held-out samples can be processed and principal paths
    reconstructed; they are None for the standard kind.
    """

    kind: str
    t: np.ndarray
    mean: np.ndarray
    basis: np.ndarray
    singular_values: np.ndarray
    n_components: int
    total_variance: float
    phase_weight: float | None = None
    mean_srsf: np.ndarray | None = None
    f0_mean: float | None = None
    psi_mean: np.ndarray | None = None


def _fit_core(x: np.ndarray, n_components: int):
    """Mean, orthonormal directions, covariance eigenvalues of sample rows."""
    n = x.shape[0]
    mean = x.mean(axis=0)
    centered = (x - mean) / np.sqrt(n - 1)
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    basis = vt[:n_components].T.copy()
    # deterministic orientation: first non-negligible entry of a column > 0
    for j in range(basis.shape[1]):
        col = basis[:, j]
        nz = np.nonzero(np.abs(col) > 1e-10 * max(np.abs(col).max(), 1e-300))[0]
        if nz.size and col[nz[0]] < 0:
            basis[:, j] = -col
    eigvals = svals[:n_components] ** 2
    total = float(np.sum(svals**2))
    return mean, basis, eigvals, total


def _check_components(n_components: int, n_samples: int) -> None:
    if not 1 <= n_components <= n_samples - 1:
        raise ParameterError(
            f"n_components must be in [1, n-1] = [1, {n_samples - 1}], got {n_components}"
        )


def _vertical_stack(aligned: AlignedSet) -> np.ndarray:
    return np.column_stack(
        [
            np.vstack([q.values for q in aligned.aligned_srsfs]),
            np.array([q.f0 for q in aligned.aligned_srsfs]),
        ]
    )


def _horizontal_stack(aligned: AlignedSet) -> np.ndarray:
    return np.vstack([v.values for v in aligned.shooting_vectors])


def _combined_stack(aligned: AlignedSet, phase_weight: float) -> np.ndarray:
    q = np.vstack([q.values for q in aligned.aligned_srsfs])
    v = np.vstack([v.values for v in aligned.shooting_vectors])
    return np.column_stack([q, phase_weight * v])


def _function_stack(functions) -> np.ndarray:
    if isinstance(functions, np.ndarray):
        return np.atleast_2d(np.asarray(functions, dtype=float))
    return np.vstack([f.values for f in functions])


def vertical_fpca(aligned: AlignedSet, n_components: int) -> FpcaModel:
    """PCA of the aligned SRSFs stacked with their initial values."""
    x = _vertical_stack(aligned)
    _check_components(n_components, x.shape[0])
    mean, basis, eig, total = _fit_core(x, n_components)
    return FpcaModel(
        kind="vertical",
        t=aligned.mean_srsf.t,
        mean=mean,
        basis=basis,
        singular_values=eig,
        n_components=n_components,
        total_variance=total,
        mean_srsf=aligned.mean_srsf.values.copy(),
        f0_mean=aligned.mean_srsf.f0,
        psi_mean=aligned.psi_mean.values.copy(),
    )


def horizontal_fpca(aligned: AlignedSet, n_components: int) -> FpcaModel:
    """PCA of the warps' shooting vectors at the mean psi."""
    x = _horizontal_stack(aligned)
    _check_components(n_components, x.shape[0])
    mean, basis, eig, total = _fit_core(x, n_components)
    return FpcaModel(
        kind="horizontal",
        t=aligned.mean_srsf.t,
        mean=mean,
        basis=basis,
        singular_values=eig,
        n_components=n_components,
        total_variance=total,
        mean_srsf=aligned.mean_srsf.values.copy(),
        f0_mean=aligned.mean_srsf.f0,
        psi_mean=aligned.psi_mean.values.copy(),
    )


def combined_fpca(
    aligned: AlignedSet, n_components: int, phase_weight: float | None = None
) -> FpcaModel:
    """Joint PCA of [aligned SRSF, C * shooting vector] rows of length 2T.

    ``phase_weight`` is the block-balancing constant C; small values let the
    leading directions follow amplitude, large values phase.  None picks the
    dispersion-balancing estimate from :func:`estimate_phase_weight`.
    """
    if phase_weight is None:
        phase_weight = estimate_phase_weight(aligned)
    if not np.isfinite(phase_weight) or phase_weight <= 0:
        raise ParameterError(f"phase weight C must be positive, got {phase_weight}")
    x = _combined_stack(aligned, phase_weight)
    _check_components(n_components, x.shape[0])
    mean, basis, eig, total = _fit_core(x, n_components)
    return FpcaModel(
        kind="combined",
        t=aligned.mean_srsf.t,
        mean=mean,
        basis=basis,
        singular_values=eig,
        n_components=n_components,
        total_variance=total,
        phase_weight=float(phase_weight),
        mean_srsf=aligned.mean_srsf.values.copy(),
        f0_mean=aligned.mean_srsf.f0,
        psi_mean=aligned.psi_mean.values.copy(),
    )


def standard_fpca(functions, n_components: int) -> FpcaModel:
    """Cross-sectional PCA of the raw sampled values; no alignment."""
    functions = list(functions)
    x = _function_stack(functions)
    _check_components(n_components, x.shape[0])
    mean, basis, eig, total = _fit_core(x, n_components)
    return FpcaModel(
        kind="standard",
        t=functions[0].t,
        mean=mean,
        basis=basis,
        singular_values=eig,
        n_components=n_components,
        total_variance=total,
    )


def estimate_phase_weight(aligned: AlignedSet) -> float:
    """Balance amplitude and phase dispersion: C = sqrt(sum||q - mu_q||^2 / sum||v||^2).

    Warns and returns 1.0 when the sample has (numerically) no phase
    dispersion, since the ratio is undefined there.
    """
    q = np.vstack([q.values for q in aligned.aligned_srsfs])
    v = np.vstack([s.values for s in aligned.shooting_vectors])
    amp = float(np.sum((q - q.mean(axis=0)) ** 2))
    phs = float(np.sum(v**2))
    if phs < 1e-300 or amp / max(phs, 1e-300) > 1e20:
        warnings.warn(
            "no phase dispersion in the sample; using C = 1", DegeneratePhaseWarning
        )
        return 1.0
    return float(np.sqrt(amp / phs))


def representation(model: FpcaModel, source) -> np.ndarray:
    """Stack ``source`` into the representation matrix of ``model.kind``.

    ``source`` is an AlignedSet for the elastic kinds, a list of sampled
    functions (or a values matrix) for the standard kind, or an already
    stacked matrix for any kind.
    """
    if isinstance(source, np.ndarray):
        x = np.atleast_2d(np.asarray(source, dtype=float))
    elif isinstance(source, AlignedSet):
        if model.kind == "vertical":
            x = _vertical_stack(source)
        elif model.kind == "horizontal":
            x = _horizontal_stack(source)
        elif model.kind == "combined":
            x = _combined_stack(source, model.phase_weight)
        else:
            x = _function_stack(source.aligned_functions)
    else:
        if model.kind != "standard":
            raise ParameterError(
                f"{model.kind} projection needs an AlignedSet or a stacked matrix"
            )
        x = _function_stack(source)
    if x.shape[1] != model.mean.size:
        raise ParameterError(
            f"representation length {x.shape[1]} does not match model dimension {model.mean.size}"
        )
    return x


def project(model: FpcaModel, source) -> np.ndarray:
    """Principal coefficients: centered representations dotted with the basis."""
    x = representation(model, source)
    return (x - model.mean) @ model.basis


def reconstruct(model: FpcaModel, coefficients: np.ndarray) -> np.ndarray:
    """Centered representations implied by coefficients (inverse of project)."""
    return np.atleast_2d(coefficients) @ model.basis.T


def principal_paths(model: FpcaModel, component: int, taus):
    """Function/warp pairs along one principal direction.

    ``component`` is 1-based.  Each tau gives the point
    mean + tau * sqrt(variance_j) * direction_j in representation space,
    mapped back to a function and a warp:  the function comes from the
    amplitude block (via SRSF integration) and the warp from the phase
    block (via the exponential map); kinds without one of the blocks use
    the mean function or the identity warp for it.
    """
    if not 1 <= component <= model.n_components:
        raise ParameterError(
            f"component must be in [1, {model.n_components}], got {component}"
        )
    direction = model.basis[:, component - 1]
    sd = float(np.sqrt(model.singular_values[component - 1]))
    t = model.t
    n_grid = t.size
    out = []
    for tau in taus:
        point = model.mean + float(tau) * sd * direction
        if model.kind == "standard":
            out.append((SampledFunction(t, point), identity_warp(t)))
            continue
        psi_mean = PsiFunction(t, model.psi_mean)
        if model.kind == "vertical":
            func = from_srsf(Srsf(t, point[:n_grid], f0=float(point[n_grid])))
            warp = identity_warp(t)
        elif model.kind == "horizontal":
            func = from_srsf(Srsf(t, model.mean_srsf, f0=model.f0_mean))
            warp = _warp_from_tangent(point, psi_mean)
        else:  # combined: [q block, C * v block]
            func = from_srsf(Srsf(t, point[:n_grid], f0=model.f0_mean))
            warp = _warp_from_tangent(point[n_grid:] / model.phase_weight, psi_mean)
        out.append((func, warp))
    return out


def _warp_from_tangent(values: np.ndarray, base: PsiFunction) -> WarpingFunction:
    tangent = tangent_project(values, base)
    v = ShootingVector(base.t, tangent, base)
    return from_psi(exp_map(base, v))


# --- plain-text model serialization ---


def model_to_dict(model: FpcaModel) -> dict:
    return {
        "schema": "elastic-fpcr-model-v1",
        "kind": model.kind,
        "grid": model.t.tolist(),
        "mean": model.mean.tolist(),
        "basis": model.basis.tolist(),
        "singular_values": model.singular_values.tolist(),
        "n_components": model.n_components,
        "total_variance": model.total_variance,
        "phase_weight": model.phase_weight,
        "mean_srsf": None if model.mean_srsf is None else model.mean_srsf.tolist(),
        "f0_mean": model.f0_mean,
        "psi_mean": None if model.psi_mean is None else model.psi_mean.tolist(),
    }


def model_from_dict(payload: dict) -> FpcaModel:
    if payload.get("schema") != "elastic-fpcr-model-v1":
        raise ParameterError(f"unrecognized model schema: {payload.get('schema')!r}")
    opt = lambda key: None if payload[key] is None else np.asarray(payload[key], float)
    return FpcaModel(
        kind=payload["kind"],
        t=np.asarray(payload["grid"], float),
        mean=np.asarray(payload["mean"], float),
        basis=np.asarray(payload["basis"], float),
        singular_values=np.asarray(payload["singular_values"], float),
        n_components=int(payload["n_components"]),
        total_variance=float(payload["total_variance"]),
        phase_weight=payload["phase_weight"],
        mean_srsf=opt("mean_srsf"),
        f0_mean=payload["f0_mean"],
        psi_mean=opt("psi_mean"),
    )


def save_fpca_model(model: FpcaModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh)


def load_fpca_model(path) -> FpcaModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
