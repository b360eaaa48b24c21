"""Principal-component regression on elastic (or standard) fPCA scores.

The design matrix is Z = [1, Theta], where Theta holds each sample's
principal coefficients under the chosen fPCA kind.  The linear link is
solved by least squares; the logistic and multinomial links maximize
their concave log-likelihoods with a limited-memory quasi-Newton ascent.

Held-out samples are processed against the *training* alignment anchors
only: SRSF, pairwise warp to the stored mean SRSF, shooting vector at the
stored mean psi, then projection.  The training alignment is never
recomputed, so cross-validation stays leak-free.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .alignment import AlignedSet, align_set, optimal_warp
from .errors import DegenerateLabelsError, ParameterError, RankDeficiencyError
from .fpca import (
    FpcaModel,
    combined_fpca,
    horizontal_fpca,
    model_from_dict,
    model_to_dict,
    project,
    standard_fpca,
    vertical_fpca,
)
from .numerics import SampledFunction, resample, same_grid
from .srsf import Srsf, to_srsf, warp_srsf
from .warp_geometry import PsiFunction, inv_exp_map, to_psi

LINKS = ("linear", "logistic", "multinomial")


@dataclass(frozen=True)
class TrainingData:
    """Predictor functions with their responses.

    Responses are reals for the linear link, labels in {-1, +1} for the
    logistic link, and labels in {1, ..., m} for the multinomial link.
    """

    functions: list
    responses: np.ndarray

    def __post_init__(self):
        functions = list(self.functions)
        responses = np.asarray(self.responses)
        if len(functions) != responses.shape[0]:
            raise ParameterError("functions and responses must have equal length")
        object.__setattr__(self, "functions", functions)
        object.__setattr__(self, "responses", responses)

    def __len__(self) -> int:
        return len(self.functions)


@dataclass(frozen=True)
class RegressionModel:
    """Fitted principal-component regression model.

    ``coef`` has one row per free class for the multinomial link (the last
    class's parameters are pinned at zero) and is a flat vector otherwise.
    The embedded fPCA model carries the alignment anchors needed to process
    new samples.
    """

    link: str
    alpha: float | np.ndarray
    coef: np.ndarray
    fpca: FpcaModel
    n_classes: int | None = None
    converged: bool = True


# --- log-likelihoods with exact gradients ---


def logistic_loglik_grad(theta: np.ndarray, z: np.ndarray, y: np.ndarray):
    """Binary log-likelihood sum(log sigmoid(y * z theta)) and its gradient.

    Labels y are in {-1, +1}.  Computed through logaddexp, so large scores
    do not overflow.
    """
    margins = y * (z @ theta)
    loglik = -float(np.sum(np.logaddexp(0.0, -margins)))
    # sigmoid(-margin), stable for both tails
    slack = np.exp(-np.logaddexp(0.0, margins))
    grad = z.T @ (y * slack)
    return loglik, grad


def multinomial_loglik_grad(theta: np.ndarray, z: np.ndarray, y_onehot: np.ndarray):
    """Multinomial log-likelihood and gradient, last class pinned at zero.

    ``theta`` has shape (m-1, p); ``y_onehot`` has shape (n, m).  Returns
    the scalar log-likelihood and a gradient of theta's shape.
    """
    theta = np.atleast_2d(theta)
    scores = z @ theta.T  # (n, m-1)
    peak = np.maximum(scores.max(axis=1), 0.0)
    lse = peak + np.log(
        np.exp(-peak) + np.sum(np.exp(scores - peak[:, None]), axis=1)
    )
    loglik = float(np.sum(y_onehot[:, :-1] * scores) - np.sum(lse))
    probs = np.exp(scores - lse[:, None])
    grad = (y_onehot[:, :-1] - probs).T @ z
    return loglik, grad


# --- limited-memory quasi-Newton ascent ---


@dataclass(frozen=True)
class QuasiNewtonResult:
    theta: np.ndarray
    value: float
    grad_norm: float
    n_iterations: int
    converged: bool
    history: tuple = ()


def quasi_newton_maximize(
    value_and_grad,
    theta0,
    memory: int = 10,
    grad_tol: float = 1e-6,
    max_iter: int = 500,
):
    """Maximize a concave objective with L-BFGS and Armijo backtracking.

    ``value_and_grad(theta)`` must return the objective and its exact
    gradient.  Accepted steps never decrease the objective.  On line-search
    failure the best iterate so far is returned with ``converged=False``.
    """
    theta = np.asarray(theta0, dtype=float).copy()
    value, grad = value_and_grad(theta)
    history = [value]
    s_hist: list = []
    y_hist: list = []

    def descent_direction(g):
        # two-loop recursion on the negated objective's gradient
        d = g.copy()
        alphas = []
        for s, y, rho in reversed(list(zip(s_hist, y_hist, _rhos()))):
            a = rho * (s @ d)
            alphas.append(a)
            d -= a * y
        if s_hist:
            s, y = s_hist[-1], y_hist[-1]
            d *= (s @ y) / (y @ y)
        for (s, y, rho), a in zip(zip(s_hist, y_hist, _rhos()), reversed(alphas)):
            b = rho * (y @ d)
            d += (a - b) * s
        return d

    def _rhos():
        return [1.0 / (s @ y) for s, y in zip(s_hist, y_hist)]

    n_iter = 0
    converged = float(np.linalg.norm(grad)) < grad_tol
    while not converged and n_iter < max_iter:
        n_iter += 1
        direction = descent_direction(grad)
        ascent = grad @ direction
        if ascent <= 0.0:  # memory misled us; fall back to steepest ascent
            direction = grad
            ascent = grad @ grad
        step = 1.0
        accepted = False
        for _ in range(40):
            candidate = theta + step * direction
            cand_value, cand_grad = value_and_grad(candidate)
            if cand_value >= value + 1e-4 * step * ascent:
                accepted = True
                break
            # maximizer of the quadratic through (0, value, ascent) and
            # (step, cand_value); exact for quadratic sections
            gap = value + step * ascent - cand_value
            trial = 0.5 * ascent * step * step / gap if gap > 0 else 0.5 * step
            step = min(max(trial, 0.1 * step), 0.9 * step)
        if not accepted:
            return QuasiNewtonResult(
                theta, value, float(np.linalg.norm(grad)), n_iter, False, tuple(history)
            )
        s = step * direction
        y = grad - cand_grad  # curvature pair for the negated objective
        if (s @ y) > 1e-10 * np.linalg.norm(s) * np.linalg.norm(y):
            s_hist.append(s)
            y_hist.append(y)
            if len(s_hist) > memory:
                s_hist.pop(0)
                y_hist.pop(0)
        theta, value, grad = candidate, cand_value, cand_grad
        history.append(value)
        converged = float(np.linalg.norm(grad)) < grad_tol
    return QuasiNewtonResult(
        theta, value, float(np.linalg.norm(grad)), n_iter, converged, tuple(history)
    )


# --- fitting ---


def _fit_features(functions, kind, n_components, phase_weight, aligned):
    if kind == "standard":
        model = standard_fpca(functions, n_components)
        return project(model, functions), model
    if aligned is None:
        aligned = align_set(functions)
    if kind == "vertical":
        model = vertical_fpca(aligned, n_components)
    elif kind == "horizontal":
        model = horizontal_fpca(aligned, n_components)
    elif kind == "combined":
        model = combined_fpca(aligned, n_components, phase_weight)
    else:
        raise ParameterError(f"unknown fPCA kind {kind!r}")
    return project(model, aligned), model


def fit_linear(
    data: TrainingData,
    kind: str = "combined",
    n_components: int = 5,
    phase_weight: float | None = None,
    aligned: AlignedSet | None = None,
) -> RegressionModel:
    """Least-squares fit of responses on principal coefficients.

    ``aligned`` may pass a precomputed alignment of ``data.functions`` to
    avoid repeating the expensive groupwise alignment.
    """
    y = np.asarray(data.responses, dtype=float)
    n = len(data)
    if n < n_components + 2:
        raise ParameterError(f"need at least n_components + 2 = {n_components + 2} samples")
    theta, model = _fit_features(data.functions, kind, n_components, phase_weight, aligned)
    z = np.column_stack([np.ones(n), theta])
    beta, _, rank, _ = np.linalg.lstsq(z, y, rcond=None)
    if rank < z.shape[1]:
        raise RankDeficiencyError(
            f"design matrix is rank deficient at {n_components} components "
            f"(rank {rank} < {z.shape[1]})"
        )
    return RegressionModel(link="linear", alpha=float(beta[0]), coef=beta[1:], fpca=model)


def fit_logistic(
    data: TrainingData,
    kind: str = "combined",
    n_components: int = 5,
    phase_weight: float | None = None,
    aligned: AlignedSet | None = None,
    grad_tol: float = 1e-6,
    max_iter: int = 500,
) -> RegressionModel:
    """Maximum-likelihood logistic fit; labels must be -1/+1 with both present."""
    y = np.asarray(data.responses, dtype=float)
    classes = set(np.unique(y).tolist())
    if not classes <= {-1.0, 1.0}:
        raise DegenerateLabelsError(f"logistic labels must be -1/+1, got {sorted(classes)}")
    if len(classes) < 2:
        raise DegenerateLabelsError("logistic fit needs both classes present")
    theta_mat, model = _fit_features(data.functions, kind, n_components, phase_weight, aligned)
    z = np.column_stack([np.ones(len(data)), theta_mat])
    result = quasi_newton_maximize(
        lambda th: logistic_loglik_grad(th, z, y),
        np.zeros(z.shape[1]),
        grad_tol=grad_tol,
        max_iter=max_iter,
    )
    return RegressionModel(
        link="logistic",
        alpha=float(result.theta[0]),
        coef=result.theta[1:],
        fpca=model,
        converged=result.converged,
    )


def fit_multinomial(
    data: TrainingData,
    kind: str = "combined",
    n_components: int = 5,
    phase_weight: float | None = None,
    aligned: AlignedSet | None = None,
    grad_tol: float = 1e-6,
    max_iter: int = 500,
) -> RegressionModel:
    """Maximum-likelihood multinomial fit; labels 1..m, every class present."""
    y = np.asarray(data.responses)
    labels = np.unique(y)
    m = int(labels.max()) if labels.size else 0
    if m < 2 or not np.array_equal(labels, np.arange(1, m + 1)):
        raise DegenerateLabelsError(
            f"multinomial labels must cover 1..m, got {labels.tolist()}"
        )
    y_onehot = np.zeros((len(data), m))
    y_onehot[np.arange(len(data)), y.astype(int) - 1] = 1.0
    theta_mat, model = _fit_features(data.functions, kind, n_components, phase_weight, aligned)
    z = np.column_stack([np.ones(len(data)), theta_mat])
    p = z.shape[1]

    def objective(flat):
        value, grad = multinomial_loglik_grad(flat.reshape(m - 1, p), z, y_onehot)
        return value, grad.ravel()

    result = quasi_newton_maximize(
        objective, np.zeros((m - 1) * p), grad_tol=grad_tol, max_iter=max_iter
    )
    stack = result.theta.reshape(m - 1, p)
    return RegressionModel(
        link="multinomial",
        alpha=stack[:, 0].copy(),
        coef=stack[:, 1:].copy(),
        fpca=model,
        n_classes=m,
        converged=result.converged,
    )


# --- prediction ---


def align_to_anchors(mean_srsf: Srsf, psi_mean: PsiFunction, f: SampledFunction):
    """Align one new sample to stored training anchors.

    Returns its aligned SRSF and the shooting vector of its warp at the
    training mean psi.  Shared by every elastic model fitted on the same
    alignment, so cross-validation can do this once per held-out sample.
    """
    if not same_grid(f.t, mean_srsf.t):
        f = resample(f, mean_srsf.t)
    q = to_srsf(f)
    gamma = optimal_warp(mean_srsf, q)
    q_aligned = warp_srsf(q, gamma)
    v = inv_exp_map(psi_mean, to_psi(gamma))
    return q_aligned, v


def row_from_pieces(model: FpcaModel, q_aligned: Srsf, v) -> np.ndarray:
    """Representation row of an aligned held-out sample for ``model.kind``."""
    if model.kind == "vertical":
        return np.concatenate([q_aligned.values, [q_aligned.f0]])
    if model.kind == "horizontal":
        return v.values.copy()
    if model.kind == "combined":
        return np.concatenate([q_aligned.values, model.phase_weight * v.values])
    raise ParameterError("standard models take raw sample values, not aligned pieces")


def heldout_row(model: FpcaModel, f: SampledFunction) -> np.ndarray:
    """Representation row for a new sample, using stored training anchors only."""
    if not same_grid(f.t, model.t):
        f = resample(f, model.t)
    if model.kind == "standard":
        return f.values.copy()
    mean_srsf = Srsf(model.t, model.mean_srsf, f0=model.f0_mean)
    psi_mean = PsiFunction(model.t, model.psi_mean)
    q_aligned, v = align_to_anchors(mean_srsf, psi_mean, f)
    return row_from_pieces(model, q_aligned, v)


def apply_link(model: RegressionModel, coeffs: np.ndarray):
    """Turn principal coefficients into the link's prediction."""
    if model.link == "linear":
        return float(model.alpha + coeffs @ model.coef)
    if model.link == "logistic":
        score = model.alpha + coeffs @ model.coef
        return float(np.exp(-np.logaddexp(0.0, -score)))
    scores = np.concatenate([model.alpha + model.coef @ coeffs, [0.0]])
    scores -= scores.max()
    weights = np.exp(scores)
    return weights / weights.sum()


def predict(model: RegressionModel, f: SampledFunction):
    """Response prediction for one new function.

    Returns a real (linear), the probability of class +1 (logistic), or a
    length-m probability vector (multinomial).
    """
    coeffs = project(model.fpca, heldout_row(model.fpca, f)[None, :])[0]
    return apply_link(model, coeffs)


def predict_class(model: RegressionModel, f: SampledFunction) -> int:
    """Hard label: sign at probability 1/2 (logistic; ties to -1) or argmax
    (multinomial; ties to the lower class index)."""
    if model.link == "logistic":
        return 1 if predict(model, f) > 0.5 else -1
    if model.link == "multinomial":
        return int(np.argmax(predict(model, f))) + 1
    raise ParameterError("predict_class requires a classification link")


# --- serialization ---


def regression_to_dict(model: RegressionModel) -> dict:
    return {
        "schema": "elastic-fpcr-regression-v1",
        "link": model.link,
        "alpha": model.alpha if np.isscalar(model.alpha) else np.asarray(model.alpha).tolist(),
        "coef": np.asarray(model.coef).tolist(),
        "n_classes": model.n_classes,
        "converged": bool(model.converged),
        "fpca": model_to_dict(model.fpca),
    }


def regression_from_dict(payload: dict) -> RegressionModel:
    if payload.get("schema") != "elastic-fpcr-regression-v1":
        raise ParameterError(f"unrecognized model schema: {payload.get('schema')!r}")
    alpha = payload["alpha"]
    if isinstance(alpha, list):
        alpha = np.asarray(alpha, dtype=float)
    return RegressionModel(
        link=payload["link"],
        alpha=alpha,
        coef=np.asarray(payload["coef"], dtype=float),
        fpca=model_from_dict(payload["fpca"]),
        n_classes=payload["n_classes"],
        converged=payload["converged"],
    )


def save_regression_model(model: RegressionModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(regression_to_dict(model), fh)


def load_regression_model(path) -> RegressionModel:
    with open(path, encoding="utf-8") as fh:
        return regression_from_dict(json.load(fh))
