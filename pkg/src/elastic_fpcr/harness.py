"""Dataset I/O, k-fold cross-validation, and report emission.

Two text formats are supported:

* ``ucr``       - one sample per line: class label, then T values on an
                  implicit uniform [0, 1] grid (comma or whitespace
                  separated).
* ``delimited`` - a header line with the T grid times, then one line per
                  sample: response first, followed by T values.

Cross-validation refits everything (alignment included) on each training
split; held-out samples only ever meet the fitted model.  Metrics follow
the two evaluation conventions: sum of squared errors per fold for the
linear link, fraction classified correctly for the others.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .alignment import align_set
from .errors import ParameterError, ParseError, StratificationError
from .numerics import SampledFunction, uniform_grid, validate_grid
from .fpca import project
from .regression import (
    TrainingData,
    align_to_anchors,
    apply_link,
    fit_linear,
    fit_logistic,
    fit_multinomial,
    row_from_pieces,
)
from .simulation import scenario_spec, generate

METHODS = ("elastic_combined", "elastic_vertical", "elastic_horizontal", "standard")
_METHOD_KIND = {
    "elastic_combined": "combined",
    "elastic_vertical": "vertical",
    "elastic_horizontal": "horizontal",
    "standard": "standard",
}
RESPONSE_KINDS = ("linear", "binary", "multiclass")


@dataclass(frozen=True)
class Dataset:
    """Function samples as a matrix plus responses, ready for the harness."""

    t: np.ndarray
    functions: np.ndarray
    responses: np.ndarray
    response_kind: str
    name: str = ""

    def __post_init__(self):
        t = validate_grid(self.t)
        fm = np.atleast_2d(np.asarray(self.functions, dtype=float))
        resp = np.asarray(self.responses)
        if fm.shape[1] != t.size:
            raise ParameterError("function matrix width must match grid length")
        if fm.shape[0] != resp.shape[0]:
            raise ParameterError("one response per function row required")
        if self.response_kind not in RESPONSE_KINDS:
            raise ParameterError(f"response_kind must be one of {RESPONSE_KINDS}")
        if self.response_kind == "binary":
            if not set(np.unique(resp).tolist()) <= {-1, 1}:
                raise ParameterError("binary responses must be -1/+1")
        elif self.response_kind == "multiclass":
            uniq = np.unique(resp)
            if uniq.size and not np.all(np.isin(uniq, np.arange(1, int(uniq.max()) + 1))):
                raise ParameterError("multiclass responses must be labels in 1..m")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "functions", fm)
        object.__setattr__(self, "responses", resp)

    def __len__(self) -> int:
        return self.functions.shape[0]

    def function(self, i: int) -> SampledFunction:
        return SampledFunction(self.t, self.functions[i])

    def function_list(self, idx=None) -> list:
        rows = range(len(self)) if idx is None else idx
        return [self.function(int(i)) for i in rows]


def dataset_from_training(td: TrainingData, response_kind: str, name: str = "") -> Dataset:
    return Dataset(
        t=td.functions[0].t,
        functions=np.vstack([f.values for f in td.functions]),
        responses=td.responses,
        response_kind=response_kind,
        name=name,
    )


_LINK_OF_KIND = {"linear": "linear", "binary": "logistic", "multiclass": "multinomial"}


def link_for(dataset: Dataset) -> str:
    return _LINK_OF_KIND[dataset.response_kind]


# --- file I/O ---


def _parse_cell(token: str, row: int, col: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"row {row}, column {col}: non-numeric cell {token!r}") from None
    if not np.isfinite(value):
        raise ParseError(f"row {row}, column {col}: non-finite cell {token!r}")
    return value


def _parse_rows(text: str):
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        tokens = line.replace(",", " ").split()
        rows.append((lineno, [_parse_cell(tok, lineno, c + 1) for c, tok in enumerate(tokens)]))
    if not rows:
        raise ParseError("empty dataset file")
    return rows


def _classify_responses(values: np.ndarray, n_rows: int):
    """Infer (kind, mapped responses) from a raw response column."""
    uniq = np.unique(values)
    integral = np.allclose(values, np.round(values), atol=1e-9)
    if integral and uniq.size == 2:
        low, high = uniq
        return "binary", np.where(values == high, 1, -1).astype(int)
    if integral and 3 <= uniq.size <= min(20, n_rows - 1):
        mapping = {v: i + 1 for i, v in enumerate(uniq)}
        return "multiclass", np.array([mapping[v] for v in values], dtype=int)
    return "linear", values.astype(float)


def load_dataset(path, fmt: str = "ucr", response_kind: str | None = None) -> Dataset:
    """Read a dataset file; see the module docstring for the two formats.

    ``response_kind`` overrides inference (binary labels map low -> -1,
    high -> +1; multiclass labels map to 1..m by sorted value).
    """
    path = Path(path)
    rows = _parse_rows(path.read_text(encoding="utf-8"))
    if fmt not in ("ucr", "delimited"):
        raise ParameterError(f"format must be 'ucr' or 'delimited', got {fmt!r}")

    if fmt == "delimited":
        header_line, header = rows[0]
        data_rows = rows[1:]
        if not data_rows:
            raise ParseError("delimited file has a header but no sample rows")
        t = np.asarray(header, dtype=float)
        expected = t.size + 1
    else:
        data_rows = rows
        expected = len(rows[0][1])
        if expected < 4:
            raise ParseError("ucr rows need a label plus at least 3 values")
        t = uniform_grid(expected - 1)

    raw_resp = []
    func_rows = []
    for lineno, row in data_rows:
        if len(row) != expected:
            raise ParseError(f"row {lineno}: expected {expected} fields, got {len(row)}")
        raw_resp.append(row[0])
        func_rows.append(row[1:])
    raw_resp = np.asarray(raw_resp, dtype=float)

    if response_kind is None:
        kind, responses = _classify_responses(raw_resp, len(data_rows))
    elif response_kind == "linear":
        kind, responses = "linear", raw_resp
    else:
        kind, responses = _classify_responses(raw_resp, len(data_rows))
        if kind != response_kind:
            raise ParseError(f"responses do not form {response_kind} labels")
    return Dataset(t=t, functions=np.asarray(func_rows), responses=responses,
                   response_kind=kind, name=path.stem)


def save_dataset(dataset: Dataset, path, fmt: str = "ucr") -> None:
    """Write a dataset in either text format; floats round-trip exactly."""
    lines = []
    if fmt == "delimited":
        lines.append(",".join(repr(float(x)) for x in dataset.t))
    elif fmt != "ucr":
        raise ParameterError(f"format must be 'ucr' or 'delimited', got {fmt!r}")
    for resp, row in zip(dataset.responses, dataset.functions):
        cells = [repr(float(resp))] + [repr(float(x)) for x in row]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# --- cross-validation ---


@dataclass(frozen=True)
class CvReport:
    """Per-fold metric values for one method, with their mean and sd."""

    method: str
    metric: str
    metric_mean: float
    metric_sd: float
    folds: np.ndarray
    n_components: int
    seed: int
    label: str = ""

    def __post_init__(self):
        folds = np.asarray(self.folds, dtype=float)
        object.__setattr__(self, "folds", folds)
        if abs(self.metric_mean - folds.mean()) > 1e-12:
            raise ParameterError("metric_mean must equal the mean of the folds")


def _make_report(method, metric, folds, n_components, seed, label) -> CvReport:
    folds = np.asarray(folds, dtype=float)
    return CvReport(
        method=method,
        metric=metric,
        metric_mean=float(folds.mean()),
        metric_sd=float(folds.std(ddof=1)) if folds.size > 1 else 0.0,
        folds=folds,
        n_components=n_components,
        seed=seed,
        label=label,
    )


def make_folds(n: int, k: int, seed: int, labels=None):
    """Disjoint test folds covering range(n), sizes within one of each other.

    With ``labels`` the assignment is stratified per class; folds whose
    training split misses a class, or whose test part is single-class,
    raise StratificationError.
    """
    if not 2 <= k <= n:
        raise ParameterError(f"fold count must be in [2, n] = [2, {n}], got {k}")
    rng = np.random.default_rng(seed)
    assignment = np.empty(n, dtype=int)
    if labels is None:
        perm = rng.permutation(n)
        for fold, chunk in enumerate(np.array_split(perm, k)):
            assignment[chunk] = fold
    else:
        labels = np.asarray(labels)
        cursor = 0  # round-robin pointer shared across classes keeps sizes even
        for value in np.unique(labels):
            members = rng.permutation(np.nonzero(labels == value)[0])
            for idx in members:
                assignment[idx] = cursor % k
                cursor += 1
        for fold in range(k):
            test_classes = np.unique(labels[assignment == fold])
            train_classes = np.unique(labels[assignment != fold])
            if test_classes.size < 2:
                raise StratificationError(f"fold {fold} holds a single class")
            if train_classes.size < np.unique(labels).size:
                raise StratificationError(f"training split of fold {fold} misses a class")
    return [np.nonzero(assignment == fold)[0] for fold in range(k)]


_FITTERS = {"linear": fit_linear, "logistic": fit_logistic, "multinomial": fit_multinomial}


def cross_validate(
    dataset: Dataset,
    methods,
    link: str,
    k: int = 5,
    n_components: int = 5,
    seed: int = 0,
    phase_weight: float | None = None,
):
    """k-fold cross-validation of several methods on one dataset.

    The groupwise alignment of each training split is shared by all the
    elastic methods in ``methods``; the standard method never sees it.
    Returns one CvReport per method, in the order given.
    """
    methods = list(methods)
    for m in methods:
        if m not in _METHOD_KIND:
            raise ParameterError(f"unknown method {m!r}; choose from {METHODS}")
    if link not in _FITTERS:
        raise ParameterError(f"link must be one of {tuple(_FITTERS)}")
    n = len(dataset)
    labels = dataset.responses if link in ("logistic", "multinomial") else None
    folds = make_folds(n, k, seed, labels)

    per_method = {m: [] for m in methods}
    all_idx = np.arange(n)
    for test_idx in folds:
        train_idx = np.setdiff1d(all_idx, test_idx)
        train = TrainingData(dataset.function_list(train_idx), dataset.responses[train_idx])
        test_functions = dataset.function_list(test_idx)
        test_responses = dataset.responses[test_idx]

        aligned = None
        pieces = None
        if any(m != "standard" for m in methods):
            aligned = align_set(train.functions)
            # held-out samples meet the training anchors once, not per method
            pieces = [
                align_to_anchors(aligned.mean_srsf, aligned.psi_mean, f)
                for f in test_functions
            ]

        for m in methods:
            kind = _METHOD_KIND[m]
            model = _FITTERS[link](
                train,
                kind=kind,
                n_components=n_components,
                phase_weight=phase_weight,
                aligned=aligned if kind != "standard" else None,
            )
            if kind == "standard":
                rows = np.vstack([f.values for f in test_functions])
            else:
                rows = np.vstack([row_from_pieces(model.fpca, qa, v) for qa, v in pieces])
            coeff_rows = project(model.fpca, rows)
            preds = [apply_link(model, c) for c in coeff_rows]
            if link == "linear":
                score = float(np.sum((test_responses - np.asarray(preds)) ** 2))
            elif link == "logistic":
                hard = [1 if p > 0.5 else -1 for p in preds]
                score = float(np.mean(np.asarray(hard) == test_responses))
            else:
                hard = [int(np.argmax(p)) + 1 for p in preds]
                score = float(np.mean(np.asarray(hard) == test_responses))
            per_method[m].append(score)

    metric = "sse" if link == "linear" else "pc"
    return [
        _make_report(m, metric, per_method[m], n_components, seed, dataset.name)
        for m in methods
    ]


def kfold_cv(
    dataset: Dataset,
    method: str,
    link: str,
    k: int = 5,
    n_components: int = 5,
    seed: int = 0,
    phase_weight: float | None = None,
) -> CvReport:
    """Cross-validate a single method; see :func:`cross_validate`."""
    return cross_validate(dataset, [method], link, k, n_components, seed, phase_weight)[0]


def simulation_study(
    target: str,
    scenarios=("combined", "vertical", "horizontal"),
    seeds=range(10),
    methods=METHODS,
    k: int = 5,
    n_components: int = 5,
    **scenario_overrides,
):
    """Cross-validated metrics for simulated scenarios over several seeds.

    Returns a list of CvReports; each carries its scenario in ``label``
    and its seed, so callers can aggregate orderings across seeds.
    """
    reports = []
    for scenario in scenarios:
        for seed in seeds:
            spec = scenario_spec(scenario, target, seed=seed, **scenario_overrides)
            data, _ = generate(spec)
            dataset = dataset_from_training(
                data,
                response_kind={"linear": "linear", "logistic": "binary", "multinomial": "multiclass"}[target],
                name=scenario,
            )
            reports.extend(
                cross_validate(dataset, methods, target, k, n_components, seed=seed)
            )
    return reports


# --- report emission ---


def report_to_dict(report: CvReport) -> dict:
    return {
        "method": report.method,
        "metric": report.metric,
        "metric_mean": report.metric_mean,
        "metric_sd": report.metric_sd,
        "folds": report.folds.tolist(),
        "n_components": report.n_components,
        "seed": report.seed,
        "label": report.label,
    }


def report_from_dict(payload: dict) -> CvReport:
    return CvReport(
        method=payload["method"],
        metric=payload["metric"],
        metric_mean=payload["metric_mean"],
        metric_sd=payload["metric_sd"],
        folds=np.asarray(payload["folds"], dtype=float),
        n_components=payload["n_components"],
        seed=payload["seed"],
        label=payload.get("label", ""),
    )


def emit_report(reports, path) -> None:
    """Write a method-by-row comparison table plus a JSON sidecar.

    Rows group reports sharing a label (insertion order); the best method
    per row (lowest sse / highest pc) is named in the final column, with
    ties listing every tied method.
    """
    reports = list(reports)
    if not reports:
        raise ParameterError("no reports to emit")
    labels = []
    for r in reports:
        if r.label not in labels:
            labels.append(r.label)
    methods = []
    for r in reports:
        if r.method not in methods:
            methods.append(r.method)

    lines = [",".join(["label"] + methods + ["best"])]
    for label in labels:
        group = {r.method: r for r in reports if r.label == label}
        metrics = {r.metric for r in group.values()}
        if len(metrics) > 1:
            raise ParameterError(f"mixed metrics in row {label!r}: {sorted(metrics)}")
        cells = []
        for m in methods:
            r = group.get(m)
            cells.append(f"{r.metric_mean:.4f} ({r.metric_sd:.4f})" if r else "")
        present = [r for r in group.values()]
        pick = min if metrics == {"sse"} else max
        target = pick(r.metric_mean for r in present)
        best = [m for m in methods if m in group and group[m].metric_mean == target]
        lines.append(",".join([label] + cells + [";".join(best)]))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    sidecar = path.with_suffix(path.suffix + ".json")
    sidecar.write_text(
        json.dumps([report_to_dict(r) for r in reports], indent=1), encoding="utf-8"
    )


def emit_alignment_plotdata(aligned, path_prefix, originals=None) -> None:
    """Write three delimited files: original, aligned, and warp curves.

    Each file has a ``t`` column followed by one column per sample.  When
    the original functions are not supplied they are reconstructed by
    composing the aligned functions with the inverse warps.
    """
    from .warp_geometry import apply_warp, invert_warp

    t = aligned.mean_srsf.t
    if originals is None:
        originals = [
            apply_warp(f, invert_warp(g))
            for f, g in zip(aligned.aligned_functions, aligned.warps)
        ]
    blocks = {
        "original": np.column_stack([f.values for f in originals]),
        "aligned": np.column_stack([f.values for f in aligned.aligned_functions]),
        "warps": np.column_stack([g.values for g in aligned.warps]),
    }
    prefix = Path(path_prefix)
    for name, mat in blocks.items():
        header = ",".join(["t"] + [f"f{i + 1}" for i in range(mat.shape[1])])
        lines = [header]
        for ti, row in zip(t, mat):
            lines.append(",".join([repr(float(ti))] + [repr(float(x)) for x in row]))
        target = prefix.parent / f"{prefix.name}_{name}.csv"
        target.write_text("\n".join(lines) + "\n", encoding="utf-8")
