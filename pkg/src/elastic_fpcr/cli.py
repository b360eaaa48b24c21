"""Command-line interface: simulate, align, fpca, fit, predict, crossval, report."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .alignment import align_set
from .errors import ParameterError
from .fpca import (
    combined_fpca,
    horizontal_fpca,
    save_fpca_model,
    standard_fpca,
    vertical_fpca,
)
from .harness import (
    METHODS,
    cross_validate,
    dataset_from_training,
    emit_alignment_plotdata,
    emit_report,
    link_for,
    load_dataset,
    report_from_dict,
    save_dataset,
)
from .regression import (
    TrainingData,
    fit_linear,
    fit_logistic,
    fit_multinomial,
    load_regression_model,
    predict,
    save_regression_model,
)
from .simulation import generate, scenario_spec

_KIND_OF_METHOD = {
    "elastic_combined": "combined",
    "elastic_vertical": "vertical",
    "elastic_horizontal": "horizontal",
    "standard": "standard",
}
_RESPONSE_KIND_OF_LINK = {"linear": "linear", "logistic": "binary", "multinomial": "multiclass"}


def _add_format(parser):
    parser.add_argument("--format", choices=("ucr", "delimited"), default="ucr",
                        help="dataset file format")


def _add_method(parser, with_all=False):
    choices = METHODS + (("all",) if with_all else ())
    parser.add_argument("--method", choices=choices,
                        default="all" if with_all else "elastic_combined",
                        help="fPCA flavour backing the model")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elastic-fpcr",
        description="Elastic functional principal component regression toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic scenario dataset")
    p.add_argument("--scenario", choices=("combined", "vertical", "horizontal"),
                   default="combined")
    p.add_argument("--link", choices=("linear", "logistic", "multinomial"),
                   default="linear")
    p.add_argument("--n-per-class", type=int, default=20)
    p.add_argument("--warp-amplitude", type=float, default=0.4)
    p.add_argument("--noise-sd", type=float, default=0.01)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--seed", type=int, default=0)
    _add_format(p)
    p.add_argument("--out", required=True, help="output dataset file")

    p = sub.add_parser("align", help="groupwise alignment; writes plot data files")
    p.add_argument("dataset")
    _add_format(p)
    p.add_argument("--out", required=True, help="output path prefix")

    p = sub.add_parser("fpca", help="fit a functional PCA model")
    p.add_argument("dataset")
    _add_method(p)
    p.add_argument("--components", type=int, default=5)
    p.add_argument("--C", type=float, default=None,
                   help="phase weight for the combined method (default: estimated)")
    _add_format(p)
    p.add_argument("--out", required=True, help="output model file (JSON)")

    p = sub.add_parser("fit", help="fit a regression model")
    p.add_argument("dataset")
    _add_method(p)
    p.add_argument("--link", choices=("linear", "logistic", "multinomial"),
                   default=None, help="default: inferred from the responses")
    p.add_argument("--components", type=int, default=5)
    p.add_argument("--C", type=float, default=None)
    _add_format(p)
    p.add_argument("--out", required=True, help="output model file (JSON)")

    p = sub.add_parser("predict", help="predict responses for a dataset")
    p.add_argument("dataset")
    p.add_argument("--model", required=True, help="fitted regression model (JSON)")
    _add_format(p)
    p.add_argument("--out", required=True, help="output predictions CSV")

    p = sub.add_parser("crossval", help="k-fold cross-validation report")
    p.add_argument("dataset")
    _add_method(p, with_all=True)
    p.add_argument("--link", choices=("linear", "logistic", "multinomial"), default=None)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--components", type=int, default=5)
    p.add_argument("--C", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    _add_format(p)
    p.add_argument("--out", required=True, help="output report CSV (JSON sidecar added)")

    p = sub.add_parser("report", help="merge crossval JSON sidecars into one table")
    p.add_argument("inputs", nargs="+", help="JSON sidecar files from crossval runs")
    p.add_argument("--out", required=True)
    return parser


def _load(args):
    # an explicit --link pins how the response column is read
    link = getattr(args, "link", None)
    kind = _RESPONSE_KIND_OF_LINK.get(link) if link else None
    return load_dataset(args.dataset, fmt=args.format, response_kind=kind)


def _training(dataset) -> TrainingData:
    return TrainingData(dataset.function_list(), dataset.responses)


def _cmd_simulate(args) -> None:
    spec = scenario_spec(
        args.scenario,
        args.link,
        seed=args.seed,
        n_per_class=args.n_per_class,
        warp_amplitude=args.warp_amplitude,
        noise_sd=args.noise_sd,
        n_points=args.points,
    )
    data, _ = generate(spec)
    dataset = dataset_from_training(
        data, _RESPONSE_KIND_OF_LINK[args.link], name=args.scenario
    )
    save_dataset(dataset, args.out, fmt=args.format)
    print(f"wrote {len(dataset)} samples to {args.out}")


def _cmd_align(args) -> None:
    dataset = _load(args)
    aligned = align_set(dataset.function_list())
    emit_alignment_plotdata(aligned, args.out, originals=dataset.function_list())
    print(f"wrote {args.out}_original.csv, _aligned.csv, _warps.csv")


def _cmd_fpca(args) -> None:
    dataset = _load(args)
    kind = _KIND_OF_METHOD[args.method]
    functions = dataset.function_list()
    if kind == "standard":
        model = standard_fpca(functions, args.components)
    else:
        aligned = align_set(functions)
        if kind == "vertical":
            model = vertical_fpca(aligned, args.components)
        elif kind == "horizontal":
            model = horizontal_fpca(aligned, args.components)
        else:
            model = combined_fpca(aligned, args.components, args.C)
    save_fpca_model(model, args.out)
    print(f"wrote {kind} fPCA model ({args.components} components) to {args.out}")


def _cmd_fit(args) -> None:
    dataset = _load(args)
    link = args.link or link_for(dataset)
    fitters = {"linear": fit_linear, "logistic": fit_logistic, "multinomial": fit_multinomial}
    model = fitters[link](
        _training(dataset),
        kind=_KIND_OF_METHOD[args.method],
        n_components=args.components,
        phase_weight=args.C,
    )
    save_regression_model(model, args.out)
    print(f"wrote {link} model ({args.method}) to {args.out}")


def _cmd_predict(args) -> None:
    dataset = _load(args)
    model = load_regression_model(args.model)
    lines = []
    for f in dataset.function_list():
        value = predict(model, f)
        if isinstance(value, np.ndarray):
            lines.append(",".join(repr(float(v)) for v in value))
        else:
            lines.append(repr(float(value)))
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} predictions to {args.out}")


def _cmd_crossval(args) -> None:
    dataset = _load(args)
    link = args.link or link_for(dataset)
    methods = list(METHODS) if args.method == "all" else [args.method]
    reports = cross_validate(
        dataset,
        methods,
        link,
        k=args.folds,
        n_components=args.components,
        seed=args.seed,
        phase_weight=args.C,
    )
    emit_report(reports, args.out)
    print(f"wrote report for {len(methods)} method(s) to {args.out}")


def _cmd_report(args) -> None:
    reports = []
    for name in args.inputs:
        payload = json.loads(Path(name).read_text(encoding="utf-8"))
        reports.extend(report_from_dict(item) for item in payload)
    emit_report(reports, args.out)
    print(f"merged {len(reports)} reports into {args.out}")


_COMMANDS = {
    "simulate": _cmd_simulate,
    "align": _cmd_align,
    "fpca": _cmd_fpca,
    "fit": _cmd_fit,
    "predict": _cmd_predict,
    "crossval": _cmd_crossval,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except Exception as exc:  # surface a clean diagnostic, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
