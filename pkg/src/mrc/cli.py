"""Command-line interface: ``mrc train | predict | eval-cv | bounds-curve``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 solver error.
"""

from __future__ import annotations

import argparse
import csv
import sys
import warnings

from .data import SingleClassWarning, load_csv, load_instances
from .errors import (
    BoundChainViolation,
    DataError,
    DegenerateData,
    NumericalBreakdown,
    TooFewSamples,
    TooManyLabels,
    UncertaintySetEmpty,
)
from .evaluation import bounds_curve, evaluate_cv
from .learn import TrainConfig, train
from .persist import format_cv_report, load_model, save_model, write_curve, write_cv_report
from .predict import DETERMINISTIC, SAMPLED, predict_proba_batch, choose_labels

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_SOLVER = 0, 1, 2, 3

DATA_ERRORS = (DataError, DegenerateData, TooFewSamples, TooManyLabels, OSError)
SOLVER_ERRORS = (NumericalBreakdown, UncertaintySetEmpty, BoundChainViolation)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return sizes


def _add_data_args(p: argparse.ArgumentParser, required_label: bool = True):
    p.add_argument("--data", required=True, help="CSV file with a header row")
    p.add_argument("--label-col", default="-1" if required_label else None,
                   help="label column name or 0-based index (default: last column)")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--drop-missing", action="store_true", help="skip rows with missing cells")


def _add_learning_args(p: argparse.ArgumentParser):
    widths = p.add_mutually_exclusive_group()
    widths.add_argument("--lambda", dest="lam", type=float, default=None,
                        help="uniform interval width (default 0.25)")
    widths.add_argument("--delta", type=float, default=None,
                        help="confidence level for Hoeffding-type widths instead of --lambda")
    p.add_argument("--mode", choices=["interval", "point"], default="interval")
    p.add_argument("--max-thresholds", type=int, default=None,
                   help="threshold budget (default floor(200/|Y|))")


def _add_prediction_args(p: argparse.ArgumentParser):
    p.add_argument("--deterministic", action="store_true", help="argmax labels instead of sampled ones")
    p.add_argument("--seed", type=int, default=0)


def _train_config(args, lower_bound: bool) -> TrainConfig:
    if args.lam is not None and args.lam < 0:
        raise UsageError("--lambda must be non-negative")
    if args.delta is not None and not 0 < args.delta < 1:
        raise UsageError("--delta must lie in (0, 1)")
    if args.max_thresholds is not None and args.max_thresholds < 1:
        raise UsageError("--max-thresholds must be at least 1")
    return TrainConfig(mode=args.mode, lam=0.25 if args.lam is None else args.lam, delta=args.delta,
                       max_thresholds=args.max_thresholds, lower_bound=lower_bound)


def _load(args):
    return load_csv(args.data, args.label_col, args.delimiter, args.drop_missing)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mrc", description="Minimax risk classifiers with learning-time risk bounds.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="fit on a CSV file and write a model file")
    _add_data_args(p)
    _add_learning_args(p)
    p.add_argument("--lower-bound", action="store_true", help="also solve the lower-bound LP")
    p.add_argument("--out", required=True, help="model file to write")

    p = sub.add_parser("predict", help="label the rows of a CSV file")
    p.add_argument("--model", required=True)
    _add_data_args(p, required_label=False)
    _add_prediction_args(p)
    p.add_argument("--out", default=None, help="CSV to write (default: stdout)")

    p = sub.add_parser("eval-cv", help="stratified k-fold error plus full-data bounds")
    _add_data_args(p)
    _add_learning_args(p)
    _add_prediction_args(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--out", default=None, help="also write the report as CSV")

    p = sub.add_parser("bounds-curve", help="bounds and held-out error versus training size")
    _add_data_args(p)
    _add_learning_args(p)
    _add_prediction_args(p)
    p.add_argument("--sizes", type=_sizes, required=True, help="comma-separated training sizes")
    p.add_argument("--out", required=True, help="CSV with columns n,lower,upper,test_error")
    return parser


def _cmd_train(args) -> int:
    data = _load(args)
    model = train(data, _train_config(args, args.lower_bound))
    save_model(model, args.out)
    print(f"upper_bound {model.upper_bound:.17g}")
    if model.lower_bound is not None:
        print(f"lower_bound {model.lower_bound:.17g}")
    return EXIT_OK


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    X = load_instances(args.data, args.delimiter, args.label_col)
    if X.shape[0] and model.feature_map.k:
        needed = max(t.dimension for t in model.feature_map.thresholds) + 1
        if X.shape[1] < needed:
            raise DataError(f"model reads dimension {needed - 1} but the data has {X.shape[1]} columns")
    probs, _ = predict_proba_batch(model, X)
    labels = choose_labels(probs, DETERMINISTIC if args.deterministic else SAMPLED, args.seed)
    names = model.label_names or tuple(str(i) for i in range(model.num_labels))
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["prediction"] + [f"p_{name}" for name in names])
        for lab, p in zip(labels, probs):
            w.writerow([names[lab]] + [format(v, ".17g") for v in p])
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def _cmd_eval_cv(args) -> int:
    if args.folds < 2:
        raise UsageError("--folds must be at least 2")
    data = _load(args)
    report = evaluate_cv(data, _train_config(args, True), args.folds, args.seed, args.deterministic)
    sys.stdout.write(format_cv_report(report))
    if args.out:
        write_cv_report(report, args.out)
    return EXIT_OK


def _cmd_bounds_curve(args) -> int:
    data = _load(args)
    curve = bounds_curve(data, args.sizes, _train_config(args, True), args.seed, args.deterministic)
    write_curve(curve, args.out)
    for row in curve.rows:
        print(f"n={row.n} lower={row.lower:.4f} upper={row.upper:.4f} test_error={row.test_error:.4f}")
    return EXIT_OK


COMMANDS = {
    "train": _cmd_train,
    "predict": _cmd_predict,
    "eval-cv": _cmd_eval_cv,
    "bounds-curve": _cmd_bounds_curve,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        with warnings.catch_warnings():
            warnings.simplefilter("always", SingleClassWarning)
            return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SOLVER_ERRORS as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
