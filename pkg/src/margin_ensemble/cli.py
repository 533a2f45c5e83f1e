"""Command-line interface: ``margin-ensemble <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data or model error,
3 verification failure.
"""

import argparse
import csv
import json
import sys

import numpy as np

from ._validation import InputError
from .data import gen_moons, load_csv, load_features, train_test_split, write_csv
from .evaluation import accuracy, boundary_grid, margin_report
from .forest import import_stack, predict_stack, train_forest
from .loss_grad import HyperParams
from .optimizer import train
from .persistence import ModelFile, load_model, save_model
from .verify import REL_TOL, gradient_check

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _depth(text):
    return None if text.lower() in ("none", "inf", "unlimited") else int(text)


def build_parser():
    p = _Parser(prog="margin-ensemble",
                description="Confidence-matrix ensembles trained by margin maximization.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("train", help="train trees and the confidence matrix")
    t.add_argument("--data", required=True)
    t.add_argument("--label-col", default="last")
    t.add_argument("--trees", type=int, default=10)
    t.add_argument("--max-depth", type=_depth, default=8)
    t.add_argument("--min-leaf", type=int, default=1)
    t.add_argument("--alpha", type=float, default=10.0)
    t.add_argument("--gamma", type=float, default=5.0)
    t.add_argument("--lr", type=float, default=0.1)
    t.add_argument("--batch", type=int, default=64)
    t.add_argument("--epochs", type=int, default=500)
    t.add_argument("--tol", type=float, default=1e-7)
    t.add_argument("--seed", type=int, default=1)
    t.add_argument("--out", required=True)
    t.add_argument("--stack", help="prediction CSV; skips tree training")

    pr = sub.add_parser("predict", help="write fused predictions")
    pr.add_argument("--model", required=True)
    pr.add_argument("--data")
    pr.add_argument("--label-col", default="last")
    pr.add_argument("--stack")
    pr.add_argument("--out", required=True)

    ev = sub.add_parser("eval", help="print accuracy and margin report as JSON")
    ev.add_argument("--model", required=True)
    ev.add_argument("--data", required=True)
    ev.add_argument("--label-col", default="last")
    ev.add_argument("--stack")

    sp = sub.add_parser("split", help="seeded train/test split")
    sp.add_argument("--data", required=True)
    sp.add_argument("--label-col", default="last")
    sp.add_argument("--test-frac", type=float, default=0.2)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--out-train", required=True)
    sp.add_argument("--out-test", required=True)

    mo = sub.add_parser("moons", help="generate the two-moons toy dataset")
    mo.add_argument("--n", type=int, default=2000)
    mo.add_argument("--noise", type=float, default=0.15)
    mo.add_argument("--seed", type=int, default=1)
    mo.add_argument("--out", required=True)

    gc = sub.add_parser("gradcheck", help="compare analytic and numeric gradients")
    gc.add_argument("--c", type=int, default=4)
    gc.add_argument("--k", type=int, default=10)
    gc.add_argument("--trials", type=int, default=200)
    gc.add_argument("--gamma", type=float, default=5.0)
    gc.add_argument("--alpha", type=float, default=10.0)
    gc.add_argument("--seed", type=int, default=0)

    bd = sub.add_parser("boundary", help="export a decision-boundary grid CSV")
    bd.add_argument("--model", required=True)
    bd.add_argument("--xmin", type=float, required=True)
    bd.add_argument("--xmax", type=float, required=True)
    bd.add_argument("--ymin", type=float, required=True)
    bd.add_argument("--ymax", type=float, required=True)
    bd.add_argument("--resolution", type=int, default=200)
    bd.add_argument("--out", required=True)
    return p


def _cmd_train(args):
    ds = load_csv(args.data, label_col=args.label_col)
    hp = HyperParams(alpha=args.alpha, gamma=args.gamma, lr=args.lr, batch=args.batch,
                     epochs=args.epochs, tol=args.tol, seed=args.seed)
    if args.stack:
        forest = None
        stack = import_stack(args.stack, label_dict=ds.label_dict)
        if stack.shape[0] != ds.n:
            raise InputError(f"stack has {stack.shape[0]} rows but data has {ds.n}")
    else:
        forest = train_forest(ds.features, ds.labels, k=args.trees, max_depth=args.max_depth,
                              seed=args.seed, min_leaf=args.min_leaf, n_classes=ds.c)
        stack = predict_stack(forest, ds.features)
    report = train(stack, ds.labels, hp)
    save_model(ModelFile(theta=report.theta, label_dict=ds.label_dict, hyperparams=hp,
                         seed=args.seed, forest=forest), args.out)
    summary = {
        "epochs_run": report.epochs_run,
        "initial_loss": report.initial_loss,
        "final_loss": report.final_loss,
        "converged": report.converged,
        "train_accuracy_pct": margin_report(report.theta, stack, ds.labels, hp).accuracy_pct,
    }
    print(json.dumps(summary))
    return EXIT_OK


def _model_stack(model, args, labels_needed):
    """Prediction stack and encoded labels (or None) for predict/eval."""
    labels = None
    if args.stack:
        stack = import_stack(args.stack, label_dict=model.label_dict)
        if args.data:
            ds = load_csv(args.data, label_col=args.label_col, label_dict=model.label_dict)
            labels = ds.labels
    else:
        if model.forest is None:
            raise InputError("model was trained on an imported stack; pass --stack")
        if not args.data:
            raise InputError("--data is required without --stack")
        X, labels = load_features(args.data, model.forest.feature_count,
                                  label_col=args.label_col, label_dict=model.label_dict)
        stack = predict_stack(model.forest, X)
    if labels_needed and labels is None:
        raise InputError("evaluation data has no label column")
    if labels is not None and labels.shape[0] != stack.shape[0]:
        raise InputError(f"{labels.shape[0]} labels for {stack.shape[0]} stack rows")
    return stack, labels


def _cmd_predict(args):
    model = load_model(args.model)
    stack, _ = _model_stack(model, args, labels_needed=False)
    preds = np.argmax(np.einsum("jl,ilj->ij", model.theta, stack), axis=1)
    classes = sorted(model.label_dict, key=model.label_dict.get)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["pred"])
        for p in preds:
            w.writerow([classes[p]])
    return EXIT_OK


def _cmd_eval(args):
    model = load_model(args.model)
    stack, labels = _model_stack(model, args, labels_needed=True)
    report = margin_report(model.theta, stack, labels, model.hyperparams)
    print(json.dumps(report.to_dict()))
    return EXIT_OK


def _cmd_split(args):
    ds = load_csv(args.data, label_col=args.label_col)
    tr, te = train_test_split(ds, test_frac=args.test_frac, seed=args.seed)
    write_csv(tr, args.out_train)
    write_csv(te, args.out_test)
    print(json.dumps({"train": tr.n, "test": te.n}))
    return EXIT_OK


def _cmd_moons(args):
    ds = gen_moons(args.n, args.noise, args.seed)
    write_csv(ds, args.out)
    return EXIT_OK


def _cmd_gradcheck(args):
    if args.c < 2 or args.k < 1 or args.trials < 1:
        raise UsageError("gradcheck needs --c >= 2, --k >= 1, --trials >= 1")
    worst = gradient_check(trials=args.trials, c=args.c, k=args.k, gammas=(args.gamma,),
                           alpha=args.alpha, seed=args.seed)
    ok = worst <= REL_TOL
    print(json.dumps({"max_relative_error": worst, "tolerance": REL_TOL, "passed": ok}))
    return EXIT_OK if ok else EXIT_VERIFY


def _cmd_boundary(args):
    model = load_model(args.model)
    if model.forest is None:
        raise InputError("boundary export needs a model with trees")
    rows = boundary_grid(model.theta, model.forest, (args.xmin, args.xmax),
                         (args.ymin, args.ymax), args.resolution)
    classes = sorted(model.label_dict, key=model.label_dict.get)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "class"])
        for x, y, cls in rows:
            w.writerow([repr(x), repr(y), classes[cls]])
    return EXIT_OK


COMMANDS = {
    "train": _cmd_train,
    "predict": _cmd_predict,
    "eval": _cmd_eval,
    "split": _cmd_split,
    "moons": _cmd_moons,
    "gradcheck": _cmd_gradcheck,
    "boundary": _cmd_boundary,
}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    except (InputError, OSError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
