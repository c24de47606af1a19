"""Command-line interface.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""
import argparse
import csv
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import data as data_mod
from .experiments import (
    N_PARAMS, Protocol, SeedTriple, aggregate, read_records_csv, run_sweep, train_dense,
    train_sparse, write_records_csv, write_summary_csv,
)
from .objectives import OneLayerClassifier, parameter_names
from .optim import write_trace_csv
from .plotting import emit_plots
from .rss import derive_learning_rate, estimate_l2s
from .stability import check_eps_optimality, check_ht_stable

log = logging.getLogger("sparse_iht")


class CommandError(Exception):
    """A runtime failure to report with exit code 1."""


def _bounded_int(lo, hi=None):
    def parse(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid integer: {text!r}") from None
        if value < lo or (hi is not None and value > hi):
            span = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
            raise argparse.ArgumentTypeError(f"{value} is outside {span}")
        return value
    return parse


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number: {text!r}") from None
    if not (np.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"{value} must be positive")
    return value


def _nonneg_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number: {text!r}") from None
    if not (np.isfinite(value) and value >= 0):
        raise argparse.ArgumentTypeError(f"{value} must be non-negative")
    return value


sparsity_type = _bounded_int(1, N_PARAMS - 1)


def _common(max_steps):
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--iris", type=Path, default=None, help="IRIS CSV file (bundled copy if omitted)")
    p.add_argument("--out-dir", type=Path, default=Path(os.environ.get("IHT_OUT_DIR", "out")),
                   help="output directory (env IHT_OUT_DIR)")
    p.add_argument("--max-steps", type=_bounded_int(1), default=max_steps)
    p.add_argument("--loss-stop", type=_nonneg_float, default=0.05, help="stop once train loss <= this")
    p.add_argument("--n-monte", type=_bounded_int(1), default=100, help="Monte Carlo trials for L2s")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _seeds(p, support=True):
    p.add_argument("--seed-data", type=int, default=42)
    p.add_argument("--seed-init", type=int, default=21)
    if support:
        p.add_argument("--seed-support", type=int, default=84)


def build_parser():
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="sparse-iht", description=__doc__.splitlines()[0],
                                     formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True)
    single, sweep_common = _common(10_000), _common(2_000)

    p = sub.add_parser("train-sparse", parents=[single], formatter_class=fmt,
                       help="one IHT run on IRIS")
    p.add_argument("--sparsity", type=sparsity_type, default=7)
    _seeds(p)
    p.add_argument("--trace-every", type=_bounded_int(1), default=1)
    p.set_defaults(func=cmd_train_sparse)

    p = sub.add_parser("train-dense", parents=[single], formatter_class=fmt,
                       help="one dense gradient-descent run on IRIS")
    _seeds(p, support=False)
    p.add_argument("--trace-every", type=_bounded_int(1), default=1)
    p.set_defaults(func=cmd_train_dense)

    p = sub.add_parser("estimate-l2s", parents=[single], formatter_class=fmt,
                       help="Monte Carlo estimate of L2s and the derived learning rate")
    p.add_argument("--sparsity", type=_bounded_int(1, N_PARAMS), default=7,
                   help=f"use {N_PARAMS} for the dense estimate")
    _seeds(p, support=False)
    p.set_defaults(func=cmd_estimate_l2s)

    p = sub.add_parser("sweep", parents=[sweep_common], formatter_class=fmt,
                       help="sparse runs over sparsity levels plus dense baselines")
    p.add_argument("--runs", type=_bounded_int(1), default=50, help="runs per sparsity level")
    p.add_argument("--sparsity", type=sparsity_type, nargs="+", default=None,
                   help="subset of sparsity levels (default 1..14)")
    p.add_argument("--seed", type=int, default=0, help="master seed for drawing seed triples")
    p.add_argument("--pair-data-seeds", action="store_true",
                   help="sparse run i reuses the data seed of dense run i")
    p.add_argument("--jobs", type=_bounded_int(1), default=1, help="worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("certify", parents=[single], formatter_class=fmt,
                       help="HT-stability and eps-optimality of a finished sparse run")
    p.add_argument("--run-dir", type=Path, required=True, help="directory written by train-sparse")
    p.add_argument("--eps", type=_positive_float, default=0.02)
    p.add_argument("--dense-loss", type=_nonneg_float, default=None,
                   help="dense reference train loss (trained with the run's seeds if omitted)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("plot", formatter_class=fmt, help="SVG figures and tidy CSVs from records.csv")
    p.add_argument("--records", type=Path, default=None, help="records file (default OUT_DIR/records.csv)")
    p.add_argument("--out-dir", type=Path, default=Path(os.environ.get("IHT_OUT_DIR", "out")))
    p.add_argument("--run-index", type=_bounded_int(0), default=0,
                   help="which successful sparse record to draw as a parameter bar chart")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_plot)
    return parser


def _protocol(args):
    return Protocol(max_steps=args.max_steps, loss_stop=args.loss_stop, n_monte=args.n_monte)


def _dataset(args):
    try:
        return data_mod.load_iris(args.iris)
    except OSError as exc:
        raise CommandError(f"cannot read IRIS file: {exc}") from exc


def _out_dir(path):
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CommandError(f"cannot create output directory {path}: {exc}") from exc
    if not os.access(path, os.W_OK):
        raise CommandError(f"output directory {path} is not writable")
    return path


def _print_record(record):
    for key, value in record.__dict__.items():
        if key in ("theta", "grad"):
            continue
        if isinstance(value, float):
            value = format(value, ".9g")
        elif isinstance(value, tuple):
            value = " ".join(str(v) for v in value)
        print(f"{key}: {value}")


def _write_params(path, theta0, record):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "name", "initial", "final", "gradient"])
        for i, name in enumerate(parameter_names()):
            writer.writerow([i, name, format(float(theta0[i]), ".9g"),
                             format(record.theta[i], ".9g"), format(record.grad[i], ".9g")])


def _finish_run(run_dir, record, trace, theta0):
    run_dir = _out_dir(run_dir)
    write_records_csv(run_dir / "record.csv", [record])
    if not record.ok:
        raise CommandError(f"run failed: {record.error}")
    write_trace_csv(run_dir / "trace.csv", trace)
    _write_params(run_dir / "params.csv", theta0, record)
    _print_record(record)
    print(f"outputs: {run_dir}")


def cmd_train_sparse(args):
    seeds = SeedTriple(args.seed_data, args.seed_init, args.seed_support)
    record, trace, theta0 = train_sparse(seeds, args.sparsity, _protocol(args), _dataset(args),
                                         trace_every=args.trace_every)
    run_dir = args.out_dir / (f"sparse_s{args.sparsity}_data{seeds.data_seed}"
                              f"_init{seeds.init_seed}_support{seeds.support_seed}")
    _finish_run(run_dir, record, trace, theta0.dense)


def cmd_train_dense(args):
    record, trace, theta0 = train_dense(args.seed_data, args.seed_init, _protocol(args),
                                        _dataset(args), trace_every=args.trace_every)
    _finish_run(args.out_dir / f"dense_data{args.seed_data}_init{args.seed_init}", record, trace, theta0)


def cmd_estimate_l2s(args):
    train, _, _ = data_mod.split_and_standardize(_dataset(args), args.seed_data)
    obj = OneLayerClassifier(train.features, train.labels)
    est = estimate_l2s(obj, args.sparsity, args.n_monte, seed=args.seed_init)
    out = _out_dir(args.out_dir)
    path = out / f"l2s_s{args.sparsity}_data{args.seed_data}_init{args.seed_init}.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["trial", "ratio"])
        writer.writerows([j, format(r, ".9g")] for j, r in enumerate(est.trials))
    ratios = np.array(est.trials)
    print(f"s: {est.s}")
    print(f"n_monte: {est.n_monte}")
    print(f"l_hat: {est.l_hat:.9g}")
    print(f"gamma: {derive_learning_rate(est):.9g}")
    print(f"trial_median: {np.median(ratios):.9g}")
    print(f"trial_min: {ratios.min():.9g}")
    print(f"outputs: {path}")


def cmd_sweep(args):
    out = _out_dir(args.out_dir)
    sparsities = sorted(set(args.sparsity)) if args.sparsity else list(range(1, N_PARAMS))
    records = run_sweep(args.runs, sparsities, _protocol(args), _dataset(args),
                        master_seed=args.seed, pair_data_seeds=args.pair_data_seeds, jobs=args.jobs)
    write_records_csv(out / "records.csv", records)
    summary = aggregate(records)
    write_summary_csv(out / "summary.csv", summary)
    print("kind    s  runs failed  gamma_med  train_loss_med  test_loss_med  test_acc_med  stable")
    for row in summary:
        print(f"{row['kind']:<6} {row['s']:>3} {row['n_runs']:>5} {row['n_failed']:>6}  "
              f"{row['gamma_median']:9.4f}  {row['train_loss_median']:14.5f}  "
              f"{row['test_loss_median']:13.5f}  {row['test_acc_median']:12.4f}  {row['stable_rate']:.3f}")
    print(f"outputs: {out / 'records.csv'}, {out / 'summary.csv'}")


def _read_final_theta(run_dir):
    path = run_dir / "params.csv"
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc}") from exc
    return np.array([float(r["final"]) for r in rows])


def cmd_certify(args):
    try:
        records = read_records_csv(args.run_dir / "record.csv")
    except OSError as exc:
        raise CommandError(f"cannot read run record: {exc}") from exc
    if len(records) != 1 or records[0].kind != "sparse" or not records[0].ok:
        raise CommandError("record.csv must hold one successful sparse run")
    record = records[0]
    theta = _read_final_theta(args.run_dir)
    dataset = _dataset(args)
    train, _, _ = data_mod.split_and_standardize(dataset, record.data_seed)
    loss, grad = OneLayerClassifier(train.features, train.labels).value_and_gradient(theta)
    report = check_ht_stable(theta, grad, record.gamma)
    # the stability inequality ignores the on-support gradient; show it for stationarity
    on_support = np.abs(grad[theta != 0]).max()

    if args.dense_loss is not None:
        dense_loss = args.dense_loss
    else:
        dense, _, _ = train_dense(record.data_seed, record.init_seed, _protocol(args), dataset)
        if not dense.ok:
            raise CommandError(f"dense reference run failed: {dense.error}")
        dense_loss = dense.train_loss

    print(f"min_abs_support: {report.min_abs_on_support:.9g}")
    print(f"max_grad_off: {report.max_grad_off_support:.9g}")
    print(f"gamma: {report.gamma:.9g}")
    print(f"margin: {report.margin:.9g}")
    print(f"stable: {report.is_stable}")
    print(f"max_grad_on_support: {on_support:.9g}")
    print(f"sparse_train_loss: {loss:.9g}")
    print(f"dense_train_loss: {dense_loss:.9g}")
    print(f"eps: {args.eps:.9g}")
    print(f"eps_optimal: {check_eps_optimality(dense_loss, loss, args.eps)}")


def cmd_plot(args):
    path = args.records if args.records is not None else args.out_dir / "records.csv"
    try:
        records = read_records_csv(path)
    except OSError as exc:
        raise CommandError(f"cannot read records: {exc}") from exc
    if not records:
        raise CommandError(f"{path} holds no records")
    out = _out_dir(args.out_dir)
    for written in emit_plots(records, out, args.run_index):
        print(written)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (CommandError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
