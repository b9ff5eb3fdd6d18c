"""Command-line front end: detect on CSV data, run benchmark comparisons,
sample-size sweeps, and the heavy-tail order-statistic demonstration."""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from .experiments import (
    ASYMPTOTIC_FAMILIES,
    EXPERIMENT_GRID,
    asymptotics_sweep,
    counterexample_index,
    counterexample_trial,
    run_comparison,
)
from .kde import KERNEL_TAGS
from .pipeline import VARIANTS, LookoutParams, run_lookout


def _apply_thread_cap() -> None:
    """Honor LOOKOUT_THREADS as an upper bound on compiled-kernel threads."""
    raw = os.environ.get("LOOKOUT_THREADS")
    if raw is None or raw == "":
        return
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"LOOKOUT_THREADS must be a positive integer, got {raw!r}")
    if cap < 1:
        raise ValueError(f"LOOKOUT_THREADS must be a positive integer, got {raw!r}")
    import numba

    numba.set_num_threads(min(cap, numba.config.NUMBA_NUM_THREADS))


def _read_numeric_csv(path: str) -> np.ndarray:
    """Strict numeric CSV reader: header row, rectangular, finite floats.

    Errors carry 1-based line numbers to make malformed files easy to fix.
    """
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: file is empty")
        width = len(header)
        if width == 0:
            raise ValueError(f"{path}: header row has no fields")
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != width:
                raise ValueError(f"{path}: line {lineno}: expected {width} "
                                 f"fields, got {len(row)}")
            values = []
            for col, cell in enumerate(row):
                try:
                    value = float(cell)
                except ValueError:
                    raise ValueError(f"{path}: line {lineno}: non-numeric value "
                                     f"{cell!r} in column {col + 1} "
                                     f"({header[col]!r})") from None
                if not np.isfinite(value):
                    raise ValueError(f"{path}: line {lineno}: non-finite value "
                                     f"{cell!r} in column {col + 1}")
                values.append(value)
            rows.append(values)
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least two data rows, got {len(rows)}")
    return np.asarray(rows, dtype=np.float64)


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _cmd_detect(args) -> int:
    data = _read_numeric_csv(args.input)
    params = LookoutParams(alpha=args.alpha, beta=args.beta, gamma=args.gamma,
                           scale=not args.no_scale, kernel=args.kernel,
                           variant=args.variant)
    result = run_lookout(data, params)
    rows = [[i, _fmt(result.surprisals_loo[i]), _fmt(result.probabilities[i]),
             int(result.flags[i])] for i in range(data.shape[0])]
    _write_csv(args.output, ["index", "surprisal_loo", "probability", "flag"], rows)
    n_flagged = int(result.flags.sum())
    print(f"{args.input}: {data.shape[0]} points, {n_flagged} flagged "
          f"(variant={args.variant}, bandwidth={result.bandwidth_used:.6g})")
    return 0


def _cmd_experiment(args) -> int:
    iterations = None
    if args.iterations:
        iterations = [int(v) for v in args.iterations.split(",")]
    rows, summary = run_comparison(args.id, iterations=iterations,
                                   reps=args.reps, seed=args.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    metric_keys = ["tpr", "fpr", "fmeasure", "gmean", "auc"]

    results_path = os.path.join(args.out_dir, f"experiment_{args.id}_results.csv")
    _write_csv(results_path,
               ["iteration", "parameter", "rep", "variant"] + metric_keys,
               [[r["iteration"], _fmt(r["parameter"]), r["rep"], r["variant"]]
                + [_fmt(r[k]) for k in metric_keys] for r in rows])

    summary_path = os.path.join(args.out_dir, f"experiment_{args.id}_summary.csv")
    _write_csv(summary_path,
               ["iteration", "parameter", "variant", "reps"] + metric_keys,
               [[s["iteration"], _fmt(s["parameter"]), s["variant"], s["reps"]]
                + [_fmt(s[k]) for k in metric_keys] for s in summary])

    print(f"experiment {args.id}: wrote {results_path} and {summary_path}")
    for entry in summary:
        print(f"  iteration {entry['iteration']:>2} {entry['variant']}: "
              f"median fmeasure={entry['fmeasure']:.3f} auc={entry['auc']:.3f}")
    return 0


def _cmd_asymptotics(args) -> int:
    n_grid = [int(v) for v in args.n_grid.split(",")]
    records = asymptotics_sweep(args.family, args.dim, n_grid, gamma=args.gamma,
                                reps=args.reps, seed=args.seed)
    _write_csv(args.output,
               ["family", "n", "m", "gamma", "d_value", "scaled", "admissibility"],
               [[args.family, r.n, r.m, _fmt(r.gamma), _fmt(r.d_value),
                 _fmt(r.scaled), _fmt(r.admissibility)] for r in records])
    print(f"asymptotics: {len(records)} records -> {args.output}")
    return 0


def _cmd_counterexample(args) -> int:
    fraction = counterexample_trial(args.n, args.dim, reps=args.reps,
                                    seed=args.seed)
    order_index = counterexample_index(args.n, args.dim)
    if args.output:
        _write_csv(args.output, ["n", "m", "order_index", "reps", "fraction"],
                   [[args.n, args.dim, order_index, args.reps,
                     _fmt(fraction)]])
    print(f"counterexample: n={args.n} m={args.dim} order_index={order_index} "
          f"fraction={fraction:.3f} over {args.reps} reps")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lookout",
        description="Density-based anomaly detection with persistence-derived "
                    "bandwidths and extreme-value tail calibration.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="score a numeric CSV file")
    p.add_argument("input", help="input CSV with a header row; all cells numeric")
    p.add_argument("--output", required=True, help="output CSV path")
    p.add_argument("--alpha", type=float, default=0.001,
                   help="flagging level on probabilities (default 0.001)")
    p.add_argument("--beta", type=float, default=0.90,
                   help="tail split for the GPD fit (default 0.90)")
    p.add_argument("--gamma", type=float, default=0.98,
                   help="death-diameter quantile for the bandwidth (default 0.98)")
    p.add_argument("--no-scale", action="store_true",
                   help="skip the scaling step")
    p.add_argument("--kernel", choices=list(KERNEL_TAGS), default="gaussian")
    p.add_argument("--variant", choices=list(VARIANTS), default="v2")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("experiment", help="run a synthetic benchmark comparison")
    p.add_argument("--id", type=int, required=True,
                   choices=sorted(EXPERIMENT_GRID),
                   help="benchmark id (1..7)")
    p.add_argument("--iterations", default="",
                   help="comma-separated iteration list (default: full grid)")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("asymptotics",
                       help="death-diameter quantiles across sample sizes")
    p.add_argument("--family", choices=list(ASYMPTOTIC_FAMILIES), required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n-grid", required=True,
                   help="comma-separated increasing sample sizes")
    p.add_argument("--gamma", type=float, default=0.98)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_asymptotics)

    p = sub.add_parser("counterexample",
                       help="heavy-tail order-statistic fraction above 1")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="",
                   help="optional CSV path for the single-row result")
    p.set_defaults(func=_cmd_counterexample)
    return parser


def main(argv=None) -> int:
    try:
        _apply_thread_cap()
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
