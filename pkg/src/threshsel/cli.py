"""Command-line entry point.

Exit codes: 0 success, 2 configuration or input error, 3 numeric degeneracy.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

import numpy as np

from .core import SampleFormatError, SeedSpec, abs_order_statistics, read_sample_csv
from .criteria import PenaltySpec, criterion_curve, hard_rss_curve, soft_rss_curve
from .harness import ConfigError, format_csv, load_config, run_experiment, write_report
from .selection import complexity_select, select_k
from .variance import (
    DEFAULT_ALPHA,
    DEFAULT_WINDOW,
    SLOPE_CSV_HEADER,
    DegenerateVarianceError,
    calibrate_alpha,
    data_driven_cp_select,
    estimate_sigma2,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3


def _emit(text: str, out_dir: Optional[str], filename: str) -> None:
    if out_dir is None:
        sys.stdout.write(text)
        return
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    with open(path / filename, "w", newline="") as fh:
        fh.write(text)


def _penalty_from_args(args) -> PenaltySpec:
    if args.criterion == "cp":
        return PenaltySpec.mallows_cp()
    if args.criterion == "random-soft":
        return PenaltySpec.random_soft()
    if args.criterion == "fdr":
        return PenaltySpec.fdr(args.Cprime)
    if args.criterion == "bm":
        if args.C is None:
            raise ConfigError("--criterion bm needs --C")
        return PenaltySpec.birge_massart(args.C, args.Cprime)
    raise ConfigError(f"unsupported criterion {args.criterion!r}")


def cmd_fit(args) -> int:
    sample = read_sample_csv(args.input)
    stats = abs_order_statistics(sample)
    n = sample.n
    k = np.arange(n + 1)
    levels = stats.levels()
    soft, hard = soft_rss_curve(stats), hard_rss_curve(stats)
    header = ["k", "level", "rss_soft", "rss_hard", "random_part"]
    cols = [k, levels, soft, hard, k * levels * levels]
    if args.sigma2 is not None:
        header += ["cp", "hard_cp"]
        cols += [
            criterion_curve(sample, args.sigma2, PenaltySpec.mallows_cp()).values,
            criterion_curve(sample, args.sigma2, PenaltySpec.zero(n)).values + 2 * k * args.sigma2,
        ]
    rows = [tuple(int(c[i]) if j == 0 else float(c[i]) for j, c in enumerate(cols)) for i in range(n + 1)]
    _emit(format_csv(header, rows), args.output, "curves.csv")
    if args.output is not None:
        y = sample.values
        path_rows = []
        for kk in range(n + 1):
            t = levels[kk]
            soft_k = np.sign(y) * np.maximum(np.abs(y) - t, 0.0)
            hard_k = np.where(np.abs(y) > t, y, 0.0)
            path_rows += [(kk, i, y[i], soft_k[i], hard_k[i]) for i in range(n)]
        _emit(format_csv(["k", "index", "y", "soft", "hard"], path_rows), args.output, "paths.csv")
    return EXIT_OK


def cmd_select(args) -> int:
    sample = read_sample_csv(args.input)
    fit = None
    if args.criterion == "data-driven":
        fit = estimate_sigma2(sample, args.alpha, tuple(args.window))
        result = data_driven_cp_select(sample, args.alpha, tuple(args.window))
    else:
        if args.sigma2 is None:
            raise ConfigError(f"--criterion {args.criterion} needs --sigma2")
        spec = _penalty_from_args(args)
        if args.complexity:
            result = complexity_select(sample, spec, args.sigma2)
        else:
            result = select_k(sample, args.sigma2, spec)
    out = {
        "k_hat": result.k_hat,
        "kind": result.estimate.kind.value,
        "level": result.estimate.level,
        "sigma2_used": result.curve.sigma2_used,
        "criterion": [float(v) for v in result.curve.values],
        "estimate": [float(v) for v in result.estimate.values],
    }
    if fit is not None:
        out["slope_fit"] = dict(zip(SLOPE_CSV_HEADER, fit.to_row()))
    _emit(json.dumps(out, indent=2) + "\n", args.output, "selection.json")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    seed = SeedSpec(args.seed if args.seed is not None else 0)
    alpha = calibrate_alpha(args.n, args.replicas, tuple(args.window), seed, args.threads)
    out = {"n": args.n, "replicas": args.replicas, "window_frac": list(args.window), "alpha_hat": alpha}
    _emit(json.dumps(out, indent=2) + "\n", args.output, "alpha.json")
    return EXIT_OK


def cmd_experiment(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = replace(config, seed=SeedSpec(args.seed, config.seed.stream_id))
    result = run_experiment(config, args.threads)
    csv_path, json_path = write_report(result, config, args.output)
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    def add_global_flags(p, suppress):
        # subcommands accept the flags too, without clobbering values given before them
        dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        p.add_argument("--seed", type=int, default=dflt(None), help="master seed (unsigned 64-bit)")
        p.add_argument("--threads", type=int, default=dflt(1), help="worker threads, 0 = one per CPU")
        p.add_argument("--output", default=dflt(None), help="output directory (default: stdout or config)")

    common = argparse.ArgumentParser(add_help=False)
    add_global_flags(common, suppress=True)
    parser = argparse.ArgumentParser(prog="threshsel", description=__doc__)
    add_global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", parents=[common], help="threshold paths and criterion curves")
    p.add_argument("input", help="CSV with one column y")
    p.add_argument("--sigma2", type=float, default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("select", parents=[common], help="choose k and print the estimate")
    p.add_argument("input", help="CSV with one column y")
    p.add_argument("--criterion", choices=["cp", "bm", "fdr", "random-soft", "data-driven"], default="cp")
    p.add_argument("--sigma2", type=float, default=None)
    p.add_argument("--C", type=float, default=None)
    p.add_argument("--Cprime", type=float, default=0.0)
    p.add_argument("--complexity", action="store_true", help="minimize the combined l1 + pen(k) objective")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--window", type=float, nargs=2, default=list(DEFAULT_WINDOW), metavar=("LO", "HI"))
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("calibrate-alpha", parents=[common], help="Monte Carlo slope constant alpha(n)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--replicas", type=int, default=200)
    p.add_argument("--window", type=float, nargs=2, default=list(DEFAULT_WINDOW), metavar=("LO", "HI"))
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("experiment", parents=[common], help="run a configured experiment")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.threads < 0:
            raise ConfigError("--threads must be >= 0")
        return args.func(args)
    except DegenerateVarianceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ConfigError, SampleFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
