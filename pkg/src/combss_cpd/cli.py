"""Command-line entry point: ``combss-cpd {detect,simulate,experiment}``.

Exit codes: 0 success, 1 input or validation error, 2 when interval halving
cannot reach the requested number of change points.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .changepoint import apply_merge
from .combss import CombssOptions
from .harness import (
    aggregate,
    cp_histogram,
    run_experiment,
    write_histogram_csv,
    write_records_csv,
    write_summary_csv,
)
from .lambda_select import (
    BisectionFailure,
    bisection_for_k,
    confidence_bound,
    discrepancy_principle,
)
from .simgen import EXPERIMENTS, SignalSpec, UnknownExperiment, experiment_config, simulate

log = logging.getLogger("combss_cpd")

PRESET_REPS = {"desk": 20, "paper": 100}


class CliError(Exception):
    """Bad input or flags; reported on stderr with exit code 1."""


def read_series(path) -> np.ndarray:
    """One number per line, optionally under a ``y`` header."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    rows = [ln.strip() for ln in lines if ln.strip()]
    if rows and rows[0].lower() == "y":
        rows = rows[1:]
    if not rows:
        raise CliError(f"{path}: no data")
    try:
        values = np.array([float(r) for r in rows])
    except ValueError as exc:
        raise CliError(f"{path}: expected one numeric value per line ({exc})") from exc
    if not np.all(np.isfinite(values)):
        raise CliError(f"{path}: non-finite values")
    return values


def write_series(values, fh) -> None:
    fh.write("y\n")
    for v in values:
        fh.write(f"{float(v)!r}\n")


def _combss_options(args) -> CombssOptions:
    kwargs = {}
    if args.threshold is not None:
        kwargs["threshold"] = args.threshold
    if args.max_iter is not None:
        kwargs["max_iterations"] = args.max_iter
    if args.learning_rate is not None:
        kwargs["learning_rate"] = args.learning_rate
    try:
        return CombssOptions(**kwargs)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_detect(args) -> int:
    y = read_series(args.input)
    if y.shape[0] < 2:
        raise CliError("need at least two observations")
    opts = _combss_options(args)
    if args.mode == "known-k":
        if args.k is None or args.k < 1:
            raise CliError("--mode known-k requires a positive --k")
        _, result = bisection_for_k(
            y, args.k, lambda_hi=args.lambda_max, max_steps=args.max_steps, opts=opts
        )
        trace = None
    else:
        if args.sigma is None or args.sigma <= 0:
            raise CliError(f"--mode {args.mode} requires a positive --sigma")
        if args.mode == "dp":
            _, result, trace = discrepancy_principle(
                y, args.sigma, args.delta_lambda, args.lambda_max, opts
            )
        else:
            if not 0 < args.alpha < 1:
                raise CliError("--alpha must lie in (0, 1)")
            _, result, trace = confidence_bound(
                y, args.sigma, args.alpha, args.delta_lambda, args.lambda_max, opts
            )
    if args.merge_gap is not None:
        result = apply_merge(y, result, args.merge_gap)
    if args.trace and trace is not None:
        Path(args.trace).write_text(trace.to_csv())
    _emit(json.dumps(result.to_dict(), indent=2) + "\n", args.out)
    return 0


def cmd_simulate(args) -> int:
    try:
        spec = SignalSpec.from_dict(json.loads(Path(args.spec).read_text()))
    except OSError as exc:
        raise CliError(f"cannot read {args.spec}: {exc}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"invalid signal spec: {exc}") from exc
    y = simulate(spec, args.seed, noise_scale=args.noise_scale)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_series(y, fh)
    else:
        write_series(y, sys.stdout)
    return 0


def cmd_experiment(args) -> int:
    overrides = {
        "replications": args.reps or PRESET_REPS[args.preset],
        "base_seed": args.seed,
        "alpha": args.alpha,
        "delta_lambda": args.delta_lambda,
        "merge_gap": args.merge_gap,
        "combss": _combss_options(args),
    }
    if args.scales:
        overrides["scale_values"] = tuple(float(v) for v in args.scales.split(","))
    if args.delta is not None:
        overrides["delta"] = args.delta
    try:
        cfg = experiment_config(args.name, **overrides)
    except UnknownExperiment as exc:
        raise CliError(str(exc)) from exc
    except ValueError as exc:
        raise CliError(f"invalid experiment configuration: {exc}") from exc

    log.info("running %s: %d scale values x %d replications", cfg.name,
             len(cfg.scale_values), cfg.replications)
    records = run_experiment(cfg, threads=args.threads)

    prefix = args.out or cfg.name.lower()
    Path(prefix).parent.mkdir(parents=True, exist_ok=True)
    with open(f"{prefix}_records.csv", "w", newline="") as fh:
        write_records_csv(records, fh, timing=args.timing)
    with open(f"{prefix}_summary.csv", "w", newline="") as fh:
        write_summary_csv(aggregate(records), fh)

    hist_scale = cfg.scale_values[-1] if args.hist_scale is None else args.hist_scale
    hist_rule = args.hist_rule or ("known_k" if cfg.mode == "known_k" else records[0].rule)
    subset = [r for r in records if r.scale_value == hist_scale and r.rule == hist_rule]
    with open(f"{prefix}_histogram.csv", "w", newline="") as fh:
        write_histogram_csv(cp_histogram(subset), fh)
    return 0


def _add_optimizer_flags(p) -> None:
    p.add_argument("--threshold", type=float, help="corner threshold on t (default 0.5)")
    p.add_argument("--max-iter", type=int, help="Adam iteration cap (default 1000)")
    p.add_argument("--learning-rate", type=float, help="Adam step size (default 0.02)")
    p.add_argument("--merge-gap", type=int, help="merge estimates closer than this")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--delta-lambda", type=float, default=0.005)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="combss-cpd",
        description="Mean change-point detection by continuous best-subset selection.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect change points in a CSV series")
    p.add_argument("input")
    p.add_argument("--mode", choices=("known-k", "dp", "cb"), required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--lambda-max", type=float)
    p.add_argument("--max-steps", type=int, default=50)
    p.add_argument("--trace", help="write the lambda scan to this CSV (dp/cb)")
    p.add_argument("--out")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("simulate", help="draw a noisy staircase from a JSON spec")
    p.add_argument("spec")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-scale", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("experiment", help="run a Monte-Carlo study")
    p.add_argument("name", help="one of " + ", ".join(EXPERIMENTS))
    p.add_argument("--preset", choices=tuple(PRESET_REPS), default="paper")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scales", help="comma-separated subset of the scale grid")
    p.add_argument("--delta", type=float, help="jump size for the L-scaling studies")
    p.add_argument("--threads", type=int)
    p.add_argument("--timing", action="store_true", help="record wall times")
    p.add_argument("--hist-scale", type=float)
    p.add_argument("--hist-rule", choices=("known_k", "dp", "cb"))
    p.add_argument("--out", help="output path prefix")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except BisectionFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
