"""Command-line surface.

Subcommands: fit, select, sample-complexity, noise-range, simulate,
compare-cv. Structured results print as JSON (sorted keys, stable float
repr); simulate writes CSV files plus a JSON manifest and prints the
manifest path.

Exit codes are a stable contract for scripts: 0 success, 2 usage or
validation failure (including CSV/config format problems), 3 numerically
rank-deficient design, 4 too few samples for the requested noise-variance
validation. The COAC_THREADS environment variable caps --workers.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time

from .bounds import (
    CONVENTION_CANONICAL,
    CONVENTION_DOUBLED,
    ConfidenceParams,
    sample_complexity_known_order,
    validate_noise_variance,
)
from .crossval import kfold_select_order
from .exceptions import (
    CoacError,
    InsufficientSamples,
    NonpositiveEpsilon,
    RankDeficient,
)
from .regression import (
    POLY_NO_INTERCEPT,
    POLY_WITH_INTERCEPT,
    KernelSpec,
    fit,
    read_dataset_csv,
)
from .selection import SIGMA_ESTIMATED, SIGMA_ORACLE, select_order
from .simulate import (
    ExperimentConfig,
    run_bound_curves,
    run_cv_comparison,
    run_sample_complexity_table,
    run_selection_table,
    write_csv,
    write_manifest,
    CURVE_COLUMNS,
    CV_COMPARISON_COLUMNS,
    SAMPLE_COMPLEXITY_COLUMNS,
    SELECTION_TABLE_COLUMNS,
)

KERNEL_CHOICES = {"poly": POLY_NO_INTERCEPT, "poly-intercept": POLY_WITH_INTERCEPT}
CONVENTION_CHOICES = {"canonical": CONVENTION_CANONICAL, "doubled": CONVENTION_DOUBLED}


def _emit(payload, out_path: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def _kernel_for(args, max_order: int) -> KernelSpec:
    return KernelSpec(family=KERNEL_CHOICES[args.kernel], max_order=max_order)


def _add_kernel_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--kernel",
        choices=sorted(KERNEL_CHOICES),
        default="poly",
        help="design-matrix family (default: poly, no intercept column)",
    )


def _add_noise_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--noise-var", type=float, help="known noise variance (oracle policy)"
    )
    group.add_argument(
        "--estimate-noise",
        action="store_true",
        help="estimate the noise variance from the largest-order fit "
        "(midpoint of the validated range)",
    )


def _add_confidence_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=2.0, help="validation multiplier")
    parser.add_argument("--beta", type=float, default=2.0, help="confidence multiplier")


def _add_convention_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--convention",
        choices=sorted(CONVENTION_CHOICES),
        default="canonical",
        help="KL-scale normalization: canonical = half the squared distance "
        "per noise variance, doubled = twice the canonical value",
    )


def _resolve_workers(requested: int) -> int:
    cap_text = os.environ.get("COAC_THREADS")
    if cap_text is None:
        return max(1, requested)
    try:
        cap = int(cap_text)
    except ValueError:
        raise CoacError(f"COAC_THREADS must be an integer, got {cap_text!r}")
    if cap < 1:
        raise CoacError(f"COAC_THREADS must be >= 1, got {cap}")
    return max(1, min(requested, cap))


def _dataset_from_args(args):
    ds = read_dataset_csv(args.input)
    if getattr(args, "noise_var", None) is not None:
        ds = dataclasses.replace(ds, noise_var=args.noise_var)
    return ds


def _sigma_policy(args) -> str:
    return SIGMA_ESTIMATED if args.estimate_noise else SIGMA_ORACLE


def _cmd_fit(args) -> int:
    ds = read_dataset_csv(args.input)
    result = fit(ds, args.order, _kernel_for(args, max(args.order, 1)))
    _emit(
        {
            "order": result.order,
            "n": result.n,
            "theta_hat": [float(t) for t in result.theta_hat],
            "r_ms": result.r_ms,
        },
        args.out,
    )
    return 0


def _cmd_select(args) -> int:
    ds = _dataset_from_args(args)
    report = select_order(
        ds,
        args.max_order,
        _kernel_for(args, args.max_order),
        ConfidenceParams(alpha=args.alpha, beta=args.beta),
        _sigma_policy(args),
        CONVENTION_CHOICES[args.convention],
    )
    _emit(report.to_json_dict(), args.out)
    return 0


def _cmd_sample_complexity(args) -> int:
    if args.epsilon <= 0:
        raise NonpositiveEpsilon(f"--epsilon must be > 0, got {args.epsilon}")
    n = sample_complexity_known_order(args.order, args.epsilon, args.beta)
    print(n)
    return 0


def _cmd_noise_range(args) -> int:
    ds = read_dataset_csv(args.input)
    result = fit(ds, args.order, _kernel_for(args, max(args.order, 1)))
    rng = validate_noise_variance(result.r_ms, args.order, ds.n, args.alpha)
    _emit(
        {
            "low": rng.low,
            "high": rng.high,
            "midpoint": rng.midpoint,
            "p_alpha": rng.p_alpha,
            "source_r_ms": rng.source_r_ms,
            "m": rng.m,
            "n": rng.n,
        },
        args.out,
    )
    return 0


def _cmd_simulate(args) -> int:
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CoacError(f"config is not valid JSON: {exc}")
    config = ExperimentConfig.from_json_dict(raw)
    if args.seed is not None:
        config = dataclasses.replace(config, master_seed=args.seed)
        config.validate()
    workers = _resolve_workers(args.workers)
    os.makedirs(args.out, exist_ok=True)

    outputs = []

    def emit_csv(name: str, rows, columns) -> None:
        path = os.path.join(args.out, name)
        write_csv(path, rows, columns)
        outputs.append(path)

    if args.table == "1":
        emit_csv("table1.csv", run_sample_complexity_table(config, workers), SAMPLE_COMPLEXITY_COLUMNS)
    elif args.table == "2":
        emit_csv("table2.csv", run_cv_comparison(config), CV_COMPARISON_COLUMNS)
    elif args.table == "3":
        emit_csv("table3.csv", run_selection_table(config, workers), SELECTION_TABLE_COLUMNS)
    else:
        curves = run_bound_curves(config, workers)
        emit_csv("curves_n.csv", curves["per_n"], CURVE_COLUMNS)
        emit_csv("curves_m.csv", curves["per_m"], CURVE_COLUMNS)

    manifest_path = os.path.join(args.out, "manifest.json")
    write_manifest(manifest_path, config, outputs)
    print(manifest_path)
    return 0


def _cmd_compare_cv(args) -> int:
    ds = _dataset_from_args(args)
    kernel = _kernel_for(args, args.max_order)
    params = ConfidenceParams(alpha=args.alpha, beta=args.beta)
    t0 = time.perf_counter_ns()
    report = select_order(
        ds,
        args.max_order,
        kernel,
        params,
        _sigma_policy(args),
        CONVENTION_CHOICES[args.convention],
    )
    proposed_ns = time.perf_counter_ns() - t0
    cv = kfold_select_order(ds, args.max_order, args.folds, kernel, seed=args.seed)
    proposed = report.to_json_dict()
    proposed["wall_time_ns"] = proposed_ns
    _emit({"proposed": proposed, "cv": cv.to_json_dict()}, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coac",
        description="Least-squares fitting with confidence bounds on the "
        "noise-free risk, order selection, and experiment reproduction.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("fit", help="least-squares fit of one order, JSON result")
    p.add_argument("input", help="CSV file with header x,y or x,y,y_bar")
    p.add_argument("--order", type=int, required=True, help="number of kernel columns")
    _add_kernel_flag(p)
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser(
        "select", help="scan orders, bound each one, report the best"
    )
    p.add_argument("input", help="CSV file with header x,y or x,y,y_bar")
    p.add_argument("--max-order", type=int, required=True, help="largest order to scan")
    _add_confidence_flags(p)
    _add_noise_flags(p)
    _add_convention_flag(p)
    _add_kernel_flag(p)
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser(
        "sample-complexity",
        help="closed-form minimum n for a known order and accuracy target",
    )
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--beta", type=float, default=2.0)
    p.set_defaults(func=_cmd_sample_complexity)

    p = sub.add_parser(
        "noise-range", help="validated noise-variance interval from one fit"
    )
    p.add_argument("input", help="CSV file with header x,y or x,y,y_bar")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--alpha", type=float, default=2.0)
    _add_kernel_flag(p)
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_noise_range)

    p = sub.add_parser("simulate", help="run an experiment grid from a JSON config")
    p.add_argument("--config", required=True, help="JSON config file")
    p.add_argument(
        "--table",
        choices=("1", "2", "3", "figs"),
        required=True,
        help="1 = sample complexity, 2 = CV time/accuracy, 3 = selection, "
        "figs = bound curves",
    )
    p.add_argument("--out", default=".", help="output directory (default: .)")
    p.add_argument("--seed", type=int, help="override the config's master_seed")
    p.add_argument("--workers", type=int, default=1, help="trial worker threads")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser(
        "compare-cv", help="bound-driven selection vs k-fold CV on one dataset"
    )
    p.add_argument("input", help="CSV file with header x,y or x,y,y_bar")
    p.add_argument("--max-order", type=int, required=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0, help="fold-shuffle seed")
    _add_confidence_flags(p)
    _add_noise_flags(p)
    _add_convention_flag(p)
    _add_kernel_flag(p)
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_compare_cv)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except InsufficientSamples as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except RankDeficient as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CoacError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
