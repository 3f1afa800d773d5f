#!/usr/bin/env python3
"""Reproduce every shipped table and curve file at full scale.

Writes, under --out (default ./results):
  table1/   sample-complexity crossings per (noise variance, epsilon)
  table2/   wall-clock and accuracy contest vs 5-fold cross-validation
  table3/   order-selection shootout over nine noise levels at n = 50
  figs/     trial-averaged risk curves swept over n and over the order

Each directory gets its CSVs plus a manifest.json echoing the exact config,
so any file can be regenerated from its manifest alone. Use --smoke for a
fast low-trial pass through the same code paths and schemas.
"""

import argparse
import dataclasses
import os
import time

from coac.simulate import (
    CURVE_COLUMNS,
    CV_COMPARISON_COLUMNS,
    SAMPLE_COMPLEXITY_COLUMNS,
    SELECTION_TABLE_COLUMNS,
    ExperimentConfig,
    run_bound_curves,
    run_cv_comparison,
    run_sample_complexity_table,
    run_selection_table,
    write_csv,
    write_manifest,
)


def emit(out_dir, config, tables):
    """Write each (filename, rows, columns) table plus a manifest, return paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for name, rows, columns in tables:
        path = os.path.join(out_dir, name)
        write_csv(path, rows, columns)
        paths.append(path)
    write_manifest(os.path.join(out_dir, "manifest.json"), config, paths)
    return paths


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results", help="output root directory")
    parser.add_argument("--seed", type=int, default=20260814)
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--workers", type=int, default=max(1, os.cpu_count() or 1))
    parser.add_argument(
        "--smoke", action="store_true", help="20-trial pass for a quick check"
    )
    args = parser.parse_args()

    trials = 20 if args.smoke else args.trials
    # The cross-validation contest refits every fold from scratch, so it gets
    # a smaller trial budget; it also runs sequentially so its timing columns
    # measure the algorithms rather than the pool.
    timing_trials = 20 if args.smoke else min(trials, 200)
    base = ExperimentConfig(master_seed=args.seed, trials=trials)

    started = time.perf_counter()

    config = dataclasses.replace(
        base,
        n_grid=(10, 15, 20, 25, 32, 40, 50, 65, 80, 100, 125, 160, 200, 300),
        epsilon_grid=(0.1, 0.05, 0.02),
    )
    rows = run_sample_complexity_table(config, args.workers)
    emit(
        os.path.join(args.out, "table1"),
        config,
        [("table1.csv", rows, SAMPLE_COMPLEXITY_COLUMNS)],
    )
    print(f"table1 done at {time.perf_counter() - started:.1f} s")

    config = dataclasses.replace(base, trials=timing_trials)
    rows = run_cv_comparison(config)
    emit(
        os.path.join(args.out, "table2"),
        config,
        [("table2.csv", rows, CV_COMPARISON_COLUMNS)],
    )
    print(f"table2 done at {time.perf_counter() - started:.1f} s")

    config = dataclasses.replace(
        base,
        noise_var_grid=tuple(round(0.1 * k, 1) for k in range(1, 10)),
        n_grid=(50,),
    )
    rows = run_selection_table(config, args.workers)
    emit(
        os.path.join(args.out, "table3"),
        config,
        [("table3.csv", rows, SELECTION_TABLE_COLUMNS)],
    )
    print(f"table3 done at {time.perf_counter() - started:.1f} s")

    curves = run_bound_curves(base, args.workers)
    emit(
        os.path.join(args.out, "figs"),
        base,
        [
            ("curves_n.csv", curves["per_n"], CURVE_COLUMNS),
            ("curves_m.csv", curves["per_m"], CURVE_COLUMNS),
        ],
    )
    print(f"figs done at {time.perf_counter() - started:.1f} s")


if __name__ == "__main__":
    main()
