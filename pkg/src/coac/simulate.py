"""Monte Carlo harness: deterministic data generation and the experiment
grids behind the shipped tables and curve files.

RNG discipline
--------------
Every trial owns a counter-based stream: ``Philox(key=[master_seed,
trial_id])``. Uniforms come straight from the generator; Gaussians use an
explicit Box-Muller transform, ``z = sqrt(-2 ln u1) * cos(2 pi u2)`` with
``u1 = 1 - r`` so that ``u1`` lies in (0, 1]. Spelling the transform out
(instead of relying on a library's normal sampler) keeps every CSV byte
reproducible across platforms and library versions. Trials can therefore
run on any number of workers: each trial's numbers depend only on
(master_seed, trial_id), and aggregation always walks trials in index
order.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .bounds import (
    CONVENTION_CANONICAL,
    CONVENTION_DOUBLED,
    CONVENTIONS,
    ConfidenceParams,
    general_rn_bounds,
    rn_bounds_known_order,
    rn_bounds_via_mse_known_order,
    sample_complexity_known_order,
)
from .crossval import kfold_select_order
from .exceptions import BadShape, KappaDomain
from .regression import (
    CUSTOM_COLUMNS,
    Dataset,
    KernelSpec,
    build_design_matrix,
    fit,
    oracle_nmse,
)
from .selection import SIGMA_ORACLE, SIGMA_POLICIES, select_order

# Default ground truth: a fifth-order polynomial (no intercept) on (0, 10).
TRUTH_THETA = (2.3348, -2.3403, 0.6988, -0.0809, 0.0032)

SCHEMA_VERSION = 1

SAMPLE_COMPLEXITY_COLUMNS = (
    "sigma_sq",
    "epsilon",
    "n_oracle",
    "n_oracle_interp",
    "oracle_reached",
    "n_formula",
    "n_general",
    "n_general_interp",
    "general_reached",
)
SELECTION_TABLE_COLUMNS = (
    "sigma_sq",
    "n",
    "trials",
    "avg_refit_mse_proposed",
    "avg_m_proposed",
    "sd_m_proposed",
    "avg_refit_mse_cv",
    "avg_m_cv",
    "sd_m_cv",
)
CV_COMPARISON_COLUMNS = (
    "sigma_sq",
    "n",
    "snr_db",
    "avg_refit_mse_proposed",
    "avg_refit_mse_cv",
    "proposed_total_time_ns",
    "cv_total_time_ns",
)
CURVE_COLUMNS = ("sweep_var", "oracle", "bound_known", "bound_general", "convention")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a reproduction run depends on. Two runs with equal configs
    produce byte-identical CSV output (timing columns aside), regardless of
    worker count."""

    truth_theta: tuple[float, ...] = TRUTH_THETA
    x_interval: tuple[float, float] = (0.0, 10.0)
    kernel: KernelSpec = field(default_factory=KernelSpec)
    noise_var_grid: tuple[float, ...] = (0.2,)
    n_grid: tuple[int, ...] = (50, 100, 200, 300)
    trials: int = 100
    params: ConfidenceParams = field(default_factory=ConfidenceParams)
    epsilon_grid: tuple[float, ...] = (0.1, 0.05, 0.02)
    master_seed: int = 20260814
    convention: str = CONVENTION_CANONICAL
    max_order_cap: int = 10
    cv_folds: int = 5
    sigma_policy: str = SIGMA_ORACLE

    @property
    def truth_order(self) -> int:
        return len(self.truth_theta)

    def validate(self) -> None:
        problems = []
        if len(self.truth_theta) < 1:
            problems.append("truth_theta: must have at least one coefficient")
        if not all(math.isfinite(t) for t in self.truth_theta):
            problems.append("truth_theta: coefficients must be finite")
        if len(self.truth_theta) > self.kernel.max_order:
            problems.append(
                f"truth_theta: {len(self.truth_theta)} coefficients exceed "
                f"kernel.max_order = {self.kernel.max_order}"
            )
        if self.kernel.family == CUSTOM_COLUMNS:
            problems.append("kernel: custom column functions are not configurable here")
        if not self.x_interval[0] < self.x_interval[1]:
            problems.append(f"x_interval: low must be < high, got {self.x_interval}")
        if len(self.noise_var_grid) == 0:
            problems.append("noise_var_grid: must be non-empty")
        if any(s < 0 for s in self.noise_var_grid):
            problems.append("noise_var_grid: entries must be >= 0")
        if len(self.n_grid) == 0:
            problems.append("n_grid: must be non-empty")
        if any(n < 2 for n in self.n_grid):
            problems.append("n_grid: entries must be >= 2")
        if list(self.n_grid) != sorted(set(self.n_grid)):
            problems.append("n_grid: entries must be strictly increasing")
        if self.trials < 1:
            problems.append("trials: must be >= 1")
        if len(self.epsilon_grid) == 0:
            problems.append("epsilon_grid: must be non-empty")
        if any(e <= 0 for e in self.epsilon_grid):
            problems.append("epsilon_grid: entries must be > 0")
        if not 0 <= self.master_seed < 2**63:
            problems.append("master_seed: must be a non-negative 63-bit integer")
        if self.convention not in CONVENTIONS:
            problems.append(f"convention: must be one of {CONVENTIONS}")
        if self.max_order_cap < 1:
            problems.append("max_order_cap: must be >= 1")
        if self.max_order_cap > self.kernel.max_order:
            problems.append(
                f"max_order_cap: {self.max_order_cap} exceeds kernel.max_order "
                f"= {self.kernel.max_order}"
            )
        if self.cv_folds < 2:
            problems.append("cv_folds: must be >= 2")
        if self.sigma_policy not in SIGMA_POLICIES:
            problems.append(f"sigma_policy: must be one of {SIGMA_POLICIES}")
        if self.params.alpha < 0 or self.params.beta < 0:
            problems.append("params: alpha and beta must be >= 0")
        if problems:
            raise BadShape("invalid config:\n  " + "\n  ".join(problems))

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "truth_theta": list(self.truth_theta),
            "x_interval": list(self.x_interval),
            "kernel": {"family": self.kernel.family, "max_order": self.kernel.max_order},
            "noise_var_grid": list(self.noise_var_grid),
            "n_grid": list(self.n_grid),
            "trials": self.trials,
            "params": {"alpha": self.params.alpha, "beta": self.params.beta},
            "epsilon_grid": list(self.epsilon_grid),
            "master_seed": self.master_seed,
            "convention": self.convention,
            "max_order_cap": self.max_order_cap,
            "cv_folds": self.cv_folds,
            "sigma_policy": self.sigma_policy,
        }

    @classmethod
    def from_json_dict(cls, raw: dict) -> "ExperimentConfig":
        """Build a config from parsed JSON, reporting every bad field at
        once rather than stopping at the first."""
        if not isinstance(raw, dict):
            raise BadShape("config: top level must be a JSON object")
        problems = []
        kwargs = {}

        def take(key, caster, what):
            if key in raw:
                try:
                    kwargs[key] = caster(raw[key])
                except (TypeError, ValueError) as exc:
                    problems.append(f"{key}: expected {what} ({exc})")

        take("truth_theta", lambda v: tuple(float(t) for t in v), "a list of numbers")
        take("x_interval", lambda v: (float(v[0]), float(v[1])), "a [low, high] pair")
        take(
            "kernel",
            lambda v: KernelSpec(
                family=str(v.get("family", KernelSpec().family)),
                max_order=int(v.get("max_order", KernelSpec().max_order)),
            ),
            "an object with family/max_order",
        )
        take("noise_var_grid", lambda v: tuple(float(s) for s in v), "a list of numbers")
        take("n_grid", lambda v: tuple(int(n) for n in v), "a list of integers")
        take("trials", int, "an integer")
        take(
            "params",
            lambda v: ConfidenceParams(alpha=float(v["alpha"]), beta=float(v["beta"])),
            "an object with alpha/beta",
        )
        take("epsilon_grid", lambda v: tuple(float(e) for e in v), "a list of numbers")
        take("master_seed", int, "an integer")
        take("convention", str, "a string")
        take("max_order_cap", int, "an integer")
        take("cv_folds", int, "an integer")
        take("sigma_policy", str, "a string")

        known = set(cls().to_json_dict()) | {"schema_version"}
        for key in raw:
            if key not in known:
                problems.append(f"{key}: unknown field")
        version = raw.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            problems.append(f"schema_version: expected {SCHEMA_VERSION}, got {version}")
        if problems:
            raise BadShape("invalid config:\n  " + "\n  ".join(problems))
        config = cls(**kwargs)
        config.validate()
        return config


@dataclass(frozen=True)
class TrialRecord:
    """Per-trial artifact row; everything is recomputable from
    (master_seed, trial_id) plus the cell's (n, sigma_sq)."""

    trial_id: int
    n: int
    sigma_sq: float
    r_ms_by_order: tuple[float, ...] = ()
    r_n_by_order: tuple[float, ...] = ()
    r_n_high_by_order: tuple[float, ...] = ()
    m_star_hat: int | None = None
    m_star_hat_cv: int | None = None
    refit_mse: float | None = None
    refit_mse_cv: float | None = None
    proposed_time_ns: int | None = None
    cv_time_ns: int | None = None


def _trial_generator(master_seed: int, trial_id: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[master_seed, trial_id]))


def _standard_normal(rng: np.random.Generator, count: int) -> np.ndarray:
    """Box-Muller, pinned here rather than delegated to rng.normal so the
    byte stream is stable across numpy versions: u1 in (0, 1], u2 in [0, 1),
    z = sqrt(-2 ln u1) cos(2 pi u2)."""
    u1 = 1.0 - rng.random(count)
    u2 = rng.random(count)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def _draw_xz(config: ExperimentConfig, count: int, trial_id: int):
    rng = _trial_generator(config.master_seed, trial_id)
    low, high = config.x_interval
    x = low + (high - low) * rng.random(count)
    z = _standard_normal(rng, count)
    return x, z


def _assemble(config: ExperimentConfig, x: np.ndarray, z: np.ndarray, sigma_sq: float) -> Dataset:
    theta = np.asarray(config.truth_theta)
    y_bar = build_design_matrix(x, config.truth_order, config.kernel) @ theta
    y = y_bar + math.sqrt(sigma_sq) * z
    return Dataset(x=x, y=y, y_bar=y_bar, noise_var=sigma_sq)


def generate_dataset(
    config: ExperimentConfig, n: int, sigma_sq: float, trial_id: int
) -> Dataset:
    """One synthetic dataset: x uniform on the config interval, noise-free
    targets from the truth polynomial, Gaussian noise of the given variance.
    Same (master_seed, trial_id) in, bit-identical Dataset out."""
    if n < 2:
        raise BadShape(f"n must be >= 2, got {n}")
    if sigma_sq < 0:
        raise BadShape(f"sigma_sq must be >= 0, got {sigma_sq}")
    x, z = _draw_xz(config, n, trial_id)
    return _assemble(config, x, z, sigma_sq)


def nested_datasets(
    config: ExperimentConfig, sigma_sq: float, trial_id: int
) -> list[tuple[int, Dataset]]:
    """Datasets at every grid size for one trial, nested by construction:
    the trial draws max(n_grid) points once and each smaller dataset is a
    prefix, so per-trial risk curves vary smoothly in n. Note the prefix at
    size n is not the same sample generate_dataset(n) would draw, because
    that call's noise stream starts earlier in the trial's sequence."""
    n_max = max(config.n_grid)
    x, z = _draw_xz(config, n_max, trial_id)
    out = []
    for n in config.n_grid:
        out.append((n, _assemble(config, x[:n], z[:n], sigma_sq)))
    return out


def _run_trials(trials: int, one_trial: Callable[[int], object], workers: int) -> list:
    """Run trial bodies on up to `workers` threads; results land in a
    trial-indexed list so aggregation order never depends on scheduling."""
    results = [None] * trials
    if workers <= 1:
        for t in range(trials):
            results[t] = one_trial(t)
        return results
    def slot(t: int) -> None:
        results[t] = one_trial(t)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(slot, range(trials)))
    return results


def _convention_factor(convention: str) -> float:
    if convention not in CONVENTIONS:
        raise BadShape(f"unknown convention {convention!r}")
    return 2.0 if convention == CONVENTION_DOUBLED else 1.0


def _first_crossing(
    n_grid: Sequence[int], means: np.ndarray, epsilon: float
) -> tuple[int | None, float | None]:
    """First grid n whose trial-mean meets epsilon (closed inequality), plus
    the linearly interpolated crossing between that n and its predecessor."""
    for i, n in enumerate(n_grid):
        if means[i] <= epsilon:
            if i == 0 or not math.isfinite(means[i - 1]):
                # No finite predecessor to interpolate against (first grid
                # point, or the curve certified nothing there).
                return n, float(n)
            v_prev, v_here = means[i - 1], means[i]
            frac = (v_prev - epsilon) / (v_prev - v_here)
            return n, float(n_grid[i - 1] + frac * (n - n_grid[i - 1]))
    return None, None


def run_sample_complexity_table(config: ExperimentConfig, workers: int = 1) -> list[dict]:
    """For each (noise variance, epsilon) pair: the grid n where the
    trial-averaged oracle KL-scale risk crosses epsilon, the closed-form n
    for a known true order, and the grid n where the trial-averaged general
    upper bound crosses epsilon. Rows where a curve never crosses carry
    empty n columns and a false `reached` flag.

    Trials that land outside the general bound's square-root domain
    contribute +inf at that n (the bound certifies nothing there), which
    keeps the averaged curve conservative instead of silently dropping
    trials.
    """
    config.validate()
    m_star = config.truth_order
    if min(config.n_grid) < m_star:
        raise BadShape(
            f"n_grid entries must be >= the truth order {m_star} so the true-order fit exists"
        )
    if any(s <= 0 for s in config.noise_var_grid):
        raise BadShape("sample-complexity runs need strictly positive noise variances")
    factor = _convention_factor(config.convention)
    grid_len = len(config.n_grid)
    rows = []
    for sigma_sq in config.noise_var_grid:

        def one_trial(t: int, sigma_sq: float = sigma_sq) -> tuple[np.ndarray, np.ndarray]:
            oracle = np.empty(grid_len)
            general = np.empty(grid_len)
            for i, (n, ds) in enumerate(nested_datasets(config, sigma_sq, t)):
                fr = fit(ds, m_star, config.kernel)
                oracle[i] = oracle_nmse(fr, ds.y_bar) / (2.0 * sigma_sq) * factor
                try:
                    rb = general_rn_bounds(fr.r_ms, m_star, n, sigma_sq, config.params)
                    general[i] = rb.r_2n_high * factor
                except KappaDomain:
                    general[i] = math.inf
            return oracle, general

        per_trial = _run_trials(config.trials, one_trial, workers)
        mean_oracle = np.mean([p[0] for p in per_trial], axis=0)
        mean_general = np.mean([p[1] for p in per_trial], axis=0)

        for epsilon in config.epsilon_grid:
            n_a, n_a_interp = _first_crossing(config.n_grid, mean_oracle, epsilon)
            n_c, n_c_interp = _first_crossing(config.n_grid, mean_general, epsilon)
            n_b = sample_complexity_known_order(
                m_star, epsilon / factor, config.params.beta
            )
            rows.append(
                {
                    "sigma_sq": sigma_sq,
                    "epsilon": epsilon,
                    "n_oracle": n_a,
                    "n_oracle_interp": n_a_interp,
                    "oracle_reached": n_a is not None,
                    "n_formula": n_b,
                    "n_general": n_c,
                    "n_general_interp": n_c_interp,
                    "general_reached": n_c is not None,
                }
            )
    return rows


def run_selection_table(config: ExperimentConfig, workers: int = 1) -> list[dict]:
    """Order-selection shootout at n = n_grid[0]: per noise variance, the
    average noise-free MSE of each method's refit model and the mean and
    standard deviation (population) of the selected order, proposed
    vs. k-fold cross-validation."""
    config.validate()
    n = config.n_grid[0]
    rows = []
    for sigma_sq in config.noise_var_grid:

        def one_trial(t: int, sigma_sq: float = sigma_sq) -> TrialRecord:
            ds = generate_dataset(config, n, sigma_sq, t)
            report = select_order(
                ds,
                config.max_order_cap,
                config.kernel,
                config.params,
                config.sigma_policy,
                config.convention,
            )
            refit = fit(ds, report.m_star_hat, config.kernel)
            cv = kfold_select_order(
                ds,
                config.max_order_cap,
                config.cv_folds,
                config.kernel,
                seed=config.master_seed + t,
            )
            return TrialRecord(
                trial_id=t,
                n=n,
                sigma_sq=sigma_sq,
                m_star_hat=report.m_star_hat,
                m_star_hat_cv=cv.m_star_hat,
                refit_mse=oracle_nmse(refit, ds.y_bar),
                refit_mse_cv=oracle_nmse(cv.refit, ds.y_bar),
            )

        records = _run_trials(config.trials, one_trial, workers)
        m_p = np.array([r.m_star_hat for r in records], dtype=float)
        m_c = np.array([r.m_star_hat_cv for r in records], dtype=float)
        rows.append(
            {
                "sigma_sq": sigma_sq,
                "n": n,
                "trials": config.trials,
                "avg_refit_mse_proposed": float(np.mean([r.refit_mse for r in records])),
                "avg_m_proposed": float(np.mean(m_p)),
                "sd_m_proposed": float(np.std(m_p)),
                "avg_refit_mse_cv": float(np.mean([r.refit_mse_cv for r in records])),
                "avg_m_cv": float(np.mean(m_c)),
                "sd_m_cv": float(np.std(m_c)),
            }
        )
    return rows


def run_cv_comparison(config: ExperimentConfig) -> list[dict]:
    """Wall-clock and accuracy contest per (noise variance, n) cell. Trials
    run sequentially on one worker by design: the whole point of the table
    is the timing contrast, so neither method may share its cell with
    concurrent work. Columns ending in _time_ns are the only
    non-reproducible ones."""
    config.validate()
    rows = []
    for sigma_sq in config.noise_var_grid:
        for n in config.n_grid:
            records = []
            signal_vars = []
            for t in range(config.trials):
                ds = generate_dataset(config, n, sigma_sq, t)
                signal_vars.append(float(np.var(ds.y_bar)))
                t0 = time.perf_counter_ns()
                report = select_order(
                    ds,
                    config.max_order_cap,
                    config.kernel,
                    config.params,
                    config.sigma_policy,
                    config.convention,
                )
                refit = fit(ds, report.m_star_hat, config.kernel)
                t1 = time.perf_counter_ns()
                cv = kfold_select_order(
                    ds,
                    config.max_order_cap,
                    config.cv_folds,
                    config.kernel,
                    seed=config.master_seed + t,
                )
                t2 = time.perf_counter_ns()
                records.append(
                    TrialRecord(
                        trial_id=t,
                        n=n,
                        sigma_sq=sigma_sq,
                        m_star_hat=report.m_star_hat,
                        m_star_hat_cv=cv.m_star_hat,
                        refit_mse=oracle_nmse(refit, ds.y_bar),
                        refit_mse_cv=oracle_nmse(cv.refit, ds.y_bar),
                        proposed_time_ns=t1 - t0,
                        cv_time_ns=t2 - t1,
                    )
                )
            mean_signal = float(np.mean(signal_vars))
            snr_db = (
                10.0 * math.log10(mean_signal / sigma_sq) if sigma_sq > 0 else math.inf
            )
            rows.append(
                {
                    "sigma_sq": sigma_sq,
                    "n": n,
                    "snr_db": snr_db,
                    "avg_refit_mse_proposed": float(
                        np.mean([r.refit_mse for r in records])
                    ),
                    "avg_refit_mse_cv": float(np.mean([r.refit_mse_cv for r in records])),
                    "proposed_total_time_ns": int(
                        sum(r.proposed_time_ns for r in records)
                    ),
                    "cv_total_time_ns": int(sum(r.cv_time_ns for r in records)),
                }
            )
    return rows


def run_bound_curves(config: ExperimentConfig, workers: int = 1) -> dict[str, list[dict]]:
    """Trial-averaged risk curves, all on the KL scale of the configured
    convention and all normalized by the true noise variance so the three
    columns are comparable.

    per_n: sweep n at the true order. `bound_known` is the closed-form
    known-order bound (no data needed), `bound_general` the averaged general
    bound evaluated on each trial's empirical MSE.

    per_m: sweep the order at n = max(n_grid). `bound_known` is the averaged
    known-order bound evaluated through the empirical MSE (the form used
    when the noise variance must be inferred), renormalized by the true
    variance; `bound_general` as above.

    Uses noise_var_grid[0] as the noise level.
    """
    config.validate()
    sigma_sq = config.noise_var_grid[0]
    if sigma_sq <= 0:
        raise BadShape("bound curves need a strictly positive noise variance")
    m_star = config.truth_order
    if min(config.n_grid) < m_star:
        raise BadShape(
            f"n_grid entries must be >= the truth order {m_star} so the true-order fit exists"
        )
    factor = _convention_factor(config.convention)
    grid_len = len(config.n_grid)
    n_fixed = max(config.n_grid)
    m_grid = list(range(1, config.max_order_cap + 1))
    two_sigma = 2.0 * sigma_sq

    def one_trial(t: int):
        oracle_n = np.empty(grid_len)
        general_n = np.empty(grid_len)
        for i, (n, ds) in enumerate(nested_datasets(config, sigma_sq, t)):
            fr = fit(ds, m_star, config.kernel)
            oracle_n[i] = oracle_nmse(fr, ds.y_bar) / two_sigma
            try:
                general_n[i] = general_rn_bounds(
                    fr.r_ms, m_star, n, sigma_sq, config.params
                ).r_2n_high
            except KappaDomain:
                general_n[i] = math.inf
        ds = generate_dataset(config, n_fixed, sigma_sq, t)
        oracle_m = np.empty(len(m_grid))
        known_m = np.empty(len(m_grid))
        general_m = np.empty(len(m_grid))
        for j, m in enumerate(m_grid):
            fr = fit(ds, m, config.kernel)
            oracle_m[j] = oracle_nmse(fr, ds.y_bar) / two_sigma
            known_m[j] = (
                rn_bounds_via_mse_known_order(fr.r_ms, m, n_fixed, config.params).r_n_high
                / two_sigma
            )
            try:
                general_m[j] = general_rn_bounds(
                    fr.r_ms, m, n_fixed, sigma_sq, config.params
                ).r_2n_high
            except KappaDomain:
                general_m[j] = math.inf
        return oracle_n, general_n, oracle_m, known_m, general_m

    per_trial = _run_trials(config.trials, one_trial, workers)

    def mean(k: int) -> np.ndarray:
        return np.mean([p[k] for p in per_trial], axis=0)

    oracle_n, general_n = mean(0), mean(1)
    oracle_m, known_m, general_m = mean(2), mean(3), mean(4)

    per_n = []
    for i, n in enumerate(config.n_grid):
        per_n.append(
            {
                "sweep_var": n,
                "oracle": float(oracle_n[i]) * factor,
                "bound_known": rn_bounds_known_order(
                    m_star, n, sigma_sq, config.params.beta
                ).r_2n_high
                * factor,
                "bound_general": float(general_n[i]) * factor,
                "convention": config.convention,
            }
        )
    per_m = []
    for j, m in enumerate(m_grid):
        per_m.append(
            {
                "sweep_var": m,
                "oracle": float(oracle_m[j]) * factor,
                "bound_known": float(known_m[j]) * factor,
                "bound_general": float(general_m[j]) * factor,
                "convention": config.convention,
            }
        )
    return {"per_n": per_n, "per_m": per_m}


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: str, rows: list[dict], columns: Sequence[str]) -> None:
    """CSV writer with round-trip float formatting (repr), so equal numbers
    always produce equal bytes."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(row[c]) for c in columns])


def write_manifest(path: str, config: ExperimentConfig, outputs: list[str]) -> None:
    from . import __version__

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "config": config.to_json_dict(),
        "outputs": sorted(os.path.basename(p) for p in outputs),
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def smoke_config(**overrides) -> ExperimentConfig:
    """Small, fast config for tests and demos; override any field."""
    base = ExperimentConfig(
        noise_var_grid=(0.2,),
        n_grid=(50, 100, 150),
        trials=20,
        epsilon_grid=(0.1, 0.05),
    )
    return replace(base, **overrides)
