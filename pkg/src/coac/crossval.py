"""Shuffled k-fold cross-validation order selection, the baseline the
bound-driven selector is compared against.

Each order is scored by the mean held-out MSE over k folds, each fold's
model trained from scratch on the complement of the held-out block. The
winning order is refit on the full dataset. Folds and orders could be
evaluated concurrently; this implementation keeps them sequential because
the per-fit work is small and the reduction must be deterministic anyway.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .exceptions import BadShape, FoldTooSmall
from .regression import Dataset, FitResult, KernelSpec, build_design_matrix, fit
from .selection import argmin_with_ties


@dataclass(frozen=True)
class CvReport:
    """Outcome of one k-fold selection run.

    cv_error_curve[m-1] is the mean held-out MSE at order m; wall_time_ns
    covers the shuffle, every per-fold fit, and the final full-data refit.
    """

    k: int
    m_grid: tuple[int, ...]
    cv_error_curve: tuple[float, ...]
    m_star_hat: int
    wall_time_ns: int
    refit: FitResult
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "m_grid": list(self.m_grid),
            "cv_error_curve": list(self.cv_error_curve),
            "m_star_hat": self.m_star_hat,
            "wall_time_ns": self.wall_time_ns,
            "seed": self.seed,
            "refit": {
                "order": self.refit.order,
                "theta_hat": [float(t) for t in self.refit.theta_hat],
                "r_ms": self.refit.r_ms,
                "n": self.refit.n,
            },
        }


def fold_index_sets(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Shuffle 0..n-1 with a counter-based generator keyed on the seed and
    split into k folds whose sizes differ by at most one."""
    rng = np.random.Generator(np.random.Philox(key=[seed, 0]))
    return np.array_split(rng.permutation(n), k)


def kfold_select_order(
    dataset: Dataset,
    max_order: int,
    k: int,
    kernel: KernelSpec | None = None,
    seed: int = 0,
) -> CvReport:
    """Pick the order whose mean held-out MSE over k shuffled folds is
    smallest (ties break to the smallest order), then refit it on all rows.

    Every (fold, order) pair is a from-scratch fit on the training
    complement; nothing is shared between folds, which is exactly what makes
    this the slow baseline. k = n gives leave-one-out.
    """
    if kernel is None:
        kernel = KernelSpec(max_order=max_order)
    n = dataset.n
    if max_order < 1:
        raise BadShape("max_order must be >= 1")
    if not 2 <= k <= n:
        raise BadShape(f"need 2 <= k <= n = {n}, got k = {k}")

    start = time.perf_counter_ns()
    folds = fold_index_sets(n, k, seed)
    max_fold = max(len(f) for f in folds)
    min_train = n - max_fold
    if min_train < max(max_order, 2):
        raise FoldTooSmall(
            f"smallest training split has {min_train} rows; needs at least "
            f"max(max_order, 2) = {max(max_order, 2)} to fit order {max_order}"
        )

    sums = np.zeros(max_order)
    all_idx = np.arange(n)
    for held_out in folds:
        mask = np.ones(n, dtype=bool)
        mask[held_out] = False
        train_idx = all_idx[mask]
        train = Dataset(x=dataset.x[train_idx], y=dataset.y[train_idx])
        x_out = dataset.x[held_out]
        y_out = dataset.y[held_out]
        for m in range(1, max_order + 1):
            model = fit(train, m, kernel)
            pred = build_design_matrix(x_out, m, kernel) @ model.theta_hat
            sums[m - 1] += float(np.mean((y_out - pred) ** 2))
    curve = sums / k

    m_star_hat = argmin_with_ties(curve) + 1
    refit = fit(dataset, m_star_hat, kernel)
    elapsed = time.perf_counter_ns() - start
    return CvReport(
        k=k,
        m_grid=tuple(range(1, max_order + 1)),
        cv_error_curve=tuple(float(v) for v in curve),
        m_star_hat=m_star_hat,
        wall_time_ns=elapsed,
        refit=refit,
        seed=seed,
    )
