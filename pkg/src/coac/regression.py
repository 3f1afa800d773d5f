"""Nested-order regression: design matrices, per-order least-squares fits,
empirical and oracle risks, and the KL divergence notion of distance that
the learnability bounds are phrased in.

Hypothesis classes are prefix-nested: the order-m class uses the first m
kernel columns. The default kernel has no intercept column, matching the
data-generating convention of the bundled simulation study.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exceptions import (
    BadShape,
    DataFormatError,
    LengthMismatch,
    NonFiniteData,
    NonpositiveVariance,
    OrderExceedsData,
    OrderExceedsKernel,
    RankDeficient,
)
from .linalg import IncrementalQr, as_vector, solve_least_squares

POLY_NO_INTERCEPT = "polynomial_no_intercept"
POLY_WITH_INTERCEPT = "polynomial_with_intercept"
CUSTOM_COLUMNS = "custom_column_functions"
_FAMILIES = (POLY_NO_INTERCEPT, POLY_WITH_INTERCEPT, CUSTOM_COLUMNS)


@dataclass(frozen=True)
class Dataset:
    """One training set: inputs x, noisy targets y, and (in simulation mode)
    the noise-free targets y_bar and the true noise variance.

    noise_var may be 0 (noise-free simulation); operations that divide by it
    raise NonpositiveVariance in that case.
    """

    x: np.ndarray
    y: np.ndarray
    y_bar: np.ndarray | None = None
    noise_var: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "x", as_vector(self.x))
        object.__setattr__(self, "y", as_vector(self.y))
        if self.x.shape[0] != self.y.shape[0]:
            raise LengthMismatch(
                f"x has {self.x.shape[0]} entries but y has {self.y.shape[0]}"
            )
        if self.x.shape[0] < 2:
            raise BadShape("need at least 2 samples")
        if self.y_bar is not None:
            object.__setattr__(self, "y_bar", as_vector(self.y_bar))
            if self.y_bar.shape[0] != self.x.shape[0]:
                raise LengthMismatch("y_bar length differs from x")
        if self.noise_var is not None:
            nv = float(self.noise_var)
            if not math.isfinite(nv) or nv < 0.0:
                raise NonpositiveVariance(f"noise_var must be >= 0, got {self.noise_var}")
            object.__setattr__(self, "noise_var", nv)

    @property
    def n(self) -> int:
        return int(self.x.shape[0])


@dataclass(frozen=True)
class KernelSpec:
    """Which feature columns make up the nested classes.

    family: one of polynomial_no_intercept (column j is x**j, j = 1..m),
    polynomial_with_intercept (column j is x**(j-1)), or
    custom_column_functions (caller-supplied callables, first m are used).
    max_order: largest order M any caller may request.
    """

    family: str = POLY_NO_INTERCEPT
    max_order: int = 10
    column_functions: tuple[Callable[[np.ndarray], np.ndarray], ...] = field(default=())

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise BadShape(f"unknown kernel family {self.family!r}")
        if self.max_order < 1:
            raise BadShape("max_order must be >= 1")
        if self.family == CUSTOM_COLUMNS and len(self.column_functions) < self.max_order:
            raise BadShape(
                f"custom kernel supplies {len(self.column_functions)} columns "
                f"but max_order is {self.max_order}"
            )


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit of one order: coefficients, predictions, and the
    empirical mean squared error r_ms = ||y_hat - y||^2 / n."""

    order: int
    theta_hat: np.ndarray
    y_hat: np.ndarray
    r_ms: float
    n: int


def build_design_matrix(x, m: int, kernel: KernelSpec) -> np.ndarray:
    """n x m design matrix for the order-m class of `kernel`.

    No row-count requirement: a matrix with fewer rows than columns is fine
    for prediction (evaluating a fitted model on new points). Fitting is
    where rows >= columns matters, and `fit` enforces that."""
    x = as_vector(x)
    if m < 1:
        raise BadShape(f"order must be >= 1, got {m}")
    if m > kernel.max_order:
        raise OrderExceedsKernel(f"order {m} exceeds kernel max_order {kernel.max_order}")
    if kernel.family == POLY_NO_INTERCEPT:
        return x[:, None] ** np.arange(1, m + 1)
    if kernel.family == POLY_WITH_INTERCEPT:
        return x[:, None] ** np.arange(0, m)
    with np.errstate(all="ignore"):
        cols = [np.asarray(f(x), dtype=float) for f in kernel.column_functions[:m]]
    a = np.column_stack(cols)
    if not np.isfinite(a).all():
        raise NonFiniteData("custom kernel produced non-finite column values")
    return a


def fit(dataset: Dataset, m: int, kernel: KernelSpec) -> FitResult:
    """Least-squares fit of the order-m class to the dataset."""
    if m > dataset.n:
        raise OrderExceedsData(f"order {m} exceeds the {dataset.n} available samples")
    a = build_design_matrix(dataset.x, m, kernel)
    theta = solve_least_squares(a, dataset.y)
    y_hat = a @ theta
    resid = y_hat - dataset.y
    return FitResult(
        order=m,
        theta_hat=theta,
        y_hat=y_hat,
        r_ms=float(resid @ resid) / dataset.n,
        n=dataset.n,
    )


def empirical_mse(fit_result: FitResult, y) -> float:
    """(1/n) ||y_hat - y||^2 against the supplied targets."""
    y = as_vector(y)
    if y.shape[0] != fit_result.y_hat.shape[0]:
        raise LengthMismatch("y length differs from the fit's predictions")
    d = fit_result.y_hat - y
    return float(d @ d) / y.shape[0]


def oracle_nmse(fit_result: FitResult, y_bar) -> float:
    """Noise-free risk (1/n) ||y_hat - y_bar||^2; needs ground truth, so it
    is only computable in simulation mode."""
    y_bar = as_vector(y_bar)
    if y_bar.shape[0] != fit_result.y_hat.shape[0]:
        raise LengthMismatch("y_bar length differs from the fit's predictions")
    d = fit_result.y_hat - y_bar
    return float(d @ d) / y_bar.shape[0]


def kl_gaussian_equal_var(mu1, mu2, noise_var: float, n: int | None = None) -> float:
    """KL divergence between N(mu1, s2 I) and N(mu2, s2 I), per sample:
    ||mu1 - mu2||^2 / (2 n s2)."""
    mu1 = as_vector(mu1)
    mu2 = as_vector(mu2)
    if mu1.shape[0] != mu2.shape[0]:
        raise LengthMismatch("mu1 and mu2 lengths differ")
    if n is not None and n != mu1.shape[0]:
        raise LengthMismatch(f"n={n} but vectors have length {mu1.shape[0]}")
    if noise_var <= 0.0:
        raise NonpositiveVariance(f"noise_var must be > 0, got {noise_var}")
    d = mu1 - mu2
    return float(d @ d) / (2.0 * mu1.shape[0] * noise_var)


def read_dataset_csv(path) -> Dataset:
    """Load a Dataset from a CSV file with header `x,y` or `x,y,y_bar`.

    Decimal parsing is locale-independent (always '.'), and any row with a
    missing or non-finite value is rejected with its 1-based line number.
    """
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("empty CSV file") from None
        names = [h.strip().lower() for h in header]
        if names not in (["x", "y"], ["x", "y", "y_bar"]):
            raise DataFormatError(
                f"expected header 'x,y' or 'x,y,y_bar', got {','.join(header)!r}"
            )
        ncols = len(names)
        cols: list[list[float]] = [[] for _ in range(ncols)]
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue  # ignore blank lines
            if len(row) != ncols:
                raise DataFormatError(f"line {lineno}: expected {ncols} fields, got {len(row)}")
            for j, cell in enumerate(row):
                try:
                    value = float(cell)
                except ValueError:
                    raise DataFormatError(
                        f"line {lineno}: cannot parse {cell!r} in column {names[j]}"
                    ) from None
                if not math.isfinite(value):
                    raise DataFormatError(
                        f"line {lineno}: non-finite value in column {names[j]}"
                    )
                cols[j].append(value)
    if len(cols[0]) < 2:
        raise DataFormatError("need at least 2 data rows")
    y_bar = np.asarray(cols[2]) if ncols == 3 else None
    return Dataset(x=np.asarray(cols[0]), y=np.asarray(cols[1]), y_bar=y_bar)


@dataclass(frozen=True)
class RmsScan:
    """Output of rms_scan: r_ms per order (NaN where excluded) plus the
    orders excluded for rank deficiency."""

    r_ms: np.ndarray
    excluded_orders: tuple[int, ...]


def rms_scan(dataset: Dataset, max_m: int, kernel: KernelSpec) -> RmsScan:
    """Empirical-MSE curve over orders 1..max_m via one incremental QR pass.

    Returns an RmsScan carrying r_ms per order and the list of orders (if
    any) excluded because their design column was numerically dependent.
    Nested classes all contain a dependent column once one appears, so the
    scan stops at the first deficiency and marks every later order excluded.
    """
    if max_m > kernel.max_order:
        raise OrderExceedsKernel(f"max_m {max_m} exceeds kernel max_order {kernel.max_order}")
    if max_m > dataset.n:
        raise OrderExceedsData(f"max_m {max_m} exceeds the {dataset.n} samples")
    full = build_design_matrix(dataset.x, max_m, kernel)
    inc = IncrementalQr(dataset.y)
    r_ms = np.full(max_m, np.nan)
    excluded: list[int] = []
    for m in range(1, max_m + 1):
        if excluded:
            excluded.append(m)
            continue
        try:
            inc.append_column(full[:, m - 1])
        except RankDeficient:
            excluded.append(m)
            continue
        r_ms[m - 1] = inc.residual_sum_squares() / dataset.n
    return RmsScan(r_ms=r_ms, excluded_orders=tuple(excluded))
