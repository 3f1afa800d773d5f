"""Order selection: pick the hypothesis-class order whose worst-case
KL-scale risk bound is smallest, and validate that the chosen order is an
interior minimum of the scanned grid rather than an artifact of the cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bounds import (
    CONVENTION_CANONICAL,
    CONVENTIONS,
    ConfidenceParams,
    NoiseVarianceRange,
    d2nmse_upper,
    validate_noise_variance,
)
from .exceptions import BadShape, InsufficientSamples, NonpositiveVariance
from .regression import Dataset, KernelSpec, rms_scan

SIGMA_ORACLE = "oracle"
SIGMA_ESTIMATED = "estimated"
SIGMA_POLICIES = (SIGMA_ORACLE, SIGMA_ESTIMATED)

VERDICT_INTERIOR = "interior_minimum"
VERDICT_AT_CAP = "at_cap_extend_M"


def argmin_with_ties(values: Sequence[float]) -> int:
    """Index of the smallest value, breaking near-ties toward the first.

    Two entries count as tied when they differ by at most
    max(1e-9 |v_min|, 1e-12 (1 + |v_max|)); that resolves exact-arithmetic
    ties and noise at the bottom of noiseless error curves to the smallest
    order, without ever merging genuinely distinct bound values.
    NaN entries (excluded orders) never win.
    """
    arr = np.asarray(values, dtype=float)
    finite = np.isfinite(arr)
    if not finite.any():
        raise BadShape("no finite values to minimize over")
    vmin = float(np.min(arr[finite]))
    vmax = float(np.max(arr[finite]))
    tol = max(1e-9 * abs(vmin), 1e-12 * (1.0 + abs(vmax)))
    winners = finite & (arr <= vmin + tol)
    return int(np.argmax(winners))


@dataclass(frozen=True)
class SelectionReport:
    """Result of one order-selection scan.

    bound_curve holds the per-order upper bound (NaN for excluded orders),
    r_ms_curve the per-order empirical MSE, m_star_hat the winning order and
    epsilon_min its bound value, i.e. the smallest accuracy target for which
    some scanned order is learnable on this data. The bound formula is
    reported as computed, so epsilon_min can come out nonpositive on a
    low-noise draw; that simply means every positive target is already met
    at the winning order.
    """

    n: int
    m_grid: tuple[int, ...]
    bound_curve: tuple[float, ...]
    r_ms_curve: tuple[float, ...]
    m_star_hat: int
    epsilon_min: float
    params: ConfidenceParams
    sigma_policy: str
    boundary_verdict: str
    convention: str = CONVENTION_CANONICAL
    sigma_sq_used: float = float("nan")
    noise_range: NoiseVarianceRange | None = None
    excluded_orders: tuple[int, ...] = ()

    def to_json_dict(self) -> dict:
        def _clean(v: float):
            return None if (isinstance(v, float) and not math.isfinite(v)) else v

        out = {
            "n": self.n,
            "m_grid": list(self.m_grid),
            "bound_curve": [_clean(v) for v in self.bound_curve],
            "r_ms_curve": [_clean(v) for v in self.r_ms_curve],
            "m_star_hat": self.m_star_hat,
            "epsilon_min": self.epsilon_min,
            "params": {
                "alpha": self.params.alpha,
                "beta": self.params.beta,
                "p_alpha": self.params.p_alpha,
                "p_beta": self.params.p_beta,
            },
            "sigma_policy": self.sigma_policy,
            "boundary_verdict": self.boundary_verdict,
            "convention": self.convention,
            "sigma_sq_used": _clean(self.sigma_sq_used),
            "excluded_orders": list(self.excluded_orders),
        }
        if self.noise_range is not None:
            out["noise_range"] = {
                "low": self.noise_range.low,
                "high": self.noise_range.high,
                "p_alpha": self.noise_range.p_alpha,
                "source_r_ms": self.noise_range.source_r_ms,
                "m": self.noise_range.m,
                "n": self.noise_range.n,
            }
        return out


def _resolve_sigma(
    dataset: Dataset,
    max_order: int,
    r_ms_at_cap: float,
    params: ConfidenceParams,
    sigma_policy: str,
) -> tuple[float, NoiseVarianceRange | None]:
    if sigma_policy == SIGMA_ORACLE:
        if dataset.noise_var is None or dataset.noise_var <= 0.0:
            raise NonpositiveVariance(
                "sigma_policy='oracle' needs dataset.noise_var > 0; "
                "use sigma_policy='estimated' for real data"
            )
        return float(dataset.noise_var), None
    if sigma_policy == SIGMA_ESTIMATED:
        if not math.isfinite(r_ms_at_cap) or r_ms_at_cap <= 0.0:
            raise NonpositiveVariance(
                "cannot estimate the noise variance: the largest-order fit is "
                "excluded or interpolates the data exactly"
            )
        rng = validate_noise_variance(r_ms_at_cap, max_order, dataset.n, params.alpha)
        return rng.midpoint, rng
    raise BadShape(f"unknown sigma_policy {sigma_policy!r}")


def select_order(
    dataset: Dataset,
    max_order: int,
    kernel: KernelSpec | None = None,
    params: ConfidenceParams = ConfidenceParams(),
    sigma_policy: str = SIGMA_ORACLE,
    convention: str = CONVENTION_CANONICAL,
) -> SelectionReport:
    """Scan orders 1..max_order, bound each order's noise-free risk, and
    return the order with the smallest bound (ties break to the smallest
    order).

    The empirical-MSE curve comes from a single incremental QR pass, so the
    scan costs O(max_order^2 n) rather than one full refit per order.
    Orders whose design column is numerically dependent are excluded from
    the curve (recorded on the report) instead of failing the scan. The
    noise variance is taken from the dataset (sigma_policy='oracle') or from
    the validated range at the largest order (sigma_policy='estimated',
    which requires n - max_order > 2 alpha^2).
    """
    if kernel is None:
        kernel = KernelSpec(max_order=max_order)
    if convention not in CONVENTIONS:
        raise BadShape(f"unknown convention {convention!r}")
    n = dataset.n
    if max_order < 1:
        raise BadShape("max_order must be >= 1")
    if max_order > n - 1:
        raise BadShape(
            f"max_order must be <= n - 1 = {n - 1} (the bound needs m < n), got {max_order}"
        )
    if sigma_policy == SIGMA_ESTIMATED and n - max_order <= 2.0 * params.alpha**2:
        raise InsufficientSamples(
            f"estimating the noise variance at order {max_order} needs "
            f"n - max_order > 2 alpha^2 = {2.0 * params.alpha ** 2:g}; "
            f"n must be at least {max_order + math.floor(2.0 * params.alpha ** 2) + 1}"
        )

    scan = rms_scan(dataset, max_order, kernel)
    r_ms_curve = scan.r_ms
    effective_cap = max_order if not scan.excluded_orders else scan.excluded_orders[0] - 1
    if effective_cap < 1:
        raise BadShape("no usable orders: the first design column is already degenerate")
    sigma_sq, noise_range = _resolve_sigma(
        dataset, effective_cap, r_ms_curve[effective_cap - 1], params, sigma_policy
    )

    bound_curve = np.full(max_order, np.nan)
    for m in range(1, effective_cap + 1):
        bound_curve[m - 1] = d2nmse_upper(
            float(r_ms_curve[m - 1]), m, n, sigma_sq, params, convention
        )
    idx = argmin_with_ties(bound_curve)
    m_star_hat = idx + 1
    verdict = VERDICT_AT_CAP if m_star_hat == max_order else VERDICT_INTERIOR
    return SelectionReport(
        n=n,
        m_grid=tuple(range(1, max_order + 1)),
        bound_curve=tuple(float(v) for v in bound_curve),
        r_ms_curve=tuple(float(v) for v in r_ms_curve),
        m_star_hat=m_star_hat,
        epsilon_min=float(bound_curve[idx]),
        params=params,
        sigma_policy=sigma_policy,
        boundary_verdict=verdict,
        convention=convention,
        sigma_sq_used=sigma_sq,
        noise_range=noise_range,
        excluded_orders=scan.excluded_orders,
    )


def epsilon_min(report: SelectionReport) -> float:
    """Smallest accuracy target any scanned order can meet on this data."""
    return report.bound_curve[report.m_star_hat - 1]


def validate_order_cap(
    dataset: Dataset,
    m_init: int,
    m_max: int,
    kernel: KernelSpec | None = None,
    params: ConfidenceParams = ConfidenceParams(),
    sigma_policy: str = SIGMA_ORACLE,
    convention: str = CONVENTION_CANONICAL,
    epsilon: float | None = None,
) -> SelectionReport:
    """Run select_order, doubling the order cap whenever the minimum lands on
    the cap, until the minimum is interior, the cap reaches m_max, or (if an
    epsilon target is given) the bound at the cap already meets it.

    The final report's verdict says whether the eventual minimum was
    interior or still pinned at m_max.
    """
    if not (1 <= m_init <= m_max):
        raise BadShape(f"need 1 <= m_init <= m_max, got {m_init}, {m_max}")
    if m_max > dataset.n - 1:
        raise BadShape(f"m_max must be <= n - 1 = {dataset.n - 1}")
    if kernel is None:
        kernel = KernelSpec(max_order=m_max)
    cap = m_init
    while True:
        report = select_order(dataset, cap, kernel, params, sigma_policy, convention)
        if report.boundary_verdict == VERDICT_INTERIOR:
            return report
        if epsilon is not None and report.epsilon_min <= epsilon:
            return report  # learnable at the cap already; stop growing
        if cap >= m_max:
            return report
        cap = min(2 * cap, m_max)
