"""Probabilistic bounds on the noise-free risk of a least-squares fit.

The observable empirical MSE and the unobservable noise-free MSE of an
order-m fit are both quadratic forms in the Gaussian noise, so their means
and variances are those of (scaled, possibly shifted) chi-square variables.
Chebyshev's inequality turns those moments into distribution-free confidence
intervals:

  * alpha is the multiplier used when validating a noise-variance range from
    the empirical MSE (validation probability P_alpha = 1 - 1/alpha^2);
  * beta is the multiplier used when bounding the noise-free risk itself
    (confidence probability P_beta = 1 - 1/beta^2).

Two normalization conventions for the bound on the KL-scale risk are
exposed. The canonical one divides the noise-free MSE bound by 2 sigma^2,
which makes it exactly a KL divergence between equal-variance Gaussians.
The "doubled" convention divides by sigma^2 instead; it reproduces a
published curve verbatim and is exactly twice the canonical value, so
threshold values of epsilon differ by a factor of 2 between conventions
while any argmin over orders is unaffected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .exceptions import (
    BadShape,
    InsufficientSamples,
    KappaDomain,
    NonpositiveEpsilon,
    NonpositiveVariance,
    NotReached,
)
from .regression import KernelSpec, fit

CONVENTION_CANONICAL = "canonical_half"
CONVENTION_DOUBLED = "doubled"
CONVENTIONS = (CONVENTION_CANONICAL, CONVENTION_DOUBLED)

MODE_KNOWN_ORDER = "known_order"
MODE_GENERAL = "general"


def _chebyshev_probability(multiplier: float) -> float:
    if multiplier <= 0.0:
        return 0.0
    return max(0.0, 1.0 - 1.0 / (multiplier * multiplier))


@dataclass(frozen=True)
class ConfidenceParams:
    """Chebyshev multipliers: alpha for noise-variance validation, beta for
    the risk bound itself. Probabilities are reported on the Chebyshev scale
    max(0, 1 - 1/multiplier^2); no Gaussian-quantile reading is applied."""

    alpha: float = 2.0
    beta: float = 2.0

    def __post_init__(self):
        if self.alpha < 0.0 or self.beta < 0.0:
            raise BadShape("alpha and beta must be >= 0")

    @property
    def p_alpha(self) -> float:
        return _chebyshev_probability(self.alpha)

    @property
    def p_beta(self) -> float:
        return _chebyshev_probability(self.beta)


@dataclass(frozen=True)
class NoiseVarianceRange:
    """Validated noise-variance interval derived from an empirical MSE."""

    low: float
    high: float
    p_alpha: float
    source_r_ms: float
    m: int
    n: int

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.low + self.high)


@dataclass(frozen=True)
class RiskBounds:
    """Two-sided bounds on the noise-free risk r_n and its KL-scale version
    r_2n = r_n / (2 sigma_sq_used); lower ends are clamped at zero."""

    m: int
    n: int
    r_n_low: float
    r_n_high: float
    r_2n_low: float
    r_2n_high: float
    params: ConfidenceParams
    sigma_sq_used: float
    mode: str


def _check_m_n(m: int, n: int, m_max_inclusive: bool = True) -> None:
    if m < 1:
        raise BadShape(f"order must be >= 1, got {m}")
    if m_max_inclusive:
        if m > n:
            raise BadShape(f"order m={m} exceeds sample count n={n}")
    elif m >= n:
        raise BadShape(f"need m < n, got m={m}, n={n}")


def chisq_moments_rn(m: int, n: int, sigma_sq: float) -> tuple[float, float]:
    """Mean and variance of the noise-free risk when the order-m class
    contains the truth: the fitted deviation is a projection of the noise
    onto an m-dimensional subspace.

    mean = (m/n) sigma_sq, variance = (2m/n^2) sigma_sq^2.
    """
    _check_m_n(m, n)
    if sigma_sq <= 0.0:
        raise NonpositiveVariance(f"sigma_sq must be > 0, got {sigma_sq}")
    mean = (m / n) * sigma_sq
    variance = (2.0 * m / (n * n)) * sigma_sq * sigma_sq
    return mean, variance


def chisq_moments_rms(
    m: int, n: int, sigma_sq: float, unmodeled_energy: float = 0.0
) -> tuple[float, float]:
    """Mean and variance of the empirical MSE at order m.

    unmodeled_energy is the per-sample squared norm of the truth component
    outside the order-m column space (0 when the class contains the truth).
    m = 0 is accepted as the no-fit limit, where the mean is sigma_sq plus
    the unmodeled energy.
    """
    if m < 0:
        raise BadShape(f"order must be >= 0, got {m}")
    if m >= n:
        raise BadShape(f"need m < n, got m={m}, n={n}")
    if sigma_sq <= 0.0:
        raise NonpositiveVariance(f"sigma_sq must be > 0, got {sigma_sq}")
    if unmodeled_energy < 0.0:
        raise BadShape("unmodeled_energy must be >= 0")
    frac = 1.0 - m / n
    mean = frac * sigma_sq + unmodeled_energy
    variance = (2.0 / n) * frac * sigma_sq ** 2 + (4.0 * sigma_sq / n ** 2) * (
        n * unmodeled_energy
    )
    return mean, variance


def rn_bounds_known_order(m: int, n: int, sigma_sq: float, beta: float) -> RiskBounds:
    """Chebyshev bounds on the noise-free risk when the class is known to
    contain the truth and sigma_sq is known:
    (m -+ beta sqrt(2m)) sigma_sq / n, lower end clamped at 0."""
    mean, _ = chisq_moments_rn(m, n, sigma_sq)
    if beta < 0.0:
        raise BadShape("beta must be >= 0")
    half_width = beta * math.sqrt(2.0 * m) * sigma_sq / n
    r_n_low = max(0.0, mean - half_width)
    r_n_high = mean + half_width
    return RiskBounds(
        m=m,
        n=n,
        r_n_low=r_n_low,
        r_n_high=r_n_high,
        r_2n_low=r_n_low / (2.0 * sigma_sq),
        r_2n_high=r_n_high / (2.0 * sigma_sq),
        params=ConfidenceParams(alpha=0.0, beta=beta),
        sigma_sq_used=sigma_sq,
        mode=MODE_KNOWN_ORDER,
    )


def sample_complexity_known_order(m: int, epsilon: float, beta: float) -> int:
    """Smallest integer n with (m + beta sqrt(2m)) / (2n) <= epsilon."""
    if epsilon <= 0.0:
        raise NonpositiveEpsilon(f"epsilon must be > 0, got {epsilon}")
    if m < 1:
        raise BadShape(f"order must be >= 1, got {m}")
    if beta < 0.0:
        raise BadShape("beta must be >= 0")
    target = (m + beta * math.sqrt(2.0 * m)) / (2.0 * epsilon)
    # Nudge against float noise so exact-integer targets are not bumped up.
    return max(1, math.ceil(target * (1.0 - 1e-12)))


def _validation_denominators(m: int, n: int, alpha: float) -> tuple[float, float]:
    if alpha < 0.0:
        raise BadShape("alpha must be >= 0")
    dof = n - m
    if dof <= 2.0 * alpha * alpha:
        raise InsufficientSamples(
            f"need n - m > 2 alpha^2 for a bounded variance range "
            f"(n - m = {dof}, 2 alpha^2 = {2.0 * alpha * alpha:g})"
        )
    spread = alpha * math.sqrt(2.0 * dof)
    return dof + spread, dof - spread


def validate_noise_variance(r_ms: float, m: int, n: int, alpha: float) -> NoiseVarianceRange:
    """Noise-variance range validated (with probability P_alpha) from the
    empirical MSE of an order-m fit whose class contains the truth.

    At alpha = 0 the range collapses to the classical unbiased estimate
    n r_ms / (n - m).
    """
    _check_m_n(m, n, m_max_inclusive=False)
    if r_ms <= 0.0:
        raise NonpositiveVariance(f"r_ms must be > 0, got {r_ms}")
    den_plus, den_minus = _validation_denominators(m, n, alpha)
    return NoiseVarianceRange(
        low=n * r_ms / den_plus,
        high=n * r_ms / den_minus,
        p_alpha=_chebyshev_probability(alpha),
        source_r_ms=r_ms,
        m=m,
        n=n,
    )


def rn_bounds_via_mse_known_order(
    r_ms: float, m: int, n: int, params: ConfidenceParams
) -> RiskBounds:
    """Known-order risk bounds with sigma_sq replaced by its validated range,
    so only the empirical MSE is needed.

    The raw expressions can invert (low above high) when beta is small and
    alpha is large; the lower end is clamped so the interval stays ordered.
    The KL-scale values are normalized by the high end of the variance range,
    recorded in sigma_sq_used.
    """
    _check_m_n(m, n, m_max_inclusive=False)
    if r_ms <= 0.0:
        raise NonpositiveVariance(f"r_ms must be > 0, got {r_ms}")
    den_plus, den_minus = _validation_denominators(m, n, params.alpha)
    root = params.beta * math.sqrt(2.0 * m)
    r_n_high = (m + root) * r_ms / den_plus
    r_n_low = max(0.0, (m - root) * r_ms / den_minus)
    r_n_low = min(r_n_low, r_n_high)
    sigma_sq_high = n * r_ms / den_minus
    return RiskBounds(
        m=m,
        n=n,
        r_n_low=r_n_low,
        r_n_high=r_n_high,
        r_2n_low=r_n_low / (2.0 * sigma_sq_high),
        r_2n_high=r_n_high / (2.0 * sigma_sq_high),
        params=params,
        sigma_sq_used=sigma_sq_high,
        mode=MODE_KNOWN_ORDER,
    )


def general_rn_bounds(
    r_ms: float, m: int, n: int, sigma_sq: float, params: ConfidenceParams
) -> RiskBounds:
    """Risk bounds valid whether or not the order-m class contains the truth.

    With eta = (1 - m/n) sigma_sq (the expected empirical MSE under no
    unmodeled component):

      kappa    = (2 alpha sigma / n) sqrt(alpha^2 sigma^2 / n + r_ms - eta/2)
      r_n_high = r_ms + kappa + 2 alpha^2 sigma^2/n - eta
                 + (m/n) sigma^2 + beta sqrt(2m) sigma^2 / n
      r_n_low  = same with kappa and the beta term negated, clamped at 0.

    Raises KappaDomain when the square-root argument is negative (the
    supplied r_ms is inconsistent with sigma_sq at this alpha, m, n), even
    at alpha = 0 where kappa itself would vanish.
    """
    _check_m_n(m, n, m_max_inclusive=False)
    if sigma_sq <= 0.0:
        raise NonpositiveVariance(f"sigma_sq must be > 0, got {sigma_sq}")
    if r_ms < 0.0:
        raise BadShape(f"r_ms must be >= 0, got {r_ms}")
    alpha, beta = params.alpha, params.beta
    eta = (1.0 - m / n) * sigma_sq
    root_arg = alpha * alpha * sigma_sq / n + r_ms - 0.5 * eta
    if root_arg < 0.0:
        raise KappaDomain(
            f"alpha^2 sigma^2/n + r_ms - eta/2 = {root_arg:.3e} < 0: "
            "r_ms is inconsistent with the assumed sigma_sq"
        )
    kappa = (2.0 * alpha * math.sqrt(sigma_sq) / n) * math.sqrt(root_arg)
    shift = 2.0 * alpha * alpha * sigma_sq / n - eta + (m / n) * sigma_sq
    beta_term = beta * math.sqrt(2.0 * m) * sigma_sq / n
    r_n_high = r_ms + kappa + shift + beta_term
    r_n_low = max(0.0, r_ms - kappa + shift - beta_term)
    return RiskBounds(
        m=m,
        n=n,
        r_n_low=r_n_low,
        r_n_high=r_n_high,
        r_2n_low=r_n_low / (2.0 * sigma_sq),
        r_2n_high=r_n_high / (2.0 * sigma_sq),
        params=params,
        sigma_sq_used=sigma_sq,
        mode=MODE_GENERAL,
    )


def d2nmse_upper(
    r_ms: float,
    m: int,
    n: int,
    sigma_sq: float,
    params: ConfidenceParams,
    convention: str = CONVENTION_CANONICAL,
) -> float:
    """Upper bound on the KL-scale noise-free risk.

    canonical_half: general_rn_bounds(...).r_n_high / (2 sigma_sq).
    doubled: the same quantity written directly on the sigma_sq-normalized
    scale (exactly twice the canonical value); kept because a published
    curve uses this scale verbatim.
    """
    if convention not in CONVENTIONS:
        raise BadShape(f"unknown convention {convention!r}")
    if convention == CONVENTION_CANONICAL:
        return general_rn_bounds(r_ms, m, n, sigma_sq, params).r_2n_high
    # Doubled scale, written out in its published normalized form.
    _check_m_n(m, n, m_max_inclusive=False)
    if sigma_sq <= 0.0:
        raise NonpositiveVariance(f"sigma_sq must be > 0, got {sigma_sq}")
    alpha, beta = params.alpha, params.beta
    r_nrms = r_ms / sigma_sq
    root_arg = alpha * alpha / n + r_nrms - 0.5 * (1.0 - m / n)
    if root_arg < 0.0:
        raise KappaDomain(
            f"alpha^2/n + r_ms/sigma^2 - (1 - m/n)/2 = {root_arg:.3e} < 0: "
            "r_ms is inconsistent with the assumed sigma_sq"
        )
    return (
        r_nrms
        + (2.0 * alpha / n) * math.sqrt(root_arg)
        + (2.0 * alpha * alpha + 2.0 * m + beta * math.sqrt(2.0 * m) - n) / n
    )


def is_learnable(r_2n_high: float, epsilon: float) -> bool:
    """True when the risk bound meets the accuracy target (closed
    inequality: equality counts as learnable)."""
    if epsilon <= 0.0:
        raise NonpositiveEpsilon(f"epsilon must be > 0, got {epsilon}")
    return r_2n_high <= epsilon


def sample_complexity_empirical(
    dataset_stream: Iterable[tuple[int, Iterable]],
    m_policy,
    epsilon: float,
    params: ConfidenceParams,
    convention: str = CONVENTION_CANONICAL,
    kernel=None,
) -> int:
    """First sample size on a grid where the trial-averaged upper bound
    meets epsilon.

    dataset_stream yields (n, datasets) pairs in increasing n; for each
    dataset the bound is evaluated at the policy's order. m_policy is either
    a fixed integer order or a callable dataset -> order (e.g. wrapping the
    order-selection scan). Each dataset must carry its noise variance.

    Raises NotReached if the averaged bound never meets epsilon on the grid.
    """
    if epsilon <= 0.0:
        raise NonpositiveEpsilon(f"epsilon must be > 0, got {epsilon}")
    if kernel is None:
        kernel = KernelSpec()
    last_n = None
    for n_value, datasets in dataset_stream:
        if last_n is not None and n_value <= last_n:
            raise BadShape("dataset_stream must yield strictly increasing n")
        last_n = n_value
        total = 0.0
        count = 0
        for ds in datasets:
            if ds.noise_var is None or ds.noise_var <= 0.0:
                raise NonpositiveVariance(
                    "sample_complexity_empirical needs datasets with noise_var > 0"
                )
            m = m_policy(ds) if callable(m_policy) else int(m_policy)
            fr = fit(ds, m, kernel)
            total += d2nmse_upper(fr.r_ms, m, ds.n, ds.noise_var, params, convention)
            count += 1
        if count == 0:
            raise BadShape(f"no datasets supplied for n={n_value}")
        if total / count <= epsilon:
            return n_value
    raise NotReached(f"averaged bound never reached epsilon={epsilon} on the given grid")
