"""Learnability toolkit for nested least-squares regression: fit polynomial
models of increasing order, put probabilistic upper bounds on the risk
against the noise-free targets, and use those bounds to pick the order,
size the training set, and benchmark against k-fold cross-validation.
"""

__version__ = "0.1.0"

from .bounds import (
    CONVENTION_CANONICAL,
    CONVENTION_DOUBLED,
    ConfidenceParams,
    NoiseVarianceRange,
    RiskBounds,
    chisq_moments_rms,
    chisq_moments_rn,
    d2nmse_upper,
    general_rn_bounds,
    is_learnable,
    rn_bounds_known_order,
    rn_bounds_via_mse_known_order,
    sample_complexity_empirical,
    sample_complexity_known_order,
    validate_noise_variance,
)
from .crossval import CvReport, kfold_select_order
from .exceptions import (
    BadShape,
    CoacError,
    DataFormatError,
    FoldTooSmall,
    InsufficientSamples,
    KappaDomain,
    LengthMismatch,
    NonFiniteData,
    NonpositiveEpsilon,
    NonpositiveVariance,
    NotReached,
    OrderExceedsData,
    OrderExceedsKernel,
    RankDeficient,
)
from .linalg import (
    IncrementalQr,
    QrFactors,
    qr_decompose,
    residual_quadratic_form,
    solve_least_squares,
)
from .regression import (
    Dataset,
    FitResult,
    KernelSpec,
    RmsScan,
    build_design_matrix,
    empirical_mse,
    fit,
    kl_gaussian_equal_var,
    oracle_nmse,
    read_dataset_csv,
    rms_scan,
)
from .selection import (
    SelectionReport,
    epsilon_min,
    select_order,
    validate_order_cap,
)
from .simulate import (
    ExperimentConfig,
    TrialRecord,
    generate_dataset,
    run_bound_curves,
    run_cv_comparison,
    run_sample_complexity_table,
    run_selection_table,
)

__all__ = [name for name in dir() if not name.startswith("_")]
