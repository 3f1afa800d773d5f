"""Exception hierarchy shared by every module in the package.

All domain errors derive from CoacError so callers (and the CLI) can catch
one base class. The CLI maps these onto its exit-code contract:
RankDeficient -> 3, InsufficientSamples -> 4, everything else -> 2.
"""

from __future__ import annotations


class CoacError(Exception):
    """Base class for all errors raised by this package."""


class BadShape(CoacError):
    """Array shapes or counts violate an operation's preconditions."""


class LengthMismatch(BadShape):
    """Two sequences that must have equal length do not."""


class NonFiniteData(BadShape):
    """NaN or infinity found where finite real values are required."""


class RankDeficient(CoacError):
    """Design matrix is not of full column rank (within tolerance)."""


class OrderExceedsData(CoacError):
    """Requested model order is larger than the number of samples."""


class OrderExceedsKernel(CoacError):
    """Requested model order is larger than the kernel's max_order."""


class NonpositiveVariance(CoacError):
    """A noise variance (or an MSE standing in for one) must be > 0."""


class NonpositiveEpsilon(CoacError):
    """A learnability threshold epsilon must be > 0."""


class InsufficientSamples(CoacError):
    """Too few samples for the requested confidence level (n - m <= 2*alpha^2)."""


class KappaDomain(CoacError):
    """The square-root argument of the bound's cross term is negative.

    Signals that the supplied empirical MSE is inconsistent with the assumed
    noise variance at this (alpha, m, n).
    """


class NotReached(CoacError):
    """A scan over a sample-size grid never satisfied the target threshold."""


class FoldTooSmall(CoacError):
    """A cross-validation training fold has fewer rows than the model order."""


class DataFormatError(CoacError):
    """Malformed input data (CSV schema, non-finite rows, bad config)."""
