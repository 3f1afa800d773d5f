"""Dense least-squares building blocks: Householder QR, triangular solves,
and hat-matrix quadratic forms.

Matrices and vectors are float64 numpy arrays. Public entry points validate
shape and finiteness; the factorization itself is written out here rather
than delegated to a LAPACK wrapper so the solver path is fully visible.
Everything in this module is pure and safe to call from multiple threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import BadShape, LengthMismatch, NonFiniteData, RankDeficient

# Relative rank threshold: a column is treated as dependent when the
# corresponding R diagonal falls below RANK_RTOL * max|entry| * rows.
RANK_RTOL = 1e-12


def as_matrix(a) -> np.ndarray:
    """Validate and return `a` as a 2-d float64 array (rows >= 1, cols >= 1)."""
    out = np.asarray(a, dtype=float)
    if out.ndim != 2:
        raise BadShape(f"expected a 2-d array, got ndim={out.ndim}")
    if out.shape[0] < 1 or out.shape[1] < 1:
        raise BadShape(f"matrix must be at least 1x1, got {out.shape}")
    if not np.isfinite(out).all():
        raise NonFiniteData("matrix entries must be finite")
    return out


def as_vector(v) -> np.ndarray:
    """Validate and return `v` as a 1-d float64 array of length >= 1."""
    out = np.asarray(v, dtype=float)
    if out.ndim != 1:
        raise BadShape(f"expected a 1-d array, got ndim={out.ndim}")
    if out.shape[0] < 1:
        raise BadShape("vector must have length >= 1")
    if not np.isfinite(out).all():
        raise NonFiniteData("vector entries must be finite")
    return out


@dataclass(frozen=True)
class QrFactors:
    """Thin QR factorization: q is n x m with orthonormal columns, r is m x m
    upper triangular with nonnegative diagonal, and q @ r reconstructs the
    input."""

    q: np.ndarray
    r: np.ndarray


def _householder_vector(x: np.ndarray) -> tuple[np.ndarray, float]:
    """Unit reflector v and the resulting pivot alpha for the column tail x.

    The reflector maps x onto alpha * e1 with alpha = -sign(x0)*||x|| (the
    cancellation-free choice). A zero tail returns a zero reflector and
    alpha = 0, which the rank check downstream turns into RankDeficient.
    """
    normx = float(np.linalg.norm(x))
    if normx == 0.0:
        return np.zeros_like(x), 0.0
    alpha = -normx if x[0] >= 0.0 else normx
    v = x.copy()
    v[0] -= alpha
    vnorm = float(np.linalg.norm(v))
    if vnorm == 0.0:  # x already equals alpha*e1
        return np.zeros_like(x), alpha
    return v / vnorm, alpha


def qr_decompose(a) -> QrFactors:
    """Thin Householder QR of a tall matrix.

    Raises RankDeficient when any pivot |r_kk| drops below
    RANK_RTOL * max|a| * rows, i.e. the columns are numerically dependent.
    """
    a = as_matrix(a)
    n, m = a.shape
    if n < m:
        raise BadShape(f"need rows >= cols for QR, got {n}x{m}")
    tol = RANK_RTOL * float(np.max(np.abs(a))) * n

    work = a.copy()
    reflectors: list[np.ndarray] = []
    for k in range(m):
        v, alpha = _householder_vector(work[k:, k].copy())
        if np.any(v):
            work[k:, k:] -= 2.0 * np.outer(v, v @ work[k:, k:])
        work[k, k] = alpha
        work[k + 1 :, k] = 0.0
        reflectors.append(v)
        if abs(alpha) < tol:
            raise RankDeficient(
                f"column {k + 1} is numerically dependent (pivot {alpha:.3e}, tol {tol:.3e})"
            )

    # Back-accumulate the thin Q by applying the reflectors to I[:, :m].
    q = np.eye(n, m)
    for k in range(m - 1, -1, -1):
        v = reflectors[k]
        if np.any(v):
            q[k:, :] -= 2.0 * np.outer(v, v @ q[k:, :])

    r = work[:m, :]
    # Normalize signs so diag(r) >= 0; keeps q @ r unchanged.
    flip = np.diag(r) < 0.0
    if np.any(flip):
        q[:, flip] = -q[:, flip]
        r = r.copy()
        r[flip, :] = -r[flip, :]
    return QrFactors(q=q, r=r)


def back_substitute(r: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve the upper-triangular system r x = b."""
    m = r.shape[0]
    x = np.zeros(m)
    for k in range(m - 1, -1, -1):
        if r[k, k] == 0.0:
            raise RankDeficient(f"zero pivot at position {k} in back substitution")
        x[k] = (b[k] - r[k, k + 1 :] @ x[k + 1 :]) / r[k, k]
    return x


def solve_least_squares(a, y) -> np.ndarray:
    """Minimize ||a theta - y||_2 via QR, never via normal equations.

    Columns are scaled to unit 2-norm before factorizing (polynomial design
    columns span many orders of magnitude) and the solution is rescaled back.
    """
    a = as_matrix(a)
    y = as_vector(y)
    if a.shape[0] != y.shape[0]:
        raise LengthMismatch(f"a has {a.shape[0]} rows but y has {y.shape[0]}")
    scale = np.linalg.norm(a, axis=0)
    if np.any(scale == 0.0):
        raise RankDeficient("zero column in design matrix")
    qr = qr_decompose(a / scale)
    theta_scaled = back_substitute(qr.r, qr.q.T @ y)
    return theta_scaled / scale


def residual_quadratic_form(a, v) -> tuple[float, float]:
    """Split ||v||^2 into (projection, residual) parts w.r.t. the column
    space of `a`.

    Returns (||H v||^2, ||(I - H) v||^2) where H is the hat matrix of `a`,
    evaluated as thin-Q quadratic forms without ever forming H. The residual
    part is computed from the actual residual vector, so the Pythagorean
    identity proj + resid = ||v||^2 is a genuine floating-point check.
    """
    a = as_matrix(a)
    v = as_vector(v)
    if a.shape[0] != v.shape[0]:
        raise LengthMismatch(f"a has {a.shape[0]} rows but v has {v.shape[0]}")
    scale = np.linalg.norm(a, axis=0)
    if np.any(scale == 0.0):
        raise RankDeficient("zero column in design matrix")
    q = qr_decompose(a / scale).q
    coeffs = q.T @ v
    proj = float(coeffs @ coeffs)
    resid_vec = v - q @ coeffs
    return proj, float(resid_vec @ resid_vec)


class IncrementalQr:
    """Householder QR that grows one column at a time.

    Used by the order-selection scan over nested design matrices: appending
    column m costs O(n m), so a full scan over orders 1..M costs O(M^2 n)
    instead of the O(M^2 n * M) of refactorizing from scratch at each order.

    The right-hand side y is carried through the same reflections, so after
    m columns the residual sum of squares of the order-m least-squares fit
    is simply the squared tail ||z[m:]||^2.
    """

    def __init__(self, y: np.ndarray):
        self._y = as_vector(y)
        self._n = self._y.shape[0]
        self._z = self._y.copy()  # y after all reflections so far
        self._reflectors: list[np.ndarray] = []
        self._r_cols: list[np.ndarray] = []
        self._scales: list[float] = []
        self._max_abs = 0.0

    @property
    def ncols(self) -> int:
        return len(self._r_cols)

    def append_column(self, col: np.ndarray) -> None:
        """Add one design column (scaled internally to unit norm).

        Raises RankDeficient if the column is numerically dependent on the
        ones already absorbed; the factorization state is unchanged in that
        case, so the caller may stop the scan and keep earlier orders.
        """
        col = as_vector(col)
        if col.shape[0] != self._n:
            raise LengthMismatch(f"column has length {col.shape[0]}, expected {self._n}")
        k = self.ncols
        if k >= self._n:
            raise BadShape("cannot absorb more columns than rows")
        scale = float(np.linalg.norm(col))
        if scale == 0.0:
            raise RankDeficient(f"appended column {k + 1} is identically zero")
        w = col / scale
        max_abs = max(self._max_abs, float(np.max(np.abs(w))))
        for j, v in enumerate(self._reflectors):
            if v.shape[0]:
                w[j:] -= 2.0 * v * (v @ w[j:])
        v, alpha = _householder_vector(w[k:].copy())
        if abs(alpha) < RANK_RTOL * max_abs * self._n:
            raise RankDeficient(
                f"appended column {k + 1} is numerically dependent (pivot {alpha:.3e})"
            )
        rcol = w[:k + 1].copy()
        rcol[k] = alpha
        if np.any(v):
            self._z[k:] -= 2.0 * v * (v @ self._z[k:])
        self._reflectors.append(v)
        self._r_cols.append(rcol)
        self._scales.append(scale)
        self._max_abs = max_abs

    def residual_sum_squares(self) -> float:
        """||y - A theta_hat||^2 for the current set of columns."""
        tail = self._z[self.ncols :]
        return float(tail @ tail)

    def solve(self) -> np.ndarray:
        """Least-squares coefficients for the current columns (on the
        original, unscaled column basis)."""
        m = self.ncols
        if m == 0:
            raise BadShape("no columns absorbed yet")
        r = np.zeros((m, m))
        for j, rcol in enumerate(self._r_cols):
            r[: j + 1, j] = rcol
        theta_scaled = back_substitute(r, self._z[:m])
        return theta_scaled / np.asarray(self._scales)
