"""Hermitian linear-algebra helpers shared by the rate and design code.

Everything here works on complex numpy arrays.  Determinants of covariance-type
matrices always go through an explicit Hermitian symmetrization first so that
tiny skew parts from accumulated matmuls cannot flip a sign.
"""

from __future__ import annotations

import numpy as np

# log2 of the smallest determinant we accept before declaring numerical failure
_LOGDET2_FLOOR = np.log2(1e-300)


class ValidationError(ValueError):
    """Raised when user-supplied model data is malformed (shape, Hermitianness, PSD)."""


class PreconditionError(ValueError):
    """Raised when an input violates a documented precondition (e.g. singular covariance)."""


class NumericalError(ArithmeticError):
    """Raised when a computation degenerates (non-finite or underflowing log-det).

    ``sample_index`` identifies the offending Monte-Carlo sample when the failure
    happened inside a batched expectation, else it is None.
    """

    def __init__(self, message: str, sample_index: int | None = None):
        if sample_index is not None:
            message = f"{message} (sample index {sample_index})"
        super().__init__(message)
        self.sample_index = sample_index


def herm(x: np.ndarray) -> np.ndarray:
    """Conjugate transpose (of the last two axes for stacked arrays)."""
    return np.conjugate(np.swapaxes(x, -1, -2))


def hermitianize(M: np.ndarray) -> np.ndarray:
    """Nearest Hermitian matrix, 0.5*(M + M^H)."""
    return 0.5 * (M + herm(M))


def check_correlation(R: np.ndarray, name: str = "correlation matrix") -> np.ndarray:
    """Validate a correlation/covariance input: square, Hermitian, PSD.

    Returns the symmetrized matrix as complex128.  Raises ValidationError on a
    shape mismatch, a non-Hermitian input (beyond roundoff) or a negative
    eigenvalue beyond roundoff.
    """
    R = np.asarray(R, dtype=complex)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {R.shape}")
    scale = max(np.abs(R).max(), 1.0)
    if np.abs(R - herm(R)).max() > 1e-9 * scale:
        raise ValidationError(f"{name} is not Hermitian")
    R = hermitianize(R)
    w = np.linalg.eigvalsh(R)
    if w.min() < -1e-9 * max(w.max(), 1.0):
        raise ValidationError(f"{name} is not positive semidefinite (min eig {w.min():.3e})")
    return R


def psd_sqrt(R: np.ndarray) -> np.ndarray:
    """Hermitian square root of a PSD matrix via eigendecomposition.

    Eigenvalues that dip slightly negative from roundoff are clamped to zero.
    """
    w, V = np.linalg.eigh(hermitianize(np.asarray(R, dtype=complex)))
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ herm(V)


def logdet2(M: np.ndarray) -> float:
    """log2 det of a Hermitian positive definite matrix.

    Symmetrizes first, then uses a Cholesky factorization; falls back to an
    eigendecomposition if that fails.  Raises NumericalError when the
    determinant is non-positive, non-finite, or underflows below 1e-300.
    """
    out = batched_logdet2(np.asarray(M, dtype=complex)[None, :, :])
    return float(out[0])


def batched_logdet2(Ms: np.ndarray, sample_offset: int = 0) -> np.ndarray:
    """log2 det over a stack of Hermitian PD matrices, shape (n, k, k) -> (n,).

    The stack is processed in index order; on failure the exception names the
    offending sample (offset by ``sample_offset`` for chunked callers).
    """
    Ms = hermitianize(np.asarray(Ms, dtype=complex))
    try:
        L = np.linalg.cholesky(Ms)
        diag = np.real(np.diagonal(L, axis1=-2, axis2=-1))
        out = 2.0 * np.sum(np.log2(diag), axis=-1)
    except np.linalg.LinAlgError:
        # find and report the first bad sample; salvage genuinely PD ones
        out = np.empty(Ms.shape[0])
        for i, M in enumerate(Ms):
            w = np.linalg.eigvalsh(M)
            if w.min() <= 0.0:
                raise NumericalError(
                    f"matrix is not positive definite (min eig {w.min():.3e})",
                    sample_index=sample_offset + i,
                ) from None
            out[i] = np.sum(np.log2(w))
    bad = np.flatnonzero(~np.isfinite(out) | (out < _LOGDET2_FLOOR))
    if bad.size:
        i = int(bad[0])
        raise NumericalError(
            "log-det degenerated (non-finite or determinant below 1e-300)",
            sample_index=sample_offset + i,
        )
    return out


def solve_hermitian(M: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve M X = B for Hermitian PD M (batched ok); pinv fallback on breakdown."""
    try:
        return np.linalg.solve(M, B)
    except np.linalg.LinAlgError:
        return np.linalg.pinv(hermitianize(M)) @ B


def water_fill(gains: np.ndarray, budget: float) -> np.ndarray:
    """Classical water-filling: maximize sum log2(1 + g_i p_i) s.t. sum p_i = budget.

    Channels with non-positive gain get zero power.  Returns the power vector in
    the original channel order.
    """
    gains = np.asarray(gains, dtype=float)
    if budget < 0:
        raise PreconditionError("water-filling budget must be nonnegative")
    powers = np.zeros_like(gains)
    usable = np.flatnonzero(gains > 0)
    if usable.size == 0 or budget == 0:
        return powers
    g = gains[usable]
    order = np.argsort(g)[::-1]  # strongest first
    g_sorted = g[order]
    inv = 1.0 / g_sorted
    # grow the active set while the water level stays above the next channel floor
    k = g_sorted.size
    while k > 1:
        level = (budget + inv[:k].sum()) / k
        if level > inv[k - 1]:
            break
        k -= 1
    level = (budget + inv[:k].sum()) / k
    p_sorted = np.zeros_like(g_sorted)
    p_sorted[:k] = level - inv[:k]
    p = np.zeros_like(g)
    p[order] = p_sorted
    powers[usable] = p
    return powers
