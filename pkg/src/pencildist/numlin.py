"""Dense complex linear algebra with deterministic output conventions.

All routines delegate to LAPACK through numpy/scipy. What this module adds on
top of the backends:

* a fixed phase normalization for singular vectors, so that downstream
  consumers (gradients, perturbation construction) get reproducible output,
* a single rank tolerance convention (relative to the largest singular value)
  used everywhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import ComputationError, ContractViolationError

# Relative threshold below which singular values count as zero.
DEFAULT_RANK_TOL = 1e-10


def check_matrix(M: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-d complex ndarray and reject non-finite entries."""
    M = np.asarray(M)
    if M.ndim != 2:
        raise ContractViolationError(f"{name} must be 2-dimensional, got ndim={M.ndim}")
    M = M.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(M.real)) or not np.all(np.isfinite(M.imag)):
        raise ContractViolationError(f"{name} contains non-finite entries")
    return M


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD with phase-normalized singular vectors.

    singular_values are non-increasing; left_vectors (n x k) and
    right_vectors (m x k) have orthonormal columns, k = min(n, m).
    """

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray


def _normalize_phases(U: np.ndarray, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Make the largest-magnitude entry of each right vector real positive;
    # the left vector absorbs the same phase so that M v = sigma u is kept.
    U = U.copy()
    V = V.copy()
    for k in range(V.shape[1]):
        i = int(np.argmax(np.abs(V[:, k])))
        a = V[i, k]
        if abs(a) > 0:
            phase = a / abs(a)
            V[:, k] /= phase
            U[:, k] /= phase
    return U, V


def svd(M: np.ndarray) -> SvdResult:
    """Thin SVD of a dense complex matrix, with deterministic vector phases."""
    M = check_matrix(M)
    try:
        U, s, Vh = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ComputationError(f"SVD failed to converge for {M.shape[0]}x{M.shape[1]} matrix") from exc
    U, V = _normalize_phases(U, Vh.conj().T)
    return SvdResult(singular_values=s, left_vectors=U, right_vectors=V)


def singular_values(M: np.ndarray) -> np.ndarray:
    """Singular values only (non-increasing)."""
    M = check_matrix(M)
    try:
        return np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ComputationError(f"SVD failed to converge for {M.shape[0]}x{M.shape[1]} matrix") from exc


def pseudoinverse(M: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse, treating singular values < tol*sigma_1 as zero."""
    if tol < 0:
        raise ContractViolationError("tol must be non-negative")
    M = check_matrix(M)
    if M.size == 0 or not np.any(M):
        return np.zeros((M.shape[1], M.shape[0]), dtype=np.complex128)
    return np.linalg.pinv(M, rcond=tol)


def generalized_eigenvalues(A: np.ndarray, B: np.ndarray) -> list[tuple[complex, complex]]:
    """Eigenvalue pairs (alpha, beta) of the square pencil A - lambda*B.

    lambda = alpha/beta for beta != 0; beta == 0 flags an infinite eigenvalue.
    """
    A = check_matrix(A, "A")
    B = check_matrix(B, "B")
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise ContractViolationError(
            f"generalized_eigenvalues requires square pencils of equal size, got {A.shape} and {B.shape}"
        )
    w = scipy.linalg.eig(A, B, right=False, homogeneous_eigvals=True)
    return [(complex(a), complex(b)) for a, b in zip(w[0], w[1])]


def finite_eigenvalues(A: np.ndarray, B: np.ndarray, beta_tol: float = 1e-12) -> np.ndarray:
    """Finite eigenvalues alpha/beta of the square pencil, |beta| above beta_tol."""
    pairs = generalized_eigenvalues(A, B)
    scale = max(max(abs(a) for a, _ in pairs), max(abs(b) for _, b in pairs), 1.0)
    return np.array([a / b for a, b in pairs if abs(b) > beta_tol * scale])


def numerical_rank(M: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> int:
    """Count of singular values >= tol * sigma_1; the zero matrix has rank 0."""
    if not 0 < tol < 1:
        raise ContractViolationError("tol must lie in (0, 1)")
    s = singular_values(check_matrix(M))
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s >= tol * s[0]))


def spectral_norm(M: np.ndarray) -> float:
    """Operator 2-norm, i.e. the largest singular value."""
    s = singular_values(M)
    return float(s[0]) if s.size else 0.0
