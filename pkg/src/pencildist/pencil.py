"""Matrix pencils and assembly of the coupled block matrices.

The eigenvalue-target matrix C(mu, Gamma) is r x r upper triangular with the
target values mu_j on the diagonal and -gamma_{j,l} in the strict upper
triangle. The coupled matrix L(mu, Gamma) = (I (x) A) - (C^T (x) B) is
nr x mr block lower triangular with diagonal blocks A - mu_j B and
sub-diagonal blocks gamma_{j,l} B.

Gamma entries are stored column-by-column of the strict lower triangle of
indices (j, l), j > l: (gamma_21, gamma_31, ..., gamma_r1, gamma_32, ...).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numlin
from .exceptions import ContractViolationError


@dataclass(frozen=True)
class MatrixPencil:
    """Pair (A, B) of dense complex n x m matrices with n >= m."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = numlin.check_matrix(self.A, "A")
        B = numlin.check_matrix(self.B, "B")
        if A.shape != B.shape:
            raise ContractViolationError(f"A and B must have identical shapes, got {A.shape} and {B.shape}")
        if A.shape[0] < A.shape[1]:
            raise ContractViolationError(f"pencil must have n >= m, got shape {A.shape} (transpose first)")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.A.shape[1]

    @property
    def is_square(self) -> bool:
        return self.n == self.m


@dataclass(frozen=True)
class ValidationReport:
    rank_B: int
    r: int
    well_posed: bool


def gamma_length(r: int) -> int:
    """Number of coupling parameters for r targets."""
    return r * (r - 1) // 2


def gamma_index_pairs(r: int) -> list[tuple[int, int]]:
    """1-based (j, l) pairs, j > l, in storage order (column-wise)."""
    return [(j, l) for l in range(1, r) for j in range(l + 1, r + 1)]


def validate(pencil: MatrixPencil, r: int, tol: float = numlin.DEFAULT_RANK_TOL) -> ValidationReport:
    """Well-posedness check: the distance requires rank(B) >= r."""
    if r < 1:
        raise ContractViolationError("r must be a positive integer")
    rank_B = numlin.numerical_rank(pencil.B, tol) if np.any(pencil.B) else 0
    return ValidationReport(rank_B=rank_B, r=r, well_posed=rank_B >= r)


def _check_mu_gamma(mu, gamma) -> tuple[np.ndarray, np.ndarray]:
    mu = np.atleast_1d(np.asarray(mu, dtype=np.complex128))
    gamma = np.atleast_1d(np.asarray(gamma, dtype=np.complex128)) if np.size(gamma) else np.zeros(0, np.complex128)
    r = mu.size
    if r < 1:
        raise ContractViolationError("mu must contain at least one target")
    if gamma.size != gamma_length(r):
        raise ContractViolationError(
            f"gamma has length {gamma.size}, expected r(r-1)/2 = {gamma_length(r)} for r = {r}"
        )
    return mu, gamma


def build_C(mu, gamma) -> np.ndarray:
    """Upper triangular target matrix C(mu, Gamma)."""
    mu, gamma = _check_mu_gamma(mu, gamma)
    r = mu.size
    C = np.diag(mu)
    for k, (j, l) in enumerate(gamma_index_pairs(r)):
        C[l - 1, j - 1] = -gamma[k]
    return C


def build_L(pencil: MatrixPencil, mu, gamma) -> np.ndarray:
    """Coupled nr x mr block matrix (I (x) A) - (C(mu,Gamma)^T (x) B)."""
    mu, gamma = _check_mu_gamma(mu, gamma)
    r = mu.size
    C = build_C(mu, gamma)
    return np.kron(np.eye(r), pencil.A) - np.kron(C.T, pencil.B)


def vec(M: np.ndarray) -> np.ndarray:
    """Stack the columns of M into one long vector."""
    return np.asarray(M).ravel(order="F")


def unvec(x, p: int, q: int) -> np.ndarray:
    """Inverse of vec: column-major reshape of a length p*q vector."""
    x = np.asarray(x)
    if x.size != p * q:
        raise ContractViolationError(f"cannot reshape length-{x.size} vector to {p}x{q}")
    return x.reshape((p, q), order="F")
