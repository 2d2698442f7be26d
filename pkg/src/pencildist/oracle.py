"""Brute-force oracles used to validate the solver at small scale.

Nothing here is on the production path: these routines recompute quantities
by independent means (Kronecker null spaces, finite differences, direct
enumeration) so the tests can cross-check the analytic machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numlin
from .exceptions import ContractViolationError
from .objective import eval_sigma
from .pencil import MatrixPencil, build_C, gamma_length


@dataclass(frozen=True)
class JordanSpec:
    """Jordan structure: (eigenvalue, block size) pairs."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple((complex(lam), int(p)) for lam, p in self.blocks)
        if any(p < 1 for _, p in blocks):
            raise ContractViolationError("Jordan block sizes must be >= 1")
        object.__setattr__(self, "blocks", blocks)

    @property
    def size(self) -> int:
        return sum(p for _, p in self.blocks)


def jordan_matrix(spec: JordanSpec) -> np.ndarray:
    """Block-diagonal matrix realizing the Jordan structure."""
    N = spec.size
    J = np.zeros((N, N), np.complex128)
    k = 0
    for lam, p in spec.blocks:
        J[k : k + p, k : k + p] = lam * np.eye(p) + np.eye(p, k=1)
        k += p
    return J


def _block_sizes_by_eigenvalue(spec: JordanSpec, tol: float = 1e-9) -> list[tuple[complex, list[int]]]:
    groups: list[tuple[complex, list[int]]] = []
    for lam, p in spec.blocks:
        for glam, sizes in groups:
            if abs(lam - glam) <= tol:
                sizes.append(p)
                break
        else:
            groups.append((lam, [p]))
    return groups


def sylvester_dimension_formula(F_spec: JordanSpec, G_spec: JordanSpec, tol: float = 1e-9) -> int:
    """Solution-space dimension of F X - X G = 0 from the Jordan structures.

    Triple sum of min(block size of F, block size of G) over the common
    eigenvalues.
    """
    dim = 0
    g_groups = _block_sizes_by_eigenvalue(G_spec, tol)
    for lam, c_sizes in _block_sizes_by_eigenvalue(F_spec, tol):
        for glam, p_sizes in g_groups:
            if abs(lam - glam) <= tol:
                dim += sum(min(c, p) for c in c_sizes for p in p_sizes)
    return dim


def sylvester_dimension_bruteforce(F: np.ndarray, G: np.ndarray, tol: float = numlin.DEFAULT_RANK_TOL) -> int:
    """Nullity of the Kronecker matrix of F X - X G = 0."""
    F = numlin.check_matrix(F, "F")
    G = numlin.check_matrix(G, "G")
    m, r = F.shape[0], G.shape[0]
    K = np.kron(np.eye(r), F) - np.kron(G.T, np.eye(m))
    return m * r - numlin.numerical_rank(K, tol) if np.any(K) else m * r


def generalized_sylvester_dimension(
    pencil: MatrixPencil, C: np.ndarray, tol: float = numlin.DEFAULT_RANK_TOL
) -> int:
    """Nullity of the Kronecker matrix of A X - B X C = 0."""
    C = numlin.check_matrix(C, "C")
    r = C.shape[0]
    K = np.kron(np.eye(r), pencil.A) - np.kron(C.T, pencil.B)
    return pencil.m * r - numlin.numerical_rank(K, tol) if np.any(K) else pencil.m * r


def generic_target_dimension(
    pencil: MatrixPencil, mu, draws: int = 5, seed: int = 11, tol: float = numlin.DEFAULT_RANK_TOL
) -> int:
    """Solution-space dimension at generic coupling values.

    Samples standard complex Gaussian Gamma; all draws must agree, otherwise
    the instance is flagged non-generic and resampled once with fresh draws.
    """
    mu = np.atleast_1d(np.asarray(mu, np.complex128))
    r = mu.size
    d = gamma_length(r)
    rng = np.random.default_rng(seed)
    for _attempt in range(2):
        dims = []
        for _ in range(draws):
            gamma = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            dims.append(generalized_sylvester_dimension(pencil, build_C(mu, gamma), tol))
        if len(set(dims)) == 1:
            return dims[0]
    raise ContractViolationError("generic dimension draws disagree; instance flagged non-generic")


def fd_gradient(pencil: MatrixPencil, mu, gamma, step: float = 1e-6) -> np.ndarray:
    """Central finite differences of the objective in the real Gamma coordinates."""
    if step <= 0:
        raise ContractViolationError("step must be positive")
    mu = np.atleast_1d(np.asarray(mu, np.complex128))
    gamma = np.atleast_1d(np.asarray(gamma, np.complex128)) if np.size(gamma) else np.zeros(0, np.complex128)
    d = gamma.size
    grad = np.empty(2 * d)
    for k in range(d):
        for part, delta in ((0, step), (1, 1j * step)):
            gp, gm = gamma.copy(), gamma.copy()
            gp[k] += delta
            gm[k] -= delta
            fp = eval_sigma(pencil, mu, gp).value
            fm = eval_sigma(pencil, mu, gm).value
            grad[2 * k + part] = (fp - fm) / (2 * step)
    return grad


def gamma_decay_probe(pencil: MatrixPencil, mu, gamma_direction, scales) -> list[float]:
    """Objective value along t * Gamma_0 for increasing scales t (square case)."""
    if not pencil.is_square:
        raise ContractViolationError("decay probe applies to square pencils only")
    gamma0 = np.atleast_1d(np.asarray(gamma_direction, np.complex128))
    if not np.any(gamma0):
        raise ContractViolationError("gamma_direction must be nonzero")
    return [eval_sigma(pencil, mu, float(t) * gamma0).value for t in scales]
