"""Inner objective: the (mr-r+1)-th largest singular value of the coupled matrix.

For a query with r targets the objective is

    f(Gamma) = sigma_{mr-r+1}( L(mu, Gamma) ),

maximized over the coupling parameters Gamma. The partial derivatives with
respect to the real and imaginary parts of gamma_{j,l} are

    Re( U_j^* B V_l )   and   -Im( U_j^* B V_l ),

where U_j, V_l are the j-th / l-th length-n / length-m blocks of the singular
vector pair of the objective singular value. The derivative is only valid
where that singular value is simple; clustered points are flagged through
mult_ok rather than rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numlin
from .pencil import MatrixPencil, build_L, gamma_index_pairs, gamma_length, unvec

# Relative thresholds for the qualification flags; roughly the accuracy
# headroom of a double-precision SVD.
GAP_TOL = 1e-8
LI_TOL = 1e-8


def target_index(m: int, r: int) -> int:
    """0-based position of the (mr-r+1)-th largest singular value."""
    return m * r - r


@dataclass(frozen=True)
class ObjectiveEval:
    """Objective value with its singular pair and qualification diagnostics."""

    value: float
    left_vector: np.ndarray
    right_vector: np.ndarray
    gap: float
    mult_ok: bool
    li_ok: bool
    li_smallest_sv: float


def eval_sigma(
    pencil: MatrixPencil,
    mu,
    gamma,
    gap_tol: float = GAP_TOL,
    li_tol: float = LI_TOL,
) -> ObjectiveEval:
    """Evaluate the objective singular value and its qualification flags."""
    mu = np.atleast_1d(np.asarray(mu, dtype=np.complex128))
    r = mu.size
    m = pencil.m
    L = build_L(pencil, mu, gamma)
    res = numlin.svd(L)
    s = res.singular_values
    idx = target_index(m, r)
    value = float(s[idx])
    U = res.left_vectors[:, idx]
    V = res.right_vectors[:, idx]

    sigma1 = float(s[0]) if s[0] > 0 else 1.0
    neighbors = []
    if idx > 0:
        neighbors.append(abs(s[idx - 1] - value))
    if idx + 1 < s.size:
        neighbors.append(abs(s[idx + 1] - value))
    gap = float(min(neighbors) / sigma1) if neighbors else np.inf

    Vm = unvec(V, m, r)
    vsv = numlin.singular_values(Vm)
    li_smallest = float(vsv[-1])
    li_largest = float(vsv[0]) if vsv[0] > 0 else 1.0

    return ObjectiveEval(
        value=value,
        left_vector=U,
        right_vector=V,
        gap=gap,
        mult_ok=gap > gap_tol,
        li_ok=li_smallest / li_largest > li_tol,
        li_smallest_sv=li_smallest,
    )


def coupling_products(pencil: MatrixPencil, ev: ObjectiveEval, r: int) -> np.ndarray:
    """The complex products U_j^* B V_l for each stored gamma index (j, l)."""
    n, m = pencil.n, pencil.m
    U, V = ev.left_vector, ev.right_vector
    out = np.empty(gamma_length(r), dtype=np.complex128)
    for k, (j, l) in enumerate(gamma_index_pairs(r)):
        Uj = U[(j - 1) * n : j * n]
        Vl = V[(l - 1) * m : l * m]
        out[k] = Uj.conj() @ (pencil.B @ Vl)
    return out


def gamma_gradient(pencil: MatrixPencil, mu, gamma, ev: ObjectiveEval | None = None) -> np.ndarray:
    """Gradient of the objective in the interleaved real coordinates of Gamma.

    Entry 2k is d/dRe(gamma_k), entry 2k+1 is d/dIm(gamma_k). At clustered
    singular values this is the derivative of the returned (phase-normalized)
    pair, not a true gradient; callers check mult_ok.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=np.complex128))
    r = mu.size
    if ev is None:
        ev = eval_sigma(pencil, mu, gamma)
    prods = coupling_products(pencil, ev, r)
    grad = np.empty(2 * prods.size)
    grad[0::2] = prods.real
    grad[1::2] = -prods.imag
    return grad


def check_qualifications(
    ev: ObjectiveEval, gap_tol: float = GAP_TOL, li_tol: float = LI_TOL
) -> tuple[bool, bool, dict]:
    """Re-derive the qualification flags from an evaluation, with diagnostics."""
    mult_ok = ev.gap > gap_tol
    # The li threshold is relative to the largest singular value of the
    # reshaped right vector; that ratio was fixed at evaluation time.
    li_ok = ev.li_ok
    diagnostics = {
        "gap": ev.gap,
        "gap_tol": gap_tol,
        "li_smallest_sv": ev.li_smallest_sv,
        "li_tol": li_tol,
    }
    return mult_ok, li_ok, diagnostics
