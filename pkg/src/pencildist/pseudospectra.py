"""Pseudospectrum grids: sigma_min(A - lambda*B) over a complex rectangle.

Serves as an independent verification surface for distance results: the
smallest level at which two components of the level set
{ lambda : sigma_min(A - lambda*B) <= eps } coalesce equals the distance to
the nearest pencil with a multiple eigenvalue.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .exceptions import ContractViolationError
from .optimize import Box
from .pencil import MatrixPencil

CSV_HEADER = "re,im,sigma_min"


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid: a (Re, Im) box with nx x ny nodes."""

    box: Box
    nx: int
    ny: int

    def __post_init__(self):
        if self.box.dim != 2:
            raise ContractViolationError("GridSpec box must be 2-dimensional (Re, Im)")
        if self.nx < 2 or self.ny < 2:
            raise ContractViolationError("grid resolution must be at least 2 in each direction")

    def re_nodes(self) -> np.ndarray:
        return np.linspace(self.box.lower[0], self.box.upper[0], self.nx)

    def im_nodes(self) -> np.ndarray:
        return np.linspace(self.box.lower[1], self.box.upper[1], self.ny)


@dataclass(frozen=True)
class PseudospectrumGrid:
    spec: GridSpec
    values: np.ndarray  # nx x ny, sigma_min at node (i, j)


def compute_grid(pencil: MatrixPencil, spec: GridSpec, chunk: int = 4096) -> PseudospectrumGrid:
    """sigma_min(A - lambda*B) at every grid node, batched over the grid."""
    re = spec.re_nodes()
    im = spec.im_nodes()
    lam = (re[:, None] + 1j * im[None, :]).ravel()
    A, B = pencil.A, pencil.B
    out = np.empty(lam.size)
    for k in range(0, lam.size, chunk):
        block = lam[k : k + chunk]
        stack = A[None, :, :] - block[:, None, None] * B[None, :, :]
        out[k : k + chunk] = np.linalg.svd(stack, compute_uv=False)[:, -1]
    return PseudospectrumGrid(spec=spec, values=out.reshape(spec.nx, spec.ny))


def to_csv(grid: PseudospectrumGrid) -> str:
    """Row-major CSV, one node per row, 17 significant digits."""
    re = grid.spec.re_nodes()
    im = grid.spec.im_nodes()
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for i in range(grid.spec.nx):
        for j in range(grid.spec.ny):
            buf.write(f"{re[i]:.17g},{im[j]:.17g},{grid.values[i, j]:.17g}\n")
    return buf.getvalue()


def write_csv(grid: PseudospectrumGrid, path) -> None:
    with open(path, "w") as fh:
        fh.write(to_csv(grid))
