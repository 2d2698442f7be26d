"""Distance from a matrix pencil A - lambda*B to the nearest pencil
(A + dA) - lambda*B with r prescribed eigenvalues, in the 2-norm."""

from .distance import (
    BoxRegion,
    DistanceQuery,
    DistanceResult,
    FiniteSet,
    LeftHalfPlane,
    WholePlane,
    build_perturbation,
    compute_distance,
    g_of_mu,
    tau_complete,
    tau_region,
    tau_specified_set,
    verify_result,
)
from .exceptions import ComputationError, ContractViolationError, IllPosedError
from .objective import ObjectiveEval, eval_sigma, gamma_gradient
from .optimize import BfgsConfig, Box, DirectConfig, bfgs_maximize, direct_minimize, lipschitz_bound
from .pencil import MatrixPencil, build_C, build_L, unvec, validate, vec
from .pseudospectra import GridSpec, PseudospectrumGrid, compute_grid

__all__ = [
    "BfgsConfig",
    "Box",
    "BoxRegion",
    "ComputationError",
    "ContractViolationError",
    "DirectConfig",
    "DistanceQuery",
    "DistanceResult",
    "FiniteSet",
    "GridSpec",
    "IllPosedError",
    "LeftHalfPlane",
    "MatrixPencil",
    "ObjectiveEval",
    "PseudospectrumGrid",
    "WholePlane",
    "bfgs_maximize",
    "build_C",
    "build_L",
    "build_perturbation",
    "compute_distance",
    "compute_grid",
    "direct_minimize",
    "eval_sigma",
    "g_of_mu",
    "gamma_gradient",
    "lipschitz_bound",
    "tau_complete",
    "tau_region",
    "tau_specified_set",
    "unvec",
    "validate",
    "vec",
    "verify_result",
]

__version__ = "0.1.0"
