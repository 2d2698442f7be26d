"""Generic optimizers: BFGS maximization with a weak-Wolfe line search, and a
deterministic Lipschitz global minimizer over a box.

The BFGS routine maximizes a possibly nonsmooth function (the objective is a
singular value, differentiable only where it is simple). A weak-Wolfe
bisection line search keeps the quasi-Newton updates well defined in the
nonsmooth case. The global minimizer wraps the classic center-sampling
trisection DIRECT method.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from . import numlin
from .exceptions import ContractViolationError
from .pencil import MatrixPencil


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by per-coordinate lower/upper bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        up = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != up.shape:
            raise ContractViolationError("lower and upper must have equal lengths")
        if np.any(lo > up):
            raise ContractViolationError("box requires lower[i] <= upper[i]")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @property
    def dim(self) -> int:
        return self.lower.size

    def bounds(self) -> list[tuple[float, float]]:
        return list(zip(self.lower.tolist(), self.upper.tolist()))


@dataclass(frozen=True)
class BfgsConfig:
    max_iters: int = 500
    grad_tol: float = 1e-8
    wolfe_c1: float = 1e-4
    wolfe_c2: float = 0.9
    max_restarts: int = 5
    initial_step: float = 1.0

    def __post_init__(self):
        if not 0 < self.wolfe_c1 < self.wolfe_c2 < 1:
            raise ContractViolationError("need 0 < wolfe_c1 < wolfe_c2 < 1")


@dataclass(frozen=True)
class DirectConfig:
    max_evals: int = 2000
    box_size_tol: float = 1e-6
    value_tol: float = 1e-8
    lipschitz_hint: float | None = None

    def __post_init__(self):
        if self.max_evals < 1:
            raise ContractViolationError("max_evals must be >= 1")
        if self.box_size_tol <= 0 or self.value_tol <= 0:
            raise ContractViolationError("tolerances must be positive")


@dataclass
class BfgsResult:
    point: np.ndarray
    value: float
    converged: bool
    n_restarts: int
    n_evals: int = 0


@dataclass
class DirectResult:
    point: np.ndarray
    value: float
    evals_used: int


def _weak_wolfe_search(phi, value0, slope0, c1, c2, t0, max_bisect=50):
    """Line search for min_t phi(t) under weak Wolfe conditions.

    phi(t) returns (value, directional derivative). slope0 must be negative.
    Returns (t, value, slope, ok); on failure the best sampled point so far.
    """
    lo, hi = 0.0, np.inf
    t = t0
    best = (0.0, value0, slope0)
    for _ in range(max_bisect):
        v, d = phi(t)
        if np.isfinite(v) and v < best[1]:
            best = (t, v, d)
        if not np.isfinite(v) or v > value0 + c1 * t * slope0:
            hi = t
        elif d < c2 * slope0:
            lo = t
        else:
            return t, v, d, True
        t = 0.5 * (lo + hi) if np.isfinite(hi) else 2.0 * lo if lo > 0 else 2.0 * t
    return best[0], best[1], best[2], False


def bfgs_maximize(func_and_grad, start, cfg: BfgsConfig = BfgsConfig()):
    """Maximize func via BFGS with a weak-Wolfe line search.

    func_and_grad(x) returns (value, gradient). Internally runs as a
    minimization of -func so a single line search implementation is used.
    On line-search breakdown the inverse Hessian is reset and the iterate is
    perturbed deterministically, up to cfg.max_restarts times; the best point
    seen is always returned.
    """
    x = np.atleast_1d(np.asarray(start, dtype=float)).copy()
    d = x.size
    evals = 0

    def fg(z):
        nonlocal evals
        evals += 1
        v, g = func_and_grad(z)
        return -float(v), -np.asarray(g, dtype=float)

    if d == 0:
        v, _ = func_and_grad(x)
        return BfgsResult(point=x, value=float(v), converged=True, n_restarts=0, n_evals=1)

    f, g = fg(x)
    best_x, best_f = x.copy(), f
    H = np.eye(d)
    restarts = 0
    rng = np.random.default_rng(1729)
    converged = False

    for it in range(cfg.max_iters):
        gnorm = np.linalg.norm(g)
        if gnorm <= cfg.grad_tol:
            converged = True
            break
        p = -H @ g
        slope = p @ g
        if slope >= 0:
            H = np.eye(d)
            p = -g
            slope = -gnorm**2

        def phi(t, x=x, p=p):
            v, gr = fg(x + t * p)
            return v, gr @ p

        t0 = cfg.initial_step / max(1.0, np.linalg.norm(p)) if it == 0 else 1.0
        t, fnew, _, ok = _weak_wolfe_search(phi, f, slope, cfg.wolfe_c1, cfg.wolfe_c2, t0)
        if not ok or t == 0.0:
            if restarts >= cfg.max_restarts:
                break
            restarts += 1
            H = np.eye(d)
            x = best_x + 0.05 * (1.0 + np.linalg.norm(best_x)) * rng.standard_normal(d)
            f, g = fg(x)
            if f < best_f:
                best_x, best_f = x.copy(), f
            continue
        x_new = x + t * p
        f_new, g_new = fg(x_new)
        s = x_new - x
        y = g_new - g
        sy = s @ y
        if sy > 1e-14 * np.linalg.norm(s) * np.linalg.norm(y):
            rho = 1.0 / sy
            I = np.eye(d)
            H = (I - rho * np.outer(s, y)) @ H @ (I - rho * np.outer(y, s)) + rho * np.outer(s, s)
        x, f, g = x_new, f_new, g_new
        if f < best_f:
            best_x, best_f = x.copy(), f

    if f < best_f:
        best_x, best_f = x.copy(), f
    return BfgsResult(point=best_x, value=-best_f, converged=converged, n_restarts=restarts, n_evals=evals)


def direct_minimize(g, box: Box, cfg: DirectConfig = DirectConfig()) -> DirectResult:
    """Global minimization over a box with the DIRECT rectangle-division rule.

    Deterministic: identical inputs give identical output. Termination on the
    evaluation budget or when rectangles shrink below box_size_tol.
    """
    if box.dim < 1:
        raise ContractViolationError("direct_minimize requires dimension >= 1")
    res = scipy.optimize.direct(
        lambda x: float(g(x)),
        box.bounds(),
        maxfun=cfg.max_evals,
        maxiter=10**6,
        locally_biased=False,
        len_tol=cfg.box_size_tol,
        f_min_rtol=cfg.value_tol,
        vol_tol=0.0,
    )
    return DirectResult(point=np.asarray(res.x), value=float(res.fun), evals_used=int(res.nfev))


def lipschitz_bound(pencil: MatrixPencil) -> float:
    """Lipschitz constant of the outer objective in mu: the 2-norm of B."""
    return numlin.spectral_norm(pencil.B)
