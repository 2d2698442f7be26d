"""Distance from a pencil to the nearest pencil with prescribed eigenvalues.

The distance is computed as a min-max problem: an outer minimization over the
target vector mu (enumeration over multisets for a finite target set, a
Lipschitz global search over a box for regions) of the inner maximum

    g(mu) = sup_Gamma sigma_{mr-r+1}( L(mu, Gamma) ),

followed by construction of the minimal perturbation

    dA = -g(mu*) * U_mat @ pinv(V_mat)

from the column-major matrix reshapes of the singular vector pair at the
inner maximizer, and an a-posteriori verification of the perturbed pencil.

When the objective singular value is clustered at the optimizer (the
multiplicity qualification fails) the singular pair is not unique and the
perturbation formula is applied to every candidate pair in the cluster; the
candidate whose perturbed pencil verifies best is kept.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from . import numlin, objective
from .exceptions import IllPosedError
from .objective import ObjectiveEval, eval_sigma, gamma_gradient
from .optimize import BfgsConfig, Box, DirectConfig, bfgs_maximize, direct_minimize
from .pencil import MatrixPencil, build_L, gamma_length, unvec, validate

# ---------------------------------------------------------------------------
# Target regions


@dataclass(frozen=True)
class FiniteSet:
    """A finite set of admissible eigenvalue targets."""

    points: tuple

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        if len(set(pts)) != len(pts):
            raise IllPosedError("FiniteSet points must be distinct")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class BoxRegion:
    """A rectangle in the complex plane, given as a 2-d box over (Re, Im)."""

    box: Box


@dataclass(frozen=True)
class LeftHalfPlane:
    """The closed left half-plane Re(lambda) <= 0, searched within a box."""

    search_box: Box


@dataclass(frozen=True)
class WholePlane:
    """All of the complex plane, approximated by a compact search box."""

    search_box: Box | None = None


TargetRegion = FiniteSet | BoxRegion | LeftHalfPlane | WholePlane


@dataclass(frozen=True)
class DistanceQuery:
    pencil: MatrixPencil
    r: int
    region: TargetRegion
    inner_cfg: BfgsConfig = BfgsConfig()
    outer_cfg: DirectConfig = DirectConfig()
    verification_tol: float = 1e-6
    rank_tol: float = numlin.DEFAULT_RANK_TOL
    polish: bool = True


@dataclass
class VerificationCheck:
    name: str
    passed: bool
    detail: str


@dataclass
class VerificationReport:
    rank_defect_ok: bool
    eigenvalue_matches: list  # (target, achieved, residual)
    region_ok: bool
    checks: list
    all_ok: bool


@dataclass
class DistanceResult:
    tau: float
    mu_star: np.ndarray
    gamma_star: np.ndarray
    delta_A: np.ndarray
    kappa: float
    mult_ok: bool
    li_ok: bool
    verification: VerificationReport
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Inner maximization


def g_of_mu(
    pencil: MatrixPencil,
    mu,
    inner_cfg: BfgsConfig = BfgsConfig(),
    gamma_start=None,
) -> tuple[float, np.ndarray, ObjectiveEval]:
    """Inner maximum over Gamma for fixed targets mu.

    Starts at Gamma = 0; if the converged point violates a qualification it is
    restarted from the all-ones vector and from deterministic random
    perturbations of the best point, keeping the best value found.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=np.complex128))
    r = mu.size
    d = gamma_length(r)
    if d == 0:
        ev = eval_sigma(pencil, mu, [])
        return ev.value, np.zeros(0, np.complex128), ev

    def fg(x):
        gamma = x[0::2] + 1j * x[1::2]
        ev = eval_sigma(pencil, mu, gamma)
        return ev.value, gamma_gradient(pencil, mu, gamma, ev)

    def run(x0):
        res = bfgs_maximize(fg, x0, inner_cfg)
        gamma = res.point[0::2] + 1j * res.point[1::2]
        return res, gamma, eval_sigma(pencil, mu, gamma)

    starts = [np.zeros(2 * d)]
    if gamma_start is not None:
        gs = np.atleast_1d(np.asarray(gamma_start, np.complex128))
        x0 = np.empty(2 * d)
        x0[0::2], x0[1::2] = gs.real, gs.imag
        starts.insert(0, x0)

    best = None
    for x0 in starts:
        res, gamma, ev = run(x0)
        if best is None or res.value > best[0].value:
            best = (res, gamma, ev)
        if ev.mult_ok and ev.li_ok:
            break
    else:
        # Qualification-violating stationary point: alternate deterministic
        # start, then random perturbations of the best point so far.
        rng = np.random.default_rng(20240817)
        retry_starts = [np.ones(2 * d)]
        for _ in range(inner_cfg.max_restarts):
            base = np.empty(2 * d)
            base[0::2], base[1::2] = best[1].real, best[1].imag
            retry_starts.append(base + 0.1 * (1.0 + np.linalg.norm(base)) * rng.standard_normal(2 * d))
        for x0 in retry_starts:
            res, gamma, ev = run(x0)
            if res.value > best[0].value + 1e-14:
                best = (res, gamma, ev)
                if ev.mult_ok and ev.li_ok:
                    break

    res, gamma, ev = best
    return res.value, gamma, ev


# ---------------------------------------------------------------------------
# Perturbation construction and verification


def build_perturbation(pencil: MatrixPencil, mu, gamma, ev: ObjectiveEval) -> np.ndarray:
    """Minimal perturbation -kappa * U_mat @ pinv(V_mat) for a singular pair."""
    n, m = pencil.n, pencil.m
    mu = np.atleast_1d(np.asarray(mu, np.complex128))
    r = mu.size
    if ev.value == 0.0:
        return np.zeros((n, m), np.complex128)
    U_mat = unvec(ev.left_vector, n, r)
    V_mat = unvec(ev.right_vector, m, r)
    return -ev.value * (U_mat @ numlin.pseudoinverse(V_mat))


def _achieved_eigenvalues(pencil: MatrixPencil, delta_A: np.ndarray, mu, tol: float):
    """Match each target to an achieved eigenvalue of the perturbed pencil.

    Square pencils use the QZ eigenvalues; rectangular pencils certify each
    target via the smallest singular value of A + dA - mu_j B (zero iff mu_j
    is an eigenvalue).
    """
    A_pert = pencil.A + delta_A
    matches = []
    if pencil.is_square:
        eigs = list(numlin.finite_eigenvalues(A_pert, pencil.B))
        for t in mu:
            if eigs:
                i = int(np.argmin([abs(e - t) for e in eigs]))
                achieved = eigs.pop(i)
                matches.append((complex(t), complex(achieved), float(abs(achieved - t))))
            else:
                matches.append((complex(t), complex("nan"), np.inf))
    else:
        scale = max(numlin.spectral_norm(pencil.A), numlin.spectral_norm(pencil.B), 1.0)
        for t in mu:
            resid = float(numlin.singular_values(A_pert - t * pencil.B)[-1]) / scale
            matches.append((complex(t), complex(t), resid))
    return matches


def _region_ok(region: TargetRegion, achieved, tol: float) -> bool:
    lam = [a for _, a, _ in achieved if np.isfinite(a.real)]
    if isinstance(region, LeftHalfPlane):
        return all(a.real <= tol for a in lam)
    if isinstance(region, BoxRegion):
        lo, up = region.box.lower, region.box.upper
        return all(
            lo[0] - tol <= a.real <= up[0] + tol and lo[1] - tol <= a.imag <= up[1] + tol for a in lam
        )
    return True


def verify_result(
    pencil: MatrixPencil,
    delta_A: np.ndarray,
    mu,
    r: int,
    region: TargetRegion,
    tol: float = 1e-6,
    rank_threshold: float = 1e-6,
    seed: int = 7,
) -> VerificationReport:
    """A-posteriori verification of a computed perturbation.

    Checks (a) rank deficiency of the coupled matrix of the perturbed pencil
    at a random generic Gamma, (b) achieved-eigenvalue placement against the
    targets, (c) region membership of the achieved eigenvalues.
    """
    mu = np.atleast_1d(np.asarray(mu, np.complex128))
    perturbed = MatrixPencil(pencil.A + delta_A, pencil.B)
    rng = np.random.default_rng(seed)
    d = gamma_length(r)
    gamma_generic = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    L = build_L(perturbed, mu, gamma_generic)
    s = numlin.singular_values(L)
    sigma1 = s[0] if s[0] > 0 else 1.0
    tail = s[pencil.m * r - r :]
    rank_defect_ok = bool(np.all(tail <= rank_threshold * sigma1))

    matches = _achieved_eigenvalues(pencil, delta_A, mu, tol)
    eig_ok = all(res <= tol for _, _, res in matches)
    region_ok = _region_ok(region, matches, tol)

    checks = [
        VerificationCheck(
            "rank_defect",
            rank_defect_ok,
            f"trailing {r} singular values of coupled matrix: {tail.tolist()} (rel. threshold {rank_threshold})",
        ),
        VerificationCheck(
            "eigenvalue_placement",
            eig_ok,
            "; ".join(f"target {t:.6g} achieved {a:.6g} residual {res:.3e}" for t, a, res in matches),
        ),
        VerificationCheck("region_membership", region_ok, type(region).__name__),
    ]
    return VerificationReport(
        rank_defect_ok=rank_defect_ok,
        eigenvalue_matches=matches,
        region_ok=region_ok,
        checks=checks,
        all_ok=rank_defect_ok and eig_ok and region_ok,
    )


def _candidate_evals(pencil: MatrixPencil, mu, gamma, base: ObjectiveEval, cluster_rel_tol: float = 1e-6):
    """Candidate singular pairs for the perturbation formula.

    With a simple objective singular value there is one candidate. At a
    cluster the backend's basis for the singular subspace is arbitrary, so
    every pair in the cluster is offered; verification picks the winner.
    """
    if base.mult_ok:
        return [base]
    mu = np.atleast_1d(np.asarray(mu, np.complex128))
    r = mu.size
    m = pencil.m
    L = build_L(pencil, mu, gamma)
    res = numlin.svd(L)
    s = res.singular_values
    idx = objective.target_index(m, r)
    sigma1 = s[0] if s[0] > 0 else 1.0
    cluster = [k for k in range(s.size) if abs(s[k] - s[idx]) <= cluster_rel_tol * sigma1]
    out = []
    for k in cluster:
        V = res.right_vectors[:, k]
        Vm = unvec(V, m, r)
        vsv = numlin.singular_values(Vm)
        out.append(
            ObjectiveEval(
                value=base.value,
                left_vector=res.left_vectors[:, k],
                right_vector=V,
                gap=base.gap,
                mult_ok=base.mult_ok,
                li_ok=bool(vsv[-1] / max(vsv[0], 1e-300) > objective.LI_TOL),
                li_smallest_sv=float(vsv[-1]),
            )
        )
    return out


def _finalize(query: DistanceQuery, mu_star, gamma_star, ev: ObjectiveEval, diagnostics: dict) -> DistanceResult:
    pencil, r = query.pencil, query.r
    candidates = _candidate_evals(pencil, mu_star, gamma_star, ev)
    best = None
    for cand in candidates:
        dA = build_perturbation(pencil, mu_star, gamma_star, cand)
        rep = verify_result(
            pencil, dA, mu_star, r, query.region, tol=query.verification_tol
        )
        score = (
            sum(1 for c in rep.checks if c.passed),
            -sum(res for _, _, res in rep.eigenvalue_matches if np.isfinite(res)),
        )
        if best is None or score > best[0]:
            best = (score, cand, dA, rep)
    _, cand, dA, rep = best
    return DistanceResult(
        tau=ev.value,
        mu_star=np.atleast_1d(np.asarray(mu_star, np.complex128)),
        gamma_star=np.atleast_1d(np.asarray(gamma_star, np.complex128)) if np.size(gamma_star) else np.zeros(0, np.complex128),
        delta_A=dA,
        kappa=ev.value,
        mult_ok=ev.mult_ok,
        li_ok=cand.li_ok,
        verification=rep,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Distance drivers


def _require_well_posed(query: DistanceQuery):
    report = validate(query.pencil, query.r, query.rank_tol)
    if not report.well_posed:
        raise IllPosedError(
            f"distance requires rank(B) >= r, got rank(B) = {report.rank_B} < r = {query.r}"
        )


def tau_specified_set(query: DistanceQuery) -> DistanceResult:
    """Distance for a finite target set: enumerate target multisets."""
    _require_well_posed(query)
    region = query.region
    assert isinstance(region, FiniteSet)
    pts = sorted(region.points, key=lambda z: (z.real, z.imag))
    trials = []
    for combo in itertools.combinations_with_replacement(pts, query.r):
        mu = np.asarray(combo, np.complex128)
        value, gamma, ev = g_of_mu(query.pencil, mu, query.inner_cfg)
        trials.append((value, mu, gamma, ev))
    v_min = min(t[0] for t in trials)
    tie_tol = 1e-9 * max(1.0, v_min)
    # The optimal value can be attained at several target assignments; the
    # perturbation built from some of them may degrade the pencil (e.g. make
    # it singular). Finalize every tied assignment and keep the one whose
    # perturbed pencil verifies best.
    best = None
    for value, mu, gamma, ev in trials:
        if value > v_min + tie_tol:
            continue
        result = _finalize(query, mu, gamma, ev, {"multisets_tried": len(trials)})
        rep = result.verification
        score = (
            sum(1 for c in rep.checks if c.passed),
            -sum(res for _, _, res in rep.eigenvalue_matches if np.isfinite(res)),
        )
        if best is None or score > best[0]:
            best = (score, result)
    return best[1]


def _mu_from_coords(x: np.ndarray) -> np.ndarray:
    return x[0::2] + 1j * x[1::2]


def _outer_box(region: TargetRegion, r: int) -> Box:
    if isinstance(region, BoxRegion):
        per = region.box
    elif isinstance(region, LeftHalfPlane):
        per = region.search_box
        if per.upper[0] > 0:
            per = Box(per.lower, np.array([0.0, per.upper[1]]))
    elif isinstance(region, WholePlane):
        per = region.search_box
    else:
        raise TypeError(f"no box search for region {type(region).__name__}")
    lower = np.tile(per.lower, r)
    upper = np.tile(per.upper, r)
    return Box(lower, upper)


def default_search_box(pencil: MatrixPencil, r: int) -> Box:
    """Heuristic square search box for whole-plane queries.

    Centered at the mean of the eigenvalues of the top m x m compression,
    with a half-width covering the spectral spread plus a norm-based margin.
    A user-supplied box is preferable whenever problem insight exists.
    """
    m = pencil.m
    Ac, Bc = pencil.A[:m, :], pencil.B[:m, :]
    try:
        eigs = numlin.finite_eigenvalues(Ac, Bc)
    except Exception:
        eigs = np.zeros(0, np.complex128)
    if eigs.size == 0:
        center = 0.0 + 0.0j
        spread = 0.0
    else:
        center = complex(np.mean(eigs))
        spread = float(np.max(np.abs(eigs - center)))
    sB = numlin.singular_values(pencil.B)
    sigma_rB = float(sB[min(r, sB.size) - 1]) if sB.size else 0.0
    half = 2.0 * (spread + numlin.spectral_norm(pencil.A) / max(sigma_rB, 1e-300))
    half = min(max(half, 1.0), 1e6)
    return Box(
        np.array([center.real - half, center.imag - half]),
        np.array([center.real + half, center.imag + half]),
    )


def _minimize_over_box(query: DistanceQuery, box2r: Box) -> DistanceResult:
    pencil = query.pencil

    def g(x):
        value, _, _ = g_of_mu(pencil, _mu_from_coords(x), query.inner_cfg)
        return value

    direct_res = direct_minimize(g, box2r, query.outer_cfg)
    x_best, v_best, evals = direct_res.point, direct_res.value, direct_res.evals_used

    if query.polish:
        res = scipy.optimize.minimize(
            g,
            x_best,
            method="Nelder-Mead",
            bounds=box2r.bounds(),
            options={"xatol": 1e-9, "fatol": 1e-13, "maxfev": 4000},
        )
        evals += res.nfev
        if res.fun <= v_best:
            x_best, v_best = np.asarray(res.x), float(res.fun)

    mu = _mu_from_coords(x_best)
    value, gamma, ev = g_of_mu(pencil, mu, query.inner_cfg)
    return _finalize(
        query,
        mu,
        gamma,
        ev,
        {"outer_evals": evals, "direct_value": direct_res.value, "polished": query.polish},
    )


def tau_region(query: DistanceQuery) -> DistanceResult:
    """Distance to the nearest pencil with r eigenvalues in a region."""
    _require_well_posed(query)
    if not isinstance(query.region, (BoxRegion, LeftHalfPlane)):
        raise TypeError("tau_region expects BoxRegion or LeftHalfPlane")
    return _minimize_over_box(query, _outer_box(query.region, query.r))


def tau_complete(query: DistanceQuery) -> DistanceResult:
    """Distance to the nearest pencil with r eigenvalues anywhere."""
    _require_well_posed(query)
    region = query.region
    if not isinstance(region, WholePlane):
        raise TypeError("tau_complete expects WholePlane")
    if region.search_box is None:
        region = WholePlane(default_search_box(query.pencil, query.r))
        query = DistanceQuery(
            pencil=query.pencil,
            r=query.r,
            region=region,
            inner_cfg=query.inner_cfg,
            outer_cfg=query.outer_cfg,
            verification_tol=query.verification_tol,
            rank_tol=query.rank_tol,
            polish=query.polish,
        )
    return _minimize_over_box(query, _outer_box(region, query.r))


def compute_distance(query: DistanceQuery) -> DistanceResult:
    """Dispatch on the region type."""
    if isinstance(query.region, FiniteSet):
        return tau_specified_set(query)
    if isinstance(query.region, WholePlane):
        return tau_complete(query)
    return tau_region(query)
