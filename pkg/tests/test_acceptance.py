"""Acceptance suite: end-to-end checks of the distance solver on its
reference problems, printed one pass/fail line per criterion.

The reference values are frozen from independent computations (closed forms,
brute-force Kronecker null spaces, finite differences, dense grids) at the
stated tolerances. Each criterion prints a single summary line even when the
surrounding assertion fails.
"""

import sys
import time
from pathlib import Path

import conftest
import numpy as np
import pytest
import scipy.optimize

from pencildist import (
    BfgsConfig,
    Box,
    DirectConfig,
    DistanceQuery,
    FiniteSet,
    GridSpec,
    LeftHalfPlane,
    MatrixPencil,
    WholePlane,
    build_perturbation,
    compute_grid,
    direct_minimize,
    eval_sigma,
    g_of_mu,
    gamma_gradient,
    lipschitz_bound,
    tau_region,
    tau_specified_set,
)
from pencildist.cli import parse_pencil
from pencildist.distance import compute_distance, verify_result
from pencildist.objective import coupling_products
from pencildist.oracle import (
    JordanSpec,
    fd_gradient,
    gamma_decay_probe,
    jordan_matrix,
    sylvester_dimension_bruteforce,
    sylvester_dimension_formula,
)
from pencildist.pencil import build_L, gamma_length, unvec

PENCIL_DIR = Path(__file__).resolve().parent.parent / "pencils"

DIAG_PENCIL = MatrixPencil(np.diag([-1.0, 5.0, 2.0]), np.diag([0.0, 1.0, 1.0]))


def report(num, name, ok, detail=""):
    line = f"[ACCEPTANCE] criterion {num:02d} {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    print(line, file=sys.__stdout__, flush=True)
    conftest.ACCEPTANCE_LINES.append(line)
    return ok


# ---------------------------------------------------------------------------
# Shared reference computations (each criterion with a runtime budget times
# its own fixture).


@pytest.fixture(scope="module")
def sym3_result():
    """Nearest pencil with a double eigenvalue for the symmetric 3x3 pencil:
    2-d global search over a coalescent target mu, both prescribed
    eigenvalues equal."""
    pencil = parse_pencil(PENCIL_DIR / "sym3.json")
    t0 = time.time()

    def g(x):
        mu = complex(x[0], x[1])
        return g_of_mu(pencil, [mu, mu])[0]

    box = Box([-3.0, -3.0], [3.0, 3.0])
    d = direct_minimize(g, box, DirectConfig(max_evals=600))
    nm = scipy.optimize.minimize(
        g, d.point, method="Nelder-Mead", bounds=box.bounds(),
        options={"xatol": 1e-9, "fatol": 1e-13, "maxfev": 2000},
    )
    x = nm.x if nm.fun <= d.value else d.point
    mu_star = complex(x[0], x[1])
    result = tau_specified_set(
        DistanceQuery(pencil=pencil, r=2, region=FiniteSet((mu_star,)))
    )
    elapsed = time.time() - t0
    return pencil, mu_star, result, elapsed


@pytest.fixture(scope="module")
def rect_result():
    """Whole-plane r = 2 distance for the 4x3 pencil."""
    pencil = parse_pencil(PENCIL_DIR / "rect4x3.json")
    t0 = time.time()
    result = compute_distance(
        DistanceQuery(
            pencil=pencil,
            r=2,
            region=WholePlane(Box([-1.0, -3.0], [4.0, 3.0])),
            outer_cfg=DirectConfig(max_evals=2000),
        )
    )
    elapsed = time.time() - t0
    return pencil, result, elapsed


@pytest.fixture(scope="module")
def stable_result():
    """Closed-left-half-plane r = 2 distance for the unstable 2x2 pencil."""
    pencil = parse_pencil(PENCIL_DIR / "unstable2.json")
    t0 = time.time()
    result = tau_region(
        DistanceQuery(
            pencil=pencil,
            r=2,
            region=LeftHalfPlane(Box([-3.0, -3.0], [3.0, 3.0])),
            outer_cfg=DirectConfig(max_evals=2000),
        )
    )
    elapsed = time.time() - t0
    return pencil, result, elapsed


@pytest.fixture(scope="module")
def diag_result():
    return tau_specified_set(
        DistanceQuery(pencil=DIAG_PENCIL, r=2, region=FiniteSet((5.0, 1.0)))
    )


# ---------------------------------------------------------------------------
# Criteria


def test_criterion_01_double_eigenvalue_distance(sym3_result):
    pencil, mu_star, result, elapsed = sym3_result
    tau_ok = abs(result.tau - 0.59299) <= 1e-3
    mu_ok = abs(mu_star - (-0.85488)) <= 1e-3
    matches = result.verification.eigenvalue_matches
    double_ok = all(res <= 1e-3 for _, _, res in matches) and len(matches) == 2
    time_ok = elapsed < 60.0
    ok = tau_ok and mu_ok and double_ok and time_ok
    report(
        1,
        "double-eigenvalue distance (3x3 symmetric)",
        ok,
        f"tau={result.tau:.5f}, mu*={mu_star:.5f}, {elapsed:.1f}s",
    )
    assert tau_ok and mu_ok and double_ok
    assert time_ok


def test_criterion_02_rectangular_completion(rect_result):
    pencil, result, elapsed = rect_result
    tau_ok = abs(result.tau - 0.03927) <= 1e-3
    mu = sorted(result.mu_star, key=lambda z: z.real)
    ref = sorted([2.55144 + 0j, 1.45405 + 0j], key=lambda z: z.real)
    mu_ok = all(abs(a - b) <= 1e-2 for a, b in zip(mu, ref))
    gamma_ok = abs(abs(result.gamma_star[0]) - 2.0086) <= 1e-2
    # the reported three smallest singular values of the coupled matrix are
    # tied to the reported targets; re-maximize there and compare
    mu_ref = np.array([2.55144, 1.45405])
    _, gamma_ref, _ = g_of_mu(pencil, mu_ref)
    s = np.linalg.svd(build_L(pencil, mu_ref, gamma_ref), compute_uv=False)
    triple = s[-3:]
    triple_ok = np.all(np.abs(triple - np.array([1.4832, 0.0393, 0.0062])) <= 1e-3)
    time_ok = elapsed < 120.0
    ok = tau_ok and mu_ok and gamma_ok and triple_ok and time_ok
    report(
        2,
        "rectangular completion (4x3, whole plane)",
        ok,
        f"tau={result.tau:.5f}, |gamma*|={abs(result.gamma_star[0]):.5f}, "
        f"triple={np.round(triple, 4).tolist()}, {elapsed:.1f}s",
    )
    assert tau_ok and mu_ok and gamma_ok and triple_ok
    assert time_ok


def test_criterion_03_nearest_stable_system(stable_result):
    pencil, result, elapsed = stable_result
    tau_ok = abs(result.tau - 0.6610) <= 1e-3
    refs = [-0.0885 + 0.9547j, -0.9547j]
    achieved = [a for _, a, _ in result.verification.eigenvalue_matches]
    # best assignment of the two achieved eigenvalues to the two references
    d1 = max(abs(achieved[0] - refs[0]), abs(achieved[1] - refs[1]))
    d2 = max(abs(achieved[0] - refs[1]), abs(achieved[1] - refs[0]))
    eig_dev = min(d1, d2)
    eig_ok = eig_dev <= 1e-2
    time_ok = elapsed < 300.0
    ok = tau_ok and eig_ok and time_ok
    report(
        3,
        "nearest stable system (2x2, left half-plane)",
        ok,
        f"tau={result.tau:.5f}, eigenvalue deviation={eig_dev:.3e}, {elapsed:.1f}s",
    )
    assert tau_ok
    assert eig_ok
    assert time_ok


def test_criterion_04_closed_form(diag_result):
    devs = []
    for gabs in (0.0, 1.0, 2.0, 5.0, 100.0):
        g2 = gabs**2
        ref = np.sqrt(5.0 + 0.5 * g2 - 0.5 * np.sqrt(g2**2 + 20.0 * g2 + 64.0))
        ev = eval_sigma(DIAG_PENCIL, [5.0, 1.0], [gabs])
        devs.append(abs(ev.value - ref))
    closed_ok = max(devs) <= 1e-10
    res = diag_result
    tau_ok = abs(res.tau - 1.0) <= 1e-6
    achieved = sorted(a.real for _, a, _ in res.verification.eigenvalue_matches)
    eig_ok = np.allclose(achieved, [1.0, 5.0], atol=1e-6) and res.verification.all_ok
    flag_ok = not res.mult_ok
    ok = closed_ok and tau_ok and eig_ok and flag_ok
    report(
        4,
        "closed-form objective and tau on diagonal pencil",
        ok,
        f"max closed-form dev={max(devs):.2e}, tau={res.tau:.8f}, mult_ok={res.mult_ok}",
    )
    assert ok


def test_criterion_05_r1_oracle_equivalence():
    worst = 0.0
    rng = np.random.default_rng(2024)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(2, min(n, 6) + 1))
        A = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
        B = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
        p = MatrixPencil(A, B)
        lam = complex(rng.standard_normal(), rng.standard_normal())
        res = tau_specified_set(DistanceQuery(pencil=p, r=1, region=FiniteSet((lam,))))
        ref = np.linalg.svd(A - lam * B, compute_uv=False)[-1]
        worst = max(worst, abs(res.tau - ref))
    ok = worst <= 1e-10
    report(5, "r=1 equals sigma_min(A - lambda B)", ok, f"worst deviation={worst:.2e}")
    assert ok


def test_criterion_06_gradient_correctness():
    rng = np.random.default_rng(606)
    checked = 0
    worst = 0.0
    while checked < 20:
        r = int(rng.integers(2, 4))
        n = int(rng.integers(r + 1, 6))
        m = int(rng.integers(r, n + 1))
        A = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
        B = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
        p = MatrixPencil(A, B)
        mu = rng.standard_normal(r) + 1j * rng.standard_normal(r)
        d = gamma_length(r)
        gamma = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        ev = eval_sigma(p, mu, gamma)
        if not (ev.mult_ok and ev.li_ok):
            continue
        g_an = gamma_gradient(p, mu, gamma, ev)
        g_fd = fd_gradient(p, mu, gamma)
        rel = np.linalg.norm(g_an - g_fd) / max(np.linalg.norm(g_fd), 1e-30)
        worst = max(worst, rel)
        checked += 1
    ok = worst <= 1e-5
    report(6, "analytic gradient vs central differences", ok, f"worst rel dev={worst:.2e}")
    assert ok


def test_criterion_07_lemma_invariants(rect_result):
    pencil, result, _ = rect_result
    optima = []
    if result.mult_ok and result.li_ok:
        optima.append((pencil, result.mu_star, result.gamma_star))
    # additional qualified inner optima at nearby target choices
    rng = np.random.default_rng(707)
    while len(optima) < 5:
        mu = np.array([2.5, 1.5]) + 0.5 * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
        _, gamma, ev = g_of_mu(pencil, mu)
        if ev.mult_ok and ev.li_ok:
            optima.append((pencil, mu, gamma))
    worst_coupling = 0.0
    worst_gram = 0.0
    worst_norm = 0.0
    # the invariants hold at the exact maximizer; re-solve tightly so the
    # inner residual does not dominate the 1e-8 norm comparison
    tight = BfgsConfig(grad_tol=1e-11)
    for p, mu, gamma in optima:
        value, gamma, ev = g_of_mu(p, mu, tight, gamma_start=gamma)
        assert ev.mult_ok and ev.li_ok
        r = np.atleast_1d(mu).size
        prods = coupling_products(p, ev, r)
        worst_coupling = max(worst_coupling, float(np.max(np.abs(prods))) if prods.size else 0.0)
        U = unvec(ev.left_vector, p.n, r)
        V = unvec(ev.right_vector, p.m, r)
        worst_gram = max(worst_gram, np.linalg.norm(U.conj().T @ U - V.conj().T @ V, 2))
        dA = build_perturbation(p, mu, gamma, ev)
        worst_norm = max(worst_norm, abs(np.linalg.norm(dA, 2) - value) / value)
    ok = worst_coupling <= 1e-6 and worst_gram <= 1e-6 and worst_norm <= 1e-8
    report(
        7,
        "stationarity invariants at qualified optima",
        ok,
        f"max|U_j* B V_l|={worst_coupling:.2e}, max‖U*U-V*V‖={worst_gram:.2e}, "
        f"max rel ‖dA‖ dev={worst_norm:.2e}",
    )
    assert ok


def test_criterion_08_sylvester_oracles(diag_result, sym3_result):
    rng = np.random.default_rng(808)
    eig_pool = [0.0, 1.0, 2.0, -1.0 + 1.0j]
    mismatches = 0
    for _ in range(50):
        def draw(total):
            blocks = []
            left = total
            while left > 0:
                pp = int(rng.integers(1, left + 1))
                blocks.append((eig_pool[rng.integers(len(eig_pool))], pp))
                left -= pp
            return JordanSpec(blocks=tuple(blocks))

        F_spec = draw(int(rng.integers(1, 5)))
        G_spec = draw(int(rng.integers(1, 5)))
        df = sylvester_dimension_formula(F_spec, G_spec)
        db = sylvester_dimension_bruteforce(jordan_matrix(F_spec), jordan_matrix(G_spec))
        if df != db:
            mismatches += 1
    formula_ok = mismatches == 0

    # rank deficiency of the coupled matrix at the two computed solutions
    rank_flags = []
    for pencil, result in (
        (DIAG_PENCIL, diag_result),
        (sym3_result[0], sym3_result[2]),
    ):
        pts = []
        for z in result.mu_star.tolist():
            if all(abs(z - q) > 1e-9 for q in pts):
                pts.append(z)
        rep = verify_result(pencil, result.delta_A, result.mu_star, 2, FiniteSet(tuple(pts)))
        rank_flags.append(rep.rank_defect_ok)
    rank_ok = all(rank_flags)
    ok = formula_ok and rank_ok
    report(
        8,
        "Sylvester dimension formula and rank deficiency",
        ok,
        f"formula mismatches={mismatches}/50, rank-defect flags={rank_flags}",
    )
    assert ok


def test_criterion_09_coupling_decay():
    scales = [1.0, 10.0, 1e2, 1e3, 1e4]
    rng_master = np.random.default_rng(909)
    ratios = []
    tails_ok = []
    for _ in range(10):
        n = int(rng_master.integers(2, 7))
        A = rng_master.standard_normal((n, n)) + 1j * rng_master.standard_normal((n, n))
        while True:
            B = rng_master.standard_normal((n, n)) + 1j * rng_master.standard_normal((n, n))
            if np.linalg.cond(B) < 1e3:
                break
        p = MatrixPencil(A, B)
        mu = rng_master.standard_normal(2) + 1j * rng_master.standard_normal(2)
        g0 = rng_master.standard_normal(1) + 1j * rng_master.standard_normal(1)
        vals = gamma_decay_probe(p, mu, g0, scales)
        ratios.append(vals[-1] / vals[0])
        tails_ok.append(all(vals[i] >= vals[i + 1] for i in range(1, len(vals) - 1)))
    ok = max(ratios) < 0.01 and all(tails_ok)
    report(
        9,
        "objective decay for large coupling",
        ok,
        f"max final/initial ratio={max(ratios):.2e}, tails decreasing={all(tails_ok)}",
    )
    assert ok


def test_criterion_10_pseudospectra_cross_check(sym3_result):
    pencil, mu_star, result, _ = sym3_result
    center = (-0.85488, 0.0)
    hw = 0.005
    spec = GridSpec(
        box=Box([center[0] - hw, center[1] - hw], [center[0] + hw, center[1] + hw]),
        nx=200,
        ny=200,
    )
    grid = compute_grid(pencil, spec)
    gmin = float(grid.values.min())
    dev = abs(gmin - 0.59299)
    ok = dev <= 1e-3
    report(
        10,
        "pseudospectrum grid minimum matches distance",
        ok,
        f"grid min={gmin:.5f}, deviation={dev:.2e}",
    )
    assert ok


def test_criterion_11_lipschitz_property():
    pencil = parse_pencil(PENCIL_DIR / "rect4x3.json")
    L = lipschitz_bound(pencil)
    rng = np.random.default_rng(1111)
    worst_excess = -np.inf
    for _ in range(100):
        mu1 = rng.uniform(-1, 4, 2) + 1j * rng.uniform(-3, 3, 2)
        mu2 = mu1 + 0.5 * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
        g1, _, _ = g_of_mu(pencil, mu1)
        g2, _, _ = g_of_mu(pencil, mu2)
        bound = (1 + 1e-6) * np.linalg.norm(mu1 - mu2) * L + 2e-6
        worst_excess = max(worst_excess, abs(g1 - g2) - bound)
    ok = worst_excess <= 0.0
    report(
        11,
        "Lipschitz bound on the outer objective",
        ok,
        f"max (|dg| - bound)={worst_excess:.2e}",
    )
    assert ok
