import numpy as np
import pytest

from pencildist import MatrixPencil, build_C, build_L, unvec, validate, vec
from pencildist.exceptions import ContractViolationError
from pencildist.pencil import gamma_index_pairs, gamma_length

DIAG_PENCIL = MatrixPencil(np.diag([-1.0, 5.0, 2.0]), np.diag([0.0, 1.0, 1.0]))


def test_pencil_shape_mismatch():
    with pytest.raises(ContractViolationError):
        MatrixPencil(np.zeros((3, 3)), np.zeros((2, 2)))


def test_pencil_wide_rejected():
    with pytest.raises(ContractViolationError):
        MatrixPencil(np.zeros((2, 3)), np.zeros((2, 3)))


def test_pencil_nonfinite_rejected():
    A = np.array([[np.inf, 0.0], [0.0, 1.0]])
    with pytest.raises(ContractViolationError):
        MatrixPencil(A, np.eye(2))


def test_pencil_properties():
    p = MatrixPencil(np.zeros((4, 3)), np.zeros((4, 3)))
    assert (p.n, p.m, p.is_square) == (4, 3, False)
    assert DIAG_PENCIL.is_square


def test_gamma_length():
    assert [gamma_length(r) for r in (1, 2, 3, 4)] == [0, 1, 3, 6]


def test_gamma_index_pairs_order():
    # column-wise strict lower triangle: (2,1),(3,1),(3,2) for r = 3
    assert gamma_index_pairs(3) == [(2, 1), (3, 1), (3, 2)]
    assert gamma_index_pairs(1) == []


def test_validate_well_posedness():
    assert validate(DIAG_PENCIL, 2).well_posed
    report = validate(DIAG_PENCIL, 3)
    assert report.rank_B == 2
    assert not report.well_posed
    with pytest.raises(ContractViolationError):
        validate(DIAG_PENCIL, 0)


def test_build_C_r2():
    C = build_C([5.0, 1.0], [2.0 + 1.0j])
    assert np.allclose(C, np.array([[5.0, -2.0 - 1.0j], [0.0, 1.0]]))


def test_build_C_r3_placement():
    C = build_C([1.0, 2.0, 3.0], [10.0, 20.0, 30.0])
    expected = np.array([[1.0, -10.0, -20.0], [0.0, 2.0, -30.0], [0.0, 0.0, 3.0]])
    assert np.allclose(C, expected)


def test_build_L_block_structure():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((3, 2))
    B = rng.standard_normal((3, 2))
    p = MatrixPencil(A, B)
    mu = [1.5, -0.5]
    gamma = [0.25]
    L = build_L(p, mu, gamma)
    assert L.shape == (6, 4)
    assert np.allclose(L[:3, :2], A - mu[0] * B)
    assert np.allclose(L[3:, 2:], A - mu[1] * B)
    assert np.allclose(L[3:, :2], gamma[0] * B)
    assert np.allclose(L[:3, 2:], 0.0)


def test_build_L_gamma_zero_block_diagonal_singular_values():
    # known singular value list for the diagonal pencil at mu = (5, 1)
    L = build_L(DIAG_PENCIL, [5.0, 1.0], [0.0])
    s = np.linalg.svd(L, compute_uv=False)
    assert np.allclose(sorted(s, reverse=True), [4.0, 3.0, 1.0, 1.0, 1.0, 0.0], atol=1e-12)


def test_gamma_length_mismatch_rejected():
    with pytest.raises(ContractViolationError):
        build_L(DIAG_PENCIL, [5.0, 1.0], [1.0, 2.0])


def test_vec_unvec_roundtrip():
    rng = np.random.default_rng(1)
    M = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    assert np.allclose(unvec(vec(M), 4, 3), M)
    # column-major convention
    assert np.allclose(vec(M)[:4], M[:, 0])
    with pytest.raises(ContractViolationError):
        unvec(np.zeros(5), 2, 3)
