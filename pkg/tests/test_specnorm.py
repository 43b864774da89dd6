"""Norm predicates: direct vs structural criteria, 2x2 subspace geometry."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from preservers.families import SIGMA1, SIGMA2, SIGMA3
from preservers.matcore import (
    DEFAULT_TOL,
    FIELD_C,
    FIELD_R,
    Mat,
    ToleranceProfile,
    eye,
    haar_unitary,
    mat,
    random_mat,
    unit,
    zeros,
)
from preservers.specnorm import (
    IN_V1,
    IN_V2,
    NEITHER,
    InconsistencyError,
    STAR_LEFT,
    STAR_RIGHT,
    is_normal_by_norm,
    is_unitary_multiple,
    norm_mult_direct,
    norm_mult_structural,
    rot_refl_decompose,
    sesqui_mult,
    spectral_norm,
    svd,
    top_left_singular_subspace,
    top_right_singular_subspace,
    v12_membership,
    v3_decompose,
)


def power_iteration_norm(a: np.ndarray, iters: int = 2000) -> float:
    """Independent largest-singular-value oracle: power iteration on A*A."""
    g = a.conj().T @ a
    v = np.ones(a.shape[1]) / np.sqrt(a.shape[1])
    for _ in range(iters):
        w = g @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
    return float(np.sqrt(np.real(v.conj() @ g @ v)))


def test_spectral_norm_closed_form():
    # A = [[3,0],[4,5]]: A^T A = [[25,20],[20,25]], eigenvalues 45 and 5.
    a = mat(FIELD_R, [[3.0, 0.0], [4.0, 5.0]])
    assert spectral_norm(a) == pytest.approx(np.sqrt(45.0), rel=1e-14)


@pytest.mark.parametrize("seed", [0, 1, 2])
@pytest.mark.parametrize("field", [FIELD_R, FIELD_C])
def test_spectral_norm_vs_power_iteration(seed, field):
    rng = np.random.default_rng(seed)
    a = random_mat(4, field, rng)
    work = a.arr.real if field == FIELD_R else a.arr
    assert spectral_norm(a) == pytest.approx(power_iteration_norm(work), rel=1e-9)


def test_spectral_norm_zero():
    assert spectral_norm(zeros(3)) == 0.0


def test_svd_reconstructs_and_orders():
    rng = np.random.default_rng(3)
    for field in (FIELD_R, FIELD_C):
        a = random_mat(3, field, rng)
        dec = svd(a)
        assert np.all(np.diff(dec.s) <= 0)
        rebuilt = dec.U.arr @ np.diag(dec.s) @ dec.V.arr.conj().T
        assert np.allclose(rebuilt, a.arr, atol=1e-12)
        assert dec.U.field == field and dec.V.field == field


def test_top_subspaces_basic():
    a = mat(FIELD_C, np.diag([2.0, 2.0, 1.0]))
    right = top_right_singular_subspace(a)
    left = top_left_singular_subspace(a)
    assert right.shape == (3, 2) and left.shape == (3, 2)
    # span{e1, e2} in both cases; check via projector equality
    proj = right @ right.conj().T
    assert np.allclose(proj, np.diag([1.0, 1.0, 0.0]), atol=1e-12)
    assert np.allclose(left @ left.conj().T, proj, atol=1e-12)


def test_top_subspace_rejects_zero():
    with pytest.raises(ValueError):
        top_right_singular_subspace(zeros(2))


def test_is_unitary_multiple_basics():
    c, u = is_unitary_multiple(mat(FIELD_C, 3.0 * np.eye(2)))
    assert c == pytest.approx(3.0)
    assert np.allclose(u.arr.conj().T @ u.arr, np.eye(2), atol=1e-12)
    assert is_unitary_multiple(mat(FIELD_C, np.diag([1.0, 2.0]))) is None
    # zero is 0 * I by convention
    c0, u0 = is_unitary_multiple(zeros(2))
    assert c0 == 0.0 and u0.allclose(eye(2), atol=0.0)


def test_is_unitary_multiple_reconstructs():
    rng = np.random.default_rng(4)
    w = haar_unitary(3, FIELD_C, rng)
    c, u = is_unitary_multiple(w * 2.5)
    assert c == pytest.approx(2.5, rel=1e-12)
    assert (u * c).allclose(w * 2.5, atol=1e-10)


def test_is_unitary_multiple_rank_gap_boundary():
    gap = DEFAULT_TOL.rank_gap
    inside = mat(FIELD_C, np.diag([1.0, 1.0 - 0.5 * gap]))
    outside = mat(FIELD_C, np.diag([1.0, 1.0 - 10.0 * gap]))
    assert is_unitary_multiple(inside) is not None
    assert is_unitary_multiple(outside) is None


def test_norm_mult_direct_matrix_units():
    hold = norm_mult_direct(unit(1, 1, 2), unit(1, 2, 2))
    assert hold.holds and hold.lhs == pytest.approx(1.0) and hold.rhs == pytest.approx(1.0)
    fail = norm_mult_direct(unit(1, 1, 2), unit(2, 1, 2))
    assert not fail.holds
    assert fail.lhs == pytest.approx(0.0, abs=1e-15)
    assert fail.rhs == pytest.approx(1.0)


def test_norm_mult_structural_agrees_on_matrix_units():
    hold = norm_mult_structural(unit(1, 1, 2), unit(1, 2, 2))
    assert hold.holds
    assert hold.witness is not None
    # the witness is a unit vector x with ||ABx|| = ||A|| ||B||
    x = hold.witness
    assert np.linalg.norm(x) == pytest.approx(1.0)
    ab = (unit(1, 1, 2) @ unit(1, 2, 2)).arr
    assert np.linalg.norm(ab @ x) == pytest.approx(1.0, abs=1e-10)
    assert not norm_mult_structural(unit(1, 1, 2), unit(2, 1, 2)).holds


def test_norm_mult_structural_rejects_zero():
    with pytest.raises(ValueError):
        norm_mult_structural(zeros(2), eye(2))


def test_norm_mult_on_constructed_diagonal_pair():
    a = mat(FIELD_C, np.diag([2.0, 1.0]))
    b = mat(FIELD_C, np.diag([3.0, 1.0]))
    assert norm_mult_direct(a, b).holds
    assert norm_mult_structural(a, b).holds
    # rotate B's top direction away from A's and both criteria must flip
    b_rot = mat(FIELD_C, np.diag([1.0, 3.0]))
    assert not norm_mult_direct(a, b_rot).holds
    assert not norm_mult_structural(a, b_rot).holds


def test_pair_field_mismatch_raises():
    with pytest.raises(ValueError):
        norm_mult_direct(eye(2, FIELD_R), eye(2, FIELD_C))
    with pytest.raises(ValueError):
        sesqui_mult(eye(2), eye(3), STAR_LEFT)


def test_sesqui_shared_right_subspace():
    rng = np.random.default_rng(5)
    q = haar_unitary(3, FIELD_C, rng)
    p1 = haar_unitary(3, FIELD_C, rng)
    p2 = haar_unitary(3, FIELD_C, rng)
    a = p1 @ Mat(FIELD_C, np.diag([2.0, 1.0, 0.5])) @ q.H
    b = p2 @ Mat(FIELD_C, np.diag([3.0, 1.0, 0.2])) @ q.H
    v = sesqui_mult(a, b, STAR_RIGHT)
    assert v.holds
    assert v.lhs == pytest.approx(6.0, rel=1e-12)
    assert v.witness is not None
    # the same pair genuinely fails on the other side
    assert not sesqui_mult(a, b, STAR_LEFT).holds


def test_sesqui_shared_left_subspace():
    rng = np.random.default_rng(6)
    p = haar_unitary(3, FIELD_C, rng)
    q1 = haar_unitary(3, FIELD_C, rng)
    q2 = haar_unitary(3, FIELD_C, rng)
    a = p @ Mat(FIELD_C, np.diag([2.0, 1.0, 0.5])) @ q1.H
    b = p @ Mat(FIELD_C, np.diag([3.0, 1.0, 0.2])) @ q2.H
    v = sesqui_mult(a, b, STAR_LEFT)
    assert v.holds and v.lhs == pytest.approx(6.0, rel=1e-12)
    assert not sesqui_mult(a, b, STAR_RIGHT).holds


def test_sesqui_side_validation():
    with pytest.raises(ValueError):
        sesqui_mult(eye(2), eye(2), "star_up")


def test_sesqui_inconsistency_on_misconfigured_tolerance():
    """A huge eq_rel accepts pairs the geometry clearly refutes; the split
    must surface as InconsistencyError rather than a silent verdict."""
    bad = ToleranceProfile(eq_abs=1e-13, eq_rel=0.9, rank_gap=1e-12)
    a = mat(FIELD_C, np.diag([2.0, 1.0]))
    b = mat(FIELD_C, [[0.0, 3.0], [1.0, 0.0]])  # top right direction e2
    with pytest.raises(InconsistencyError):
        sesqui_mult(a, b, STAR_RIGHT, bad)


def test_is_normal_by_norm():
    assert is_normal_by_norm(mat(FIELD_C, [[1.0, 0.0], [0.0, -2.0]]))
    rng = np.random.default_rng(7)
    assert is_normal_by_norm(haar_unitary(2, FIELD_C, rng))
    assert not is_normal_by_norm(mat(FIELD_C, [[0.0, 1.0], [0.0, 0.0]]) + eye(2) * 0.1)
    assert is_normal_by_norm(zeros(2))
    with pytest.raises(ValueError):
        is_normal_by_norm(eye(3))


def test_v12_membership():
    assert v12_membership(mat(FIELD_R, [[0.0, 1.0], [-1.0, 0.0]])) == IN_V1
    assert v12_membership(eye(2, FIELD_R)) == IN_V1
    assert v12_membership(mat(FIELD_R, [[1.0, 0.0], [0.0, -1.0]])) == IN_V2
    assert v12_membership(mat(FIELD_R, [[0.0, 1.0], [1.0, 0.0]])) == IN_V2
    assert v12_membership(mat(FIELD_R, [[1.0, 1.0], [0.0, 1.0]])) == NEITHER
    assert v12_membership(zeros(2, FIELD_R)) == IN_V1  # documented convention
    with pytest.raises(ValueError):
        v12_membership(eye(2, FIELD_C))


def test_v3_decompose_axis():
    alpha, w = v3_decompose(SIGMA3)
    assert alpha == pytest.approx(1.0)
    assert w.allclose(SIGMA3, atol=1e-12)


def test_v3_decompose_phase_extraction():
    phase = (1 + 1j) / np.sqrt(2)
    alpha, w = v3_decompose(SIGMA3 * phase)
    assert abs(alpha) == pytest.approx(1.0)
    assert (w * alpha).allclose(SIGMA3 * phase, atol=1e-12)
    # W itself sits in the real span: real zeta coordinates
    from preservers.families import zeta_coords
    assert np.allclose(zeta_coords(w).imag, 0.0, atol=1e-12)


def test_v3_decompose_magnitude_stays_in_w():
    alpha, w = v3_decompose(SIGMA1 * -3.0)
    assert abs(alpha) == pytest.approx(1.0)
    assert (w * alpha).allclose(SIGMA1 * -3.0, atol=1e-12)


def test_v3_decompose_rejects_non_multiples():
    assert v3_decompose(unit(1, 1, 2)) is None


def test_v3_decompose_zero():
    alpha, w = v3_decompose(zeros(2))
    assert alpha == 0.0 and w.allclose(zeros(2), atol=0.0)


def test_rot_refl_decompose_pure_reflection():
    alpha, rot, beta, refl = rot_refl_decompose(mat(FIELD_R, [[1.0, 0.0], [0.0, -1.0]]))
    assert alpha == 0.0 and beta == pytest.approx(1.0)
    assert rot.allclose(eye(2, FIELD_R), atol=0.0)  # documented default
    assert refl.allclose(mat(FIELD_R, [[1.0, 0.0], [0.0, -1.0]]), atol=0.0)


def test_rot_refl_decompose_reconstructs():
    rng = np.random.default_rng(8)
    b = random_mat(2, FIELD_R, rng)
    alpha, rot, beta, refl = rot_refl_decompose(b)
    assert (rot * alpha + refl * beta).allclose(b, atol=1e-12)
    # factors are orthogonal with the advertised orientations
    assert np.allclose(rot.arr @ rot.arr.conj().T, np.eye(2), atol=1e-12)
    assert np.linalg.det(rot.arr.real) == pytest.approx(1.0)
    assert np.linalg.det(refl.arr.real) == pytest.approx(-1.0)


entries = st.floats(min_value=-5, max_value=5, allow_nan=False,
                    allow_infinity=False)


@given(st.lists(entries, min_size=8, max_size=8),
       st.lists(entries, min_size=8, max_size=8))
@settings(max_examples=60, deadline=None)
def test_spectral_norm_submultiplicative(xs, ys):
    a = mat(FIELD_C, np.array(xs[:4]).reshape(2, 2)
            + 1j * np.array(xs[4:]).reshape(2, 2))
    b = mat(FIELD_C, np.array(ys[:4]).reshape(2, 2)
            + 1j * np.array(ys[4:]).reshape(2, 2))
    assert spectral_norm(a @ b) <= spectral_norm(a) * spectral_norm(b) + 1e-9


@given(st.integers(min_value=0, max_value=2 ** 31 - 1))
@settings(max_examples=30, deadline=None)
def test_spectral_norm_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    a = random_mat(3, FIELD_C, rng)
    u = haar_unitary(3, FIELD_C, rng)
    assert spectral_norm(u @ a) == pytest.approx(spectral_norm(a), rel=1e-10)
    assert spectral_norm(a @ u) == pytest.approx(spectral_norm(a), rel=1e-10)
