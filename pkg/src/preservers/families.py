"""Constructors for the structured operator families.

Four kinds of maps on matrix space are built here:

* sandwich maps  X |-> r U phi(X) V  with r > 0, U and V unitary, and phi
  one of identity, transpose, entrywise conjugation, or conjugate transpose;
* the 2x2 real family ``phi_c`` that fixes the rotation-like plane of
  M_2(R) and scales its traceless-symmetric complement by c;
* the 2x2 complex twisted family ``mu_twist`` built from the splitting of
  M_2(C) into the quaternion-like subspace V3 and iV3;
* the double-cover bridge between SU(2) and SO(3) used to turn rotation
  data back into unitaries.

The quaternion-like basis of V3 is the package-wide convention:

    SIGMA1 = [[0, i], [i, 0]]
    SIGMA2 = [[0, 1], [-1, 0]]
    SIGMA3 = [[i, 0], [0, -i]]

with SIGMA1 SIGMA2 = -SIGMA3 cyclically (the triple multiplies with the
opposite orientation to the textbook quaternion units i, j, k; see
``su2_lift`` for where the sign matters) and SIGMA_j^2 = -I, so
span_R{I, SIGMA1, SIGMA2, SIGMA3} is closed under multiplication and every
element W of it satisfies W* W = (sum of squared coefficients) I.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import (
    DEFAULT_TOL, FIELD_C, FIELD_R, Mat, ToleranceProfile, eye, frobenius_inner,
    mat,
)
from .linop import MatLinOp, op_from_action

SIGMA1 = mat(FIELD_C, [[0.0, 1j], [1j, 0.0]])
SIGMA2 = mat(FIELD_C, [[0.0, 1.0], [-1.0, 0.0]])
SIGMA3 = mat(FIELD_C, [[1j, 0.0], [0.0, -1j]])
QUATERNION_BASIS = (eye(2, FIELD_C), SIGMA1, SIGMA2, SIGMA3)

VARIANT_ID = "id"
VARIANT_TRANSPOSE = "transpose"
VARIANT_CONJ = "conj"
VARIANT_CONJ_TRANSPOSE = "conj_transpose"
VARIANTS = (VARIANT_ID, VARIANT_TRANSPOSE, VARIANT_CONJ, VARIANT_CONJ_TRANSPOSE)


def variants_for(field: str) -> tuple:
    """Admissible sandwich variants; conjugation collapses to identity over R."""
    if field == FIELD_R:
        return (VARIANT_ID, VARIANT_TRANSPOSE)
    return VARIANTS


def apply_variant(a: Mat, variant: str) -> Mat:
    if variant == VARIANT_ID:
        return a
    if variant == VARIANT_TRANSPOSE:
        return a.T
    if variant == VARIANT_CONJ:
        return a.conj()
    if variant == VARIANT_CONJ_TRANSPOSE:
        return a.H
    raise ValueError(f"unknown variant {variant!r}")


def zeta_coords(a: Mat) -> np.ndarray:
    """Complex coordinates of a 2x2 complex matrix in the quaternion basis.

    The four basis matrices form a C-basis of M_2(C); each has squared
    Frobenius norm 2, hence the /2.  A lies in V3 exactly when all four
    coordinates are real.
    """
    if a.field != FIELD_C or a.n != 2:
        raise ValueError("zeta_coords expects a 2x2 complex matrix")
    return np.array([frobenius_inner(a, b) / 2.0 for b in QUATERNION_BASIS])


def mat_from_zeta(z) -> Mat:
    z = np.asarray(z, dtype=np.complex128)
    acc = np.zeros((2, 2), dtype=np.complex128)
    for coef, b in zip(z, QUATERNION_BASIS):
        acc += coef * b.arr
    return Mat(FIELD_C, acc)


def _check_unitary(u: Mat, tol: ToleranceProfile, what: str) -> None:
    gram = u.H @ u
    dev = float(np.max(np.abs(gram.arr - np.eye(u.n))))
    if dev > tol.eq_abs:
        raise ValueError(f"{what} is not unitary (max deviation {dev:.3e})")


@dataclass(frozen=True)
class SandwichForm:
    """Parameters (r, U, V, variant) of a sandwich map."""

    r: float
    U: Mat
    V: Mat
    variant: str

    def __post_init__(self):
        if not (np.isfinite(self.r) and self.r > 0):
            raise ValueError("r must be a positive finite number")
        if self.U.field != self.V.field or self.U.n != self.V.n:
            raise ValueError("U and V must live in the same matrix space")
        if self.variant not in variants_for(self.U.field):
            raise ValueError(
                f"variant {self.variant!r} is not admissible over {self.U.field!r}")

    def as_op(self, tol: ToleranceProfile = DEFAULT_TOL) -> MatLinOp:
        return sandwich_op(self.r, self.U, self.V, self.variant, tol)


def sandwich_op(r: float, u: Mat, v: Mat, variant: str,
                tol: ToleranceProfile = DEFAULT_TOL) -> MatLinOp:
    """The operator X |-> r U phi_variant(X) V.

    U and V must be unitary (checked within eq_abs) over a common field, and
    r must be positive.  Conjugating variants require field "C".
    """
    form = SandwichForm(float(r), u, v, variant)  # validates shape bookkeeping
    _check_unitary(u, tol, "U")
    _check_unitary(v, tol, "V")
    field, n = u.field, u.n
    return op_from_action(
        field, n, lambda a: (u @ apply_variant(a, form.variant) @ v) * form.r)


def _split_rot_sym(arr: np.ndarray):
    """Split a real 2x2 array into its rotation-like and traceless-symmetric parts."""
    p = (arr[0, 0] + arr[1, 1]) / 2.0
    q = (arr[0, 1] - arr[1, 0]) / 2.0
    v1 = np.array([[p, q], [-q, p]])
    return v1, arr - v1


def phi_c(c: float, tol: ToleranceProfile = DEFAULT_TOL) -> MatLinOp:
    """The map on M_2(R) fixing span{I, E12-E21} and scaling its complement by c."""
    if not (np.isfinite(c) and c > 0):
        raise ValueError("c must be a positive finite number")

    def act(a: Mat) -> Mat:
        v1, v2 = _split_rot_sym(a.arr.real)
        return Mat(FIELD_R, v1 + c * v2)

    return op_from_action(FIELD_R, 2, act)


def mu_twist(gamma: complex, mu: complex, u: Mat, v: Mat,
             tol: ToleranceProfile = DEFAULT_TOL) -> MatLinOp:
    """Twisted 2x2 complex map with core action X + iY |-> X + mu Y on V3 + iV3.

    The returned operator T satisfies gamma * V T(U X U*) V* = L0(X) where
    L0 is the core action, i.e. T(A) = (1/gamma) V* L0(U* A U) V.  ``gamma``
    must be nonzero and ``mu`` must have nonzero imaginary part (a real mu
    would make the map non-injective).
    """
    gamma = complex(gamma)
    mu = complex(mu)
    if gamma == 0:
        raise ValueError("gamma must be nonzero")
    if mu.imag == 0.0:
        raise ValueError("mu must have nonzero imaginary part")
    if u.field != FIELD_C or u.n != 2 or v.field != FIELD_C or v.n != 2:
        raise ValueError("U and V must be 2x2 complex matrices")
    _check_unitary(u, tol, "U")
    _check_unitary(v, tol, "V")
    uh, vh = u.H, v.H
    inv_gamma = 1.0 / gamma

    def act(a: Mat) -> Mat:
        z = zeta_coords(uh @ a @ u)
        core = mat_from_zeta(z.real + mu * z.imag)
        return (vh @ core @ v) * inv_gamma

    return op_from_action(FIELD_C, 2, act)


# -- SU(2) <-> SO(3) ---------------------------------------------------------


def so3_of_unitary(u: Mat, tol: ToleranceProfile = DEFAULT_TOL) -> Mat:
    """Rotation matrix of conjugation by ``u`` on span{SIGMA_j}.

    Column k holds the coordinates of u SIGMA_k u* in the orthonormal basis
    {SIGMA_j / sqrt(2)}.  The result is unchanged when u is multiplied by a
    unimodular scalar, which is exactly the double-cover ambiguity.
    """
    if u.field != FIELD_C or u.n != 2:
        raise ValueError("expected a 2x2 complex matrix")
    _check_unitary(u, tol, "U")
    r = np.empty((3, 3))
    for k in range(3):
        img = u @ QUATERNION_BASIS[k + 1] @ u.H
        for j in range(3):
            r[j, k] = (frobenius_inner(img, QUATERNION_BASIS[j + 1]) / 2.0).real
    return Mat(FIELD_R, r)


def su2_lift(r: Mat, tol: ToleranceProfile = DEFAULT_TOL) -> Mat:
    """A special unitary U with so3_of_unitary(U) = r.

    Quaternion extraction picks the numerically strongest of the four
    branches (trace vs. each diagonal entry); the sign ambiguity of the
    double cover is resolved by making the first nonzero quaternion
    component positive.
    """
    if r.field != FIELD_R or r.n != 3:
        raise ValueError("expected a 3x3 real matrix")
    m = r.arr.real
    dev = float(np.max(np.abs(m.T @ m - np.eye(3))))
    if dev > tol.eq_abs:
        raise ValueError(f"input is not orthogonal (max deviation {dev:.3e})")
    det = float(np.linalg.det(m))
    if abs(det - 1.0) > max(tol.eq_abs, tol.eq_rel):
        raise ValueError(f"input is not special orthogonal (det {det:.6f})")

    # The SIGMA triple multiplies with reversed orientation relative to the
    # textbook quaternion units (SIGMA1 SIGMA2 = -SIGMA3), so convert to the
    # textbook frame, extract there, and flip the third component back.
    flip = np.diag([1.0, 1.0, -1.0])
    m = flip @ m @ flip
    t = float(np.trace(m))
    branch = int(np.argmax([t, m[0, 0], m[1, 1], m[2, 2]]))
    if branch == 0:
        s = 2.0 * np.sqrt(max(1.0 + t, 0.0))
        q = np.array([s / 4.0,
                      (m[2, 1] - m[1, 2]) / s,
                      (m[0, 2] - m[2, 0]) / s,
                      (m[1, 0] - m[0, 1]) / s])
    elif branch == 1:
        s = 2.0 * np.sqrt(max(1.0 + m[0, 0] - m[1, 1] - m[2, 2], 0.0))
        q = np.array([(m[2, 1] - m[1, 2]) / s,
                      s / 4.0,
                      (m[0, 1] + m[1, 0]) / s,
                      (m[0, 2] + m[2, 0]) / s])
    elif branch == 2:
        s = 2.0 * np.sqrt(max(1.0 + m[1, 1] - m[0, 0] - m[2, 2], 0.0))
        q = np.array([(m[0, 2] - m[2, 0]) / s,
                      (m[0, 1] + m[1, 0]) / s,
                      s / 4.0,
                      (m[1, 2] + m[2, 1]) / s])
    else:
        s = 2.0 * np.sqrt(max(1.0 + m[2, 2] - m[0, 0] - m[1, 1], 0.0))
        q = np.array([(m[1, 0] - m[0, 1]) / s,
                      (m[0, 2] + m[2, 0]) / s,
                      (m[1, 2] + m[2, 1]) / s,
                      s / 4.0])
    q[3] = -q[3]
    q = q / np.linalg.norm(q)
    for comp in q:
        if abs(comp) > 1e-8:
            if comp < 0:
                q = -q
            break
    acc = q[0] * eye(2, FIELD_C).arr
    for coef, b in zip(q[1:], (SIGMA1, SIGMA2, SIGMA3)):
        acc = acc + coef * b.arr
    return Mat(FIELD_C, acc)
