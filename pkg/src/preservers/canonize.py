"""Recover canonical forms of structure-preserving operators, or refuse with
a diagnostic and, where possible, a concrete witness pair.

The entry points mirror the structure theory:

* ``maps_unitaries_to_multiples`` - does T send unitaries into scalar
  multiples of unitaries?  (Probes structured unitaries, then Haar samples.)
* ``decompose_sandwich`` - for n >= 3, factor T as r U phi(X) V and report
  which of the four variants phi is.
* ``reduce_2x2_real`` / ``reduce_2x2_complex`` - the dimension-two theory,
  where sandwich forms are not the whole story.
* ``classify_norm_mult_preserver`` - decide which family, if any, explains a
  preserver of one of the three norm-product relations.
* ``witness_nonpreservation`` - search for a pair on which the input relation
  holds but the image relation fails.

All verdicts are data; exceptions are reserved for precondition violations
(wrong dimension, non-bijective input where bijectivity was promised).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from .matcore import (
    DEFAULT_TOL, FIELD_C, FIELD_R, Mat, ToleranceProfile, eye, haar_unitary,
    mat, mat_to_json, random_unit_vector, unit,
)
from .linop import (
    COMPLEX_LINEAR, CONJUGATE_TWISTED, GENERAL_REAL_LINEAR, MatLinOp, compose,
    conj_op, conj_transpose_op, field_dim, is_bijective, left_mult_op,
    linearity_class, op_from_action, transpose_op,
)
from .families import (
    QUATERNION_BASIS, SIGMA1, SIGMA2, SIGMA3, VARIANT_CONJ,
    VARIANT_CONJ_TRANSPOSE, VARIANT_ID, VARIANT_TRANSPOSE, mat_from_zeta,
    mu_twist, phi_c, sandwich_op, su2_lift, zeta_coords,
)
from .specnorm import (
    STAR_LEFT, STAR_RIGHT, is_unitary_multiple, norm_mult_direct, sesqui_mult,
    spectral_norm, svd,
)

TAG_SANDWICH = "sandwich"
TAG_PHI_C = "phi_c"
TAG_MU_TWIST = "mu_twist"
TAG_TWO_BY_TWO = "two_by_two_unitary"
TAG_UNCLASSIFIED = "unclassified"

RELATION_PRODUCT = "product"
RELATION_STAR_LEFT = STAR_LEFT
RELATION_STAR_RIGHT = STAR_RIGHT
RELATIONS = (RELATION_PRODUCT, RELATION_STAR_LEFT, RELATION_STAR_RIGHT)
RELATION_UNITARY = "unitary"


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class CanonicalForm:
    """Tagged decomposition result.

    Exactly the payload fields relevant to ``tag`` are populated:

    sandwich            r, U, V, variant (gamma additionally for the folded
                        conjugation form V = omega U*)
    phi_c               gamma, c, U
    mu_twist            gamma, mu, U, V
    two_by_two_unitary  U, V, mu, a, b  (describing the unital normalization)
    unclassified        diagnostic

    ``residual`` is the relative operator-norm distance between the input
    and the reconstruction from the payload; classification never returns a
    named tag with residual above eq_rel.  ``witness``, when present, is a
    pair on which the source relation holds but the image relation fails.
    """

    tag: str
    residual: float | None = None
    r: float | None = None
    U: Mat | None = None
    V: Mat | None = None
    variant: str | None = None
    gamma: complex | None = None
    c: float | None = None
    mu: complex | None = None
    a: tuple | None = None
    b: tuple | None = None
    diagnostic: str | None = None
    witness: tuple | None = None
    checks: tuple = ()


@dataclass(frozen=True)
class V12Reduction:
    """Outcome of the 2x2 real reduction: does the normalized map preserve
    both distinguished planes?  ``normalized`` is T(I)^{-1} T when it exists."""

    preserved: bool
    normalized: MatLinOp | None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.preserved


@dataclass(frozen=True)
class UnitaryImageCheck:
    """Result of probing T on unitaries.  ``scales`` collects the multiple
    |c| per probe; ``spread`` is their relative spread (preservers are
    constant-scale)."""

    passed: bool
    counterexample: Mat | None
    scales: tuple
    spread: float

    def __bool__(self) -> bool:
        return self.passed


def _unclassified(diagnostic: str, checks=(), residual=None) -> CanonicalForm:
    return CanonicalForm(TAG_UNCLASSIFIED, residual=residual,
                         diagnostic=diagnostic, checks=tuple(checks))


def rel_op_residual(t: MatLinOp, s: MatLinOp) -> float:
    """Relative operator-norm distance between two realified operators."""
    denom = float(np.linalg.norm(t.mat, 2))
    dist = float(np.linalg.norm(t.mat - s.mat, 2))
    return dist if denom == 0.0 else dist / denom


# -- probing on unitaries ----------------------------------------------------


def _embed_leading(block: Mat, n: int, field: str) -> Mat:
    a = np.eye(n, dtype=np.complex128)
    a[:2, :2] = block.arr
    return Mat(field, a)


def structured_unitaries(field: str, n: int) -> list:
    """Deterministic probe set: structured 2x2 unitaries embedded in the
    leading block, plus permutation matrices."""
    out = []
    if field == FIELD_C:
        for b in QUATERNION_BASIS:
            out.append(_embed_leading(b, n, field))
        for b in QUATERNION_BASIS:
            out.append(_embed_leading(1j * b, n, field))
    else:
        for block in (eye(2, FIELD_R),
                      mat(FIELD_R, [[0.0, 1.0], [-1.0, 0.0]]),
                      mat(FIELD_R, [[1.0, 0.0], [0.0, -1.0]]),
                      mat(FIELD_R, [[0.0, 1.0], [1.0, 0.0]])):
            out.append(_embed_leading(block, n, field))
    cycle = np.zeros((n, n))
    for i in range(n):
        cycle[(i + 1) % n, i] = 1.0
    out.append(Mat(field, cycle))
    out.append(Mat(field, np.eye(n)[::-1].copy()))
    return out


def maps_unitaries_to_multiples(t: MatLinOp, trials: int = 200,
                                tol: ToleranceProfile = DEFAULT_TOL,
                                rng: np.random.Generator | None = None) -> UnitaryImageCheck:
    """Probe whether every tested unitary maps to a scalar multiple of a
    unitary.  Fails fast, returning the offending probe."""
    if rng is None:
        rng = np.random.default_rng([tol.seed, 23, t.n])
    probes = structured_unitaries(t.field, t.n)
    probes.extend(haar_unitary(t.n, t.field, rng) for _ in range(trials))
    scales = []
    for u in probes:
        um = is_unitary_multiple(t(u), tol)
        if um is None:
            return UnitaryImageCheck(False, u, tuple(scales), float("inf"))
        scales.append(um[0])
    top = max(scales)
    spread = 0.0 if top == 0.0 else (top - min(scales)) / top
    return UnitaryImageCheck(True, None, tuple(scales), spread)


# -- sandwich recovery (n >= 3) ---------------------------------------------


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate a vector so its first significant entry is real positive."""
    mags = np.abs(v)
    top = float(mags.max())
    if top == 0.0:
        return v
    idx = int(np.argmax(mags > 1e-8 * top))
    p = v[idx]
    return v * (np.conj(p) / abs(p))


def _variant_from_flags(conj_flag: bool, transpose_flag: bool) -> str:
    if conj_flag and transpose_flag:
        return VARIANT_CONJ_TRANSPOSE
    if conj_flag:
        return VARIANT_CONJ
    if transpose_flag:
        return VARIANT_TRANSPOSE
    return VARIANT_ID


_PRE_OPS = {
    VARIANT_ID: None,
    VARIANT_TRANSPOSE: transpose_op,
    VARIANT_CONJ: lambda field, n: conj_op(n),
    VARIANT_CONJ_TRANSPOSE: lambda field, n: conj_transpose_op(n),
}


def decompose_sandwich(t: MatLinOp, tol: ToleranceProfile = DEFAULT_TOL) -> CanonicalForm:
    """Factor a bijective unitary-multiple preserver on M_n (n >= 3).

    Returns a sandwich CanonicalForm, or unclassified with a diagnostic when
    the reconstruction residual exceeds eq_rel.  Raises ValueError for n < 3
    or a numerically singular input (preconditions of the structure theorem).
    """
    if t.n < 3:
        raise ValueError("sandwich recovery needs n >= 3; use the 2x2 reductions")
    bij = is_bijective(t, tol)
    if not bij:
        raise ValueError(
            f"operator is numerically singular (sigma_min={bij.sigma_min:.3e})")
    checks = []
    n, field = t.n, t.field

    conj_flag = False
    if field == FIELD_C:
        lc = linearity_class(t, tol)
        checks.append(Check("linearity", lc.tag != GENERAL_REAL_LINEAR, lc.tag))
        if lc.tag == GENERAL_REAL_LINEAR:
            return _unclassified(
                "neither complex-linear nor conjugate-twisted", checks)
        conj_flag = lc.tag == CONJUGATE_TWISTED

    # Id-type forms give T(E11), T(E12) a common column line; transpose-type
    # forms share a row line instead.  E11, E12 are real, so the conjugation
    # flag does not disturb this test.
    m1 = t(unit(1, 1, n, field)).arr
    m2 = t(unit(1, 2, n, field)).arr
    sc = np.linalg.svd(np.hstack([m1, m2]), compute_uv=False)
    sr = np.linalg.svd(np.vstack([m1, m2]), compute_uv=False)
    col_ratio = sc[1] / sc[0] if sc[0] > 0 else float("inf")
    row_ratio = sr[1] / sr[0] if sr[0] > 0 else float("inf")
    transpose_flag = row_ratio < col_ratio
    checks.append(Check(
        "orientation", True,
        f"column ratio {col_ratio:.3e}, row ratio {row_ratio:.3e}"))

    variant = _variant_from_flags(conj_flag, transpose_flag)
    pre = _PRE_OPS[variant]
    t0 = t if pre is None else compose(t, pre(field, n))

    a11 = t0(unit(1, 1, n, field))
    r = spectral_norm(a11)
    if not np.isfinite(r) or r < 1e-300:
        return _unclassified("image of E11 is numerically zero", checks)
    u1 = _fix_phase(np.array(svd(a11).U.arr[:, 0]))

    v_rows = np.empty((n, n), dtype=np.complex128)
    for j in range(1, n + 1):
        v_rows[j - 1, :] = (u1.conj() @ t0(unit(1, j, n, field)).arr) / r
    v1col = v_rows[0, :].conj()
    denom = r * float(np.linalg.norm(v1col)) ** 2
    if denom < 1e-300:
        return _unclassified("degenerate first row in recovered V", checks)
    u_cols = np.empty((n, n), dtype=np.complex128)
    for i in range(1, n + 1):
        u_cols[:, i - 1] = t0(unit(i, 1, n, field)).arr @ v1col / denom
    if not (np.all(np.isfinite(u_cols)) and np.all(np.isfinite(v_rows))):
        return _unclassified("non-finite entries in recovered factors", checks)

    if field == FIELD_R:
        u_mat, v_mat = Mat(field, u_cols.real), Mat(field, v_rows.real)
    else:
        u_mat, v_mat = Mat(field, u_cols), Mat(field, v_rows)
    try:
        rec = sandwich_op(r, u_mat, v_mat, variant, tol)
    except ValueError as exc:
        return _unclassified(f"recovered factors are not unitary: {exc}", checks)
    residual = rel_op_residual(t, rec)
    checks.append(Check("residual", residual <= tol.eq_rel, f"{residual:.3e}"))
    if residual > tol.eq_rel:
        return _unclassified(
            f"reconstruction residual {residual:.3e} exceeds eq_rel",
            checks, residual=residual)
    return CanonicalForm(TAG_SANDWICH, residual=residual, r=r, U=u_mat,
                         V=v_mat, variant=variant, checks=tuple(checks))


# -- 2x2 reductions ----------------------------------------------------------

_K2 = mat(FIELD_R, [[1.0, 0.0], [0.0, -1.0]])
_S2 = mat(FIELD_R, [[0.0, 1.0], [1.0, 0.0]])
_J2 = mat(FIELD_R, [[0.0, 1.0], [-1.0, 0.0]])


def _coeff(a: Mat, basis: Mat) -> float:
    """Coefficient of a real 2x2 matrix on a basis element of squared norm 2."""
    return float(np.sum(basis.arr.real * a.arr.real)) / 2.0


def reduce_2x2_real(t: MatLinOp, tol: ToleranceProfile = DEFAULT_TOL) -> V12Reduction:
    """Normalize by T(I) and test invariance of the two distinguished planes
    of M_2(R) (rotation-like and traceless-symmetric)."""
    if t.field != FIELD_R or t.n != 2:
        raise ValueError("reduction expects an operator on M_2(R)")
    ti = t(eye(2, FIELD_R))
    um = is_unitary_multiple(ti, tol)
    if um is None or um[0] <= tol.eq_abs:
        return V12Reduction(
            False, None,
            "T(I) is not an invertible multiple of an orthogonal matrix")
    l_op = compose(left_mult_op(Mat(FIELD_R, np.linalg.inv(ti.arr.real))), t)

    def v2_leak(img: Mat) -> float:
        p = (img.arr.real[0, 0] + img.arr.real[1, 1]) / 2.0
        q = (img.arr.real[0, 1] - img.arr.real[1, 0]) / 2.0
        v1 = np.array([[p, q], [-q, p]])
        return float(np.linalg.norm(img.arr.real - v1))

    def v1_leak(img: Mat) -> float:
        return float(np.hypot(_coeff(img, eye(2, FIELD_R)),
                              _coeff(img, _J2)) * np.sqrt(2.0))

    scale = max(1.0, float(np.linalg.norm(l_op.mat)))
    thr = tol.eq_abs * scale
    leaks = {
        "I": v2_leak(l_op(eye(2, FIELD_R))),
        "J": v2_leak(l_op(_J2)),
        "K": v1_leak(l_op(_K2)),
        "S": v1_leak(l_op(_S2)),
    }
    bad = {k: v for k, v in leaks.items() if v > thr}
    if bad:
        worst = max(bad.items(), key=lambda kv: kv[1])
        return V12Reduction(
            False, l_op,
            f"plane leakage at basis element {worst[0]}: {worst[1]:.3e}")
    return V12Reduction(True, l_op, "both planes preserved")


def _conj_with(u: Mat) -> MatLinOp:
    return op_from_action(u.field, u.n, lambda x: u @ x @ u.H)


def two_by_two_op(u: Mat, v: Mat, mu: complex, a, b) -> MatLinOp:
    """Build the unital 2x2 map described by a two_by_two form: pull the
    argument back through U (as U* X U, the same slot U occupies in the
    twist family), scale the quaternion axes by a, shift them by b, twist
    the imaginary part by mu, then push forward through V."""
    a = tuple(float(x) for x in a)
    b = tuple(float(x) for x in b)
    mu = complex(mu)
    uh, vh = u.H, v.H

    def core(x: Mat) -> Mat:
        z = zeta_coords(x)
        w = z.real + mu * z.imag
        scalar = w[0] + w[1] * b[0] + w[2] * b[1] + w[3] * b[2]
        return mat_from_zeta([scalar, w[1] * a[0], w[2] * a[1], w[3] * a[2]])

    return op_from_action(
        FIELD_C, 2, lambda x: vh @ core(uh @ x @ u) @ v)


def reduce_2x2_complex(t: MatLinOp, tol: ToleranceProfile = DEFAULT_TOL) -> CanonicalForm:
    """Reduce a 2x2 complex unitary-multiple preserver to its unital normal
    form: unitaries U, V, twist scalar mu, axis scales a, and shift b with

        V L(U X U*) V* = a_j Sigma_j + b_j I on X = Sigma_j,   L = T(I)^{-1} T,

    the twisted combination w = Re zeta + mu Im zeta feeding the diagonal
    action, so that L == two_by_two_op(U, V, mu, a, b) up to eq_rel.
    """
    if t.field != FIELD_C or t.n != 2:
        raise ValueError("reduction expects an operator on M_2(C)")
    checks = []
    ti = t(eye(2, FIELD_C))
    um = is_unitary_multiple(ti, tol)
    checks.append(Check("t_identity_unitary_multiple", um is not None,
                        "" if um else "T(I) fails the equal-singular-value test"))
    if um is None or um[0] <= tol.eq_abs:
        return _unclassified("T(I) is not an invertible unitary multiple", checks)
    l_op = compose(left_mult_op(Mat(FIELD_C, np.linalg.inv(ti.arr))), t)
    scale = max(1.0, float(np.linalg.norm(l_op.mat)))
    thr = tol.eq_abs * scale

    r4 = np.empty((4, 4))
    for k, bk in enumerate(QUATERNION_BASIS):
        z = zeta_coords(l_op(bk))
        if float(np.linalg.norm(z.imag)) > thr:
            checks.append(Check("v3_invariant", False, f"leak {np.linalg.norm(z.imag):.3e}"))
            return _unclassified(
                "normalized map does not preserve the quaternion span", checks)
        r4[:, k] = z.real
    checks.append(Check("v3_invariant", True, ""))

    zi = zeta_coords(l_op(mat(FIELD_C, 1j * np.eye(2))))
    mu = complex(zi[0])
    if float(np.linalg.norm(zi - mu * np.eye(4)[0])) > thr * max(1.0, abs(mu)):
        return _unclassified("image of iI is not a scalar matrix", checks)
    if abs(mu.imag) <= tol.eq_abs:
        checks.append(Check("twist_scalar", False, f"mu = {mu}"))
        return _unclassified(
            "twist scalar is real, which contradicts bijectivity", checks)
    for bk in QUATERNION_BASIS:
        dev = np.linalg.norm(
            zeta_coords(l_op(1j * bk)) - mu * zeta_coords(l_op(bk)))
        if float(dev) > thr * max(1.0, abs(mu)):
            checks.append(Check("twist_scalar", False, f"nonuniform ({dev:.3e})"))
            return _unclassified("twist scalar is not uniform on the span", checks)
    checks.append(Check("twist_scalar", True, f"mu = {mu:.6g}"))

    w = np.array(r4[0, 1:])
    s_block = np.array(r4[1:, 1:])
    x_fac, sing, yt = np.linalg.svd(s_block)
    y_fac = yt.T
    d3 = float(sing[2])
    if np.linalg.det(x_fac) < 0:
        x_fac = x_fac.copy()
        x_fac[:, 2] = -x_fac[:, 2]
        d3 = -d3
    if np.linalg.det(y_fac) < 0:
        y_fac = y_fac.copy()
        y_fac[:, 2] = -y_fac[:, 2]
        d3 = -d3
    p_rot = x_fac.T
    q_rot = y_fac
    a = (float(sing[0]), float(sing[1]), d3)
    if a[0] < a[1] or a[1] < abs(a[2]):  # SVD ordering plus sign absorption
        return _unclassified("axis scales violate their ordering", checks)
    if abs(a[2]) <= tol.eq_abs:
        return _unclassified("axis scale a3 vanishes (not bijective)", checks)

    u_fac = su2_lift(Mat(FIELD_R, q_rot), tol)
    v_fac = su2_lift(Mat(FIELD_R, p_rot), tol)
    b = tuple(float(x) for x in (w @ q_rot))

    reduced = compose(_conj_with(v_fac), compose(l_op, _conj_with(u_fac)))
    sigmas = (SIGMA1, SIGMA2, SIGMA3)
    for j, sj in enumerate(sigmas):
        want = a[j] * sj + mat(FIELD_C, b[j] * np.eye(2))
        img = reduced(sj)
        if float(np.linalg.norm(img.arr - want.arr)) > thr * max(1.0, abs(a[j])):
            checks.append(Check("reduced_images", False, f"Sigma_{j+1}"))
            return _unclassified("reduced basis images do not diagonalize", checks)
        dev = np.linalg.norm(reduced(1j * sj).arr - mu * img.arr)
        if float(dev) > thr * max(1.0, abs(mu)) * max(1.0, abs(a[j])):
            checks.append(Check("reduced_images", False, f"i Sigma_{j+1}"))
            return _unclassified("reduced images break the twist relation", checks)
    checks.append(Check("reduced_images", True, ""))

    rec = two_by_two_op(u_fac, v_fac, mu, a, b)
    residual = rel_op_residual(l_op, rec)
    checks.append(Check("residual", residual <= tol.eq_rel, f"{residual:.3e}"))
    if residual > tol.eq_rel:
        return _unclassified(
            f"reconstruction residual {residual:.3e} exceeds eq_rel",
            checks, residual=residual)
    return CanonicalForm(TAG_TWO_BY_TWO, residual=residual, U=u_fac, V=v_fac,
                         mu=mu, a=a, b=b, checks=tuple(checks))


# -- classification of norm-multiplicativity preservers ----------------------


def _check_relation(relation: str) -> None:
    if relation not in RELATIONS:
        raise ValueError(f"relation must be one of {RELATIONS}, got {relation!r}")


def _with_witness(form: CanonicalForm, t: MatLinOp, relation: str,
                  tol: ToleranceProfile, budget: int) -> CanonicalForm:
    if budget <= 0 or form.tag != TAG_UNCLASSIFIED:
        return form
    pair = witness_nonpreservation(t, relation, tol, budget)
    if pair is None:
        return form
    return replace(form, witness=pair)


def _classify_large(t: MatLinOp, relation: str, tol: ToleranceProfile,
                    budget: int, checks: list) -> CanonicalForm:
    try:
        form0 = decompose_sandwich(t, tol)
    except ValueError as exc:
        return _unclassified(str(exc), checks)
    checks.extend(form0.checks)
    if form0.tag != TAG_SANDWICH:
        return _with_witness(
            _unclassified(form0.diagnostic or "sandwich recovery failed", checks),
            t, relation, tol, budget)
    allowed = (VARIANT_ID, VARIANT_CONJ)
    ok = form0.variant in allowed
    checks.append(Check("variant_allowed", ok, form0.variant))
    if not ok:
        return _with_witness(
            _unclassified(
                f"variant {form0.variant!r} cannot preserve {relation}", checks),
            t, relation, tol, budget)

    if relation != RELATION_PRODUCT:
        return replace(form0, checks=tuple(checks))

    w = form0.V @ form0.U
    omega = complex(np.trace(w.arr) / t.n)
    dev = float(np.linalg.norm(w.arr - omega * np.eye(t.n)))
    scalar_ok = dev <= t.n * max(tol.eq_abs, tol.eq_rel)
    checks.append(Check("vu_scalar", scalar_ok, f"deviation {dev:.3e}"))
    if not scalar_ok:
        return _with_witness(
            _unclassified("V U is not scalar: not a conjugation form", checks),
            t, relation, tol, budget)
    omega /= abs(omega)
    if t.field == FIELD_R:
        omega = complex(round(omega.real))  # +1 or -1 exactly
    v_out = omega * form0.U.H
    rec = sandwich_op(form0.r, form0.U, v_out, form0.variant, tol)
    residual = rel_op_residual(t, rec)
    checks.append(Check("residual", residual <= tol.eq_rel, f"{residual:.3e}"))
    if residual > tol.eq_rel:
        return _with_witness(
            _unclassified(
                f"gauged reconstruction residual {residual:.3e}", checks),
            t, relation, tol, budget)
    gamma = form0.r * omega
    return CanonicalForm(TAG_SANDWICH, residual=residual, r=form0.r,
                         U=form0.U, V=v_out, variant=form0.variant,
                         gamma=gamma, checks=tuple(checks))


def _classify_2x2_real(t: MatLinOp, relation: str, tol: ToleranceProfile,
                       budget: int, checks: list) -> CanonicalForm:
    ti = t(eye(2, FIELD_R)).arr.real
    gamma = float(np.trace(ti)) / 2.0
    dev = float(np.linalg.norm(ti - gamma * np.eye(2)))
    scalar_ok = dev <= tol.eq_abs * max(1.0, abs(gamma)) and abs(gamma) > tol.eq_abs
    checks.append(Check("t_identity_scalar", scalar_ok, f"deviation {dev:.3e}"))
    if not scalar_ok:
        return _with_witness(
            _unclassified("T(I) is not an invertible real scalar matrix", checks),
            t, relation, tol, budget)
    l_op = MatLinOp(FIELD_R, 2, t.mat / gamma)
    red = reduce_2x2_real(l_op, tol)
    checks.append(Check("v1v2_preserved", red.preserved, red.detail))
    if not red.preserved:
        return _with_witness(
            _unclassified("normalized map does not preserve the planes", checks),
            t, relation, tol, budget)

    lk, ls = l_op(_K2), l_op(_S2)
    m2 = np.array([[_coeff(lk, _K2), _coeff(ls, _K2)],
                   [_coeff(lk, _S2), _coeff(ls, _S2)]])
    sv = np.linalg.svd(m2, compute_uv=False)
    c = float(np.mean(sv))
    conformal = (sv[0] - sv[1]) <= max(tol.eq_abs, tol.eq_rel * max(c, 1.0))
    checks.append(Check("v2_conformal", conformal,
                        f"singular values {sv[0]:.6g}, {sv[1]:.6g}"))
    if not conformal or c <= tol.eq_abs:
        return _with_witness(
            _unclassified("traceless-symmetric action is not conformal", checks),
            t, relation, tol, budget)
    lj = l_op(_J2)
    j_on_i = _coeff(lj, eye(2, FIELD_R))
    j_on_j = _coeff(lj, _J2)
    rot_ok = abs(j_on_i) <= tol.eq_abs and abs(abs(j_on_j) - 1.0) <= 10 * tol.eq_rel
    checks.append(Check("rotation_plane_orthogonal", rot_ok,
                        f"J image coefficients ({j_on_i:.3e}, {j_on_j:.6g})"))
    if not rot_ok:
        return _with_witness(
            _unclassified("rotation-like plane is not mapped orthogonally", checks),
            t, relation, tol, budget)

    c_op = compose(l_op, phi_c(1.0 / c, tol))
    c11 = c_op(unit(1, 1, 2, FIELD_R)).arr.real
    c22 = c_op(unit(2, 2, 2, FIELD_R)).arr.real
    _vals1, vecs1 = np.linalg.eigh((c11 + c11.T) / 2.0)
    u1 = vecs1[:, -1]
    if u1[np.argmax(np.abs(u1))] < 0:
        u1 = -u1
    _vals2, vecs2 = np.linalg.eigh((c22 + c22.T) / 2.0)
    u2 = vecs2[:, -1]
    c12 = c_op(unit(1, 2, 2, FIELD_R)).arr.real
    if float(np.sum(c12 * np.outer(u1, u2))) < 0:
        u2 = -u2
    u_mat = Mat(FIELD_R, np.column_stack([u1, u2]))
    ortho_dev = float(np.max(np.abs((u_mat.T @ u_mat).arr.real - np.eye(2))))
    checks.append(Check("orthogonal_factor", ortho_dev <= 1e-6, f"{ortho_dev:.3e}"))
    if ortho_dev > 1e-6:
        return _with_witness(
            _unclassified("conjugating factor is not orthogonal", checks),
            t, relation, tol, budget)

    phi = phi_c(c, tol)
    conj_u = op_from_action(FIELD_R, 2, lambda x: u_mat @ x @ u_mat.H)
    rec = MatLinOp(FIELD_R, 2, gamma * compose(conj_u, phi).mat)
    residual = rel_op_residual(t, rec)
    checks.append(Check("residual", residual <= tol.eq_rel, f"{residual:.3e}"))
    if residual > tol.eq_rel:
        return _with_witness(
            _unclassified(f"reconstruction residual {residual:.3e}", checks),
            t, relation, tol, budget)
    return CanonicalForm(TAG_PHI_C, residual=residual, gamma=complex(gamma),
                         c=c, U=u_mat, checks=tuple(checks))


def _classify_2x2_complex(t: MatLinOp, relation: str, tol: ToleranceProfile,
                          budget: int, checks: list) -> CanonicalForm:
    ti = t(eye(2, FIELD_C)).arr
    delta = complex(np.trace(ti) / 2.0)
    dev = float(np.linalg.norm(ti - delta * np.eye(2)))
    scalar_ok = dev <= tol.eq_abs * max(1.0, abs(delta)) and abs(delta) > tol.eq_abs
    checks.append(Check("t_identity_scalar", scalar_ok, f"deviation {dev:.3e}"))
    if not scalar_ok:
        return _with_witness(
            _unclassified("T(I) is not an invertible complex scalar matrix", checks),
            t, relation, tol, budget)
    l1 = compose(left_mult_op(Mat(FIELD_C, np.eye(2) / delta)), t)
    form2 = reduce_2x2_complex(l1, tol)
    checks.extend(form2.checks)
    if form2.tag != TAG_TWO_BY_TWO:
        return _with_witness(
            _unclassified(form2.diagnostic or "2x2 reduction failed", checks),
            t, relation, tol, budget)
    a_dev = max(abs(x - 1.0) for x in form2.a)
    b_dev = max(abs(x) for x in form2.b)
    core_ok = a_dev <= 1e-6 and b_dev <= 1e-6
    checks.append(Check("core_params", core_ok,
                        f"axis deviation {a_dev:.3e}, shift {b_dev:.3e}"))
    if not core_ok:
        return _with_witness(
            _unclassified(
                "unital normalization is not the pure twist action", checks),
            t, relation, tol, budget)
    gamma = 1.0 / delta
    rec = mu_twist(gamma, form2.mu, form2.U, form2.V, tol)
    residual = rel_op_residual(t, rec)
    checks.append(Check("residual", residual <= tol.eq_rel, f"{residual:.3e}"))
    if residual > tol.eq_rel:
        return _with_witness(
            _unclassified(f"reconstruction residual {residual:.3e}", checks),
            t, relation, tol, budget)
    return CanonicalForm(TAG_MU_TWIST, residual=residual, gamma=gamma,
                         mu=form2.mu, U=form2.U, V=form2.V, checks=tuple(checks))


def classify_norm_mult_preserver(t: MatLinOp, relation: str,
                                 tol: ToleranceProfile = DEFAULT_TOL,
                                 witness_budget: int = 200) -> CanonicalForm:
    """Identify the canonical family of a preserver of one of the relations
    ||AB|| = ||A|| ||B||, ||A* B|| = ..., ||A B*|| = ... .

    Any failing stage yields an unclassified form naming the failed check;
    when a witness search budget is given, a violating pair is attached if
    one can be found.
    """
    _check_relation(relation)
    checks: list = []
    bij = is_bijective(t, tol)
    checks.append(Check(
        "bijective", bool(bij),
        f"sigma_min {bij.sigma_min:.3e}, sigma_max {bij.sigma_max:.3e}"))
    if not bij:
        return _unclassified("operator is not bijective", checks)
    if t.n >= 3:
        return _classify_large(t, relation, tol, witness_budget, checks)
    if t.field == FIELD_R:
        return _classify_2x2_real(t, relation, tol, witness_budget, checks)
    return _classify_2x2_complex(t, relation, tol, witness_budget, checks)


# -- witness search ----------------------------------------------------------

_REL_STREAM = {RELATION_PRODUCT: 0, RELATION_STAR_LEFT: 1, RELATION_STAR_RIGHT: 2}


def _source_holds(a: Mat, b: Mat, relation: str, tol: ToleranceProfile) -> bool:
    if relation == RELATION_PRODUCT:
        return norm_mult_direct(a, b, tol).holds
    return sesqui_mult(a, b, relation, tol).holds


def _image_fails(t: MatLinOp, a: Mat, b: Mat, relation: str,
                 tol: ToleranceProfile) -> bool:
    ta, tb = t(a), t(b)
    if relation == RELATION_PRODUCT:
        return not norm_mult_direct(ta, tb, tol).holds
    return not sesqui_mult(ta, tb, relation, tol).holds


def _rank_one_projector(x: np.ndarray, field: str) -> Mat:
    outer = np.outer(x, x.conj())
    if field == FIELD_R:
        outer = outer.real
    return Mat(field, outer)


def _structured_candidates(t: MatLinOp, relation: str, tol: ToleranceProfile,
                           rng: np.random.Generator, samples: int):
    n, field = t.n, t.field
    if relation == RELATION_PRODUCT and n >= 3 and field == FIELD_C:
        # For conjugation-like sandwiches the violating projector comes from
        # mixing extreme eigenvectors of W = V U.
        try:
            form = decompose_sandwich(t, tol)
        except ValueError:
            form = None
        if form is not None and form.tag == TAG_SANDWICH and \
                form.variant in (VARIANT_ID, VARIANT_CONJ):
            vals, vecs = np.linalg.eig((form.V @ form.U).arr)
            i, j = 0, 1
            best = -1.0
            for p in range(len(vals)):
                for q in range(p + 1, len(vals)):
                    gap = abs(vals[p] - vals[q])
                    if gap > best:
                        best, i, j = gap, p, q
            x = vecs[:, i] + vecs[:, j]
            nrm = np.linalg.norm(x)
            if nrm > 1e-12:
                proj = _rank_one_projector(x / nrm, field)
                yield proj, proj
    if relation == RELATION_PRODUCT:
        yield unit(1, 1, n, field), unit(1, 2, n, field)
    elif relation == RELATION_STAR_RIGHT:
        yield unit(1, 1, n, field), unit(2, 1, n, field)
    else:
        yield unit(1, 1, n, field), unit(1, 2, n, field)
    for _ in range(samples):
        x = random_unit_vector(n, field, rng)
        proj = _rank_one_projector(x, field)
        yield proj, proj


def witness_nonpreservation(t: MatLinOp, relation: str,
                            tol: ToleranceProfile = DEFAULT_TOL,
                            budget: int = 1000):
    """Search for (A, B) satisfying the relation whose images do not.

    Structured candidates (rank-one projectors, matrix-unit pairs) come
    first, then random pairs from the harness generators.  Returns the first
    witness found or None once the budget is exhausted.  Deterministic for a
    fixed tolerance seed.
    """
    _check_relation(relation)
    from .harness import gen_norm_mult_pair, gen_sesqui_pair  # cycle-free at call time

    rng = np.random.default_rng([tol.seed, 101, _REL_STREAM[relation], t.n])
    tried = 0
    structured = _structured_candidates(
        t, relation, tol, rng, samples=min(32, budget))
    for a, b in structured:
        if tried >= budget:
            return None
        tried += 1
        if _source_holds(a, b, relation, tol) and _image_fails(t, a, b, relation, tol):
            return a, b
    while tried < budget:
        tried += 1
        if relation == RELATION_PRODUCT:
            a, b = gen_norm_mult_pair(t.n, t.field, rng)
        else:
            a, b = gen_sesqui_pair(t.n, t.field, relation, rng)
        if _source_holds(a, b, relation, tol) and _image_fails(t, a, b, relation, tol):
            return a, b
    return None


# -- report assembly ---------------------------------------------------------


def _complex_json(z: complex) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def form_to_json(form: CanonicalForm) -> dict:
    doc: dict = {"tag": form.tag}
    if form.tag == TAG_SANDWICH:
        doc["r"] = form.r
        doc["U"] = mat_to_json(form.U)
        doc["V"] = mat_to_json(form.V)
        doc["variant"] = form.variant
        if form.gamma is not None:
            doc["gamma"] = _complex_json(form.gamma)
    elif form.tag == TAG_PHI_C:
        doc["gamma"] = _complex_json(form.gamma)
        doc["c"] = form.c
        doc["U"] = mat_to_json(form.U)
    elif form.tag == TAG_MU_TWIST:
        doc["gamma"] = _complex_json(form.gamma)
        doc["mu"] = _complex_json(form.mu)
        doc["U"] = mat_to_json(form.U)
        doc["V"] = mat_to_json(form.V)
    elif form.tag == TAG_TWO_BY_TWO:
        doc["U"] = mat_to_json(form.U)
        doc["V"] = mat_to_json(form.V)
        doc["mu"] = _complex_json(form.mu)
        doc["a"] = list(form.a)
        doc["b"] = list(form.b)
    else:
        doc["diagnostic"] = form.diagnostic
    return doc


def _checks_json(checks) -> list:
    return [{"name": c.name, "pass": c.passed, "detail": c.detail} for c in checks]


def _report(verdict: str, form: CanonicalForm | None, residual, witness,
            counterexample, checks) -> dict:
    return {
        "verdict": verdict,
        "form": None if form is None else form_to_json(form),
        "residual": residual,
        "witness": None if witness is None else [mat_to_json(witness[0]),
                                                 mat_to_json(witness[1])],
        "counterexample": None if counterexample is None else mat_to_json(counterexample),
        "checks": _checks_json(checks),
    }


def analyze_operator(t: MatLinOp, relation: str,
                     tol: ToleranceProfile = DEFAULT_TOL,
                     trials: int = 200, witness_budget: int = 1000) -> dict:
    """Full analysis of one operator against one relation, as a JSON-ready
    report.  ``relation`` may also be "unitary" for the unitary-multiple
    preserver question."""
    if relation != RELATION_UNITARY:
        _check_relation(relation)
        form = classify_norm_mult_preserver(t, relation, tol, witness_budget)
        return _report(form.tag, form, form.residual, form.witness, None,
                       form.checks)

    checks: list = []
    bij = is_bijective(t, tol)
    d = field_dim(t.field)
    if not bij:
        s = np.linalg.svd(t.mat, compute_uv=False)
        rank = int(np.sum(s > tol.rank_gap * s[0])) if s[0] > 0 else 0
        detail = (f"sigma_min {bij.sigma_min:.3e}; realified rank {rank}"
                  + (", consistent with the rank-one image family A -> f(A) Z"
                     if rank == d else ""))
        checks.append(Check("bijective", False, detail))
        return _report(TAG_UNCLASSIFIED,
                       _unclassified("operator is not bijective", checks),
                       None, None, None, checks)
    checks.append(Check("bijective", True,
                        f"sigma_min {bij.sigma_min:.3e}, sigma_max {bij.sigma_max:.3e}"))
    mcheck = maps_unitaries_to_multiples(t, trials, tol)
    checks.append(Check(
        "unitaries_to_multiples", mcheck.passed,
        f"scale spread {mcheck.spread:.3e}" if mcheck.passed else "found offending unitary"))
    if not mcheck.passed:
        return _report(TAG_UNCLASSIFIED,
                       _unclassified("some unitary maps outside the multiples "
                                     "of unitaries", checks),
                       None, None, mcheck.counterexample, checks)
    if t.n >= 3:
        form = decompose_sandwich(t, tol)
        all_checks = checks + list(form.checks)
        return _report(form.tag, form, form.residual, form.witness, None, all_checks)
    if t.field == FIELD_C:
        form = reduce_2x2_complex(t, tol)
        all_checks = checks + list(form.checks)
        return _report(form.tag, form, form.residual, form.witness, None, all_checks)
    red = reduce_2x2_real(t, tol)
    checks.append(Check("v1v2_preserved", red.preserved, red.detail))
    verdict = "v1v2_preserved" if red.preserved else TAG_UNCLASSIFIED
    return _report(verdict, None, None, None, None, checks)
