"""Spectral-norm predicates and the structural criteria behind them.

The central fact used throughout: ||AB|| = ||A|| ||B|| holds exactly when B
has a top right-singular vector x such that A attains its norm at Bx; the
sesquilinear variants ||A B*|| resp. ||A* B|| factor exactly when A and B
share a top right- resp. left-singular direction.  Every equality predicate
here therefore exists in two independent flavours, a direct one comparing
norms and a structural one intersecting singular subspaces, and the package
never lets one stand in for the other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import (
    DEFAULT_TOL, FIELD_C, FIELD_R, Mat, ToleranceProfile, eye, mat, zeros,
)
from .families import QUATERNION_BASIS, mat_from_zeta, zeta_coords

STAR_LEFT = "star_left"
STAR_RIGHT = "star_right"

IN_V1 = "v1"
IN_V2 = "v2"
NEITHER = "neither"


class InconsistencyError(RuntimeError):
    """Direct and structural criteria decisively disagree.

    This signals a tolerance misconfiguration (or a bug), never a property
    of the input pair, and is surfaced as exit code 2 by the CLI.
    """


@dataclass(frozen=True)
class Svd:
    """Singular value decomposition a = U diag(s) V*, s descending."""

    U: Mat
    s: np.ndarray
    V: Mat


def svd(a: Mat) -> Svd:
    if a.field == FIELD_R:
        u, s, vh = np.linalg.svd(a.arr.real)
    else:
        u, s, vh = np.linalg.svd(a.arr)
    return Svd(Mat(a.field, u), s, Mat(a.field, vh.conj().T))


def spectral_norm(a: Mat) -> float:
    """Largest singular value."""
    work = a.arr.real if a.field == FIELD_R else a.arr
    return float(np.linalg.svd(work, compute_uv=False)[0])


def _top_count(s: np.ndarray, rank_gap: float) -> int:
    return int(np.sum(s >= s[0] * (1.0 - rank_gap)))


def top_right_singular_subspace(a: Mat, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the span of top right-singular vectors.

    A vector is included when its singular value is within rank_gap * s1 of
    the largest singular value s1.  The zero matrix has no top direction and
    raises ValueError.
    """
    dec = svd(a)
    if dec.s[0] == 0.0:
        raise ValueError("zero matrix has no top singular subspace")
    k = _top_count(dec.s, tol.rank_gap)
    return np.array(dec.V.arr[:, :k])


def top_left_singular_subspace(a: Mat, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Left-singular counterpart of :func:`top_right_singular_subspace`."""
    dec = svd(a)
    if dec.s[0] == 0.0:
        raise ValueError("zero matrix has no top singular subspace")
    k = _top_count(dec.s, tol.rank_gap)
    return np.array(dec.U.arr[:, :k])


def is_unitary_multiple(a: Mat, tol: ToleranceProfile = DEFAULT_TOL):
    """Return (c, U) with a = c U, c >= 0 and U unitary, or None.

    Succeeds exactly when all singular values agree within rank_gap * s1.
    The zero matrix is 0 * I by convention.
    """
    dec = svd(a)
    s1 = float(dec.s[0])
    if s1 == 0.0:
        return 0.0, eye(a.n, a.field)
    if s1 - float(dec.s[-1]) > tol.rank_gap * s1:
        return None
    c = float(np.mean(dec.s))
    return c, dec.U @ dec.V.H


@dataclass(frozen=True)
class PairVerdict:
    """Outcome of a norm-multiplicativity check.

    lhs and rhs are the two sides being compared, residual is |lhs - rhs| /
    rhs (0 when rhs = 0, which forces lhs = 0 too), and witness, when
    present, is a unit vector realizing the structural criterion.
    """

    holds: bool
    lhs: float
    rhs: float
    residual: float
    witness: np.ndarray | None = None


def _rel_residual(lhs: float, rhs: float) -> float:
    if rhs == 0.0:
        return 0.0 if lhs == 0.0 else float("inf")
    return abs(lhs - rhs) / rhs


def _check_pair(a: Mat, b: Mat) -> None:
    if a.field != b.field:
        raise ValueError(f"field mismatch: {a.field!r} vs {b.field!r}")
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")


def norm_mult_direct(a: Mat, b: Mat, tol: ToleranceProfile = DEFAULT_TOL) -> PairVerdict:
    """Compare ||AB|| against ||A|| ||B|| directly."""
    _check_pair(a, b)
    lhs = spectral_norm(a @ b)
    rhs = spectral_norm(a) * spectral_norm(b)
    residual = _rel_residual(lhs, rhs)
    return PairVerdict(residual <= tol.eq_rel, lhs, rhs, residual)


def _alignment(span_target: np.ndarray, probe: np.ndarray):
    """Smallest principal-angle sine between col spans, plus the best probe coeffs.

    Computed from sin rather than arccos(cos) so that angles near zero keep
    full double precision.
    """
    residual = probe - span_target @ (span_target.conj().T @ probe)
    _u, s, vh = np.linalg.svd(residual)
    sin_theta = float(s[-1])
    coeffs = vh.conj().T[:, -1]
    return sin_theta, coeffs


def norm_mult_structural(a: Mat, b: Mat, tol: ToleranceProfile = DEFAULT_TOL) -> PairVerdict:
    """Structural test for ||AB|| = ||A|| ||B||.

    Holds when B maps some top right-singular direction of B onto the top
    right-singular span of A; equivalently the top left span of B meets the
    top right span of A.  lhs/rhs/residual report the direct quantities for
    context, but ``holds`` is decided purely by subspace geometry.
    """
    _check_pair(a, b)
    dec_b = svd(b)
    if dec_b.s[0] == 0.0 or spectral_norm(a) == 0.0:
        raise ValueError("structural criterion needs nonzero matrices")
    k = _top_count(dec_b.s, tol.rank_gap)
    right_b = np.array(dec_b.V.arr[:, :k])
    left_b = np.array(dec_b.U.arr[:, :k])
    top_a = top_right_singular_subspace(a, tol)
    sin_theta, coeffs = _alignment(top_a, left_b)
    holds = sin_theta <= tol.rank_gap
    witness = None
    if holds:
        x = right_b @ coeffs
        witness = x / np.linalg.norm(x)
    lhs = spectral_norm(a @ b)
    rhs = spectral_norm(a) * spectral_norm(b)
    return PairVerdict(holds, lhs, rhs, _rel_residual(lhs, rhs), witness)


def sesqui_mult(a: Mat, b: Mat, side: str, tol: ToleranceProfile = DEFAULT_TOL) -> PairVerdict:
    """Test ||A B*|| = ||A|| ||B|| (star_right) or ||A* B|| = ... (star_left).

    Both the direct comparison and the structural one (top right- resp.
    left-singular spans of A and B intersect nontrivially) are computed;
    ``holds`` follows the direct verdict.  A decisive disagreement between
    the two raises InconsistencyError, since the criteria are equivalent and
    can only split when the tolerance profile is misconfigured.
    """
    _check_pair(a, b)
    if side not in (STAR_LEFT, STAR_RIGHT):
        raise ValueError(f"side must be {STAR_LEFT!r} or {STAR_RIGHT!r}")
    lhs = spectral_norm(a @ b.H) if side == STAR_RIGHT else spectral_norm(a.H @ b)
    na, nb = spectral_norm(a), spectral_norm(b)
    rhs = na * nb
    residual = _rel_residual(lhs, rhs)
    holds = residual <= tol.eq_rel
    if na == 0.0 or nb == 0.0:
        return PairVerdict(holds, lhs, rhs, residual)

    if side == STAR_RIGHT:
        span_a = top_right_singular_subspace(a, tol)
        span_b = top_right_singular_subspace(b, tol)
    else:
        span_a = top_left_singular_subspace(a, tol)
        span_b = top_left_singular_subspace(b, tol)
    sin_theta, coeffs = _alignment(span_a, span_b)
    structural = sin_theta <= tol.rank_gap

    if holds != structural:
        direct_clear = residual > 10.0 * tol.eq_rel
        structural_clear = sin_theta > 10.0 * tol.rank_gap
        if (holds and structural_clear) or (structural and direct_clear):
            raise InconsistencyError(
                f"direct ({residual:.3e} vs eq_rel {tol.eq_rel:.1e}) and "
                f"structural ({sin_theta:.3e} vs rank_gap {tol.rank_gap:.1e}) "
                f"verdicts disagree for side {side!r}")

    witness = None
    if structural:
        y = span_b @ coeffs
        witness = y / np.linalg.norm(y)
    return PairVerdict(holds, lhs, rhs, residual, witness)


def is_normal_by_norm(a: Mat, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    """2x2 normality via ||A^2|| = ||A||^2; other sizes raise ValueError.

    The equivalence is specific to 2x2 matrices, so larger inputs are
    refused rather than silently given a weaker test.
    """
    if a.n != 2:
        raise ValueError("the norm criterion for normality is 2x2 only")
    nrm = spectral_norm(a)
    if nrm == 0.0:
        return True
    return abs(spectral_norm(a @ a) - nrm * nrm) <= tol.eq_rel * nrm * nrm


# -- distinguished 2x2 subspaces --------------------------------------------


def v12_membership(x: Mat, tol: ToleranceProfile = DEFAULT_TOL) -> str:
    """Locate a real 2x2 matrix relative to the planes V1 and V2.

    V1 = span{I, E12 - E21} (rotation-like), V2 = span{E11 - E22, E12 + E21}
    (traceless symmetric); they are orthogonal complements in M_2(R).  The
    zero matrix reports IN_V1.
    """
    if x.field != FIELD_R or x.n != 2:
        raise ValueError("membership test expects a 2x2 real matrix")
    arr = x.arr.real
    p = (arr[0, 0] + arr[1, 1]) / 2.0
    q = (arr[0, 1] - arr[1, 0]) / 2.0
    v1 = np.array([[p, q], [-q, p]])
    v2 = arr - v1
    thr = tol.eq_abs * max(1.0, float(np.linalg.norm(arr)))
    if np.linalg.norm(v2) <= thr:
        return IN_V1
    if np.linalg.norm(v1) <= thr:
        return IN_V2
    return NEITHER


def v3_decompose(a: Mat, tol: ToleranceProfile = DEFAULT_TOL):
    """Write a 2x2 complex A as alpha W with W in the quaternion-like span.

    Returns (alpha, W) with |alpha| carrying the phase, ||W||_F = ||A||_F,
    and the first nonzero coefficient of W in (I, SIGMA1, SIGMA2, SIGMA3)
    positive; returns None when A is not a scalar multiple of a unitary.
    The membership test is cross-checked against is_unitary_multiple, to
    which it is mathematically equivalent.
    """
    if a.field != FIELD_C or a.n != 2:
        raise ValueError("decomposition expects a 2x2 complex matrix")
    if is_unitary_multiple(a, tol) is None:
        return None
    z = zeta_coords(a)
    scale = float(np.linalg.norm(z))
    if scale == 0.0:
        return 0.0 + 0.0j, zeros(2, FIELD_C)
    # All coordinates of a V3-multiple share one phase mod pi; align on it.
    phase2 = np.sum(z * z)
    phi = 0.5 * np.angle(phase2) if phase2 != 0 else 0.0
    aligned = z * np.exp(-1j * phi)
    if float(np.linalg.norm(aligned.imag)) > tol.eq_abs * max(1.0, scale):
        return None
    coeffs = aligned.real
    alpha = np.exp(1j * phi)
    for c in coeffs:
        if abs(c) > tol.eq_abs * scale:
            if c < 0:
                coeffs = -coeffs
                alpha = -alpha
            break
    return complex(alpha), mat_from_zeta(coeffs)


def rot_refl_decompose(b: Mat):
    """Split a real 2x2 B as alpha Q + beta U, Q a rotation, U a reflection.

    The two parts are the orthogonal projections of B onto V1 and V2.  When
    a projection vanishes its factor defaults to the identity rotation
    resp. the reflection diag(1, -1), with coefficient 0.
    """
    if b.field != FIELD_R or b.n != 2:
        raise ValueError("decomposition expects a 2x2 real matrix")
    arr = b.arr.real
    p = (arr[0, 0] + arr[1, 1]) / 2.0
    q = (arr[0, 1] - arr[1, 0]) / 2.0
    c = (arr[0, 0] - arr[1, 1]) / 2.0
    d = (arr[0, 1] + arr[1, 0]) / 2.0
    alpha = float(np.hypot(p, q))
    beta = float(np.hypot(c, d))
    if alpha > 0.0:
        rot = mat(FIELD_R, np.array([[p, q], [-q, p]]) / alpha)
    else:
        rot = eye(2, FIELD_R)
    if beta > 0.0:
        refl = mat(FIELD_R, np.array([[c, d], [d, -c]]) / beta)
    else:
        refl = mat(FIELD_R, [[1.0, 0.0], [0.0, -1.0]])
    return alpha, rot, beta, refl
