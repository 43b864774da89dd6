"""Real-linear operators on M_n(F) as realified matrices.

A real-linear map T on M_n(F) is stored as a real (d n^2)-by-(d n^2) matrix
acting on coordinate vectors, with d = 1 for F = R and d = 2 for F = C.  The
coordinate convention is frozen here and nowhere else:

* entries are enumerated (k, l) row-major, 1-based;
* over C the real part of entry (k, l) is immediately followed by its
  imaginary part, so entry (k, l) occupies slots 2p and 2p+1 with
  p = (k-1) n + (l-1).

Operators are compared, composed, and inverted through this representation,
which makes "is T bijective" an honest singular-value question instead of a
symbolic one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .matcore import (
    DEFAULT_TOL, FIELD_C, FIELD_R, FIELDS, Mat, SchemaError, ToleranceProfile,
    _check_field, mat_from_json, mat_to_json, unit,
)

COMPLEX_LINEAR = "complex_linear"
CONJUGATE_TWISTED = "conjugate_twisted"
GENERAL_REAL_LINEAR = "general_real_linear"


def field_dim(field: str) -> int:
    """Real dimension of the scalar field: 1 for "R", 2 for "C"."""
    _check_field(field)
    return 2 if field == FIELD_C else 1


def realify(a: Mat) -> np.ndarray:
    """Coordinates of ``a`` in the frozen realified convention."""
    if a.field == FIELD_C:
        v = np.empty(2 * a.n * a.n)
        v[0::2] = a.arr.real.ravel()
        v[1::2] = a.arr.imag.ravel()
        return v
    return np.array(a.arr.real.ravel())


def derealify(field: str, n: int, v: np.ndarray) -> Mat:
    """Inverse of :func:`realify`."""
    d = field_dim(field)
    v = np.asarray(v, dtype=float)
    if v.shape != (d * n * n,):
        raise ValueError(f"expected a vector of length {d * n * n}, got {v.shape}")
    if field == FIELD_C:
        return Mat(field, (v[0::2] + 1j * v[1::2]).reshape(n, n))
    return Mat(field, v.reshape(n, n))


@dataclass(frozen=True, eq=False)
class MatLinOp:
    """A real-linear operator on M_n(F), stored as its realified matrix."""

    field: str
    n: int
    mat: np.ndarray

    def __post_init__(self):
        _check_field(self.field)
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError("n must be a positive integer")
        m = field_dim(self.field) * self.n * self.n
        a = np.array(self.mat, dtype=float)
        if a.shape != (m, m):
            raise ValueError(f"expected a {m}x{m} real matrix, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("operator matrix has non-finite entries")
        a.flags.writeable = False
        object.__setattr__(self, "mat", a)

    def apply(self, a: Mat) -> Mat:
        if a.field != self.field or a.n != self.n:
            raise ValueError(
                f"operator on M_{self.n}({self.field}) applied to a "
                f"{a.n}x{a.n} matrix over {a.field!r}")
        return derealify(self.field, self.n, self.mat @ realify(a))

    __call__ = apply

    def __repr__(self) -> str:
        return f"MatLinOp({self.field!r}, n={self.n})"


def _basis_iter(field: str, n: int):
    """Yield (column_index, basis Mat) pairs in realified column order."""
    idx = 0
    for k in range(1, n + 1):
        for l in range(1, n + 1):
            e = unit(k, l, n, field)
            yield idx, ("re", k, l), e
            idx += 1
            if field == FIELD_C:
                yield idx, ("im", k, l), 1j * e
                idx += 1


def op_from_action(field: str, n: int, fn: Callable[[Mat], Mat]) -> MatLinOp:
    """Operator whose action on the standard basis is given by ``fn``.

    ``fn`` must be real-linear for the result to represent it faithfully; we
    only sample it on the basis matrices E_kl (and iE_kl over C).
    """
    m = field_dim(field) * n * n
    cols = np.empty((m, m))
    for idx, _key, e in _basis_iter(field, n):
        img = fn(e)
        if not isinstance(img, Mat) or img.field != field or img.n != n:
            raise ValueError("action returned a matrix of the wrong shape or field")
        cols[:, idx] = realify(img)
    return MatLinOp(field, n, cols)


def op_from_images(field: str, n: int,
                   images: Mapping[tuple, Mat]) -> MatLinOp:
    """Operator from a complete table of basis images.

    Keys are ("re", k, l) for the image of E_kl and, over C, ("im", k, l)
    for the image of iE_kl (1-based indices).  A missing or extra key is an
    error: the table must describe the action on the whole basis.
    """
    expected = set()
    for _idx, key, _e in _basis_iter(field, n):
        expected.add(key)
    given = set(images)
    missing = expected - given
    extra = given - expected
    if missing:
        raise ValueError(f"incomplete basis image table, missing {sorted(missing)[:4]}"
                         + ("..." if len(missing) > 4 else ""))
    if extra:
        raise ValueError(f"unexpected basis image keys {sorted(extra)[:4]}")
    m = field_dim(field) * n * n
    cols = np.empty((m, m))
    for idx, key, _e in _basis_iter(field, n):
        img = images[key]
        if not isinstance(img, Mat) or img.field != field or img.n != n:
            raise ValueError(f"image for {key} has the wrong shape or field")
        cols[:, idx] = realify(img)
    return MatLinOp(field, n, cols)


def images_of(t: MatLinOp) -> dict:
    """Basis image table of ``t`` (inverse of :func:`op_from_images`)."""
    out = {}
    for idx, key, _e in _basis_iter(t.field, t.n):
        out[key] = derealify(t.field, t.n, np.array(t.mat[:, idx]))
    return out


# -- stock operators ---------------------------------------------------------


def identity_op(field: str, n: int) -> MatLinOp:
    return MatLinOp(field, n, np.eye(field_dim(field) * n * n))


def transpose_op(field: str, n: int) -> MatLinOp:
    return op_from_action(field, n, lambda a: a.T)


def conj_op(n: int) -> MatLinOp:
    """Entrywise conjugation on M_n(C)."""
    return op_from_action(FIELD_C, n, lambda a: a.conj())


def conj_transpose_op(n: int) -> MatLinOp:
    return op_from_action(FIELD_C, n, lambda a: a.H)


def left_mult_op(m: Mat) -> MatLinOp:
    return op_from_action(m.field, m.n, lambda a: m @ a)


def right_mult_op(m: Mat) -> MatLinOp:
    return op_from_action(m.field, m.n, lambda a: a @ m)


# -- operator algebra --------------------------------------------------------


def compose(s: MatLinOp, t: MatLinOp) -> MatLinOp:
    """The composite "s after t", i.e. A |-> s(t(A))."""
    if s.field != t.field or s.n != t.n:
        raise ValueError("cannot compose operators on different spaces")
    return MatLinOp(s.field, s.n, s.mat @ t.mat)


@dataclass(frozen=True)
class BijectivityCheck:
    bijective: bool
    sigma_min: float
    sigma_max: float

    def __bool__(self) -> bool:
        return self.bijective


def is_bijective(t: MatLinOp, tol: ToleranceProfile = DEFAULT_TOL) -> BijectivityCheck:
    """Numerical bijectivity: smallest singular value clears rank_gap * largest."""
    s = np.linalg.svd(t.mat, compute_uv=False)
    smax = float(s[0])
    smin = float(s[-1])
    return BijectivityCheck(smin > tol.rank_gap * smax and smax > 0.0, smin, smax)


def inverse(t: MatLinOp, tol: ToleranceProfile = DEFAULT_TOL) -> MatLinOp:
    check = is_bijective(t, tol)
    if not check:
        raise ValueError(
            f"operator is numerically singular (sigma_min={check.sigma_min:.3e}, "
            f"sigma_max={check.sigma_max:.3e})")
    return MatLinOp(t.field, t.n, np.linalg.inv(t.mat))


@dataclass(frozen=True)
class LinearityClass:
    """How T interacts with multiplication by i.

    tag is one of COMPLEX_LINEAR (T(iX) = iT(X)), CONJUGATE_TWISTED
    (T(iX) = -iT(X)) or GENERAL_REAL_LINEAR.  ``mu`` is a slot for the
    twist scalar of unital 2x2 maps; it is filled by the canonization layer,
    not here.
    """

    tag: str
    mu: complex | None = None


def _mult_i_matrix(n: int) -> np.ndarray:
    """Realified matrix of X |-> iX on M_n(C)."""
    m = 2 * n * n
    j = np.zeros((m, m))
    for p in range(n * n):
        j[2 * p, 2 * p + 1] = -1.0
        j[2 * p + 1, 2 * p] = 1.0
    return j


def linearity_class(t: MatLinOp, tol: ToleranceProfile = DEFAULT_TOL) -> LinearityClass:
    """Classify T as complex-linear, conjugate-twisted, or neither.

    Over "R" the distinction is empty and the class is COMPLEX_LINEAR by
    convention.
    """
    if t.field == FIELD_R:
        return LinearityClass(COMPLEX_LINEAR)
    j = _mult_i_matrix(t.n)
    scale = max(1.0, float(np.linalg.norm(t.mat)))
    thr = tol.eq_abs * scale
    if np.linalg.norm(t.mat @ j - j @ t.mat) <= thr:
        return LinearityClass(COMPLEX_LINEAR)
    if np.linalg.norm(t.mat @ j + j @ t.mat) <= thr:
        return LinearityClass(CONJUGATE_TWISTED)
    return LinearityClass(GENERAL_REAL_LINEAR)


# -- JSON encoding -----------------------------------------------------------


def op_to_json(t: MatLinOp) -> dict:
    """Encode as a complete basis-image table.

    Entries appear in realified column order: row-major over (k, l) with the
    image of E_kl immediately followed (over C) by the image of iE_kl.
    """
    images = []
    for idx, key, _e in _basis_iter(t.field, t.n):
        kind, k, l = key
        images.append({
            f"{kind}_kl": [k, l],
            "image": mat_to_json(derealify(t.field, t.n, np.array(t.mat[:, idx]))),
        })
    return {"field": t.field, "n": t.n, "images": images}


def op_from_json(doc) -> MatLinOp:
    if not isinstance(doc, dict):
        raise SchemaError("operator document must be an object")
    field = doc.get("field")
    if field not in FIELDS:
        raise SchemaError(f"'field' must be 'R' or 'C', got {field!r}")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError("'n' must be a positive integer")
    entries = doc.get("images")
    if not isinstance(entries, list):
        raise SchemaError("'images' must be a list")
    table: dict[tuple, Mat] = {}
    for pos, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise SchemaError(f"images[{pos}] must be an object")
        kinds = [k for k in ("re_kl", "im_kl") if k in entry]
        if len(kinds) != 1 or set(entry) != {kinds[0], "image"}:
            raise SchemaError(
                f"images[{pos}] must have exactly 're_kl' or 'im_kl' plus 'image'")
        kind = kinds[0][:2]
        if kind == "im" and field == FIELD_R:
            raise SchemaError(f"images[{pos}]: 'im_kl' is not allowed over 'R'")
        kl = entry[kinds[0]]
        if (not isinstance(kl, list) or len(kl) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in kl)):
            raise SchemaError(f"images[{pos}]: index must be a pair of integers")
        k, l = kl
        if not (1 <= k <= n and 1 <= l <= n):
            raise SchemaError(f"images[{pos}]: index ({k},{l}) out of range")
        key = (kind, k, l)
        if key in table:
            raise SchemaError(f"images[{pos}]: duplicate entry for {key}")
        img = mat_from_json(entry["image"])
        if img.field != field or img.n != n:
            raise SchemaError(f"images[{pos}]: image has the wrong field or size")
        table[key] = img
    try:
        return op_from_images(field, n, table)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
