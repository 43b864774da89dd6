"""Square matrices over R or C, tolerance profiles, and random sources.

Everything downstream works in M_n(F) with F one of the two fields "R" and
"C".  A :class:`Mat` is a thin immutable wrapper around a complex ndarray
that remembers its field; matrices over "R" carry identically-zero imaginary
parts, enforced at construction, so real inputs can never silently pick up
imaginary dust from a numerical routine.

RNG state is always owned by the caller: functions that sample take an
explicit ``numpy.random.Generator``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FIELD_R = "R"
FIELD_C = "C"
FIELDS = (FIELD_R, FIELD_C)


class SchemaError(ValueError):
    """A JSON document does not match the expected schema."""


def _check_field(field: str) -> None:
    if field not in FIELDS:
        raise ValueError(f"field must be 'R' or 'C', got {field!r}")


@dataclass(frozen=True, eq=False)
class Mat:
    """An n-by-n matrix over the field "R" or "C".

    Entries are stored as complex128 regardless of field.  For field "R"
    every imaginary part is exactly zero; arithmetic between "R" matrices
    keeps it that way (products and sums of zero-imaginary complex numbers
    have exactly zero imaginary part).  The backing array is read-only.
    """

    field: str
    arr: np.ndarray

    def __post_init__(self):
        _check_field(self.field)
        a = np.array(self.arr, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if self.field == FIELD_R and np.any(a.imag != 0.0):
            raise ValueError("matrix over 'R' has nonzero imaginary entries")
        a.flags.writeable = False
        object.__setattr__(self, "arr", a)

    @property
    def n(self) -> int:
        return self.arr.shape[0]

    # -- structural views ---------------------------------------------------

    @property
    def T(self) -> "Mat":
        """Transpose."""
        return Mat(self.field, self.arr.T)

    @property
    def H(self) -> "Mat":
        """Conjugate transpose (plain transpose over "R")."""
        return Mat(self.field, self.arr.conj().T)

    def conj(self) -> "Mat":
        return Mat(self.field, self.arr.conj())

    def to_complex(self) -> "Mat":
        """The same matrix viewed over "C"."""
        return Mat(FIELD_C, self.arr)

    # -- arithmetic ---------------------------------------------------------

    def _require_compatible(self, other: "Mat") -> None:
        if not isinstance(other, Mat):
            raise TypeError(f"expected Mat, got {type(other).__name__}")
        if self.field != other.field:
            raise ValueError(
                f"field mismatch: {self.field!r} vs {other.field!r}")
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __matmul__(self, other: "Mat") -> "Mat":
        self._require_compatible(other)
        return Mat(self.field, self.arr @ other.arr)

    def __add__(self, other: "Mat") -> "Mat":
        self._require_compatible(other)
        return Mat(self.field, self.arr + other.arr)

    def __sub__(self, other: "Mat") -> "Mat":
        self._require_compatible(other)
        return Mat(self.field, self.arr - other.arr)

    def __neg__(self) -> "Mat":
        return Mat(self.field, -self.arr)

    def _scale(self, s) -> "Mat":
        s = complex(s)
        if self.field == FIELD_R and s.imag != 0.0:
            raise ValueError("cannot scale an 'R' matrix by a non-real scalar")
        if self.field == FIELD_R:
            return Mat(self.field, self.arr.real * s.real)
        return Mat(self.field, self.arr * s)

    def __mul__(self, s) -> "Mat":
        return self._scale(s)

    def __rmul__(self, s) -> "Mat":
        return self._scale(s)

    # -- comparison helpers -------------------------------------------------

    def allclose(self, other: "Mat", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        self._require_compatible(other)
        return bool(np.allclose(self.arr, other.arr, atol=atol, rtol=rtol))

    def norm_fro(self) -> float:
        return float(np.linalg.norm(self.arr))

    def __repr__(self) -> str:  # short, for test failure messages
        return f"Mat({self.field!r}, n={self.n})"


def mat(field: str, data) -> Mat:
    """Build a :class:`Mat` from any array-like."""
    return Mat(field, np.asarray(data, dtype=np.complex128))


def zeros(n: int, field: str = FIELD_C) -> Mat:
    return Mat(field, np.zeros((n, n), dtype=np.complex128))


def eye(n: int, field: str = FIELD_C) -> Mat:
    return Mat(field, np.eye(n, dtype=np.complex128))


def unit(i: int, j: int, n: int, field: str = FIELD_C) -> Mat:
    """The matrix unit E_ij (1-based indices) in M_n.

    Raises IndexError when an index falls outside 1..n.
    """
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"matrix unit index ({i},{j}) out of range for n={n}")
    a = np.zeros((n, n), dtype=np.complex128)
    a[i - 1, j - 1] = 1.0
    return Mat(field, a)


def frobenius_inner(a: Mat, b: Mat) -> complex:
    """Frobenius inner product trace(b* a), conjugate-linear in ``b``."""
    a._require_compatible(b)
    return complex(np.trace(b.arr.conj().T @ a.arr))


# -- tolerances --------------------------------------------------------------


@dataclass(frozen=True)
class ToleranceProfile:
    """Comparison thresholds shared by every predicate in the package.

    eq_abs    absolute tolerance for entrywise comparisons
    eq_rel    relative tolerance for norm comparisons
    rank_gap  relative spectral-gap threshold for subspace extraction
    seed      64-bit seed from which all deterministic sampling streams derive
    """

    eq_abs: float = 1e-9
    eq_rel: float = 1e-8
    rank_gap: float = 1e-7
    seed: int = 0

    def __post_init__(self):
        for name in ("eq_abs", "eq_rel", "rank_gap"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number")
        if self.rank_gap < self.eq_abs:
            raise ValueError("rank_gap must be at least eq_abs")
        if not isinstance(self.seed, int) or not (0 <= self.seed < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")


DEFAULT_TOL = ToleranceProfile()


# -- random sources ----------------------------------------------------------


def random_mat(n: int, field: str, rng: np.random.Generator) -> Mat:
    """Random Gaussian matrix (unit-variance entries; complex ones isotropic)."""
    _check_field(field)
    if field == FIELD_R:
        return Mat(field, rng.standard_normal((n, n)))
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return Mat(field, z / np.sqrt(2.0))


def random_unit_vector(n: int, field: str, rng: np.random.Generator) -> np.ndarray:
    """Uniform unit vector in F^n, returned as an ndarray (real dtype for "R")."""
    _check_field(field)
    if field == FIELD_R:
        v = rng.standard_normal(n)
    else:
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    nrm = np.linalg.norm(v)
    while nrm == 0.0:  # essentially impossible, but keep the contract total
        v = rng.standard_normal(n)
        nrm = np.linalg.norm(v)
    return v / nrm


def haar_unitary(n: int, field: str, rng: np.random.Generator) -> Mat:
    """Haar-distributed element of U_n (field "C") or O_n (field "R").

    QR of a Ginibre matrix with the R-factor's diagonal phases (signs for
    "R") divided out, which makes the distribution exactly Haar rather than
    merely orthogonal/unitary.
    """
    _check_field(field)
    if field == FIELD_R:
        g = rng.standard_normal((n, n))
        q, r = np.linalg.qr(g)
        d = np.diagonal(r).copy()
        d[d == 0] = 1.0
        q = q * np.sign(d)
        return Mat(field, q)
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r).copy()
    d[d == 0] = 1.0
    q = q * (d / np.abs(d)).conj()
    return Mat(field, q)


# -- JSON encoding -----------------------------------------------------------


def _as_float_grid(obj, key: str, n: int):
    if not isinstance(obj, list) or len(obj) != n:
        raise SchemaError(f"'{key}' must be a list of {n} rows")
    rows = []
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != n:
            raise SchemaError(f"'{key}' row {i} must be a list of {n} numbers")
        out = []
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise SchemaError(f"'{key}'[{i}][{j}] is not a number")
            x = float(x)
            if not np.isfinite(x):
                raise SchemaError(f"'{key}'[{i}][{j}] is not finite")
            out.append(x)
        rows.append(out)
    return np.array(rows, dtype=float)


def mat_to_json(a: Mat) -> dict:
    """Encode as {"field", "n", "re"[, "im"]}; "im" is omitted for field "R"."""
    doc = {"field": a.field, "n": a.n, "re": a.arr.real.tolist()}
    if a.field == FIELD_C:
        doc["im"] = a.arr.imag.tolist()
    return doc


def mat_from_json(doc) -> Mat:
    if not isinstance(doc, dict):
        raise SchemaError("matrix document must be an object")
    field = doc.get("field")
    if field not in FIELDS:
        raise SchemaError(f"'field' must be 'R' or 'C', got {field!r}")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError("'n' must be a positive integer")
    unknown = set(doc) - {"field", "n", "re", "im"}
    if unknown:
        raise SchemaError(f"unknown matrix keys: {sorted(unknown)}")
    if "re" not in doc:
        raise SchemaError("matrix document is missing 're'")
    re = _as_float_grid(doc["re"], "re", n)
    if field == FIELD_R:
        if "im" in doc:
            raise SchemaError("'im' is not allowed when field is 'R'")
        return Mat(field, re)
    if "im" not in doc:
        raise SchemaError("matrix document over 'C' is missing 'im'")
    im = _as_float_grid(doc["im"], "im", n)
    return Mat(field, re + 1j * im)


def tolerance_to_json(tol: ToleranceProfile) -> dict:
    return {"eq_abs": tol.eq_abs, "eq_rel": tol.eq_rel,
            "rank_gap": tol.rank_gap, "seed": tol.seed}


def tolerance_from_json(doc) -> ToleranceProfile:
    if not isinstance(doc, dict):
        raise SchemaError("tolerance profile must be an object")
    unknown = set(doc) - {"eq_abs", "eq_rel", "rank_gap", "seed"}
    if unknown:
        raise SchemaError(f"unknown tolerance keys: {sorted(unknown)}")
    kwargs = {}
    for key in ("eq_abs", "eq_rel", "rank_gap"):
        if key in doc:
            v = doc[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise SchemaError(f"'{key}' must be a number")
            kwargs[key] = float(v)
    if "seed" in doc:
        if isinstance(doc["seed"], bool) or not isinstance(doc["seed"], int):
            raise SchemaError("'seed' must be an integer")
        kwargs["seed"] = doc["seed"]
    try:
        return ToleranceProfile(**kwargs)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
