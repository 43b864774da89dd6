"""Seeded instance generators and the executable theorem suites.

The generators build matrix pairs that satisfy a norm-product relation by
construction; the suites exercise the families, decompositions and checkers
against each other, including negative controls that must be rejected.  Case
failures are data in the report, never exceptions, and every case draws its
randomness from a stream keyed by (seed, suite index, case index) so serial
and parallel runs agree byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .matcore import (
    DEFAULT_TOL, FIELD_C, FIELD_R, FIELDS, Mat, SchemaError, ToleranceProfile,
    eye, haar_unitary, mat, random_mat, random_unit_vector,
    tolerance_from_json, tolerance_to_json, unit,
)
from .linop import (
    MatLinOp, compose, conj_op, is_bijective, left_mult_op, op_from_action,
    transpose_op,
)
from .families import (
    VARIANT_CONJ, VARIANT_ID, apply_variant, mat_from_zeta, mu_twist, phi_c,
    sandwich_op, variants_for, zeta_coords,
)
from .specnorm import (
    IN_V1, IN_V2, STAR_LEFT, STAR_RIGHT, is_unitary_multiple,
    norm_mult_direct, norm_mult_structural, rot_refl_decompose, sesqui_mult,
    spectral_norm, svd, v12_membership,
)
from .canonize import (
    RELATION_PRODUCT, TAG_MU_TWIST, TAG_PHI_C, TAG_SANDWICH, TAG_TWO_BY_TWO,
    TAG_UNCLASSIFIED, classify_norm_mult_preserver, decompose_sandwich,
    maps_unitaries_to_multiples, reduce_2x2_complex, two_by_two_op,
)

SUITE_NAMES = ("thm_main1", "lam1", "main2", "generalization", "p_unitary",
               "n2_real", "n2_complex", "t_n2", "basic_lemma")


@dataclass(frozen=True)
class SuiteConfig:
    dims: tuple = (2, 3, 4, 5)
    fields: tuple = (FIELD_R, FIELD_C)
    trials_per_case: int = 200
    tol: ToleranceProfile = DEFAULT_TOL
    suites: tuple = SUITE_NAMES

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        object.__setattr__(self, "fields", tuple(self.fields))
        object.__setattr__(self, "suites", tuple(self.suites))
        if not self.dims:
            raise ValueError("dims must be nonempty")
        if any(n < 1 for n in self.dims):
            raise ValueError("dims must be positive")
        if self.trials_per_case < 1:
            raise ValueError("trials_per_case must be at least 1")
        bad = [f for f in self.fields if f not in FIELDS]
        if bad or not self.fields:
            raise ValueError(f"fields must be a nonempty subset of {FIELDS}")
        unknown = [s for s in self.suites if s not in SUITE_NAMES]
        if unknown or not self.suites:
            raise ValueError(
                f"suites must be a nonempty subset of {SUITE_NAMES}, "
                f"got unknown {unknown}")


def config_to_json(cfg: SuiteConfig) -> dict:
    return {
        "dims": list(cfg.dims),
        "fields": list(cfg.fields),
        "trials_per_case": cfg.trials_per_case,
        "tol": tolerance_to_json(cfg.tol),
        "suites": list(cfg.suites),
    }


def config_from_json(doc: dict) -> SuiteConfig:
    if not isinstance(doc, dict):
        raise SchemaError("suite config must be a JSON object")
    known = {"dims", "fields", "trials_per_case", "tol", "suites"}
    extra = set(doc) - known
    if extra:
        raise SchemaError(f"unknown suite config keys: {sorted(extra)}")
    kwargs = {}
    if "dims" in doc:
        kwargs["dims"] = doc["dims"]
    if "fields" in doc:
        kwargs["fields"] = doc["fields"]
    if "trials_per_case" in doc:
        count = doc["trials_per_case"]
        if not isinstance(count, int) or isinstance(count, bool):
            raise SchemaError("trials_per_case must be an integer")
        kwargs["trials_per_case"] = count
    if "tol" in doc:
        kwargs["tol"] = tolerance_from_json(doc["tol"])
    if "suites" in doc:
        kwargs["suites"] = doc["suites"]
    try:
        return SuiteConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"invalid suite config: {exc}") from exc


# -- pair generators ---------------------------------------------------------


def _unitary_with_first_column(n: int, field: str, rng: np.random.Generator,
                               x: np.ndarray) -> np.ndarray:
    cols = np.empty((n, n), dtype=np.complex128)
    cols[:, 0] = x
    if n > 1:
        cols[:, 1:] = random_mat(n, field, rng).arr[:, 1:]
    q, _ = np.linalg.qr(cols)
    q = q.copy()
    q[:, 0] = x  # qr reproduces x only up to phase; pin it exactly
    return q


def _gapped_spectrum(n: int, rng: np.random.Generator) -> np.ndarray:
    s = np.empty(n)
    s[0] = rng.uniform(0.5, 2.0)
    if n > 1:
        s[1:] = np.sort(rng.uniform(0.0, 0.9 * s[0], n - 1))[::-1]
    return s


def _matrix_with_top(n: int, field: str, rng: np.random.Generator,
                     x: np.ndarray, side: str) -> Mat:
    """Random matrix whose unique top singular vector on `side` is x."""
    s = _gapped_spectrum(n, rng)
    anchored = _unitary_with_first_column(n, field, rng, x)
    free = haar_unitary(n, field, rng).arr
    if side == "right":
        arr = (free * s[np.newaxis, :]) @ anchored.conj().T
    else:
        arr = (anchored * s[np.newaxis, :]) @ free.conj().T
    if field == FIELD_R:
        arr = arr.real
    return Mat(field, arr)


def gen_norm_mult_pair(n: int, field: str, rng: np.random.Generator):
    """Pair (A, B) with ||AB|| = ||A|| ||B|| by construction.

    B gets a random gapped spectrum with top right-singular vector x; A gets
    its top right-singular vector at the normalized image Bx, so A attains
    its norm exactly where B delivers its norm.
    """
    x = random_unit_vector(n, field, rng)
    b = _matrix_with_top(n, field, rng, x, "right")
    bx = b.arr @ x
    bx = bx / np.linalg.norm(bx)
    a = _matrix_with_top(n, field, rng, bx, "right")
    return a, b


def gen_sesqui_pair(n: int, field: str, side: str, rng: np.random.Generator):
    """Pair sharing a top singular vector: right vectors for star_right
    (||A B*|| = ||A|| ||B||), left vectors for star_left (||A* B|| = ...)."""
    if side not in (STAR_LEFT, STAR_RIGHT):
        raise ValueError(f"side must be {STAR_LEFT!r} or {STAR_RIGHT!r}")
    x = random_unit_vector(n, field, rng)
    which = "right" if side == STAR_RIGHT else "left"
    a = _matrix_with_top(n, field, rng, x, which)
    b = _matrix_with_top(n, field, rng, x, which)
    return a, b


@dataclass(frozen=True)
class PairPreservation:
    checked: int
    failures: int
    worst_residual: float
    first_failure: tuple | None

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def __bool__(self) -> bool:
        return self.ok


def check_pair_preservation(t: MatLinOp, relation: str, count: int,
                            rng: np.random.Generator,
                            tol: ToleranceProfile = DEFAULT_TOL,
                            pair_gen=None) -> PairPreservation:
    """Push `count` relation-satisfying pairs through t and verify the images
    still satisfy the relation.  `pair_gen(n, field, rng)` may be supplied to
    test with a different (for instance deliberately broken) generator."""
    if pair_gen is None:
        if relation == RELATION_PRODUCT:
            pair_gen = gen_norm_mult_pair
        else:
            pair_gen = lambda n, f, r: gen_sesqui_pair(n, f, relation, r)
    failures = 0
    worst = 0.0
    first = None
    for _ in range(count):
        a, b = pair_gen(t.n, t.field, rng)
        ta, tb = t(a), t(b)
        if relation == RELATION_PRODUCT:
            verdict = norm_mult_direct(ta, tb, tol)
        else:
            verdict = sesqui_mult(ta, tb, relation, tol)
        if np.isfinite(verdict.residual):
            worst = max(worst, verdict.residual)
        if not verdict.holds:
            failures += 1
            if first is None:
                first = (a, b)
    return PairPreservation(count, failures, worst, first)


# -- suite machinery ---------------------------------------------------------


@dataclass(frozen=True)
class CaseOutcome:
    suite: str
    case: str
    passed: bool
    negative: bool
    detail: str = ""
    inputs: dict | None = None


@dataclass(frozen=True)
class SuiteReport:
    config: SuiteConfig
    outcomes: tuple

    @property
    def passed_count(self) -> int:
        return sum(1 for o in self.outcomes if o.passed)

    @property
    def failed(self) -> tuple:
        return tuple(o for o in self.outcomes if not o.passed)

    @property
    def all_passed(self) -> bool:
        return not self.failed


def report_to_json(report: SuiteReport) -> dict:
    suites = []
    for name in report.config.suites:
        cases = [o for o in report.outcomes if o.suite == name]
        suites.append({
            "name": name,
            "cases": len(cases),
            "passed": sum(1 for o in cases if o.passed),
            "failures": [
                {"case": o.case, "inputs": o.inputs, "detail": o.detail}
                for o in cases if not o.passed
            ],
        })
    return {"config": config_to_json(report.config), "suites": suites}


class _CaseStream:
    """Hands out one deterministic RNG per case, keyed by suite and index."""

    def __init__(self, seed: int, suite_idx: int):
        self._seed = seed
        self._suite_idx = suite_idx
        self._k = 0

    def next(self) -> np.random.Generator:
        rng = np.random.default_rng([self._seed, self._suite_idx, self._k])
        self._k += 1
        return rng


def _run(out: list, suite: str, case: str, negative: bool, fn) -> None:
    try:
        passed, detail, inputs = fn()
    except Exception as exc:  # suites report failures, they do not raise
        passed, detail, inputs = False, f"unexpected exception: {exc!r}", None
    out.append(CaseOutcome(suite, case, passed, bool(negative), detail, inputs))


def _gamma_conj_op(gamma, u: Mat, variant: str,
                   tol: ToleranceProfile) -> MatLinOp:
    g = float(np.real(gamma)) if u.field == FIELD_R else complex(gamma)
    return op_from_action(
        u.field, u.n, lambda x: g * (u @ apply_variant(x, variant) @ u.H))


def _rotation2(theta: float) -> Mat:
    c, s = np.cos(theta), np.sin(theta)
    return mat(FIELD_R, [[c, -s], [s, c]])


def _perturbed(t: MatLinOp, rng: np.random.Generator, eps: float) -> MatLinOp:
    noise = rng.standard_normal(t.mat.shape)
    scale = eps * float(np.linalg.norm(t.mat, 2)) / float(np.linalg.norm(noise, 2))
    return MatLinOp(t.field, t.n, t.mat + scale * noise)


def _phi_c_preserver(gamma: float, c: float, u: Mat,
                     tol: ToleranceProfile) -> MatLinOp:
    base = phi_c(c, tol)
    conj_u = op_from_action(FIELD_R, 2, lambda x: u @ x @ u.H)
    return MatLinOp(FIELD_R, 2, gamma * compose(conj_u, base).mat)


def _non_multiple(n: int, field: str, rng: np.random.Generator) -> Mat:
    """Matrix whose singular values are split well beyond rank_gap."""
    s = np.linspace(1.0, 0.4, n)
    u = haar_unitary(n, field, rng).arr
    v = haar_unitary(n, field, rng).arr
    arr = (u * s[np.newaxis, :]) @ v.conj().T
    return Mat(field, arr.real if field == FIELD_R else arr)


# -- individual suites -------------------------------------------------------


def _suite_thm_main1(cfg: SuiteConfig, stream: _CaseStream) -> list:
    out: list = []
    tol = cfg.tol
    dims = [n for n in cfg.dims if n >= 3]
    for field in cfg.fields:
        for n in dims:
            for variant in variants_for(field):
                def body(field=field, n=n, variant=variant):
                    rng = stream.next()
                    r = float(rng.uniform(0.5, 2.0))
                    u = haar_unitary(n, field, rng)
                    v = haar_unitary(n, field, rng)
                    t = sandwich_op(r, u, v, variant, tol)
                    form = decompose_sandwich(t, tol)
                    probe = maps_unitaries_to_multiples(
                        t, min(cfg.trials_per_case, 60), tol, rng)
                    ok = (form.tag == TAG_SANDWICH
                          and form.variant == variant
                          and abs(form.r - r) <= 1e-9 * r
                          and form.residual <= 1e-8
                          and probe.passed and probe.spread <= 1e-8)
                    detail = (f"residual {form.residual}, spread {probe.spread:.3e}"
                              if form.tag == TAG_SANDWICH else
                              f"decomposition failed: {form.diagnostic}")
                    return ok, detail, {"r": r, "variant": variant, "n": n,
                                        "field": field}
                _run(out, "thm_main1", f"roundtrip:{field}{n}:{variant}",
                     False, body)
    if dims:
        for field in cfg.fields:
            n = dims[0]

            def perturbed_body(field=field, n=n):
                rng = stream.next()
                t = sandwich_op(1.0, haar_unitary(n, field, rng),
                                haar_unitary(n, field, rng), VARIANT_ID, tol)
                broken = _perturbed(t, rng, 1e-3)
                form = decompose_sandwich(broken, tol)
                probe = maps_unitaries_to_multiples(broken, 40, tol, rng)
                detected = form.tag == TAG_UNCLASSIFIED or not probe.passed
                return detected, (
                    "perturbation rejected" if detected else
                    "perturbed operator slipped through"), {"n": n, "field": field}
            _run(out, "thm_main1", f"negative:perturbed:{field}{n}", True,
                 perturbed_body)

            def scaling_body(field=field, n=n):
                rng = stream.next()
                d = np.eye(n)
                d[0, 0] = 2.0
                t = left_mult_op(Mat(field, d))
                probe = maps_unitaries_to_multiples(t, 40, tol, rng)
                detected = (not probe.passed
                            and probe.counterexample is not None
                            and is_unitary_multiple(
                                t(probe.counterexample), tol) is None)
                return detected, (
                    "diagonal scaling rejected with counterexample" if detected
                    else "scaling operator not caught"), {"n": n, "field": field}
            _run(out, "thm_main1", f"negative:diag_scaling:{field}{n}", True,
                 scaling_body)
    return out


def _suite_lam1(cfg: SuiteConfig, stream: _CaseStream) -> list:
    out: list = []
    tol = cfg.tol
    ns = [n for n in cfg.dims if n >= 2]
    if not ns:
        return out
    for field in cfg.fields:
        for n in ns:
            def multiple_body(field=field, n=n):
                rng = stream.next()
                c = float(rng.uniform(0.3, 3.0))
                a = c * haar_unitary(n, field, rng)
                worst = 0.0
                for _ in range(min(cfg.trials_per_case, 60)):
                    b = random_mat(n, field, rng)
                    left = norm_mult_direct(a, b, tol)
                    right = norm_mult_direct(b, a, tol)
                    if not (left.holds and right.holds):
                        return False, "a unitary multiple failed the pair test", {
                            "c": c, "n": n, "field": field}
                    worst = max(worst, left.residual, right.residual)
                return True, f"both orders hold, worst residual {worst:.3e}", None
            _run(out, "lam1", f"multiple:{field}{n}", False, multiple_body)

            def witness_body(field=field, n=n):
                rng = stream.next()
                a = _non_multiple(n, field, rng)
                dec = svd(a)
                b_right = Mat(field, np.outer(dec.V.arr[:, -1],
                                              np.eye(n)[-1]))
                b_left = Mat(field, np.outer(np.eye(n)[-1],
                                             dec.U.arr[:, -1].conj()))
                fail_right = not norm_mult_direct(a, b_right, tol).holds
                fail_left = not norm_mult_direct(b_left, a, tol).holds
                agree = (not norm_mult_structural(a, b_right, tol).holds
                         and fail_right and fail_left)
                return agree, (
                    "spectral-gap witnesses reject the non-multiple" if agree
                    else "witness construction did not fail"), {
                    "n": n, "field": field}
            _run(out, "lam1", f"negative:witness:{field}{n}", True, witness_body)

    n = ns[0]
    field = cfg.fields[0]

    def boundary_body(field=field, n=n):
        inside = np.ones(n)
        inside[-1] = 1.0 - 0.5 * tol.rank_gap
        outside = np.ones(n)
        outside[-1] = 1.0 - 10.0 * tol.rank_gap
        ok_in = is_unitary_multiple(Mat(field, np.diag(inside)), tol) is not None
        ok_out = is_unitary_multiple(Mat(field, np.diag(outside)), tol) is None
        return ok_in and ok_out, (
            f"rank_gap boundary respected (within={ok_in}, beyond={ok_out})"), None
    _run(out, "lam1", f"boundary:rank_gap:{field}{n}", False, boundary_body)
    return out


def _suite_main2(cfg: SuiteConfig, stream: _CaseStream) -> list:
    out: list = []
    tol = cfg.tol
    dims = [n for n in cfg.dims if n >= 3]
    for field in cfg.fields:
        allowed = (VARIANT_ID,) if field == FIELD_R else (VARIANT_ID, VARIANT_CONJ)
        for n in dims:
            for variant in allowed:
                def body(field=field, n=n, variant=variant):
                    rng = stream.next()
                    if field == FIELD_R:
                        gamma = complex(rng.uniform(0.5, 2.0)
                                        * rng.choice([1.0, -1.0]))
                    else:
                        gamma = complex(rng.uniform(0.5, 2.0)
                                        * np.exp(2j * np.pi * rng.uniform()))
                    u = haar_unitary(n, field, rng)
                    t = _gamma_conj_op(gamma, u, variant, tol)
                    form = classify_norm_mult_preserver(
                        t, RELATION_PRODUCT, tol, witness_budget=0)
                    pres = check_pair_preservation(
                        t, RELATION_PRODUCT, cfg.trials_per_case, rng, tol)
                    ok = (form.tag == TAG_SANDWICH
                          and form.variant == variant
                          and form.gamma is not None
                          and abs(form.gamma - gamma) <= 1e-8 * abs(gamma)
                          and form.residual <= 1e-8
                          and pres.ok and pres.worst_residual <= 1e-8)
                    detail = (f"gamma recovered, {pres.checked} pairs hold, "
                              f"worst residual {pres.worst_residual:.3e}"
                              if ok else
                              f"tag {form.tag}, diagnostic {form.diagnostic}, "
                              f"pair failures {pres.failures}")
                    return ok, detail, {
                        "gamma": [gamma.real, gamma.imag], "variant": variant,
                        "n": n, "field": field}
                _run(out, "main2", f"conjugation:{field}{n}:{variant}", False, body)
    if dims:
        for field in cfg.fields:
            n = dims[0]

            def transpose_body(field=field, n=n):
                t = transpose_op(field, n)
                form = classify_norm_mult_preserver(
                    t, RELATION_PRODUCT, tol, witness_budget=50)
                if form.tag != TAG_UNCLASSIFIED or form.witness is None:
                    return False, "transposition escaped the classifier", None
                a, b = form.witness
                exact = (np.array_equal(a.arr, unit(1, 1, n, field).arr)
                         and np.array_equal(b.arr, unit(1, 2, n, field).arr))
                prod = spectral_norm(t(a) @ t(b))
                return exact and prod == 0.0, (
                    f"witness is the matrix-unit pair, image product norm {prod}"
                ), {"n": n, "field": field}
            _run(out, "main2", f"negative:transpose:{field}{n}", True,
                 transpose_body)

            def nonscalar_body(field=field, n=n):
                rng = stream.next()
                while True:
                    u = haar_unitary(n, field, rng)
                    v = haar_unitary(n, field, rng)
                    w = (v @ u).arr
                    omega = np.trace(w) / n
                    if np.linalg.norm(w - omega * np.eye(n)) > 0.3:
                        break
                t = sandwich_op(1.3, u, v, VARIANT_ID, tol)
                form = classify_norm_mult_preserver(
                    t, RELATION_PRODUCT, tol, witness_budget=200)
                if form.tag != TAG_UNCLASSIFIED:
                    return False, f"non-scalar VU classified as {form.tag}", None
                if form.witness is None:
                    return False, "no witness found within budget", None
                a, b = form.witness
                return True, "witness found for non-scalar VU sandwich", {
                    "witness_rank_one": bool(
                        np.linalg.matrix_rank(a.arr, tol=1e-8) == 1),
                    "n": n, "field": field}
            _run(out, "main2", f"negative:nonscalar_vu:{field}{n}", True,
                 nonscalar_body)
    if 2 in cfg.dims and FIELD_R in cfg.fields:
        def phi_c_guard(_=None):
            rng = stream.next()
            c = float(np.exp(rng.uniform(np.log(0.2), np.log(5.0))))
            gamma = float(rng.uniform(0.5, 2.0) * rng.choice([1.0, -1.0]))
            u = _rotation2(float(rng.uniform(0.0, 2.0 * np.pi)))
            t = _phi_c_preserver(gamma, c, u, tol)
            form = classify_norm_mult_preserver(
                t, RELATION_PRODUCT, tol, witness_budget=50)
            ok = (form.tag == TAG_PHI_C
                  and abs(form.c - c) <= 1e-8 * c
                  and abs(form.gamma - gamma) <= 1e-8 * abs(gamma))
            detail = (f"recovered c={form.c}, gamma={form.gamma}"
                      if form.tag == TAG_PHI_C else
                      f"tag {form.tag}: {form.diagnostic}")
            return ok, detail, {"c": c, "gamma": gamma}
        # Guards the family synthesis itself: a mutated phi_c shows up here
        # as a parameter mismatch even though the mutant still preserves.
        _run(out, "main2", "phi_c_parameter_guard:R2", False, phi_c_guard)
    return out


def _suite_generalization(cfg: SuiteConfig, stream: _CaseStream) -> list:
    out: list = []
    tol = cfg.tol
    dims = [n for n in cfg.dims if n >= 3]
    for relation in (STAR_LEFT, STAR_RIGHT):
        for field in cfg.fields:
            allowed = ((VARIANT_ID,) if field == FIELD_R
                       else (VARIANT_ID, VARIANT_CONJ))
            for n in dims:
                for variant in allowed:
                    def body(relation=relation, field=field, n=n, variant=variant):
                        rng = stream.next()
                        r = float(rng.uniform(0.5, 2.0))
                        t = sandwich_op(r, haar_unitary(n, field, rng),
                                        haar_unitary(n, field, rng), variant, tol)
                        form = classify_norm_mult_preserver(
                            t, relation, tol, witness_budget=0)
                        pres = check_pair_preservation(
                            t, relation, cfg.trials_per_case, rng, tol)
                        ok = (form.tag == TAG_SANDWICH
                              and form.variant == variant
                              and abs(form.r - r) <= 1e-9 * r
                              and pres.ok and pres.worst_residual <= 1e-8)
                        return ok, (
                            f"{pres.checked} pairs hold, worst residual "
                            f"{pres.worst_residual:.3e}" if ok else
                            f"tag {form.tag}, pair failures {pres.failures}"), {
                            "r": r, "variant": variant, "relation": relation,
                            "n": n, "field": field}
                    _run(out, "generalization",
                         f"sandwich:{relation}:{field}{n}:{variant}", False, body)
    if dims:
        n = dims[0]
        for relation, j_col in ((STAR_RIGHT, (2, 1)), (STAR_LEFT, (1, 2))):
            for field in cfg.fields:
                def transpose_body(relation=relation, j_col=j_col, field=field):
                    t = transpose_op(field, n)
                    form = classify_norm_mult_preserver(
                        t, relation, tol, witness_budget=50)
                    if form.tag != TAG_UNCLASSIFIED or form.witness is None:
                        return False, "transposition escaped the classifier", None
                    a, b = form.witness
                    expect_b = unit(j_col[0], j_col[1], n, field)
                    exact = (np.array_equal(a.arr, unit(1, 1, n, field).arr)
                             and np.array_equal(b.arr, expect_b.arr))
                    return exact, (
                        "matrix-unit witness as expected" if exact else
                        "witness differs from the matrix-unit pair"), {
                        "relation": relation, "n": n, "field": field}
                _run(out, "generalization",
                     f"negative:transpose:{relation}:{field}{n}", True,
                     transpose_body)
    return out


def _suite_p_unitary(cfg: SuiteConfig, stream: _CaseStream) -> list:
    out: list = []
    tol = cfg.tol
    for field in cfg.fields:
        for n in [n for n in cfg.dims if n >= 2]:
            def body(field=field, n=n):
                rng = stream.next()
                variant = variants_for(field)[int(rng.integers(
                    len(variants_for(field))))]
                t = sandwich_op(float(rng.uniform(0.5, 2.0)),
                                haar_unitary(n, field, rng),
                                haar_unitary(n, field, rng), variant, tol)
                probe = maps_unitaries_to_multiples(
                    t, min(cfg.trials_per_case, 80), tol, rng)
                ok = probe.passed and probe.spread <= 1e-8
                return ok, f"spread {probe.spread:.3e}", {
                    "variant": variant, "n": n, "field": field}
            _run(out, "p_unitary", f"sandwich:{field}{n}", False, body)

            def negative_body(field=field, n=n):
                rng = stream.next()
                d = np.eye(n)
                d[0, 0] = 1.7
                t = left_mult_op(Mat(field, d))
                probe = maps_unitaries_to_multiples(t, 40, tol, rng)
                detected = not probe.passed and probe.counterexample is not None
                return detected, (
                    "non-preserver rejected with explicit unitary" if detected
                    else "non-preserver slipped through"), {"n": n, "field": field}
            _run(out, "p_unitary", f"negative:scaling:{field}{n}", True,
                 negative_body)
    if 2 in cfg.dims:
        if FIELD_C in cfg.fields:
            def twist_body(_=None):
                rng = stream.next()
                mu = complex(rng.uniform(-1, 1),
                             rng.choice([1.0, -1.0]) * rng.uniform(0.2, 1.5))
                t = mu_twist(complex(rng.uniform(0.5, 2.0)), mu,
                             haar_unitary(2, FIELD_C, rng),
                             haar_unitary(2, FIELD_C, rng), tol)
                probe = maps_unitaries_to_multiples(
                    t, min(cfg.trials_per_case, 80), tol, rng)
                return probe.passed, (
                    f"twist map keeps unitary multiples (mu={mu:.3g})"
                    if probe.passed else "twist map failed the probe"), None
            _run(out, "p_unitary", "twist:C2", False, twist_body)
        if FIELD_R in cfg.fields:
            def phi_body(_=None):
                rng = stream.next()
                c = float(np.exp(rng.uniform(np.log(0.2), np.log(5.0))))
                u = _rotation2(float(rng.uniform(0.0, 2.0 * np.pi)))
                t = _phi_c_preserver(1.0, c, u, tol)
                probe = maps_unitaries_to_multiples(
                    t, min(cfg.trials_per_case, 80), tol, rng)
                return probe.passed, (
                    f"phi_c keeps orthogonal multiples (c={c:.3g})"
                    if probe.passed else "phi_c failed the probe"), None
            _run(out, "p_unitary", "phi_c:R2", False, phi_body)

    field = cfg.fields[-1]
    n = max(cfg.dims)

    def rank_one_family_body(field=field, n=n):
        rng = stream.next()
        z = haar_unitary(n, field, rng)

        def action(x: Mat) -> Mat:
            tr = np.trace(x.arr)
            scal = tr.real if field == FIELD_R else tr
            return scal * z
        t = op_from_action(field, n, action)
        probe = maps_unitaries_to_multiples(t, 40, tol, rng)
        bij = is_bijective(t, tol)
        ok = probe.passed and not bij
        return ok, (
            "trace-times-unitary family passes the probe but is singular, "
            "as the non-bijective classification gap predicts" if ok else
            "unexpected behavior of the singular family"), {"n": n, "field": field}
    _run(out, "p_unitary", f"rank_one_family:{field}{n}", False,
         rank_one_family_body)
    return out


def _suite_n2_real(cfg: SuiteConfig, stream: _CaseStream) -> list:
    out: list = []
    tol = cfg.tol
    if 2 not in cfg.dims or FIELD_R not in cfg.fields:
        return out
    for k in range(3):
        def body(k=k):
            rng = stream.next()
            c = float(np.exp(rng.uniform(np.log(0.1), np.log(10.0))))
            gamma = float(rng.uniform(0.5, 2.0) * rng.choice([1.0, -1.0]))
            u = _rotation2(float(rng.uniform(0.0, 2.0 * np.pi)))
            if rng.uniform() < 0.5:
                u = u @ mat(FIELD_R, [[1.0, 0.0], [0.0, -1.0]])
            t = _phi_c_preserver(gamma, c, u, tol)
            form = classify_norm_mult_preserver(
                t, RELATION_PRODUCT, tol, witness_budget=0)
            pres = check_pair_preservation(
                t, RELATION_PRODUCT, cfg.trials_per_case, rng, tol)
            ok = (form.tag == TAG_PHI_C
                  and abs(form.c - c) <= 1e-8 * c
                  and abs(form.gamma - gamma) <= 1e-8 * abs(gamma)
                  and form.residual <= 1e-8
                  and pres.ok and pres.worst_residual <= 1e-8)
            return ok, (
                f"c and gamma recovered, {pres.checked} pairs hold" if ok else
                f"tag {form.tag}, diagnostic {form.diagnostic}"), {
                "c": c, "gamma": gamma}
        _run(out, "n2_real", f"phi_c_roundtrip:{k}", False, body)

    def split_body(_=None):
        rng = stream.next()
        b = random_mat(2, FIELD_R, rng)
        alpha, rot, beta, refl = rot_refl_decompose(b)
        recon = alpha * rot + beta * refl
        ok = (np.linalg.norm(recon.arr - b.arr) <= 1e-12
              and alpha >= 0.0 and beta >= 0.0
              and v12_membership(rot, tol) == IN_V1
              and v12_membership(refl, tol) == IN_V2)
        return ok, "rotation/reflection split reconstructs", None
    _run(out, "n2_real", "rot_refl_split", False, split_body)

    def nonconformal_body(_=None):
        def action(x: Mat) -> Mat:
            arr = x.arr.real
            k_part = (arr[0, 0] - arr[1, 1]) / 2.0
            bump = 0.7 * k_part * np.array([[1.0, 0.0], [0.0, -1.0]])
            return Mat(FIELD_R, arr + bump)
        t = op_from_action(FIELD_R, 2, action)
        form = classify_norm_mult_preserver(
            t, RELATION_PRODUCT, tol, witness_budget=200)
        detected = form.tag == TAG_UNCLASSIFIED and form.witness is not None
        return detected, (
            "non-conformal stretch rejected with witness" if detected else
            f"tag {form.tag}, witness {form.witness is not None}"), None
    _run(out, "n2_real", "negative:nonconformal", True, nonconformal_body)

    def skew_conj_body(_=None):
        m = mat(FIELD_R, [[1.0, 0.6], [0.0, 0.8]])
        t = op_from_action(FIELD_R, 2, lambda x: m @ x @ m.T)
        form = classify_norm_mult_preserver(
            t, RELATION_PRODUCT, tol, witness_budget=200)
        detected = form.tag == TAG_UNCLASSIFIED and form.witness is not None
        return detected, (
            "non-orthogonal congruence rejected with witness" if detected else
            f"tag {form.tag}, witness {form.witness is not None}"), None
    _run(out, "n2_real", "negative:skew_congruence", True, skew_conj_body)
    return out


def _twist_identity_residual(mu: complex, t_val: float,
                             rng: np.random.Generator,
                             tol: ToleranceProfile) -> tuple:
    """Check the diagonal identity for the pure twist on A = U diag(1,t) V*.

    Returns (max off-diagonal magnitude, identity defect)."""
    u = haar_unitary(2, FIELD_C, rng)
    v = haar_unitary(2, FIELD_C, rng)
    a = Mat(FIELD_C, (u.arr * np.array([1.0, t_val])[np.newaxis, :])
            @ v.arr.conj().T)
    twist = mu_twist(1.0 + 0.0j, mu, eye(2, FIELD_C), eye(2, FIELD_C), tol)
    m = u.H @ twist(a) @ v
    off = max(abs(m.arr[0, 1]), abs(m.arr[1, 0]))
    lhs = abs(m.arr[0, 0]) ** 2 - abs(m.arr[1, 1]) ** 2
    defect = abs(lhs - (1.0 - t_val ** 2) * mu.imag)
    return off, defect


def _suite_n2_complex(cfg: SuiteConfig, stream: _CaseStream) -> list:
    out: list = []
    tol = cfg.tol
    if 2 not in cfg.dims or FIELD_C not in cfg.fields:
        return out
    for k in range(3):
        def body(k=k):
            rng = stream.next()
            mu = complex(rng.uniform(-1.0, 1.0),
                         rng.choice([1.0, -1.0]) * rng.uniform(0.15, 1.5))
            gamma = complex(rng.uniform(0.5, 2.0)
                            * np.exp(2j * np.pi * rng.uniform()))
            u = haar_unitary(2, FIELD_C, rng)
            v = haar_unitary(2, FIELD_C, rng)
            t = mu_twist(gamma, mu, u, v, tol)
            form = classify_norm_mult_preserver(
                t, RELATION_PRODUCT, tol, witness_budget=0)
            pres = check_pair_preservation(
                t, RELATION_PRODUCT, cfg.trials_per_case, rng, tol)
            ok = (form.tag == TAG_MU_TWIST
                  and abs(form.mu - mu) <= 1e-8 * (1.0 + abs(mu))
                  and abs(form.gamma - gamma) <= 1e-8 * abs(gamma)
                  and form.residual <= 1e-8
                  and pres.ok and pres.worst_residual <= 1e-8)
            return ok, (
                f"mu and gamma recovered, {pres.checked} pairs hold" if ok else
                f"tag {form.tag}, diagnostic {form.diagnostic}"), {
                "mu": [mu.real, mu.imag], "gamma": [gamma.real, gamma.imag]}
        _run(out, "n2_complex", f"twist_roundtrip:{k}", False, body)

    def identity_body(_=None):
        rng = stream.next()
        worst_off, worst_defect = 0.0, 0.0
        for t_val in np.linspace(0.0, 1.0, 11):
            for _ in range(2):
                mu = complex(rng.uniform(-1.0, 1.0),
                             rng.choice([1.0, -1.0]) * rng.uniform(0.1, 1.2))
                off, defect = _twist_identity_residual(mu, float(t_val), rng, tol)
                worst_off = max(worst_off, off)
                worst_defect = max(worst_defect, defect)
        ok = bool(worst_off <= 1e-9 and worst_defect <= 1e-9)
        return ok, (f"diagonal identity holds (off {worst_off:.2e}, "
                    f"defect {worst_defect:.2e})"), None
    _run(out, "n2_complex", "diagonal_identity_grid", False, identity_body)

    def reduce_body(_=None):
        rng = stream.next()
        mu = complex(0.4, 0.9)
        a_axes = (1.6, 1.1, float(rng.choice([1.0, -1.0])) * 0.5)
        b_shift = tuple(rng.uniform(-0.5, 0.5, 3))
        u = haar_unitary(2, FIELD_C, rng)
        v = haar_unitary(2, FIELD_C, rng)
        t = two_by_two_op(u, v, mu, a_axes, b_shift)
        form = reduce_2x2_complex(t, tol)
        if form.tag != TAG_TWO_BY_TWO:
            return False, f"reduction failed: {form.diagnostic}", None
        axes_ok = max(abs(x - y) for x, y in zip(form.a, a_axes)) <= 1e-8
        shift_ok = max(abs(abs(x) - abs(y))
                       for x, y in zip(form.b, b_shift)) <= 1e-8
        ok = (abs(form.mu - mu) <= 1e-8 and axes_ok and shift_ok
              and form.residual <= 1e-8)
        return ok, ("axes, shift magnitudes and mu recovered" if ok else
                    f"axes {form.a} vs {a_axes}, residual {form.residual}"), {
            "a": list(a_axes), "b": [float(x) for x in b_shift]}
    _run(out, "n2_complex", "reduce_recovery", False, reduce_body)

    def real_mu_body(_=None):
        # A real twist scalar collapses the map onto the quaternion span.
        def action(x: Mat) -> Mat:
            z = zeta_coords(x)
            return mat_from_zeta(z.real + 0.7 * z.imag)
        t = op_from_action(FIELD_C, 2, action)
        form = reduce_2x2_complex(t, tol)
        detected = form.tag == TAG_UNCLASSIFIED
        return detected, (form.diagnostic or "") if detected else \
            "real twist scalar escaped detection", None
    _run(out, "n2_complex", "negative:real_mu", True, real_mu_body)

    def perturbed_body(_=None):
        rng = stream.next()
        t = mu_twist(1.0 + 0.0j, complex(0.2, 1.0),
                     haar_unitary(2, FIELD_C, rng),
                     haar_unitary(2, FIELD_C, rng), tol)
        broken = _perturbed(t, rng, 1e-2)
        form = classify_norm_mult_preserver(
            broken, RELATION_PRODUCT, tol, witness_budget=300)
        detected = form.tag == TAG_UNCLASSIFIED and form.witness is not None
        return detected, (
            "perturbed twist rejected with witness" if detected else
            f"tag {form.tag}, witness {form.witness is not None}"), None
    _run(out, "n2_complex", "negative:perturbed_twist", True, perturbed_body)
    return out


def _suite_t_n2(cfg: SuiteConfig, stream: _CaseStream) -> list:
    out: list = []
    tol = cfg.tol
    if 2 not in cfg.dims:
        return out
    if FIELD_C in cfg.fields:
        def conj_equiv_body(_=None):
            rng = stream.next()
            mu = complex(rng.uniform(-1.0, 1.0),
                         rng.choice([1.0, -1.0]) * rng.uniform(0.2, 1.2))
            gamma = complex(rng.uniform(0.5, 2.0)
                            * np.exp(2j * np.pi * rng.uniform()))
            t = mu_twist(gamma, mu, haar_unitary(2, FIELD_C, rng),
                         haar_unitary(2, FIELD_C, rng), tol)
            phi = conj_op(2)
            s = compose(phi, compose(t, phi))
            form = classify_norm_mult_preserver(
                s, RELATION_PRODUCT, tol, witness_budget=0)
            pres = check_pair_preservation(
                s, RELATION_PRODUCT, min(cfg.trials_per_case, 100), rng, tol)
            ok = (form.tag == TAG_MU_TWIST
                  and abs(form.gamma - gamma.conjugate()) <= 1e-8 * abs(gamma)
                  and abs(form.mu - (-mu.conjugate())) <= 1e-8 * (1 + abs(mu))
                  and pres.ok)
            return ok, (
                "conjugated twist classifies with conjugated parameters"
                if ok else f"tag {form.tag}, diagnostic {form.diagnostic}"), {
                "mu": [mu.real, mu.imag], "gamma": [gamma.real, gamma.imag]}
        _run(out, "t_n2", "conjugation_equivalence:C2", False, conj_equiv_body)

        def conj_negative_body(_=None):
            rng = stream.next()
            t = mu_twist(1.0 + 0.0j, complex(-0.3, 0.8),
                         haar_unitary(2, FIELD_C, rng),
                         haar_unitary(2, FIELD_C, rng), tol)
            broken = _perturbed(t, rng, 1e-2)
            phi = conj_op(2)
            s = compose(phi, compose(broken, phi))
            f_t = classify_norm_mult_preserver(
                broken, RELATION_PRODUCT, tol, witness_budget=0)
            f_s = classify_norm_mult_preserver(
                s, RELATION_PRODUCT, tol, witness_budget=0)
            detected = (f_t.tag == TAG_UNCLASSIFIED
                        and f_s.tag == TAG_UNCLASSIFIED)
            return detected, (
                "breakage is conjugation-invariant" if detected else
                f"tags {f_t.tag} / {f_s.tag} disagree with expectation"), None
        _run(out, "t_n2", "negative:broken_both_sides:C2", True,
             conj_negative_body)
    if FIELD_R in cfg.fields:
        def transpose_invariance_body(_=None):
            rng = stream.next()
            c = float(np.exp(rng.uniform(np.log(0.2), np.log(5.0))))
            gamma = float(rng.uniform(0.5, 2.0) * rng.choice([1.0, -1.0]))
            u = _rotation2(float(rng.uniform(0.0, 2.0 * np.pi)))
            t = _phi_c_preserver(gamma, c, u, tol)
            tr = transpose_op(FIELD_R, 2)
            s = compose(tr, compose(t, tr))
            form = classify_norm_mult_preserver(
                s, RELATION_PRODUCT, tol, witness_budget=0)
            ok = (form.tag == TAG_PHI_C
                  and abs(form.c - c) <= 1e-8 * c
                  and abs(form.gamma - gamma) <= 1e-8 * abs(gamma))
            return ok, (
                "transpose conjugation leaves the family parameters fixed"
                if ok else f"tag {form.tag}, diagnostic {form.diagnostic}"), {
                "c": c, "gamma": gamma}
        _run(out, "t_n2", "transpose_invariance:R2", False,
             transpose_invariance_body)
    return out


def _suite_basic_lemma(cfg: SuiteConfig, stream: _CaseStream) -> list:
    out: list = []
    tol = cfg.tol
    for field in cfg.fields:
        for n in [n for n in cfg.dims if n >= 2]:
            def agreement_body(field=field, n=n):
                rng = stream.next()
                disagreements = 0
                for _ in range(cfg.trials_per_case):
                    a = random_mat(n, field, rng)
                    b = random_mat(n, field, rng)
                    if (norm_mult_direct(a, b, tol).holds
                            != norm_mult_structural(a, b, tol).holds):
                        disagreements += 1
                    sesqui_mult(a, b, STAR_LEFT, tol)   # would raise on clash
                    sesqui_mult(a, b, STAR_RIGHT, tol)
                return disagreements == 0, (
                    f"{cfg.trials_per_case} random pairs, "
                    f"{disagreements} disagreements"), {"n": n, "field": field}
            _run(out, "basic_lemma", f"agreement:random:{field}{n}", False,
                 agreement_body)

            def constructed_body(field=field, n=n):
                rng = stream.next()
                worst = 0.0
                for _ in range(cfg.trials_per_case):
                    a, b = gen_norm_mult_pair(n, field, rng)
                    d = norm_mult_direct(a, b, tol)
                    s = norm_mult_structural(a, b, tol)
                    if not (d.holds and s.holds):
                        return False, "constructed pair rejected", {
                            "n": n, "field": field}
                    worst = max(worst, d.residual)
                    for side in (STAR_LEFT, STAR_RIGHT):
                        a2, b2 = gen_sesqui_pair(n, field, side, rng)
                        if not sesqui_mult(a2, b2, side, tol).holds:
                            return False, f"constructed {side} pair rejected", {
                                "n": n, "field": field}
                return True, (
                    f"all constructed pairs hold, worst product residual "
                    f"{worst:.3e}"), None
            _run(out, "basic_lemma", f"soundness:constructed:{field}{n}",
                 False, constructed_body)

            def orthogonal_body(field=field, n=n):
                rng = stream.next()
                a, b = gen_sesqui_pair(n, field, STAR_RIGHT, rng)
                # Rebuild B anchored on a vector orthogonal to A's top
                # right vector; the sesqui equality must then fail.
                top = svd(a).V.arr[:, 0]
                while True:
                    y = random_unit_vector(n, field, rng)
                    y = y - top * np.vdot(top, y)
                    nrm = float(np.linalg.norm(y))
                    if nrm > 1e-6:
                        break
                y = y / nrm
                if field == FIELD_R:
                    y = y.real
                b_orth = _matrix_with_top(n, field, rng, y, "right")
                verdict = sesqui_mult(a, b_orth, STAR_RIGHT, tol)
                return (not verdict.holds), (
                    "orthogonalized pair rejected by both criteria"
                    if not verdict.holds else "orthogonalized pair slipped "
                    "through"), {"n": n, "field": field}
            _run(out, "basic_lemma", f"negative:orthogonal_top:{field}{n}",
                 True, orthogonal_body)
    return out


_SUITES = {
    "thm_main1": _suite_thm_main1,
    "lam1": _suite_lam1,
    "main2": _suite_main2,
    "generalization": _suite_generalization,
    "p_unitary": _suite_p_unitary,
    "n2_real": _suite_n2_real,
    "n2_complex": _suite_n2_complex,
    "t_n2": _suite_t_n2,
    "basic_lemma": _suite_basic_lemma,
}


def run_suite(cfg: SuiteConfig) -> SuiteReport:
    """Execute the configured suites and collect all outcomes.

    Never raises for case failures.  A suite whose negative controls all
    slip through (or that has none) gets an extra failing harness_error
    outcome, since an undetectable non-preserver means the detectors are
    broken.
    """
    outcomes: list = []
    for name in cfg.suites:
        suite_idx = SUITE_NAMES.index(name)
        stream = _CaseStream(cfg.tol.seed, suite_idx)
        cases = _SUITES[name](cfg, stream)
        if not cases:
            cases = [CaseOutcome(name, "skipped", True, False,
                                 "no applicable dims/fields in config", None)]
        elif not any(o.negative and o.passed for o in cases):
            cases.append(CaseOutcome(
                name, "harness_error", False, False,
                "no negative control failed as required", None))
        outcomes.extend(cases)
    return SuiteReport(cfg, tuple(outcomes))


def report_json_text(report: SuiteReport) -> str:
    """Canonical serialized form used for byte-identical comparisons."""
    return json.dumps(report_to_json(report), indent=2, sort_keys=True) + "\n"
