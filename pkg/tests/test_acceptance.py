"""Acceptance gate: ten executable criteria covering the whole toolkit.

Each test prints exactly one pass/fail line (visible with ``pytest -s`` or
``-rA``) and enforces the stated tolerances; numbers in the assertions are
contractual, not tuning knobs.
"""

import json
import time

import numpy as np
import pytest

from preservers.canonize import (
    RELATION_PRODUCT,
    RELATION_STAR_LEFT,
    RELATION_STAR_RIGHT,
    TAG_MU_TWIST,
    TAG_PHI_C,
    TAG_SANDWICH,
    TAG_TWO_BY_TWO,
    TAG_UNCLASSIFIED,
    classify_norm_mult_preserver,
    decompose_sandwich,
    maps_unitaries_to_multiples,
    reduce_2x2_complex,
    rel_op_residual,
    two_by_two_op,
)
from preservers.cli import main as cli_main
from preservers.families import (
    VARIANT_CONJ,
    VARIANT_ID,
    mu_twist,
    phi_c,
    sandwich_op,
    so3_of_unitary,
    su2_lift,
    variants_for,
)
from preservers.harness import (
    SuiteConfig,
    check_pair_preservation,
    config_to_json,
    gen_norm_mult_pair,
    gen_sesqui_pair,
)
from preservers.linop import MatLinOp, compose, conj_op, op_from_action, transpose_op
from preservers.matcore import (
    DEFAULT_TOL,
    FIELD_C,
    FIELD_R,
    Mat,
    eye,
    haar_unitary,
    random_mat,
    unit,
)
from preservers.specnorm import (
    STAR_LEFT,
    STAR_RIGHT,
    is_unitary_multiple,
    norm_mult_direct,
    norm_mult_structural,
    sesqui_mult,
    spectral_norm,
    svd,
    top_left_singular_subspace,
    top_right_singular_subspace,
)

DIMS = (3, 4, 5)
BOTH = (FIELD_R, FIELD_C)


def _verdict_line(num: int, body):
    try:
        detail = body()
    except BaseException:
        print(f"acceptance criterion {num}: FAIL")
        raise
    print(f"acceptance criterion {num}: PASS ({detail})")


def _gamma_conj(gamma, u: Mat) -> MatLinOp:
    return op_from_action(u.field, u.n, lambda x: (u @ x @ u.H) * gamma)


def _perturb(t: MatLinOp, rng: np.random.Generator, eps: float) -> MatLinOp:
    noise = rng.standard_normal(t.mat.shape)
    noise *= eps * float(np.linalg.norm(t.mat, 2)) / float(np.linalg.norm(noise, 2))
    return MatLinOp(t.field, t.n, t.mat + noise)


def test_criterion_1_sandwich_round_trip():
    def body():
        rng = np.random.default_rng(101)
        start = time.perf_counter()
        worst = 0.0
        for k in range(200):
            n = DIMS[k % len(DIMS)]
            field = BOTH[(k // len(DIMS)) % 2]
            variants = variants_for(field)
            variant = variants[k % len(variants)]
            r = float(rng.uniform(0.2, 3.0))
            t = sandwich_op(r, haar_unitary(n, field, rng),
                            haar_unitary(n, field, rng), variant)
            form = decompose_sandwich(t)
            assert form.tag == TAG_SANDWICH
            assert form.variant == variant
            assert abs(form.r - r) <= 1e-9 * r
            assert form.residual <= 1e-8
            worst = max(worst, form.residual)
        elapsed = time.perf_counter() - start
        assert elapsed <= 60.0
        return f"200 round trips, worst residual {worst:.2e}, {elapsed:.1f}s"
    _verdict_line(1, body)


def test_criterion_2_unitary_forward_and_negatives():
    def body():
        rng = np.random.default_rng(102)
        worst_spread = 0.0
        built = 0
        for field in BOTH:
            for n in DIMS:
                for variant in variants_for(field)[:2]:
                    t = sandwich_op(float(rng.uniform(0.3, 2.0)),
                                    haar_unitary(n, field, rng),
                                    haar_unitary(n, field, rng), variant)
                    probe = maps_unitaries_to_multiples(t, 300, DEFAULT_TOL, rng)
                    assert probe.passed
                    assert probe.spread <= 1e-8
                    worst_spread = max(worst_spread, probe.spread)
                    built += 1
        caught = 0
        for k in range(50):
            n = DIMS[k % len(DIMS)]
            field = BOTH[k % 2]
            t = sandwich_op(1.0, haar_unitary(n, field, rng),
                            haar_unitary(n, field, rng), VARIANT_ID)
            broken = _perturb(t, rng, 1e-3)
            probe = maps_unitaries_to_multiples(broken, 300, DEFAULT_TOL, rng)
            assert not probe.passed
            assert probe.counterexample is not None
            w = probe.counterexample
            assert np.allclose(w.arr.conj().T @ w.arr, np.eye(n), atol=1e-10)
            assert is_unitary_multiple(broken(w)) is None
            caught += 1
        return (f"{built} preservers at spread <= {worst_spread:.2e}, "
                f"{caught}/50 perturbations rejected with unitary witnesses")
    _verdict_line(2, body)


def test_criterion_3_unitary_multiple_pair_equivalence():
    def body():
        rng = np.random.default_rng(103)
        exceptions = 0
        held = 0
        for k in range(100):
            n = int(rng.integers(2, 6))
            field = BOTH[k % 2]
            c = float(rng.uniform(0.2, 4.0))
            a = c * haar_unitary(n, field, rng)
            try:
                for _ in range(200):
                    b = random_mat(n, field, rng)
                    assert norm_mult_direct(a, b).holds
                    held += 1
            except AssertionError:
                raise
            except Exception:
                exceptions += 1
        failed = 0
        for k in range(100):
            n = int(rng.integers(2, 6))
            field = BOTH[k % 2]
            s = np.linspace(1.0, 0.35, n)
            p = haar_unitary(n, field, rng).arr
            q = haar_unitary(n, field, rng).arr
            arr = (p * s[np.newaxis, :]) @ q.conj().T
            a = Mat(field, arr.real if field == FIELD_R else arr)
            # the witness from the equivalence proof: pick off the smallest
            # singular direction of A through the last column of Q
            b = Mat(field, svd(a).V.arr @ unit(n, n, n, FIELD_C).arr.real) \
                if field == FIELD_R else Mat(field, svd(a).V.arr @ unit(n, n, n).arr)
            try:
                assert not norm_mult_direct(a, b).holds
                failed += 1
            except AssertionError:
                raise
            except Exception:
                exceptions += 1
        assert exceptions == 0
        return (f"{held} multiple pairs hold, {failed}/100 witnesses reject, "
                f"0 exceptions")
    _verdict_line(3, body)


def _sesqui_structural(a: Mat, b: Mat, side: str) -> bool:
    if side == STAR_RIGHT:
        sa = top_right_singular_subspace(a)
        sb = top_right_singular_subspace(b)
    else:
        sa = top_left_singular_subspace(a)
        sb = top_left_singular_subspace(b)
    s = np.linalg.svd(sa.conj().T @ sb, compute_uv=False)
    smax = min(1.0, float(s.max())) if s.size else 0.0
    return float(np.sqrt(max(0.0, 1.0 - smax * smax))) <= DEFAULT_TOL.rank_gap


def test_criterion_4_oracle_agreement():
    def body():
        disagreements = 0
        checked = 0
        for field in BOTH:
            for n in (2, 3, 4, 5):
                rng = np.random.default_rng([104, n, BOTH.index(field)])
                for _ in range(1000):
                    a = random_mat(n, field, rng)
                    b = random_mat(n, field, rng)
                    if norm_mult_direct(a, b).holds != norm_mult_structural(a, b).holds:
                        disagreements += 1
                    for side in (STAR_LEFT, STAR_RIGHT):
                        if sesqui_mult(a, b, side).holds != _sesqui_structural(a, b, side):
                            disagreements += 1
                    checked += 1
                for _ in range(1000):
                    a, b = gen_norm_mult_pair(n, field, rng)
                    d = norm_mult_direct(a, b)
                    s = norm_mult_structural(a, b)
                    if not (d.holds and s.holds):
                        disagreements += 1
                    side = STAR_RIGHT if checked % 2 else STAR_LEFT
                    a2, b2 = gen_sesqui_pair(n, field, side, rng)
                    if not (sesqui_mult(a2, b2, side).holds
                            and _sesqui_structural(a2, b2, side)):
                        disagreements += 1
                    checked += 1
        assert disagreements == 0
        return f"{checked} pairs per oracle family, 0 disagreements"
    _verdict_line(4, body)


def test_criterion_5_product_preservers_and_witnesses():
    def body():
        rng = np.random.default_rng(105)
        worst = 0.0
        for k in range(20):
            n = DIMS[k % len(DIMS)]
            field = BOTH[k % 2]
            if field == FIELD_R:
                gamma = float(rng.uniform(0.5, 2.0)) * float(rng.choice([1.0, -1.0]))
            else:
                gamma = complex(rng.uniform(0.5, 2.0)
                                * np.exp(2j * np.pi * rng.uniform()))
            t = _gamma_conj(gamma, haar_unitary(n, field, rng))
            pres = check_pair_preservation(t, RELATION_PRODUCT, 500, rng)
            assert pres.ok
            assert pres.worst_residual <= 1e-8
            worst = max(worst, pres.worst_residual)

        witnesses = 0
        for n in DIMS:
            while True:
                u = haar_unitary(n, FIELD_C, rng)
                v = haar_unitary(n, FIELD_C, rng)
                w = (v @ u).arr
                if np.linalg.norm(w - (np.trace(w) / n) * np.eye(n)) > 0.3:
                    break
            t = sandwich_op(1.0, u, v, VARIANT_ID)
            form = classify_norm_mult_preserver(
                t, RELATION_PRODUCT, witness_budget=1000)
            assert form.tag == TAG_UNCLASSIFIED
            assert form.witness is not None
            a, b = form.witness
            assert a.allclose(b, atol=1e-12)
            dec = svd(a)
            assert dec.s[1] <= 1e-9 * dec.s[0]  # a = xx* up to 1e-9
            x = dec.U.arr[:, 0]
            assert abs(np.vdot(x, w @ x)) < 1.0
            assert norm_mult_direct(a, b).holds
            assert not norm_mult_direct(t(a), t(b)).holds
            witnesses += 1

        tr = transpose_op(FIELD_C, 3)
        form = classify_norm_mult_preserver(tr, RELATION_PRODUCT, witness_budget=50)
        a, b = form.witness
        assert np.array_equal(a.arr, unit(1, 1, 3).arr)
        assert np.array_equal(b.arr, unit(1, 2, 3).arr)
        assert spectral_norm(a @ b) == 1.0
        assert spectral_norm(tr(a) @ tr(b)) == 0.0
        return (f"20 conjugation forms at residual <= {worst:.2e}, "
                f"{witnesses} rank-one witnesses, matrix-unit witness exact")
    _verdict_line(5, body)


def test_criterion_6_sesqui_preservers():
    def body():
        rng = np.random.default_rng(106)
        count = 0
        for relation in (RELATION_STAR_LEFT, RELATION_STAR_RIGHT):
            for variant in (VARIANT_ID, VARIANT_CONJ):
                n = DIMS[count % len(DIMS)]
                t = sandwich_op(float(rng.uniform(0.5, 2.0)),
                                haar_unitary(n, FIELD_C, rng),
                                haar_unitary(n, FIELD_C, rng), variant)
                pres = check_pair_preservation(t, relation, 500, rng)
                assert pres.ok
                count += 1
        for relation in (RELATION_STAR_LEFT, RELATION_STAR_RIGHT):
            t = sandwich_op(1.2, haar_unitary(3, FIELD_R, rng),
                            haar_unitary(3, FIELD_R, rng), VARIANT_ID)
            pres = check_pair_preservation(t, relation, 500, rng)
            assert pres.ok
            count += 1

        tr = transpose_op(FIELD_C, 3)
        form = classify_norm_mult_preserver(tr, RELATION_STAR_RIGHT,
                                            witness_budget=50)
        assert form.tag == TAG_UNCLASSIFIED
        a, b = form.witness
        assert np.array_equal(a.arr, unit(1, 1, 3).arr)
        assert np.array_equal(b.arr, unit(2, 1, 3).arr)
        assert sesqui_mult(a, b, STAR_RIGHT).holds
        assert not sesqui_mult(tr(a), tr(b), STAR_RIGHT).holds
        return f"{count} sandwich forms x 500 pairs, transposition witness exact"
    _verdict_line(6, body)


def test_criterion_7_two_by_two_machinery():
    def body():
        rng = np.random.default_rng(107)
        worst_rot = 0.0
        for _ in range(500):
            rot = so3_of_unitary(haar_unitary(2, FIELD_C, rng))
            back = so3_of_unitary(su2_lift(rot))
            err = float(np.max(np.abs(back.arr - rot.arr)))
            assert err <= 1e-10
            worst_rot = max(worst_rot, err)

        recovered = 0
        for _ in range(100):
            u = haar_unitary(2, FIELD_C, rng)
            v = haar_unitary(2, FIELD_C, rng)
            mu = complex(rng.uniform(-1.0, 1.0),
                         float(rng.choice([1.0, -1.0])) * rng.uniform(0.15, 1.4))
            a1 = float(rng.uniform(1.4, 2.2))
            a2 = float(rng.uniform(0.8, a1 - 0.2))
            a3 = float(rng.choice([1.0, -1.0])) * float(rng.uniform(0.2, a2 - 0.15))
            axes = (a1, a2, a3)
            shift = tuple(float(x) for x in rng.uniform(-0.4, 0.4, 3))
            t = two_by_two_op(u, v, mu, axes, shift)
            red = reduce_2x2_complex(t)
            assert red.tag == TAG_TWO_BY_TWO
            assert abs(red.mu - mu) <= 1e-8
            assert max(abs(x - y) for x, y in zip(red.a, axes)) <= 1e-8
            assert max(abs(abs(x) - abs(y))
                       for x, y in zip(red.b, shift)) <= 1e-8
            rec = two_by_two_op(red.U, red.V, red.mu, red.a, red.b)
            assert rel_op_residual(t, rec) <= 1e-8
            recovered += 1

        checks = 0
        for t_val in np.linspace(0.0, 1.0, 11):
            for _ in range(20):
                mu = complex(rng.uniform(-1.0, 1.0),
                             float(rng.choice([1.0, -1.0])) * rng.uniform(0.1, 1.3))
                u = haar_unitary(2, FIELD_C, rng)
                v = haar_unitary(2, FIELD_C, rng)
                a = Mat(FIELD_C,
                        (u.arr * np.array([1.0, float(t_val)])[np.newaxis, :])
                        @ v.arr.conj().T)
                tw = mu_twist(1.0 + 0.0j, mu, eye(2, FIELD_C), eye(2, FIELD_C))
                m = (u.H @ tw(a) @ v).arr
                assert max(abs(m[0, 1]), abs(m[1, 0])) <= 1e-9
                lhs = abs(m[0, 0]) ** 2 - abs(m[1, 1]) ** 2
                assert abs(lhs - (1.0 - float(t_val) ** 2) * mu.imag) <= 1e-9
                checks += 1
        return (f"500 rotation round trips <= {worst_rot:.2e}, "
                f"{recovered} reductions recovered, {checks} identity checks")
    _verdict_line(7, body)


def test_criterion_8_n2_families():
    def body():
        rng = np.random.default_rng(108)
        tr2 = transpose_op(FIELD_R, 2)
        for c in np.logspace(-1.0, 1.0, 10):
            gamma = float(rng.uniform(0.5, 2.0)) * float(rng.choice([1.0, -1.0]))
            theta = float(rng.uniform(0.0, 2.0 * np.pi))
            u = Mat(FIELD_R, np.array([[np.cos(theta), -np.sin(theta)],
                                       [np.sin(theta), np.cos(theta)]]))
            base = phi_c(float(c))
            t = op_from_action(FIELD_R, 2, lambda x: (u @ base(x) @ u.H) * gamma)
            pres = check_pair_preservation(t, RELATION_PRODUCT, 500, rng)
            assert pres.ok and pres.worst_residual <= 1e-8
            form = classify_norm_mult_preserver(t, RELATION_PRODUCT,
                                                witness_budget=0)
            assert form.tag == TAG_PHI_C
            assert abs(form.c - c) <= 1e-8 * c
            assert abs(complex(form.gamma).real - gamma) <= 1e-8 * abs(gamma)
            assert form.residual <= 1e-8
            rec_base = phi_c(form.c)
            rec = op_from_action(
                FIELD_R, 2,
                lambda x: (form.U @ rec_base(x) @ form.U.H)
                * complex(form.gamma).real)
            assert rel_op_residual(t, rec) <= 1e-8
            # transpose conjugation lands on the same family member
            s = compose(tr2, compose(t, tr2))
            sform = classify_norm_mult_preserver(s, RELATION_PRODUCT,
                                                 witness_budget=0)
            assert sform.tag == TAG_PHI_C
            assert abs(sform.c - c) <= 1e-8 * c
            assert abs(complex(sform.gamma).real - gamma) <= 1e-8 * abs(gamma)
            assert check_pair_preservation(s, RELATION_PRODUCT, 100, rng).ok

        phi = conj_op(2)
        for _ in range(20):
            mu = complex(rng.uniform(-1.0, 1.0),
                         float(rng.choice([1.0, -1.0])) * rng.uniform(0.1, 1.5))
            gamma = complex(rng.uniform(0.5, 2.0)
                            * np.exp(2j * np.pi * rng.uniform()))
            u = haar_unitary(2, FIELD_C, rng)
            v = haar_unitary(2, FIELD_C, rng)
            t = mu_twist(gamma, mu, u, v)
            pres = check_pair_preservation(t, RELATION_PRODUCT, 500, rng)
            assert pres.ok and pres.worst_residual <= 1e-8
            form = classify_norm_mult_preserver(t, RELATION_PRODUCT,
                                                witness_budget=0)
            assert form.tag == TAG_MU_TWIST
            assert abs(form.gamma - gamma) <= 1e-8 * abs(gamma)
            assert abs(form.mu - mu) <= 1e-8 * (1.0 + abs(mu))
            assert form.residual <= 1e-8
            rec = mu_twist(form.gamma, form.mu, form.U, form.V)
            assert rel_op_residual(t, rec) <= 1e-8
            # entrywise-conjugation conjugacy flips the parameters
            s = compose(phi, compose(t, phi))
            sform = classify_norm_mult_preserver(s, RELATION_PRODUCT,
                                                 witness_budget=0)
            assert sform.tag == TAG_MU_TWIST
            assert abs(sform.gamma - gamma.conjugate()) <= 1e-8 * abs(gamma)
            assert abs(sform.mu - (-mu.conjugate())) <= 1e-8 * (1.0 + abs(mu))
            assert check_pair_preservation(s, RELATION_PRODUCT, 100, rng).ok
        return ("10 scaling family members and 20 twist members verified "
                "with conjugacy checks")
    _verdict_line(8, body)


def test_criterion_9_rank_one_preservation():
    def body():
        rng = np.random.default_rng(109)
        images = 0
        for field in BOTH:
            for n in DIMS:
                variants = variants_for(field)
                variant = variants[images % len(variants)]
                t = sandwich_op(float(rng.uniform(0.4, 2.0)),
                                haar_unitary(n, field, rng),
                                haar_unitary(n, field, rng), variant)
                for _ in range(100):
                    x = random_mat(n, field, rng).arr[:, 0]
                    y = random_mat(n, field, rng).arr[:, 0]
                    outer = np.outer(x, y)
                    r1 = Mat(field, outer.real if field == FIELD_R else outer)
                    s = svd(t(r1)).s
                    assert s[1] <= 1e-8 * s[0]
                    images += 1
        return f"{images} rank-one images stay rank one at 1e-8"
    _verdict_line(9, body)


def test_criterion_10_reproducibility(tmp_path):
    def body():
        cfg_path = tmp_path / "default.json"
        cfg_path.write_text(json.dumps(config_to_json(SuiteConfig()), indent=2),
                            encoding="utf-8")
        durations = []
        outputs = []
        for k in range(2):
            out = tmp_path / f"report{k}.json"
            start = time.perf_counter()
            rc = cli_main(["suite", "--config", str(cfg_path), "--out", str(out)])
            durations.append(time.perf_counter() - start)
            assert rc == 0
            assert durations[-1] <= 300.0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
        doc = json.loads(outputs[0])
        assert all(s["passed"] == s["cases"] for s in doc["suites"])
        return (f"two full suite runs byte-identical, "
                f"{max(durations):.1f}s worst case")
    _verdict_line(10, body)
