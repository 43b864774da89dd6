"""Command-line front end.

Thin shell over the library: load operators and matrices from JSON files,
run analyses and suites, synthesize family instances, and emit JSON reports.

Exit codes separate findings from breakage: 0 means the requested analysis
ran (whatever its verdict), 1 means I/O, usage or schema trouble, 2 means an
internal consistency check tripped (for example the direct and structural
pair criteria disagreed, which signals mistuned tolerances, not user error).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .matcore import (
    DEFAULT_TOL, FIELDS, SchemaError, mat_from_json, mat_to_json,
    tolerance_from_json,
)
from .linop import op_from_json, op_to_json
from .families import VARIANTS, mu_twist, phi_c, sandwich_op, su2_lift
from .specnorm import InconsistencyError
from .canonize import RELATION_UNITARY, RELATIONS, analyze_operator
from .harness import (
    config_from_json, gen_norm_mult_pair, report_json_text, run_suite,
)

_FAMILIES = ("sandwich", "phi_c", "mu_twist")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting, so bad flags map to exit code 1 rather
    than argparse's default 2 (reserved here for inconsistencies)."""

    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--quiet", action="store_true",
                        default=argparse.SUPPRESS,
                        help="suppress stdout except the verdict line")
    parser = _Parser(prog="preservers",
                     description="Analyze and synthesize linear preservers "
                                 "of unitary multiples and norm products.")
    parser.add_argument("--quiet", action="store_true", default=False)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p_analyze = sub.add_parser("analyze", parents=[common],
                               help="classify an operator against a relation")
    p_analyze.add_argument("--op", required=True, metavar="FILE")
    p_analyze.add_argument("--relation", required=True,
                           choices=list(RELATIONS) + [RELATION_UNITARY])
    p_analyze.add_argument("--tol-profile", metavar="FILE")

    p_synth = sub.add_parser("synth", parents=[common],
                             help="materialize a family instance as an "
                                  "operator JSON file")
    p_synth.add_argument("--family", required=True, choices=_FAMILIES)
    p_synth.add_argument("--params", required=True, metavar="FILE")
    p_synth.add_argument("--out", required=True, metavar="FILE")

    p_pairs = sub.add_parser("pairs", parents=[common],
                             help="generate norm-multiplicative pairs")
    p_pairs.add_argument("--n", required=True, type=int)
    p_pairs.add_argument("--field", required=True, choices=list(FIELDS))
    p_pairs.add_argument("--count", required=True, type=int)
    p_pairs.add_argument("--seed", required=True, type=int)
    p_pairs.add_argument("--out", required=True, metavar="FILE")

    p_suite = sub.add_parser("suite", parents=[common],
                             help="run the theorem suites")
    p_suite.add_argument("--config", required=True, metavar="FILE")
    p_suite.add_argument("--out", required=True, metavar="FILE")

    p_lift = sub.add_parser("lift", parents=[common],
                            help="lift a rotation matrix to SU(2)")
    p_lift.add_argument("--so3", required=True, metavar="FILE")
    p_lift.add_argument("--out", required=True, metavar="FILE")
    return parser


def _read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}") from exc


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise _UsageError(f"cannot write {path}: {exc}") from exc


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _load_tol(path: str | None):
    if path is not None:
        return tolerance_from_json(_read_json(path))
    env = os.environ.get("PRESERVER_TOL")
    if env:
        return tolerance_from_json(_read_json(env))
    return DEFAULT_TOL


def _complex_param(doc, what: str) -> complex:
    if not (isinstance(doc, dict) and set(doc) == {"re", "im"}):
        raise SchemaError(f"{what} must be an object with keys re and im")
    re_part, im_part = doc["re"], doc["im"]
    for part in (re_part, im_part):
        if isinstance(part, bool) or not isinstance(part, (int, float)):
            raise SchemaError(f"{what} components must be numbers")
    return complex(float(re_part), float(im_part))


def _real_param(doc, what: str) -> float:
    if isinstance(doc, bool) or not isinstance(doc, (int, float)):
        raise SchemaError(f"{what} must be a number")
    return float(doc)


def _cmd_analyze(args) -> int:
    op = op_from_json(_read_json(args.op))
    tol = _load_tol(args.tol_profile)
    report = analyze_operator(op, args.relation, tol)
    if args.quiet:
        print(report["verdict"])
    else:
        sys.stdout.write(_dump(report))
    return 0


def _synth_op(family: str, params: dict):
    if family == "sandwich":
        needed = {"r", "U", "V", "variant"}
        if set(params) != needed:
            raise SchemaError(f"sandwich params must have keys {sorted(needed)}")
        if params["variant"] not in VARIANTS:
            raise SchemaError(f"variant must be one of {VARIANTS}")
        return sandwich_op(_real_param(params["r"], "r"),
                           mat_from_json(params["U"]),
                           mat_from_json(params["V"]),
                           params["variant"])
    if family == "phi_c":
        if set(params) != {"c"}:
            raise SchemaError("phi_c params must have exactly the key c")
        return phi_c(_real_param(params["c"], "c"))
    needed = {"gamma", "mu", "U", "V"}
    if set(params) != needed:
        raise SchemaError(f"mu_twist params must have keys {sorted(needed)}")
    return mu_twist(_complex_param(params["gamma"], "gamma"),
                    _complex_param(params["mu"], "mu"),
                    mat_from_json(params["U"]),
                    mat_from_json(params["V"]))


def _cmd_synth(args) -> int:
    doc = _read_json(args.params)
    if not (isinstance(doc, dict) and set(doc) == {"family", "params"}):
        raise SchemaError("params file must be {\"family\": …, \"params\": …}")
    if doc["family"] != args.family:
        raise SchemaError(
            f"params file is for family {doc['family']!r}, "
            f"but --family says {args.family!r}")
    if not isinstance(doc["params"], dict):
        raise SchemaError("params must be an object")
    op = _synth_op(args.family, doc["params"])
    _write_text(args.out, _dump(op_to_json(op)))
    if not args.quiet:
        print(f"wrote {args.family} operator to {args.out}")
    return 0


def _cmd_pairs(args) -> int:
    if args.n < 1:
        raise _UsageError("--n must be at least 1")
    if args.count < 1:
        raise _UsageError("--count must be at least 1")
    rng = np.random.default_rng(args.seed)
    pairs = []
    for _ in range(args.count):
        a, b = gen_norm_mult_pair(args.n, args.field, rng)
        pairs.append({"A": mat_to_json(a), "B": mat_to_json(b)})
    doc = {"n": args.n, "field": args.field, "count": args.count,
           "seed": args.seed, "pairs": pairs}
    _write_text(args.out, _dump(doc))
    if not args.quiet:
        print(f"wrote {args.count} pairs to {args.out}")
    return 0


def _cmd_suite(args) -> int:
    cfg = config_from_json(_read_json(args.config))
    report = run_suite(cfg)
    _write_text(args.out, report_json_text(report))
    total = len(report.outcomes)
    if report.all_passed:
        print(f"pass: {total}/{total} cases")
    else:
        print(f"fail: {len(report.failed)}/{total} cases failing")
    return 0


def _cmd_lift(args) -> int:
    rot = mat_from_json(_read_json(args.so3))
    lifted = su2_lift(rot)
    _write_text(args.out, _dump(mat_to_json(lifted)))
    if not args.quiet:
        print(f"wrote SU(2) lift to {args.out}")
    return 0


_DISPATCH = {
    "analyze": _cmd_analyze,
    "synth": _cmd_synth,
    "pairs": _cmd_pairs,
    "suite": _cmd_suite,
    "lift": _cmd_lift,
}


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return _DISPATCH[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except InconsistencyError as exc:
        print(f"inconsistency: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
