"""Command line front end.

Every command prints one JSON document on stdout.  Exit codes: 0 success
(or Isomorphic), 1 a ``check`` audit failed, 2 NotWithinBound, 3 invalid
input, 4 search budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import element_is_hermitian_idempotent
from .bratteli import (
    AlgebraDirectSystem,
    approximate_identity_defect,
    group_system_of,
    injectivize,
    unit_image,
)
from .classify import (
    DEFAULT_BUDGET,
    DEFAULT_DEPTH,
    find_intertwining,
    ladder_to_algebra_iso,
    lift_one_sided,
    one_sided_extend,
    realize_system,
    verify_witness,
)
from .errors import BudgetExhausted, LpafError
from .homs import decompose_spatial, homs_agree, render_raw
from .io import (
    FormatError,
    dumps,
    element_from_dict,
    group_system_from_dict,
    load_document,
    system_from_dict,
    system_to_dict,
)
from .ktheory import K1, riesz_report
from .pnorm import matrix_level_norm

EXIT_OK, EXIT_AUDIT, EXIT_NOT_WITHIN, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3, 4


def _emit(doc) -> None:
    sys.stdout.write(dumps(doc) + "\n")


def _write(path: str, doc) -> None:
    Path(path).write_text(dumps(doc) + "\n", encoding="utf-8")


def _groups_and_algebras(path: str, p: float | None):
    """Accept either an algebra system or a group system document."""
    doc = load_document(path)
    if isinstance(doc, dict) and "p" in doc:
        alg = system_from_dict(doc)
        return group_system_of(alg), alg
    groups = group_system_from_dict(doc)
    return groups, (realize_system(groups, p) if p is not None else None)


def cmd_k0(args) -> int:
    doc = load_document(args.file)
    if isinstance(doc, dict) and "p" in doc:
        groups = group_system_of(system_from_dict(doc))
    else:
        groups = group_system_from_dict(doc)
    _emit({"command": "k0", "group_system": groups.to_json(), "k1": K1})
    return EXIT_OK


def _parse_inline_or_file(text: str):
    stripped = text.lstrip()
    if stripped.startswith(("{", "[")):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"--element:{exc.lineno}:{exc.colno}", exc.msg) from None
    return load_document(text)


def cmd_norm(args) -> int:
    system = system_from_dict(load_document(args.file))
    if not 0 <= args.level <= system.horizon:
        raise FormatError("--level", f"level {args.level} outside 0..{system.horizon}")
    algebra = system.levels[args.level]
    blocks = element_from_dict(_parse_inline_or_file(args.element), algebra, args.matrix_level)
    est = matrix_level_norm(blocks, args.matrix_level, algebra, seed=args.seed, tol=args.tol)
    _emit({"command": "norm", "level": args.level, "matrix_level": args.matrix_level,
           "estimate": est.as_dict()})
    return EXIT_OK


def audit_system(system: AlgebraDirectSystem, seed: int = 0, tol: float = 1e-6,
                 samples: int = 16) -> dict:
    """Hermitian, spatiality, approximate identity and Riesz audits of a system."""
    hermitian, spatial, approx, riesz = [], [], [], []
    for i, h in enumerate(system.maps):
        units = [element_is_hermitian_idempotent(h(h.source.summand_unit(j))) for j in range(len(h.source))]
        hermitian.append({"map": i, "ok": all(units)})
        try:
            ok = homs_agree(decompose_spatial(render_raw(h)), h)
            spatial.append({"map": i, "ok": ok})
        except LpafError as exc:
            spatial.append({"map": i, "ok": False, "error": str(exc)})
    for n in range(len(system.levels)):
        defect = approximate_identity_defect(system, n, samples=samples, seed=seed)
        approx.append({"level": n, "defect": defect, "ok": defect <= tol,
                       "unit_hermitian": element_is_hermitian_idempotent(unit_image(system, 0, n))})
    for n, g in enumerate(group_system_of(system).levels):
        rep = riesz_report(g, samples=samples * 4, seed=seed)
        riesz.append({"level": n, "ok": rep["passed"], "failures": rep["failures"]})
    sections = {"hermitian": hermitian, "spatial": spatial, "approximate_identity": approx, "riesz": riesz}
    return {
        **sections,
        "passed": all(item["ok"] for sec in sections.values() for item in sec),
    }


def cmd_check(args) -> int:
    system = system_from_dict(load_document(args.file))
    report = audit_system(system, seed=args.seed, tol=args.tol)
    _emit({"command": "check", **report})
    return EXIT_OK if report["passed"] else EXIT_AUDIT


def cmd_isomorphic(args) -> int:
    g, a = _groups_and_algebras(args.file1, args.p)
    h, b = _groups_and_algebras(args.file2, args.p)
    verdict = find_intertwining(g, h, depth=args.depth, budget=args.budget)
    out = {"command": "isomorphic", **verdict.to_json()}
    if verdict.isomorphic and a is not None and b is not None:
        witness = ladder_to_algebra_iso(verdict.ladder, a, b)
        out["verification"] = verify_witness(witness, a, b, seed=args.seed, tol=args.tol)
        if args.witness:
            _write(args.witness, witness.to_json())
            out["witness_file"] = args.witness
    _emit(out)
    return EXIT_OK if verdict.isomorphic else EXIT_NOT_WITHIN


def cmd_realize(args) -> int:
    groups = group_system_from_dict(load_document(args.file))
    system = realize_system(groups, args.p)
    doc = system_to_dict(system)
    if args.output:
        _write(args.output, doc)
        _emit({"command": "realize", "output": args.output, "levels": len(system.levels)})
    else:
        _emit(doc)
    return EXIT_OK


def cmd_injectivize(args) -> int:
    system = system_from_dict(load_document(args.file))
    result = injectivize(system)
    doc = system_to_dict(result)
    if args.output:
        _write(args.output, doc)
        _emit({"command": "injectivize", "output": args.output,
               "caveat": result.caveat.to_json() if result.caveat else None})
    else:
        _emit(doc)
    return EXIT_OK


def cmd_one_sided(args) -> int:
    g, a = _groups_and_algebras(args.file1, args.p)
    h, b = _groups_and_algebras(args.file2, args.p)
    f0 = _parse_inline_or_file(args.f0)
    if not (isinstance(f0, list) and all(isinstance(r, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in r) for r in f0)):
        raise FormatError("--f0", "expected an integer matrix")
    m0, n0 = args.levels
    res = one_sided_extend(np.array(f0, dtype=np.int64).reshape(len(f0), -1) if f0 else np.zeros((0, 0), dtype=np.int64),
                           m0, n0, g, h, depth=args.depth, budget=args.budget)
    out = {"command": "intertwine-one-sided", **res.to_json()}
    if res.complete and a is not None and b is not None:
        lift_one_sided(res, a, b)
        out["lifted"] = True
    _emit(out)
    return EXIT_OK if res.complete else EXIT_NOT_WITHIN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lpaf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, tol=1e-6):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=tol)

    sp = sub.add_parser("k0", help="K_0 shadow of a system (K_1 is 0)")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_k0)

    sp = sub.add_parser("norm", help="norm of an element at a level")
    sp.add_argument("file")
    sp.add_argument("--level", type=int, required=True)
    sp.add_argument("--element", required=True, help="JSON text or path to a JSON file")
    sp.add_argument("--matrix-level", type=int, default=1)
    common(sp, tol=1e-8)
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("check", help="hermitian, spatiality, approximate identity and Riesz audits")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("isomorphic", help="search for an intertwining ladder and lift it")
    sp.add_argument("file1")
    sp.add_argument("file2")
    sp.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.add_argument("--p", type=float, default=None, help="exponent used to realise group system files")
    sp.add_argument("--witness", default=None, help="write the isomorphism witness here")
    common(sp)
    sp.set_defaults(func=cmd_isomorphic)

    sp = sub.add_parser("realize", help="realise a group system as an algebra system")
    sp.add_argument("file")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--output", "-o", default=None)
    sp.set_defaults(func=cmd_realize)

    sp = sub.add_parser("injectivize", help="drop summands that die before the horizon")
    sp.add_argument("file")
    sp.add_argument("--output", "-o", default=None)
    sp.set_defaults(func=cmd_injectivize)

    sp = sub.add_parser("intertwine-one-sided", help="extend a group map along two systems")
    sp.add_argument("file1")
    sp.add_argument("file2")
    sp.add_argument("--f0", required=True, help="integer matrix as JSON")
    sp.add_argument("--levels", type=int, nargs=2, metavar=("M0", "N0"), default=(0, 0))
    sp.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.add_argument("--p", type=float, default=None)
    sp.set_defaults(func=cmd_one_sided)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except BudgetExhausted as exc:
        _emit({"command": args.command, "verdict": "BudgetExhausted",
               "nodes_explored": exc.nodes, "budget": exc.budget})
        return EXIT_BUDGET
    except LpafError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
