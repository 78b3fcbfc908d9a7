"""Command-line front end.

Exit codes: 0 success, 1 negative verdict (UNSAT, invalid orientation),
2 input error, 3 class violation.
"""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import classes, cuts, families, oracle, reducer, z3g
from .graph import InstanceError, OrientationError, PrescriptionError, verify

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_CLASS = 0, 1, 2, 3


class _InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _InputError(f"{path}: {exc.strerror}") from None


def _load(path: str):
    text = _read(path)
    try:
        return z3g.parse(text)
    except PrescriptionError as exc:
        raise _InputError(f"{path}: {exc}") from None
    except InstanceError as exc:
        raise _InputError(f"{path}: {exc}") from None


def _fmt_set(s) -> str:
    return "{" + ",".join(str(x) for x in sorted(s)) + "}"


def cmd_validate(args) -> int:
    inst = _load(args.path)
    comps = [c for c in inst.components if any(inst.degree(v) for v in c)]
    print(f"vertices {inst.n} edges {inst.m} faces {inst.face_count()} components {len(comps)}")
    print(f"euler {'ok' if inst.euler_ok() else 'FAILED'}")
    print(f"prescription sum {sum(inst.p.values())} = 0 mod 3")
    for name in sorted(inst.marks):
        v = inst.marks[name]
        print(f"mark {name} at {v} degree {inst.degree(v)}")
    print("ok")
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load(args.path)
    trace = None
    if args.engine == "oracle":
        st = oracle.solve(inst)
        o = st.orientation
    else:
        cfg = reducer.Config(oracle_vertex_budget=args.budget, fallback=(args.engine == "auto"))
        try:
            res = reducer.reduce_solve(inst, cfg)
        except reducer.ReductionFailed as exc:
            print(f"reduction failed: {exc}", file=sys.stderr)
            return EXIT_INPUT
        o, trace = res.orientation, res.trace
    if args.trace and trace is not None:
        text = trace.dump()
        if args.trace == "-":
            sys.stderr.write(text)
        else:
            with open(args.trace, "w", encoding="utf-8") as fh:
                fh.write(text)
    if o is None:
        print("UNSAT")
        return EXIT_NO
    sys.stdout.write(z3g.write_orientation(o))
    return EXIT_OK


def cmd_class(args) -> int:
    inst = _load(args.path)
    names = [args.klass.upper()] if args.klass else list(classes.KLASSES)
    if args.klass and names[0] not in classes.CHECKS:
        raise _InputError(f"unknown class {args.klass!r}")
    ok_any = False
    for name in names:
        rep = classes.check(inst, name)
        if rep.passed:
            ok_any = True
            print(f"{name} pass")
            continue
        print(f"{name} fail")
        for clause, w in rep.violations:
            if isinstance(w, cuts.Cut):
                w = f"cut {_fmt_set(w.side)} edges {list(w.edges)}"
            print(f"  clause {clause}: {w}")
    return EXIT_OK if ok_any else EXIT_CLASS


def cmd_cuts(args) -> int:
    inst = _load(args.path)
    anchor = inst.d if args.robust else None
    for c in cuts.enumerate_cuts(inst, args.kmax, robust=args.robust, anchor=anchor):
        print(f"cut size {c.size} side {_fmt_set(c.side)} edges {' '.join(map(str, c.edges))}")
    return EXIT_OK


def cmd_count(args) -> int:
    inst = _load(args.path)
    try:
        print(oracle.count(inst, budget=args.budget))
    except oracle.BudgetExceeded as exc:
        raise _InputError(str(exc)) from None
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        inst, _ = families.gen_family(args.family, args.k, args.blob)
    except ValueError as exc:
        raise _InputError(str(exc)) from None
    text = z3g.write(inst)
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _load(args.path)
    try:
        o = z3g.parse_orientation(_read(args.orientation), inst)
    except InstanceError as exc:
        raise _InputError(f"{args.orientation}: {exc}") from None
    try:
        rep = verify(inst, o)
    except OrientationError as exc:
        print(f"invalid: {exc}")
        return EXIT_NO
    if rep.valid:
        print("valid")
        return EXIT_OK
    print(f"invalid at {' '.join(map(str, rep.offenders))}")
    return EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="z3flow", description="Prescribed Z3-orientations of plane graphs")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a z3g file")
    p.add_argument("path")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("solve", help="find a valid orientation")
    p.add_argument("path")
    p.add_argument("--engine", choices=("oracle", "reduce", "auto"), default="auto")
    p.add_argument("--budget", type=int, default=12, help="oracle vertex budget for the reducer")
    p.add_argument("--trace", metavar="FILE", help="write the reduction trace ('-' for stderr)")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("class", help="run class checks")
    p.add_argument("path")
    p.add_argument("--klass", help="DTS, 3DTS, RST, 3RST or FT (default: all)")
    p.set_defaults(fn=cmd_class)

    p = sub.add_parser("cuts", help="list small edge cuts")
    p.add_argument("path")
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--robust", type=int, default=0)
    p.set_defaults(fn=cmd_cuts)

    p = sub.add_parser("count", help="count valid orientations")
    p.add_argument("path")
    p.add_argument("--budget", type=int, default=oracle.COUNT_BUDGET)
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("gen", help="generate a family instance")
    p.add_argument("family", choices=families.FAMILIES)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--blob", choices=("single", "pair"), default="single")
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("verify", help="check an orientation file")
    p.add_argument("path")
    p.add_argument("orientation")
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
