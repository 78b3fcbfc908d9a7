"""Membership tests for the DTS, 3DTS, RST, 3RST and FT graph classes.

Each check returns a :class:`ClassReport` listing every violated clause with
a witness (a :class:`~z3flow.cuts.Cut`, or a ``(vertex, detail)`` pair).
Clause ids follow the class definitions; ``"orient"`` flags fixed edges away
from the directed vertex, which none of the classes allow.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

from . import cuts
from .graph import Instance

KLASSES = ("DTS", "3DTS", "RST", "3RST", "FT")

_small_cut_cache: "weakref.WeakKeyDictionary[Instance, list]" = weakref.WeakKeyDictionary()
_conn_cache: "weakref.WeakKeyDictionary[Instance, dict]" = weakref.WeakKeyDictionary()


@dataclass
class ClassReport:
    klass: str
    violations: List[Tuple[str, object]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.passed

    def clauses(self) -> List[str]:
        return sorted({c for c, _ in self.violations})

    def add(self, clause, witness):
        self.violations.append((clause, witness))


def cuts_upto3(inst: Instance) -> List[cuts.Cut]:
    got = _small_cut_cache.get(inst)
    if got is None:
        got = cuts.all_small_cuts(inst, 3)
        _small_cut_cache[inst] = got
    return got


def _boundary_paths(inst: Instance) -> Dict[int, float]:
    got = _conn_cache.get(inst)
    if got is None:
        got = {v: cuts.boundary_connectivity(inst, v) for v in cuts.interior_vertices(inst)}
        _conn_cache[inst] = got
    return got


def _degree3_free(inst: Instance) -> List[int]:
    """Degree-3 vertices that are not directed (some edge still free)."""
    out = []
    for v in inst.vertices:
        if inst.degree(v) == 3 and any(e not in inst.tail for e in inst.incident[v]):
            out.append(v)
    return out


def _connectivity(rep: ClassReport, inst: Instance) -> bool:
    small = [c for c in cuts_upto3(inst) if c.size < 3]
    if inst.n >= 2 and small:
        rep.add("1", small[0])
        return False
    return True


def _orient_clause(rep: ClassReport, inst: Instance) -> None:
    d = inst.d
    for e, x in inst.tail.items():
        if inst.is_loop(e):
            continue
        if d is None or d not in inst.ends[e]:
            rep.add("orient", (x, f"edge {e} is directed away from the directed vertex"))


def _paths(rep: ClassReport, inst: Instance, clause: str) -> None:
    for v, k in sorted(_boundary_paths(inst).items()):
        if k < 5:
            rep.add(clause, (v, f"only {k} edge-disjoint paths to the boundary"))


def _allowed_threecuts(rep: ClassReport, inst: Instance, names, clause: str) -> None:
    stars = {frozenset([v]) for k, v in inst.marks.items() if k in names}
    for c in cuts_upto3(inst):
        if c.size != 3:
            continue
        if c.side in stars or c.rest in stars:
            continue
        rep.add(clause, c)


def _separating_threecuts(rep: ClassReport, inst: Instance, names, clause: str) -> None:
    marked = [inst.marks[k] for k in names if k in inst.marks]
    for v in inst.vertices:
        if v not in marked and inst.degree(v) < 4:
            rep.add(clause, (v, f"unmarked vertex of degree {inst.degree(v)}"))
    if len(marked) == 3:
        for c in cuts_upto3(inst):
            if c.size != 3:
                continue
            inside = sum(1 for v in marked if v in c.side)
            if inside not in (1, 2):
                rep.add(clause, c)


def _dts_like(inst: Instance, klass: str) -> ClassReport:
    rep = ClassReport(klass)
    if inst.n <= 2:
        _connectivity(rep, inst)
        _orient_clause(rep, inst)
        return rep
    _connectivity(rep, inst)
    if inst.fg is None or inst.fgs is not None:
        rep.add("2", (None, "exactly one specified face required"))
    for k, v in inst.marks.items():
        if k not in ("d", "t", "s"):
            rep.add("2", (v, f"mark {k} not allowed"))
    bv = inst.face_vertices(inst.fg)
    d = inst.d
    if d is not None:
        if inst.degree(d) not in (3, 4, 5):
            rep.add("3", (d, f"directed vertex has degree {inst.degree(d)}"))
        if d not in bv:
            rep.add("3", (d, "directed vertex is off the boundary"))
        a = len(_degree3_free(inst))
        if inst.degree(d) > 5 - a:
            rep.add("5", (d, f"degree {inst.degree(d)} exceeds 5 - {a}"))
    for k in ("t", "s"):
        v = inst.marks.get(k)
        if v is None:
            continue
        if inst.degree(v) != 3:
            rep.add("4", (v, f"{k} has degree {inst.degree(v)}"))
        if v not in bv:
            rep.add("4", (v, f"{k} is off the boundary"))
    _orient_clause(rep, inst)
    if klass == "DTS":
        _allowed_threecuts(rep, inst, ("d", "t", "s"), "6")
    else:
        _separating_threecuts(rep, inst, ("d", "t", "s"), "6'")
    if inst.fg is not None:
        _paths(rep, inst, "7")
    return rep


def check_dts(inst: Instance) -> ClassReport:
    return _dts_like(inst, "DTS")


def check_3dts(inst: Instance) -> ClassReport:
    return _dts_like(inst, "3DTS")


def _fixed_edges(rep: ClassReport, inst: Instance) -> None:
    for e, x in inst.tail.items():
        if not inst.is_loop(e):
            rep.add("orient", (x, f"edge {e} is directed"))


def _rst_like(inst: Instance, klass: str) -> ClassReport:
    rep = ClassReport(klass)
    if inst.n <= 2:
        # members by fiat, as for DTS (every DTS graph without d is an RST graph)
        _connectivity(rep, inst)
        _fixed_edges(rep, inst)
        return rep
    _connectivity(rep, inst)
    if inst.fg is None or inst.fgs is not None:
        rep.add("2", (None, "exactly one specified face required"))
    for k, v in inst.marks.items():
        if k not in ("r", "s", "t"):
            rep.add("2", (v, f"mark {k} not allowed"))
    _fixed_edges(rep, inst)
    bv = inst.face_vertices(inst.fg)
    for k in ("r", "s", "t"):
        v = inst.marks.get(k)
        if v is None:
            continue
        if inst.degree(v) != 3:
            rep.add("3", (v, f"{k} has degree {inst.degree(v)}"))
        if v not in bv:
            rep.add("3", (v, f"{k} is off the boundary"))
    if klass == "RST":
        _allowed_threecuts(rep, inst, ("r", "s", "t"), "4")
    else:
        _separating_threecuts(rep, inst, ("r", "s", "t"), "4'")
    if inst.fg is not None:
        _paths(rep, inst, "5")
    return rep


def check_rst(inst: Instance) -> ClassReport:
    return _rst_like(inst, "RST")


def check_3rst(inst: Instance) -> ClassReport:
    return _rst_like(inst, "3RST")


def check_ft(inst: Instance) -> ClassReport:
    rep = ClassReport("FT")
    if inst.n <= 2:
        _connectivity(rep, inst)
        _orient_clause(rep, inst)
        return rep
    _connectivity(rep, inst)
    if inst.fg is None or inst.fgs is None:
        rep.add("2", (None, "two specified faces required"))
    for k, v in inst.marks.items():
        if k not in ("d", "t"):
            rep.add("2", (v, f"mark {k} not allowed"))
    if "d" in inst.marks and "t" in inst.marks:
        rep.add("2", (inst.marks["t"], "at most one of d and t may exist"))
    b1 = inst.face_vertices(inst.fg)
    b2 = inst.face_vertices(inst.fgs)
    if inst.fg is not None and inst.fgs is not None and not (b1 & b2):
        rep.add("3", (None, "specified faces share no vertex"))
    d = inst.d
    if d is not None:
        if inst.degree(d) not in (3, 4, 5):
            rep.add("4", (d, f"directed vertex has degree {inst.degree(d)}"))
        if d not in b1 or d not in b2:
            rep.add("4", (d, "directed vertex not on both boundaries"))
    t = inst.marks.get("t")
    if t is not None:
        if inst.degree(t) != 3:
            rep.add("5", (t, f"t has degree {inst.degree(t)}"))
        if t not in b1 and t not in b2:
            rep.add("5", (t, "t is off both boundaries"))
    _orient_clause(rep, inst)
    stars = {frozenset([v]) for k, v in inst.marks.items() if k in ("d", "t")}
    three = [c for c in cuts_upto3(inst) if c.size == 3]
    for c in three:
        if not (c.side in stars or c.rest in stars):
            rep.add("6", c)
    if len(three) > 1:
        rep.add("6", three[1])
    if inst.specified:
        _paths(rep, inst, "7")
    return rep


CHECKS: Dict[str, Callable[[Instance], ClassReport]] = {
    "DTS": check_dts,
    "3DTS": check_3dts,
    "RST": check_rst,
    "3RST": check_3rst,
    "FT": check_ft,
}


def check(inst: Instance, klass: str) -> ClassReport:
    try:
        fn = CHECKS[klass.upper()]
    except KeyError:
        raise ValueError(f"unknown class {klass!r}") from None
    return fn(inst)


def passing_classes(inst: Instance) -> List[str]:
    return [k for k in KLASSES if CHECKS[k](inst).passed]


def any_class(inst: Instance) -> bool:
    return any(CHECKS[k](inst).passed for k in KLASSES)
