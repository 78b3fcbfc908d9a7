"""Reduction-based solver.

Each step shrinks an instance into one or two children, solves them
recursively and glues their orientations back through the mutation remaps.
A step is only taken when every child it produces passes one of the class
checks (which all guarantee a valid orientation) and is strictly smaller in
the measure ``(|E|, |E| - deg(d))``. When no step applies, or a child turns
out unsolvable, the oracle decides the instance directly; every glued
orientation is verified before it is passed up.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import classes, cuts, oracle
from .graph import (Instance, InstanceError, OrientationError, Remap, chain, contract,
                    delete_edge, delete_vertex, lift, orient_vertex,
                    orient_vertex_choice, replace, residual, verify)

STEP_KINDS = ("Base", "ContractParallelAtD", "CutSplit", "ChordSplit", "OrientVertex",
              "DeleteBoundaryEdge", "LiftAndDelete")

Orientation = Dict[int, int]


@dataclass
class Step:
    kind: str
    params: Dict[str, object] = field(default_factory=dict)
    prepared: Optional["Application"] = field(default=None, repr=False, compare=False)


@dataclass
class Application:
    """Children are built in order; ``make_child(i, solutions_so_far)``.

    ``glue`` maps the list of child orientations to a parent orientation.
    """

    count: int
    make_child: Callable[[int, List[Orientation]], Instance]
    glue: Callable[[List[Orientation]], Orientation]
    first: Optional[Instance] = None

    @property
    def children(self) -> List[Instance]:
        """Children that exist before anything is solved."""
        return [self.first] if self.first is not None else []


@dataclass
class TraceNode:
    kind: str
    measure: Tuple[int, int]
    params: Dict[str, object] = field(default_factory=dict)
    children: List["TraceNode"] = field(default_factory=list)
    fallback: Optional[str] = None

    def lines(self, depth: int = 0) -> List[str]:
        e, u = self.measure
        tag = f" fallback={self.fallback}" if self.fallback else ""
        out = ["  " * depth + f"step {self.kind} measure=({e},{u}){tag}"]
        for c in self.children:
            out.extend(c.lines(depth + 1))
        return out

    def dump(self) -> str:
        return "\n".join(self.lines()) + "\n"

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def decreasing(self) -> bool:
        """Every child strictly below its parent in lexicographic order."""
        return all(c.measure < n.measure for n in self.walk() for c in n.children)


@dataclass
class ReduceResult:
    result: str
    orientation: Optional[Orientation]
    trace: TraceNode

    @property
    def sat(self) -> bool:
        return self.result == "SAT"


@dataclass
class Config:
    """``fallback=False`` turns a failed reduction into :class:`ReductionFailed`
    instead of handing the instance to the oracle. Instances within the
    vertex budget, and those no step applies to, are oracle leaves either way."""

    oracle_vertex_budget: int = 12
    cut_kmax: int = 5
    fallback: bool = True


class ReductionFailed(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# guards and helpers


def _fits(parent: Instance, child: Instance) -> bool:
    return child.measure() < parent.measure() and classes.any_class(child)


def _single(parent: Instance, child: Instance, remap, base: Orientation) -> Application:
    def make(i, sols):
        return child

    def glue(sols):
        o = dict(base)
        o.update(remap.pullback(sols[0]))
        return o

    return Application(1, make, glue, child)


def _crossing(inst: Instance, S) -> List[int]:
    S = set(S)
    return [e for e, (a, b) in inst.ends.items() if (a in S) != (b in S)]


def _inside(inst: Instance, S) -> List[int]:
    S = set(S)
    return [e for e, (a, b) in inst.ends.items() if a in S and b in S]


def _connected(inst: Instance, S) -> bool:
    S = set(S)
    if not S:
        return False
    start = min(S)
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for e in inst.incident[x]:
            y = inst.other_end(e, x)
            if y in S and y not in seen:
                seen.add(y)
                stack.append(y)
    return seen == S


def _mark_options(inst: Instance, child: Instance, v: int) -> List[Optional[str]]:
    opts: List[Optional[str]] = [None]
    if child.degree(v) == 3:
        used = set(child.marks)
        opts += [k for k in ("t", "s", "r") if k not in used]
    return opts


def _contract_marked(inst: Instance, S) -> Optional[Tuple[Instance, Remap]]:
    """Contract ``S``; a resulting degree-3 vertex may take a free mark.
    Returns the first variant that passes a class check."""
    try:
        child, remap = contract(inst, S)
    except InstanceError:
        return None
    root = min(S)
    for name in _mark_options(inst, child, root):
        cand = child
        if name is not None:
            try:
                cand = replace(child, marks={**child.marks, name: root})
            except InstanceError:
                continue
        if _fits(inst, cand):
            return cand, remap
    return None


def _two_phase(inst: Instance, Q: set, P: set, mid: Optional[int] = None,
               far: Optional[int] = None) -> Optional[Application]:
    """Solve ``G / Q`` first, then ``G / P`` with the merged vertex directed.

    ``mid`` (in both ``P`` and ``Q``) is oriented between the phases; oriented
    parallel edges between the new directed vertex and ``far`` may be
    deleted (folded into the prescriptions) to bring it into a class.
    """
    got = _contract_marked(inst, Q)
    if got is None:
        return None
    child1, r1 = got
    if not _connected(inst, P):
        return None

    def phase2(tails: Orientation):
        fixed = replace(inst, tail=tails)
        child2, r2 = contract(fixed, P, mark="d")
        steps = [r2]
        root = min(P)
        while True:
            if _fits(inst, child2):
                return child2, chain(*steps)
            if far is None or child2.degree(root) <= 3:
                return child2, chain(*steps)
            par = [e for e in child2.incident[root]
                   if child2.other_end(e, root) == far]
            if not par:
                return child2, chain(*steps)
            child2, rd = delete_edge(child2, min(par))
            steps.append(rd)

    # guard phase 2 with a stand-in orientation of the crossing edges
    try:
        raw, _ = contract(inst, P)
        dummy_choice = orient_vertex_choice(raw, min(P))
        tails = dict(inst.tail)
        for e, x in dummy_choice.items():
            a, b = inst.ends[e]
            tails[e] = a if (x == min(P)) == (a in P) else b
        if mid is not None:
            ch = orient_vertex_choice(replace(inst, tail=tails), mid)
            tails.update(ch)
        dummy2, _ = phase2(tails)
    except InstanceError:
        return None
    if not _fits(inst, dummy2):
        return None

    state: Dict[str, object] = {}

    def make(i, sols):
        if i == 0:
            return child1
        o1 = r1.pullback(sols[0])
        tails = dict(inst.tail)
        for e in _crossing(inst, P) + _inside(inst, P):
            if e in o1:
                tails[e] = o1[e]
        choice: Orientation = {}
        if mid is not None:
            choice = orient_vertex_choice(replace(inst, tail=tails), mid)
            tails.update(choice)
        child2, r2 = phase2(tails)
        state["o1"], state["choice"], state["r2"] = o1, choice, r2
        return child2

    def glue(sols):
        o = dict(inst.tail)
        o.update(state["o1"])
        o.update(state["choice"])
        o.update(state["r2"].pullback(sols[1]))
        return o

    return Application(2, make, glue, child1)


# ---------------------------------------------------------------------------
# individual steps


def _try_base(inst: Instance, cfg: Config) -> Optional[Step]:
    if not inst.unoriented():
        return Step("Base")
    return None


def _try_contract_parallel(inst: Instance, cfg: Config) -> Optional[Step]:
    d = inst.d
    if d is None:
        return None
    mult: Dict[int, int] = {}
    for e in set(inst.incident[d]):
        if inst.is_loop(e):
            continue
        v = inst.other_end(e, d)
        mult[v] = mult.get(v, 0) + 1
    for v in sorted(mult):
        if v in inst.marks.values():
            continue
        if not ((mult[v] >= 2 and inst.degree(v) <= 4) or inst.degree(v) <= 3):
            continue
        try:
            choice = orient_vertex_choice(inst, v)
            oriented = replace(inst, tail={**inst.tail, **choice})
            child, remap = contract(oriented, {d, v}, mark="d")
        except InstanceError:
            continue
        if _fits(inst, child):
            app = _single(inst, child, remap, {**inst.tail, **choice})
            return Step("ContractParallelAtD", {"v": v}, app)
    return None


def _try_cut_split(inst: Instance, cfg: Config) -> Optional[Step]:
    d = inst.d
    for c in cuts.enumerate_cuts(inst, cfg.cut_kmax, robust=2, anchor=d):
        if c.size < 3:
            continue
        sides = [c.side_of(d)] if d is not None else [c.side, c.rest]
        for A in sides:
            Y = set(inst.vertices) - set(A)
            if not _connected(inst, A) or not _connected(inst, Y):
                continue
            app = _two_phase(inst, Y, set(A))
            if app is not None:
                return Step("CutSplit", {"side": tuple(sorted(A)), "size": c.size}, app)
    return None


def _boundary_walk(inst: Instance, h: int) -> List[int]:
    return [inst.dart_vertex(x) for x in inst.faces[h]]


def _try_chord_split(inst: Instance, cfg: Config) -> Optional[Step]:
    if inst.fg is None:
        return None
    walk = _boundary_walk(inst, inst.fg)
    bE = inst.face_edges(inst.fg)
    bV = set(walk)
    d = inst.d
    for e in sorted(inst.ends):
        if e in bE or inst.is_loop(e):
            continue
        a, b = inst.ends[e]
        if a not in bV or b not in bV:
            continue
        for u, v in ((a, b), (b, a)):
            if u == d or v == d or inst.degree(u) > 4:
                continue
            if walk.count(u) != 1 or walk.count(v) != 1:
                continue
            i, j = walk.index(u), walk.index(v)
            k = len(walk)
            arc1 = [walk[(i + t) % k] for t in range(1, (j - i) % k)]
            arc2 = [walk[(j + t) % k] for t in range(1, (i - j) % k)]
            if not arc1 or not arc2:
                continue
            comp = _components_without(inst, {u, v})
            c1 = {comp[x] for x in arc1}
            c2 = {comp[x] for x in arc2}
            if len(c1) != 1 or len(c2) != 1 or c1 == c2:
                continue
            if set(comp.values()) != c1 | c2:
                continue
            side1 = {x for x, c in comp.items() if c in c1}
            side2 = {x for x, c in comp.items() if c in c2}
            for H_int, K_int in ((side1, side2), (side2, side1)):
                if d is not None and d not in H_int:
                    continue
                if inst.fgs is not None and not (inst.face_vertices(inst.fgs) - {u, v}) <= H_int:
                    continue
                app = _two_phase(inst, K_int | {u, v}, H_int | {u}, mid=u, far=v)
                if app is not None:
                    return Step("ChordSplit", {"chord": e, "u": u, "v": v}, app)
    return None


def _components_without(inst: Instance, removed: set) -> Dict[int, int]:
    comp: Dict[int, int] = {}
    for s in inst.vertices:
        if s in removed or s in comp:
            continue
        comp[s] = s
        stack = [s]
        while stack:
            x = stack.pop()
            for e in inst.incident[x]:
                y = inst.other_end(e, x)
                if y not in removed and y not in comp:
                    comp[y] = s
                    stack.append(y)
    return comp


def _try_orient_vertex(inst: Instance, cfg: Config) -> Optional[Step]:
    if inst.d is not None or inst.fg is None:
        return None
    if inst.fgs is not None:
        pool = inst.face_vertices(inst.fg) & inst.face_vertices(inst.fgs)
    else:
        pool = inst.face_vertices(inst.fg)
    for v in sorted(pool, key=lambda x: (inst.degree(x), x)):
        if inst.degree(v) > 5 or inst.degree(v) == 0:
            continue
        try:
            child = orient_vertex(inst, v, mark_d=True)
        except InstanceError:
            continue
        if _fits(inst, child):
            ident = Remap(dict(inst.ends), {x: x for x in inst.vertices}, {e: e for e in inst.ends})
            app = _single(inst, child, ident, dict(child.tail))
            return Step("OrientVertex", {"v": v}, app)
    return None


def _try_delete_boundary_edge(inst: Instance, cfg: Config) -> Optional[Step]:
    if inst.fg is None:
        return None
    bE = sorted(inst.boundary_edges())
    d = inst.d

    def key(e):
        a, b = inst.ends[e]
        at_d = d is not None and d in (a, b)
        return (0 if at_d else 1, min(inst.degree(a), inst.degree(b)), e)

    for e in sorted(bE, key=key):
        if inst.is_loop(e):
            continue
        try:
            child, remap = delete_edge(inst, e)
        except InstanceError:
            continue
        if _fits(inst, child):
            return Step("DeleteBoundaryEdge", {"edge": e}, _single(inst, child, remap, {}))
    return None


def _try_lift_and_delete(inst: Instance, cfg: Config) -> Optional[Step]:
    if inst.fg is None:
        return None
    bE = inst.face_edges(inst.fg)
    marked = set(inst.marks.values())
    for u in inst.face_vertices(inst.fg):
        if u in marked:
            continue
        rot = inst.rotation[u]
        k = len(rot)
        for i in range(k):
            for j in ((i + 1) % k, (i - 1) % k):
                e1, e2 = rot[i] >> 1, rot[j] >> 1
                if e1 == e2 or e1 not in bE or e2 in bE:
                    continue
                if e1 in inst.tail or e2 in inst.tail or inst.is_loop(e1) or inst.is_loop(e2):
                    continue
                try:
                    lifted, r1 = lift(inst, e1, e2)
                except InstanceError:
                    continue
                variants = []
                try:
                    gone, r2 = delete_vertex(lifted, u)
                    variants.append((gone, chain(r1, r2)))
                except InstanceError:
                    pass
                variants.append((lifted, r1))
                for child, remap in variants:
                    if _fits(inst, child):
                        return Step("LiftAndDelete", {"e1": e1, "e2": e2, "u": u},
                                    _single(inst, child, remap, {}))
    return None


_FINDERS = (
    _try_base,
    _try_contract_parallel,
    _try_cut_split,
    _try_chord_split,
    _try_orient_vertex,
    _try_delete_boundary_edge,
    _try_lift_and_delete,
)


def find_step(inst: Instance, config: Optional[Config] = None) -> Optional[Step]:
    """First applicable step in precedence order, with its guard checked."""
    cfg = config or Config()
    for finder in _FINDERS:
        step = finder(inst, cfg)
        if step is not None:
            return step
    return None


def apply(inst: Instance, step: Step) -> Application:
    if step.kind == "Base":
        def glue(sols):
            return dict(inst.tail)
        return Application(0, lambda i, s: None, glue)
    if step.prepared is None:
        raise ValueError("step was not produced by find_step for this instance")
    return step.prepared


# ---------------------------------------------------------------------------
# driver


def _oracle_leaf(inst: Instance, fallback: Optional[str] = None):
    st = oracle.solve(inst)
    node = TraceNode("Oracle", inst.measure(), {}, [], fallback)
    return (st.orientation if st.sat else None), node


def _solve(inst: Instance, cfg: Config):
    if inst.n <= cfg.oracle_vertex_budget:
        return _oracle_leaf(inst)
    step = find_step(inst, cfg)
    if step is None:
        return _oracle_leaf(inst, "no-step")
    node = TraceNode(step.kind, inst.measure(), dict(step.params))
    if step.kind == "Base":
        o = dict(inst.tail)
        if verify(inst, o).valid:
            return o, node
        o, leaf = _oracle_leaf(inst, "base-invalid")
        node.children.append(leaf)
        return o, node
    app = apply(inst, step)
    sols: List[Orientation] = []
    for i in range(app.count):
        child = app.make_child(i, sols)
        o, sub = _solve(child, cfg)
        node.children.append(sub)
        if o is None:
            if not cfg.fallback:
                raise ReductionFailed(f"{step.kind} produced an unsolvable child")
            o2, leaf = _oracle_leaf(inst, "child-unsat")
            node.fallback = "child-unsat"
            return o2, node
        sols.append(o)
    o = app.glue(sols)
    try:
        ok = verify(inst, o).valid
    except OrientationError:
        ok = False
    if not ok:
        if not cfg.fallback:
            raise ReductionFailed(f"{step.kind} glued an invalid orientation")
        o2, _ = _oracle_leaf(inst, "glue")
        node.fallback = "glue"
        return o2, node
    return o, node


def reduce_solve(inst: Instance, config: Optional[Config] = None,
                 oracle_vertex_budget: Optional[int] = None) -> ReduceResult:
    """Solve by reductions; instances within the vertex budget go to the oracle."""
    cfg = config or Config()
    if oracle_vertex_budget is not None:
        cfg = Config(oracle_vertex_budget, cfg.cut_kmax, cfg.fallback)
    o, trace = _solve(inst, cfg)
    if o is None:
        return ReduceResult("UNSAT", None, trace)
    return ReduceResult("SAT", o, trace)
