"""Embedded planar multigraphs with Z3 prescriptions and partial orientations.

An edge ``e`` owns darts ``2e`` and ``2e + 1``; dart ``2e`` leaves
``ends[e][0]`` and dart ``2e + 1`` leaves ``ends[e][1]``. For a loop both
darts sit at the same vertex. ``rotation[v]`` lists the darts at ``v`` in
counterclockwise order and faces are the orbits of
``phi(x) = rot_next(twin(x))``. A face is named by its handle, the smallest
dart on its orbit.

Instances are immutable. Every mutation returns a fresh instance together
with a :class:`Remap` that pulls child orientations back to the parent.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

MARK_NAMES = ("d", "t", "s", "r")


class InstanceError(ValueError):
    """Malformed instance description."""


class NotPlanarError(InstanceError):
    pass


class PrescriptionError(InstanceError):
    pass


class OrientationError(InstanceError):
    """An orientation conflicts with the instance (fixed edges, endpoints)."""


def z3(x: int) -> int:
    """Normalize an integer to the representative in {-1, 0, 1}."""
    return (x + 1) % 3 - 1


def twin(x: int) -> int:
    return x ^ 1


@dataclass(frozen=True, eq=False)
class Instance:
    vertices: Tuple[int, ...]
    ends: Dict[int, Tuple[int, int]]
    rotation: Dict[int, Tuple[int, ...]]
    p: Dict[int, int]
    tail: Dict[int, int] = field(default_factory=dict)
    fg: Optional[int] = None
    fgs: Optional[int] = None
    marks: Dict[str, int] = field(default_factory=dict)

    # -- basic structure -------------------------------------------------

    @property
    def edges(self) -> List[int]:
        return sorted(self.ends)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.ends)

    def dart_vertex(self, x: int) -> int:
        return self.ends[x >> 1][x & 1]

    def other_end(self, e: int, v: int) -> int:
        a, b = self.ends[e]
        return b if a == v else a

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    def is_loop(self, e: int) -> bool:
        a, b = self.ends[e]
        return a == b

    @cached_property
    def incident(self) -> Dict[int, Tuple[int, ...]]:
        """Edges at each vertex in rotation order (a loop appears twice)."""
        return {v: tuple(x >> 1 for x in self.rotation[v]) for v in self.vertices}

    @cached_property
    def rot_next(self) -> Dict[int, int]:
        nxt = {}
        for darts in self.rotation.values():
            k = len(darts)
            for i, x in enumerate(darts):
                nxt[x] = darts[(i + 1) % k]
        return nxt

    @cached_property
    def rot_prev(self) -> Dict[int, int]:
        return {b: a for a, b in self.rot_next.items()}

    def phi(self, x: int) -> int:
        return self.rot_next[x ^ 1]

    @cached_property
    def faces(self) -> Dict[int, Tuple[int, ...]]:
        """Face handle -> darts of the orbit in traversal order."""
        out = {}
        seen = set()
        nxt = self.rot_next
        for x in sorted(nxt):
            if x in seen:
                continue
            orbit = []
            y = x
            while y not in seen:
                seen.add(y)
                orbit.append(y)
                y = nxt[y ^ 1]
            out[x] = tuple(orbit)
        return out

    @cached_property
    def face_of(self) -> Dict[int, int]:
        return {x: h for h, orbit in self.faces.items() for x in orbit}

    def face_darts(self, handle: Optional[int]) -> frozenset:
        if handle is None:
            return frozenset()
        return frozenset(self.faces[handle])

    def face_vertices(self, handle: Optional[int]) -> frozenset:
        return frozenset(self.dart_vertex(x) for x in self.face_darts(handle))

    def face_edges(self, handle: Optional[int]) -> frozenset:
        return frozenset(x >> 1 for x in self.face_darts(handle))

    @cached_property
    def components(self) -> List[Tuple[int, ...]]:
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.ends.values():
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        groups: Dict[int, List[int]] = {}
        for v in self.vertices:
            groups.setdefault(find(v), []).append(v)
        return [tuple(g) for _, g in sorted(groups.items())]

    @property
    def is_connected(self) -> bool:
        return len(self.components) <= 1

    def face_count(self) -> int:
        """Faces of the plane drawing (isolated vertices share the outer region)."""
        comp = {v: i for i, c in enumerate(self.components) for v in c}
        orbits: Dict[int, int] = {}
        for h in self.faces:
            c = comp[self.dart_vertex(h)]
            orbits[c] = orbits.get(c, 0) + 1
        return 1 + sum(k - 1 for k in orbits.values())

    def euler_ok(self) -> bool:
        return self.n - self.m + self.face_count() == 1 + len(self.components)

    # -- specified faces and marks --------------------------------------

    @property
    def specified(self) -> List[int]:
        return [h for h in (self.fg, self.fgs) if h is not None]

    def boundary_vertices(self) -> frozenset:
        out = frozenset()
        for h in self.specified:
            out = out | self.face_vertices(h)
        return out

    def boundary_edges(self) -> frozenset:
        out = frozenset()
        for h in self.specified:
            out = out | self.face_edges(h)
        return out

    def mark(self, name: str) -> Optional[int]:
        return self.marks.get(name)

    @property
    def d(self) -> Optional[int]:
        return self.marks.get("d")

    def unoriented(self) -> List[int]:
        return [e for e in sorted(self.ends) if e not in self.tail]

    def measure(self) -> Tuple[int, int]:
        """Progress measure (|E|, |E| - deg(d)); deg(d) is 0 without d."""
        d = self.d
        return (self.m, self.m - (self.degree(d) if d is not None else 0))

    def __repr__(self):
        return (f"Instance(n={self.n}, m={self.m}, marks={self.marks}, "
                f"fg={self.fg}, fgs={self.fgs})")


# ---------------------------------------------------------------------------
# construction


def _check_and_canonicalize(inst: Instance, check_prescription: bool = True) -> Instance:
    vs = set(inst.vertices)
    if len(vs) != len(inst.vertices):
        raise InstanceError("duplicate vertex id")
    for e, (a, b) in inst.ends.items():
        if a not in vs or b not in vs:
            raise InstanceError(f"edge {e} has an unknown endpoint")
    expected: Dict[int, List[int]] = {v: [] for v in vs}
    for e, (a, b) in inst.ends.items():
        expected[a].append(2 * e)
        expected[b].append(2 * e + 1)
    if set(inst.rotation) != vs:
        raise InstanceError("rotation must list every vertex exactly once")
    for v in vs:
        rot = inst.rotation[v]
        if len(set(rot)) != len(rot):
            raise InstanceError(f"rotation at vertex {v} repeats a dart")
        if sorted(rot) != sorted(expected[v]):
            raise InstanceError(f"rotation at vertex {v} does not match its incident darts")
    for v in vs:
        if v not in inst.p:
            raise PrescriptionError(f"vertex {v} has no prescription")
        if inst.p[v] not in (-1, 0, 1):
            raise PrescriptionError(f"prescription of vertex {v} must be -1, 0 or 1")
    if check_prescription and sum(inst.p[v] for v in vs) % 3 != 0:
        raise PrescriptionError("invalid prescription: values must sum to 0 mod 3")
    for e, x in inst.tail.items():
        if e not in inst.ends:
            raise OrientationError(f"orientation names unknown edge {e}")
        if x not in inst.ends[e]:
            raise OrientationError(f"tail {x} is not an endpoint of edge {e}")
    seen_marks = set()
    for name, v in inst.marks.items():
        if name not in MARK_NAMES:
            raise InstanceError(f"unknown mark {name!r}")
        if v not in vs:
            raise InstanceError(f"mark {name} names unknown vertex {v}")
        if v in seen_marks:
            raise InstanceError(f"vertex {v} carries two marks")
        seen_marks.add(v)
    for h in (inst.fg, inst.fgs):
        if h is not None and (h >> 1) not in inst.ends:
            raise InstanceError(f"face handle {h} is not a dart")
    # canonical rotation start: smallest dart first
    rot = {}
    for v in sorted(vs):
        darts = inst.rotation[v]
        if darts:
            i = darts.index(min(darts))
            darts = tuple(darts[i:]) + tuple(darts[:i])
        rot[v] = tuple(darts)
    out = Instance(
        vertices=tuple(sorted(vs)),
        ends=dict(sorted(inst.ends.items())),
        rotation=rot,
        p={v: inst.p[v] for v in sorted(vs)},
        tail=dict(sorted(inst.tail.items())),
        fg=None,
        fgs=None,
        marks=dict(inst.marks),
    )
    for comp in out.components:
        cv = set(comp)
        ce = [e for e, (a, _) in out.ends.items() if a in cv]
        if not ce:
            continue
        orbits = sum(1 for h in out.faces if out.dart_vertex(h) in cv)
        if len(cv) - len(ce) + orbits != 2:
            raise NotPlanarError("rotation system is not planar (Euler check fails)")
    fg = out.face_of[inst.fg] if inst.fg is not None else None
    fgs = out.face_of[inst.fgs] if inst.fgs is not None else None
    if fgs is not None and fg == fgs:
        raise InstanceError("the two specified faces coincide")
    object.__setattr__(out, "fg", fg)
    object.__setattr__(out, "fgs", fgs)
    d = out.marks.get("d")
    if d is not None:
        for e in out.incident[d]:
            if e not in out.tail:
                raise OrientationError(f"directed vertex {d} has unoriented edge {e}")
        if residual(out, d) != out.p[d]:
            raise OrientationError(
                f"residual at directed vertex {d} does not match its prescription")
    return out


def dart_of(ends: Mapping[int, Tuple[int, int]], e: int, v: int, occurrence: int = 1) -> int:
    """Dart of edge ``e`` leaving ``v``; ``occurrence`` picks a loop's dart."""
    if e not in ends:
        raise InstanceError(f"unknown edge {e}")
    a, b = ends[e]
    if a == b == v:
        if occurrence not in (1, 2):
            raise InstanceError("loop dart occurrence must be 1 or 2")
        return 2 * e + occurrence - 1
    if v == a:
        return 2 * e
    if v == b:
        return 2 * e + 1
    raise InstanceError(f"vertex {v} is not an endpoint of edge {e}")


def build(
    vertices: Mapping[int, int],
    edges: Mapping[int, Tuple[int, int]],
    rotation: Mapping[int, Sequence[int]],
    orient: Optional[Mapping[int, int]] = None,
    fg: Optional[Tuple[int, ...]] = None,
    fgs: Optional[Tuple[int, ...]] = None,
    marks: Optional[Mapping[str, int]] = None,
    check_prescription: bool = True,
) -> Instance:
    """Build a validated instance from an edge-level rotation description.

    ``vertices`` maps vertex id to prescription, ``edges`` maps edge id to
    ``(u, v)``, and ``rotation`` lists the edges at each vertex
    counterclockwise (a loop twice; its first occurrence is dart ``2e``).
    ``fg``/``fgs`` name a face by ``(edge, vertex)`` or
    ``(edge, vertex, occurrence)`` for loops.
    """
    ends = {int(e): (int(a), int(b)) for e, (a, b) in edges.items()}
    rot: Dict[int, Tuple[int, ...]] = {}
    for v, elist in rotation.items():
        darts = []
        seen_loop: Dict[int, int] = {}
        for e in elist:
            if e not in ends:
                raise InstanceError(f"rotation at vertex {v} names unknown edge {e}")
            a, b = ends[e]
            if a == b == v:
                k = seen_loop.get(e, 0)
                if k >= 2:
                    raise InstanceError(f"loop {e} appears more than twice at vertex {v}")
                seen_loop[e] = k + 1
                darts.append(2 * e + k)
            elif v == a:
                darts.append(2 * e)
            elif v == b:
                darts.append(2 * e + 1)
            else:
                raise InstanceError(f"edge {e} is not incident with vertex {v}")
        rot[int(v)] = tuple(darts)
    for v in vertices:
        rot.setdefault(int(v), ())

    def handle(spec):
        if spec is None:
            return None
        return dart_of(ends, *spec)

    raw = Instance(
        vertices=tuple(int(v) for v in vertices),
        ends=ends,
        rotation=rot,
        p={int(v): int(x) for v, x in vertices.items()},
        tail={int(e): int(x) for e, x in (orient or {}).items()},
        fg=handle(fg),
        fgs=handle(fgs),
        marks=dict(marks or {}),
    )
    return _check_and_canonicalize(raw, check_prescription)


def replace(inst: Instance, check_prescription: bool = True, **changes) -> Instance:
    """Copy ``inst`` with some fields changed, re-validating the result."""
    fields = dict(
        vertices=inst.vertices, ends=inst.ends, rotation=inst.rotation, p=inst.p,
        tail=inst.tail, fg=inst.fg, fgs=inst.fgs, marks=inst.marks,
    )
    fields.update(changes)
    return _check_and_canonicalize(Instance(**fields), check_prescription)


# ---------------------------------------------------------------------------
# orientations


def residual(inst: Instance, v: int, o: Optional[Mapping[int, int]] = None) -> int:
    """(in - out) at ``v`` over oriented non-loop edges, in {-1, 0, 1}."""
    if v not in inst.rotation:
        raise InstanceError(f"unknown vertex {v}")
    o = inst.tail if o is None else o
    r = 0
    for x in inst.rotation[v]:
        e = x >> 1
        a, b = inst.ends[e]
        if a == b or e not in o:
            continue
        r += -1 if o[e] == v else 1
    return z3(r)


@dataclass
class VerifyReport:
    valid: bool
    offenders: List[Tuple[int, int, int]]  # (vertex, residual, prescription)

    def __bool__(self):
        return self.valid


def check_orientation(inst: Instance, o: Mapping[int, int], total: bool = True) -> None:
    for e, x in o.items():
        if e not in inst.ends:
            raise OrientationError(f"orientation names unknown edge {e}")
        if x not in inst.ends[e]:
            raise OrientationError(f"tail {x} is not an endpoint of edge {e}")
    for e, x in inst.tail.items():
        if e in o and o[e] != x and not inst.is_loop(e):
            raise OrientationError(f"edge {e} disagrees with its fixed direction")
    if total:
        missing = [e for e in inst.ends if e not in o]
        if missing:
            raise OrientationError(f"orientation leaves edge {missing[0]} undirected")


def verify(inst: Instance, o: Mapping[int, int]) -> VerifyReport:
    check_orientation(inst, o)
    bad = []
    for v in inst.vertices:
        r = residual(inst, v, o)
        if r != inst.p[v]:
            bad.append((v, r, inst.p[v]))
    return VerifyReport(not bad, bad)


def reverse(inst: Instance) -> Instance:
    """Negate the prescription and reverse every fixed edge."""
    tail = {e: inst.other_end(e, x) for e, x in inst.tail.items()}
    return replace(inst, p={v: z3(-x) for v, x in inst.p.items()}, tail=tail)


def vertex_choices(inst: Instance, v: int) -> List[Dict[int, int]]:
    """All ways to direct the free edges at ``v`` so that ``p(v)`` holds.

    Unoriented loops get tail ``v``. Choices are listed with the inward set
    in lexicographic order of sorted edge ids.
    """
    from itertools import combinations

    free = sorted({e for e in inst.incident[v] if e not in inst.tail and not inst.is_loop(e)})
    loops = sorted({e for e in inst.incident[v] if e not in inst.tail and inst.is_loop(e)})
    r0 = residual(inst, v)
    k = len(free)
    out = []
    for a in range(k + 1):
        if z3(r0 + 2 * a - k) != inst.p[v]:
            continue
        for inward in combinations(free, a):
            ins = set(inward)
            ch = {e: (inst.other_end(e, v) if e in ins else v) for e in free}
            ch.update({e: v for e in loops})
            out.append(ch)
    return out


def orient_vertex_choice(inst: Instance, v: int) -> Dict[int, int]:
    """Deterministic orientation of ``v``: the first ``a`` free edges by id point
    inward where ``a`` is the smallest count meeting ``p(v)``."""
    free = sorted({e for e in inst.incident[v] if e not in inst.tail and not inst.is_loop(e)})
    loops = sorted({e for e in inst.incident[v] if e not in inst.tail and inst.is_loop(e)})
    r0 = residual(inst, v)
    k = len(free)
    for a in range(k + 1):
        if z3(r0 + 2 * a - k) == inst.p[v]:
            ch = {e: inst.other_end(e, v) for e in free[:a]}
            ch.update({e: v for e in free[a:]})
            ch.update({e: v for e in loops})
            return ch
    raise OrientationError(f"vertex {v} cannot meet its prescription")


def orient_vertex(inst: Instance, v: int, choice: Optional[Mapping[int, int]] = None,
                  mark_d: bool = False) -> Instance:
    """Fix the directions at ``v`` (optionally marking it as the directed vertex)."""
    choice = orient_vertex_choice(inst, v) if choice is None else dict(choice)
    tail = dict(inst.tail)
    tail.update(choice)
    marks = dict(inst.marks)
    if mark_d:
        if marks.get("d") not in (None, v):
            raise InstanceError("instance already has a directed vertex")
        marks = {k: x for k, x in marks.items() if x != v}
        marks["d"] = v
    return replace(inst, tail=tail, marks=marks)


# ---------------------------------------------------------------------------
# remaps


@dataclass
class Remap:
    """Pull-back data from a child instance to its parent.

    ``vmap`` sends parent vertices to child vertices (absent when deleted),
    ``kept`` sends child edges to the parent edge they continue,
    ``lifted`` sends a child edge to ``(e1, e2, u, v, w)`` for the parent
    path ``u -e1- v -e2- w`` it replaced, and ``fixed`` holds parent edge
    directions decided by the mutation itself.
    """

    parent_ends: Dict[int, Tuple[int, int]]
    vmap: Dict[int, int]
    kept: Dict[int, int]
    lifted: Dict[int, Tuple[int, int, int, int, int]] = field(default_factory=dict)
    fixed: Dict[int, int] = field(default_factory=dict)
    notes: Tuple[str, ...] = ()

    def pullback(self, child: Mapping[int, int]) -> Dict[int, int]:
        out = dict(self.fixed)
        for ce, x in child.items():
            if ce in self.kept:
                pe = self.kept[ce]
                a, b = self.parent_ends[pe]
                if a == b:
                    out[pe] = a
                elif self.vmap.get(a) == x:
                    out[pe] = a
                else:
                    out[pe] = b
            elif ce in self.lifted:
                e1, e2, u, v, w = self.lifted[ce]
                if x == u:
                    out[e1], out[e2] = u, v
                else:
                    out[e2], out[e1] = w, v
        return out


@dataclass
class RemapChain:
    """Composition: ``steps[0]`` maps the original to the first child, and so on."""

    steps: List[Remap]

    def pullback(self, child: Mapping[int, int]) -> Dict[int, int]:
        o = dict(child)
        for r in reversed(self.steps):
            o = r.pullback(o)
        return o


def _identity_remap(inst: Instance) -> Remap:
    return Remap(dict(inst.ends), {v: v for v in inst.vertices}, {e: e for e in inst.ends})


def chain(*remaps) -> RemapChain:
    steps: List[Remap] = []
    for r in remaps:
        steps.extend(r.steps if isinstance(r, RemapChain) else [r])
    return RemapChain(steps)


# ---------------------------------------------------------------------------
# face-rule predictions
#
# Each predictor works on the parent's traced faces with dart-set algebra
# only; the mutation itself re-traces the child. Tests compare the two.


@dataclass
class FacePrediction:
    fg: Optional[frozenset]
    fgs: Optional[frozenset]
    fg_free: bool = False   # specified face vanished; choose one at the contraction vertex
    fgs_free: bool = False


def _merge_prediction(inst: Instance, groups: List[set], removed: set) -> FacePrediction:
    """Faces in each group merge into one; ``removed`` darts disappear.

    The first group containing F_G decides the new F_G; if F_G* lies in the
    same group it stops being specified.
    """
    def merged_for(h):
        for g in groups:
            if h in g:
                return g
        return {h}

    fg = fgs = None
    fg_free = fgs_free = False
    if inst.fg is not None:
        g = merged_for(inst.fg)
        fg = frozenset(x for h in g for x in inst.faces[h]) - removed
        if inst.fgs is not None and inst.fgs in g:
            return FacePrediction(fg or None, None, not fg, False)
        if not fg:
            fg, fg_free = None, True
    if inst.fgs is not None:
        g = merged_for(inst.fgs)
        fgs = frozenset(x for h in g for x in inst.faces[h]) - removed
        if not fgs:
            fgs, fgs_free = None, True
    return FacePrediction(fg, fgs, fg_free, fgs_free)


def predict_delete_edge(inst: Instance, e: int) -> FacePrediction:
    """Deleting a boundary edge merges its two faces (one specified face remains
    when the edge separated F_G from F_G*)."""
    f1, f2 = inst.face_of[2 * e], inst.face_of[2 * e + 1]
    return _merge_prediction(inst, [{f1, f2}], {2 * e, 2 * e + 1})


def predict_delete_vertex(inst: Instance, v: int) -> FacePrediction:
    """F_G absorbs every face incident with ``v``, minus the darts at ``v``."""
    removed = set()
    for x in inst.rotation[v]:
        removed |= {x, x ^ 1}
    group = {inst.face_of[x] for x in removed}
    return _merge_prediction(inst, [group], removed)


def predict_contract(inst: Instance, S: Iterable[int]) -> FacePrediction:
    """Darts of edges inside ``S`` leave every face; a specified face lying
    entirely inside ``S`` vanishes and is re-chosen at the new vertex."""
    S = set(S)
    removed = set()
    for e, (a, b) in inst.ends.items():
        if a in S and b in S:
            removed |= {2 * e, 2 * e + 1}
    return _merge_prediction(inst, [], removed)


def _lift_darts(inst: Instance, e1: int, e2: int):
    """Shared lift bookkeeping: (v, u, w, a, b, corner_first) where ``a``/``b``
    are the darts of e1/e2 at v and ``corner_first`` says rot_next(a) == b."""
    ends1, ends2 = set(inst.ends[e1]), set(inst.ends[e2])
    common = ends1 & ends2
    if inst.is_loop(e1) or inst.is_loop(e2) or e1 == e2:
        raise InstanceError("lift needs two distinct non-loop edges")
    cands = []
    for v in sorted(common):
        a = dart_of(inst.ends, e1, v)
        b = dart_of(inst.ends, e2, v)
        if inst.rot_next[a] == b or inst.rot_next[b] == a:
            cands.append((v, a, b))
    if not cands:
        raise InstanceError(f"edges {e1} and {e2} are not consecutive at a common vertex")
    v, a, b = cands[0]
    u = inst.other_end(e1, v)
    w = inst.other_end(e2, v)
    return v, u, w, a, b, inst.rot_next[a] == b


def predict_lift(inst: Instance, e1: int, e2: int) -> FacePrediction:
    """The corner face between e1 and e2 takes the new edge in place of the
    pair; the two faces on the far sides merge through the other new dart."""
    v, u, w, a, b, ab = _lift_darts(inst, e1, e2)
    n = max(inst.ends) + 1
    nu, nw = 2 * n, 2 * n + 1
    ap, bp = a ^ 1, b ^ 1
    subst: Dict[int, Dict[str, set]] = {}
    ncorner = 0

    def corner(h, drop, add):
        s = subst.setdefault(h, {"drop": set(), "add": set()})
        s["drop"] |= drop
        s["add"] |= add

    if inst.rot_next[a] == b:
        corner(inst.face_of[ap], {ap, b}, {nu})
        ncorner += 1
    if inst.rot_next[b] == a:
        corner(inst.face_of[bp], {bp, a}, {nw})
        ncorner += 1

    def new_set(h):
        s = set(inst.faces[h])
        if h in subst:
            s -= subst[h]["drop"]
            s |= subst[h]["add"]
        return s

    corners = set(subst)
    if ncorner == 1:
        if ab:
            fa, fb = inst.face_of[a], inst.face_of[bp]
            add = nw
        else:
            fa, fb = inst.face_of[b], inst.face_of[ap]
            add = nu
        # the corner face may itself be one of the merging faces
        merged = (new_set(fa) | new_set(fb)) - {a, b, ap, bp}
        merged.add(add)
        group = {fa, fb}
    else:
        merged, group = None, set()

    def face_for(h):
        if h in group:
            return frozenset(merged), group
        return frozenset(new_set(h)), {h}

    fg = fgs = None
    if inst.fg is not None:
        fg, g = face_for(inst.fg)
        if inst.fgs is not None and inst.fgs in g and inst.fgs not in corners:
            return FacePrediction(fg, None)
    if inst.fgs is not None:
        fgs, _ = face_for(inst.fgs)
    return FacePrediction(fg, fgs)


# ---------------------------------------------------------------------------
# mutations


def _finish(inst: Instance, vertices, ends, rotation, p, tail, marks,
            pred: FacePrediction, new_vertex: Optional[int] = None,
            check_prescription: bool = True) -> Instance:
    """Assemble a child instance and place its specified faces from ``pred``."""
    raw = Instance(tuple(vertices), ends, rotation, p, tail, None, None, marks)
    child = _check_and_canonicalize(raw, check_prescription)
    live = child.face_of

    def place(s):
        if not s:
            return None
        m0 = min(s)
        return live.get(m0)

    fg = place(pred.fg)
    fgs = place(pred.fgs)
    if pred.fg_free or pred.fgs_free:
        near = []
        if new_vertex is not None and new_vertex in child.rotation:
            near = sorted({live[x] for x in child.rotation[new_vertex]})
        pool = [h for h in near if h not in (fg, fgs)]
        if pred.fg_free and pool:
            fg = pool.pop(0)
        if pred.fgs_free and pool:
            fgs = pool.pop(0)
    if fg is None and fgs is not None:
        fg, fgs = fgs, None
    if fgs == fg:
        fgs = None
    object.__setattr__(child, "fg", fg)
    object.__setattr__(child, "fgs", fgs)
    return child


def delete_edge(inst: Instance, e: int, tail: Optional[int] = None) -> Tuple[Instance, Remap]:
    """Delete ``e`` after fixing its direction and folding it into the
    prescriptions of its endpoints.

    A fixed direction wins; otherwise ``tail`` (default: the lower endpoint
    id) is used. The remap records that direction, so pulling back a child
    orientation yields a full orientation of the parent.
    """
    if e not in inst.ends:
        raise InstanceError(f"unknown edge {e}")
    a, b = inst.ends[e]
    if e in inst.tail:
        x = inst.tail[e]
    else:
        x = min(a, b) if tail is None else tail
        if x not in (a, b):
            raise OrientationError(f"tail {x} is not an endpoint of edge {e}")
    p = dict(inst.p)
    if a != b:
        h = b if x == a else a
        p[x] = z3(p[x] + 1)
        p[h] = z3(p[h] - 1)
    pred = predict_delete_edge(inst, e)
    ends = {k: val for k, val in inst.ends.items() if k != e}
    rotation = {v: tuple(y for y in r if y >> 1 != e) for v, r in inst.rotation.items()}
    tails = {k: val for k, val in inst.tail.items() if k != e}
    notes = ()
    if a != b and inst.face_of[2 * e] == inst.face_of[2 * e + 1]:
        notes = ("bridge",)
    child = _finish(inst, inst.vertices, ends, rotation, p, tails, dict(inst.marks), pred)
    remap = Remap(dict(inst.ends), {v: v for v in inst.vertices},
                  {k: k for k in ends}, fixed={e: x}, notes=notes)
    return child, remap


def delete_vertex(inst: Instance, v: int,
                  choice: Optional[Mapping[int, int]] = None) -> Tuple[Instance, Remap]:
    """Orient ``v`` (deterministically unless ``choice`` is given), fold its
    edges into the neighbours and remove it.

    F_G absorbs the faces incident with ``v``.
    """
    if v not in inst.rotation:
        raise InstanceError(f"unknown vertex {v}")
    if choice is None:
        choice = orient_vertex_choice(inst, v)
    fixed = {e: inst.tail.get(e, choice.get(e)) for e in set(inst.incident[v])}
    for e, x in fixed.items():
        if x is None:
            raise OrientationError(f"edge {e} at vertex {v} left undirected")
    if residual(inst, v, {**inst.tail, **fixed}) != inst.p[v]:
        raise OrientationError(f"orientation of vertex {v} misses its prescription")
    pred = predict_delete_vertex(inst, v)
    p = {u: x for u, x in inst.p.items() if u != v}
    for e, x in fixed.items():
        a, b = inst.ends[e]
        if a == b:
            continue
        other = b if a == v else a
        p[other] = z3(p[other] + (1 if x == other else -1))
    gone = set(fixed)
    ends = {k: val for k, val in inst.ends.items() if k not in gone}
    rotation = {u: tuple(y for y in r if y >> 1 not in gone)
                for u, r in inst.rotation.items() if u != v}
    tails = {k: val for k, val in inst.tail.items() if k not in gone}
    marks = {k: x for k, x in inst.marks.items() if x != v}
    verts = [u for u in inst.vertices if u != v]
    child = _finish(inst, verts, ends, rotation, p, tails, marks, pred)
    vmap = {u: u for u in verts}
    remap = Remap(dict(inst.ends), vmap, {k: k for k in ends}, fixed=fixed)
    return child, remap


def _spanning_order(inst: Instance, S: set) -> Tuple[List[int], List[int]]:
    """Tree and non-tree internal edges of ``S``; boundary edges of the
    specified faces are preferred as tree edges so faces are not merged."""
    internal = sorted(e for e, (a, b) in inst.ends.items() if a in S and b in S)
    fgE = inst.face_edges(inst.fg)
    fgsE = inst.face_edges(inst.fgs)
    order = sorted(internal, key=lambda e: (0 if e in fgE else 1 if e in fgsE else 2, e))
    parent = {v: v for v in S}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree, rest = [], []
    for e in order:
        a, b = inst.ends[e]
        ra, rb = find(a), find(b)
        if ra == rb:
            rest.append(e)
        else:
            parent[ra] = rb
            tree.append(e)
    if len({find(v) for v in S}) != 1:
        raise InstanceError("contraction set does not induce a connected subgraph")
    return tree, rest


def contract(inst: Instance, S: Iterable[int], mark: Optional[str] = None,
             p_override: Optional[int] = None) -> Tuple[Instance, Remap]:
    """Contract the connected vertex set ``S`` to the vertex ``min(S)``.

    The new vertex gets ``p = sum of p over S``; edges inside ``S`` become
    loops and are removed. Marks inside ``S`` are dropped and ``mark``
    (e.g. ``'d'``) may be placed on the new vertex. The remap does not
    direct the edges inside ``S``; callers that need a full orientation
    solve ``S`` separately.
    """
    S = set(S)
    if not S or not S <= set(inst.vertices):
        raise InstanceError("contraction set must be a nonempty set of vertices")
    tree, rest = _spanning_order(inst, S)
    pred = predict_contract(inst, S)
    rot = {v: list(r) for v, r in inst.rotation.items()}
    ends = dict(inst.ends)
    rep = {v: v for v in S}

    def find(x):
        while rep[x] != x:
            x = rep[x]
        return x

    for e in tree:
        a, b = find(inst.ends[e][0]), find(inst.ends[e][1])
        da = next(x for x in rot[a] if x >> 1 == e)
        db = next(x for x in rot[b] if x >> 1 == e)
        ia, ib = rot[a].index(da), rot[b].index(db)
        ra = rot[a][ia + 1:] + rot[a][:ia]
        rb = rot[b][ib + 1:] + rot[b][:ib]
        keep, drop = (a, b) if a < b else (b, a)
        rot[keep] = ra + rb
        del rot[drop]
        rep[drop] = keep
    root = find(min(S))
    assert root == min(S)
    gone = set(tree) | set(rest)
    rot[root] = [x for x in rot[root] if x >> 1 not in gone]
    new_ends = {}
    for e, (a, b) in ends.items():
        if e in gone:
            continue
        new_ends[e] = (root if a in S else a, root if b in S else b)
    vertices = [v for v in inst.vertices if v not in S or v == root]
    p = {v: x for v, x in inst.p.items() if v not in S}
    p[root] = z3(sum(inst.p[v] for v in S)) if p_override is None else p_override
    tails = {}
    for e, x in inst.tail.items():
        if e in gone:
            continue
        tails[e] = root if x in S else x
    marks = {k: x for k, x in inst.marks.items() if x not in S}
    if mark is not None:
        marks = {k: x for k, x in marks.items() if k != mark}
        marks[mark] = root
    rotation = {v: tuple(r) for v, r in rot.items()}
    child = _finish(inst, vertices, new_ends, rotation, p, tails, marks, pred,
                    new_vertex=root, check_prescription=p_override is None)
    vmap = {v: (root if v in S else v) for v in inst.vertices}
    fixed = {e: inst.tail[e] for e in rest if e in inst.tail}
    remap = Remap(dict(inst.ends), vmap, {e: e for e in new_ends}, fixed=fixed)
    return child, remap


def lift(inst: Instance, e1: int, e2: int) -> Tuple[Instance, Remap]:
    """Replace the path ``u -e1- v -e2- w`` by a single unoriented edge ``uw``.

    The two edges must be consecutive at ``v`` and both unoriented. The new
    edge gets the next free id; its dart at ``u`` takes e1's place in the
    rotation at ``u`` and its dart at ``w`` takes e2's place at ``w``.
    """
    if e1 in inst.tail or e2 in inst.tail:
        raise OrientationError("only unoriented edges can be lifted")
    v, u, w, a, b, _ = _lift_darts(inst, e1, e2)
    pred = predict_lift(inst, e1, e2)
    n = max(inst.ends) + 1
    nu, nw = 2 * n, 2 * n + 1
    ap, bp = a ^ 1, b ^ 1
    rotation = {}
    for x, r in inst.rotation.items():
        out = []
        for y in r:
            if y == ap:
                out.append(nu)
            elif y == bp:
                out.append(nw)
            elif y in (a, b):
                continue
            else:
                out.append(y)
        rotation[x] = tuple(out)
    ends = {k: val for k, val in inst.ends.items() if k not in (e1, e2)}
    ends[n] = (u, w)
    child = _finish(inst, inst.vertices, ends, rotation, dict(inst.p),
                    dict(inst.tail), dict(inst.marks), pred)
    remap = Remap(dict(inst.ends), {x: x for x in inst.vertices},
                  {k: k for k in ends if k != n}, lifted={n: (e1, e2, u, v, w)})
    return child, remap


def trace_faces(inst: Instance) -> Dict[int, frozenset]:
    """Independent face tracer used to cross-check cached faces: walks each
    orbit with an explicit twin/rotation lookup instead of ``rot_next``."""
    pos = {}
    for v, r in inst.rotation.items():
        for i, x in enumerate(r):
            pos[x] = (v, i)
    out = {}
    seen = set()
    for x in sorted(pos):
        if x in seen:
            continue
        orbit = set()
        y = x
        while y not in orbit:
            orbit.add(y)
            v, i = pos[twin(y)]
            r = inst.rotation[v]
            y = r[(i + 1) % len(r)]
        seen |= orbit
        out[min(orbit)] = frozenset(orbit)
    return out
