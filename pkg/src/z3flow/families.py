"""Instance generators: the families without valid orientations and a
seeded random corpus of class members.

Family names: ``D5a``/``D5b`` (a directed vertex beside a degree-3 vertex
whose two incoming fixed edges leave no valid residual), ``TS33a``/``TS33b``
(a square or pentagon of degree-3 vertices around a blob or hub), and
``Star`` (the two-ring circulant built on ``n = 6k`` path vertices).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import Delaunay

from . import classes, cuts
from .graph import (Instance, InstanceError, _check_and_canonicalize, build, residual,
                    z3)

FAMILIES = ("D5a", "D5b", "TS33a", "TS33b", "Star")
BLOBS = ("single", "pair")


@dataclass(frozen=True)
class FamilySpec:
    family: str
    k: int = 1
    blob: str = "single"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "Star" and self.k < 1:
            raise ValueError("Star needs k >= 1")
        if self.blob not in BLOBS:
            raise ValueError(f"unknown blob completion {self.blob!r}")


def _face_with_vertices(inst: Instance, verts) -> int:
    verts = set(verts)
    for h in inst.faces:
        if inst.face_vertices(h) == verts:
            return h
    raise InstanceError("no face with the requested boundary")


def _split_blob(vertices, edges, rot, orient, blob_v, keep, new_v, p_keep, p_new):
    """Replace ``blob_v`` by two vertices joined by three parallel edges.

    The first ``keep`` darts of the blob's rotation stay on ``blob_v``; the
    rest move to ``new_v``. Returns updated copies.
    """
    vertices = dict(vertices)
    edges = dict(edges)
    rot = {v: list(r) for v, r in rot.items()}
    order = rot[blob_v]
    first, second = order[:keep], order[keep:]
    for e in second:
        a, b = edges[e]
        edges[e] = (new_v if a == blob_v else a, new_v if b == blob_v else b)
    nxt = max(edges) + 1
    c = [nxt, nxt + 1, nxt + 2]
    for e in c:
        edges[e] = (blob_v, new_v)
    rot[blob_v] = list(first) + c
    rot[new_v] = list(second) + c[::-1]
    vertices[blob_v] = p_keep
    vertices[new_v] = p_new
    return vertices, edges, rot, dict(orient)


def gen_d5b(p_t: int = -1) -> Instance:
    """Directed vertex of degree 4 between t and s.

    Two fixed edges d->t and two fixed edges s->d; the s-t edge is free.
    ``p_t`` other than -1 gives the sanity inverse, with p(s) repaired so the
    prescription stays valid.
    """
    d, t, s = 0, 1, 2
    p_s = z3(-(0 + p_t))
    vertices = {d: 0, t: p_t, s: p_s}
    edges = {0: (d, t), 1: (d, t), 2: (d, s), 3: (d, s), 4: (s, t)}
    rot = {d: [1, 0, 2, 3], t: [4, 0, 1], s: [3, 2, 4]}
    orient = {0: d, 1: d, 2: s, 3: s}
    inst = build(vertices, edges, rot, orient, fg=(4, s), marks={"d": d, "t": t, "s": s})
    return inst


def gen_d5a(blob: str = "single") -> Instance:
    """Directed vertex of degree 5 with two fixed edges into the degree-3
    vertex t; the rest of the graph is a blob carrying p = 0."""
    d, t, B = 0, 1, 2
    vertices = {d: 1, t: -1, B: 0}
    edges = {0: (d, t), 1: (d, t), 2: (d, B), 3: (d, B), 4: (d, B), 5: (t, B)}
    rot = {d: [1, 0, 4, 3, 2], t: [5, 0, 1], B: [2, 3, 4, 5]}
    orient = {0: d, 1: d, 2: d, 3: d, 4: d}
    if blob == "pair":
        vertices, edges, rot, orient = _split_blob(vertices, edges, rot, orient, B, 2, 3, 1, -1)
    inst = build(vertices, edges, rot, orient, fg=(5, t), marks={"d": d, "t": t})
    return inst


def gen_ts33a(blob: str = "single") -> Instance:
    """Square d, r, s, t of which r, s, t have degree 3, around a blob A.

    All edges at d point out of d.
    """
    d, r, s, t, A = 0, 1, 2, 3, 4
    vertices = {d: -1, r: 0, s: 0, t: -1, A: -1}
    edges = {0: (d, r), 1: (r, s), 2: (s, t), 3: (t, d),
             4: (d, A), 5: (d, A), 6: (r, A), 7: (s, A), 8: (t, A)}
    rot = {d: [3, 5, 4, 0], A: [6, 4, 5, 8, 7], r: [0, 6, 1], s: [1, 7, 2], t: [2, 8, 3]}
    orient = {0: d, 3: d, 4: d, 5: d}
    if blob == "pair":
        vertices, edges, rot, orient = _split_blob(vertices, edges, rot, orient, A, 3, 5, 0, -1)
    raw = build(vertices, edges, rot, orient, marks={"d": d, "r": r, "s": s, "t": t})
    fg = _face_with_vertices(raw, [d, r, s, t])
    return _with_faces(raw, fg)


def gen_ts33b() -> Instance:
    """Pentagon wheel with every prescription 0: the odd rim cannot be
    directed consistently."""
    rim = [0, 1, 2, 3, 4]
    hub = 5
    edges = {}
    for i in range(5):
        edges[i] = (rim[i], rim[(i + 1) % 5])
        edges[5 + i] = (rim[i], hub)
    rot = {rim[i]: [i, 5 + i, (i - 1) % 5] for i in range(5)}
    rot[hub] = [5, 6, 7, 8, 9]
    raw = build({v: 0 for v in rim + [hub]}, edges, rot, marks={"r": 1, "s": 2, "t": 3})
    fg = _face_with_vertices(raw, rim)
    return _with_faces(raw, fg)


def _with_faces(inst: Instance, fg: Optional[int], fgs: Optional[int] = None) -> Instance:
    raw = Instance(inst.vertices, inst.ends, inst.rotation, inst.p, inst.tail, fg, fgs, inst.marks)
    return _check_and_canonicalize(raw)


def star_layout(k: int):
    """Vertex ids and edges of the star family for ``n = 6k``.

    Ids: ``t = 0``, ``w = 1``, ``v_i = i + 2``. Returns ``(seq, edges)`` where
    ``seq = [t, w, v_0, ..., v_n]``.
    """
    n = 6 * k
    seq = list(range(n + 3))
    pairs = []
    for i in range(len(seq) - 1):
        pairs.append((seq[i], seq[i + 1]))
    for i in range(len(seq) - 2):
        pairs.append((seq[i], seq[i + 2]))
    v = lambda i: i + 2  # noqa: E731
    pairs += [(v(n), 1), (v(n - 1), 1), (v(n), 0)]
    return seq, {e: pr for e, pr in enumerate(pairs)}


def star_prescription(k: int) -> Dict[int, int]:
    n = 6 * k
    h = n // 2
    p = {0: 0, 1: 0}
    for j in range(n + 1):
        if j == h:
            p[j + 2] = -1
        elif abs(j - h) <= 2:
            p[j + 2] = 1
        elif j < h:
            p[j + 2] = 1
        else:
            p[j + 2] = -1
    return p


def gen_star(k: int = 1) -> Instance:
    """Star family member: d = v_{3k} directed outward, marks d and t.

    Embedded as an antiprism: from w onward the sequence alternates between
    an inner and an outer ring, and t closes the outer ring.
    """
    n = 6 * k
    seq, edges = star_layout(k)
    m = 3 * k + 1
    coords = {}
    tail_seq = seq[1:]  # w, v_0, ..., v_n
    for pos, x in enumerate(tail_seq):
        j = pos // 2
        if pos % 2 == 0:
            ang = 2 * math.pi * j / m
            coords[x] = (math.cos(ang), math.sin(ang))
        else:
            ang = 2 * math.pi * (j + 0.5) / m
            coords[x] = (2.0 * math.cos(ang), 2.0 * math.sin(ang))
    coords[0] = (3.0, 0.0)
    rot = _angle_rotation(coords, edges)
    d = 3 * k + 2
    orient = {e: d for e, (a, b) in edges.items() if d in (a, b)}
    p = star_prescription(k)
    raw = build(p, edges, rot, orient, marks={"d": d, "t": 0})
    inner = [x for pos, x in enumerate(tail_seq) if pos % 2 == 0]
    outer = [x for pos, x in enumerate(tail_seq) if pos % 2 == 1] + [0]
    f_in = _face_with_vertices(raw, inner)
    f_out = _face_with_vertices(raw, outer)
    fg, fgs = (f_in, f_out) if d in inner else (f_out, f_in)
    return _with_faces(raw, fg, fgs)


def star_vertex(k: int, j: int) -> int:
    """Id of ``v_j`` on the extended ring (``v_-1 = w``, ``v_-2 = t``)."""
    if j == -1:
        return 1
    if j == -2:
        return 0
    return j + 2


def _angle_rotation(coords, edges) -> Dict[int, List[int]]:
    rot: Dict[int, List[Tuple[float, int]]] = {v: [] for v in coords}
    for e, (a, b) in edges.items():
        for x, y in ((a, b), (b, a)):
            dx = coords[y][0] - coords[x][0]
            dy = coords[y][1] - coords[x][1]
            rot[x].append((math.atan2(dy, dx), e))
    return {v: [e for _, e in sorted(r)] for v, r in rot.items()}


def gen(spec: FamilySpec) -> Instance:
    if spec.family == "D5a":
        return gen_d5a(spec.blob)
    if spec.family == "D5b":
        return gen_d5b()
    if spec.family == "TS33a":
        return gen_ts33a(spec.blob)
    if spec.family == "TS33b":
        return gen_ts33b()
    return gen_star(spec.k)


def gen_family(name: str, k: int = 1, blob: str = "single") -> Tuple[Instance, str]:
    """Generate a family member together with its expected verdict."""
    return gen(FamilySpec(name, k, blob)), "UNSAT"


# ---------------------------------------------------------------------------
# random corpus


class _Plane:
    """Mutable rotation system used while growing corpus instances."""

    def __init__(self, coords: Dict[int, Tuple[float, float]], edges: Dict[int, Tuple[int, int]]):
        self.coords = dict(coords)
        self.edges = dict(edges)
        rot = _angle_rotation(coords, edges)
        self.rot: Dict[int, List[int]] = {}
        for v, elist in rot.items():
            self.rot[v] = [2 * e if self.edges[e][0] == v else 2 * e + 1 for e in elist]
        self.track: Dict[str, int] = {}

    def instance(self, p=None, tail=None, marks=None, check=True) -> Instance:
        p = p or {v: 0 for v in self.rot}
        raw = Instance(tuple(self.rot), dict(self.edges), {v: tuple(r) for v, r in self.rot.items()},
                       dict(p), dict(tail or {}), self.track.get("fg"), self.track.get("fgs"),
                       dict(marks or {}))
        return _check_and_canonicalize(raw, check)

    def faces(self) -> Dict[int, List[int]]:
        return {h: list(o) for h, o in self.instance(check=False).faces.items()}

    def add_parallel(self, e: int) -> int:
        """Add a copy of ``e`` next to it, forming a digon away from the
        tracked faces where possible."""
        a, b = self.edges[e]
        fo = self.instance(check=False).face_of
        f = max(self.edges) + 1
        self.edges[f] = (a, b)
        ea, eb = 2 * e, 2 * e + 1
        fa, fb = 2 * f, 2 * f + 1
        tracked = {fo[x] for x in self.track.values()}
        # option 1 puts the digon where eb's face was; option 2 where ea's was
        if fo[eb] in tracked and fo[ea] not in tracked:
            self._insert(a, ea, fa, after=False)
            self._insert(b, eb, fb, after=True)
            self._retrack(ea, fa)
        else:
            self._insert(a, ea, fa, after=True)
            self._insert(b, eb, fb, after=False)
            self._retrack(eb, fb)
        return f

    def _insert(self, v, anchor, new, after):
        r = self.rot[v]
        i = r.index(anchor)
        r.insert(i + 1 if after else i, new)

    def _retrack(self, old, new):
        for k, x in self.track.items():
            if x == old:
                self.track[k] = new

    def subdivide_boundary(self, e: int, face_dart: int) -> int:
        """Split edge ``e`` at its midpoint with a new vertex joined to the
        opposite corner of the triangle on the far side of the tracked face.

        Only valid before any parallel edges exist (rotations are rebuilt
        from coordinates).
        """
        a, b = self.edges[e]
        inst = self.instance(check=False)
        other = (face_dart ^ 1)
        tri = inst.faces[inst.face_of[other]]
        corners = {inst.dart_vertex(x) for x in tri} - {a, b}
        if len(tri) != 3 or len(corners) != 1:
            return -1
        c = corners.pop()
        x = max(self.coords) + 1
        (ax, ay), (bx, by) = self.coords[a], self.coords[b]
        self.coords[x] = ((ax + bx) / 2, (ay + by) / 2)
        del self.edges[e]
        nxt = max(self.edges) + 1
        self.edges[nxt] = (a, x)
        self.edges[nxt + 1] = (x, b)
        self.edges[nxt + 2] = (x, c)
        self._rebuild_geometric()
        self.track.clear()  # caller re-finds its faces
        return x

    def _rebuild_geometric(self):
        rot = _angle_rotation(self.coords, self.edges)
        self.rot = {v: [2 * e if self.edges[e][0] == v else 2 * e + 1 for e in elist]
                    for v, elist in rot.items()}


def _triangulation(rng: np.random.Generator, n0: int):
    pts = rng.random((n0, 2))
    tri = Delaunay(pts)
    pairs = set()
    for simplex in tri.simplices:
        for i in range(3):
            a, b = int(simplex[i]), int(simplex[(i + 1) % 3])
            pairs.add((min(a, b), max(a, b)))
    coords = {i: (float(pts[i][0]), float(pts[i][1])) for i in range(n0)}
    edges = {e: pr for e, pr in enumerate(sorted(pairs))}
    return coords, edges


def _signed_area(coords, verts) -> float:
    s = 0.0
    for i in range(len(verts)):
        x1, y1 = coords[verts[i]]
        x2, y2 = coords[verts[(i + 1) % len(verts)]]
        s += x1 * y2 - x2 * y1
    return s / 2


def _tiny(rng: np.random.Generator, klass: str) -> Instance:
    """Two vertices joined by 3-5 parallel edges (class members by fiat)."""
    k = int(rng.integers(3, 6))
    pu = int(rng.integers(-1, 2))
    edges = {e: (0, 1) for e in range(k)}
    rot = {0: list(range(k)), 1: list(range(k))[::-1]}
    orient = {}
    marks = {}
    if klass in ("DTS", "FT") and k <= 5 and rng.random() < 0.5:
        orient = {e: (0 if rng.random() < 0.5 else 1) for e in range(k)}
        r = sum(-1 if orient[e] == 0 else 1 for e in range(k))
        pu = z3(r)
        marks = {"d": 0}
    fgs = (1, 0) if klass == "FT" else None
    return build({0: pu, 1: z3(-pu)}, edges, rot, orient, fg=(0, 0), fgs=fgs, marks=marks)


def _repair(pl: _Plane, marked: Dict[str, int], klass: str, rng, max_iter: int = 60) -> bool:
    """Add parallel edges until the structural clauses hold (or give up)."""
    frozen = set(marked.values())
    for _ in range(max_iter):
        inst = pl.instance(check=False)
        fixed = False
        for v in inst.vertices:
            if v in frozen or inst.degree(v) >= 4:
                continue
            nbr = [e for e in sorted(set(inst.incident[v]))
                   if inst.other_end(e, v) not in frozen and not inst.is_loop(e)]
            if not nbr:
                return False
            pl.add_parallel(nbr[int(rng.integers(len(nbr)))])
            fixed = True
            break
        if fixed:
            continue
        allowed = {frozenset([v]) for v in frozen}
        bad = [c for c in cuts.all_small_cuts(inst, 3)
               if not (c.size == 3 and (c.side in allowed or c.rest in allowed))]
        if bad:
            c = bad[0]
            pick = [e for e in c.edges if not (set(inst.ends[e]) & frozen)]
            if not pick:
                return False
            pl.add_parallel(pick[int(rng.integers(len(pick)))])
            continue
        bv = inst.boundary_vertices()
        weak = None
        for v in inst.vertices:
            if v not in bv and cuts.max_edge_disjoint_paths(inst, v, bv) < 5:
                weak = v
                break
        if weak is None:
            return True
        side = _residual_side(inst, weak, bv)
        pick = [e for e, (a, b) in inst.ends.items()
                if (a in side) != (b in side) and not (set(inst.ends[e]) & frozen)]
        if not pick:
            return False
        pl.add_parallel(sorted(pick)[int(rng.integers(len(pick)))])
    return False


def _residual_side(inst: Instance, v: int, sinks) -> set:
    """Vertices reachable from ``v`` once a maximum flow to ``sinks`` is
    routed: the source side of a minimum cut."""
    from collections import deque

    sinks = set(sinks)
    cap: Dict[int, Dict[int, int]] = {x: {} for x in inst.vertices}
    for a, b in inst.ends.values():
        if a != b:
            cap[a][b] = cap[a].get(b, 0) + 1
            cap[b][a] = cap[b].get(a, 0) + 1
    while True:
        prev = {v: None}
        q = deque([v])
        hit = None
        while q:
            x = q.popleft()
            if x in sinks:
                hit = x
                break
            for y, c in cap[x].items():
                if c > 0 and y not in prev:
                    prev[y] = x
                    q.append(y)
        if hit is None:
            return set(prev)
        y = hit
        while prev[y] is not None:
            x = prev[y]
            cap[x][y] -= 1
            cap[y][x] = cap[y].get(x, 0) + 1
            y = x


def _one_candidate(rng: np.random.Generator, n_max: int, klass: str) -> Optional[Instance]:
    names = {"DTS": ("d", "t", "s"), "RST": ("r", "s", "t"), "FT": ("d", "t")}[klass]
    if klass == "FT":
        want = [[], ["d"], ["t"]][int(rng.integers(3))]
    else:
        want = [x for x in names if rng.random() < 0.55]
    n_sub = len(want)
    if n_max - n_sub < 3:
        return None
    n0 = int(rng.integers(3, n_max - n_sub + 1))
    coords, edges = _triangulation(rng, n0)
    pl = _Plane(coords, edges)
    # sparsify a little: drop some interior edges
    inst = pl.instance(check=False)
    outer = max(inst.faces, key=lambda h: _signed_area(coords, [inst.dart_vertex(x) for x in inst.faces[h]]))
    hull_edges = inst.face_edges(outer)
    for e in sorted(pl.edges):
        if e not in hull_edges and rng.random() < 0.15:
            del pl.edges[e]
    pl._rebuild_geometric()
    inst = pl.instance(check=False)
    if not inst.is_connected:
        return None
    outer = max(inst.faces, key=lambda h: _signed_area(pl.coords, [inst.dart_vertex(x) for x in inst.faces[h]]))
    pl.track["fg"] = outer
    marked: Dict[str, int] = {}
    fgs_corner = None
    for name in want:
        inst = pl.instance(check=False)
        fgd = inst.faces[inst.face_of[pl.track["fg"]]]
        order = list(fgd)
        rng.shuffle(order)
        x = -1
        for dart in order:
            x = pl.subdivide_boundary(dart >> 1, dart)
            if x >= 0:
                break
        if x < 0:
            return None
        marked[name] = x
        # the outer face keeps its identity; re-find it by signed area
        inst = pl.instance(check=False)
        outer = max(inst.faces, key=lambda h: _signed_area(pl.coords, [inst.dart_vertex(y) for y in inst.faces[h]]))
        pl.track["fg"] = outer
        if klass == "FT" and name == "d":
            fgs_corner = x
    inst = pl.instance(check=False)
    if klass == "FT":
        fgv = inst.face_vertices(inst.fg if inst.fg is not None else pl.track["fg"])
        fg_h = inst.face_of[pl.track["fg"]]
        cands = [h for h in inst.faces if h != fg_h and inst.face_vertices(h) & fgv]
        if fgs_corner is not None:
            cands = [h for h in cands if fgs_corner in inst.face_vertices(h)]
        if not cands:
            return None
        pl.track["fgs"] = cands[int(rng.integers(len(cands)))]
    if not _repair(pl, marked, klass, rng):
        return None
    inst = pl.instance(check=False)
    tail = {}
    p = {v: int(rng.integers(-1, 2)) for v in inst.vertices}
    d = marked.get("d")
    if d is not None:
        for e in set(inst.incident[d]):
            tail[e] = d if rng.random() < 0.5 else inst.other_end(e, d)
        r = residual(inst, d, tail)
        p[d] = r
    free = [v for v in inst.vertices if v != d]
    fix = free[int(rng.integers(len(free)))]
    p[fix] = z3(p[fix] - sum(p.values()))
    try:
        out = pl.instance(p=p, tail=tail, marks=marked)
    except InstanceError:
        return None
    if not classes.check(out, klass).passed:
        return None
    return out


def gen_corpus(seed: int, n_max: int, klass: str, count: int = 100,
               max_tries: int = 20000) -> List[Instance]:
    """Seeded random instances with at most ``n_max`` vertices passing the
    ``klass`` check (``DTS``, ``FT`` or ``RST``).

    Planar triangulations of random points are sparsified, given marked
    degree-3 vertices by boundary subdivision, repaired with parallel edges
    and finally filtered by the class check. About one in twelve members is
    a two-vertex multigraph.
    """
    klass = klass.upper()
    if klass not in ("DTS", "FT", "RST"):
        raise ValueError("corpus classes are DTS, FT and RST")
    rng = np.random.default_rng(seed)
    out: List[Instance] = []
    tries = 0
    while len(out) < count and tries < max_tries:
        tries += 1
        if n_max < 3 or rng.random() < 1 / 12:
            if n_max >= 2:
                cand = _tiny(rng, klass)
                if classes.check(cand, klass).passed:
                    out.append(cand)
            continue
        cand = _one_candidate(rng, n_max, klass)
        if cand is not None:
            out.append(cand)
    return out


def random_instance(rng: np.random.Generator, max_edges: int = 20, max_vertices: int = 9,
                    orient_rate: float = 0.2, faces: int = 1) -> Instance:
    """An unconstrained random plane instance: a sparsified Delaunay
    triangulation with some doubled edges, a random prescription, a random
    partial orientation and ``faces`` (0-2) specified faces.

    Not a class member in general; used for oracle and mutation properties.
    """
    while True:
        n0 = int(rng.integers(2, max_vertices + 1))
        if n0 == 2:
            coords = {0: (0.0, 0.0), 1: (1.0, 0.0)}
            edges = {0: (0, 1)}
        else:
            coords, edges = _triangulation(rng, n0)
        pl = _Plane(coords, edges)
        for e in sorted(pl.edges):
            if len(pl.edges) > 1 and rng.random() < 0.3:
                del pl.edges[e]
                pl._rebuild_geometric()
                if not pl.instance(check=False).is_connected:
                    pl.edges[e] = edges[e]
                    pl._rebuild_geometric()
        while len(pl.edges) < max_edges and rng.random() < 0.5:
            es = sorted(pl.edges)
            pl.add_parallel(es[int(rng.integers(len(es)))])
        if len(pl.edges) <= max_edges:
            break
    inst = pl.instance(check=False)
    tail = {e: inst.ends[e][int(rng.integers(2))] for e in inst.ends if rng.random() < orient_rate}
    p = {v: int(rng.integers(-1, 2)) for v in inst.vertices}
    v0 = inst.vertices[int(rng.integers(inst.n))]
    p[v0] = z3(p[v0] - sum(p.values()))
    hs = sorted(inst.faces)
    rng.shuffle(hs)
    fg = hs[0] if faces >= 1 else None
    fgs = hs[1] if faces >= 2 and len(hs) > 1 else None
    raw = Instance(inst.vertices, dict(inst.ends), dict(inst.rotation), p, tail, fg, fgs, {})
    return _check_and_canonicalize(raw)
