"""Edge cuts: connectivity, small-cut enumeration, robustness, crossing and
edge-disjoint paths to the specified boundary."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import kernels
from .graph import Instance, InstanceError

BRUTE_FORCE_MAX_N = 16


@dataclass(frozen=True)
class Cut:
    """A bipartition ``side | rest`` and its crossing edges.

    ``side`` is the canonical side: the one without the smallest vertex id.
    """

    side: frozenset
    rest: frozenset
    edges: Tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.edges)

    def contains(self, v) -> bool:
        return v in self.side

    def side_of(self, v) -> frozenset:
        return self.side if v in self.side else self.rest


def make_cut(inst: Instance, A: Iterable[int]) -> Cut:
    A = frozenset(A)
    allv = frozenset(inst.vertices)
    if not A or not A < allv:
        raise InstanceError("both sides of a cut must be nonempty")
    B = allv - A
    if min(allv) in A:
        A, B = B, A
    edges = tuple(sorted(e for e, (a, b) in inst.ends.items() if (a in A) != (b in A)))
    return Cut(A, B, edges)


def _dense(inst: Instance):
    idx = {v: i for i, v in enumerate(inst.vertices)}
    eu, ev = [], []
    for e in sorted(inst.ends):
        a, b = inst.ends[e]
        if a != b:
            eu.append(idx[a])
            ev.append(idx[b])
    return idx, eu, ev


# -- max flow ----------------------------------------------------------------


def max_edge_disjoint_paths(inst: Instance, source: int, sinks: Iterable[int]) -> int:
    """Edge-disjoint paths from ``source`` to the set ``sinks`` (unit capacities,
    each undirected edge usable once in either direction)."""
    sinks = set(sinks)
    if source in sinks:
        return math.inf
    SINK = object()
    cap: Dict[object, Dict[object, int]] = {v: {} for v in inst.vertices}
    cap[SINK] = {}
    for a, b in inst.ends.values():
        if a == b:
            continue
        cap[a][b] = cap[a].get(b, 0) + 1
        cap[b][a] = cap[b].get(a, 0) + 1
    big = 2 * len(inst.ends) + 1
    for t in sinks:
        cap[t][SINK] = big
        cap[SINK].setdefault(t, 0)
    flow = 0
    while True:
        prev = {source: None}
        q = deque([source])
        while q and SINK not in prev:
            x = q.popleft()
            for y, c in cap[x].items():
                if c > 0 and y not in prev:
                    prev[y] = x
                    q.append(y)
        if SINK not in prev:
            return flow
        y = SINK
        while prev[y] is not None:
            x = prev[y]
            cap[x][y] -= 1
            cap[y][x] = cap[y].get(x, 0) + 1
            y = x
        flow += 1


def edge_connectivity(inst: Instance):
    """Global minimum cut size; 0 when disconnected, ``inf`` on one vertex."""
    if inst.n <= 1:
        return math.inf
    if not inst.is_connected:
        return 0
    if inst.n <= BRUTE_FORCE_MAX_N:
        _, eu, ev = _dense(inst)
        _, best = kernels.cut_scan(inst.n, eu, ev, -1)
        return best
    v0 = inst.vertices[0]
    return min(max_edge_disjoint_paths(inst, v0, [v]) for v in inst.vertices[1:])


# -- enumeration -------------------------------------------------------------


def _enumerate_sides_bb(inst: Instance, kmax: int) -> List[frozenset]:
    """Branch and bound over side assignments in BFS order.

    Every vertex other than a component root that differs from its BFS
    parent adds a crossing edge, so pruning at ``kmax`` keeps the tree small.
    """
    order: List[int] = []
    seen = set()
    for root in inst.vertices:
        if root in seen:
            continue
        seen.add(root)
        q = deque([root])
        while q:
            x = q.popleft()
            order.append(x)
            for e in sorted(set(inst.incident[x])):
                y = inst.other_end(e, x)
                if y not in seen:
                    seen.add(y)
                    q.append(y)
    pos = {v: i for i, v in enumerate(order)}
    back: List[List[int]] = [[] for _ in order]  # earlier neighbours, with multiplicity
    for a, b in inst.ends.values():
        if a == b:
            continue
        ia, ib = pos[a], pos[b]
        if ia < ib:
            back[ib].append(ia)
        else:
            back[ia].append(ib)
    n = len(order)
    side = [0] * n
    out = []

    def rec(i, size):
        if i == n:
            if any(side):
                out.append(frozenset(order[j] for j in range(n) if side[j]))
            return
        for s in ((0,) if i == 0 else (0, 1)):
            side[i] = s
            extra = sum(1 for j in back[i] if side[j] != s)
            if size + extra <= kmax:
                rec(i + 1, size + extra)
        side[i] = 0

    rec(0, 0)
    return out


def all_small_cuts(inst: Instance, kmax: int) -> List[Cut]:
    """Every bipartition with at most ``kmax`` crossing edges."""
    if inst.n <= 1 or kmax < 0:
        return []
    if inst.n <= BRUTE_FORCE_MAX_N:
        _, eu, ev = _dense(inst)
        masks, _ = kernels.cut_scan(inst.n, eu, ev, kmax)
        vs = inst.vertices
        sides = [frozenset(vs[i] for i in range(inst.n) if (mask >> i) & 1) for mask in masks]
    else:
        sides = _enumerate_sides_bb(inst, kmax)
    cuts = [make_cut(inst, s) for s in sides]
    cuts.sort(key=lambda c: (c.size, sorted(c.side)))
    return cuts


def is_robust(c: Cut, robust: int, anchor: Optional[int] = None) -> bool:
    """``|A| >= 2`` and ``|G - A| >= robust`` where A holds ``anchor``;
    without an anchor either labelling of the sides may serve as A."""
    if robust <= 0:
        return True
    if anchor is not None:
        A = c.side_of(anchor)
        B = c.rest if A is c.side else c.side
        return len(A) >= 2 and len(B) >= robust
    x, y = len(c.side), len(c.rest)
    return (x >= 2 and y >= robust) or (y >= 2 and x >= robust)


def enumerate_cuts(inst: Instance, kmax: int, robust: int = 0,
                   anchor: Optional[int] = None) -> List[Cut]:
    """Cuts of size at most ``kmax`` that are ``robust``-robust, each once,
    ordered by size and then canonical side."""
    return [c for c in all_small_cuts(inst, kmax) if is_robust(c, robust, anchor)]


def vertex_star(inst: Instance, v: int) -> Cut:
    return make_cut(inst, [v])


def is_internal(inst: Instance, c: Cut) -> bool:
    if not inst.specified:
        raise InstanceError("internal cuts need a specified face")
    bv = inst.boundary_vertices()
    return not (c.side & bv) or not (c.rest & bv)


def cut_type(inst: Instance, c: Cut) -> int:
    """1, 2 or 3 when the cut's edges meet neither, one or both face boundaries."""
    if inst.fg is None or inst.fgs is None:
        raise InstanceError("cut types need two specified faces")
    es = set(c.edges)
    hits = sum(1 for h in (inst.fg, inst.fgs) if es & inst.face_edges(h))
    return hits + 1


def crossing(c1: Cut, c2: Cut) -> bool:
    A, B = c1.side, c2.side
    Ac, Bc = c1.rest, c2.rest
    return bool(A & B) and bool(A & Bc) and bool(Ac & B) and bool(Ac & Bc)


def boundary_connectivity(inst: Instance, v: int):
    """Edge-disjoint paths from ``v`` to the union of the specified boundaries
    (``inf`` when ``v`` is itself on a boundary)."""
    if not inst.specified:
        raise InstanceError("boundary connectivity needs a specified face")
    if v not in inst.rotation:
        raise InstanceError(f"unknown vertex {v}")
    bv = inst.boundary_vertices()
    if v in bv:
        return math.inf
    return max_edge_disjoint_paths(inst, v, bv)


def interior_vertices(inst: Instance) -> List[int]:
    bv = inst.boundary_vertices()
    return [v for v in inst.vertices if v not in bv]
