"""Small hand-built instances and cached corpora for the test suite."""
from __future__ import annotations

import math
from functools import lru_cache

from z3flow import families
from z3flow.graph import build, dart_of

CORPUS_SEEDS = {"DTS": 20240601, "FT": 20240602, "RST": 20240603}
CORPUS_SIZES = {"DTS": 200, "FT": 100, "RST": 100}
CORPUS_N_MAX = 12


@lru_cache(maxsize=None)
def corpus(klass: str):
    return tuple(families.gen_corpus(CORPUS_SEEDS[klass], CORPUS_N_MAX, klass,
                                     count=CORPUS_SIZES[klass]))


def full_corpus():
    return corpus("DTS") + corpus("FT") + corpus("RST")


def plane(coords, pairs, p=None, orient=None, fg=None, fgs=None, marks=None):
    """Build from straight-line coordinates; ``fg``/``fgs`` are vertex sets
    naming a face by its boundary."""
    edges = {e: pr for e, pr in enumerate(pairs)}
    rot = families._angle_rotation(coords, edges)
    p = p or {v: 0 for v in coords}
    inst = build(p, edges, rot, orient or {}, marks=marks or {})
    h1 = _face(inst, fg) if fg is not None else None
    h2 = _face(inst, fgs) if fgs is not None else None
    return families._with_faces(inst, h1, h2) if (h1 is not None or h2 is not None) else inst


def _face(inst, verts):
    return families._face_with_vertices(inst, verts)


def parallel3(p=(1, -1), orient=None):
    """Two vertices joined by three parallel edges; F_G is the face right of edge 0."""
    return build({0: p[0], 1: p[1]}, {0: (0, 1), 1: (0, 1), 2: (0, 1)},
                 {0: [0, 1, 2], 1: [2, 1, 0]}, orient or {}, fg=(0, 0))


def cycle(k, p=None):
    coords = {i: (math.cos(2 * math.pi * i / k), math.sin(2 * math.pi * i / k)) for i in range(k)}
    pairs = [(i, (i + 1) % k) for i in range(k)]
    return plane(coords, pairs, p=p, fg=set(range(k)))


def wheel(k, p=None, marks=None):
    """Rim ``0..k-1`` (F_G = the outer face), hub ``k``."""
    coords = {i: (math.cos(2 * math.pi * i / k), math.sin(2 * math.pi * i / k)) for i in range(k)}
    coords[k] = (0.0, 0.0)
    pairs = [(i, (i + 1) % k) for i in range(k)] + [(i, k) for i in range(k)]
    return plane(coords, pairs, p=p, fg=set(range(k)), marks=marks)


def k4():
    coords = {0: (0.0, 0.0), 1: (4.0, 0.0), 2: (2.0, 3.0), 3: (2.0, 1.0)}
    pairs = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)]
    return plane(coords, pairs, fg={0, 1, 2})


def dart(inst, e, v):
    return dart_of(inst.ends, e, v)
