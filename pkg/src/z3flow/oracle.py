"""Exact search and counting of valid orientations.

Free edges are the unoriented non-loop edges, branched in ascending id with
the direction "tail = lower endpoint id" tried first. A vertex with a single
free edge left forces that edge (or fails). Unoriented loops never matter;
they get tail = their vertex and double the count each.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

from . import kernels
from .graph import Instance, verify

COUNT_BUDGET = 26


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class SearchStats:
    nodes: int
    propagations: int
    result: str  # "SAT" or "UNSAT"
    orientation: Optional[Dict[int, int]] = None

    @property
    def sat(self) -> bool:
        return self.result == "SAT"


def _encode(inst: Instance):
    idx = {v: i for i, v in enumerate(inst.vertices)}
    res0 = [0] * inst.n
    free = []
    for e in sorted(inst.ends):
        a, b = inst.ends[e]
        if a == b:
            continue
        if e in inst.tail:
            x = inst.tail[e]
            h = b if x == a else a
            res0[idx[x]] -= 1
            res0[idx[h]] += 1
        else:
            free.append(e)
    eu, ev = [], []
    for e in free:
        a, b = inst.ends[e]
        lo, hi = (a, b) if a < b else (b, a)
        eu.append(idx[lo])
        ev.append(idx[hi])
    res0 = [r % 3 for r in res0]
    need = [inst.p[v] % 3 for v in inst.vertices]
    return free, eu, ev, res0, need


def _decode(inst: Instance, free, assign) -> Dict[int, int]:
    o = dict(inst.tail)
    for e, c in zip(free, assign):
        a, b = inst.ends[e]
        lo, hi = (a, b) if a < b else (b, a)
        o[e] = lo if c == 0 else hi
    for e, (a, b) in inst.ends.items():
        if a == b and e not in o:
            o[e] = a
    return o


def solve(inst: Instance, limit: int = 0, backend=None) -> SearchStats:
    """Find a valid orientation extending the fixed edges, or prove none exists.

    ``limit`` caps the number of branch nodes (``OverflowError`` past it).
    """
    k = kernels.backend(backend)
    free, eu, ev, res0, need = _encode(inst)
    cnt, first, nodes, props = k.orient_search(inst.n, eu, ev, res0, need, kernels.SOLVE, limit)
    if not cnt:
        return SearchStats(nodes, props, "UNSAT")
    o = _decode(inst, free, first)
    rep = verify(inst, o)
    assert rep.valid, f"oracle certificate failed verification at {rep.offenders}"
    return SearchStats(nodes, props, "SAT", o)


def count(inst: Instance, budget: int = COUNT_BUDGET, backend=None,
          gate: bool = True) -> int:
    """Number of valid total orientations extending the fixed edges.

    With ``gate`` an instance whose prescription does not sum to 0 mod 3
    returns 0 without searching (only reachable for instances built with
    the prescription check disabled).
    """
    unoriented = [e for e in inst.ends if e not in inst.tail]
    if len(unoriented) > budget:
        raise BudgetExceeded(f"{len(unoriented)} unoriented edges exceed the budget of {budget}")
    if gate and sum(inst.p.values()) % 3 != 0:
        return 0
    k = kernels.backend(backend)
    free, eu, ev, res0, need = _encode(inst)
    loops = sum(1 for e in unoriented if inst.is_loop(e))
    cnt, _, _, _ = k.orient_search(inst.n, eu, ev, res0, need, kernels.COUNT, 0)
    return cnt << loops


def enumerate_orientations(inst: Instance):
    """Brute-force generator over all extensions of the fixed edges (tests only)."""
    from itertools import product

    free = [e for e in sorted(inst.ends) if e not in inst.tail]
    for bits in product((0, 1), repeat=len(free)):
        o = dict(inst.tail)
        for e, c in zip(free, bits):
            o[e] = inst.ends[e][c]
        yield o
