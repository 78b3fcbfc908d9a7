"""Reader and canonical writer for the ``z3g`` text format.

One directive per line, ``#`` starts a comment::

    z3g 1
    vertex <id> p=<-1|0|1> [mark=d|t|s|r]
    edge <id> <u> <v>
    rot <vertex> <edges counterclockwise; a loop's id twice>
    orient <edge> <tail>
    face FG|FGS <edge> <vertex> [1|2]

In a ``rot`` line the first listed occurrence of a loop is its dart ``2e``.
When no starting point of the cyclic list makes that hold for every loop
the writer spells a loop end as ``<edge>:<1|2>``; the reader accepts that
anywhere. The optional last field of ``face`` picks a loop's dart the same
way. The canonical writer orders directives by kind and then id.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

from .graph import Instance, InstanceError, _check_and_canonicalize

HEADER = "z3g 1"
MARKS = ("d", "t", "s", "r")


class FormatError(InstanceError):
    """Malformed input; ``line`` is 1-based, 0 when not tied to a line."""

    def __init__(self, msg: str, line: int = 0):
        super().__init__(f"line {line}: {msg}" if line else msg)
        self.line = line


def _int(tok: str, line: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"{what} must be an integer, got {tok!r}", line) from None


def _lines(text: str):
    for i, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if s:
            yield i, s.split()


@dataclass
class _Doc:
    vertices: Dict[int, int]
    vline: Dict[int, int]
    marks: Dict[str, int]
    edges: Dict[int, Tuple[int, int]]
    eline: Dict[int, int]
    rot: Dict[int, List[Tuple[int, Optional[int]]]]
    rline: Dict[int, int]
    orient: Dict[int, int]
    faces: Dict[str, Tuple[int, int, int]]


def _parse_doc(text: str) -> _Doc:
    doc = _Doc({}, {}, {}, {}, {}, {}, {}, {}, {})
    seen_header = False
    for ln, tok in _lines(text):
        kind = tok[0]
        if not seen_header:
            if tok != ["z3g", "1"]:
                raise FormatError("expected header 'z3g 1'", ln)
            seen_header = True
            continue
        if kind == "vertex":
            if len(tok) < 3:
                raise FormatError("vertex needs an id and p=<value>", ln)
            v = _int(tok[1], ln, "vertex id")
            if v in doc.vertices:
                raise FormatError(f"duplicate vertex {v}", ln)
            p = None
            for t in tok[2:]:
                key, _, val = t.partition("=")
                if key == "p":
                    p = _int(val, ln, "prescription")
                    if p not in (-1, 0, 1):
                        raise FormatError(f"prescription must be -1, 0 or 1, got {p}", ln)
                elif key == "mark":
                    if val not in MARKS:
                        raise FormatError(f"unknown mark {val!r}", ln)
                    if val in doc.marks:
                        raise FormatError(f"mark {val} used twice", ln)
                    doc.marks[val] = v
                else:
                    raise FormatError(f"unknown vertex field {t!r}", ln)
            if p is None:
                raise FormatError(f"vertex {v} has no p=", ln)
            doc.vertices[v] = p
            doc.vline[v] = ln
        elif kind == "edge":
            if len(tok) != 4:
                raise FormatError("edge needs <id> <u> <v>", ln)
            e, a, b = (_int(t, ln, "edge field") for t in tok[1:])
            if e < 0:
                raise FormatError("edge ids must be nonnegative", ln)
            if e in doc.edges:
                raise FormatError(f"duplicate edge {e}", ln)
            for x in (a, b):
                if x not in doc.vertices:
                    raise FormatError(f"edge {e} names unknown vertex {x}", ln)
            doc.edges[e] = (a, b)
            doc.eline[e] = ln
        elif kind == "rot":
            if len(tok) < 2:
                raise FormatError("rot needs a vertex", ln)
            v = _int(tok[1], ln, "vertex id")
            if v not in doc.vertices:
                raise FormatError(f"rot names unknown vertex {v}", ln)
            if v in doc.rot:
                raise FormatError(f"second rot line for vertex {v}", ln)
            items: List[Tuple[int, Optional[int]]] = []
            for t in tok[2:]:
                es, _, occ = t.partition(":")
                e = _int(es, ln, "edge id")
                if e not in doc.edges:
                    raise FormatError(f"rot at vertex {v} names unknown edge {e}", ln)
                a, b = doc.edges[e]
                if v not in (a, b):
                    raise FormatError(f"edge {e} is not incident with vertex {v}", ln)
                o = None
                if occ:
                    o = _int(occ, ln, "loop occurrence")
                    if a != b or o not in (1, 2):
                        raise FormatError(f"bad loop end {t!r}", ln)
                items.append((e, o))
            counts: Dict[int, int] = {}
            for e, _ in items:
                counts[e] = counts.get(e, 0) + 1
                a, b = doc.edges[e]
                if counts[e] > (2 if a == b else 1):
                    raise FormatError(f"repeated dart: edge {e} listed too often at vertex {v}", ln)
            occs = [(e, o) for e, o in items if o is not None]
            if occs and len({(e, o) for e, o in occs}) != len(occs):
                raise FormatError(f"repeated dart at vertex {v}", ln)
            doc.rot[v] = items
            doc.rline[v] = ln
        elif kind == "orient":
            if len(tok) != 3:
                raise FormatError("orient needs <edge> <tail>", ln)
            e, x = _int(tok[1], ln, "edge id"), _int(tok[2], ln, "tail")
            if e not in doc.edges:
                raise FormatError(f"orient names unknown edge {e}", ln)
            if x not in doc.edges[e]:
                raise FormatError(f"vertex {x} is not an end of edge {e}", ln)
            if e in doc.orient:
                raise FormatError(f"edge {e} oriented twice", ln)
            doc.orient[e] = x
        elif kind == "face":
            if len(tok) not in (4, 5) or tok[1] not in ("FG", "FGS"):
                raise FormatError("face needs FG|FGS <edge> <vertex> [1|2]", ln)
            if tok[1] in doc.faces:
                raise FormatError(f"face {tok[1]} given twice", ln)
            e, v = _int(tok[2], ln, "edge id"), _int(tok[3], ln, "vertex id")
            occ = _int(tok[4], ln, "loop occurrence") if len(tok) == 5 else 1
            if e not in doc.edges or v not in doc.edges[e]:
                raise FormatError(f"face {tok[1]} names no dart ({e}, {v})", ln)
            doc.faces[tok[1]] = (e, v, occ)
        else:
            raise FormatError(f"unknown directive {kind!r}", ln)
    if not seen_header:
        raise FormatError("empty file: expected header 'z3g 1'", 1)
    for e, (a, b) in doc.edges.items():
        for x in {a, b}:
            want = 2 if a == b else 1
            got = sum(1 for f, _ in doc.rot.get(x, []) if f == e)
            if got != want:
                raise FormatError(f"edge {e} appears {got} times in the rotation at {x}, expected {want}",
                                  doc.rline.get(x, doc.eline[e]))
    return doc


def parse(text: str, check_prescription: bool = True) -> Instance:
    """Parse a z3g document into a validated instance."""
    doc = _parse_doc(text)
    rot: Dict[int, Tuple[int, ...]] = {}
    for v in doc.vertices:
        darts, seen = [], {}
        for e, o in doc.rot.get(v, []):
            a, b = doc.edges[e]
            if a != b:
                darts.append(2 * e if a == v else 2 * e + 1)
                continue
            if o is None:
                o = 2 if e in seen else 1
            if seen.get(e) == o:
                raise FormatError(f"repeated dart: loop {e} end {o} at vertex {v}", doc.rline[v])
            seen[e] = o
            darts.append(2 * e + o - 1)
        rot[v] = tuple(darts)
    raw = Instance(tuple(doc.vertices), dict(doc.edges), rot, dict(doc.vertices),
                   dict(doc.orient), _dart(doc, "FG"), _dart(doc, "FGS"), dict(doc.marks))
    return _check_and_canonicalize(raw, check_prescription)


def _dart(doc: _Doc, which: str) -> Optional[int]:
    if which not in doc.faces:
        return None
    e, v, occ = doc.faces[which]
    a, b = doc.edges[e]
    if a == b:
        return 2 * e + occ - 1
    return 2 * e if v == a else 2 * e + 1


def _dart_tokens(inst: Instance, v: int) -> List[str]:
    darts = list(inst.rotation[v])
    k = len(darts)
    loops = {x >> 1 for x in darts if inst.is_loop(x >> 1)}
    if not loops:
        return [str(x >> 1) for x in darts]
    for s in range(k):
        seq = darts[s:] + darts[:s]
        pos = {x: i for i, x in enumerate(seq)}
        if all(pos[2 * e] < pos[2 * e + 1] for e in loops):
            return [str(x >> 1) for x in seq]
    return [f"{x >> 1}:{(x & 1) + 1}" if (x >> 1) in loops else str(x >> 1) for x in darts]


def _face_tokens(inst: Instance, h: int) -> str:
    e, v = h >> 1, inst.dart_vertex(h)
    s = f"{e} {v}"
    if inst.is_loop(e):
        s += f" {(h & 1) + 1}"
    return s


def write(inst: Instance) -> str:
    """Canonical z3g text for ``inst``."""
    by_vertex: Dict[int, List[str]] = {}
    for name in MARKS:
        if name in inst.marks:
            by_vertex.setdefault(inst.marks[name], []).append(name)
    out = [HEADER]
    for v in sorted(inst.vertices):
        extra = "".join(f" mark={m}" for m in by_vertex.get(v, []))
        out.append(f"vertex {v} p={inst.p[v]}{extra}")
    for e in sorted(inst.ends):
        a, b = inst.ends[e]
        out.append(f"edge {e} {a} {b}")
    for v in sorted(inst.vertices):
        toks = _dart_tokens(inst, v)
        out.append(" ".join(["rot", str(v)] + toks))
    for e in sorted(inst.tail):
        out.append(f"orient {e} {inst.tail[e]}")
    if inst.fg is not None:
        out.append(f"face FG {_face_tokens(inst, inst.fg)}")
    if inst.fgs is not None:
        out.append(f"face FGS {_face_tokens(inst, inst.fgs)}")
    return "\n".join(out) + "\n"


def parse_orientation(text: str, inst: Optional[Instance] = None) -> Dict[int, int]:
    """Read ``orient`` lines (other directives are not allowed)."""
    o: Dict[int, int] = {}
    for ln, tok in _lines(text):
        if tok == ["z3g", "1"]:
            continue
        if tok[0] != "orient" or len(tok) != 3:
            raise FormatError("orientation files hold only 'orient <edge> <tail>' lines", ln)
        e, x = _int(tok[1], ln, "edge id"), _int(tok[2], ln, "tail")
        if e in o:
            raise FormatError(f"edge {e} oriented twice", ln)
        if inst is not None:
            if e not in inst.ends:
                raise FormatError(f"unknown edge {e}", ln)
            if x not in inst.ends[e]:
                raise FormatError(f"vertex {x} is not an end of edge {e}", ln)
        o[e] = x
    return o


def write_orientation(o: Mapping[int, int]) -> str:
    return "".join(f"orient {e} {o[e]}\n" for e in sorted(o))
