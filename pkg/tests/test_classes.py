import numpy as np
from hypothesis import given, settings, strategies as st

from helpers import corpus, k4, plane, wheel
from z3flow import classes, cuts, families, oracle
from z3flow.graph import build, replace, residual

SEEDS = st.integers(0, 2**32 - 1)


def _prism():
    coords = {0: (0.0, 0.0), 1: (4.0, 0.0), 2: (2.0, 3.5),
              3: (1.5, 1.0), 4: (2.5, 1.0), 5: (2.0, 1.8)}
    pairs = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]
    return plane(coords, pairs, fg={0, 1, 2}, fgs={3, 4, 5})


def test_single_vertex_is_a_dts_graph():
    assert classes.check_dts(build({0: 0}, {}, {0: []})).passed


def test_two_vertices_are_dts_and_ft_by_fiat():
    inst = build({0: 1, 1: -1}, {e: (0, 1) for e in range(3)}, {0: [0, 1, 2], 1: [2, 1, 0]}, fg=(0, 0))
    assert classes.check_dts(inst).passed
    assert classes.check_ft(inst).passed


def test_wheel_with_unmarked_rim_fails_dts():
    rep = classes.check_dts(wheel(6))
    assert not rep.passed
    assert "6" in rep.clauses()
    stars = [w for c, w in rep.violations if c == "6"]
    assert all(isinstance(w, cuts.Cut) and w.size == 3 for w in stars)
    assert {next(iter(w.side)) if len(w.side) == 1 else next(iter(w.rest)) for w in stars} == set(range(6))


def _marked_wheel():
    """Wheel with t, s and a directed d on the rim; rim vertex 3 is an
    unmarked degree-3 vertex whose star keeps all marks on one side."""
    inst = wheel(5, marks={"t": 0, "s": 1})
    d = 2
    tail = {e: d for e in inst.incident[d]}
    r = residual(inst, d, tail)
    p = {**inst.p, d: r, 5: -r}
    return replace(inst, tail=tail, p=p, marks={**inst.marks, "d": d})


def test_three_cut_with_all_marks_on_one_side_fails_3dts():
    inst = _marked_wheel()
    rep = classes.check_3dts(inst)
    cut_witnesses = [w for c, w in rep.violations if c == "6'" and isinstance(w, cuts.Cut)]
    marked = set(inst.marks.values())
    assert cut_witnesses
    for w in cut_witnesses:
        assert marked <= w.side or marked <= w.rest


def test_three_cut_separating_t_is_allowed_by_3dts():
    inst = _marked_wheel()
    rep = classes.check_3dts(inst)
    star_t = cuts.vertex_star(inst, inst.marks["t"])
    assert all(w != star_t for _, w in rep.violations)


def test_dts_members_pass_3dts():
    for inst in corpus("DTS")[:60]:
        assert classes.check_3dts(inst).passed


def test_dts_members_without_d_pass_rst():
    seen = 0
    for inst in corpus("DTS"):
        if inst.d is None:
            seen += 1
            assert classes.check_rst(inst).passed
    assert seen


def test_pentagon_wheel_fails_rst():
    inst = families.gen_ts33b()
    inst = replace(inst, marks={})
    rep = classes.check_rst(inst)
    assert not rep.passed
    rim3 = [v for v in inst.face_vertices(inst.fg) if inst.degree(v) == 3]
    assert len(rim3) == 5


def test_k4_without_marks_fails_rst():
    assert not classes.check_rst(k4()).passed
    assert not classes.check_3rst(k4()).passed


def test_dts_with_at_most_one_special_vertex_is_ft():
    checked = 0
    for inst in corpus("DTS"):
        if len(inst.marks) > 1 or inst.n <= 2:
            continue
        marks = dict(inst.marks)
        if "s" in marks:
            marks = {"t": marks.pop("s")}
        fgv = inst.face_vertices(inst.fg)
        need = inst.d
        for h in sorted(inst.faces):
            if h == inst.fg or not (inst.face_vertices(h) & fgv):
                continue
            if need is not None and need not in inst.face_vertices(h):
                continue
            ft = families._with_faces(replace(inst, marks=marks), inst.fg, h)
            assert classes.check_ft(ft).passed
            checked += 1
            break
    assert checked >= 10


def test_disjoint_specified_faces_fail_ft_clause_3():
    rep = classes.check_ft(_prism())
    assert "3" in rep.clauses()


def test_star_with_d_and_t_fails_ft():
    rep = classes.check_ft(families.gen_star(1))
    assert not rep.passed
    assert "2" in rep.clauses()


def test_check_dispatch_and_unknown_class():
    import pytest
    assert classes.check(wheel(5), "dts").klass == "DTS"
    with pytest.raises(ValueError):
        classes.check(wheel(5), "XYZ")


@settings(max_examples=60, deadline=None)
@given(SEEDS)
def test_witnesses_are_consistent(seed):
    rng = np.random.default_rng(seed)
    inst = families.random_instance(rng, faces=1 + int(rng.integers(0, 2)), orient_rate=0.0)
    for name in classes.KLASSES:
        rep = classes.check(inst, name)
        for clause, w in rep.violations:
            if isinstance(w, cuts.Cut):
                assert w == cuts.make_cut(inst, w.side)
                assert w.size <= 3
            elif isinstance(w, tuple) and w[0] is not None and "degree" in str(w[1]):
                v, text = w
                assert str(inst.degree(v)) in text


def test_three_variants_imply_base_clauses():
    for inst in corpus("DTS")[:40] + corpus("RST")[:40]:
        if classes.check_3dts(inst).passed:
            base = set(classes.check_dts(inst).clauses())
            assert base <= {"6"}
        if classes.check_3rst(inst).passed:
            base = set(classes.check_rst(inst).clauses())
            assert base <= {"4"}


def test_class_members_are_satisfiable():
    for inst in corpus("DTS")[:50] + corpus("FT")[:30] + corpus("RST")[:30]:
        for name in classes.passing_classes(inst):
            assert oracle.solve(inst).sat, name
