import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import k4, parallel3, plane, wheel
from mutations import random_mutation, prediction_matches
from z3flow import families, graph, oracle
from z3flow.graph import (InstanceError, NotPlanarError, OrientationError, PrescriptionError,
                          build, contract, delete_edge, delete_vertex, lift, residual, verify, z3)

SEEDS = st.integers(0, 2**32 - 1)


# -- build -------------------------------------------------------------------


def test_single_vertex_has_one_face():
    inst = build({0: 0}, {}, {0: []})
    assert inst.face_count() == 1
    assert inst.euler_ok()


def test_three_parallel_edges_have_three_faces():
    inst = parallel3()
    assert (inst.n, inst.m, inst.face_count()) == (2, 3, 3)


def test_d5b_graph_has_five_edges_and_four_faces():
    inst = families.gen_d5b()
    assert (inst.n, inst.m, inst.face_count()) == (3, 5, 4)


def test_nonplanar_rotation_is_rejected():
    with pytest.raises(NotPlanarError):
        build({0: 1, 1: -1}, {0: (0, 1), 1: (0, 1), 2: (0, 1)}, {0: [0, 1, 2], 1: [0, 1, 2]})


def test_bad_prescription_sum_is_rejected():
    with pytest.raises(PrescriptionError):
        parallel3(p=(1, 0))


def test_prescription_check_can_be_bypassed():
    inst = build({0: 1, 1: 0}, {0: (0, 1)}, {0: [0], 1: [0]}, check_prescription=False)
    assert sum(inst.p.values()) == 1


def test_rotation_must_cover_incident_edges():
    with pytest.raises(InstanceError):
        build({0: 0, 1: 0}, {0: (0, 1)}, {0: [0], 1: []})


def test_repeated_dart_is_rejected():
    with pytest.raises(InstanceError):
        build({0: 1, 1: -1}, {0: (0, 1), 1: (0, 1)}, {0: [0, 0], 1: [1, 0]})


def test_directed_vertex_must_be_fully_oriented():
    with pytest.raises(OrientationError):
        build({0: 1, 1: -1}, {0: (0, 1), 1: (0, 1), 2: (0, 1)}, {0: [0, 1, 2], 1: [2, 1, 0]},
              {0: 0}, marks={"d": 0})


def test_directed_vertex_residual_must_meet_prescription():
    with pytest.raises(OrientationError):
        build({0: 1, 1: -1}, {0: (0, 1), 1: (0, 1), 2: (0, 1)}, {0: [0, 1, 2], 1: [2, 1, 0]},
              {0: 0, 1: 0, 2: 0}, marks={"d": 0})


def test_face_handles_are_minimum_darts():
    inst = wheel(5)
    for h, orbit in inst.faces.items():
        assert h == min(orbit)
    assert inst.fg in inst.faces


def test_trace_faces_agrees_with_cached_faces():
    inst = k4()
    assert graph.trace_faces(inst) == {h: frozenset(o) for h, o in inst.faces.items()}


# -- residual and verify -------------------------------------------------------


def test_loop_contributes_nothing():
    inst = build({0: 0}, {0: (0, 0)}, {0: [0, 0]})
    assert residual(inst, 0, {0: 0}) == 0


def test_residual_two_in_one_out():
    inst = parallel3()
    assert residual(inst, 1, {0: 0, 1: 0, 2: 1}) == 1


def test_residual_at_t_in_d5b_counts_both_fixed_edges():
    inst = families.gen_d5b()
    t = inst.marks["t"]
    assert residual(inst, t) == z3(2) == -1


def test_empty_graph_verifies():
    inst = build({}, {}, {})
    assert verify(inst, {}).valid


def test_two_edges_tailed_at_v2_is_valid():
    inst = parallel3()
    assert verify(inst, {0: 1, 1: 1, 2: 0}).valid


def test_pentagon_wheel_has_no_valid_orientation():
    inst = families.gen_ts33b()
    offenders = [verify(inst, o).offenders for o in oracle.enumerate_orientations(inst)]
    assert len(offenders) == 2 ** 10
    assert all(offenders)


def test_verify_rejects_flipped_fixed_edge():
    inst = families.gen_d5b()
    o = dict(inst.tail)
    o[4] = 1
    o[0] = 1
    with pytest.raises(OrientationError):
        verify(inst, o)


def test_verify_rejects_missing_edge():
    with pytest.raises(OrientationError):
        verify(parallel3(), {0: 0})


def test_vertex_choices_meet_prescription():
    inst = wheel(5, p={0: 1, 1: 0, 2: 0, 3: 0, 4: 0, 5: -1})
    for v in inst.vertices:
        chs = graph.vertex_choices(inst, v)
        assert chs
        for ch in chs:
            assert residual(inst, v, ch) == inst.p[v]
        assert graph.orient_vertex_choice(inst, v) in chs


# -- delete_edge -----------------------------------------------------------------


def test_deleting_a_parallel_edge_drops_one_face():
    inst = parallel3()
    child, _ = delete_edge(inst, 1)
    assert child.face_count() == inst.face_count() - 1


def test_deleting_a_boundary_edge_merges_into_fg():
    inst = wheel(5)
    e = next(e for e in inst.face_edges(inst.fg))
    other = inst.face_of[2 * e] if inst.face_of[2 * e] != inst.fg else inst.face_of[2 * e + 1]
    union = (set(inst.faces[inst.fg]) | set(inst.faces[other])) - {2 * e, 2 * e + 1}
    child, _ = delete_edge(inst, e)
    assert set(child.faces[child.fg]) == union
    assert child.fgs is None


def test_deleting_the_edge_between_fg_and_fgs_leaves_one_face():
    # 4-cycle with the chord 0-2; F_G and F_G* are the two triangles
    coords = {0: (0.0, 0.0), 1: (1.0, -1.0), 2: (2.0, 0.0), 3: (1.0, 1.0)}
    inst = plane(coords, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], fg={0, 1, 2}, fgs={0, 2, 3})
    assert len(inst.specified) == 2
    union = (set(inst.faces[inst.fg]) | set(inst.faces[inst.fgs])) - {8, 9}
    child, remap = delete_edge(inst, 4)
    assert child.fg is not None and child.fgs is None
    assert set(child.faces[child.fg]) == union and len(union) == 4
    assert 4 in remap.fixed


def test_delete_edge_folds_direction_into_prescriptions():
    inst = parallel3()
    child, remap = delete_edge(inst, 0, tail=1)
    # the edge enters 0, so 0 needs one less and 1 one more
    assert child.p == {0: z3(1 - 1), 1: z3(-1 + 1)}
    assert remap.fixed == {0: 1}


# -- delete_vertex ---------------------------------------------------------------


def test_deleting_a_degree_one_vertex_keeps_face_count():
    coords = {0: (0.0, 0.0), 1: (2.0, 0.0), 2: (1.0, 1.5), 3: (1.0, 0.6)}
    inst = plane(coords, [(0, 1), (1, 2), (2, 0), (3, 2)], p={0: 0, 1: 0, 2: 1, 3: -1})
    child, _ = delete_vertex(inst, 3)
    assert child.face_count() == inst.face_count()


def test_deleting_a_degree_three_boundary_vertex_absorbs_its_faces():
    inst = wheel(5)
    v = 0
    faces = {inst.face_of[x] for x in inst.rotation[v]}
    assert len(faces) == 3
    removed = {y for x in inst.rotation[v] for y in (x, x ^ 1)}
    want = set().union(*(set(inst.faces[h]) for h in faces)) - removed
    child, _ = delete_vertex(inst, v)
    assert set(child.faces[child.fg]) == want


def test_deleting_a_vertex_on_fgs_leaves_one_face():
    inst = wheel(5)
    tri = next(h for h in inst.faces if h != inst.fg and 0 in inst.face_vertices(h))
    inst = families._with_faces(inst, inst.fg, tri)
    child, _ = delete_vertex(inst, 0)
    assert child.fg is not None and child.fgs is None


# -- contract --------------------------------------------------------------------


def test_contracting_an_edge_adds_prescriptions():
    coords = {0: (0.0, 0.0), 1: (1.0, 0.0), 2: (0.5, 1.0)}
    inst = plane(coords, [(0, 1), (1, 2), (2, 0)], p={0: 1, 1: -1, 2: 0})
    child, _ = contract(inst, {0, 1})
    assert child.p[0] == 0
    assert child.degree(0) == 2


def test_contracting_the_boundaries_of_both_faces_keeps_a_face_at_the_root():
    inst = wheel(6)
    tri = next(h for h in inst.faces if h != inst.fg and inst.face_vertices(h) == {0, 1, 6})
    inst = families._with_faces(inst, inst.fg, tri)
    S = set(range(7)) - {3}
    child, _ = contract(inst, S)
    assert child.fg is not None
    assert min(S) in child.face_vertices(child.fg)


def test_contracting_the_far_side_of_a_four_cut_gives_a_degree_four_boundary_vertex():
    inst = wheel(6)
    A = {0, 1, 2}
    B = set(inst.vertices) - A
    child, _ = contract(inst, B)
    root = min(B)
    assert child.degree(root) == len([e for e, (a, b) in inst.ends.items() if (a in A) != (b in A)])
    assert root in child.face_vertices(child.fg)


def test_contraction_remap_leaves_internal_edges_undirected():
    inst = wheel(5)
    child, remap = contract(inst, {0, 1})
    o = oracle.solve(child).orientation
    back = remap.pullback(o)
    internal = {e for e, (a, b) in inst.ends.items() if {a, b} <= {0, 1}}
    assert set(back) == set(inst.ends) - internal


# -- lift ------------------------------------------------------------------------


def test_lifting_two_parallel_edges_makes_a_loop():
    inst = parallel3(p=(0, 0))
    u, v = 0, 1
    child, remap = lift(inst, 0, 1)
    new = max(child.ends)
    assert child.ends[new] == (u, u) or child.ends[new] == (v, v)
    mid = remap.lifted[new][3]
    assert child.degree(mid) == inst.degree(mid) - 2


def test_lifting_a_boundary_edge_with_an_interior_edge_uses_the_new_edge_on_fg():
    inst = wheel(5)
    e1 = next(e for e, (a, b) in inst.ends.items() if {a, b} == {0, 1})
    e2 = next(e for e, (a, b) in inst.ends.items() if {a, b} == {1, 5})
    child, _ = lift(inst, e1, e2)
    new = max(child.ends)
    assert new in child.face_edges(child.fg)


def test_lift_rejects_nonconsecutive_edges():
    inst = wheel(6)
    e1 = next(e for e, (a, b) in inst.ends.items() if {a, b} == {0, 6})
    e2 = next(e for e, (a, b) in inst.ends.items() if {a, b} == {2, 6})
    with pytest.raises(InstanceError):
        lift(inst, e1, e2)


# -- properties ------------------------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(SEEDS)
def test_mutations_keep_euler_prescription_and_faces(seed):
    rng = np.random.default_rng(seed)
    inst = families.random_instance(rng, faces=int(rng.integers(0, 3)))
    got = random_mutation(inst, rng)
    if got is None:
        return
    op, pred, child, remap = got
    assert child.euler_ok()
    assert sum(child.p.values()) % 3 == 0
    assert prediction_matches(pred, child), op


@settings(max_examples=150, deadline=None)
@given(SEEDS)
def test_transfer_back_is_sound(seed):
    rng = np.random.default_rng(seed)
    inst = families.random_instance(rng, orient_rate=0.0)
    op = ("delete_edge", "delete_vertex", "lift")[int(rng.integers(3))]
    got = random_mutation(inst, rng, op)
    if got is None:
        return
    _, _, child, remap = got
    st_ = oracle.solve(child)
    if not st_.sat:
        return
    back = remap.pullback(st_.orientation)
    assert set(back) == set(inst.ends)
    assert verify(inst, back).valid


@settings(max_examples=100, deadline=None)
@given(SEEDS)
def test_lift_changes_only_the_middle_degree(seed):
    rng = np.random.default_rng(seed)
    inst = families.random_instance(rng, orient_rate=0.0)
    got = random_mutation(inst, rng, "lift")
    if got is None:
        return
    _, _, child, remap = got
    new = max(child.ends)
    mid = remap.lifted[new][3]
    for v in inst.vertices:
        assert child.degree(v) == inst.degree(v) - (2 if v == mid else 0)
    assert new not in child.tail


def test_reverse_negates_prescription_and_flips_fixed_edges():
    inst = families.gen_d5b()
    rev = graph.reverse(inst)
    assert all(rev.p[v] == z3(-inst.p[v]) for v in inst.vertices)
    for e, x in inst.tail.items():
        assert rev.tail[e] == inst.other_end(e, x)
