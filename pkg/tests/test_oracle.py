"""Exact search and counting."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from z3flow import families, oracle
from z3flow.graph import build, reverse, verify

from helpers import parallel3


def _brute_count(inst):
    return sum(1 for o in oracle.enumerate_orientations(inst) if verify(inst, o).valid)


def test_parallel3_sat_with_three_orientations():
    inst = parallel3()
    st_ = oracle.solve(inst)
    assert st_.sat and verify(inst, st_.orientation).valid
    # p(0)=+1 needs in-out = 1 mod 3 at 0: exactly two of three edges inward
    assert oracle.count(inst) == 3 == _brute_count(inst)


def test_d5b_unsat():
    assert oracle.solve(families.gen_d5b()).result == "UNSAT"


def test_star_k1_unsat():
    inst = families.gen_star(1)
    assert inst.m == 18
    assert not oracle.solve(inst).sat
    assert oracle.count(inst) == 0


def test_empty_graph_counts_one():
    inst = build({0: 0}, {}, {0: []})
    assert oracle.count(inst) == 1
    assert oracle.solve(inst).sat


def test_ts33b_count_zero_exhaustive():
    inst = families.gen_ts33b()
    assert inst.m == 10
    assert oracle.count(inst) == 0
    assert _brute_count(inst) == 0


def test_unoriented_loop_doubles_count():
    inst = build({0: 1, 1: -1}, {0: (0, 1), 1: (0, 1), 2: (0, 1), 3: (0, 0)},
                 {0: [0, 1, 2, 3, 3], 1: [2, 1, 0]})
    assert oracle.count(inst) == 6 == _brute_count(inst)


def test_invalid_prescription_gated():
    inst = build({0: 1, 1: 0}, {0: (0, 1), 1: (0, 1), 2: (0, 1)},
                 {0: [0, 1, 2], 1: [2, 1, 0]}, check_prescription=False)
    assert oracle.count(inst) == 0
    # without the gate the search itself finds nothing (residuals sum to 0)
    assert oracle.count(inst, gate=False) == 0
    assert not oracle.solve(inst).sat


def test_budget_exceeded():
    with pytest.raises(oracle.BudgetExceeded):
        oracle.count(families.gen_star(2), budget=10)


def test_node_limit():
    with pytest.raises(OverflowError):
        oracle.solve(families.gen_star(2), limit=5)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_count_agrees_with_brute_force(seed):
    inst = families.random_instance(np.random.default_rng(seed), max_edges=12, max_vertices=6)
    c = oracle.count(inst)
    assert c == _brute_count(inst)
    assert (c > 0) == oracle.solve(inst).sat


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_reversal_preserves_count(seed):
    inst = families.random_instance(np.random.default_rng(seed), max_edges=16)
    assert oracle.count(inst) == oracle.count(reverse(inst))
