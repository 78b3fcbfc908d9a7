import itertools

import pytest
from hypothesis import given, settings, strategies as st

from z3flow import kernels

pytestmark = pytest.mark.skipif(not kernels.have_compiled(), reason="compiled kernels not built")


@st.composite
def problems(draw):
    n = draw(st.integers(1, 7))
    m = draw(st.integers(0, 12))
    eu, ev = [], []
    for _ in range(m):
        a = draw(st.integers(0, n - 1))
        b = draw(st.integers(0, n - 1))
        if a == b:
            continue
        eu.append(min(a, b))
        ev.append(max(a, b))
    res0 = [draw(st.integers(0, 2)) for _ in range(n)]
    need = [draw(st.integers(0, 2)) for _ in range(n)]
    return n, eu, ev, res0, need


def _brute(n, eu, ev, res0, need):
    good = []
    for bits in itertools.product((0, 1), repeat=len(eu)):
        r = list(res0)
        for a, b, c in zip(eu, ev, bits):
            t, h = (a, b) if c == 0 else (b, a)
            r[t] -= 1
            r[h] += 1
        if all((r[i] - need[i]) % 3 == 0 for i in range(n)):
            good.append(list(bits))
    return good


@settings(max_examples=300, deadline=None)
@given(problems())
def test_backends_agree_and_match_brute_force(prob):
    py = kernels.backend("python")
    cc = kernels.backend("compiled")
    good = _brute(*prob)
    for mode in (kernels.SOLVE, kernels.COUNT):
        a = py.orient_search(*prob, mode, 0)
        b = cc.orient_search(*prob, mode, 0)
        assert tuple(a) == tuple(b)
    cnt, first, _, _ = py.orient_search(*prob, kernels.COUNT, 0)
    assert cnt == len(good)
    if good:
        assert list(first) == good[0]


@settings(max_examples=200, deadline=None)
@given(problems(), st.integers(-1, 4))
def test_cut_scan_agrees(prob, kmax):
    n, eu, ev, _, _ = prob
    a = kernels.backend("python").cut_scan(n, eu, ev, kmax)
    b = kernels.backend("compiled").cut_scan(n, eu, ev, kmax)
    assert (list(a[0]), a[1]) == (list(b[0]), b[1])


def test_node_limit_raises_in_both_backends():
    n = 8
    eu = [i for i in range(n) for _ in range(2)]
    ev = [(i + 1) % n if (i + 1) % n > i else 0 for i in range(n) for _ in range(2)]
    eu, ev = [min(a, b) for a, b in zip(eu, ev)], [max(a, b) for a, b in zip(eu, ev)]
    for name in ("python", "compiled"):
        with pytest.raises(OverflowError):
            kernels.backend(name).orient_search(n, eu, ev, [0] * n, [1] * (n - 1) + [2],
                                                kernels.COUNT, 1)


def test_backend_selector_names():
    assert kernels.backend("python").__name__.endswith("_kernels_py")
    assert kernels.BACKEND in ("python", "compiled")
    with pytest.raises(ValueError):
        kernels.backend("fortran")
