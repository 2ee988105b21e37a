import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hof.shuffles import Shuffle, enumerate_shuffles, expand_slash_product, format_term, shuffle_count


def brute_shuffles(r, t):
    slots = list(range(1, t))
    out = set()
    for phi in itertools.permutations(slots, r - 1):
        psi = tuple(j for j in slots if j not in phi)
        if list(phi) == sorted(phi):
            out.add((tuple(phi), psi))
    return out


def test_examples():
    assert len(enumerate_shuffles(1, 4)) == 1 and enumerate_shuffles(1, 4)[0].phi == ()
    assert {(s.phi, s.psi) for s in enumerate_shuffles(2, 4)} == brute_shuffles(2, 4)
    assert len(enumerate_shuffles(2, 4)) == 3
    assert len(enumerate_shuffles(3, 5)) == 6


def test_order_is_lexicographic_on_phi():
    phis = [s.phi for s in enumerate_shuffles(3, 6)]
    assert phis == sorted(phis)


@pytest.mark.parametrize("t", range(1, 8))
def test_counts_are_binomial(t):
    for r in range(1, t + 1):
        sh = enumerate_shuffles(r, t)
        assert len(sh) == math.comb(t - 1, r - 1) == shuffle_count(r, t)
        for s in sh:
            s.check(t)


def test_range_errors():
    with pytest.raises(ValueError):
        enumerate_shuffles(0, 3)
    with pytest.raises(ValueError):
        enumerate_shuffles(4, 3)
    with pytest.raises(ValueError):
        Shuffle((2, 1), ()).check(3)
    with pytest.raises(ValueError):
        Shuffle((1,), (1,)).check(3)


def test_small_expansions():
    e = expand_slash_product(1, 2, 2)
    assert e.lhs == {((), (1,)): 1}
    assert len(expand_slash_product(2, 2, 3).rhs) == 2
    e = expand_slash_product(4, 1, 4)
    assert e.rhs == {((1, 2, 3), ()): 1}
    assert format_term(((1,), (2,))) == "F|(g1-1) * G|(g2-1)"


@given(st.integers(1, 5).flatmap(lambda t: st.tuples(st.integers(1, t), st.just(t))))
def test_shuffle_expansion_identity(rt):
    r, t = rt
    assert expand_slash_product(r, t - r + 1, t).equal


def test_inconsistent_orders():
    with pytest.raises(ValueError):
        expand_slash_product(2, 2, 4)
