import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hof.indices import (
    chebyshev_T,
    chebyshev_U,
    count_sequences,
    dim_quotient,
    enumerate_index_vectors,
    higher_weight_table,
    in_I,
    in_I_prime,
    label_key,
    labels,
    vector_key,
    weight2_table,
)


def brute(g, t, which):
    labs = [s * j for j in range(1, g + 1) for s in (1, -1)]
    out = []
    for v in itertools.product(labs, repeat=t):
        if any(v[i] == -1 and v[i + 1] == 1 for i in range(t - 1)):
            continue
        if which == "I" and v[-1] < 0:
            continue
        out.append(v)
    return out


def test_enumeration_examples():
    assert enumerate_index_vectors(1, 2, "I") == [(1, 1)]
    assert len(enumerate_index_vectors(2, 2, "I'")) == 15
    assert enumerate_index_vectors(1, 1, "I") == [(1,)]


def test_label_order():
    assert labels(3) == [1, -1, 2, -2, 3, -3]
    assert sorted([-2, 2, -1, 1], key=label_key) == [1, -1, 2, -2]


@pytest.mark.parametrize("g,t", [(1, 3), (2, 3), (3, 2), (2, 4)])
@pytest.mark.parametrize("which", ["I", "I'"])
def test_enumeration_matches_bruteforce_in_canonical_order(g, t, which):
    got = enumerate_index_vectors(g, t, which)
    assert sorted(brute(g, t, which), key=vector_key) == got
    assert len(set(got)) == len(got)


def test_enumeration_guard():
    with pytest.raises(ValueError):
        enumerate_index_vectors(10, 8)
    with pytest.raises(ValueError):
        enumerate_index_vectors(0, 2)


def test_count_examples():
    b, a = count_sequences(1, 8)
    assert b[1:] == [t + 1 for t in range(1, 9)]
    assert count_sequences(2, 5)[0][1:] == [4, 15, 56, 209, 780]
    assert all(x == 0 for x in count_sequences(0, 6)[1][1:])


@given(st.integers(0, 6), st.integers(1, 12))
def test_recurrence_relations(g, t_max):
    b, a = count_sequences(g, t_max)
    assert b[1] == 2 * g
    if t_max >= 2 and g > 0:
        assert b[2] == 4 * g * g - 1
    for t in range(1, t_max + 1):
        assert b[t] - a[t] == g * b[t - 1]


@given(st.integers(1, 6), st.integers(1, 12))
def test_chebyshev_cross_check(g, t):
    b, a = count_sequences(g, t)
    assert abs(chebyshev_T(g, t) - a[t]) <= 1e-9 * max(1, abs(a[t]))
    assert abs(chebyshev_U(g, t) - b[t]) <= 1e-9 * max(1, abs(b[t]))


@given(st.integers(2, 6), st.integers(1, 10))
def test_monotone_in_t(g, t):
    a = count_sequences(g, t + 1)[1]
    assert a[t + 1] > a[t]


def test_dim_examples():
    assert dim_quotient(2, 3) == 26
    assert dim_quotient(1, 4) == 1
    assert dim_quotient(3, 2, 4, 2) == 12
    assert dim_quotient(0, 3) == 0
    with pytest.raises(ValueError):
        dim_quotient(2, 2, 3)
    with pytest.raises(ValueError):
        dim_quotient(2, 2, 4)


def test_tables_shape():
    assert weight2_table([1, 2], 2) == [[1, 2], [1, 7]]
    assert higher_weight_table([1, 2], 3, 1) == [[2, 4], [3, 15]]


@given(st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=6))
def test_I_definitions(v):
    assert in_I(v) == (in_I_prime(v) and v[-1] > 0)
