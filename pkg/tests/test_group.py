import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hof.group import (
    GroupElement,
    GroupError,
    coset_reps_infinity,
    default_group,
    gamma0,
    group_to_config,
    load_group_config,
    moebius_apply,
    random_word,
    reduce_sl2z,
    reduce_to_fundamental,
    y_gamma,
)

G11 = default_group()


@st.composite
def sl2z(draw, level=1, bound=30):
    c = level * draw(st.integers(-bound, bound))
    d = draw(st.integers(-bound * level, bound * level).filter(lambda d: d != 0))
    if math.gcd(c, d) != 1:
        d = 1 if c == 0 else c + 1 if math.gcd(c, c + 1) == 1 else 1
        if math.gcd(c, d) != 1:
            c, d = 0, 1
    g, x, y = _egcd(d, c)
    # a d - b c = 1 with a = x, b = -y
    return GroupElement(x, -y, c, d)


def _egcd(a, b):
    if b == 0:
        return (a, 1, 0) if a > 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


points = st.builds(complex, st.floats(-3, 3), st.floats(0.05, 4))


def test_moebius_examples():
    assert moebius_apply(GroupElement.identity(), 1j) == (1j, 1, 1)
    w, j, e = moebius_apply(GroupElement(0, -1, 1, 0), 1j)
    assert abs(w - 1j) < 1e-15 and abs(j - 1j) < 1e-15 and abs(e - 1j) < 1e-15
    w, j, e = moebius_apply(GroupElement(1, 1, 0, 1), 0.3 + 0.7j)
    assert abs(w - (1.3 + 0.7j)) < 1e-15 and j == 1 and e == 1


def test_moebius_rejects_lower_half_plane():
    with pytest.raises(GroupError):
        moebius_apply(GroupElement.identity(), 0.5)
    with pytest.raises(GroupError):
        moebius_apply(GroupElement.identity(), 0.5 - 1j)


def test_determinant_and_sign_normalization():
    with pytest.raises(GroupError):
        GroupElement(1, 1, 1, 1)
    g = GroupElement(-1, 0, -11, -1)
    assert (g.c, g.d) == (11, 1)
    assert GroupElement(-1, 0, 0, -1).is_identity()


@given(sl2z(), sl2z(), sl2z())
def test_group_axioms(a, b, c):
    e = GroupElement.identity()
    assert (a * b) * c == a * (b * c)
    assert a * e == a == e * a
    assert (a * a.inverse()).is_identity()
    assert a.c > 0 or (a.c == 0 and a.d > 0)


@given(sl2z(), sl2z(), points)
def test_automorphy_cocycle(g, h, z):
    lhs = (g * h).j(z)
    rhs = g.j(h(z)) * h.j(z)
    # PSL2: equal up to sign
    assert min(abs(lhs - rhs), abs(lhs + rhs)) <= 1e-13 * max(abs(lhs), 1e-300) * 10


@given(sl2z(), points)
def test_imaginary_part_rule(g, z):
    w, j, _ = moebius_apply(g, z)
    assert abs(w.imag - z.imag / abs(j) ** 2) <= 1e-13 * w.imag


def test_coset_reps_examples():
    g1 = gamma0(1)
    assert len(coset_reps_infinity(g1, 1)) == 2
    assert coset_reps_infinity(G11, 10) == [GroupElement.identity()]
    for c0 in (5, 12, 30):
        reps = [r for r in coset_reps_infinity(g1, c0) if r.c == c0]
        phi = sum(1 for d in range(c0) if math.gcd(c0, d) == 1)
        assert len(reps) == phi
    with pytest.raises(GroupError):
        coset_reps_infinity(G11, 0)


def test_coset_reps_bruteforce_level_one():
    # all small matrices with c <= 3, deduplicated by the left and right translation action
    seen = set()
    for a in range(-6, 7):
        for b in range(-6, 7):
            for c in range(0, 4):
                for d in range(-6, 7):
                    if a * d - b * c == 1:
                        g = GroupElement(a, b, c, d)
                        seen.add((g.c, g.d % g.c) if g.c else (0, 1))
    reps = coset_reps_infinity(gamma0(1), 3)
    assert {(r.c, r.d % r.c) if r.c else (0, 1) for r in reps} == seen


def test_coset_reps_inequivalent_and_ordered():
    reps = coset_reps_infinity(G11, 66)
    keys = [(r.c, r.d) for r in reps]
    assert keys == sorted(keys)
    assert all(r.c % 11 == 0 for r in reps)
    for i, r1 in enumerate(reps):
        for r2 in reps[i + 1:]:
            if r1.c == r2.c:
                assert r1.d != r2.d
            assert (r1 * r2.inverse()).c != 0 or r1 == r2


@settings(max_examples=60)
@given(points)
def test_reduction_is_exact_and_idempotent(z):
    z0, g = reduce_to_fundamental(G11, z)
    assert G11.contains(g)
    assert abs(g(z0) - z) <= 1e-12 * max(1, abs(z))
    z1, g1 = reduce_to_fundamental(G11, z0)
    assert g1.is_identity() and abs(z1 - z0) < 1e-14


def test_reduction_examples():
    w, m = reduce_sl2z(0.1 + 0.1j)
    assert w.imag >= math.sqrt(3) / 2 - 1e-12
    z = 0.23 + 0.04j
    assert abs(reduce_to_fundamental(G11, z)[0] - reduce_to_fundamental(G11, z + 1)[0]) < 1e-12


def test_y_gamma():
    assert y_gamma(G11, 10j, 22) >= 10
    assert abs(y_gamma(gamma0(1), 1j, 50) - 1) < 1e-12
    assert y_gamma(G11, 0.3 + 0.2j, 11) <= y_gamma(G11, 0.3 + 0.2j, 44)
    z = 0.31 + 0.4j
    g = GroupElement(1, 0, 11, 1)
    assert abs(y_gamma(G11, g(z), 200) - y_gamma(G11, z, 200)) < 1e-12


def test_default_group_data():
    assert G11.level == 11 and G11.genus == 1 and G11.m == 2
    assert abs(G11.volume - 4 * math.pi) < 1e-12
    for gen in G11.generators:
        assert gen.c % 11 == 0
    for cusp in G11.cusps:
        cusp.check()


def test_config_round_trip(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps(group_to_config(G11)))
    g = load_group_config(p)
    assert g.level == 11 and g.generators == G11.generators


def test_config_rejects_bad_generator(tmp_path):
    cfg = group_to_config(G11)
    cfg["generators"].append([[1, 0], [5, 1]])
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(cfg))
    with pytest.raises(GroupError):
        load_group_config(p)


def test_config_enforces_two_cusps(tmp_path):
    cfg = group_to_config(G11)
    cfg["cusps"] = cfg["cusps"][:1]
    p = tmp_path / "one.json"
    p.write_text(json.dumps(cfg))
    with pytest.raises(GroupError):
        load_group_config(p)


def test_random_word_in_group():
    rng = np.random.default_rng(0)
    for _ in range(20):
        assert G11.contains(random_word(G11, rng, 4))
