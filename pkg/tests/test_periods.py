import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hof.group import GroupElement, default_group, random_word
from hof.periods import (
    CocycleEvaluator,
    PeriodCache,
    PeriodError,
    Tower,
    build_iterated,
    closed_form_ones,
    default_newform,
    default_transport,
    growth_probe,
    period,
    quadrature_oracle,
    reduce_fast,
    verify_modularity,
    verify_numeric_cocycle,
)
from hof.qseries import evaluate

G11 = default_group()
TR = default_transport()
F = default_newform()

# Elliptic curve 11a1, LMFDB: L(E,1) and the real/imaginary periods.
L_VALUE = 0.25384186085591068433
OMEGA_PLUS = 1.26920930427955342
OMEGA_MINUS = 1.45881661693849532


def test_fricke_sign_and_defect():
    assert TR.eps == -1
    assert TR.fricke_defect < 1e-13


def test_central_value_matches_l_function():
    # A(0) = int_{i inf}^0 f dz = -i L(E,1) / (2 pi)
    assert abs(TR.A0 - (-1j) * L_VALUE / (2 * math.pi)) < 1e-14


@pytest.mark.parametrize("z", [0.2 + 0.05j, -0.37 + 0.02j, 0.4 + 0.11j, 0.09 + 0.3j])
def test_transport_matches_series(z):
    # down to height 0.02 the raw 200-term series is still accurate to e^{-25}
    direct = evaluate(F, z, y_min=0.0)[0]
    assert abs(TR.f_at(z) - direct) <= 1e-9 * max(1.0, abs(direct))


def test_reduce_fast_lands_in_domain():
    for z in (0.123 + 0.001j, -3.7 + 0.02j, 0.5 + 0.5j):
        w, (a, b, c, d) = reduce_fast(z)
        assert abs(w) >= 1 - 1e-12 and abs(w.real) <= 0.5 + 1e-12
        g = GroupElement(a, b, c, d)
        assert abs(g(w) - z) < 1e-12


def test_identity_and_parabolic_periods_vanish():
    assert period(TR, GroupElement.identity()) == 0
    assert abs(period(TR, GroupElement(1, 1, 0, 1))) < 1e-15
    assert abs(period(TR, GroupElement(1, 0, 11, 1))) < 1e-14


@pytest.mark.parametrize("entries", [(7, -2, 11, -3), (2, 1, 33, 17), (4, 1, 11, 3), (5, 2, 22, 9)])
def test_period_matches_series_at_symmetric_point(entries):
    g = GroupElement(*entries)
    # at -d/c + i/c both z and gamma z sit at height 1/c: the raw series is enough
    z0 = complex(-g.d / g.c + 0.03 / g.c, 1 / g.c)
    A = lambda z: evaluate(build_iterated((1,)).prims[0], z, y_min=0.0)[0]
    assert abs(period(TR, g) - (A(g(z0)) - A(z0))) < 1e-12


def test_periods_lie_in_period_lattice():
    rng = np.random.default_rng(3)
    for _ in range(15):
        g = random_word(G11, rng, 3)
        p = period(TR, g)
        re = p.real / (OMEGA_MINUS / (2 * math.pi))
        im = p.imag / (OMEGA_PLUS / (4 * math.pi))
        assert abs(re - round(re)) < 1e-9 and abs(im - round(im)) < 1e-9


def _words(seed, n):
    rng = np.random.default_rng(seed)
    return [random_word(G11, rng, 3) for _ in range(n)]


def test_additivity_and_inverse_over_twenty_words():
    ws = _words(7, 21)
    for g, h in zip(ws[:-1], ws[1:]):
        scale = max(1.0, abs(period(TR, g)), abs(period(TR, h)))
        assert abs(period(TR, g * h) - period(TR, g) - period(TR, h)) <= 1e-12 * scale
        assert abs(period(TR, g.inverse()) + period(TR, g)) <= 1e-12 * scale


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(0.05, 2.0), st.integers(0, 10**6))
def test_basepoint_independence(x, y, seed):
    g = random_word(G11, np.random.default_rng(seed), 2)
    assert abs(period(TR, g, complex(x, y)) - period(TR, g)) <= 1e-11 * max(1.0, abs(period(TR, g)))


def test_period_rejects_foreign_matrix_and_bad_basepoint():
    with pytest.raises(PeriodError):
        period(TR, GroupElement(1, 0, 2, 1))
    with pytest.raises(PeriodError):
        period(TR, GroupElement(1, 0, 11, 1), 0.3)


def test_build_iterated_examples():
    f1 = build_iterated((1,))
    assert np.allclose(f1.series.coeffs, F.coeffs)
    f11 = build_iterated((1, 1))
    # F_(1,1) = f * int f = q * q/(2 pi i) + ... starts at q^2 with coefficient 1/(2 pi i)
    assert f11.series.n0 == 2
    assert abs(f11.series.coeffs[0] - 1 / (2j * math.pi)) < 1e-15
    assert build_iterated((1, 1, 1)).series.n0 == 3
    assert len(build_iterated((1, 1, 1)).provenance) == 3


def test_build_iterated_rejects_bad_labels():
    for v in [(), (1, -1), (0,), (2,)]:
        with pytest.raises(PeriodError):
            build_iterated(v)


@pytest.mark.parametrize("z", [0.1 + 0.9j, -0.3 + 0.6j, 0.45 + 1.3j])
def test_series_against_quadrature_oracle(z):
    form = build_iterated((1, 1, 1))
    oracle = quadrature_oracle(form, z)
    series = [evaluate(p, z, y_min=0.0)[0] for p in form.prims]
    assert np.max(np.abs(oracle - np.array(series))) < 1e-6


@pytest.mark.parametrize("t", [1, 2, 3])
@pytest.mark.parametrize("z", [0.21 + 0.08j, -0.4 + 0.3j, 0.05 + 0.02j])
def test_tower_matches_closed_form(t, z):
    tw = Tower(build_iterated((1,) * t))
    Fz, Az = closed_form_ones(t, TR, z)
    assert abs(tw.F(z) - Fz) <= 1e-10 * max(1.0, abs(Fz))
    assert abs(tw.A(z) - Az) <= 1e-10 * max(1e-3, abs(Az))


def test_modularity_report():
    rep = verify_modularity(n_samples=6, seed=1)
    assert rep.passed and len(rep.cases) == 6


def test_cocycle_order_two_small():
    rep = verify_numeric_cocycle((1, 1), n_samples=3, seed=5)
    assert rep.passed, [c.residual for c in rep.cases]


def test_pi_stabilization():
    ev = CocycleEvaluator((1, 1))
    g = GroupElement(7, -2, 11, -3)
    assert abs(ev.Pi((1,), g) - period(TR, g)) < 1e-12
    assert abs(ev.Pi((1, 1), g) - ev.Pi((1, 1), g, 40.0)) < 1e-12


def test_cache_round_trip(tmp_path, monkeypatch):
    path = tmp_path / "cache" / "periods.jsonl"
    monkeypatch.setenv("HOF_CACHE", str(path))
    cache = PeriodCache()
    gs = [GroupElement(7, -2, 11, -3), GroupElement(2, 1, 33, 17)]
    vals = [cache.get(TR, g) for g in gs]
    cache.get(TR, gs[0])
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    rec = json.loads(lines[0])
    assert rec["level"] == 11 and rec["gamma"] == [[7, -2], [11, -3]]
    again = PeriodCache(path)
    assert sorted(again.mem.values(), key=abs) == sorted(vals, key=abs)
    assert not list(path.parent.glob(".periods-*"))


def test_growth_probe_order_one():
    res = growth_probe((1,), n_points=6)
    assert abs(res.degree) < 0.1
    assert res.bounded_ratio is not None and res.bounded_ratio <= 1.0 + 1e-9
