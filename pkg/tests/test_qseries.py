import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hof.qseries import (
    QSeries,
    QSeriesError,
    antiderivative,
    evaluate,
    from_coefficients,
    load_newform,
    multiply,
    power_tail,
)

F = load_newform()


def eta_product(N):
    """q prod (1 - q^n)^2 (1 - q^{11 n})^2 as integer coefficients 1..N."""
    poly = np.zeros(N + 1, dtype=object)
    poly[0] = 1
    for n in range(1, N + 1):
        for step in (n, 11 * n):
            if step > N:
                continue
            for _ in range(2):
                poly[step:] = poly[step:] - poly[:-step].copy()
    return [int(poly[n - 1]) for n in range(1, N + 1)]


def test_newform_matches_eta_product():
    exact = F.meta["exact"]
    assert [int(c) for c in exact] == eta_product(200)
    assert F.n0 == 1 and F.N == 200 and F.cuspidal
    assert F.coeff(1) == 1 and F.coeff(2) == -2 and F.coeff(3) == -1


def test_zero_series_file(tmp_path):
    p = tmp_path / "zero.txt"
    p.write_text("# level=11 weight=2 label=zero count=3\n1 0\n2 0\n3 0\n")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        z = load_newform(p)
    assert z.cuspidal
    assert evaluate(z, 0.1 + 1j)[0] == 0


def test_normalization_warning(tmp_path):
    p = tmp_path / "two.txt"
    p.write_text("# level=11 weight=2 label=x count=2\n1 2\n2 1/3\n")
    with pytest.warns(UserWarning):
        f = load_newform(p)
    assert f.coeff(2) == pytest.approx(1 / 3)


@pytest.mark.parametrize("text", [
    "level=11\n1 1\n",
    "# level=11 weight=2 label=x count=2\n1 1\n",
    "# level=11 weight=2 label=x count=1\n1 abc\n",
    "# level=11 weight=2 label=x count=2\n1 1\n1 2\n",
])
def test_malformed_files(tmp_path, text):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    with pytest.raises(QSeriesError):
        load_newform(p)


def test_multiply_examples():
    a = from_coefficients({1: 1, 2: 1}, exact=True)
    b = from_coefficients({1: 1}, exact=True)
    prod = multiply(a, b)
    assert prod.n0 == 2 and list(prod.coeffs) == [1, 1] and prod.exact
    # as truncated series only the q^2 coefficient is determined
    trunc = multiply(from_coefficients({1: 1, 2: 1}), from_coefficients({1: 1}))
    assert list(trunc.coeffs) == [1]
    zero = from_coefficients({1: 0})
    assert not np.any(multiply(F, zero).coeffs)
    sq = multiply(F, F)
    assert sq.n0 == 2 and sq.coeff(2) == 1


def test_multiply_width_mismatch():
    with pytest.raises(QSeriesError):
        multiply(F, QSeries(1, [1], width=11))


def test_antiderivative():
    q = from_coefficients({1: 1})
    A = antiderivative(q)
    assert A.coeff(1) == pytest.approx(1 / (2j * math.pi))
    back = A.derivative()
    assert np.allclose(back.coeffs, q.coeffs)
    with pytest.raises(QSeriesError):
        antiderivative(QSeries(0, [1, 1]))
    val, tail = evaluate(antiderivative(F), 2j)
    assert abs(val) <= math.exp(-4 * math.pi) * (1 + 1e-6)


def test_evaluate_examples():
    z = QSeries(1, [])
    assert evaluate(z, 1j) == (0, z.tail_bound(1))
    q = from_coefficients({1: 1})
    assert evaluate(q, 0.3 + 0.8j)[0] == pytest.approx(np.exp(2j * math.pi * (0.3 + 0.8j)))
    h, _ = evaluate(F, 1j, method="horner")
    d, _ = evaluate(F, 1j, method="direct")
    assert abs(h - d) <= 1e-13
    with pytest.raises(QSeriesError):
        evaluate(F, 0.1j)


@settings(max_examples=30)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=10), st.lists(st.floats(-5, 5), min_size=1, max_size=10),
       st.floats(-2, 2), st.floats(0.3, 2), st.floats(-3, 3))
def test_evaluate_linear(c1, c2, x, y, lam):
    n = max(len(c1), len(c2))
    c1 = c1 + [0] * (n - len(c1))
    c2 = c2 + [0] * (n - len(c2))
    f1, f2 = from_coefficients(c1), from_coefficients(c2)
    f12 = from_coefficients([a + lam * b for a, b in zip(c1, c2)])
    z = complex(x, y)
    lhs = evaluate(f12, z)[0]
    rhs = evaluate(f1, z)[0] + lam * evaluate(f2, z)[0]
    assert abs(lhs - rhs) <= 1e-13 * (1 + sum(abs(a) for a in c1) + abs(lam) * sum(abs(b) for b in c2))


def test_tail_decay_rate():
    A = antiderivative(F)
    ys = np.array([0.02, 0.03, 0.04, 0.05])
    logs = np.log([A.tail_bound(y) for y in ys])
    slope = np.polyfit(ys, logs, 1)[0]
    # per unit height the tail shrinks at least like e^{-2 pi (N+1) y}
    assert slope <= -2 * math.pi * A.N


@pytest.mark.parametrize("p", [0, 1, 2, 3.5])
def test_power_tail_is_upper_bound(p):
    r, N = 0.7, 30
    exact = sum(n**p * r**n for n in range(N + 1, 3000))
    assert exact * (1 - 1e-12) <= power_tail(p, r, N) <= exact * 1.0001 + 1e-300


def test_modularity_of_data():
    # points where both heights are about 1/c (both cannot reach 0.4 when c >= 11)
    from hof.group import GroupElement

    for g in (GroupElement(7, -2, 11, -3), GroupElement(8, -3, 11, -4), GroupElement(1, 0, 22, 1)):
        z = complex(-g.d / g.c + 0.01, 1 / g.c)
        gz = g(z)
        lhs, t1 = evaluate(F, gz, y_min=0)
        rhs, t2 = evaluate(F, z, y_min=0)
        assert abs(lhs / g.j(z) ** 2 - rhs) <= max(10 * (t1 + t2), 1e-12 * abs(rhs))
