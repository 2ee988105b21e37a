"""Truncated Fourier series sum_{n >= n0} c(n) e(n z / width) with tail bounds."""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np


class QSeriesError(ValueError):
    pass


@dataclass(frozen=True)
class QSeries:
    """Coefficients c(n0..N) plus the growth model |c(n)| <= C n^p beyond N.

    ``exact`` marks a finite polynomial: every coefficient beyond N is zero.
    """

    n0: int
    coeffs: np.ndarray
    width: float = 1.0
    coeff_growth: float = 2.0
    growth_power: float = 1.0
    y_min: float | None = None
    meta: dict = field(default_factory=dict, compare=False)
    exact: bool = False

    def __post_init__(self):
        if self.n0 < 0:
            raise QSeriesError("n0 must be nonnegative")
        if self.width <= 0:
            raise QSeriesError("width must be positive")
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))

    @property
    def N(self) -> int:
        """Index of the last stored coefficient."""
        return self.n0 + len(self.coeffs) - 1

    @property
    def cuspidal(self) -> bool:
        return self.n0 >= 1

    @property
    def default_y_min(self) -> float:
        return 0.2 * self.width if self.y_min is None else self.y_min

    def coeff(self, n: int) -> complex:
        if self.n0 <= n <= self.N:
            return complex(self.coeffs[n - self.n0])
        return 0j

    def indices(self) -> np.ndarray:
        return np.arange(self.n0, self.N + 1)

    def tail_bound(self, y: float) -> float:
        """C * sum_{n > N} n^p r^n with r = exp(-2 pi y / width)."""
        if self.exact:
            return 0.0
        r = math.exp(-2 * math.pi * y / self.width)
        return self.coeff_growth * power_tail(self.growth_power, r, self.N)

    def derivative(self) -> "QSeries":
        """d/dz termwise."""
        n = self.indices()
        scale = 2j * math.pi * n / self.width
        return QSeries(self.n0, self.coeffs * scale, self.width,
                       self.coeff_growth * 2 * math.pi / self.width, self.growth_power + 1, self.y_min,
                       exact=self.exact)

    def truncate(self, N: int) -> "QSeries":
        keep = max(0, N - self.n0 + 1)
        return QSeries(self.n0, self.coeffs[:keep], self.width, self.coeff_growth, self.growth_power,
                       self.y_min, dict(self.meta), self.exact and keep >= len(self.coeffs))

    def scaled(self, c: complex) -> "QSeries":
        return QSeries(self.n0, self.coeffs * c, self.width, self.coeff_growth * abs(c), self.growth_power,
                       self.y_min, dict(self.meta), self.exact)


def power_tail(p: float, r: float, N: int) -> float:
    """Upper bound for sum_{n > N} n^p r^n, 0 <= r < 1."""
    if r <= 0:
        return 0.0
    if r >= 1:
        return math.inf
    if p == 1:
        return r ** (N + 1) * ((N + 1) - N * r) / (1 - r) ** 2
    if p == 0:
        return r ** (N + 1) / (1 - r)
    # sum directly until the term ratio ((n+1)/n)^p r is safely below 1, then bound geometrically
    total = 0.0
    n = N + 1
    logr = math.log(r)
    while True:
        term = math.exp(p * math.log(n) + n * logr)
        q = ((n + 1) / n) ** p * r if p > 0 else r
        if q < 0.999 and (term < 1e-300 or term * q / (1 - q) < 1e-18 * max(total, 1e-300)):
            return total + term + term * q / (1 - q)
        total += term
        n += 1
        if n > N + 10**7:
            return math.inf


# -- construction ---------------------------------------------------------------

_HEADER = re.compile(r"#\s*level=(\d+)\s+weight=(\d+)\s+label=(\S+)\s+count=(\d+)")


def _parse_number(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise QSeriesError(f"bad coefficient {s!r}") from exc


def load_newform(path: str | Path | None = None) -> QSeries:
    """Read the text coefficient format; the default is the shipped level 11 form."""
    if path is None:
        from importlib.resources import files

        text = (files("hof") / "data" / "level11_newform.txt").read_text(encoding="utf-8")
        source = "level11_newform.txt"
    else:
        text = Path(path).read_text(encoding="utf-8")
        source = str(path)
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise QSeriesError(f"{source}: empty file")
    m = _HEADER.fullmatch(lines[0])
    if not m:
        raise QSeriesError(f"{source}: bad header {lines[0]!r}")
    level, weight, label, count = int(m[1]), int(m[2]), m[3], int(m[4])
    entries: dict[int, Fraction] = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise QSeriesError(f"{source}: malformed line {ln!r}")
        try:
            n = int(parts[0])
        except ValueError as exc:
            raise QSeriesError(f"{source}: bad index {parts[0]!r}") from exc
        if n < 0 or n in entries:
            raise QSeriesError(f"{source}: bad or repeated index {n}")
        entries[n] = _parse_number(parts[1])
    if len(entries) != count:
        raise QSeriesError(f"{source}: header says {count} coefficients, found {len(entries)}")
    if not entries:
        raise QSeriesError(f"{source}: no coefficients")
    n0 = min(entries)
    N = max(entries)
    exact = [entries.get(n, Fraction(0)) for n in range(n0, N + 1)]
    if entries.get(1, 0) != 1 and any(exact):
        warnings.warn(f"{source}: a(1) != 1, series is not normalized", stacklevel=2)
    coeffs = np.array([complex(c) for c in exact])
    ratios = [abs(float(c)) / n for n, c in zip(range(max(n0, 1), N + 1), exact[max(n0, 1) - n0:])]
    C = max([2.0] + ratios)
    meta = {"level": level, "weight": weight, "label": label, "exact": tuple(exact)}
    return QSeries(n0, coeffs, 1.0, C, 1.0, None, meta)


def multiply(f: QSeries, g: QSeries, N: int | None = None) -> QSeries:
    """Cauchy product, truncated at N and at the last index the inputs determine."""
    if not math.isclose(f.width, g.width):
        raise QSeriesError(f"width mismatch {f.width} vs {g.width}")
    n0 = f.n0 + g.n0
    if f.exact and g.exact:
        exact_to = f.N + g.N
    else:
        exact_to = min(math.inf if f.exact else f.N + g.n0, math.inf if g.exact else g.N + f.n0)
    N = exact_to if N is None else min(N, exact_to)
    exact = f.exact and g.exact and N >= f.N + g.N
    if N < n0:
        return QSeries(n0, np.zeros(0), f.width, f.coeff_growth * g.coeff_growth,
                       f.growth_power + g.growth_power + 1, exact=f.exact and g.exact)
    full = np.convolve(f.coeffs, g.coeffs) if len(f.coeffs) and len(g.coeffs) else np.zeros(0)
    coeffs = full[: int(N) - n0 + 1]
    # |sum_k a(k) b(n-k)| <= C1 C2 sum_k k^p1 (n-k)^p2 <= C1 C2 n^(p1+p2+1)
    return QSeries(n0, coeffs, f.width, f.coeff_growth * g.coeff_growth,
                   f.growth_power + g.growth_power + 1, f.y_min, exact=exact)


def antiderivative(f: QSeries) -> QSeries:
    """Integral from i*infinity along a vertical path: c(n) width / (2 pi i n)."""
    if not f.cuspidal:
        raise QSeriesError("antiderivative from the cusp needs a cuspidal series (n0 >= 1)")
    n = f.indices()
    coeffs = f.coeffs * f.width / (2j * math.pi * n)
    return QSeries(f.n0, coeffs, f.width, f.coeff_growth * f.width / (2 * math.pi),
                   f.growth_power - 1, f.y_min, exact=f.exact)


def evaluate(f: QSeries, z: complex, y_min: float | None = None, method: str = "horner") -> tuple[complex, float]:
    """Value at z and the bound on the dropped tail."""
    z = complex(z)
    floor = f.default_y_min if y_min is None else y_min
    if z.imag < floor:
        raise QSeriesError(f"Im z = {z.imag:.4g} is below y_min = {floor:.4g}")
    if len(f.coeffs) == 0:
        return 0j, f.tail_bound(z.imag)
    q = np.exp(2j * math.pi * z / f.width)
    if method == "horner":
        acc = 0j
        for c in f.coeffs[::-1]:
            acc = acc * q + c
        val = acc * q ** f.n0
    elif method == "direct":
        n = f.indices()
        val = complex(np.sum(f.coeffs * np.exp(2j * math.pi * n * z / f.width)))
    else:
        raise QSeriesError(f"unknown method {method!r}")
    return complex(val), f.tail_bound(z.imag)


def evaluate_many(f: QSeries, zs: np.ndarray) -> np.ndarray:
    """Vectorized direct evaluation without floor checks (callers bound the tail)."""
    zs = np.asarray(zs, dtype=complex)
    n = f.indices()
    phase = np.exp(2j * math.pi * np.multiply.outer(zs, n) / f.width)
    return phase @ f.coeffs


def from_coefficients(coeffs: dict[int, complex] | list, n0: int = 1, width: float = 1.0,
                      coeff_growth: float = 2.0, exact: bool = False) -> QSeries:
    """Series from explicit coefficients; ``exact=True`` for a finite polynomial."""
    if isinstance(coeffs, dict):
        if not coeffs:
            return QSeries(n0, np.zeros(0), width, coeff_growth, exact=exact)
        n0 = min(coeffs)
        N = max(coeffs)
        coeffs = [coeffs.get(n, 0) for n in range(n0, N + 1)]
    return QSeries(n0, np.array(coeffs, dtype=complex), width, coeff_growth, exact=exact)
