"""Exact arithmetic for Gamma_0(N): matrices mod sign, cusps, cosets and reduction."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np


class GroupError(ValueError):
    """Raised for invalid group data or impossible group operations."""


@dataclass(frozen=True)
class GroupElement:
    """A matrix in PSL_2(Z), stored with c > 0 or (c == 0 and d > 0)."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise GroupError(f"determinant of {self.entries} is not 1")
        if self.c < 0 or (self.c == 0 and self.d < 0):
            for name in "abcd":
                object.__setattr__(self, name, -getattr(self, name))

    @classmethod
    def of(cls, m: Sequence[Sequence[int]]) -> "GroupElement":
        (a, b), (c, d) = m
        return cls(int(a), int(b), int(c), int(d))

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls(1, 0, 0, 1)

    @property
    def entries(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a, self.b), (self.c, self.d))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def __pow__(self, n: int) -> "GroupElement":
        base = self if n >= 0 else self.inverse()
        out = GroupElement.identity()
        for _ in range(abs(n)):
            out = out * base
        return out

    def is_identity(self) -> bool:
        return self == GroupElement.identity()

    def j(self, z: complex) -> complex:
        return self.c * z + self.d

    def __call__(self, z: complex) -> complex:
        return _mobius(self.a, self.b, self.c, self.d, complex(z))

    def cusp_image(self) -> Fraction | None:
        """Image of the cusp at infinity; None stands for infinity."""
        if self.c == 0:
            return None
        return Fraction(self.a, self.c)

    def __repr__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


def moebius_apply(gamma, z: complex) -> tuple[complex, complex, complex]:
    """Return (gamma z, j(gamma, z), eps(gamma, z)) for Im z > 0.

    ``gamma`` may be a GroupElement or any real 2x2 matrix of determinant 1.
    """
    z = complex(z)
    if not z.imag > 0:
        raise GroupError(f"point {z} is not in the upper half plane")
    (a, b), (c, d) = _entries(gamma)
    jz = c * z + d
    w = _mobius(a, b, c, d, z)
    eps = jz / abs(jz)
    return w, complex(jz), complex(eps)


def _mobius(a, b, c, d, z: complex) -> complex:
    """(a z + b)/(c z + d) with Im computed as Im z / |cz+d|^2 (no cancellation)."""
    x, y = z.real, z.imag
    jr, ji = c * x + d, c * y
    n2 = jr * jr + ji * ji
    re = ((a * x + b) * jr + a * c * y * y) / n2
    return complex(re, y / n2)


def _entries(gamma):
    if isinstance(gamma, GroupElement):
        return gamma.entries
    m = np.asarray(gamma, dtype=float)
    return ((m[0, 0], m[0, 1]), (m[1, 0], m[1, 1]))


@dataclass(frozen=True)
class CuspData:
    label: str
    representative: Fraction | None  # None is infinity
    scaling: tuple[tuple[float, float], tuple[float, float]]
    width: float
    parabolic: GroupElement

    @property
    def scaling_inverse(self) -> np.ndarray:
        (a, b), (c, d) = self.scaling
        return np.array([[d, -b], [-c, a]], dtype=float)

    def to_local(self, z: complex) -> complex:
        """sigma^{-1} z, the coordinate in which the cusp sits at infinity."""
        return moebius_apply(self.scaling_inverse, z)[0]

    def check(self, tol: float = 1e-12) -> None:
        (a, b), (c, d) = self.scaling
        if abs(a * d - b * c - 1) > tol:
            raise GroupError(f"scaling matrix of cusp {self.label} has det != 1")
        # sigma(infinity) must be the representative
        if self.representative is None:
            if abs(c) > tol:
                raise GroupError(f"scaling of cusp {self.label} moves infinity")
        elif abs(c) < tol or abs(a / c - float(self.representative)) > tol:
            raise GroupError(f"scaling of cusp {self.label} misses its representative")
        sig = np.array(self.scaling, dtype=float)
        conj = self.scaling_inverse @ np.array(self.parabolic.entries, dtype=float) @ sig
        if not (
            np.allclose(abs(conj[0, 0]), 1, atol=1e-9)
            and np.allclose(conj[1, 0], 0, atol=1e-9)
            and np.allclose(abs(conj[0, 1]), 1, atol=1e-9)
        ):
            raise GroupError(f"parabolic of cusp {self.label} is not a unit translation: {conj}")


@dataclass(frozen=True)
class GroupData:
    level: int
    genus: int
    cusps: tuple[CuspData, ...]
    generators: tuple[GroupElement, ...]
    volume: float
    _coset_table: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.level < 1:
            raise GroupError("level must be positive")
        for g in self.generators:
            if g.c % self.level:
                raise GroupError(f"generator {g} is not in Gamma_0({self.level})")
        for cusp in self.cusps:
            if cusp.parabolic.c % self.level:
                raise GroupError(f"parabolic {cusp.parabolic} is not in Gamma_0({self.level})")
            cusp.check()
        object.__setattr__(self, "_coset_table", _coset_table(self.level))

    @property
    def m(self) -> int:
        return len(self.cusps)

    def check_standing_assumptions(self) -> None:
        if self.m < 2:
            raise GroupError("at least two inequivalent cusps are required")

    def contains(self, g: GroupElement) -> bool:
        return g.c % self.level == 0

    def coset_rep(self, g: GroupElement) -> GroupElement:
        """The fixed right-coset representative r with g r^{-1} in Gamma_0(N)."""
        return self._coset_table[_p1_class(g.c, g.d, self.level)]

    @property
    def sl2z_coset_reps(self) -> list[GroupElement]:
        return list(self._coset_table.values())


# -- projective line over Z/N and Gamma_0(N)\SL_2(Z) ---------------------------


def _p1_class(c: int, d: int, n: int) -> tuple[int, int]:
    """Canonical representative of (c : d) in P^1(Z/N)."""
    if n == 1:
        return (0, 0)
    c, d = c % n, d % n
    best = None
    for u in range(1, n):
        if math.gcd(u, n) != 1:
            continue
        cand = ((u * c) % n, (u * d) % n)
        if best is None or cand < best:
            best = cand
    return best


def _lift(c: int, d: int, n: int) -> GroupElement:
    """A matrix in SL_2(Z) whose bottom row reduces to (c, d) mod n."""
    if n == 1:
        return GroupElement.identity()
    for k in range(0, 50 * n):
        for dd in (d + k * n, d - k * n):
            for cc in (c, c + n):
                if math.gcd(cc, dd) == 1:
                    _, x, y = _ext_gcd(dd, cc)
                    return GroupElement(x, -y, cc, dd)
    raise GroupError(f"could not lift ({c}:{d}) mod {n}")


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), (1 if a >= 0 else -1), 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _coset_table(n: int) -> dict[tuple[int, int], GroupElement]:
    table: dict[tuple[int, int], GroupElement] = {}
    if n == 1:
        table[(0, 0)] = GroupElement.identity()
        return table
    table[_p1_class(0, 1, n)] = GroupElement.identity()
    for k in range(n):
        # S T^k = [[0,-1],[1,k]]
        key = _p1_class(1, k, n)
        table.setdefault(key, GroupElement(0, -1, 1, k))
    for c in range(n):
        for d in range(n):
            if math.gcd(math.gcd(c, d), n) != 1:
                continue
            key = _p1_class(c, d, n)
            if key not in table:
                table[key] = _lift(c, d, n)
    return table


# -- cosets Gamma_infinity \ Gamma / Gamma_infinity -----------------------------


def coset_reps_infinity(group: GroupData, c_max: int) -> list[GroupElement]:
    """Identity plus one representative per (c, d mod c), 0 < c <= c_max, N | c.

    Representatives are ordered by (c, d) with 0 <= d < c and gcd(c, d) = 1.
    """
    if c_max < 1:
        raise GroupError("c_max must be at least 1")
    out = [GroupElement.identity()]
    n = group.level
    for c in range(n, c_max + 1, n):
        for d in range(c):
            if math.gcd(c, d) != 1:
                continue
            if c == 1:
                out.append(GroupElement(0, -1, 1, 0))
                continue
            a = pow(d, -1, c)
            b = (a * d - 1) // c
            out.append(GroupElement(a, b, c, d))
    return out


# -- reduction -----------------------------------------------------------------

SQRT3_2 = math.sqrt(3) / 2


def reduce_sl2z(z: complex, max_iter: int = 10_000) -> tuple[complex, GroupElement]:
    """Return (w, M) with w in the standard fundamental domain and z = M w."""
    z = complex(z)
    if not z.imag > 0:
        raise GroupError(f"point {z} is not in the upper half plane")
    m = GroupElement.identity()
    s = GroupElement(0, -1, 1, 0)
    for _ in range(max_iter):
        n = math.floor(z.real + 0.5)
        if n:
            z -= n
            m = m * GroupElement(1, n, 0, 1)
        if abs(z) < 1 - 1e-15:
            z = -1 / z
            m = m * s.inverse()
        else:
            return z, m
    raise GroupError(f"reduction of {z} did not terminate within {max_iter} steps")


def reduce_to_fundamental(group: GroupData, z: complex, max_iter: int = 10_000) -> tuple[complex, GroupElement]:
    """Return (z0, gamma) with gamma in Gamma_0(N), z = gamma z0.

    z0 lies in the fundamental domain formed by the coset translates r F of the
    standard SL_2(Z) domain F, one for each fixed coset representative r.
    """
    w, m = reduce_sl2z(z, max_iter)
    r = group.coset_rep(m)
    gamma = m * r.inverse()
    z0 = r(w)
    return z0, gamma


def y_fundamental(group: GroupData, z: complex) -> float:
    """max over cusps of Im(sigma_a^{-1} z)."""
    return max(c.to_local(z).imag for c in group.cusps)


def y_gamma(group: GroupData, z: complex, c_max: int) -> float:
    """max over cusps a and enumerated gamma of Im(sigma_a^{-1} gamma z)."""
    if not complex(z).imag > 0:
        raise GroupError("point not in the upper half plane")
    best = 0.0
    for g in coset_reps_infinity(group, c_max):
        w = g(complex(z))
        for cusp in group.cusps:
            best = max(best, cusp.to_local(w).imag)
        w = g.inverse()(complex(z))
        for cusp in group.cusps:
            best = max(best, cusp.to_local(w).imag)
    return best


# -- construction and config ---------------------------------------------------


def _sl2z_index(n: int) -> int:
    idx = n
    p, m = 2, n
    while p * p <= m:
        if m % p == 0:
            idx = idx // p * (p + 1)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        idx = idx // m * (m + 1)
    return idx


def gamma0(n: int) -> GroupData:
    """Gamma_0(N) for N = 1 or N prime, with cusps at infinity and 0."""
    if n == 1:
        cusps = (
            CuspData("inf", None, ((1.0, 0.0), (0.0, 1.0)), 1.0, GroupElement(1, 1, 0, 1)),
        )
        gens = (GroupElement(1, 1, 0, 1), GroupElement(0, -1, 1, 0))
        return GroupData(1, 0, cusps, gens, math.pi / 3)
    if any(n % p == 0 for p in range(2, int(math.isqrt(n)) + 1)):
        raise GroupError("built-in groups cover N = 1 and prime N; use a config file otherwise")
    r = math.sqrt(n)
    cusps = (
        CuspData("inf", None, ((1.0, 0.0), (0.0, 1.0)), 1.0, GroupElement(1, 1, 0, 1)),
        CuspData("0", Fraction(0), ((0.0, -1 / r), (r, 0.0)), float(n), GroupElement(1, 0, -n, 1)),
    )
    gens = _prime_level_generators(n)
    return GroupData(n, _genus_prime(n), cusps, gens, math.pi / 3 * (n + 1))


def _genus_prime(p: int) -> int:
    # g = 1 + mu/12 - nu2/4 - nu3/3 - cusps/2 for Gamma_0(p)
    mu = p + 1
    nu2 = 1 + _legendre(-1, p) if p != 2 else 1
    nu3 = 1 + _legendre(-3, p) if p != 3 else 1
    g = 1 + Fraction(mu, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - 1
    return int(g)


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _prime_level_generators(p: int) -> tuple[GroupElement, ...]:
    """Translation, parabolic at 0 and every [[a, b], [p, -k]] with 0 < k < p."""
    gens = [GroupElement(1, 1, 0, 1), GroupElement(1, 0, -p, 1)]
    for k in range(1, p):
        d = -k
        a = pow(d, -1, p)
        b = (a * d - 1) // p
        g = GroupElement(a, b, p, d)
        if g not in gens and g.inverse() not in gens:
            gens.append(g)
    return tuple(gens)


def load_group_config(path: str | Path) -> GroupData:
    """Load a group from the JSON config format (validates det and level)."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        level = int(data["level"])
        cusps = []
        for item in data["cusps"]:
            rep = item["representative"]
            rep = None if rep == "inf" else Fraction(rep)
            scaling = tuple(tuple(float(x) for x in row) for row in item["scaling"])
            if "parabolic" in item:
                par = GroupElement.of(item["parabolic"])
            else:
                par = _parabolic_for(rep, level, float(item["width"]))
            cusps.append(CuspData(str(item["label"]), rep, scaling, float(item["width"]), par))
        gens = []
        for m in data["generators"]:
            (a, b), (c, d) = m
            if any(not isinstance(x, int) for x in (a, b, c, d)):
                raise GroupError("generators must have exact integer entries")
            gens.append(GroupElement(a, b, c, d))
        group = GroupData(level, int(data["genus"]), tuple(cusps), tuple(gens), float(data["volume"]))
    except (KeyError, TypeError) as exc:
        raise GroupError(f"malformed group config: {exc}") from exc
    group.check_standing_assumptions()
    return group


def _parabolic_for(rep: Fraction | None, level: int, width: float) -> GroupElement:
    if rep is None:
        return GroupElement(1, round(width), 0, 1)
    p, q = rep.numerator, rep.denominator
    w = round(width)
    # conjugate of T^w by a matrix sending infinity to p/q
    g, x, y = _ext_gcd(p, q)
    a, c = p, q
    b, d = -y, x  # a*d - b*c = p*x + q*y = 1
    s = GroupElement(a, b, c, d)
    return s * GroupElement(1, w, 0, 1) * s.inverse()


def group_to_config(group: GroupData) -> dict:
    return {
        "level": group.level,
        "genus": group.genus,
        "volume": group.volume,
        "cusps": [
            {
                "label": c.label,
                "representative": "inf" if c.representative is None else str(c.representative),
                "scaling": [list(row) for row in c.scaling],
                "width": c.width,
                "parabolic": [list(row) for row in c.parabolic.entries],
            }
            for c in group.cusps
        ],
        "generators": [[list(row) for row in g.entries] for g in group.generators],
    }


def random_word(group: GroupData, rng: np.random.Generator, length: int) -> GroupElement:
    """Product of ``length`` random generators or their inverses."""
    out = GroupElement.identity()
    for _ in range(length):
        g = group.generators[rng.integers(len(group.generators))]
        out = out * (g if rng.integers(2) else g.inverse())
    return out


def orbit_points(group: GroupData, z: complex, elements: Sequence[GroupElement]) -> Iterator[complex]:
    for g in elements:
        yield g(z)


def default_group() -> GroupData:
    """Gamma_0(11) as shipped in the package data."""
    from importlib.resources import files

    return load_group_config(files("hof") / "data" / "gamma0_11.json")
