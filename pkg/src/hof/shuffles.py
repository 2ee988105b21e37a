"""Shuffles of slot sets and the slash expansion of a product of two forms.

A product F*G is hit by slash differences (g_1 - 1)...(g_{t-1} - 1). The
product rule

    (F G)|(g - 1) = F|(g - 1) G + F G|(g - 1) + F|(g - 1) G|(g - 1)

spreads every slot onto F, onto G, or onto both. Terms where F received r
differences or G received t - r + 1 are dropped since both are annihilated.
The survivors are indexed by shuffles.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class Shuffle:
    phi: tuple[int, ...]
    psi: tuple[int, ...]

    def check(self, t: int) -> None:
        if list(self.phi) != sorted(set(self.phi)) or list(self.psi) != sorted(set(self.psi)):
            raise ValueError(f"{self} is not order preserving")
        if set(self.phi) & set(self.psi) or set(self.phi) | set(self.psi) != set(range(1, t)):
            raise ValueError(f"{self} does not partition 1..{t - 1}")


def enumerate_shuffles(r: int, t: int) -> list[Shuffle]:
    """All (phi, psi) splitting {1..t-1} into blocks of size r-1 and t-r."""
    if not 1 <= r <= t:
        raise ValueError(f"need 1 <= r <= t, got r={r}, t={t}")
    slots = range(1, t)
    out = []
    for phi in itertools.combinations(slots, r - 1):
        psi = tuple(j for j in slots if j not in phi)
        out.append(Shuffle(phi, psi))
    return out


# A term D_F(S) * D_G(T): F slashed by (g_j - 1) for j in S, G likewise for T.
Term = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class ProductExpansion:
    r: int
    t: int
    lhs: dict[Term, Fraction]
    rhs: dict[Term, Fraction]

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def _normalize(terms: dict[Term, Fraction]) -> dict[Term, Fraction]:
    return {k: v for k, v in sorted(terms.items()) if v != 0}


def expand_slash_product(F_order: int, G_order: int, t: int) -> ProductExpansion:
    """Both sides of the shuffle expansion of (F G)|(g_1 - 1)...(g_{t-1} - 1).

    F is annihilated by F_order differences and G by G_order; these must add
    up to t + 1.
    """
    r = F_order
    if F_order < 1 or G_order < 1 or F_order + G_order != t + 1:
        raise ValueError(f"orders {F_order}, {G_order} are inconsistent with t={t}")
    terms: dict[Term, Fraction] = {((), ()): Fraction(1)}
    for j in range(1, t):
        nxt: dict[Term, Fraction] = {}
        for (s, u), c in terms.items():
            for s2, u2 in (((*s, j), u), (s, (*u, j)), ((*s, j), (*u, j))):
                if len(s2) >= F_order or len(u2) >= G_order:
                    continue  # annihilated
                nxt[(s2, u2)] = nxt.get((s2, u2), Fraction(0)) + c
        terms = nxt
    rhs: dict[Term, Fraction] = {}
    for sh in enumerate_shuffles(r, t):
        rhs[(sh.phi, sh.psi)] = rhs.get((sh.phi, sh.psi), Fraction(0)) + 1
    return ProductExpansion(r, t, _normalize(terms), _normalize(rhs))


def format_term(term: Term) -> str:
    s, u = term
    fs = "".join(f"(g{j}-1)" for j in s)
    gs = "".join(f"(g{j}-1)" for j in u)
    return f"F{'|' + fs if fs else ''} * G{'|' + gs if gs else ''}"


def shuffle_count(r: int, t: int) -> int:
    return math.comb(t - 1, r - 1)
