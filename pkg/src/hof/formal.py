"""Exact symbolic engine for slash actions on formal higher-order forms.

Everything lives in a free group on named letters. Letters ``g1, g2, ...``
are generic; ``p1, p2, ...`` are parabolic and kill the periods of cusp
forms. An expression is a finite sum

    coefficient * (product of scalar symbols) * (product of form factors)

with rational coefficients. Scalars are constants and commute with slashing.
Form factors carry a transformation law under a single letter; words act
letter by letter from the left of the word (a right action).

Form factors (plain tuples so they hash and print cheaply):

    ("B", j)           an invariant basis form f_j (weight 2)
    ("P", m, k)        an invariant weight-k Poincare form
    ("F", W)           iterated integral f_{W1} Int f_{W2} Int ... (all W > 0)
    ("Z", W)           axiomatic atom, W = negatives then one positive label
    ("Y", W, m, k)     axiomatic weight-k atom, W all negative
    ("I", base, mono)  Int_base^z of the form monomial ``mono``

Scalars:

    ("s", j, x)           the period <f_j, x> (conjugated when j < 0)
    ("per", mono, x, b)   Int_b^{x b} of a higher-order monomial
    ("zp", U, x)          Chen coefficient of the atom laws, len(U) >= 2
    ("sym", name)         an opaque constant
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

Factor = tuple
Scalar = tuple
Mono = tuple  # sorted tuple of factors
Key = tuple  # (sorted scalars, mono)
Number = Union[int, Fraction]


class LawError(ValueError):
    """An atom without a declared transformation law was slashed."""


def _sorted(items: Iterable) -> tuple:
    return tuple(sorted(items, key=repr))


class Expr:
    """A normalized finite linear combination of scalar-times-form terms."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Key, Number] | None = None):
        self.terms: dict[Key, Fraction] = {}
        if terms:
            for k, v in terms.items():
                if v:
                    self.terms[k] = Fraction(v)

    @classmethod
    def form(cls, *factors: Factor, coeff: Number = 1) -> "Expr":
        return cls({((), _sorted(factors)): coeff})

    @classmethod
    def scalar(cls, *scalars: Scalar, coeff: Number = 1) -> "Expr":
        return cls({(_sorted(scalars), ()): coeff})

    @classmethod
    def one(cls) -> "Expr":
        return cls({((), ()): 1})

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Expr.one() * other
        return isinstance(other, Expr) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Expr") -> "Expr":
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        e = Expr()
        e.terms = out
        return e

    def __neg__(self) -> "Expr":
        e = Expr()
        e.terms = {k: -v for k, v in self.terms.items()}
        return e

    def __sub__(self, other: "Expr") -> "Expr":
        return self + (-other)

    def __mul__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            if not other:
                return Expr()
            e = Expr()
            e.terms = {k: v * other for k, v in self.terms.items()}
            return e
        out: dict[Key, Fraction] = {}
        for (s1, m1), c1 in self.terms.items():
            for (s2, m2), c2 in other.terms.items():
                k = (_sorted(s1 + s2), _sorted(m1 + m2))
                v = out.get(k, 0) + c1 * c2
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        e = Expr()
        e.terms = out
        return e

    __rmul__ = __mul__

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: repr(kv[0]))

    def map_factors(self, fn) -> "Expr":
        """Rebuild with every form factor and scalar passed through ``fn``.

        ``fn`` maps a factor or scalar to an Expr; products are re-expanded.
        """
        out = Expr()
        for (scal, mono), c in self.terms.items():
            term = Expr.one() * c
            for s in scal:
                term = term * fn(s)
            for f in mono:
                term = term * fn(f)
            out = out + term
        return out

    def __repr__(self):
        return format_expr(self)


# -- words and the group ring --------------------------------------------------

Letter = tuple[str, int]
Word = tuple[Letter, ...]


def reduce_word(word: Iterable[Letter]) -> Word:
    out: list[Letter] = []
    for x, e in word:
        if e not in (1, -1):
            raise ValueError(f"exponent {e} is not +-1")
        if out and out[-1] == (x, -e):
            out.pop()
        else:
            out.append((x, e))
    return tuple(out)


def word(*letters: str) -> Word:
    """Parse names like "g1" and "g1^-1" into a reduced word."""
    out = []
    for name in letters:
        if name.endswith("^-1"):
            out.append((name[:-3], -1))
        else:
            out.append((name, 1))
    return reduce_word(out)


def word_mul(a: Word, b: Word) -> Word:
    return reduce_word(a + b)


def word_inv(a: Word) -> Word:
    return tuple((x, -e) for x, e in reversed(a))


GroupRing = dict  # Word -> Fraction


def diff(letter_or_word) -> GroupRing:
    """The group-ring element (w - 1)."""
    w = word(letter_or_word) if isinstance(letter_or_word, str) else reduce_word(letter_or_word)
    if not w:
        return {}
    return {w: Fraction(1), (): Fraction(-1)}


def is_parabolic(letter: str) -> bool:
    return letter.startswith("p")


# -- scalar constructors -------------------------------------------------------


def psym(label, letter: str) -> Expr:
    """<f_label, letter> with parabolic vanishing for cuspidal labels."""
    if is_parabolic(letter):
        if isinstance(label, str) and label == "e" + letter[1:]:
            return Expr.scalar(("s", label, letter))
        return Expr()
    return Expr.scalar(("s", label, letter))


def zper(u: tuple, letter: str) -> Expr:
    if len(u) == 1:
        return psym(u[0], letter)
    return Expr.scalar(("zp", tuple(u), letter))


def period_of_mono(mono: Mono, letter: str, base: str) -> Expr:
    if not mono:
        raise LawError("period of a constant is undefined")
    if len(mono) == 1 and mono[0][0] == "B":
        return psym(mono[0][1], letter)
    return Expr.scalar(("per", mono, letter, base))


def period_of(e: Expr, letter: str, base: str) -> Expr:
    """Linear extension of the period symbol; scalar coefficients factor out."""
    out = Expr()
    for (scal, mono), c in e.terms.items():
        out = out + Expr({(scal, ()): c}) * period_of_mono(mono, letter, base)
    return out


def integral(e: Expr, base: str = "i") -> Expr:
    """Int_base^z of a weight-2 expression, linear with constants pulled out."""
    out = Expr()
    for (scal, mono), c in e.terms.items():
        if not mono:
            raise LawError("antiderivative of a constant is not a formal integral symbol")
        out = out + Expr({(scal, (("I", base, mono),)): c})
    return out


# -- atoms ---------------------------------------------------------------------


def basis(j) -> Expr:
    return Expr.form(("B", j))


def F_atom(W: Sequence[int]) -> Factor:
    W = tuple(W)
    if not W or any(j <= 0 for j in W):
        raise ValueError("iterated-integral atoms take nonempty positive labels")
    return ("B", W[0]) if len(W) == 1 else ("F", W)


def Z_atom(W: Sequence[int]) -> Factor:
    W = tuple(W)
    if not W or W[-1] <= 0 or any(j >= 0 for j in W[:-1]):
        raise ValueError(f"{W} is not negatives followed by one positive label")
    return ("B", W[0]) if len(W) == 1 else ("Z", W)


def Y_atom(W: Sequence[int], m, k: int) -> Factor:
    W = tuple(W)
    if any(j >= 0 for j in W):
        raise ValueError(f"{W} is not all negative")
    return ("P", m, k) if not W else ("Y", W, m, k)


def atom_law(f: Factor, letter: str) -> Expr:
    """f | (letter - 1) for the atoms with declared laws."""
    kind = f[0]
    if kind in ("B", "P"):
        return Expr()
    if kind == "F":
        W = f[1]
        out = Expr()
        for r in range(1, len(W)):
            out = out + Expr.form(F_atom(W[:r])) * period_of_mono((F_atom(W[r:]),), letter, "a")
        return out
    if kind == "Z":
        W = f[1]
        out = Expr()
        for r in range(1, len(W)):
            out = out + zper(W[:r], letter) * Expr.form(Z_atom(W[r:]))
        return out
    if kind == "Y":
        W, m, k = f[1], f[2], f[3]
        out = Expr()
        for r in range(1, len(W) + 1):
            out = out + zper(W[:r], letter) * Expr.form(Y_atom(W[r:], m, k))
        return out
    raise LawError(f"no transformation law declared for {f!r}")


@lru_cache(maxsize=None)
def _slash_factor(f: Factor, letter: str, sign: int) -> Expr:
    kind = f[0]
    if kind in ("B", "P"):
        return Expr.form(f)
    if kind == "I":
        _, base, mono = f
        inner = slash_letter(Expr.form(*mono), letter, sign)
        if sign == 1:
            return integral(inner, base) + period_of(Expr.form(*mono), letter, base)
        return integral(inner, base) - period_of(inner, letter, base)
    if kind in ("F", "Z", "Y"):
        law = atom_law(f, letter)
        if sign == 1:
            return Expr.form(f) + law
        # X = (X|x^-1)|x gives X|x^-1 = X - (X|(x-1))|x^-1
        return Expr.form(f) - slash_letter(law, letter, -1)
    raise LawError(f"no transformation law declared for {f!r}")


def slash_letter(e: Expr, letter: str, sign: int = 1) -> Expr:
    out: dict[Key, Fraction] = {}
    for (scal, mono), c in e.terms.items():
        term = Expr({(scal, ()): c})
        for f in mono:
            term = term * _slash_factor(f, letter, sign)
        for k, v in term.terms.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    res = Expr()
    res.terms = out
    return res


def slash_word(e: Expr, w: Word) -> Expr:
    for x, s in w:
        e = slash_letter(e, x, s)
    return e


def slash_apply(e: Expr, omega) -> Expr:
    """e | omega where omega is a word, a group-ring element or a sequence of them.

    A sequence is read as the product omega_1 omega_2 ... of its entries.
    """
    if isinstance(omega, dict):
        factors = [omega]
    elif isinstance(omega, tuple) and (not omega or isinstance(omega[0], tuple) and isinstance(omega[0][0], str)):
        factors = [{reduce_word(omega): Fraction(1)}]
    else:
        factors = list(omega)
    for fac in factors:
        if isinstance(fac, tuple):
            fac = {reduce_word(fac): Fraction(1)}
        acc = Expr()
        for w, c in fac.items():
            acc = acc + slash_word(e, w) * c
        e = acc
    return e


def differences(letters: Sequence[str]) -> list[GroupRing]:
    return [diff(x) for x in letters]


def slots(n: int, prefix: str = "g") -> list[str]:
    return [f"{prefix}{j}" for j in range(1, n + 1)]


def period_word(label, w: Word) -> Expr:
    """<f_label, w> computed from Int(f_label)|w - Int(f_label)."""
    I = integral(basis(label), "i")
    return slash_word(I, w) - I


# -- formatting ----------------------------------------------------------------


def format_factor(f) -> str:
    kind = f[0]
    if kind == "B":
        return f"f{f[1]}"
    if kind == "P":
        return f"P[{f[1]},k={f[2]}]"
    if kind == "F":
        return "F" + _fmt_labels(f[1])
    if kind == "Z":
        return "Z" + _fmt_labels(f[1])
    if kind == "Y":
        return f"Y{_fmt_labels(f[1])};{f[2]}"
    if kind == "I":
        return f"Int_{f[1]}({format_mono(f[2])})"
    if kind == "s":
        return f"<f{f[1]},{f[2]}>"
    if kind == "per":
        return f"<{format_mono(f[1])},{f[2]}>_{f[3]}"
    if kind == "zp":
        return f"<Z{_fmt_labels(f[1])},{f[2]}>"
    if kind == "sym":
        return str(f[1])
    return repr(f)


def _fmt_labels(W) -> str:
    return "(" + ",".join(str(j) for j in W) + ")"


def format_mono(mono) -> str:
    return "*".join(format_factor(f) for f in mono) or "1"


def format_expr(e: Expr, limit: int | None = None) -> str:
    if not e.terms:
        return "0"
    parts = []
    for (scal, mono), c in e.items():
        body = "*".join([format_factor(s) for s in scal] + [format_factor(f) for f in mono]) or "1"
        if c == 1:
            parts.append(body)
        elif c == -1:
            parts.append("-" + body)
        else:
            parts.append(f"{c}*{body}")
    if limit is not None and len(parts) > limit:
        parts = parts[:limit] + [f"... ({len(e.terms) - limit} more)"]
    return " + ".join(parts).replace("+ -", "- ")
