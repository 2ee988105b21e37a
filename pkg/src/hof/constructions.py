"""Recursive construction of the Z and Y bases and exact checks of their laws.

The basis element Z_v (v in I) is assembled from an axiomatic atom whose
labels are negative except the last, times the formal antiderivative of a
shorter basis element, minus a rational combination of already built Z_u.
The correction coefficients are found by exact linear solving so that

    Z_v | (g_1 - 1)...(g_{t-1} - 1) = <f_v1, g_1>...<f_v(t-1), g_{t-1}> f_vt + (residual)

where every residual term has an adjacent label pair (-1, 1). Y_{v;m} is the
weight-k analogue with terminal Poincare form P_m.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy

from . import formal as fm
from .formal import Expr
from .indices import enumerate_index_vectors, in_I, in_I_prime, vector_key
from .report import VerificationReport
from .shuffles import enumerate_shuffles, expand_slash_product, format_term


class ConstructionError(RuntimeError):
    """The correction system had no solution (an implementation bug if it happens)."""


# -- term analysis -------------------------------------------------------------


def leading_term(v: Sequence, terminal: fm.Factor | None = None) -> Expr:
    """<f_v1, g1>...<f_vs, gs> times f_{last} (or times ``terminal``)."""
    v = tuple(v)
    if terminal is None:
        out = fm.basis(v[-1])
        labels = v[:-1]
    else:
        out = Expr.form(terminal)
        labels = v
    for j, lab in enumerate(labels, start=1):
        out = out * fm.psym(lab, f"g{j}")
    return out


def label_sequence(key: fm.Key, n_slots: int) -> tuple | None:
    """Labels read along slots g1..gn followed by the form label, or None.

    None means the term is not a product of one order-1 period per slot with
    a single terminal form.
    """
    scal, mono = key
    if len(mono) != 1 or mono[0][0] not in ("B", "P") or len(scal) != n_slots:
        return None
    by_slot = {}
    for s in scal:
        if s[0] != "s" or not s[2].startswith("g"):
            return None
        slot = int(s[2][1:])
        if slot in by_slot:
            return None
        by_slot[slot] = s[1]
    if sorted(by_slot) != list(range(1, n_slots + 1)):
        return None
    labels = tuple(by_slot[j] for j in range(1, n_slots + 1))
    term = mono[0]
    return labels + ((term[1],) if term[0] == "B" else ())


def in_A(labels: Sequence) -> bool:
    """Adjacent (-1, 1): a conjugated f_1 period followed by an f_1 factor."""
    return any(labels[j] == -1 and labels[j + 1] == 1 for j in range(len(labels) - 1))


def _split(v: tuple, keep_last: bool) -> tuple[tuple, tuple]:
    """Split into (p, negatives) where negatives is the trailing negative run.

    With keep_last the final entry is excluded from the run and stays on the
    negative side, as in Z-vectors.
    """
    body = v[:-1] if keep_last else v
    r = 0
    while r < len(body) and body[len(body) - 1 - r] < 0:
        r += 1
    p = body[: len(body) - r]
    tail = body[len(body) - r:] + ((v[-1],) if keep_last else ())
    return p, tail


def trailing_negatives(v: tuple, keep_last: bool) -> int:
    p, tail = _split(v, keep_last)
    return len(tail) - (1 if keep_last else 0)


@dataclass
class Built:
    expr: Expr
    base: Expr
    corrections: list[tuple[tuple, Fraction]] = field(default_factory=list)
    axiomatic: bool = False


class BasisBuilder:
    """Memoized builder of Z_v and Y_{v;m} for labels up to g."""

    def __init__(self, g: int):
        if g < 1:
            raise ValueError("basis construction needs g >= 1")
        self.g = g
        self.Z: dict[tuple, Built] = {}
        self.Y: dict[tuple, Built] = {}
        self._DZ: dict[tuple, Expr] = {}
        self._DY: dict[tuple, Expr] = {}

    # Z ------------------------------------------------------------------

    def DZ(self, v: tuple) -> Expr:
        if v not in self._DZ:
            self._DZ[v] = fm.slash_apply(self.build_Z(v).expr, fm.differences(fm.slots(len(v) - 1)))
        return self._DZ[v]

    def build_Z(self, v: Sequence[int]) -> Built:
        v = tuple(v)
        if v in self.Z:
            return self.Z[v]
        if not in_I(v) or any(abs(j) > self.g for j in v):
            raise ValueError(f"{v} is not in I for g = {self.g}")
        if len(v) == 1 or all(j < 0 for j in v[:-1]):
            e = Expr.form(fm.Z_atom(v))
            built = Built(e, e, axiomatic=len(v) > 1)
        else:
            p, tail = _split(v, keep_last=True)
            base = Expr.form(fm.Z_atom(tail)) * fm.integral(self.build_Z(p).expr, "i")
            built = self._correct(v, base, len(v) - 1, None, self.build_Z, self.DZ, keep_last=True)
        self.Z[v] = built
        return built

    # Y ------------------------------------------------------------------

    def DY(self, v: tuple, m, k: int) -> Expr:
        key = (v, m, k)
        if key not in self._DY:
            self._DY[key] = fm.slash_apply(self.build_Y(v, m, k).expr, fm.differences(fm.slots(len(v))))
        return self._DY[key]

    def build_Y(self, v: Sequence[int], m=1, k: int = 4) -> Built:
        v = tuple(v)
        key = (v, m, k)
        if key in self.Y:
            return self.Y[key]
        if (v and not in_I_prime(v)) or any(abs(j) > self.g for j in v):
            raise ValueError(f"{v} is not in I' for g = {self.g}")
        P = Expr.form(("P", m, k))
        if not v or all(j < 0 for j in v):
            e = Expr.form(fm.Y_atom(v, m, k))
            built = Built(e, e, axiomatic=bool(v))
        elif v[-1] > 0:
            e = P * fm.integral(self.build_Z(v).expr, "i")
            built = Built(e, e)
        else:
            p, tail = _split(v, keep_last=False)
            base = Expr.form(fm.Y_atom(tail, m, k)) * fm.integral(self.build_Z(p).expr, "i")
            built = self._correct(
                v, base, len(v), ("P", m, k),
                lambda u: self.build_Y(u, m, k), lambda u: self.DY(u, m, k), keep_last=False,
            )
        self.Y[key] = built
        return built

    # shared correction solver ------------------------------------------

    def _correct(self, v, base, n_slots, terminal, build, D, keep_last) -> Built:
        D0 = fm.slash_apply(base, fm.differences(fm.slots(n_slots)))
        target = leading_term(v, terminal)
        r_v = trailing_negatives(v, keep_last)
        candidates = []
        for key in D0.terms:
            labels = label_sequence(key, n_slots)
            if labels is None:
                raise ConstructionError(f"unexpected term {fm.format_expr(Expr({key: 1}))} for {v}")
            u = labels if terminal is None else labels
            if in_A(labels) or u == v:
                continue
            if trailing_negatives(u, keep_last) >= r_v:
                raise ConstructionError(f"correction {u} for {v} is not of lower type")
            candidates.append(u)
        candidates = sorted(set(candidates), key=vector_key)
        if not candidates:
            return Built(base, base)
        Ds = [D(u) for u in candidates]
        keys = set()
        for e in [D0, *Ds]:
            for key in e.terms:
                labels = label_sequence(key, n_slots)
                if labels is None:
                    raise ConstructionError(f"unexpected term in correction data for {v}")
                if not in_A(labels):
                    keys.add(key)
        keys = sorted(keys, key=repr)
        tkey = next(iter(target.terms))
        A = sympy.Matrix([[sympy.Rational(Du.terms.get(k, 0)) for Du in Ds] for k in keys])
        b = sympy.Matrix([sympy.Rational(D0.terms.get(k, 0)) - (1 if k == tkey else 0) for k in keys])
        try:
            sol, params = A.gauss_jordan_solve(b)
        except ValueError as exc:
            raise ConstructionError(f"correction system for {v} is inconsistent") from exc
        sol = sol.subs({p: 0 for p in params})
        expr = base
        corrections = []
        for u, x in zip(candidates, sol):
            c = Fraction(int(x.p), int(x.q))
            if c:
                expr = expr - build(u).expr * c
                corrections.append((u, c))
        return Built(expr, base, corrections)


# -- verification entry points -------------------------------------------------


def _check_law(report, case, D, v, n_slots, terminal, annihilate: Expr):
    residual = D - leading_term(v, terminal)
    bad = []
    for key in residual.terms:
        labels = label_sequence(key, n_slots)
        if labels is None or not in_A(labels):
            bad.append(key)
    lhs = fm.format_expr(D, limit=8)
    rhs = fm.format_expr(leading_term(v, terminal)) + " + (A-residual)"
    report.add(f"{case} law", not bad, lhs=lhs if bad else None, rhs=rhs if bad else None,
               residual_terms=len(residual), bad_terms=len(bad))
    report.add(f"{case} annihilation", not annihilate, lhs=fm.format_expr(annihilate, 4) if annihilate else None,
               rhs="0" if annihilate else None)


def construct_basis_Z(v: Sequence[int], g: int | None = None, builder: BasisBuilder | None = None):
    """Build Z_v and check its law and annihilation; returns (expr, report, built)."""
    v = tuple(v)
    builder = builder or BasisBuilder(g or max(abs(j) for j in v))
    report = VerificationReport("zbasis", "Z-basis cocycle law", {"v": list(v), "g": builder.g})
    with report.timed():
        built = builder.build_Z(v)
        t = len(v)
        kill = fm.slash_apply(built.expr, fm.differences(fm.slots(t)))
        _check_law(report, str(v), builder.DZ(v), v, t - 1, None, kill)
        report.cases[-2].detail["corrections"] = [[list(u), str(c)] for u, c in built.corrections]
    return built.expr, report, built


def construct_basis_Y(v: Sequence[int], m=1, k: int = 4, g: int | None = None,
                      builder: BasisBuilder | None = None):
    v = tuple(v)
    builder = builder or BasisBuilder(g or max([abs(j) for j in v] + [1]))
    report = VerificationReport("ybasis", "Y-basis cocycle law", {"v": list(v), "m": m, "k": k, "g": builder.g})
    with report.timed():
        built = builder.build_Y(v, m, k)
        t = len(v)
        kill = fm.slash_apply(built.expr, fm.differences(fm.slots(t + 1)))
        _check_law(report, str(v), builder.DY(v, m, k), v, t, ("P", m, k), kill)
        report.cases[-2].detail["corrections"] = [[list(u), str(c)] for u, c in built.corrections]
    return built.expr, report, built


def verify_Z_suite(g: int, t_max: int) -> VerificationReport:
    builder = BasisBuilder(g)
    report = VerificationReport("zbasis", "Z-basis cocycle law", {"g": g, "t": t_max})
    with report.timed():
        for t in range(1, t_max + 1):
            for v in enumerate_index_vectors(g, t, "I"):
                _, sub, _ = construct_basis_Z(v, builder=builder)
                report.cases.extend(sub.cases)
        report.cases.extend(independence_witness(builder, t_max).cases)
    return report


def verify_Y_suite(g: int, t_max: int, m=1, k: int = 4) -> VerificationReport:
    builder = BasisBuilder(g)
    report = VerificationReport("ybasis", "Y-basis cocycle law", {"g": g, "t": t_max, "m": m, "k": k})
    with report.timed():
        for t in range(0, t_max + 1):
            vs = [()] if t == 0 else enumerate_index_vectors(g, t, "I'")
            for v in vs:
                _, sub, _ = construct_basis_Y(v, m, k, builder=builder)
                report.cases.extend(sub.cases)
    return report


def independence_witness(builder: BasisBuilder, t: int) -> VerificationReport:
    """Leading terms are distinct and the leading-coefficient matrix is the identity."""
    report = VerificationReport("independence", "leading-term injectivity", {"g": builder.g, "t": t})
    vs = enumerate_index_vectors(builder.g, t, "I")
    leads = [leading_term(v) for v in vs]
    report.add(f"t={t} distinct leading terms", len({next(iter(e.terms)) for e in leads}) == len(vs))
    lead_keys = [next(iter(e.terms)) for e in leads]
    M = sympy.Matrix([[sympy.Rational(builder.DZ(v).terms.get(k, 0)) for k in lead_keys] for v in vs])
    report.add(f"t={t} leading matrix is identity", M == sympy.eye(len(vs)), rank=int(M.rank()))
    return report


# -- F law from first principles ------------------------------------------------


def nested_iterated(W: Sequence[int]) -> Expr:
    """f_{W1} * Int_a(f_{W2} * Int_a(...)) as an explicit nested monomial."""
    W = tuple(W)
    e = fm.basis(W[-1])
    for j in reversed(W[:-1]):
        e = fm.basis(j) * fm.integral(e, "a")
    return e


def _unnest(mono) -> tuple | None:
    if len(mono) == 1 and mono[0][0] == "B":
        return (mono[0][1],)
    if len(mono) == 2 and mono[0][0] == "B" and mono[1][0] == "I" and mono[1][1] == "a":
        rest = _unnest(mono[1][2])
        if rest is not None:
            return (mono[0][1],) + rest
    return None


def fold_iterated(e: Expr) -> Expr:
    """Replace nested monomials by F atoms, also inside period symbols."""
    out = Expr()
    for (scal, mono), c in e.terms.items():
        term = Expr.one() * c
        for s in scal:
            if s[0] == "per" and s[3] == "a" and _unnest(s[1]) is not None:
                term = term * fm.period_of_mono((fm.F_atom(_unnest(s[1])),), s[2], "a")
            else:
                term = term * Expr.scalar(s)
        W = _unnest(mono) if mono else None
        term = term * (Expr.form(fm.F_atom(W)) if W else Expr.form(*mono))
        out = out + term
    return out


def verify_F_law(g: int, t: int, vectors: Sequence[Sequence[int]] | None = None) -> VerificationReport:
    """Expand nested iterated integrals under g and g^-1 and compare with the atom law."""
    report = VerificationReport("flaw", "iterated-integral cocycle law", {"g": g, "t": t})
    with report.timed():
        if vectors is None:
            if g ** t > 10**6:
                raise ValueError("too many vectors; pass a sample")
            vectors = list(itertools.product(range(1, g + 1), repeat=t))
        for W in vectors:
            W = tuple(W)
            nested = nested_iterated(W)
            atom = Expr.form(fm.F_atom(W))
            for letter, sign in (("g", 1), ("g", -1)):
                lhs = fold_iterated(fm.slash_letter(nested, letter, sign) - nested)
                rhs = fm.slash_letter(atom, letter, sign) - atom
                ok = lhs == rhs
                report.add(f"{W} {letter}^{sign}", ok,
                           lhs=None if ok else fm.format_expr(lhs, 6), rhs=None if ok else fm.format_expr(rhs, 6))
            kill = fm.slash_apply(atom, fm.differences(fm.slots(t)))
            report.add(f"{W} annihilation", not kill)
    return report


# -- shuffle expansion, abstract and realized ------------------------------------


def verify_shuffle_expansion(t_max: int, realize: bool = True) -> VerificationReport:
    report = VerificationReport("lemma310", "shuffle expansion of slashed products", {"t": t_max})
    with report.timed():
        for t in range(1, t_max + 1):
            for r in range(1, t + 1):
                ex = expand_slash_product(r, t - r + 1, t)
                report.add(f"abstract r={r} t={t}", ex.equal,
                           lhs=None if ex.equal else " + ".join(map(format_term, ex.lhs)),
                           rhs=None if ex.equal else " + ".join(map(format_term, ex.rhs)),
                           shuffles=len(ex.rhs))
                if realize and t <= 4:
                    ok, lhs, rhs = realize_shuffle_identity(r, t)
                    report.add(f"realized r={r} t={t}", ok, lhs=None if ok else lhs, rhs=None if ok else rhs)
    return report


def realize_shuffle_identity(r: int, t: int) -> tuple[bool, str, str]:
    """(F G)|diffs against the shuffle sum with F = F_(1..), G = Int_a F_(2..).

    F has order r; G = Int of an order t-r form has order t-r+1.
    """
    W1 = tuple((j % 2) + 1 for j in range(r))
    F = Expr.form(fm.F_atom(W1))
    if t - r >= 1:
        W2 = tuple(((j + 1) % 2) + 1 for j in range(t - r))
        G = fm.integral(Expr.form(fm.F_atom(W2)), "a")
    else:
        G = Expr.one()
    letters = fm.slots(t - 1)
    lhs = fm.slash_apply(F * G, fm.differences(letters))
    rhs = Expr()
    for sh in enumerate_shuffles(r, t):
        Fs = fm.slash_apply(F, [fm.diff(letters[j - 1]) for j in sh.phi])
        Gs = fm.slash_apply(G, [fm.diff(letters[j - 1]) for j in sh.psi])
        rhs = rhs + Fs * Gs
    return lhs == rhs, fm.format_expr(lhs, 6), fm.format_expr(rhs, 6)


# -- R, a, S ledgers -------------------------------------------------------------


def _ledgers():
    cache_S: dict = {}
    cache_R: dict = {}

    def a(W):
        return sympy.Symbol("a_" + "_".join(map(str, W)))

    def J(W):
        return sympy.Symbol("J_" + "_".join(map(str, W)))

    def S(W):
        W = tuple(W)
        if not W:
            return sympy.Integer(1)
        if W not in cache_S:
            cache_S[W] = sympy.expand(sum(J(W[:r]) * S(W[r:]) for r in range(1, len(W) + 1)))
        return cache_S[W]

    def R(W):
        W = tuple(W)
        if len(W) < 2:
            raise ValueError("R needs order >= 2")
        if W not in cache_R:
            cache_R[W] = sympy.expand(a(W) + sum(J(W[:r]) * R(W[r:]) for r in range(1, len(W) - 1)))
        return cache_R[W]

    return a, S, R


def verify_lemma_3_8(t_max: int, g: int = 2) -> VerificationReport:
    """R from its recursion equals sum_j S_{i1..ij} a_{i(j+1)..it} for 2 <= t <= t_max."""
    report = VerificationReport("lemma38", "residue ledger expansion", {"t": t_max, "g": g})
    a, S, R = _ledgers()
    with report.timed():
        for t in range(2, t_max + 1):
            for W in itertools.product(range(1, g + 1), repeat=t):
                lhs = R(W)
                rhs = sympy.expand(sum(S(W[:j]) * a(W[j:]) for j in range(0, t - 1)))
                ok = sympy.expand(lhs - rhs) == 0
                report.add(f"{W}", ok, lhs=None if ok else str(lhs), rhs=None if ok else str(rhs))
    return report


def ledger_R(W: Sequence[int]):
    """Expanded R_W in terms of the a and J symbols (J_W is the conjugated integral to the cusp)."""
    return _ledgers()[2](tuple(W))
