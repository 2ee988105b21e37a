"""Numerical Eichler integrals, periods and iterated integrals for a prime-level newform.

Evaluation anywhere in the upper half plane goes through SL_2(Z) reduction
z = M w. Writing M = gamma r with r one of the coset representatives
1, S T^k of Gamma_0(N), the newform satisfies

    f(z) = (f|r)(w) j(M, w)^2,    A(z) = {inf, M inf} + int_inf^w f|r,

with f|S T^k (w) = (eps/N) f((w + k)/N) from the Fricke involution. The
modular symbol {inf, a/c} is split along continued-fraction convergents.
Iterated integrals at low points are integrated along vertical paths on
Chebyshev panels whose heights shrink geometrically.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .group import GroupData, GroupElement, default_group, reduce_to_fundamental
from .qseries import QSeries, antiderivative, evaluate, evaluate_many, load_newform, multiply
from .report import VerificationReport


EPS = float(np.finfo(float).eps)


class PeriodError(ValueError):
    pass


# -- fast reduction on plain integers --------------------------------------------


def reduce_fast(z: complex, max_iter: int = 10_000) -> tuple[complex, tuple[int, int, int, int]]:
    """Same contract as group.reduce_sl2z but with integer tuples (a, b, c, d)."""
    a, b, c, d = 1, 0, 0, 1
    x, y = z.real, z.imag
    if not y > 0:
        raise PeriodError(f"point {z} is not in the upper half plane")
    for _ in range(max_iter):
        n = math.floor(x + 0.5)
        if n:
            x -= n
            b += a * n
            d += c * n
        r2 = x * x + y * y
        if r2 < 1 - 1e-15:
            x, y = -x / r2, y / r2
            # M <- M S^{-1}, S^{-1} = [[0, 1], [-1, 0]]
            a, b = -b, a
            c, d = -d, c
        else:
            if c < 0 or (c == 0 and d < 0):
                a, b, c, d = -a, -b, -c, -d
            return complex(x, y), (a, b, c, d)
    raise PeriodError(f"reduction of {z} did not terminate")


def continued_fraction(a: int, c: int) -> list[int]:
    out = []
    while c:
        q, r = divmod(a, c)
        out.append(q)
        a, c = c, r
    return out


# -- transport for a Fricke eigenform of prime level ------------------------------


class NewformTransport:
    """Evaluates a weight-2 newform f and A(z) = int_{i inf}^z f anywhere in H."""

    def __init__(self, f: QSeries, group: GroupData | None = None, eps: int | None = None):
        self.f = f
        self.group = group or default_group()
        N = self.group.level
        if N < 2 or any(N % p == 0 for p in range(2, math.isqrt(N) + 1)):
            raise PeriodError("transport is implemented for prime level")
        level = f.meta.get("level")
        if level is not None and level != N:
            raise PeriodError(f"form has level {level}, group has level {N}")
        if not f.cuspidal:
            raise PeriodError("transport needs a cusp form")
        self.N = N
        self.A_series = antiderivative(f)
        self.eps = int(round(-f.coeff(N).real)) if eps is None else eps
        if self.eps not in (1, -1):
            raise PeriodError(f"a_N = {f.coeff(N)} does not give a Fricke sign")
        self.min_height = math.sqrt(3) / 2 / N
        self.fricke_defect = self._check_fricke()
        r = 1 / math.sqrt(N)
        self.A0 = (1 - self.eps) * self._A_direct(1j * r)
        self.A_k = {0: self.A0}
        for k in range(1, N):
            self.A_k[k] = self._A_cusp_direct(k)
        self.phi_r: dict[GroupElement, complex] = {}
        for key, rep in self.group._coset_table.items():
            if rep.is_identity():
                self.phi_r[rep] = -self.A0
            else:
                k = rep.d % N
                self.phi_r[rep] = -self.eps * self.A_k[k]
        self._modsym_cache: dict[tuple[int, int], complex] = {}

    # direct series, used only at heights >= min_height
    def _f_direct(self, z):
        return evaluate(self.f, z, y_min=0.0)[0]

    def _A_direct(self, z):
        return evaluate(self.A_series, z, y_min=0.0)[0]

    def _check_fricke(self) -> float:
        z = 0.13 + 0.37j
        lhs = self._f_direct(-1 / (self.N * z))
        rhs = self.eps * self.N * z * z * self._f_direct(z)
        defect = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
        if defect > 1e-8:
            raise PeriodError(f"Fricke relation fails (defect {defect:.2e}); not an eigenform?")
        return defect

    def _A_cusp_direct(self, k: int) -> complex:
        """A(k/N) as the period of [[k, b], [N, d]] between symmetric points of height 1/N."""
        N = self.N
        d = pow(k, -1, N)
        b = (k * d - 1) // N
        z = complex(-d / N, 1 / N)
        gz = complex(k / N, 1 / N)
        assert abs(GroupElement(k, b, N, d)(z) - gz) < 1e-12
        return self._A_direct(gz) - self._A_direct(z)

    def tail_bound(self) -> float:
        """Largest series tail over the heights the transport ever evaluates at."""
        return max(self.A_series.tail_bound(self.min_height), self.f.tail_bound(self.min_height))

    def rounding_bound(self, z: complex) -> float:
        """First-order floating-point error of A(z): z itself is only known to
        relative precision eps, and A'(z) = f(z) is large near the real axis.
        The factor 16 covers the reduction and transport steps (observed <= 2).
        """
        z = complex(z)
        return 16 * EPS * ((1 + abs(z)) * abs(self.f_at(z)) + abs(self.A_at(z)))

    # modular symbols
    def modsym(self, a: int, c: int) -> complex:
        """int_{i inf}^{a/c} f for coprime a, c (c = 0 means the cusp at infinity)."""
        if c == 0:
            return 0j
        if c < 0:
            a, c = -a, -c
        key = (a, c)
        if key in self._modsym_cache:
            return self._modsym_cache[key]
        total = 0j
        p_prev, q_prev = 1, 0
        p, q = 0, 1
        # convergents p_j/q_j; step j contributes the integral from p_{j-1}/q_{j-1} to p_j/q_j
        for j, an in enumerate(continued_fraction(a, c)):
            if j == 0:
                p, q, p_prev, q_prev = an, 1, 1, 0
            else:
                p, q, p_prev, q_prev = an * p + p_prev, an * q + q_prev, p, q
            s = 1 if j % 2 == 1 else -1  # (-1)^(j-1)
            g = GroupElement(p, s * p_prev, q, s * q_prev)
            total += self.phi_r[self.group.coset_rep(g)]
        self._modsym_cache[key] = total
        return total

    # evaluation
    def _branches(self, zs: np.ndarray):
        ws, us, jac, syms, ids = [], [], [], [], []
        for z in zs:
            w, (a, b, c, d) = reduce_fast(complex(z))
            key = self.group._coset_table[_p1(c, d, self.N)]
            jm = c * w + d
            if key.is_identity():
                ws.append(w)
                ids.append(True)
            else:
                k = key.d % self.N
                ws.append((w + k) / self.N)
                ids.append(False)
            jac.append(jm)
            syms.append((a, c))
        return np.array(ws), np.array(jac), syms, np.array(ids, dtype=bool)

    def f_many(self, zs) -> np.ndarray:
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        ws, jac, _, ids = self._branches(zs)
        vals = evaluate_many(self.f, ws)
        vals = np.where(ids, vals, self.eps / self.N * vals)
        return vals * jac**2

    def A_many(self, zs) -> np.ndarray:
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        ws, _, syms, ids = self._branches(zs)
        vals = evaluate_many(self.A_series, ws)
        vals = np.where(ids, vals, self.eps * vals)
        return vals + np.array([self.modsym(a, c) for a, c in syms])

    def f_at(self, z: complex) -> complex:
        return complex(self.f_many([z])[0])

    def A_at(self, z: complex) -> complex:
        return complex(self.A_many([z])[0])


def _p1(c: int, d: int, n: int) -> tuple[int, int]:
    from .group import _p1_class

    return _p1_class(c, d, n)


_TRANSPORTS: dict[tuple, NewformTransport] = {}


def transport_for(f: QSeries, group: GroupData | None = None) -> NewformTransport:
    key = (id(f), id(group))
    if key not in _TRANSPORTS:
        _TRANSPORTS[key] = NewformTransport(f, group)
    return _TRANSPORTS[key]


@lru_cache(maxsize=None)
def default_newform() -> QSeries:
    return load_newform()


def default_transport() -> NewformTransport:
    return transport_for(default_newform())


# -- order-1 periods -------------------------------------------------------------


@dataclass
class PeriodRecord:
    label: str
    gamma: GroupElement
    value: complex
    basepoint: str
    y_used: float
    tol: float

    def to_json(self, level: int) -> dict:
        return {"level": level, "label": self.label, "gamma": [list(r) for r in self.gamma.entries],
                "value": [self.value.real, self.value.imag], "y_used": self.y_used, "tol": self.tol}


def period(f: QSeries | NewformTransport, gamma: GroupElement, z0: complex | None = None) -> complex:
    """int_{z0}^{gamma z0} f, or the modular symbol {inf, gamma inf} when z0 is None."""
    return period_record(f, gamma, z0).value


def period_record(f: QSeries | NewformTransport, gamma: GroupElement, z0: complex | None = None) -> PeriodRecord:
    tr = f if isinstance(f, NewformTransport) else transport_for(f)
    if not tr.group.contains(gamma):
        raise PeriodError(f"{gamma} is not in Gamma_0({tr.N})")
    label = tr.f.meta.get("label", "f")
    if z0 is None:
        val = tr.modsym(gamma.a, gamma.c)
        return PeriodRecord(label, gamma, val, "cusp", tr.min_height, tr.tail_bound())
    z0 = complex(z0)
    if not z0.imag > 0:
        raise PeriodError("basepoint must lie in the upper half plane")
    gz = gamma(z0)
    val = tr.A_at(gz) - tr.A_at(z0)
    tol = 2 * tr.tail_bound() + tr.rounding_bound(gz) + tr.rounding_bound(z0)
    return PeriodRecord(label, gamma, val, f"z0={z0}", tr.min_height, tol)


class PeriodCache:
    """JSON-lines period store; writers publish through an atomic rename."""

    def __init__(self, path: str | Path | None = None):
        if path is None:
            path = os.environ.get("HOF_CACHE")
        self.path = Path(path) if path else None
        self.mem: dict[tuple, complex] = {}
        if self.path and self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    rec = json.loads(line)
                    self.mem[(rec["level"], rec["label"], _gkey(rec["gamma"]))] = complex(*rec["value"])

    def get(self, tr: NewformTransport, gamma: GroupElement) -> complex:
        key = (tr.N, tr.f.meta.get("label", "f"), _gkey(gamma.entries))
        if key not in self.mem:
            rec = period_record(tr, gamma)
            self.mem[key] = rec.value
            if self.path:
                self._publish(rec.to_json(tr.N))
        return self.mem[key]

    def _publish(self, record: dict) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        old = self.path.read_text(encoding="utf-8") if self.path.exists() else ""
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".periods-")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(old)
            fh.write(json.dumps(record, sort_keys=True) + "\n")
        os.replace(tmp, self.path)


def _gkey(m) -> tuple:
    return tuple(tuple(int(x) for x in row) for row in m)


# -- iterated forms ------------------------------------------------------------------


@dataclass
class IteratedForm:
    """F_v with the Fourier data of every suffix stage.

    ``stages[k]`` is the series of F_{v[k:]} and ``prims[k]`` its integral
    from the cusp at infinity.
    """

    v: tuple[int, ...]
    series: QSeries
    stages: list[QSeries]
    prims: list[QSeries]
    forms: dict[int, QSeries]
    provenance: list[str] = field(default_factory=list)

    @property
    def t(self) -> int:
        return len(self.v)


def build_iterated(v: Sequence[int], N: int = 200, forms: dict[int, QSeries] | None = None) -> IteratedForm:
    """Innermost-out: antiderivative, multiply, antiderivative, ..., multiply by f_{v1}."""
    v = tuple(v)
    if not v:
        raise PeriodError("empty index vector")
    if any(j <= 0 for j in v):
        raise PeriodError("only positive labels have a single Fourier expansion at infinity")
    forms = forms or {1: default_newform()}
    missing = [j for j in v if j not in forms]
    if missing:
        raise PeriodError(f"no form data for labels {missing}")
    forms = {j: s.truncate(N) for j, s in forms.items()}
    t = len(v)
    stages: list[QSeries] = [None] * t
    prims: list[QSeries] = [None] * t
    log = []
    cur = forms[v[-1]]
    stages[t - 1] = cur
    prims[t - 1] = antiderivative(cur)
    log.append(f"F{v[-1:]} = f{v[-1]}")
    for k in range(t - 2, -1, -1):
        cur = multiply(forms[v[k]], prims[k + 1], N)
        stages[k] = cur
        prims[k] = antiderivative(cur)
        log.append(f"F{v[k:]} = f{v[k]} * Int F{v[k + 1:]} (n0={cur.n0}, N={cur.N})")
    return IteratedForm(v, stages[0], stages, prims, forms, log)


# -- Chebyshev panel quadrature --------------------------------------------------------

N_NODES = 24
HEIGHT_RATIO = 1.3
Y_SERIES = 0.5


@lru_cache(maxsize=None)
def _cheb(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Chebyshev points on [-1, 1] (ascending) and the cumulative integration matrix."""
    from numpy.polynomial import chebyshev as C

    s = -np.cos(np.pi * np.arange(n + 1) / n)
    V = C.chebvander(s, n)
    Vinv = np.linalg.inv(V)
    Q = np.zeros((n + 1, n + 1))
    for j in range(n + 1):
        coef = Vinv[:, j]
        Q[:, j] = C.chebval(s, C.chebint(coef, lbnd=-1))
    return s, Q


def vertical_panels(y_hi: float, y_lo: float, ratio: float = HEIGHT_RATIO) -> list[tuple[float, float]]:
    out = []
    y = y_hi
    while y > y_lo * ratio * (1 + 1e-12):
        out.append((y, y / ratio))
        y /= ratio
    out.append((y, y_lo))
    return out


class Tower:
    """Evaluates F_v and the integrals H_k = int_inf^z F_{v[k:]} anywhere in H."""

    def __init__(self, form: IteratedForm, transports: dict[int, NewformTransport] | None = None,
                 n_nodes: int = N_NODES, ratio: float = HEIGHT_RATIO, y_series: float = Y_SERIES):
        self.form = form
        if transports is None:
            transports = {j: transport_for(s) if s is default_newform() else NewformTransport(s)
                          for j, s in form.forms.items()}
        self.tr = transports
        self.n_nodes = n_nodes
        self.ratio = ratio
        self.y_series = y_series

    def _series_values(self, z: complex) -> np.ndarray:
        return np.array([evaluate(p, z, y_min=0.0)[0] for p in self.form.prims])

    def integrals(self, z: complex, start: complex | None = None, start_values=None) -> np.ndarray:
        """[H_0(z), ..., H_{t-1}(z)], H_0 = int F_v.

        Above ``y_series`` the stage series are used directly. Below, the
        nested integrals are carried down a vertical path from height y_series
        (or from ``start`` with given ``start_values``).
        """
        z = complex(z)
        if start is None and z.imag >= self.y_series:
            return self._series_values(z)
        if start is None:
            start = complex(z.real, self.y_series)
            start_values = self._series_values(start)
        H = np.array(start_values, dtype=complex)
        x = z.real
        if abs(start.real - x) > 1e-15:
            raise PeriodError("paths are vertical; start must share the real part")
        s, Q = _cheb(self.n_nodes)
        v = self.form.v
        t = len(v)
        for y_hi, y_lo in vertical_panels(start.imag, z.imag, self.ratio):
            pts = x + 1j * (y_hi + (s + 1) / 2 * (y_lo - y_hi))
            dz = 1j * (y_lo - y_hi) / 2
            fvals = {j: self.tr[j].f_many(pts) for j in set(v)}
            inner = np.ones_like(pts)
            for k in range(t - 1, -1, -1):
                vals = H[k] + Q @ (fvals[v[k]] * inner * dz)
                H[k] = vals[-1]
                inner = vals
        return H

    def F(self, z: complex) -> complex:
        z = complex(z)
        v = self.form.v
        if len(v) == 1:
            return self.tr[v[0]].f_at(z)
        if z.imag >= self.y_series:
            return evaluate(self.form.series, z, y_min=0.0)[0]
        H = self.integrals(z)
        return self.tr[v[0]].f_at(z) * H[1]

    def A(self, z: complex) -> complex:
        """int_{i inf}^z F_v."""
        return complex(self.integrals(z)[0])


def closed_form_ones(t: int, tr: NewformTransport, z: complex) -> tuple[complex, complex]:
    """For v = (1,...,1): F = f A^(t-1)/(t-1)! and int F = A^t / t!."""
    f = tr.f_at(z)
    A = tr.A_at(z)
    return f * A ** (t - 1) / math.factorial(t - 1), A**t / math.factorial(t)


def quadrature_oracle(form: IteratedForm, z: complex, y_top: float = 8.0) -> np.ndarray:
    """Nested integrals from height y_top, starting from zero, using only the base forms.

    Independent of the product/antiderivative series: at y_top the true
    values are below e^{-2 pi y_top}.
    """
    tower = Tower(form)
    start = complex(complex(z).real, y_top)
    return tower.integrals(z, start=start, start_values=np.zeros(form.t, dtype=complex))


# -- verification -------------------------------------------------------------------------

DEFAULT_SEED = 42


def _tolerance(t: int) -> float:
    return 1e-10 if t == 1 else (1e-8 if t == 2 else 1e-6)


def sample_gammas(group: GroupData, rng: np.random.Generator, n: int, max_len: int = 3) -> list[GroupElement]:
    out = []
    gens = [g for g in group.generators if g.c != 0]
    allg = list(group.generators)
    while len(out) < n:
        length = int(rng.integers(1, max_len + 1))
        g = GroupElement.identity()
        for _ in range(length):
            h = allg[rng.integers(len(allg))]
            g = g * (h if rng.integers(2) else h.inverse())
        if g.c == 0:
            h = gens[rng.integers(len(gens))]
            g = g * h
        if g.c != 0:
            out.append(g)
    return out


def symmetric_point(gamma: GroupElement, rng: np.random.Generator) -> complex:
    """A point near -d/c + i/c, where z and gamma z both have height about 1/c."""
    c, d = gamma.c, gamma.d
    return complex(-d / c + rng.uniform(-0.2, 0.2) / c, rng.uniform(0.85, 1.15) / c)


def verify_modularity(f: QSeries | None = None, n_samples: int = 10, seed: int = DEFAULT_SEED,
                      tol: float = 1e-10, group: GroupData | None = None, c_limit: int = 33) -> VerificationReport:
    """f(gamma z) j^-2 = f(z) from the raw series, at points where both heights are about 1/c."""
    f = f or default_newform()
    group = group or default_group()
    rng = np.random.default_rng(seed)
    report = VerificationReport("modularity", "weight-2 invariance", {"samples": n_samples, "seed": seed},
                                exact=False, tolerance=tol)
    with report.timed():
        gams = [g for g in sample_gammas(group, rng, 20 * n_samples) if g.c <= c_limit][:n_samples]
        for g in gams:
            z = symmetric_point(g, rng)
            gz = g(z)
            y_floor = min(z.imag, gz.imag)
            lhs, t1 = evaluate(f, gz, y_min=0.0)
            lhs = lhs / g.j(z) ** 2
            rhs, t2 = evaluate(f, z, y_min=0.0)
            scale = max(abs(lhs), abs(rhs))
            res = abs(lhs - rhs) / scale
            report.add(f"gamma={g} z={z:.6f}", res <= tol, res, lhs=lhs, rhs=rhs,
                       tail=(t1 / abs(g.j(z)) ** 2 + t2) / scale, height=y_floor)
    return report


class CocycleEvaluator:
    """Both sides of the iterated-integral cocycle law at sample points."""

    def __init__(self, v: Sequence[int], N: int = 200, forms=None, Y: float = 20.0):
        self.v = tuple(v)
        self.N = N
        self.forms = forms
        self.Y = Y
        self.towers: dict[tuple, Tower] = {}
        self._pi: dict = {}

    def tower(self, w: tuple) -> Tower:
        if w not in self.towers:
            self.towers[w] = Tower(build_iterated(w, self.N, self.forms))
        return self.towers[w]

    def slash(self, w: tuple, gamma: GroupElement, z: complex) -> complex:
        return self.tower(w).F(gamma(z)) / gamma.j(z) ** 2

    def Pi(self, w: tuple, gamma: GroupElement, Y: float | None = None, x0: float = 0.1) -> complex:
        """int_inf^{gamma inf} F_w as A_w(gamma z0) - A_w(z0) with z0 = x0 + iY."""
        Y = self.Y if Y is None else Y
        key = (w, gamma, Y)
        if key not in self._pi:
            z0 = complex(x0, Y)
            tw = self.tower(w)
            self._pi[key] = tw.A(gamma(z0)) - tw.A(z0)
        return self._pi[key]

    def law(self, gamma: GroupElement, z: complex) -> tuple[complex, complex, float]:
        v = self.v
        lhs = self.slash(v, gamma, z) - self.tower(v).F(z)
        rhs = 0j
        for r in range(1, len(v)):
            rhs += self.tower(v[:r]).F(z) * self.Pi(v[r:], gamma)
        scale = max(abs(lhs), abs(rhs), abs(self.tower(v).F(z)))
        return lhs, rhs, scale

    def annihilation(self, gammas: Sequence[GroupElement], z: complex) -> tuple[complex, float]:
        """F_v | (g_1 - 1)...(g_n - 1) at z, with the largest term size for scaling."""
        total = 0j
        scale = 0.0
        n = len(gammas)
        for mask in range(1 << n):
            g = GroupElement.identity()
            for i in range(n):
                if mask >> i & 1:
                    g = g * gammas[i]
            term = self.slash(self.v, g, z) if not g.is_identity() else self.tower(self.v).F(z)
            sign = (-1) ** (n - bin(mask).count("1"))
            total += sign * term
            scale = max(scale, abs(term))
        return total, scale


def verify_numeric_cocycle(v: Sequence[int] = (1, 1), n_samples: int = 10, seed: int = DEFAULT_SEED,
                           tol: float | None = None, N: int = 200, annihilation: bool = True,
                           group: GroupData | None = None) -> VerificationReport:
    """Check the slash law of F_v and its annihilation at seeded samples.

    Sample points have Im z in [0.5, 1]; the gamma images are low and are
    reached by the panel quadrature. Order 1 is the modularity check.
    """
    v = tuple(v)
    t = len(v)
    tol = _tolerance(t) if tol is None else tol
    if t == 1:
        rep = verify_modularity(build_iterated(v, N).series, n_samples, seed, tol, group)
        rep.params["v"] = list(v)
        return rep
    group = group or default_group()
    rng = np.random.default_rng(seed)
    report = VerificationReport("numeric-cocycle", "iterated-integral slash law",
                                {"v": list(v), "samples": n_samples, "seed": seed, "N": N}, exact=False,
                                tolerance=tol)
    ev = CocycleEvaluator(v, N)
    with report.timed():
        gams = sample_gammas(group, rng, n_samples)
        for g in gams:
            z = complex(rng.uniform(0, 1), rng.uniform(0.5, 1.0))
            lhs, rhs, scale = ev.law(g, z)
            res = abs(lhs - rhs) / scale
            stab = max(abs(ev.Pi(v[r:], g) - ev.Pi(v[r:], g, 2 * ev.Y)) for r in range(1, t))
            report.add(f"law gamma={g} z={z:.4f}", res <= tol, res, lhs=lhs, rhs=rhs, stabilization=stab)
        if annihilation:
            for i in range(n_samples):
                gs = sample_gammas(group, rng, t, max_len=2)
                z = complex(rng.uniform(0, 1), rng.uniform(0.5, 1.0))
                val, scale = ev.annihilation(gs, z)
                res = abs(val) / scale
                report.add(f"annihilation {gs} z={z:.4f}", res <= tol, res, lhs=val, rhs=0)
    return report


# -- growth ----------------------------------------------------------------------------------


@dataclass
class GrowthResult:
    v: tuple
    degree: float
    fit_residual: float
    values: list[float]
    heights: list[float]
    bounded_ratio: float | None = None


def growth_probe(v: Sequence[int] = (1,), gamma: GroupElement | None = None, x0: float = 0.17,
                 y_range: tuple[float, float] = (2.0, 1e4), n_points: int = 12, N: int = 200) -> GrowthResult:
    """Fit log|int_inf^z F_v| against log log y along z = gamma(x0 + iy).

    Also records sup of Im(z)|f(z)| on the ladder relative to its sup over a
    fundamental-domain grid (the ratio stays <= 1 when Im(z)|f(z)| is bounded).
    """
    v = tuple(v)
    group = default_group()
    gamma = gamma or GroupElement(7, -2, 11, -3)
    tower = Tower(build_iterated(v, N))
    ys = np.geomspace(y_range[0], y_range[1], n_points)
    vals = []
    for y in ys:
        z = gamma(complex(x0, y))
        vals.append(abs(tower.A(z)))
    vals_a = np.maximum(np.array(vals), 1e-300)
    X = np.log(np.log(ys))
    coef, res, *_ = np.polyfit(X, np.log(vals_a), 1, full=True)
    degree = float(coef[0])
    fit_res = float(np.sqrt(res[0] / len(ys))) if len(res) else 0.0
    ratio = None
    if len(v) == 1:
        tr = tower.tr[v[0]]
        ladder = max(gamma(complex(x0, y)).imag * abs(tr.f_at(gamma(complex(x0, y)))) for y in ys)
        ratio = ladder / fundamental_sup(tr, group)
    return GrowthResult(v, degree, fit_res, [float(x) for x in vals], [float(y) for y in ys], ratio)


def fundamental_sup(tr: NewformTransport, group: GroupData, n: int = 40) -> float:
    """max of Im(z)|f(z)| over translates r F of the standard domain (grid estimate)."""
    best = 0.0
    xs = np.linspace(-0.5, 0.5, n)
    ys = np.sqrt(1 - np.minimum(xs**2, 1)) + 1e-9
    pts = []
    for x, ylow in zip(xs, ys):
        for y in np.geomspace(ylow, 3.0, n):
            pts.append(complex(x, y))
    for r in group.sl2z_coset_reps:
        zs = np.array([r(p) for p in pts])
        vals = np.abs(tr.f_many(zs)) * zs.imag
        best = max(best, float(vals.max()))
    return best
