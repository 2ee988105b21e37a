"""Structured verification outcomes with stable JSON and text rendering."""

from __future__ import annotations

import json
import math
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Any


@dataclass
class CaseResult:
    case: str
    passed: bool
    residual: float | None = None
    lhs: str | None = None
    rhs: str | None = None
    detail: dict[str, Any] = field(default_factory=dict)


@dataclass
class VerificationReport:
    suite: str
    anchor: str
    params: dict[str, Any]
    cases: list[CaseResult] = field(default_factory=list)
    exact: bool = True
    tolerance: float | None = None
    wall_time: float = 0.0

    def add(self, case: str, passed: bool, residual: float | None = None, lhs=None, rhs=None, **detail) -> CaseResult:
        c = CaseResult(case, bool(passed), None if residual is None else float(residual),
                       None if lhs is None else str(lhs), None if rhs is None else str(rhs), detail)
        self.cases.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def vacuous(self) -> bool:
        return not self.cases

    @property
    def max_residual(self) -> float | None:
        vals = [c.residual for c in self.cases if c.residual is not None]
        return max(vals) if vals else None

    @property
    def failures(self) -> list[CaseResult]:
        return [c for c in self.cases if not c.passed]

    def body(self) -> dict[str, Any]:
        """Everything except timing, in a fixed key order."""
        return {
            "suite": self.suite,
            "anchor": self.anchor,
            "params": self.params,
            "exact": self.exact,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "n_cases": len(self.cases),
            "vacuous": self.vacuous,
            "max_residual": self.max_residual,
            "cases": [_case_dict(c) for c in self.cases],
            "failures": [
                {"case": c.case, "lhs": _excerpt(c.lhs), "rhs": _excerpt(c.rhs)} for c in self.failures
            ],
        }

    def to_dict(self) -> dict[str, Any]:
        d = self.body()
        d["meta"] = {"wall_time": self.wall_time}
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "VerificationReport":
        r = cls(d["suite"], d["anchor"], d["params"], exact=d["exact"], tolerance=d["tolerance"])
        for c in d["cases"]:
            r.cases.append(CaseResult(c["case"], c["passed"], c.get("residual"), c.get("lhs"),
                                      c.get("rhs"), c.get("detail", {})))
        r.wall_time = d.get("meta", {}).get("wall_time", 0.0)
        return r

    @contextmanager
    def timed(self):
        t0 = time.perf_counter()
        try:
            yield self
        finally:
            self.wall_time += time.perf_counter() - t0


def _case_dict(c: CaseResult) -> dict[str, Any]:
    d = asdict(c)
    if d["residual"] is not None and not math.isfinite(d["residual"]):
        d["residual"] = str(d["residual"])
    return d


def _excerpt(s: str | None, n: int = 400) -> str | None:
    if s is None or len(s) <= n:
        return s
    return s[:n] + "..."


def emit_report(report: VerificationReport, fmt: str = "text", include_meta: bool = True) -> str:
    if fmt == "json":
        d = report.to_dict() if include_meta else report.body()
        return json.dumps(d, indent=2, sort_keys=False, default=str)
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = [f"suite: {report.suite} ({report.anchor})"]
    lines.append("params: " + ", ".join(f"{k}={v}" for k, v in report.params.items()))
    if report.vacuous:
        lines.append("0 cases (vacuous pass)")
    else:
        kind = "exact" if report.exact else f"max residual {report.max_residual:.3e} (tol {report.tolerance})"
        lines.append(f"{len(report.cases)} cases, {len(report.failures)} failed, {kind}")
    for c in report.failures[:10]:
        lines.append(f"  FAIL {c.case}")
        if c.lhs is not None:
            lines.append(f"    lhs: {_excerpt(c.lhs, 200)}")
        if c.rhs is not None:
            lines.append(f"    rhs: {_excerpt(c.rhs, 200)}")
    lines.append("PASS" if report.passed else "FAIL")
    return "\n".join(lines)
