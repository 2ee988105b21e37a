import json

from hof.report import VerificationReport, emit_report


def _sample(passed=True):
    rep = VerificationReport("demo", "toy identity", {"t": 2}, exact=False, tolerance=1e-8)
    rep.add("case a", True, 1e-12, 1 + 2j, 1 + 2j)
    rep.add("case b", passed, 3e-3 if not passed else 1e-11, "x" * 1000, "y", note="long")
    return rep


def test_vacuous_report():
    rep = VerificationReport("empty", "nothing", {})
    assert rep.passed and rep.vacuous
    assert "0 cases" in emit_report(rep)
    assert json.loads(emit_report(rep, "json"))["vacuous"] is True


def test_failing_case_has_excerpts():
    rep = _sample(passed=False)
    assert not rep.passed
    text = emit_report(rep)
    assert "FAIL case b" in text and "lhs: xxx" in text and "rhs: y" in text
    body = json.loads(emit_report(rep, "json"))
    fail = body["failures"][0]
    assert fail["case"] == "case b" and fail["lhs"].endswith("...") and len(fail["lhs"]) < 420


def test_json_round_trip():
    rep = _sample()
    rep.wall_time = 1.25
    d = json.loads(emit_report(rep, "json"))
    back = VerificationReport.from_dict(d)
    assert back.to_dict() == rep.to_dict()


def test_body_excludes_timing_and_is_stable():
    a, b = _sample(), _sample()
    a.wall_time, b.wall_time = 0.1, 9.9
    assert emit_report(a, "json", include_meta=False) == emit_report(b, "json", include_meta=False)
    keys = list(json.loads(emit_report(a, "json")).keys())
    assert keys[:3] == ["suite", "anchor", "params"] and keys[-1] == "meta"


def test_non_finite_residual_serializes():
    rep = VerificationReport("nan", "x", {})
    rep.add("c", False, float("inf"))
    assert json.loads(emit_report(rep, "json"))["cases"][0]["residual"] == "inf"
