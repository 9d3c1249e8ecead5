import json

import pytest

from wmha.errors import NoCounit, ParseError
from wmha.exactla import Matrix
from wmha.report import (
    FAIL,
    PASS,
    SCHEMA,
    SKIP,
    CheckResult,
    ReportBuilder,
    VerificationReport,
    compare,
    passed,
)


def test_unregistered_ids_are_rejected():
    with pytest.raises(KeyError):
        CheckResult("made-up", PASS)


def test_window_prefix_keeps_the_anchor():
    result = passed("prop-4.4").with_prefix("window-2/")
    assert result.id == "window-2/prop-4.4"
    assert result.anchor == "Prop 4.4"


def test_compare_reports_the_first_difference():
    a = Matrix.from_rows([[1, 0], [0, 1]])
    b = Matrix.from_rows([[1, 0], [2, 1]])
    result = compare("prop-4.4", [("same", a, a), ("other", a, b)], row_label=lambda i: f"r{i}")
    assert result.status == FAIL
    assert result.detail == "other differs"
    assert result.counterexample == {"row": "r1", "col": "0", "actual": "0", "expected": "2"}


def test_builder_skips_on_missing_prerequisites():
    builder = ReportBuilder()
    builder.add(passed("alg-associative"))
    assert builder.run("alg-nondegenerate", lambda: passed("alg-nondegenerate"), ("alg-associative",))
    assert not builder.run("prop-1.6", lambda: passed("prop-1.6"), ("ass-1.5-E",))
    skip = builder.results()[-1]
    assert skip.status == SKIP and skip.detail == "requires ass-1.5-E"


def test_builder_turns_engine_errors_into_failures():
    builder = ReportBuilder()

    def boom():
        raise NoCounit("no functional")

    assert not builder.run("def-1.3-counit", boom)
    assert builder.status("def-1.3-counit") == FAIL
    assert builder.results()[0].detail == "NoCounit: no functional"


def test_builder_lets_input_errors_through():
    builder = ReportBuilder()

    def bad_input():
        raise ParseError("broken", "$.algebra")

    with pytest.raises(ParseError):
        builder.run("alg-associative", bad_input)


def test_results_follow_the_registry_order():
    builder = ReportBuilder()
    builder.add(passed("prop-4.4"))
    builder.add(passed("alg-associative"))
    builder.add(passed("window-1/alg-associative"))
    assert [r.id for r in builder.results()] == ["alg-associative", "prop-4.4", "window-1/alg-associative"]


def test_report_document_is_deterministic():
    checks = [passed("alg-associative", "ok"), CheckResult("prop-4.4", FAIL, "E differs")]
    report = VerificationReport(checks, witnesses={"E": {"rank": 2}}, seed=0, input_digest="sha256:x")
    doc = json.loads(report.dumps())
    assert doc["schema"] == SCHEMA
    assert doc["verdict"] == FAIL
    assert report.exit_code == 1
    assert report.first_failure().id == "prop-4.4"
    assert report.dumps() == report.dumps()
    assert [c["id"] for c in doc["checks"]] == ["alg-associative", "prop-4.4"]
