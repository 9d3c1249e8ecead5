import dataclasses

import pytest
from conftest import model, verified

from wmha import coalg
from wmha.classify import REGULAR_CHECKS, STAR_CHECKS, WEAK_HOPF_CHECKS, Classification
from wmha.config import Settings
from wmha.exactla import Matrix
from wmha.fdalg import StarStructure
from wmha.pipeline import APPENDIX_CHECKS, run_verification
from wmha.report import FAIL, PASS, SKIP, failed, passed


def test_groupoid_algebra_is_weak_hopf_but_not_hopf(pair2_convolution):
    result = pair2_convolution.classification
    assert result.wmha and result.regular
    assert result.star_compatible is True
    assert result.weak_hopf
    assert not result.hopf
    assert result.reasons["hopf"] == "E != 1⊗1"


def test_function_algebra_classification(pair2_function):
    assert pair2_function.classification.one_line() == "wmha ✓, regular ✓, star ✓, weak_hopf ✓, hopf ✗"


@pytest.mark.parametrize("kind", ["function", "convolution"])
def test_cyclic_group_models_are_hopf(kind):
    result = verified("group:cyclic:3", kind).classification
    assert result.weak_hopf and result.hopf


def test_regular_suites_pass(pair2_function, pair2_convolution):
    ids = ("thm-4.10", "app-A.12") + REGULAR_CHECKS + WEAK_HOPF_CHECKS + APPENDIX_CHECKS + STAR_CHECKS
    for run in (pair2_function, pair2_convolution):
        for check_id in ids:
            assert run.builder.status(check_id) == PASS, check_id


def test_factorization_multipliers_are_recorded(pair2_convolution):
    F = pair2_convolution.classification.F
    assert sorted(F) == ["F1", "F2", "F3", "F4"]
    E = pair2_convolution.state.E
    # F1..F4 all coincide with E for a groupoid algebra
    assert F["F1"].left == E.left and F["F4"].right == E.right


def test_star_twisted_by_a_non_inversion_permutation():
    p = model("pair:2", "function")
    twisted = dataclasses.replace(p, star=StarStructure(p.algebra, Matrix.permutation([1, 0, 2, 3])))
    run = run_verification(twisted, Settings(round_trips=False), "def114")
    assert run.builder.status("star-valid") == PASS
    assert run.builder.status("prop-4.11-involution") == FAIL
    assert run.classification.star_compatible is False
    assert run.classification.regular


def test_round_trips_can_be_disabled():
    run = run_verification(model("pair:2", "convolution"), Settings(round_trips=False), "def114")
    for check_id in ("prop-4.3", "sec-4-cop", "app-A.12"):
        assert run.builder.status(check_id) == SKIP
    assert run.classification.regular


def test_classification_needs_the_first_path():
    run = run_verification(model("pair:2", "function"), Settings(), "thm29")
    assert run.classification.wmha
    assert not run.classification.regular
    assert run.builder.status("thm-4.10") == SKIP


def test_one_line_marks_unknown_star():
    line = Classification(wmha=True, regular=True, weak_hopf=True).one_line()
    assert line == "wmha ✓, regular ✓, star -, weak_hopf ✓, hopf ✗"


@pytest.mark.slow
def test_pair_groupoid_on_three_objects():
    result = verified("pair:3", "convolution").classification
    assert result.one_line() == "wmha ✓, regular ✓, star ✓, weak_hopf ✓, hopf ✗"


def test_failed_axiom_blocks_the_classification(monkeypatch):
    def broken_conditions(c, E, ext):
        return [passed("ass-1.10"), failed("def-1.14-ii", "(Δ⊗ι)E differs"), passed("prop-1.9")]

    monkeypatch.setattr(coalg, "check_E_conditions", broken_conditions)
    run = run_verification(model("pair:2", "convolution"), Settings(), "def114")
    result = run.classification
    assert not result.wmha
    assert not (result.regular or result.weak_hopf or result.hopf)
    assert result.one_line() == "wmha ✗, regular ✗, star -, weak_hopf ✗, hopf ✗"
    assert result.reasons["regular"] == "requires wmha"
    results = {r.id: r for r in run.builder.results()}
    for check_id in ("thm-4.10", "prop-4.2") + WEAK_HOPF_CHECKS:
        assert (results[check_id].status, results[check_id].detail) == (SKIP, "requires wmha"), check_id
