import pytest
from conftest import MUTATIONS, model

from wmha.config import Settings
from wmha.errors import BadParameter
from wmha.pipeline import mutate, run_verification, verify
from wmha.report import FAIL, PASS, SKIP


def test_report_of_a_model():
    report = verify(model("pair:2", "function"), digest="sha256:abc")
    assert report.verdict == PASS
    assert report.paths == ["def114", "thm29"]
    assert report.input_digest == "sha256:abc"
    assert report.classification["weak_hopf"] is True
    assert report.check("thm-2.9-paths-agree").status == PASS


@pytest.mark.parametrize("path, skipped", [("def114", "thm-2.9-paths-agree"), ("thm29", "prop-2.7")])
def test_single_path_skips_the_other(path, skipped):
    run = run_verification(model("pair:2", "convolution"), Settings(), path)
    assert run.paths == [path]
    assert run.passed
    assert run.builder.status(skipped) == SKIP


def test_unknown_path():
    with pytest.raises(BadParameter):
        run_verification(model("pair:2", "function"), Settings(), "shortcut")


def test_prefix_applies_to_every_check():
    run = run_verification(model("group:cyclic:2", "convolution"), Settings(), prefix="window-1/")
    assert all(r.id.startswith("window-1/") for r in run.builder.results())


@pytest.mark.parametrize("kind, target, index, first", MUTATIONS)
def test_single_entry_mutations_are_caught(kind, target, index, first):
    report = verify(mutate(model("pair:2", kind), target, index))
    assert report.verdict == FAIL
    assert report.exit_code == 1
    assert report.first_failure().id.startswith(first)


def test_mutation_leaves_the_input_alone():
    p = model("pair:2", "function")
    mutated = mutate(p, "T1", (0, 0))
    assert mutated.coproduct.T1 != p.coproduct.T1
    assert p.coproduct.T3 is not None


def test_bad_mutations():
    p = model("pair:2", "function")
    with pytest.raises(BadParameter):
        mutate(p, "T1", (16, 0))
    with pytest.raises(BadParameter):
        mutate(p, "counit", (0,))


def test_mutating_without_a_candidate():
    p = mutate(model("pair:2", "function"), "T1", (0, 0))
    bare = type(p)(p.coproduct)
    with pytest.raises(BadParameter):
        mutate(bare, "E", (0, 0))
    with pytest.raises(BadParameter):
        mutate(bare, "S", (0, 0))
