import json

import pytest
from conftest import MUTATIONS, model

from wmha.cli import main
from wmha.exactla import ONE, Matrix
from wmha.formats import algebra_to_json, matrix_to_json
from wmha.pipeline import mutate


def write(tmp_path, doc, name="input.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def canonical_map_document(p):
    doc = {
        "algebra": algebra_to_json(p.algebra),
        "coproduct": {"T1": matrix_to_json(p.coproduct.T1), "T2": matrix_to_json(p.coproduct.T2)},
    }
    if p.E is not None:
        doc["E"] = {"left": matrix_to_json(p.E.left), "right": matrix_to_json(p.E.right)}
    if p.antipode is not None:
        doc["antipode"] = matrix_to_json(p.antipode)
    return doc


def test_verify_a_preset(capsys):
    assert main(["verify", "--preset", "pair:2"]) == 0
    assert "✅ Verified" in capsys.readouterr().out


def test_classify_a_group(capsys):
    assert main(["classify", "--preset", "group:cyclic:3", "--model", "convolution"]) == 0
    out = capsys.readouterr().out
    assert "weak_hopf ✓, hopf ✓" in out


def test_classify_gives_reasons(capsys):
    assert main(["classify", "--preset", "pair:2", "--model", "convolution"]) == 0
    assert "(hopf: E != 1⊗1)" in capsys.readouterr().out


def test_witnesses_of_the_function_model(capsys):
    assert main(["witnesses", "--preset", "pair:2"]) == 0
    witnesses = json.loads(capsys.readouterr().out)
    assert {(i, j) for i, j, *_ in witnesses["S"]["entries"]} == {(0, 0), (1, 2), (2, 1), (3, 3)}
    assert witnesses["E"]["rank"] == 8
    assert witnesses["counit"]["entries"] == [[0, "1", "0"], [3, "1", "0"]]


def test_missing_input_file(tmp_path, capsys):
    assert main(["verify", str(tmp_path / "nowhere.json")]) == 2
    assert "❌ Error" in capsys.readouterr().out


def test_no_input_at_all(capsys):
    assert main(["verify"]) == 2


def test_file_and_preset_together(tmp_path):
    path = write(tmp_path, {"groupoid": {"preset": "pair:2"}})
    assert main(["verify", path, "--preset", "pair:2"]) == 2


def test_bad_environment(monkeypatch, capsys):
    monkeypatch.setenv("WMHA_SEED", "x")
    assert main(["verify", "--preset", "pair:2"]) == 2
    assert "WMHA_SEED" in capsys.readouterr().out


def test_reports_are_byte_identical(tmp_path, capsys):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "--preset", "pair:2", "--report", str(first)]) == 0
    assert main(["verify", "--preset", "pair:2", "--report", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert "🔧 Report written to" in capsys.readouterr().out
    doc = json.loads(first.read_text(encoding="utf-8"))
    assert doc["verdict"] == "pass"
    assert doc["classification"]["weak_hopf"] is True


def test_mutated_document_fails(tmp_path, capsys):
    p = mutate(model("pair:2", "function"), "T1", (0, 0))
    path = write(tmp_path, canonical_map_document(p))
    assert main(["verify", path]) == 1
    assert "❌ Failed at" in capsys.readouterr().out


def test_witnesses_refuse_a_failing_input(tmp_path, capsys):
    p = mutate(model("pair:2", "function"), "T1", (0, 0))
    path = write(tmp_path, canonical_map_document(p))
    assert main(["witnesses", path]) == 1
    assert "no witnesses" in capsys.readouterr().out


def test_delta_document_classifies_as_weak_hopf(tmp_path, capsys):
    p = model("pair:2", "convolution")
    delta = Matrix.from_entries(16, 4, [(a * 4 + a, a, ONE) for a in range(4)])
    doc = {
        "algebra": algebra_to_json(p.algebra),
        "coproduct": {"delta": matrix_to_json(delta)},
        "counit": ["1", "1", "1", "1"],
        "antipode": matrix_to_json(Matrix.permutation([0, 2, 1, 3])),
    }
    assert main(["classify", write(tmp_path, doc)]) == 0
    out = capsys.readouterr().out
    assert "weak_hopf ✓" in out
    assert "hopf ✗" in out


def test_invalid_groupoid_fails(tmp_path, capsys):
    doc = {
        "groupoid": {
            "morphisms": ["u", "v"],
            "source": {"u": "u", "v": "u"},
            "target": {"u": "u", "v": "u"},
            "inverse": {"u": "u", "v": "v"},
            "compose": [["u", "u", "u"], ["u", "v", "v"], ["v", "u", "v"]],
        }
    }
    assert main(["verify", write(tmp_path, doc)]) == 1
    assert "groupoid-valid" in capsys.readouterr().out


@pytest.mark.slow
def test_infinite_preset_in_windows(capsys):
    assert main(["classify", "--preset", "pair:inf", "--windows", "2"]) == 0
    assert "weak_hopf: non-unital" in capsys.readouterr().out


POINT_ALGEBRA = {"dim": 1, "structure": [[0, 0, 0, "1"]]}
ONE_MORPHISM = {"morphisms": ["u"], "source": {"u": "u"}, "target": {"u": "u"}, "inverse": {"u": "u"}}


@pytest.mark.parametrize(
    "content",
    [
        b'{"groupoid": {"preset": "pair:2"}, "model": "\xe9"}',
        json.dumps(
            {
                "algebra": POINT_ALGEBRA,
                "coproduct": {"T1": {"shape": ["a", 1], "entries": []}, "T2": {"shape": [1, 1], "entries": []}},
            }
        ).encode(),
        json.dumps({"groupoid": {**ONE_MORPHISM, "source": {"u": ["u"]}, "compose": [["u", "u", "u"]]}}).encode(),
        json.dumps({"groupoid": {**ONE_MORPHISM, "compose": [[["u"], "u", "u"]]}}).encode(),
    ],
    ids=["not-utf8", "shape-not-integer", "list-as-id", "list-in-compose"],
)
def test_malformed_documents_exit_with_input_error(tmp_path, capsys, content):
    path = tmp_path / "input.json"
    path.write_bytes(content)
    assert main(["verify", str(path)]) == 2
    assert "❌ Error" in capsys.readouterr().out


def test_negative_window_count(capsys):
    assert main(["verify", "--preset", "pair:inf", "--windows", "-1"]) == 2
    assert "windows must be >= 0" in capsys.readouterr().out


@pytest.mark.slow
@pytest.mark.parametrize("kind, target, index, first", MUTATIONS)
def test_mutations_are_named_on_the_command_line(tmp_path, capsys, kind, target, index, first):
    p = mutate(model("pair:2", kind), target, index)
    assert main(["verify", write(tmp_path, canonical_map_document(p))]) == 1
    out = capsys.readouterr().out
    assert f"❌ Failed at {first}" in out
    assert f"❌ {first}" in out
