import pytest
from conftest import model

from wmha.errors import ParseError, ShapeError
from wmha.exactla import ONE, Matrix
from wmha.formats import algebra_to_json, matrix_to_json
from wmha.groupoid import preset
from wmha.inputs import coproduct_from_delta, parse_document, preset_document


def groupoid_tables(name):
    g = preset(name)
    return {
        "morphisms": list(g.morphisms),
        "source": dict(g.source),
        "target": dict(g.target),
        "inverse": dict(g.inverse),
        "compose": [[p, q, r] for (p, q), r in g.compose.items()],
    }


def group_like_delta(n):
    """Δ(e_a) = e_a ⊗ e_a."""
    return Matrix.from_entries(n * n, n, [(a * n + a, a, ONE) for a in range(n)])


def test_both_document_shapes_are_rejected():
    with pytest.raises(ParseError) as info:
        parse_document({"algebra": {}, "groupoid": {"preset": "pair:2"}})
    assert info.value.location == "$"


def test_unknown_keys_are_rejected():
    with pytest.raises(ParseError):
        parse_document({"groupoid": {"preset": "pair:2"}, "colour": "blue"})


def test_presentation_needs_a_coproduct():
    with pytest.raises(ParseError):
        parse_document({"algebra": {"dim": 1, "structure": [[0, 0, 0, "1"]]}})


def test_preset_document_builds_the_model():
    job = parse_document(preset_document("pair:2", "convolution"))
    assert job.presentation is not None
    assert job.presentation.algebra.dim == 4
    assert job.model == "convolution"
    assert not job.lazy
    assert job.digest.startswith("sha256:")


def test_infinite_preset_is_lazy():
    job = parse_document(preset_document("pair:inf", "function"))
    assert job.lazy
    assert job.presentation is None


def test_bad_preset_names_the_location():
    with pytest.raises(ParseError) as info:
        parse_document(preset_document("triangle:3", "function"))
    assert info.value.location == "$.groupoid.preset"


def test_bad_model_names_the_location():
    with pytest.raises(ParseError) as info:
        parse_document({"groupoid": {"preset": "pair:2"}, "model": "dual"})
    assert info.value.location == "$.model"


def test_explicit_groupoid_tables():
    job = parse_document({"groupoid": groupoid_tables("pair:2"), "model": "function"})
    assert job.presentation is not None
    assert job.groupoid.morphisms == preset("pair:2").morphisms


def test_groupoid_failing_the_axioms_has_no_presentation():
    tables = groupoid_tables("pair:2")
    tables["inverse"]["(0,1)"] = "(0,1)"
    job = parse_document({"groupoid": tables, "model": "function"})
    assert job.presentation is None


def test_groupoid_with_unknown_ids():
    tables = groupoid_tables("pair:2")
    tables["compose"].append(["(0,1)", "(9,9)", "(0,1)"])
    with pytest.raises(ParseError) as info:
        parse_document({"groupoid": tables})
    assert info.value.location.startswith("$.groupoid.compose[")


def test_delta_gives_the_canonical_maps_of_the_model():
    p = model("pair:2", "convolution")
    c = coproduct_from_delta(p.algebra, group_like_delta(4))
    for name in ("T1", "T2", "T3", "T4"):
        assert getattr(c, name) == getattr(p.coproduct, name), name


def test_delta_with_the_wrong_shape():
    with pytest.raises(ShapeError):
        coproduct_from_delta(model("pair:2", "convolution").algebra, Matrix.zeros(4, 4))


def test_presentation_document():
    p = model("pair:2", "function")
    doc = {
        "algebra": algebra_to_json(p.algebra),
        "coproduct": {"T1": matrix_to_json(p.coproduct.T1), "T2": matrix_to_json(p.coproduct.T2)},
        "counit": ["1", "0", "0", "1"],
        "antipode": matrix_to_json(Matrix.permutation([0, 2, 1, 3])),
    }
    job = parse_document(doc)
    parsed = job.presentation
    assert parsed.coproduct.T1 == p.coproduct.T1
    assert parsed.coproduct.T3 is None
    assert parsed.counit == {0: ONE, 3: ONE}
    assert parsed.antipode == Matrix.permutation([0, 2, 1, 3])
    assert job.groupoid is None


def test_presentation_with_a_missing_map():
    p = model("pair:2", "function")
    doc = {"algebra": algebra_to_json(p.algebra), "coproduct": {"T1": matrix_to_json(p.coproduct.T1)}}
    with pytest.raises(ParseError) as info:
        parse_document(doc)
    assert info.value.location == "$.coproduct"


def test_idempotent_right_action_defaults_to_the_left():
    p = model("pair:2", "convolution")
    doc = {
        "algebra": algebra_to_json(p.algebra),
        "coproduct": {"delta": matrix_to_json(group_like_delta(4))},
        "E": {"left": matrix_to_json(p.oracles.E_left)},
    }
    E = parse_document(doc).presentation.E
    assert E.left == E.right == p.oracles.E_left


def test_groupoid_ids_must_be_strings():
    tables = groupoid_tables("pair:2")
    tables["inverse"]["(0,1)"] = ["(1,0)"]
    with pytest.raises(ParseError) as info:
        parse_document({"groupoid": tables})
    assert info.value.location == "$.groupoid.inverse"
    tables = groupoid_tables("pair:2")
    tables["compose"][0][2] = {"id": "(0,0)"}
    with pytest.raises(ParseError):
        parse_document({"groupoid": tables})
