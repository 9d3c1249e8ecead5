import json

import pytest

from wmha.errors import ParseError, ShapeError
from wmha.exactla import scalar
from wmha.formats import (
    algebra_from_json,
    input_digest,
    load_document,
    matrix_from_json,
    matrix_to_json,
    parse_rational,
    parse_scalar,
    vector_from_json,
)


def test_rational_literals():
    assert parse_rational("3/4", "$") == parse_rational("6/8", "$")
    assert parse_rational(-2, "$") == parse_rational("-2", "$")


@pytest.mark.parametrize("text", ["1.5", "x", "1/", True, None])
def test_malformed_rationals(text):
    with pytest.raises(ParseError):
        parse_rational(text, "$.x")


def test_zero_denominator_names_the_location():
    with pytest.raises(ParseError) as info:
        parse_rational("1/0", "$.counit[2]")
    assert info.value.location == "$.counit[2]"
    assert str(info.value).startswith("$.counit[2]: ")


def test_scalar_forms_agree():
    expected = scalar("1/2", -3)
    assert parse_scalar({"re": "1/2", "im": "-3"}, "$") == expected
    assert parse_scalar(["1/2", "-3"], "$") == expected
    assert parse_scalar("5", "$") == scalar(5)


def test_matrix_entries_add_and_keep_their_shape():
    m = matrix_from_json({"shape": [2, 3], "entries": [[0, 2, "1"], [1, 0, "1/2", "1"], [0, 2, "1"]]}, "$.m")
    assert m.shape == (2, 3)
    assert m.entry(0, 2) == scalar(2)
    assert m.entry(1, 0) == scalar("1/2", 1)
    assert matrix_to_json(m) == {"shape": [2, 3], "entries": [[0, 2, "2", "0"], [1, 0, "1/2", "1"]]}


def test_matrix_shape_disagreement():
    with pytest.raises(ShapeError):
        matrix_from_json({"shape": [2, 2], "entries": []}, "$.T1", (4, 4))
    with pytest.raises(ShapeError):
        matrix_from_json([[5, 0, "1"]], "$.T1", (4, 4))


def test_bad_matrix_entry_location():
    with pytest.raises(ParseError) as info:
        matrix_from_json([[0, 0]], "$.S", (2, 2))
    assert info.value.location == "$.S[0]"


def test_vectors_dense_and_sparse():
    assert vector_from_json(["1", "0", "1"], 3, "$.counit") == {0: scalar(1), 2: scalar(1)}
    assert vector_from_json({"dim": 3, "entries": [[1, "2", "1"]]}, 3, "$.counit") == {1: scalar(2, 1)}
    with pytest.raises(ShapeError):
        vector_from_json(["1"], 3, "$.counit")


def test_algebra_from_structure_constants():
    a = algebra_from_json({"dim": 2, "labels": ["p", "q"], "structure": [[0, 0, 0, "1"], [1, 1, 1, "1"]]})
    assert a.labels == ["p", "q"]
    assert a.unit == {0: scalar(1), 1: scalar(1)}
    with pytest.raises(ShapeError):
        algebra_from_json({"dim": 2, "structure": [[0, 0, 2, "1"]]})


def test_load_document_errors(tmp_path):
    with pytest.raises(ParseError):
        load_document(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{\"algebra\": ", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        load_document(str(broken))
    assert info.value.location.startswith(str(broken))
    listing = tmp_path / "list.json"
    listing.write_text("[]", encoding="utf-8")
    with pytest.raises(ParseError):
        load_document(str(listing))


def test_digest_ignores_key_order():
    a = json.loads('{"model": "function", "groupoid": {"preset": "pair:2"}}')
    b = json.loads('{"groupoid": {"preset": "pair:2"}, "model": "function"}')
    assert input_digest(a) == input_digest(b)
    assert input_digest(a).startswith("sha256:")
    assert input_digest(a) != input_digest({"groupoid": {"preset": "pair:3"}, "model": "function"})


@pytest.mark.parametrize("shape", [["a", 1], [2, -1], [True, 2], [2.0, 2]])
def test_shape_entries_must_be_counts(shape):
    with pytest.raises(ParseError) as info:
        matrix_from_json({"shape": shape, "entries": []}, "$.T1")
    assert info.value.location == "$.T1.shape"


def test_undecodable_file(tmp_path):
    path = tmp_path / "latin1.json"
    path.write_bytes(b'{"model": "caf\xe9"}')
    with pytest.raises(ParseError) as info:
        load_document(str(path))
    assert info.value.location == str(path)
