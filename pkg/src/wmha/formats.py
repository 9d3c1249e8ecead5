"""
JSON codecs: rational literals, Gaussian scalars, sparse matrices, vectors,
structure tensors and subspaces. Every parse error names the JSON location
it came from.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from sympy.polys.domains import QQ

from .errors import ParseError, ShapeError
from .exactla import FIELD, Matrix, Subspace, Vector, rational, scalar_parts
from .fdalg import Algebra


def parse_rational(text: Any, location: str):
    """Parse "p/q" or "p" (an int is accepted as well)."""
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ParseError(f"expected a rational literal like \"3/4\", got {text!r}", location)
    try:
        return rational(text)
    except ValueError as exc:
        raise ParseError(str(exc), location)


def parse_scalar(value: Any, location: str):
    """A scalar is a rational literal, {"re": .., "im": ..} or [re, im]."""
    if isinstance(value, dict):
        unknown = set(value) - {"re", "im"}
        if unknown:
            raise ParseError(f"unexpected keys {sorted(unknown)}", location)
        re_part = parse_rational(value.get("re", "0"), f"{location}.re")
        im_part = parse_rational(value.get("im", "0"), f"{location}.im")
        return FIELD(re_part, im_part)
    if isinstance(value, list):
        if len(value) != 2:
            raise ParseError("a scalar pair needs exactly [re, im]", location)
        return FIELD(parse_rational(value[0], f"{location}[0]"), parse_rational(value[1], f"{location}[1]"))
    return FIELD(parse_rational(value, location), QQ(0))


def _index(value: Any, bound: int, location: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer index, got {value!r}", location)
    if not 0 <= value < bound:
        raise ShapeError(f"{location}: index {value} outside 0..{bound - 1}")
    return value


def matrix_to_json(m: Matrix) -> Dict[str, Any]:
    return {
        "shape": [m.rows, m.cols],
        "entries": [[i, j, *scalar_parts(v)] for i, j, v in m.entries()],
    }


def matrix_from_json(
    obj: Any, location: str, shape: Optional[Tuple[int, int]] = None
) -> Matrix:
    """
    Read a matrix given as {"shape": [r, c], "entries": [...]} or as a bare
    entry list (then `shape` is required). Entries are [row, col, re] or
    [row, col, re, im].

    Raises:
        ParseError: On malformed JSON values.
        ShapeError: On a shape that disagrees with `shape` or an index out of range.
    """
    if isinstance(obj, dict):
        if "entries" not in obj:
            raise ParseError("matrix needs an \"entries\" list", location)
        declared = obj.get("shape", shape)
        entries = obj["entries"]
        if declared is None:
            raise ParseError("matrix needs a \"shape\"", location)
        if not (isinstance(declared, (list, tuple)) and len(declared) == 2):
            raise ParseError("shape must be [rows, cols]", f"{location}.shape")
        if any(isinstance(x, bool) or not isinstance(x, int) or x < 0 for x in declared):
            raise ParseError(
                f"shape entries must be non-negative integers, got {list(declared)}", f"{location}.shape"
            )
        declared = (declared[0], declared[1])
        if shape is not None and declared != tuple(shape):
            raise ShapeError(f"{location}: shape {list(declared)}, expected {list(shape)}")
        shape = declared
        location = f"{location}.entries"
    elif isinstance(obj, list):
        if shape is None:
            raise ParseError("a bare entry list needs a known shape", location)
        entries = obj
    else:
        raise ParseError("expected a matrix", location)
    if not isinstance(entries, list):
        raise ParseError("entries must be a list", location)
    rows, cols = shape
    triples = []
    for k, entry in enumerate(entries):
        where = f"{location}[{k}]"
        if not isinstance(entry, list) or len(entry) not in (3, 4):
            raise ParseError("entry must be [row, col, re] or [row, col, re, im]", where)
        i = _index(entry[0], rows, where)
        j = _index(entry[1], cols, where)
        value = parse_scalar(entry[2:] if len(entry) == 4 else entry[2], where)
        triples.append((i, j, value))
    return Matrix.from_entries(rows, cols, triples)


def vector_to_json(v: Vector, dim: int) -> Dict[str, Any]:
    return {"dim": dim, "entries": [[i, *scalar_parts(v[i])] for i in sorted(v)]}


def vector_from_json(obj: Any, dim: int, location: str) -> Vector:
    """A dense list of scalars or {"dim": n, "entries": [[i, re, im], ...]}."""
    if isinstance(obj, list):
        if len(obj) != dim:
            raise ShapeError(f"{location}: {len(obj)} values, expected {dim}")
        values = {i: parse_scalar(x, f"{location}[{i}]") for i, x in enumerate(obj)}
        return {i: v for i, v in values.items() if v}
    if isinstance(obj, dict) and "entries" in obj:
        if obj.get("dim", dim) != dim:
            raise ShapeError(f"{location}: dimension {obj['dim']}, expected {dim}")
        out: Vector = {}
        for k, entry in enumerate(obj["entries"]):
            where = f"{location}.entries[{k}]"
            if not isinstance(entry, list) or len(entry) not in (2, 3):
                raise ParseError("entry must be [index, re] or [index, re, im]", where)
            i = _index(entry[0], dim, where)
            value = parse_scalar(entry[1:] if len(entry) == 3 else entry[1], where)
            if value:
                out[i] = value
        return out
    raise ParseError("expected a vector", location)


def algebra_to_json(a: Algebra) -> Dict[str, Any]:
    return {
        "dim": a.dim,
        "labels": list(a.labels),
        "structure": [[i, j, k, *scalar_parts(v)] for i, j, k, v in a.structure_entries()],
    }


def algebra_from_json(obj: Any, location: str = "algebra") -> Algebra:
    if not isinstance(obj, dict):
        raise ParseError("expected an object", location)
    dim = obj.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 0:
        raise ParseError("dim must be a non-negative integer", f"{location}.dim")
    labels = obj.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != dim):
        raise ShapeError(f"{location}.labels: expected {dim} labels")
    structure = obj.get("structure")
    if not isinstance(structure, list):
        raise ParseError("structure must be a list of [i, j, k, re, im]", f"{location}.structure")
    entries = []
    for n, entry in enumerate(structure):
        where = f"{location}.structure[{n}]"
        if not isinstance(entry, list) or len(entry) not in (4, 5):
            raise ParseError("entry must be [i, j, k, re] or [i, j, k, re, im]", where)
        i, j, k = (_index(x, dim, where) for x in entry[:3])
        value = parse_scalar(entry[3:] if len(entry) == 5 else entry[3], where)
        entries.append((i, j, k, value))
    return Algebra.from_structure(dim, entries, [str(x) for x in labels] if labels else None)


def subspace_to_json(s: Subspace) -> Dict[str, Any]:
    return {
        "ambient_dim": s.ambient_dim,
        "dim": s.dim,
        "basis": [[[i, *scalar_parts(v)] for i, v in sorted(vec.items())] for vec in s.basis()],
    }


def load_document(path: str) -> Dict[str, Any]:
    """
    Read a JSON input document.

    Raises:
        ParseError: If the file cannot be read or is not a JSON object.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", str(path))
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8 text: {exc.reason} at byte {exc.start}", str(path))
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}")
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", str(path))
    return doc


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def input_digest(doc: Any) -> str:
    return "sha256:" + hashlib.sha256(canonical_json(doc).encode("utf-8")).hexdigest()

