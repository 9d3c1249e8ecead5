"""
Input documents: an explicit presentation (algebra, coproduct and optional
counit, star, antipode, E) or a groupoid with a model name.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

from .coalg import CanonicalIdempotent, CoproductData
from .errors import DimensionMismatch, ParseError, ShapeError, WmhaError
from .exactla import Matrix
from .fdalg import Algebra, StarStructure
from .formats import algebra_from_json, input_digest, matrix_from_json, vector_from_json
from .groupoid import MODELS, FiniteGroupoid, Groupoid, LazyGroupoid, model_presentation, preset, validate_groupoid
from .legs import apply_leg1, apply_leg2
from .pipeline import Presentation

logger = logging.getLogger(__name__)

PRESENTATION_KEYS = {"algebra", "coproduct", "counit", "star", "antipode", "E"}
GROUPOID_KEYS = {"groupoid", "model"}


@dataclass(frozen=True)
class Job:
    """What one command works on: a presentation, or a groupoid and its model."""

    digest: str
    presentation: Optional[Presentation] = None
    groupoid: Optional[Groupoid] = None
    model: Optional[str] = None

    @property
    def lazy(self) -> bool:
        return isinstance(self.groupoid, LazyGroupoid)


def parse_document(doc: Dict[str, Any]) -> Job:
    """
    Turn a parsed JSON document into a job.

    Raises:
        ParseError: If the document has neither or both shapes, or bad values.
        ShapeError: If dimensions disagree.
    """
    keys = set(doc)
    presentation_keys = keys & PRESENTATION_KEYS
    groupoid_keys = keys & GROUPOID_KEYS
    if presentation_keys and groupoid_keys:
        raise ParseError("give either algebra/coproduct or groupoid/model, not both", "$")
    unknown = keys - PRESENTATION_KEYS - GROUPOID_KEYS
    if unknown:
        raise ParseError(f"unexpected keys {sorted(unknown)}", "$")
    digest = input_digest(doc)
    if groupoid_keys:
        groupoid, model = _parse_groupoid_job(doc)
        if isinstance(groupoid, FiniteGroupoid):
            if not validate_groupoid(groupoid)[0].passed:
                logger.warning("input groupoid fails the groupoid axioms")
                return Job(digest, None, groupoid, model)
            return Job(digest, model_presentation(groupoid, model), groupoid, model)
        return Job(digest, None, groupoid, model)
    if "algebra" not in doc or "coproduct" not in doc:
        raise ParseError("a presentation needs \"algebra\" and \"coproduct\"", "$")
    return Job(digest, parse_presentation(doc))


def preset_document(name: str, model: str) -> Dict[str, Any]:
    return {"groupoid": {"preset": name}, "model": model}


def _parse_groupoid_job(doc: Dict[str, Any]):
    model = doc.get("model", "function")
    if model not in MODELS:
        raise ParseError(f"model must be one of {', '.join(MODELS)}, got {model!r}", "$.model")
    spec = doc.get("groupoid")
    if not isinstance(spec, dict):
        raise ParseError("expected an object", "$.groupoid")
    if "preset" in spec:
        try:
            return preset(str(spec["preset"])), model
        except WmhaError as exc:
            raise ParseError(str(exc), "$.groupoid.preset")
    return parse_groupoid(spec, "$.groupoid"), model


def parse_groupoid(obj: Dict[str, Any], location: str) -> FiniteGroupoid:
    """{"morphisms": [...], "source": {...}, "target": {...}, "compose": [[p, q, r], ...], "inverse": {...}}."""
    morphisms = obj.get("morphisms")
    if not isinstance(morphisms, list) or not all(isinstance(p, str) for p in morphisms):
        raise ParseError("morphisms must be a list of ids", f"{location}.morphisms")
    if len(set(morphisms)) != len(morphisms):
        raise ParseError("morphism ids must be distinct", f"{location}.morphisms")
    known = set(morphisms)
    tables = {}
    for name in ("source", "target", "inverse"):
        table = obj.get(name)
        where = f"{location}.{name}"
        if not isinstance(table, dict):
            raise ParseError("expected an object mapping ids to ids", where)
        missing = known - set(table)
        if missing:
            raise ParseError(f"no value for {sorted(missing)}", where)
        for p, value in table.items():
            if not isinstance(value, str) or p not in known or value not in known:
                raise ParseError(f"unknown morphism in {p!r}: {value!r}", where)
        tables[name] = {p: table[p] for p in morphisms}
    compose = {}
    entries = obj.get("compose")
    if not isinstance(entries, list):
        raise ParseError("compose must be a list of [p, q, pq]", f"{location}.compose")
    for k, entry in enumerate(entries):
        where = f"{location}.compose[{k}]"
        ids_ok = isinstance(entry, list) and all(isinstance(x, str) and x in known for x in entry)
        if not ids_ok or len(entry) != 3:
            raise ParseError("entry must be [p, q, pq] of known ids", where)
        compose[(entry[0], entry[1])] = entry[2]
    return FiniteGroupoid(tuple(morphisms), tables["source"], tables["target"], compose, tables["inverse"], "input")


def parse_presentation(doc: Dict[str, Any]) -> Presentation:
    algebra = algebra_from_json(doc["algebra"], "$.algebra")
    n = algebra.dim
    square = (n * n, n * n)
    coproduct = doc["coproduct"]
    if not isinstance(coproduct, dict):
        raise ParseError("expected an object", "$.coproduct")
    if "delta" in coproduct:
        delta = matrix_from_json(coproduct["delta"], "$.coproduct.delta", (n * n, n))
        c = coproduct_from_delta(algebra, delta)
    else:
        for name in ("T1", "T2"):
            if name not in coproduct:
                raise ParseError(f"coproduct needs {name} (or \"delta\")", "$.coproduct")
        maps = {
            name: matrix_from_json(coproduct[name], f"$.coproduct.{name}", square)
            for name in ("T1", "T2", "T3", "T4")
            if name in coproduct
        }
        try:
            c = CoproductData(algebra, maps["T1"], maps["T2"], maps.get("T3"), maps.get("T4"))
        except DimensionMismatch as exc:
            raise ShapeError(str(exc))
    counit = vector_from_json(doc["counit"], n, "$.counit") if "counit" in doc else None
    star = StarStructure(algebra, matrix_from_json(doc["star"], "$.star", (n, n))) if "star" in doc else None
    antipode = matrix_from_json(doc["antipode"], "$.antipode", (n, n)) if "antipode" in doc else None
    E = None
    if "E" in doc:
        obj = doc["E"]
        if not isinstance(obj, dict) or "left" not in obj:
            raise ParseError("E needs \"left\" and \"right\" actions", "$.E")
        left = matrix_from_json(obj["left"], "$.E.left", square)
        right = matrix_from_json(obj.get("right", obj["left"]), "$.E.right", square)
        E = CanonicalIdempotent(left, right)
    logger.debug("parsed a presentation of dimension %d", n)
    return Presentation(c, counit=counit, star=star, antipode=antipode, E=E)


def coproduct_from_delta(algebra: Algebra, delta: Matrix) -> CoproductData:
    """
    The four canonical maps of a coproduct given as Δ(e_a) ∈ A⊗A (column a
    of `delta`).
    """
    n = algebra.dim
    if delta.shape != (n * n, n):
        raise ShapeError(f"delta is {delta.rows}x{delta.cols}, expected {n * n}x{n}")
    cols = delta.columns()
    left, right = algebra.left_ops, algebra.right_ops
    pairs = [(a, b) for a in range(n) for b in range(n)]
    t1 = Matrix.from_columns(n * n, [apply_leg2(right[b], cols[a], n) for a, b in pairs])
    t2 = Matrix.from_columns(n * n, [apply_leg1(left[a], cols[b], n) for a, b in pairs])
    t3 = Matrix.from_columns(n * n, [apply_leg2(left[b], cols[a], n) for a, b in pairs])
    t4 = Matrix.from_columns(n * n, [apply_leg1(right[a], cols[b], n) for a, b in pairs])
    return CoproductData(algebra, t1, t2, t3, t4)
