"""
Check registry, check results and the verification report.

Every check id comes from REGISTRY, which also fixes the order in which
results appear in a report. Results of windowed runs carry a "window-k/"
prefix in front of the registry id.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from . import __version__
from .errors import InputError, WmhaError
from .exactla import Matrix, first_difference, format_scalar

logger = logging.getLogger(__name__)

SCHEMA = "wmha-report/1"

PASS = "pass"
FAIL = "fail"
SKIP = "skip"


@dataclass(frozen=True)
class CheckSpec:
    id: str
    anchor: str
    title: str


REGISTRY: Tuple[CheckSpec, ...] = (
    # algebra
    CheckSpec("alg-associative", "§0", "structure constants are associative"),
    CheckSpec("alg-nondegenerate", "§0", "product is non-degenerate"),
    CheckSpec("alg-idempotent", "§0", "A² = A"),
    CheckSpec("star-valid", "Def 1.1", "star is involutive and anti-multiplicative"),
    # coproduct
    CheckSpec("def-1.1-right-module", "Notation 1.2", "T1 is a right A-module map"),
    CheckSpec("def-1.1-left-module", "Notation 1.2", "T2 is a left A-module map"),
    CheckSpec("def-1.1-mixed", "Def 1.1", "(a⊗1)Δ(b)(1⊗c) agrees through T1 and T2"),
    CheckSpec("def-1.1-homomorphism", "Def 1.1", "Δ is multiplicative"),
    CheckSpec("def-1.1-coassociative", "Def 1.1", "(ι⊗T1)(T2⊗ι) = (T2⊗ι)(ι⊗T1)"),
    CheckSpec("def-1.1-regular-t3", "Def 4.1", "T3(a⊗b) = (1⊗b)Δ(a)"),
    CheckSpec("def-1.1-regular-t4", "Def 4.1", "T4(a⊗b) = Δ(b)(a⊗1)"),
    CheckSpec("def-1.4-full", "Def 1.4", "the legs of Δ span A"),
    CheckSpec("def-1.3-counit", "Def 1.3", "a unique counit exists"),
    CheckSpec("def-1.3-counit-input", "Def 1.3", "supplied counit equals the solved one"),
    # canonical idempotent
    CheckSpec("ass-1.5-E", "Assumption 1.5", "E with E(A⊗A) = Ran T1, (A⊗A)E = Ran T2"),
    CheckSpec("ass-1.5-idempotent", "Assumption 1.5", "E² = E"),
    CheckSpec("prop-1.6", "Prop 1.6", "EΔ(a) = Δ(a) = Δ(a)E"),
    CheckSpec("prop-1.8", "Prop 1.8", "Δ extends to M(A) with Δ(1) = E"),
    CheckSpec("ass-1.10", "Assumption 1.10", "E⊗1 and 1⊗E commute"),
    CheckSpec("def-1.14-ii", "Def 1.14 ii", "(Δ⊗ι)E = (ι⊗Δ)E = (E⊗1)(1⊗E)"),
    CheckSpec("prop-1.9", "Prop 1.9", "(Δ⊗ι)E is below E⊗1 and 1⊗E"),
    # projection maps
    CheckSpec("prop-1.11", "Prop 1.11", "G1, G2 solve their defining equalities"),
    CheckSpec("prop-1.11-crosscheck", "Prop 1.11", "constructive G1, G2 agree"),
    CheckSpec("prop-1.13", "Prop 1.13", "G idempotent, T∘G = T, module laws"),
    CheckSpec("prop-2.2-G", "Prop 2.2", "G maps commute with the other canonical map"),
    CheckSpec("def-1.14-iii", "Def 1.14 iii", "Ker T = (1-G)(A⊗A)"),
    CheckSpec("rem-1.12", "Remark 1.12", "G1, G2 factor through multipliers F1, F2"),
    # oracles (groupoid models)
    CheckSpec("oracle-E", "Example 1.15/1.16", "E equals the model witness"),
    CheckSpec("oracle-G", "Example 1.15/1.16", "G1, G2 equal the model witnesses"),
    CheckSpec("oracle-counit", "Example 1.15/1.16", "ε equals the model witness"),
    # generalized inverses and antipode
    CheckSpec("lem-2.1-R1", "Lemma 2.1", "R1 = generalized inverse of T1"),
    CheckSpec("lem-2.1-R2", "Lemma 2.1", "R2 = generalized inverse of T2"),
    CheckSpec("prop-2.3-module", "Prop 2.3", "module laws of R1, R2"),
    CheckSpec("prop-2.3-commute", "Prop 2.3", "R maps commute with the other canonical map"),
    CheckSpec("prop-2.4", "Prop 2.4", "S1, S2 extracted from R1, R2"),
    CheckSpec("prop-2.7", "Prop 2.7", "b(S1(a)c) = (bS2(a))c"),
    CheckSpec("rem-2.8-ii", "Remark 2.8 ii", "a(1)S1(a(2)) = a(1)S2(a(2)) forms"),
    CheckSpec("prop-2.6", "Prop 2.6", "a(1)S(a(2))a(3) = a, S(a(1))a(2)S(a(3)) = S(a)"),
    CheckSpec("oracle-antipode", "Example 2.11", "S equals the model witness"),
    CheckSpec("prop-3.5", "Prop 3.5", "S(ab) = S(b)S(a)"),
    CheckSpec("prop-3.6", "Prop 3.6", "AS(A) = A = S(A)A"),
    CheckSpec("prop-3.7", "Prop 3.7", "Δ(S(a)) = E(σ(S⊗S)Δ(a))E"),
    # source and target maps
    CheckSpec("def-3.1", "Def 3.1", "ε_s, ε_t are multipliers"),
    CheckSpec("lem-3.2", "Lemma 3.2", "images of ε_s, ε_t are the legs of E"),
    CheckSpec("lem-3.3", "Lemma 3.3", "Δ(ε_t(a)) = E(ε_t(a)⊗1), Δ(ε_s(a)) = E(1⊗ε_s(a))"),
    CheckSpec("lem-3.4", "Lemma 3.4", "ε_s(A), ε_t(A) are commuting subalgebras"),
    CheckSpec("prop-3.9", "Prop 3.9", "aε_s(A) ⊆ aA and the mirrored inclusions"),
    # alternative characterization
    CheckSpec("thm-2.9-hypotheses", "Theorem 2.9", "candidate antipode and idempotent usable"),
    CheckSpec("thm-2.9-R-range", "Theorem 2.9", "R maps from the candidate land in A⊗A"),
    CheckSpec("thm-2.9-eq-2.5", "Theorem 2.9 (2.5)", "antipode identities for the candidate"),
    CheckSpec("thm-2.9-eq-2.6", "Theorem 2.9 (2.6)", "T1R1 = E, T2R2 = E"),
    CheckSpec("thm-2.9-eq-2.7", "Theorem 2.9 (2.7)", "E conditions for the candidate"),
    CheckSpec("thm-2.9-kernels", "Theorem 2.9", "R1T1, R2T2 satisfy the G defining equalities"),
    CheckSpec("thm-2.9-paths-agree", "Theorem 2.9", "both paths give the same E and S"),
    # regularity
    CheckSpec("thm-4.10", "Theorem 4.10", "S maps A bijectively onto A"),
    CheckSpec("prop-a.1", "Prop A.1", "T3, T4 agree with R1, R2 conjugated by S"),
    CheckSpec("prop-4.2", "Prop 4.2", "Ran T3 = (A⊗A)E, Ran T4 = E(A⊗A)"),
    CheckSpec("prop-4.4", "Prop 4.4", "(S⊗S)E = σE"),
    CheckSpec("prop-4.4-delta", "Remark 3.8 iii", "Δ(S(a)) = σ(S⊗S)Δ(a)"),
    CheckSpec("prop-4.5", "Prop 4.5", "G1(a⊗b) = (a⊗1)F1(1⊗b), same for G2"),
    CheckSpec("prop-4.6", "Prop 4.6", "E13 relations with F1..F4"),
    CheckSpec("prop-4.7", "Prop 4.7", "F1 = (ι⊗S)E, F2 = (S⊗ι)E"),
    CheckSpec("prop-4.8", "Prop 4.8", "(S⊗S)F1 = σF2, (S⊗S)F3 = σF4"),
    CheckSpec("oracle-F", "Example 1.15/1.16", "F1..F4 equal the model witnesses"),
    CheckSpec("prop-4.3", "Prop 4.3", "(A^op, Δ) has antipode S⁻¹ and the same E"),
    CheckSpec("sec-4-cop", "§4", "(A, Δ^cop) has canonical idempotent σE"),
    # star
    CheckSpec("prop-4.11-delta-star", "Prop 4.11", "T3(a*⊗b*) = T1(a⊗b)*"),
    CheckSpec("prop-4.11-involution", "Prop 4.11", "S(S(a)*)* = a"),
    CheckSpec("prop-4.11-E-star", "Remark 1.7", "E* = E"),
    CheckSpec("prop-4.11-F-star", "Prop 4.11", "F1* = F3, F2* = F4"),
    # weak Hopf
    CheckSpec("prop-4.12-eq-4.12", "Prop 4.12 (4.12)", "ε(abc) = ε(ab(2))ε(b(1)c)"),
    CheckSpec("prop-4.12-eq-4.13", "Prop 4.12 (4.13)", "ε(abc) = ε(ab(1))ε(b(2)c)"),
    CheckSpec("prop-4.12-antipode-counit", "Prop 4.12", "ε_t, ε_s through Δ(1) and ε"),
    # appendix
    CheckSpec("app-A.3", "Lemma A.3", "m(S⊗ι)E = m(S⊗ι) and the mirror"),
    CheckSpec("app-A.4", "Prop A.4", "S∘ε_t = ε_s∘S, S∘ε_s = ε_t∘S"),
    CheckSpec("app-A.5", "Lemma A.5", "E(y⊗1) = E(1⊗S(y))"),
    CheckSpec("app-A.8", "Prop A.8", "E' = σ(S⊗S)E equals E"),
    CheckSpec("app-A.12", "Theorem A.12", "(A^op, Δ) passes Def 1.14"),
    # groupoid models
    CheckSpec("groupoid-valid", "§0", "groupoid axioms"),
    CheckSpec("ex-1.16-pairing", "Example 1.16", "function and convolution models are dual"),
    CheckSpec("window-consistency", "Example 1.15", "witnesses restrict between windows"),
    CheckSpec("non-unital", "Example 1.15", "the full algebra has no unit"),
    CheckSpec("local-units", "Prop 4.9", "sampled finite sets have local units"),
)

_ORDER = {spec.id: k for k, spec in enumerate(REGISTRY)}
_SPECS = {spec.id: spec for spec in REGISTRY}


def base_id(check_id: str) -> str:
    """Strip a "window-k/" prefix."""
    return check_id.rsplit("/", 1)[-1]


def spec_for(check_id: str) -> CheckSpec:
    try:
        return _SPECS[base_id(check_id)]
    except KeyError:
        raise KeyError(f"unregistered check id {check_id!r}")


def _sort_key(check_id: str) -> Tuple[int, int]:
    window = 0
    if "/" in check_id:
        prefix = check_id.rsplit("/", 1)[0]
        window = int(prefix.split("-", 1)[1]) if prefix.startswith("window-") else 0
    return window, _ORDER[base_id(check_id)]


@dataclass
class CheckResult:
    id: str
    status: str
    detail: str = ""
    witness_refs: List[str] = field(default_factory=list)
    counterexample: Optional[Dict[str, str]] = None

    def __post_init__(self):
        spec_for(self.id)
        if self.status not in (PASS, FAIL, SKIP):
            raise ValueError(f"bad status {self.status!r}")

    @property
    def anchor(self) -> str:
        return spec_for(self.id).anchor

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def with_prefix(self, prefix: str) -> "CheckResult":
        return CheckResult(
            f"{prefix}{self.id}", self.status, self.detail, list(self.witness_refs), self.counterexample
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "anchor": self.anchor,
            "status": self.status,
            "detail": self.detail,
            "witness_refs": list(self.witness_refs),
            "counterexample": self.counterexample,
        }


Diagnostics = List[CheckResult]

Labeler = Callable[[int], str]


def passed(check_id: str, detail: str = "", refs: Sequence[str] = ()) -> CheckResult:
    return CheckResult(check_id, PASS, detail, list(refs))


def failed(
    check_id: str, detail: str, counterexample: Optional[Dict[str, str]] = None
) -> CheckResult:
    return CheckResult(check_id, FAIL, detail, [], counterexample)


def skipped(check_id: str, reason: str) -> CheckResult:
    return CheckResult(check_id, SKIP, reason)


def verdict(check_id: str, ok: bool, detail: str, refs: Sequence[str] = ()) -> CheckResult:
    return passed(check_id, detail, refs) if ok else failed(check_id, detail)


def counterexample_of(
    actual: Matrix,
    expected: Matrix,
    row_label: Optional[Labeler] = None,
    col_label: Optional[Labeler] = None,
) -> Optional[Dict[str, str]]:
    """The first differing entry of two matrices, with labelled indices."""
    diff = first_difference(actual, expected)
    if diff is None:
        return None
    i, j, got, want = diff
    return {
        "row": row_label(i) if row_label else str(i),
        "col": col_label(j) if col_label else str(j),
        "actual": format_scalar(got),
        "expected": format_scalar(want),
    }


def compare(
    check_id: str,
    pairs: Iterable[Tuple[str, Matrix, Matrix]],
    refs: Sequence[str] = (),
    row_label: Optional[Labeler] = None,
    col_label: Optional[Labeler] = None,
) -> CheckResult:
    """
    Pass when every (name, actual, expected) pair is entry-wise equal.

    The first failing pair names the check detail and supplies the
    counterexample.
    """
    names = []
    for name, actual, expected in pairs:
        names.append(name)
        if actual.shape != expected.shape:
            return failed(check_id, f"{name}: shape {actual.shape} vs {expected.shape}")
        witness = counterexample_of(actual, expected, row_label, col_label)
        if witness is not None:
            return failed(check_id, f"{name} differs", witness)
    return passed(check_id, "; ".join(names), refs)


class ReportBuilder:
    """
    Collects check results in execution order and turns raised engine
    errors into failing checks.
    """

    def __init__(self, prefix: str = ""):
        self.prefix = prefix
        self._results: Dict[str, CheckResult] = {}
        self.witnesses: Dict[str, Any] = {}

    def add(self, result: Union[CheckResult, Iterable[CheckResult]]) -> None:
        if isinstance(result, CheckResult):
            result = [result]
        for item in result:
            if self.prefix and not item.id.startswith(self.prefix):
                item = item.with_prefix(self.prefix)
            if item.status == FAIL:
                logger.info("check %s failed: %s", item.id, item.detail)
            self._results[item.id] = item

    def status(self, check_id: str) -> Optional[str]:
        result = self._results.get(f"{self.prefix}{check_id}")
        return result.status if result else None

    def ok(self, *check_ids: str) -> bool:
        return all(self.status(c) == PASS for c in check_ids)

    def skip(self, check_id: str, reason: str) -> None:
        self.add(skipped(check_id, reason))

    def guard(self, check_id: str, requires: Sequence[str]) -> bool:
        """Record a skip naming the first prerequisite that did not pass."""
        for prereq in requires:
            if self.status(prereq) != PASS:
                self.skip(check_id, f"requires {prereq}")
                return False
        return True

    def guard_all(self, check_ids: Sequence[str], requires: Sequence[str]) -> bool:
        ok = True
        for check_id in check_ids:
            ok = self.guard(check_id, requires) and ok
        return ok

    def run(
        self,
        check_id: str,
        fn: Callable[[], Union[CheckResult, List[CheckResult]]],
        requires: Sequence[str] = (),
    ) -> bool:
        """
        Run one check after its prerequisites.

        Args:
            check_id (str): Registry id, used for skips and for errors raised by fn.
            fn (Callable): Returns the result(s); WmhaError becomes a failure.
            requires (Sequence[str]): Ids that must have passed.

        Returns:
            bool: True if the check ran and passed.
        """
        if not self.guard(check_id, requires):
            return False
        try:
            self.add(fn())
        except InputError:
            raise
        except WmhaError as exc:
            logger.debug("check %s raised %s", check_id, type(exc).__name__)
            self.add(failed(check_id, f"{type(exc).__name__}: {exc}"))
        return self.ok(check_id)

    def results(self) -> List[CheckResult]:
        return sorted(self._results.values(), key=lambda r: _sort_key(r.id))

    def absorb(self, other: "ReportBuilder") -> None:
        for result in other.results():
            self._results[result.id] = result
        self.witnesses.update(other.witnesses)


@dataclass
class VerificationReport:
    checks: List[CheckResult]
    witnesses: Dict[str, Any] = field(default_factory=dict)
    classification: Dict[str, Any] = field(default_factory=dict)
    paths: List[str] = field(default_factory=list)
    seed: Optional[int] = None
    input_digest: str = ""
    tool_version: str = __version__

    @classmethod
    def from_builder(cls, builder: ReportBuilder, **kwargs) -> "VerificationReport":
        return cls(checks=builder.results(), witnesses=dict(builder.witnesses), **kwargs)

    @property
    def verdict(self) -> str:
        return FAIL if any(c.status == FAIL for c in self.checks) else PASS

    @property
    def exit_code(self) -> int:
        return 0 if self.verdict == PASS else 1

    def check(self, check_id: str) -> Optional[CheckResult]:
        for c in self.checks:
            if c.id == check_id:
                return c
        return None

    def first_failure(self) -> Optional[CheckResult]:
        return next((c for c in self.checks if c.status == FAIL), None)

    def to_json(self) -> Dict[str, Any]:
        return {
            "schema": SCHEMA,
            "tool_version": self.tool_version,
            "input_digest": self.input_digest,
            "seed": self.seed,
            "paths": list(self.paths),
            "verdict": self.verdict,
            "checks": [c.to_json() for c in self.checks],
            "witnesses": self.witnesses,
            "classification": self.classification,
        }

    def dumps(self, indent: int = 2) -> str:
        return json.dumps(self.to_json(), indent=indent, sort_keys=True, ensure_ascii=False)
