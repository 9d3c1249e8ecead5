"""
The verification pipeline: Def 1.14 stages, the antipode and source/target
suites, the Theorem 2.9 path and the classification, glued into one report.
"""

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .antipode import (
    AntipodeWitness,
    SourceTargetWitness,
    build_generalized_inverses,
    check_antipode_identities,
    check_paths_agree,
    check_r_maps,
    check_source_target,
    check_source_target_multipliers,
    compute_antipode,
    compute_source_target,
    run_theorem_2_9,
)
from .classify import (
    REGULAR_CHECKS,
    STAR_CHECKS,
    WEAK_HOPF_CHECKS,
    Classification,
    RoundTrip,
    check_appendix_a,
    check_star_compat,
    classify_regular,
    classify_weak_hopf,
)
from .coalg import AXIOM_CHECKS, CanonicalIdempotent, CoproductData, CoproductState, run_coproduct_checks
from .config import Settings
from .errors import AntipodesDisagree, BadParameter, WmhaError
from .exactla import ONE, Matrix, Vector
from .fdalg import Algebra, StarStructure, validate_star
from .formats import matrix_to_json, subspace_to_json
from .report import FAIL, CheckResult, ReportBuilder, VerificationReport, compare, failed, passed, verdict

logger = logging.getLogger(__name__)

PATHS = ("def114", "thm29", "both")

DEF_114_CHECKS = AXIOM_CHECKS + (
    "def-1.4-full",
    "def-1.3-counit",
    "ass-1.5-E",
    "ass-1.5-idempotent",
    "prop-1.8",
    "def-1.14-ii",
    "prop-1.11",
    "def-1.14-iii",
)
THM_29_CHECKS = (
    "thm-2.9-hypotheses",
    "thm-2.9-R-range",
    "thm-2.9-eq-2.5",
    "thm-2.9-eq-2.6",
    "thm-2.9-eq-2.7",
    "thm-2.9-kernels",
)
ANTIPODE_CHECKS = (
    "lem-2.1-R1",
    "lem-2.1-R2",
    "prop-2.3-module",
    "prop-2.3-commute",
    "prop-2.4",
    "prop-2.7",
    "prop-2.6",
    "rem-2.8-ii",
    "prop-3.5",
    "prop-3.6",
    "prop-3.7",
    "def-3.1",
    "lem-3.2",
    "lem-3.3",
    "lem-3.4",
    "prop-3.9",
)
APPENDIX_CHECKS = ("app-A.3", "app-A.4", "app-A.5", "app-A.8")


@dataclass(frozen=True)
class ModelOracles:
    """Known answers of a model algebra, in the basis of its presentation."""

    E_left: Matrix
    E_right: Matrix
    G1: Matrix
    G2: Matrix
    F: Dict[str, Tuple[Matrix, Matrix]]
    S: Matrix
    counit: Vector

    @property
    def E(self) -> CanonicalIdempotent:
        return CanonicalIdempotent(self.E_left, self.E_right)


@dataclass(frozen=True)
class Presentation:
    """A coproduct together with whatever optional data came with it."""

    coproduct: CoproductData
    counit: Optional[Vector] = None
    star: Optional[StarStructure] = None
    antipode: Optional[Matrix] = None
    E: Optional[CanonicalIdempotent] = None
    oracles: Optional[ModelOracles] = None

    @property
    def algebra(self) -> Algebra:
        return self.coproduct.parent


@dataclass
class PipelineRun:
    builder: ReportBuilder
    state: CoproductState
    antipode: Optional[AntipodeWitness] = None
    source_target: Optional[SourceTargetWitness] = None
    classification: Classification = field(default_factory=Classification)
    paths: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.status != FAIL for r in self.builder.results())


def run_verification(
    p: Presentation,
    settings: Optional[Settings] = None,
    path: str = "both",
    prefix: str = "",
    classify: bool = True,
) -> PipelineRun:
    """
    Run the selected paths on a presentation.

    Args:
        p (Presentation): The coproduct and its optional candidates.
        settings (Optional[Settings]): Cross-check and round-trip switches.
        path (str): "def114", "thm29" or "both".
        prefix (str): Prefix for every check id, used by windowed runs.
        classify (bool): Run the classification suites after the antipode.

    Returns:
        PipelineRun: The builder with every result plus the witnesses found.
    """
    settings = settings or Settings()
    match path:
        case "def114":
            paths = ["def114"]
        case "thm29":
            paths = ["thm29"]
        case "both":
            paths = ["def114", "thm29"]
        case _:
            raise BadParameter(f"unknown path {path!r}, expected one of {', '.join(PATHS)}")
    builder = ReportBuilder(prefix)
    state = CoproductState(p.coproduct, settings, counit_input=p.counit)
    run = PipelineRun(builder, state, paths=paths)
    logger.info("verifying %s (dim %d) along %s", p.algebra.name or "algebra", p.algebra.dim, "+".join(paths))
    if p.star is not None:
        builder.add(validate_star(p.star, p.algebra))
    run_coproduct_checks(builder, state)
    if p.oracles is not None:
        _check_oracles(builder, state, p.oracles)
    if "def114" in paths:
        _run_antipode(run)
    else:
        for check_id in ANTIPODE_CHECKS:
            builder.skip(check_id, "def114 path not selected")
    if "thm29" in paths:
        _run_theorem_2_9(run, p)
    else:
        for check_id in THM_29_CHECKS:
            builder.skip(check_id, "thm29 path not selected")
    if "def114" in paths and "thm29" in paths:
        _paths_agree(run, p)
    else:
        builder.skip("thm-2.9-paths-agree", "only one path selected")
    run.classification.wmha = _is_wmha(builder, paths)
    if classify:
        _classify(run, p)
    return run


def verify(
    p: Presentation,
    settings: Optional[Settings] = None,
    path: str = "both",
    digest: str = "",
) -> VerificationReport:
    """Run the pipeline and package the results as a report."""
    settings = settings or Settings()
    run = run_verification(p, settings, path)
    return VerificationReport.from_builder(
        run.builder,
        classification=run.classification.to_json(),
        paths=run.paths,
        seed=settings.seed,
        input_digest=digest,
    )


def _is_wmha(builder: ReportBuilder, paths: List[str]) -> bool:
    if "def114" in paths and builder.ok(*DEF_114_CHECKS):
        return True
    return "thm29" in paths and builder.ok(*THM_29_CHECKS)


def _check_oracles(builder: ReportBuilder, state: CoproductState, oracles: ModelOracles) -> None:
    c = state.coproduct
    builder.run(
        "oracle-E",
        lambda: compare(
            "oracle-E",
            [("E left", state.E.left, oracles.E_left), ("E right", state.E.right, oracles.E_right)],
            refs=["E"],
            row_label=c.label,
            col_label=c.label,
        ),
        ("ass-1.5-E",),
    )
    builder.run(
        "oracle-G",
        lambda: compare(
            "oracle-G",
            [("G1", state.G.G1, oracles.G1), ("G2", state.G.G2, oracles.G2)],
            refs=["G1", "G2"],
            row_label=c.label,
            col_label=c.label,
        ),
        ("prop-1.11",),
    )
    builder.run(
        "oracle-counit",
        lambda: verdict("oracle-counit", state.counit.functional == oracles.counit, "ε on every basis element", ["counit"]),
        ("def-1.3-counit",),
    )


# Antipode


def _run_antipode(run: PipelineRun) -> None:
    builder, state = run.builder, run.state
    c = state.coproduct
    crosscheck = state.settings.crosscheck
    requires = ("def-1.14-iii", "prop-1.13")
    r_maps: Dict[str, Matrix] = {}

    if builder.guard_all(("lem-2.1-R1", "lem-2.1-R2"), requires):
        try:
            r_maps["R1"], r_maps["R2"] = build_generalized_inverses(c, state.E, state.G, crosscheck)
        except WmhaError as exc:
            detail = f"{type(exc).__name__}: {exc}"
            if "R2: " in str(exc):
                builder.add([passed("lem-2.1-R1", "T1R1 = E, R1T1 = G1", ["R1"]), failed("lem-2.1-R2", detail)])
            else:
                builder.add(failed("lem-2.1-R1", detail))
                builder.skip("lem-2.1-R2", "requires lem-2.1-R1")
        else:
            builder.witnesses["R1"] = matrix_to_json(r_maps["R1"])
            builder.witnesses["R2"] = matrix_to_json(r_maps["R2"])
            builder.add(
                [
                    passed("lem-2.1-R1", "T1R1 = E, R1T1 = G1", ["R1"]),
                    passed("lem-2.1-R2", "T2R2 = E, R2T2 = G2", ["R2"]),
                ]
            )
    if builder.guard_all(("prop-2.3-module", "prop-2.3-commute"), ("lem-2.1-R1", "lem-2.1-R2")):
        builder.add(check_r_maps(c, r_maps["R1"], r_maps["R2"]))

    def antipode() -> List[CheckResult]:
        contracted = passed("prop-2.4", "S1, S2 contracted from R1, R2 with ε")
        try:
            run.antipode = compute_antipode(c, r_maps["R1"], r_maps["R2"], state.counit)
        except AntipodesDisagree as exc:
            return [contracted, failed("prop-2.7", str(exc))]
        w = run.antipode
        if w.S_matrix is not None:
            builder.witnesses["S"] = matrix_to_json(w.S_matrix)
        else:
            builder.witnesses["S"] = {"left": [matrix_to_json(m) for m in w.S1_left]}
        return [contracted, passed("prop-2.7", f"S1 = S2 on {c.n ** 3} basis triples", ["S"])]

    if builder.guard("prop-2.4", ("lem-2.1-R1", "lem-2.1-R2", "def-1.3-counit")):
        builder.run("prop-2.7", antipode)
    else:
        builder.skip("prop-2.7", "requires prop-2.4")
    w = run.antipode
    identities = ("prop-2.6", "rem-2.8-ii", "prop-3.5", "prop-3.6", "prop-3.7")
    if builder.guard_all(identities, ("prop-2.7",)):
        builder.add(check_antipode_identities(c, state.E, state.extension, w))

    def source_target() -> CheckResult:
        run.source_target = compute_source_target(c, w, state.malg)
        st = run.source_target
        builder.witnesses["eps_s_image"] = subspace_to_json(st.image_s)
        builder.witnesses["eps_t_image"] = subspace_to_json(st.image_t)
        return check_source_target_multipliers(c, st)

    builder.run("def-3.1", source_target, ("prop-2.7",))
    if builder.guard_all(("lem-3.2", "lem-3.3", "lem-3.4", "prop-3.9"), ("def-3.1", "prop-1.8")):
        builder.add(check_source_target(c, state.E, state.extension, run.source_target))


def _check_oracle_antipode(run: PipelineRun, oracles: ModelOracles) -> None:
    w = run.antipode

    def compare_s() -> CheckResult:
        if w.S_matrix is None:
            return failed("oracle-antipode", "S does not map A into A")
        return compare("oracle-antipode", [("S", w.S_matrix, oracles.S)], refs=["S"], col_label=_label(run))

    run.builder.run("oracle-antipode", compare_s, ("prop-2.7",))


def _label(run: PipelineRun):
    return lambda j: run.state.coproduct.parent.labels[j]


# Theorem 2.9


def _candidates(run: PipelineRun, p: Presentation) -> Tuple[Optional[Matrix], Optional[CanonicalIdempotent], str]:
    """Input data first, then model witnesses, then whatever the def114 path computed."""
    if p.antipode is not None or p.E is not None:
        s = p.antipode if p.antipode is not None else _computed_s(run)
        return s, p.E if p.E is not None else run.state.E, "input"
    if p.oracles is not None:
        return p.oracles.S, p.oracles.E, "model witness"
    return _computed_s(run), run.state.E, "def114 path"


def _computed_s(run: PipelineRun) -> Optional[Matrix]:
    return run.antipode.S_matrix if run.antipode is not None else None


def _run_theorem_2_9(run: PipelineRun, p: Presentation) -> None:
    s, E, source = _candidates(run, p)
    logger.info("Theorem 2.9 candidates from %s", source)
    run_theorem_2_9(run.builder, run.state.coproduct, s, E, run.state.settings.crosscheck, source)


def _paths_agree(run: PipelineRun, p: Presentation) -> None:
    builder = run.builder
    if not builder.guard("thm-2.9-paths-agree", ("prop-2.7", "ass-1.5-E") + THM_29_CHECKS):
        return
    s, E, _ = _candidates(run, p)
    builder.add(check_paths_agree(run.state.E, _computed_s(run), E, s))


# Classification


def _skip_all(builder: ReportBuilder, checks, reason: str) -> None:
    for check_id in checks:
        builder.skip(check_id, reason)


def _classify(run: PipelineRun, p: Presentation) -> None:
    builder, state = run.builder, run.state
    result = run.classification
    if p.oracles is not None and "def114" in run.paths:
        _check_oracle_antipode(run, p.oracles)
    elif builder.status("oracle-antipode") is None:
        builder.skip("oracle-antipode", "no model witness")
    suites = REGULAR_CHECKS + ("thm-4.10", "app-A.12") + STAR_CHECKS + WEAK_HOPF_CHECKS + APPENDIX_CHECKS
    if "def114" not in run.paths:
        _skip_all(builder, suites, "classification needs the def114 path")
        return
    if not (result.wmha and builder.ok(*DEF_114_CHECKS)):
        _skip_all(builder, suites, "requires wmha")
        result.reasons["regular"] = "requires wmha"
        return
    if not builder.ok("prop-2.7", "def-3.1", "prop-1.8", "prop-1.11"):
        missing = next(x for x in ("prop-2.7", "def-3.1", "prop-1.8", "prop-1.11") if not builder.ok(x))
        _skip_all(builder, suites, f"requires {missing}")
        result.reasons["regular"] = f"requires {missing}"
        return
    rerun = _rerun(state.settings) if state.settings.round_trips else None
    oracle_F = p.oracles.F if p.oracles is not None else None
    result, c = classify_regular(
        builder,
        state.coproduct,
        state.E,
        state.G,
        run.antipode,
        state.malg,
        state.extension,
        state.factors,
        rerun,
        oracle_F,
        result,
    )
    state.coproduct = c
    if p.star is None:
        _skip_all(builder, STAR_CHECKS, "no star structure")
    elif not builder.ok("star-valid"):
        _skip_all(builder, STAR_CHECKS, "requires star-valid")
        result.star_compatible = False
    else:
        result.star_compatible = check_star_compat(builder, c, state.E, run.antipode, p.star, result.F)
    classify_weak_hopf(builder, c, state.E, state.counit, run.source_target, result)
    check_appendix_a(builder, c, state.E, run.antipode, run.source_target, state.malg, result.regular)
    logger.info("classification: %s", result.one_line())


def _rerun(settings: Settings):
    inner = settings.override(round_trips=False)

    def rerun(c: CoproductData) -> RoundTrip:
        run = run_verification(Presentation(c), inner, "def114", classify=False)
        w = run.antipode
        failure = next((r for r in run.builder.results() if r.status == FAIL), None)
        detail = "pass" if failure is None else f"{failure.id}: {failure.detail}"
        return RoundTrip(
            passed=failure is None,
            detail=detail,
            E=run.state.E,
            S_matrix=w.S_matrix if w is not None else None,
        )

    return rerun


# Mutations


def _bump(m: Matrix, i: int, j: int, delta) -> Matrix:
    if not (0 <= i < m.rows and 0 <= j < m.cols):
        raise BadParameter(f"entry ({i}, {j}) outside a {m.rows}x{m.cols} matrix")
    return m + Matrix.from_entries(m.rows, m.cols, [(i, j, delta)])


def mutate(p: Presentation, target: str, index: Tuple[int, ...], delta=ONE) -> Presentation:
    """
    Perturb a single entry of a presentation.

    Args:
        p (Presentation): The presentation to copy.
        target (str): "structure" (index i, j, k), "T1" (row, col),
            "E" (row, col of the left action) or "S" (row, col).
        index (Tuple[int, ...]): Which entry.
        delta: Added to the entry.

    Returns:
        Presentation: A new presentation; the input is left untouched.
    """
    c = p.coproduct
    match target:
        case "structure":
            i, j, k = index
            a = c.parent
            entries = list(a.structure_entries()) + [(i, j, k, delta)]
            parent = Algebra.from_structure(a.dim, entries, a.labels, f"{a.name} (mutated)")
            return dataclasses.replace(p, coproduct=dataclasses.replace(c, parent=parent))
        case "T1":
            return dataclasses.replace(p, coproduct=dataclasses.replace(c, T1=_bump(c.T1, *index, delta), T3=None, T4=None))
        case "E":
            base = p.E or (p.oracles.E if p.oracles is not None else None)
            if base is None:
                raise BadParameter("no idempotent candidate to mutate")
            return dataclasses.replace(p, E=CanonicalIdempotent(_bump(base.left, *index, delta), base.right))
        case "S":
            base = p.antipode if p.antipode is not None else (p.oracles.S if p.oracles is not None else None)
            if base is None:
                raise BadParameter("no antipode candidate to mutate")
            return dataclasses.replace(p, antipode=_bump(base, *index, delta))
        case _:
            raise BadParameter(f"unknown mutation target {target!r}")
