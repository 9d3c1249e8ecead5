"""
Classification of a verified weak multiplier Hopf algebra: regularity and
the identities that come with it, compatibility with a star structure, the
weak Hopf case and the identities of the appendix.
"""

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

from .antipode import AntipodeWitness, SourceTargetWitness, anti_coproduct
from .coalg import (
    CanonicalIdempotent,
    CoproductData,
    Counit,
    DeltaExtension,
    ProjectionMaps,
    factorization_operator,
)
from .exactla import Matrix, Subspace
from .fdalg import Multiplier, MultiplierAlgebra, StarStructure, TensorMultiplier, find_unit_or_local_units, opposite
from .formats import matrix_to_json
from .legs import conjugate_by_flip, identity, on_legs_13
from .report import CheckResult, ReportBuilder, compare, failed, passed, verdict

logger = logging.getLogger(__name__)

REGULAR_CHECKS = (
    "prop-a.1",
    "prop-4.2",
    "prop-4.4",
    "prop-4.4-delta",
    "prop-4.5",
    "prop-4.6",
    "prop-4.7",
    "prop-4.8",
    "oracle-F",
    "prop-4.3",
    "sec-4-cop",
)
STAR_CHECKS = (
    "prop-4.11-delta-star",
    "prop-4.11-involution",
    "prop-4.11-E-star",
    "prop-4.11-F-star",
)
WEAK_HOPF_CHECKS = ("prop-4.12-eq-4.12", "prop-4.12-eq-4.13", "prop-4.12-antipode-counit")

FPair = Tuple[Matrix, Matrix]


@dataclass(frozen=True)
class RoundTrip:
    """Outcome of re-running the pipeline on a derived presentation."""

    passed: bool
    detail: str
    E: Optional[CanonicalIdempotent] = None
    S_matrix: Optional[Matrix] = None


Rerun = Callable[[CoproductData], RoundTrip]


@dataclass
class Classification:
    wmha: bool = False
    regular: bool = False
    star_compatible: Optional[bool] = None
    weak_hopf: bool = False
    hopf: bool = False
    F: Dict[str, TensorMultiplier] = field(default_factory=dict)
    reasons: Dict[str, str] = field(default_factory=dict)

    def to_json(self) -> Dict[str, object]:
        return {
            "wmha": self.wmha,
            "regular": self.regular,
            "star": self.star_compatible,
            "weak_hopf": self.weak_hopf,
            "hopf": self.hopf,
            "reasons": dict(sorted(self.reasons.items())),
        }

    def one_line(self) -> str:
        def mark(flag: Optional[bool]) -> str:
            return "-" if flag is None else ("✓" if flag else "✗")

        return ", ".join(
            f"{name} {mark(flag)}"
            for name, flag in (
                ("wmha", self.wmha),
                ("regular", self.regular),
                ("star", self.star_compatible),
                ("weak_hopf", self.weak_hopf),
                ("hopf", self.hopf),
            )
        )


# Regularity


def classify_regular(
    builder: ReportBuilder,
    c: CoproductData,
    E: CanonicalIdempotent,
    g: ProjectionMaps,
    w: AntipodeWitness,
    malg: MultiplierAlgebra,
    ext: DeltaExtension,
    factors: Optional[Tuple[Optional[TensorMultiplier], Optional[TensorMultiplier]]],
    rerun: Optional[Rerun] = None,
    oracle_F: Optional[Dict[str, FPair]] = None,
    classification: Optional[Classification] = None,
) -> Tuple[Classification, CoproductData]:
    """
    Decide regularity through the antipode and, when regular, check the
    identities that hold for regular weak multiplier Hopf algebras.

    Returns the classification and the presentation with T3, T4 filled in.
    """
    result = classification or Classification()
    n = c.n
    eye = identity(n)
    regular = result.wmha and w.bijective
    result.regular = regular
    builder.add(passed("thm-4.10", "regular" if regular else "not regular", ["S"]))
    if not regular:
        reason = "S is not a bijection of A" if w.S_matrix is not None else "S does not map A into A"
        result.reasons["regular"] = reason
        logger.warning("antipode is not regular: %s", reason)
        for check_id in REGULAR_CHECKS + ("app-A.12",):
            builder.skip(check_id, f"not regular: {reason}")
        return result, c
    s, s_inv = w.S_matrix, w.S_inverse
    t3 = eye.kron(s_inv) @ w.R1 @ eye.kron(s)
    t4 = s_inv.kron(eye) @ w.R2 @ s.kron(eye)
    if c.T3 is not None and c.T4 is not None:
        builder.add(
            compare(
                "prop-a.1",
                [("T3 = (ι⊗S⁻¹)R1(ι⊗S)", c.T3, t3), ("T4 = (S⁻¹⊗ι)R2(S⊗ι)", c.T4, t4)],
                row_label=c.label,
                col_label=c.label,
            )
        )
    else:
        c = dataclasses.replace(c, T3=t3, T4=t4)
        builder.add(passed("prop-a.1", "T3, T4 derived from S"))
    builder.add(
        verdict(
            "prop-4.2",
            Subspace.column_space(c.T3) == Subspace.column_space(E.right)
            and Subspace.column_space(c.T4) == Subspace.column_space(E.left),
            "Ran T3 = (A⊗A)E, Ran T4 = E(A⊗A)",
        )
    )
    u = malg.coordinate_map(w.on_multiplier)
    v = malg.coordinate_map(w.inverse_on_multiplier)
    coeffs = E.tensor.coeffs
    builder.witnesses["S_on_multipliers"] = matrix_to_json(u)
    builder.add(compare("prop-4.4", [("(S⊗S)E = σE", u @ coeffs @ u.transpose(), coeffs.transpose())], refs=["E", "S"]))

    def strengthened() -> CheckResult:
        pairs = []
        for a in range(n):
            x_left, x_right = anti_coproduct(c, w, a)
            image = ext.extend(w.S[a])
            label = c.parent.labels[a]
            pairs.append((f"Δ(S({label})) left", image.left, x_left))
            pairs.append((f"Δ(S({label})) right", image.right, x_right))
        return compare("prop-4.4-delta", pairs, refs=["S"], row_label=c.label, col_label=c.label)

    builder.run("prop-4.4-delta", strengthened, ("prop-4.4",))
    F = {
        "F1": TensorMultiplier(malg, coeffs @ u.transpose()),
        "F2": TensorMultiplier(malg, u @ coeffs),
        "F3": TensorMultiplier(malg, coeffs @ v.transpose()),
        "F4": TensorMultiplier(malg, v @ coeffs),
    }
    result.F = F
    for name, value in F.items():
        builder.witnesses[name] = {"coefficients": matrix_to_json(value.coeffs), "left": matrix_to_json(value.left)}
    builder.add(
        compare(
            "prop-4.5",
            [
                ("G1(a⊗b) = (a⊗1)F1(1⊗b)", g.G1, factorization_operator(F["F1"])),
                ("G2(a⊗b) = (a⊗1)F2(1⊗b)", g.G2, factorization_operator(F["F2"])),
            ],
            refs=["G1", "G2", "F1", "F2"],
            row_label=c.label,
            col_label=c.label,
        )
    )
    e13 = on_legs_13(E.left, n)
    e_first, e_second = E.left.kron(eye), eye.kron(E.left)
    builder.add(
        compare(
            "prop-4.6",
            [
                ("E13(F1⊗1) = E13(1⊗E)", e13 @ F["F1"].left.kron(eye), e13 @ e_second),
                ("(F3⊗1)E13 = (1⊗E)E13", F["F3"].left.kron(eye) @ e13, e_second @ e13),
                ("(1⊗F2)E13 = (E⊗1)E13", eye.kron(F["F2"].left) @ e13, e_first @ e13),
                ("E13(1⊗F4) = E13(E⊗1)", e13 @ eye.kron(F["F4"].left), e13 @ e_first),
            ],
            refs=["E", "F1", "F2", "F3", "F4"],
            row_label=c.label3,
            col_label=c.label3,
        )
    )
    if factors is None or any(f is None for f in factors):
        builder.add(failed("prop-4.7", "G1 or G2 did not factor through M(A)⊗M(A)"))
    else:
        builder.add(
            compare(
                "prop-4.7",
                [("F1 = (ι⊗S)E", factors[0].coeffs, F["F1"].coeffs), ("F2 = (S⊗ι)E", factors[1].coeffs, F["F2"].coeffs)],
                refs=["F1", "F2"],
            )
        )
    builder.add(
        compare(
            "prop-4.8",
            [
                ("(S⊗S)F1 = σF2", u @ F["F1"].coeffs @ u.transpose(), F["F2"].coeffs.transpose()),
                ("(S⊗S)F3 = σF4", u @ F["F3"].coeffs @ u.transpose(), F["F4"].coeffs.transpose()),
            ],
            refs=["F1", "F2", "F3", "F4"],
        )
    )
    if oracle_F is None:
        builder.skip("oracle-F", "no model witness")
    else:
        pairs = []
        for name in ("F1", "F2", "F3", "F4"):
            left, right = oracle_F[name]
            pairs.append((f"{name} left", F[name].left, left))
            pairs.append((f"{name} right", F[name].right, right))
        builder.add(compare("oracle-F", pairs, refs=list(F), row_label=c.label, col_label=c.label))
    _round_trips(builder, c, E, w, rerun)
    return result, c


def _round_trips(
    builder: ReportBuilder, c: CoproductData, E: CanonicalIdempotent, w: AntipodeWitness, rerun: Optional[Rerun]
) -> None:
    if rerun is None:
        for check_id in ("prop-4.3", "sec-4-cop", "app-A.12"):
            builder.skip(check_id, "round trips disabled")
        return
    n = c.n
    op = rerun(CoproductData(opposite(c.parent), c.T3, c.T4))
    builder.witnesses["op_round_trip"] = op.detail
    if not op.passed:
        builder.add(failed("prop-4.3", f"(A^op, Δ) does not pass: {op.detail}"))
    elif op.E is None or op.E.left != E.right or op.E.right != E.left:
        builder.add(failed("prop-4.3", "(A^op, Δ) has a different canonical idempotent"))
    elif op.S_matrix is None or op.S_matrix != w.S_inverse:
        builder.add(failed("prop-4.3", "the antipode of (A^op, Δ) is not S⁻¹"))
    else:
        builder.add(passed("prop-4.3", "(A^op, Δ) passes with the same E and antipode S⁻¹"))
    builder.add(verdict("app-A.12", op.passed, f"(A^op, Δ): {op.detail}"))
    cop = rerun(CoproductData(c.parent, conjugate_by_flip(c.T4, n), conjugate_by_flip(c.T3, n)))
    if not cop.passed:
        builder.add(failed("sec-4-cop", f"(A, Δ^cop) does not pass: {cop.detail}"))
    else:
        builder.add(
            verdict(
                "sec-4-cop",
                cop.E is not None and cop.E == E.flipped(n),
                "(A, Δ^cop) passes with canonical idempotent σE",
            )
        )


# Star structures


def check_star_compat(
    builder: ReportBuilder,
    c: CoproductData,
    E: CanonicalIdempotent,
    w: AntipodeWitness,
    star: StarStructure,
    F: Dict[str, TensorMultiplier],
) -> bool:
    """Prop 4.11 identities; returns whether all of them hold."""
    n = c.n
    j = star.star_matrix
    k = star.tensor_matrix
    k_bar = k.conjugate()
    if c.T3 is None or c.T4 is None:
        builder.skip("prop-4.11-delta-star", "T3, T4 unavailable")
    else:
        builder.add(
            compare(
                "prop-4.11-delta-star",
                [("T3(a*⊗b*) = T1(a⊗b)*", c.T3 @ k, k @ c.T1.conjugate()), ("T4(a*⊗b*) = T2(a⊗b)*", c.T4 @ k, k @ c.T2.conjugate())],
                row_label=c.label,
                col_label=c.label,
            )
        )
    if w.S_inverse is None:
        builder.add(failed("prop-4.11-involution", "a star structure needs a regular antipode, S is not a bijection of A"))
    else:
        s = w.S_matrix
        builder.add(
            compare(
                "prop-4.11-involution",
                [("S(S(a)*)* = a", j @ s.conjugate() @ j.conjugate() @ s, Matrix.identity(n))],
                refs=["S"],
            )
        )
    builder.add(
        compare(
            "prop-4.11-E-star",
            [("E* = E left", k @ E.right.conjugate() @ k_bar, E.left), ("E* = E right", k @ E.left.conjugate() @ k_bar, E.right)],
            refs=["E"],
            row_label=c.label,
            col_label=c.label,
        )
    )
    if not F:
        builder.skip("prop-4.11-F-star", "F1..F4 unavailable")
    else:
        builder.add(
            compare(
                "prop-4.11-F-star",
                [
                    ("F1* = F3", k @ F["F1"].right.conjugate() @ k_bar, F["F3"].left),
                    ("F2* = F4", k @ F["F2"].right.conjugate() @ k_bar, F["F4"].left),
                ],
                refs=["F1", "F2", "F3", "F4"],
                row_label=c.label,
                col_label=c.label,
            )
        )
    return all(builder.status(check_id) != "fail" for check_id in STAR_CHECKS) and builder.ok(
        "prop-4.11-involution", "prop-4.11-E-star"
    )


# Weak Hopf algebras


def classify_weak_hopf(
    builder: ReportBuilder,
    c: CoproductData,
    E: CanonicalIdempotent,
    eps: Counit,
    st: SourceTargetWitness,
    classification: Classification,
) -> Classification:
    n = c.n
    algebra = c.parent
    found = find_unit_or_local_units(algebra)
    if found is None:
        classification.reasons["weak_hopf"] = "non-unital"
        for check_id in WEAK_HOPF_CHECKS:
            builder.skip(check_id, "non-unital")
        return classification
    unit = found.coeffs
    eye = identity(n)
    e = eps.row
    ee = e.kron(e)
    delta = Matrix.from_columns(n * n, [c.T1.apply({b * n + k: v for k, v in unit.items()}) for b in range(n)])

    def rows(fn) -> Matrix:
        return Matrix.from_row_vectors(n, [fn(a, x).row(0) for a in range(n) for x in range(n)])

    def pair_label(index: int) -> str:
        a, x = divmod(index, n)
        return f"a={algebra.labels[a]}, c={algebra.labels[x]}"

    lhs = rows(lambda a, x: e @ algebra.left_ops[a] @ algebra.right_ops[x])
    rhs_412 = rows(lambda a, x: ee @ algebra.right_ops[x].kron(algebra.left_ops[a]) @ delta)
    rhs_413 = rows(lambda a, x: ee @ algebra.left_ops[a].kron(algebra.right_ops[x]) @ delta)
    builder.add(compare("prop-4.12-eq-4.12", [("ε(abc) = ε(ab(2))ε(b(1)c)", lhs, rhs_412)], row_label=pair_label))
    holds_413 = lhs == rhs_413
    if classification.regular:
        builder.add(compare("prop-4.12-eq-4.13", [("ε(abc) = ε(ab(1))ε(b(2)c)", lhs, rhs_413)], row_label=pair_label))
    else:
        builder.add(
            passed(
                "prop-4.12-eq-4.13",
                f"not regular, identity {'holds' if holds_413 else 'does not hold'}",
            )
        )
    unit_first = Matrix.from_columns(n * n, [{a * n + k: v for k, v in unit.items()} for a in range(n)])
    unit_second = Matrix.from_columns(n * n, [{k * n + a: v for k, v in unit.items()} for a in range(n)])
    builder.add(
        compare(
            "prop-4.12-antipode-counit",
            [
                (
                    "ε_t(a) = (ε⊗ι)(E(a⊗1))",
                    Matrix.from_columns(n, [m.left.apply(unit) for m in st.eps_t]),
                    e.kron(eye) @ E.left @ unit_first,
                ),
                (
                    "ε_s(a) = (ι⊗ε)((1⊗a)E)",
                    Matrix.from_columns(n, [m.left.apply(unit) for m in st.eps_s]),
                    eye.kron(e) @ E.right @ unit_second,
                ),
            ],
            refs=["counit", "E"],
        )
    )
    classification.weak_hopf = classification.wmha and builder.ok(*WEAK_HOPF_CHECKS) and holds_413
    if not classification.weak_hopf:
        classification.reasons["weak_hopf"] = "counit identities fail"
    classification.hopf = classification.weak_hopf and E.left.is_identity()
    if classification.weak_hopf and not classification.hopf:
        classification.reasons["hopf"] = "E != 1⊗1"
    return classification


# Appendix identities


def check_appendix_a(
    builder: ReportBuilder,
    c: CoproductData,
    E: CanonicalIdempotent,
    w: AntipodeWitness,
    st: SourceTargetWitness,
    malg: MultiplierAlgebra,
    regular: bool,
) -> None:
    n = c.n
    eye = identity(n)
    builder.add(
        compare(
            "app-A.3",
            [("m(S⊗ι)E = 1", w.MS @ E.left, w.MS), ("m(ι⊗S)E = 1", w.MS2 @ E.right, w.MS2)],
            refs=["E", "S"],
            col_label=c.label,
        )
    )
    if not regular:
        for check_id in ("app-A.4", "app-A.5", "app-A.8"):
            builder.skip(check_id, "requires thm-4.10 regular")
        return
    s = w.S_matrix
    zero = Multiplier(c.parent, Matrix.zeros(n, n), Matrix.zeros(n, n))

    def combine(values, coeffs) -> Multiplier:
        total = zero
        for k, v in coeffs.items():
            total = total + values[k].scale(v)
        return total

    def a4() -> CheckResult:
        for a in range(n):
            label = c.parent.labels[a]
            image = s.column(a)
            if w.on_multiplier(st.eps_t[a]) != combine(st.eps_s, image):
                return failed("app-A.4", f"S(ε_t({label})) != ε_s(S({label}))")
            if w.on_multiplier(st.eps_s[a]) != combine(st.eps_t, image):
                return failed("app-A.4", f"S(ε_s({label})) != ε_t(S({label}))")
        return passed("app-A.4", "S∘ε_t = ε_s∘S and S∘ε_s = ε_t∘S", ["S"])

    builder.run("app-A.4", a4)

    def a5() -> CheckResult:
        pairs = []
        for y in (malg.multiplier(v) for v in st.image_s.basis()):
            pairs.append(("E(y⊗1) = E(1⊗S(y))", E.left @ y.left.kron(eye), E.left @ eye.kron(w.on_multiplier(y).left)))
        for x in (malg.multiplier(v) for v in st.image_t.basis()):
            pairs.append(("(1⊗x)E = (S(x)⊗1)E", eye.kron(x.left) @ E.left, w.on_multiplier(x).left.kron(eye) @ E.left))
        return compare("app-A.5", pairs, refs=["E"], row_label=c.label, col_label=c.label)

    builder.run("app-A.5", a5)
    u = malg.coordinate_map(w.on_multiplier)
    coeffs = E.tensor.coeffs
    builder.add(compare("app-A.8", [("σ(S⊗S)E = E", (u @ coeffs @ u.transpose()).transpose(), coeffs)], refs=["E"]))
