"""
The coproduct layer.

A coproduct is given by its canonical maps T1(a⊗b) = Δ(a)(1⊗b) and
T2(a⊗b) = (a⊗1)Δ(b), optionally with T3(a⊗b) = (1⊗b)Δ(a) and
T4(a⊗b) = Δ(b)(a⊗1). From them this module solves the counit, the canonical
idempotent E and the projection maps G1, G2, extends Δ to multipliers and
checks the axioms of a weak multiplier Hopf algebra.
"""

import dataclasses
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from .config import Settings
from .errors import (
    AmbiguousE,
    AmbiguousSolution,
    CrossCheckMismatch,
    DimensionMismatch,
    IllDefinedExtension,
    Infeasible,
    NoCounit,
    NonUniqueCounit,
    NoSolution,
    NoSuchIdempotent,
    NotIdempotent,
)
from .exactla import (
    ZERO,
    Matrix,
    Subspace,
    Vector,
    rank_image_kernel,
    solve_linear,
    solve_matrix,
)
from .fdalg import (
    Algebra,
    Multiplier,
    MultiplierAlgebra,
    TensorMultiplier,
    multiplier_algebra,
    tensor_algebra,
    validate_algebra,
)
from .formats import matrix_to_json, vector_to_json
from .legs import apply_leg1, apply_leg2, flip, identity, kron, swap23, tensor_vector, unflatten
from .report import (
    CheckResult,
    Diagnostics,
    ReportBuilder,
    VerificationReport,
    compare,
    failed,
    passed,
    skipped,
    verdict,
)

logger = logging.getLogger(__name__)

AXIOM_CHECKS = (
    "def-1.1-right-module",
    "def-1.1-left-module",
    "def-1.1-mixed",
    "def-1.1-homomorphism",
    "def-1.1-coassociative",
)
ALGEBRA_CHECKS = ("alg-associative", "alg-nondegenerate")


@dataclass(frozen=True, eq=False)
class CoproductData:
    parent: Algebra
    T1: Matrix
    T2: Matrix
    T3: Optional[Matrix] = None
    T4: Optional[Matrix] = None

    def __post_init__(self):
        n2 = self.parent.dim ** 2
        for name in ("T1", "T2", "T3", "T4"):
            t = getattr(self, name)
            if t is not None and t.shape != (n2, n2):
                raise DimensionMismatch(f"{name} is {t.rows}x{t.cols}, expected {n2}x{n2}")

    @property
    def n(self) -> int:
        return self.parent.dim

    @cached_property
    def square(self) -> Algebra:
        return tensor_algebra(self.parent, self.parent)

    @cached_property
    def left_delta(self) -> List[Matrix]:
        """Left action of Δ(a) on A⊗A for each basis a: x⊗y -> T1(a⊗y)(x⊗1)."""
        n = self.n
        cols = self.T1.columns()
        right_ops = self.parent.right_ops
        return [
            Matrix.from_columns(
                n * n, [apply_leg1(right_ops[x], cols[a * n + y], n) for x in range(n) for y in range(n)]
            )
            for a in range(n)
        ]

    @cached_property
    def right_delta(self) -> List[Matrix]:
        """Right action of Δ(a) on A⊗A: x⊗y -> (1⊗y)T2(x⊗a)."""
        n = self.n
        cols = self.T2.columns()
        left_ops = self.parent.left_ops
        return [
            Matrix.from_columns(
                n * n, [apply_leg2(left_ops[y], cols[x * n + a], n) for x in range(n) for y in range(n)]
            )
            for a in range(n)
        ]

    @cached_property
    def d13(self) -> Matrix:
        """a⊗b⊗x -> Δ13(a)(1⊗b⊗x)."""
        s = swap23(self.n)
        return s @ self.T1.kron(identity(self.n)) @ s

    @cached_property
    def d13_right(self) -> Matrix:
        """y⊗b⊗a -> (y⊗b⊗1)Δ13(a)."""
        s = swap23(self.n)
        return s @ self.T2.kron(identity(self.n)) @ s

    def label(self, index: int, legs: int = 2) -> str:
        return "⊗".join(self.parent.labels[i] for i in unflatten(index, self.n, legs))

    def label3(self, index: int) -> str:
        return self.label(index, 3)


@dataclass(frozen=True)
class Counit:
    parent: Algebra
    functional: Vector

    @property
    def row(self) -> Matrix:
        return Matrix.from_entries(1, self.parent.dim, ((0, i, v) for i, v in self.functional.items()))


@dataclass(frozen=True, eq=False)
class CanonicalIdempotent:
    """
    E as its left and right actions on A⊗A. `tensor` holds the M(A)⊗M(A)
    coordinates when E was solved rather than supplied.
    """

    left: Matrix
    right: Matrix
    tensor: Optional[TensorMultiplier] = None

    @classmethod
    def from_tensor(cls, tensor: TensorMultiplier) -> "CanonicalIdempotent":
        return cls(tensor.left, tensor.right, tensor)

    @cached_property
    def rank(self) -> int:
        return self.left.rank()

    def flipped(self, dim: int) -> "CanonicalIdempotent":
        """σE."""
        s = flip(dim)
        tensor = self.tensor.flipped() if self.tensor is not None else None
        return CanonicalIdempotent(s @ self.left @ s, s @ self.right @ s, tensor)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CanonicalIdempotent):
            return NotImplemented
        return self.left == other.left and self.right == other.right

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ProjectionMaps:
    G1: Matrix
    G2: Matrix


# Validation


def validate_coproduct(c: CoproductData) -> Diagnostics:
    n = c.n
    eye = identity(n)
    a = c.parent
    lab = a.labels
    results: Diagnostics = []
    results.append(
        compare(
            "def-1.1-right-module",
            (
                (f"T1(a⊗bc) at c={lab[b]}", c.T1 @ eye.kron(a.right_ops[b]), eye.kron(a.right_ops[b]) @ c.T1)
                for b in range(n)
            ),
            row_label=c.label,
            col_label=c.label,
        )
    )
    results.append(
        compare(
            "def-1.1-left-module",
            (
                (f"T2 at a'={lab[x]}", c.T2 @ a.left_ops[x].kron(eye), a.left_ops[x].kron(eye) @ c.T2)
                for x in range(n)
            ),
            row_label=c.label,
            col_label=c.label,
        )
    )
    t2_cols = c.T2.columns()

    def mixed(x: int) -> Tuple[str, Matrix, Matrix]:
        expected = Matrix.from_columns(
            n * n,
            [apply_leg2(a.right_ops[q], t2_cols[x * n + p], n) for p in range(n) for q in range(n)],
        )
        return f"(a'⊗1)T1(a⊗b) at a'={lab[x]}", a.left_ops[x].kron(eye) @ c.T1, expected

    results.append(
        compare("def-1.1-mixed", (mixed(x) for x in range(n)), row_label=c.label, col_label=c.label)
    )
    homomorphism = []
    for x in range(n):
        homomorphism.append(
            (f"T1(a{lab[x]}⊗b)", c.T1 @ a.left_ops[x].kron(eye), c.left_delta[x] @ c.T1)
        )
        homomorphism.append(
            (f"T2(b⊗a{lab[x]})", c.T2 @ eye.kron(a.right_ops[x]), c.right_delta[x] @ c.T2)
        )
    results.append(
        compare("def-1.1-homomorphism", homomorphism, row_label=c.label, col_label=c.label)
    )
    results.append(
        compare(
            "def-1.1-coassociative",
            [
                (
                    "(T2⊗ι)(ι⊗T1) vs (ι⊗T1)(T2⊗ι)",
                    c.T2.kron(eye) @ eye.kron(c.T1),
                    eye.kron(c.T1) @ c.T2.kron(eye),
                )
            ],
            row_label=c.label3,
            col_label=c.label3,
        )
    )
    results.extend(check_regular_maps(c))
    return results


def _stack(blocks: Sequence[Matrix]) -> Matrix:
    return blocks[0].vstack(*blocks[1:])


def _t3_constraints(c: CoproductData) -> Tuple[Matrix, Matrix]:
    # (c⊗1)T3(a⊗b) = (1⊗b)T2(c⊗a) for every c
    n, n2 = c.n, c.n ** 2
    a = c.parent
    stacked = _stack([a.left_ops[k].kron(identity(n)) for k in range(n)])
    rhs: Dict[int, Dict[int, object]] = {}
    for b in range(n):
        block = identity(n).kron(a.left_ops[b]) @ c.T2
        for r, col, v in block.entries():
            k, p = divmod(col, n)
            rhs.setdefault(k * n2 + r, {})[p * n + b] = v
    return stacked, Matrix.from_dod(n * n2, n2, rhs)


def _t4_constraints(c: CoproductData) -> Tuple[Matrix, Matrix]:
    # T4(a⊗b)(1⊗c) = T1(b⊗c)(a⊗1) for every c
    n, n2 = c.n, c.n ** 2
    a = c.parent
    stacked = _stack([identity(n).kron(a.right_ops[k]) for k in range(n)])
    rhs: Dict[int, Dict[int, object]] = {}
    for p in range(n):
        block = a.right_ops[p].kron(identity(n)) @ c.T1
        for r, col, v in block.entries():
            b, k = divmod(col, n)
            rhs.setdefault(k * n2 + r, {})[p * n + b] = v
    return stacked, Matrix.from_dod(n * n2, n2, rhs)


def check_regular_maps(c: CoproductData) -> Diagnostics:
    results: Diagnostics = []
    for check_id, t, build in (
        ("def-1.1-regular-t3", c.T3, _t3_constraints),
        ("def-1.1-regular-t4", c.T4, _t4_constraints),
    ):
        if t is None:
            results.append(skipped(check_id, "not supplied"))
            continue
        stacked, rhs = build(c)
        results.append(compare(check_id, [("cancelled by every c", stacked @ t, rhs)]))
    return results


def derive_regular_maps(c: CoproductData) -> CoproductData:
    """
    Solve T3 and T4 from T1, T2 by cancelling the extra factor c.

    Raises:
        NoSolution: If the coproduct is not regular.
    """
    solved = {}
    for name, build in (("T3", _t3_constraints), ("T4", _t4_constraints)):
        if getattr(c, name) is not None:
            continue
        stacked, rhs = build(c)
        try:
            solution, kernel = solve_matrix(stacked, rhs)
        except Infeasible:
            raise NoSolution(f"no {name}: the coproduct is not regular")
        if kernel.dim:
            raise AmbiguousSolution(f"{name} is not determined (degenerate product)")
        solved[name] = solution
    return dataclasses.replace(c, **solved)


def check_fullness(c: CoproductData) -> Tuple[Subspace, Subspace, bool]:
    n = c.n
    first_legs: List[Vector] = []
    for col in c.T1.columns():
        legs: Dict[int, Vector] = {}
        for idx, v in col.items():
            i, j = divmod(idx, n)
            legs.setdefault(j, {})[i] = v
        first_legs.extend(legs.values())
    second_legs: List[Vector] = []
    for col in c.T2.columns():
        legs = {}
        for idx, v in col.items():
            i, j = divmod(idx, n)
            legs.setdefault(i, {})[j] = v
        second_legs.extend(legs.values())
    v_space = Subspace.span(n, first_legs)
    w_space = Subspace.span(n, second_legs)
    return v_space, w_space, v_space.dim == n and w_space.dim == n


def solve_counit(c: CoproductData) -> Counit:
    """
    The functional with (ε⊗ι)T1 = m and (ι⊗ε)T2 = m.

    Raises:
        NoCounit: If no such functional exists.
        NonUniqueCounit: If it is not unique.
    """
    n = c.n
    mult = c.parent.mult
    rows: Dict[Tuple[int, int, int], Dict[int, object]] = {}
    for row, col, v in c.T1.entries():
        i, r = divmod(row, n)
        rows.setdefault((0, r, col), {})[i] = v
    for row, col, v in c.T2.entries():
        r, j = divmod(row, n)
        rows.setdefault((1, r, col), {})[j] = v
    rhs = {(r, col): v for r, col, v in mult.entries()}
    keys = set(rows) | {(side, r, col) for (r, col) in rhs for side in (0, 1)}
    constraints = [(rows.get(key, {}), rhs.get(key[1:], ZERO)) for key in sorted(keys)]
    try:
        solution = solve_linear(constraints, n)
    except Infeasible:
        raise NoCounit("no functional satisfies both counit identities")
    if not solution.unique:
        raise NonUniqueCounit(f"counit is not unique ({solution.space.dim} free directions)")
    return Counit(c.parent, solution.particular)


def _left_annihilator(t: Matrix) -> Matrix:
    _, _, kernel = rank_image_kernel(t.transpose())
    return kernel.echelon


def compute_E(c: CoproductData, malg: MultiplierAlgebra, verify: bool = True) -> CanonicalIdempotent:
    """
    The canonical idempotent, solved in M(A)⊗M(A) coordinates.

    Its left action fixes Ran T1 pointwise and maps into Ran T1; its right
    action does the same for Ran T2.

    Raises:
        NoSuchIdempotent: If no multiplier has these actions.
        AmbiguousE: If the actions do not determine it.
        NotIdempotent: If verify is set and E² != E.
    """
    d = malg.dim
    _, ran1, _ = rank_image_kernel(c.T1)
    _, ran2, _ = rank_image_kernel(c.T2)
    tb1, tb2 = ran1.as_columns(), ran2.as_columns()
    ann1, ann2 = _left_annihilator(c.T1), _left_annihilator(c.T2)
    system: Dict[int, Dict[int, object]] = {}
    sizes = None
    for k in range(d):
        for l in range(d):
            col = k * d + l
            lam = malg.basis[k].left.kron(malg.basis[l].left)
            rho = malg.basis[k].right.kron(malg.basis[l].right)
            offset = 0
            blocks = (lam @ tb1, ann1 @ lam, rho @ tb2, ann2 @ rho)
            for block in blocks:
                for idx, v in block.flat_entries(offset):
                    system.setdefault(idx, {})[col] = v
                offset += block.rows * block.cols
            sizes = [block.rows * block.cols for block in blocks]
    total = sum(sizes) if sizes else 0
    rhs: Dict[int, Dict[int, object]] = {}
    for idx, v in tb1.flat_entries(0):
        rhs.setdefault(idx, {})[0] = v
    if sizes:
        for idx, v in tb2.flat_entries(sizes[0] + sizes[1]):
            rhs.setdefault(idx, {})[0] = v
    logger.debug("solving E: %d equations in %d unknowns", total, d * d)
    try:
        solution, kernel = solve_matrix(Matrix.from_dod(total, d * d, system), Matrix.from_dod(total, 1, rhs))
    except Infeasible:
        raise NoSuchIdempotent("no multiplier projects onto Ran T1 and Ran T2")
    if kernel.dim:
        raise AmbiguousE(f"E is not determined ({kernel.dim} free directions)")
    coeffs = Matrix.from_entries(d, d, ((idx // d, idx % d, v) for idx, v in solution.column(0).items()))
    E = CanonicalIdempotent.from_tensor(TensorMultiplier(malg, coeffs))
    if verify:
        check_idempotent(E)
    return E


def check_idempotent(E: CanonicalIdempotent) -> None:
    if E.left @ E.left != E.left or E.right @ E.right != E.right:
        raise NotIdempotent("E² != E")


# Extension of Δ to multipliers


class DeltaExtension:
    """
    Δ̃ on M(A): Δ̃(m)x = Σ T1(m a_i ⊗ b_i) where Ex = Σ T1(a_i⊗b_i), and the
    mirrored formula through T2 for the right action.
    """

    def __init__(self, c: CoproductData, E: CanonicalIdempotent, crosscheck: bool = True):
        self.c = c
        self.E = E
        try:
            self.Y, kernel1 = solve_matrix(c.T1, E.left)
            self.Z, kernel2 = solve_matrix(c.T2, E.right)
        except Infeasible:
            raise IllDefinedExtension("E(A⊗A) is not inside the range of the canonical maps")
        self.Y_alt = self._shifted(self.Y, kernel1) if crosscheck else None
        self.Z_alt = self._shifted(self.Z, kernel2) if crosscheck else None

    @staticmethod
    def _shifted(preimage: Matrix, kernel: Subspace) -> Optional[Matrix]:
        if not kernel.dim:
            return None
        shift: Vector = {}
        for vec in kernel.basis():
            for k, v in vec.items():
                shift[k] = shift.get(k, ZERO) + v
        shift = {k: v for k, v in shift.items() if v}
        return preimage + Matrix.from_columns(preimage.rows, [shift] * preimage.cols)

    def left(self, m_left: Matrix) -> Matrix:
        base = self.c.T1 @ m_left.kron(identity(self.c.n))
        result = base @ self.Y
        if self.Y_alt is not None and base @ self.Y_alt != result:
            raise IllDefinedExtension("two preimages give different left actions")
        return result

    def right(self, m_right: Matrix) -> Matrix:
        base = self.c.T2 @ identity(self.c.n).kron(m_right)
        result = base @ self.Z
        if self.Z_alt is not None and base @ self.Z_alt != result:
            raise IllDefinedExtension("two preimages give different right actions")
        return result

    def extend(self, m: Multiplier) -> Multiplier:
        return Multiplier(self.c.square, self.left(m.left), self.right(m.right))

    # (Δ⊗ι) and (ι⊗Δ) on a multiplier M of A⊗A, as actions on A⊗A⊗A

    def delta_iota(self, m_left: Matrix, m_right: Matrix) -> Tuple[Matrix, Matrix]:
        eye = identity(self.c.n)
        s = swap23(self.c.n)
        left = self.c.T1.kron(eye) @ s @ m_left.kron(eye) @ s @ self.Y.kron(eye)
        right = self.c.T2.kron(eye) @ eye.kron(m_right) @ self.Z.kron(eye)
        return left, right

    def iota_delta(self, m_left: Matrix, m_right: Matrix) -> Tuple[Matrix, Matrix]:
        eye = identity(self.c.n)
        s = swap23(self.c.n)
        left = eye.kron(self.c.T1) @ m_left.kron(eye) @ eye.kron(self.Y)
        right = eye.kron(self.c.T2) @ s @ m_right.kron(eye) @ s @ eye.kron(self.Z)
        return left, right


def extend_delta(c: CoproductData, E: CanonicalIdempotent, m: Multiplier) -> Multiplier:
    return DeltaExtension(c, E).extend(m)


def delta13_action(c: CoproductData, a: Vector, b: Vector, x: Vector) -> Vector:
    """Δ13(a)(1⊗b⊗x) as a vector of A⊗A⊗A."""
    return c.d13.apply(tensor_vector(a, b, x, dim=c.n))


def delta13_right_action(c: CoproductData, y: Vector, b: Vector, a: Vector) -> Vector:
    """(y⊗b⊗1)Δ13(a) as a vector of A⊗A⊗A."""
    return c.d13_right.apply(tensor_vector(y, b, a, dim=c.n))


def check_delta_extension(c: CoproductData, E: CanonicalIdempotent, ext: DeltaExtension) -> Diagnostics:
    unit = Multiplier.identity(c.parent)
    pairs = [("Δ(1) left = E", ext.left(unit.left), E.left), ("Δ(1) right = E", ext.right(unit.right), E.right)]
    for x in range(c.n):
        pairs.append((f"Δ({c.parent.labels[x]}) left", ext.left(c.parent.left_ops[x]), c.left_delta[x]))
        pairs.append((f"Δ({c.parent.labels[x]}) right", ext.right(c.parent.right_ops[x]), c.right_delta[x]))
    return [compare("prop-1.8", pairs, refs=["E"], row_label=c.label, col_label=c.label)]


def check_E_absorbs(c: CoproductData, E: CanonicalIdempotent) -> Diagnostics:
    pairs = []
    for x in range(c.n):
        lam, rho = c.left_delta[x], c.right_delta[x]
        name = c.parent.labels[x]
        pairs.extend(
            [
                (f"EΔ({name})", E.left @ lam, lam),
                (f"Δ({name})E", lam @ E.left, lam),
                (f"x·EΔ({name})", rho @ E.right, rho),
                (f"x·Δ({name})E", E.right @ rho, rho),
            ]
        )
    return [compare("prop-1.6", pairs, refs=["E"], row_label=c.label, col_label=c.label)]


def check_E_conditions(c: CoproductData, E: CanonicalIdempotent, ext: DeltaExtension) -> Diagnostics:
    eye = identity(c.n)
    e1_left, e1_right = E.left.kron(eye), E.right.kron(eye)
    e2_left, e2_right = eye.kron(E.left), eye.kron(E.right)
    both_left = e1_left @ e2_left
    both_right = e2_right @ e1_right
    results = [
        compare(
            "ass-1.10",
            [
                ("(E⊗1)(1⊗E) left", both_left, e2_left @ e1_left),
                ("(E⊗1)(1⊗E) right", both_right, e1_right @ e2_right),
            ],
            row_label=c.label3,
            col_label=c.label3,
        )
    ]
    di_left, di_right = ext.delta_iota(E.left, E.right)
    id_left, id_right = ext.iota_delta(E.left, E.right)
    results.append(
        compare(
            "def-1.14-ii",
            [
                ("(Δ⊗ι)E left", di_left, both_left),
                ("(ι⊗Δ)E left", id_left, both_left),
                ("(Δ⊗ι)E right", di_right, both_right),
                ("(ι⊗Δ)E right", id_right, both_right),
            ],
            row_label=c.label3,
            col_label=c.label3,
        )
    )
    # P ≤ Q means PQ = QP = P; right actions of products compose in reverse
    results.append(
        compare(
            "prop-1.9",
            [
                ("(Δ⊗ι)E (E⊗1)", di_left @ e1_left, di_left),
                ("(E⊗1)(Δ⊗ι)E", e1_left @ di_left, di_left),
                ("(Δ⊗ι)E (1⊗E)", di_left @ e2_left, di_left),
                ("(1⊗E)(Δ⊗ι)E", e2_left @ di_left, di_left),
                ("right (Δ⊗ι)E (E⊗1)", e1_right @ di_right, di_right),
                ("right (E⊗1)(Δ⊗ι)E", di_right @ e1_right, di_right),
                ("right (Δ⊗ι)E (1⊗E)", e2_right @ di_right, di_right),
                ("right (1⊗E)(Δ⊗ι)E", di_right @ e2_right, di_right),
            ],
            row_label=c.label3,
            col_label=c.label3,
        )
    )
    return results


# Projection maps


def _solve_g1(c: CoproductData, E: CanonicalIdempotent) -> Matrix:
    n, n2 = c.n, c.n ** 2
    coef: Dict[int, Dict[int, object]] = {}
    for row, col, v in c.T1.entries():
        i, j = divmod(row, n)
        coef.setdefault(j * n2 + col, {})[i] = v
    b = c.d13 @ identity(n).kron(E.left)
    rhs: Dict[int, Dict[int, object]] = {}
    for row, col, v in b.entries():
        p, q, j = unflatten(row, n, 3)
        a, bb, cc = unflatten(col, n, 3)
        rhs.setdefault(j * n2 + a * n + cc, {})[p * n2 + q * n + bb] = v
    x = _solve_structured(Matrix.from_dod(n ** 3, n, coef), Matrix.from_dod(n ** 3, n ** 3, rhs), "G1")
    entries = []
    for i, col, v in x.entries():
        p, q, bb = unflatten(col, n, 3)
        entries.append((p * n + q, i * n + bb, v))
    return Matrix.from_entries(n2, n2, entries)


def _solve_g2(c: CoproductData, E: CanonicalIdempotent) -> Matrix:
    n, n2 = c.n, c.n ** 2
    coef: Dict[int, Dict[int, object]] = {}
    for row, col, v in c.T2.entries():
        i, j = divmod(row, n)
        coef.setdefault(i * n2 + col, {})[j] = v
    b = c.d13_right @ E.right.kron(identity(n))
    rhs: Dict[int, Dict[int, object]] = {}
    for row, col, v in b.entries():
        i, p, q = unflatten(row, n, 3)
        a, bb, cc = unflatten(col, n, 3)
        rhs.setdefault(i * n2 + a * n + cc, {})[p * n2 + q * n + bb] = v
    x = _solve_structured(Matrix.from_dod(n ** 3, n, coef), Matrix.from_dod(n ** 3, n ** 3, rhs), "G2")
    entries = []
    for j, col, v in x.entries():
        p, q, bb = unflatten(col, n, 3)
        entries.append((p * n + q, bb * n + j, v))
    return Matrix.from_entries(n2, n2, entries)


def _solve_structured(coef: Matrix, rhs: Matrix, name: str) -> Matrix:
    try:
        solution, kernel = solve_matrix(coef, rhs)
    except Infeasible:
        raise NoSolution(f"the defining equalities of {name} have no solution")
    if kernel.dim:
        raise AmbiguousSolution(f"{name} is not determined ({kernel.dim} free directions); the coproduct is not full")
    return solution


def _constructive_g1(c: CoproductData, E: CanonicalIdempotent, eps: Counit) -> Matrix:
    # (b⊗c)G(a) = Σ b a(1) ⊗ (ι⊗ε)((c⊗a(2))E) and G1(a⊗q) = G(a)(1⊗q)
    n, n2 = c.n, c.n ** 2
    a = c.parent
    eye = identity(n)
    gg = kron(eye, eye, eps.row) @ eye.kron(E.right) @ c.d13_right
    stacked = _stack([a.left_ops[b].kron(a.left_ops[k]) for b in range(n) for k in range(n)])
    rhs: Dict[int, Dict[int, object]] = {}
    for q in range(n):
        for r, col, v in (eye.kron(a.right_ops[q]) @ gg).entries():
            b, k, x = unflatten(col, n, 3)
            rhs.setdefault((b * n + k) * n2 + r, {})[x * n + q] = v
    return _solve_crosscheck(stacked, Matrix.from_dod(n2 * n2, n2, rhs), "G1")


def _constructive_g2(c: CoproductData, E: CanonicalIdempotent, eps: Counit) -> Matrix:
    # G'(a)(b⊗c) = Σ (ε⊗ι)(E(a(1)⊗b)) ⊗ a(2)c and G2(p⊗a) = (p⊗1)G'(a)
    n, n2 = c.n, c.n ** 2
    a = c.parent
    eye = identity(n)
    hh = kron(eps.row, eye, eye) @ E.left.kron(eye) @ c.d13
    stacked = _stack([a.right_ops[b].kron(a.right_ops[k]) for b in range(n) for k in range(n)])
    rhs: Dict[int, Dict[int, object]] = {}
    for p in range(n):
        for r, col, v in (a.left_ops[p].kron(eye) @ hh).entries():
            x, b, k = unflatten(col, n, 3)
            rhs.setdefault((b * n + k) * n2 + r, {})[p * n + x] = v
    return _solve_crosscheck(stacked, Matrix.from_dod(n2 * n2, n2, rhs), "G2")


def _solve_crosscheck(stacked: Matrix, rhs: Matrix, name: str) -> Matrix:
    try:
        solution, kernel = solve_matrix(stacked, rhs)
    except Infeasible:
        raise CrossCheckMismatch(f"the constructive formula for {name} does not factor through A⊗A")
    if kernel.dim:
        raise CrossCheckMismatch(f"the constructive formula for {name} is not determined")
    return solution


def solve_G_maps(
    c: CoproductData, E: CanonicalIdempotent, eps: Counit, crosscheck: bool = True
) -> ProjectionMaps:
    """
    G1, G2 from their defining equalities, optionally checked against the
    constructive formula through the counit.

    Raises:
        NoSolution: If the defining system is infeasible.
        AmbiguousSolution: If it is underdetermined.
        CrossCheckMismatch: If the two constructions disagree.
    """
    g1 = _solve_g1(c, E)
    g2 = _solve_g2(c, E)
    if crosscheck:
        if _constructive_g1(c, E, eps) != g1:
            raise CrossCheckMismatch("G1 from the defining equalities differs from the constructive G1")
        if _constructive_g2(c, E, eps) != g2:
            raise CrossCheckMismatch("G2 from the defining equalities differs from the constructive G2")
    return ProjectionMaps(g1, g2)


def check_projection_laws(c: CoproductData, g: ProjectionMaps) -> Diagnostics:
    n = c.n
    eye = identity(n)
    a = c.parent
    pairs = [
        ("G1² = G1", g.G1 @ g.G1, g.G1),
        ("G2² = G2", g.G2 @ g.G2, g.G2),
        ("T1G1 = T1", c.T1 @ g.G1, c.T1),
        ("T2G2 = T2", c.T2 @ g.G2, c.T2),
    ]
    for x in range(n):
        pairs.append((f"G1 module at {a.labels[x]}", g.G1 @ eye.kron(a.right_ops[x]), eye.kron(a.right_ops[x]) @ g.G1))
        pairs.append((f"G2 module at {a.labels[x]}", g.G2 @ a.left_ops[x].kron(eye), a.left_ops[x].kron(eye) @ g.G2))
    commute = [
        ("(T2⊗ι)(ι⊗G1)", c.T2.kron(eye) @ eye.kron(g.G1), eye.kron(g.G1) @ c.T2.kron(eye)),
        ("(G2⊗ι)(ι⊗T1)", g.G2.kron(eye) @ eye.kron(c.T1), eye.kron(c.T1) @ g.G2.kron(eye)),
    ]
    return [
        compare("prop-1.13", pairs, refs=["G1", "G2"], row_label=c.label, col_label=c.label),
        compare("prop-2.2-G", commute, refs=["G1", "G2"], row_label=c.label3, col_label=c.label3),
    ]


def check_kernels(c: CoproductData, g: ProjectionMaps) -> Diagnostics:
    n2 = c.n ** 2
    eye = Matrix.identity(n2)
    details = []
    ok = True
    for name, t, gmap in (("T1", c.T1, g.G1), ("T2", c.T2, g.G2)):
        _, _, kernel = rank_image_kernel(t)
        complement = Subspace.column_space(eye - gmap)
        contained = (t @ (eye - gmap)).is_zero()
        equal = kernel == complement
        details.append(
            f"Ker {name}: dim {kernel.dim}, (1-G)(A⊗A): dim {complement.dim}, "
            f"contained {'yes' if contained else 'no'}, equal {'yes' if equal else 'no'}"
        )
        ok = ok and equal
    return [verdict("def-1.14-iii", ok, "; ".join(details), refs=["G1", "G2"])]


def factor_through_multipliers(malg: MultiplierAlgebra, g: Matrix) -> Optional[TensorMultiplier]:
    """
    F with G(a⊗b) = (a⊗1)F(1⊗b), i.e. G = Σ f_kl (ρ_k⊗λ_l), if one exists.
    """
    d = malg.dim
    system: Dict[int, Dict[int, object]] = {}
    for k in range(d):
        for l in range(d):
            op = malg.basis[k].right.kron(malg.basis[l].left)
            for idx, v in op.flat_entries():
                system.setdefault(idx, {})[k * d + l] = v
    total = g.rows * g.cols
    rhs = {idx: {0: v} for idx, v in g.flat_entries()}
    try:
        solution, _ = solve_matrix(Matrix.from_dod(total, d * d, system), Matrix.from_dod(total, 1, rhs))
    except Infeasible:
        return None
    coeffs = Matrix.from_entries(d, d, ((idx // d, idx % d, v) for idx, v in solution.column(0).items()))
    return TensorMultiplier(malg, coeffs)


def factorization_operator(F: TensorMultiplier) -> Matrix:
    """a⊗b -> (a⊗1)F(1⊗b)."""
    basis = F.malg.basis
    n2 = F.malg.parent.dim ** 2
    return Matrix.sum(n2, n2, (basis[k].right.kron(basis[l].left).scale(v) for k, l, v in F.coeffs.entries()))


# Pipeline stage


@dataclass
class CoproductState:
    """Witnesses of the Def 1.14 stages, filled in as checks pass."""

    coproduct: CoproductData
    settings: Settings = dataclasses.field(default_factory=Settings)
    counit_input: Optional[Vector] = None
    malg: Optional[MultiplierAlgebra] = None
    fullness: Optional[Tuple[Subspace, Subspace, bool]] = None
    counit: Optional[Counit] = None
    E: Optional[CanonicalIdempotent] = None
    extension: Optional[DeltaExtension] = None
    G: Optional[ProjectionMaps] = None
    factors: Optional[Tuple[Optional[TensorMultiplier], Optional[TensorMultiplier]]] = None
    regular_coproduct: bool = False


def run_coproduct_checks(builder: ReportBuilder, state: CoproductState) -> None:
    """Run the Def 1.14 stages in order, recording results and witnesses."""
    run_structure_checks(builder, state)
    run_idempotent_checks(builder, state)


def run_structure_checks(builder: ReportBuilder, state: CoproductState) -> None:
    """Algebra, Def 1.1 axioms, regularity, fullness and the counit."""
    c = state.coproduct
    builder.add(validate_algebra(c.parent))
    if builder.guard_all(AXIOM_CHECKS + ("def-1.1-regular-t3", "def-1.1-regular-t4"), ALGEBRA_CHECKS):
        builder.add(validate_coproduct(c))
    if c.T3 is None or c.T4 is None:
        _derive_regular(builder, state)
    else:
        state.regular_coproduct = builder.ok("def-1.1-regular-t3", "def-1.1-regular-t4")
    c = state.coproduct

    def fullness() -> CheckResult:
        state.fullness = check_fullness(c)
        v_space, w_space, full = state.fullness
        if not full:
            logger.warning("coproduct is not full: dim V = %d, dim W = %d", v_space.dim, w_space.dim)
        return verdict("def-1.4-full", full, f"dim V = {v_space.dim}, dim W = {w_space.dim} of {c.n}")

    builder.run("def-1.4-full", fullness, AXIOM_CHECKS)

    def counit() -> CheckResult:
        try:
            state.counit = solve_counit(c)
        except NonUniqueCounit as exc:
            if builder.ok("def-1.4-full"):
                raise
            raise NonUniqueCounit(f"{exc}; the coproduct is not full") from exc
        builder.witnesses["counit"] = vector_to_json(state.counit.functional, c.n)
        return passed("def-1.3-counit", "unique solution", ["counit"])

    builder.run("def-1.3-counit", counit, AXIOM_CHECKS)
    if state.counit_input is not None:
        builder.run(
            "def-1.3-counit-input",
            lambda: verdict(
                "def-1.3-counit-input",
                state.counit_input == state.counit.functional,
                "supplied counit " + ("matches" if state.counit_input == state.counit.functional else "differs"),
            ),
            ("def-1.3-counit",),
        )


def run_idempotent_checks(builder: ReportBuilder, state: CoproductState) -> None:
    """E, the extension of Δ, the G maps and the kernel condition."""
    c = state.coproduct
    settings = state.settings

    def canonical_idempotent() -> CheckResult:
        state.malg = multiplier_algebra(c.parent)
        state.E = compute_E(c, state.malg, verify=False)
        builder.witnesses["E"] = {
            "coefficients": matrix_to_json(state.E.tensor.coeffs),
            "left": matrix_to_json(state.E.left),
            "right": matrix_to_json(state.E.right),
            "rank": state.E.rank,
        }
        return passed("ass-1.5-E", f"left action rank {state.E.rank} of {c.n ** 2}", ["E"])

    builder.run("ass-1.5-E", canonical_idempotent, AXIOM_CHECKS)
    builder.run(
        "ass-1.5-idempotent",
        lambda: compare(
            "ass-1.5-idempotent",
            [("E² left", state.E.left @ state.E.left, state.E.left), ("E² right", state.E.right @ state.E.right, state.E.right)],
            refs=["E"],
        ),
        ("ass-1.5-E",),
    )
    builder.run("prop-1.6", lambda: check_E_absorbs(c, state.E), ("ass-1.5-E",))

    def extension() -> Diagnostics:
        state.extension = DeltaExtension(c, state.E, settings.crosscheck)
        return check_delta_extension(c, state.E, state.extension)

    builder.run("prop-1.8", extension, ("ass-1.5-E",))
    if builder.guard_all(("ass-1.10", "def-1.14-ii", "prop-1.9"), ("prop-1.8", "ass-1.5-idempotent")):
        try:
            builder.add(check_E_conditions(c, state.E, state.extension))
        except IllDefinedExtension as exc:
            builder.add(failed("def-1.14-ii", f"IllDefinedExtension: {exc}"))
            builder.skip("prop-1.9", "requires def-1.14-ii")

    def g_maps() -> CheckResult:
        state.G = solve_G_maps(c, state.E, state.counit, crosscheck=False)
        builder.witnesses["G1"] = matrix_to_json(state.G.G1)
        builder.witnesses["G2"] = matrix_to_json(state.G.G2)
        return passed("prop-1.11", "unique solution of the defining equalities", ["G1", "G2"])

    builder.run("prop-1.11", g_maps, ("def-1.3-counit", "def-1.4-full", "ass-1.5-idempotent"))
    if settings.crosscheck:

        def crosscheck() -> CheckResult:
            agree = (
                _constructive_g1(c, state.E, state.counit) == state.G.G1
                and _constructive_g2(c, state.E, state.counit) == state.G.G2
            )
            return verdict("prop-1.11-crosscheck", agree, "constructive formula through ε", ["G1", "G2"])

        builder.run("prop-1.11-crosscheck", crosscheck, ("prop-1.11",))
    else:
        builder.skip("prop-1.11-crosscheck", "cross-checks disabled")
    if builder.guard_all(("prop-1.13", "prop-2.2-G"), ("prop-1.11",)):
        builder.add(check_projection_laws(c, state.G))
    builder.run("def-1.14-iii", lambda: check_kernels(c, state.G), ("prop-1.11",))

    def factorization() -> CheckResult:
        state.factors = (
            factor_through_multipliers(state.malg, state.G.G1),
            factor_through_multipliers(state.malg, state.G.G2),
        )
        found = all(f is not None for f in state.factors)
        return passed("rem-1.12", "factorizable" if found else "not-factorizable")

    builder.run("rem-1.12", factorization, ("prop-1.11",))


def _derive_regular(builder: ReportBuilder, state: CoproductState) -> None:
    if not builder.ok(*AXIOM_CHECKS):
        return
    try:
        state.coproduct = derive_regular_maps(state.coproduct)
    except (NoSolution, AmbiguousSolution) as exc:
        logger.warning("%s", exc)
        state.regular_coproduct = False
        return
    state.regular_coproduct = True
    logger.info("T3 and T4 derived by cancellation")
    builder.add(passed("def-1.1-regular-t3", "derived from T2 by cancellation"))
    builder.add(passed("def-1.1-regular-t4", "derived from T1 by cancellation"))


def verify_wmha(c: CoproductData, settings: Optional[Settings] = None) -> VerificationReport:
    """Run the Def 1.14 pipeline on a presentation and return its report."""
    builder = ReportBuilder()
    run_coproduct_checks(builder, CoproductState(c, settings or Settings()))
    return VerificationReport.from_builder(builder, paths=["def114"])
