"""
Finite-dimensional algebras given by structure constants, their elements,
multipliers, tensor products, opposites and star structures.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import DegenerateProduct, DimensionMismatch, Infeasible, ParentMismatch
from .exactla import (
    ONE,
    ZERO,
    Matrix,
    Subspace,
    Vector,
    conjugate,
    solve_linear,
    solve_matrix,
    to_scalar,
)
from .legs import flip
from .report import Diagnostics, compare, failed, passed, verdict

logger = logging.getLogger(__name__)


class Algebra:
    """
    An algebra with basis e_0..e_{n-1} and e_i·e_j = Σ_k m[i][j][k] e_k.

    Args:
        dim (int): Dimension n.
        products (Dict[Tuple[int, int], Vector]): e_i·e_j for the pairs with a
            nonzero product.
        labels (Optional[Sequence[str]]): Basis labels, "e0".. by default.
        name (str): Free-form description used in logs.
    """

    def __init__(
        self,
        dim: int,
        products: Dict[Tuple[int, int], Vector],
        labels: Optional[Sequence[str]] = None,
        name: str = "",
    ):
        if labels is not None and len(labels) != dim:
            raise DimensionMismatch(f"{len(labels)} labels for dimension {dim}")
        self.dim = dim
        self.labels = list(labels) if labels is not None else [f"e{i}" for i in range(dim)]
        self.name = name
        self._products: Dict[Tuple[int, int], Vector] = {}
        for (i, j), vec in products.items():
            if not (0 <= i < dim and 0 <= j < dim) or any(not 0 <= k < dim for k in vec):
                raise DimensionMismatch(f"structure constant outside dimension {dim}")
            kept = {k: to_scalar(v) for k, v in vec.items() if to_scalar(v)}
            if kept:
                self._products[(i, j)] = kept

    @classmethod
    def from_structure(
        cls,
        dim: int,
        entries: Iterable[Tuple[int, int, int, Any]],
        labels: Optional[Sequence[str]] = None,
        name: str = "",
    ) -> "Algebra":
        """Build from sparse (i, j, k, value) structure constants; repeats add up."""
        products: Dict[Tuple[int, int], Vector] = {}
        for i, j, k, value in entries:
            vec = products.setdefault((i, j), {})
            vec[k] = vec.get(k, ZERO) + to_scalar(value)
        return cls(dim, products, labels, name)

    def product(self, i: int, j: int) -> Vector:
        return dict(self._products.get((i, j), {}))

    def structure_entries(self) -> List[Tuple[int, int, int, Any]]:
        return [
            (i, j, k, v)
            for (i, j) in sorted(self._products)
            for k, v in sorted(self._products[(i, j)].items())
        ]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Algebra):
            return NotImplemented
        return self.dim == other.dim and self._products == other._products

    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return f"Algebra(dim={self.dim}, name={self.name!r})"

    @cached_property
    def mult(self) -> Matrix:
        """The product as a map A⊗A -> A (n x n²)."""
        n = self.dim
        return Matrix.from_entries(
            n, n * n, ((k, i * n + j, v) for (i, j), vec in self._products.items() for k, v in vec.items())
        )

    @cached_property
    def left_ops(self) -> List[Matrix]:
        """L_i with column j equal to e_i·e_j."""
        n = self.dim
        cols: List[Dict[int, Dict[int, Any]]] = [{} for _ in range(n)]
        for (i, j), vec in self._products.items():
            for k, v in vec.items():
                cols[i].setdefault(k, {})[j] = v
        return [Matrix.from_dod(n, n, dod) for dod in cols]

    @cached_property
    def right_ops(self) -> List[Matrix]:
        """R_j with column i equal to e_i·e_j."""
        n = self.dim
        cols: List[Dict[int, Dict[int, Any]]] = [{} for _ in range(n)]
        for (i, j), vec in self._products.items():
            for k, v in vec.items():
                cols[j].setdefault(k, {})[i] = v
        return [Matrix.from_dod(n, n, dod) for dod in cols]

    def left_operator(self, vector: Vector) -> Matrix:
        n = self.dim
        return Matrix.sum(n, n, (self.left_ops[i].scale(c) for i, c in vector.items()))

    def right_operator(self, vector: Vector) -> Matrix:
        n = self.dim
        return Matrix.sum(n, n, (self.right_ops[i].scale(c) for i, c in vector.items()))

    def multiply_vectors(self, x: Vector, y: Vector) -> Vector:
        out: Vector = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self._products.get((i, j), {}).items():
                    value = out.get(k, ZERO) + a * b * c
                    if value:
                        out[k] = value
                    else:
                        out.pop(k, None)
        return out

    def element(self, coeffs: Any) -> "Element":
        if not isinstance(coeffs, dict):
            if len(coeffs) != self.dim:
                raise DimensionMismatch(f"{len(coeffs)} coefficients for dimension {self.dim}")
            coeffs = dict(enumerate(coeffs))
        return Element(self, {i: to_scalar(v) for i, v in coeffs.items() if to_scalar(v)})

    def basis_element(self, i: int) -> "Element":
        return Element(self, {i: ONE})

    @cached_property
    def associativity_defect(self) -> Optional[Tuple[int, int, int]]:
        """First basis triple (i, j, k) with (e_i e_j) e_k != e_i (e_j e_k)."""
        for i in range(self.dim):
            for j in range(self.dim):
                left_first = self.product(i, j)
                for k in range(self.dim):
                    lhs = self.multiply_vectors(left_first, {k: ONE})
                    rhs = self.multiply_vectors({i: ONE}, self.product(j, k))
                    if lhs != rhs:
                        return i, j, k
        return None

    @property
    def is_associative(self) -> bool:
        return self.associativity_defect is None

    @cached_property
    def is_nondegenerate(self) -> bool:
        n = self.dim
        if n == 0:
            return True
        stacked_left = self.left_ops[0].vstack(*self.left_ops[1:])
        stacked_right = self.right_ops[0].vstack(*self.right_ops[1:])
        # xA = 0 means R_b x = 0 for all b; Ax = 0 means L_b x = 0 for all b
        return stacked_right.rank() == n and stacked_left.rank() == n

    @cached_property
    def unit(self) -> Optional[Vector]:
        return _solve_unit(self)


@dataclass(frozen=True, eq=False)
class Element:
    parent: Algebra
    coeffs: Vector

    def __post_init__(self):
        if any(not 0 <= i < self.parent.dim for i in self.coeffs):
            raise DimensionMismatch("coefficient index outside the algebra")

    def __mul__(self, other: "Element") -> "Element":
        return multiply(self, other)

    def __add__(self, other: "Element") -> "Element":
        _same_parent(self.parent, other.parent)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            value = out.get(k, ZERO) + v
            if value:
                out[k] = value
            else:
                out.pop(k, None)
        return Element(self.parent, out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.parent == other.parent and self.coeffs == other.coeffs

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.coeffs


def _same_parent(a: Algebra, b: Algebra) -> None:
    if a is not b and a != b:
        raise ParentMismatch("elements of different algebras")


def multiply(x: Element, y: Element) -> Element:
    _same_parent(x.parent, y.parent)
    return Element(x.parent, x.parent.multiply_vectors(x.coeffs, y.coeffs))


def mult_operator_left(x: Element) -> Matrix:
    """The matrix of a -> x·a."""
    return x.parent.left_operator(x.coeffs)


def mult_operator_right(x: Element) -> Matrix:
    """The matrix of a -> a·x."""
    return x.parent.right_operator(x.coeffs)


def _solve_unit(a: Algebra) -> Optional[Vector]:
    # u·e_j = e_j and e_j·u = e_j: Σ_i u_i L_i = I and Σ_i u_i R_i = I
    n = a.dim
    constraints = []
    for ops in (a.left_ops, a.right_ops):
        rows: Dict[Tuple[int, int], Dict[int, Any]] = {}
        for i, op in enumerate(ops):
            for r, c, v in op.entries():
                rows.setdefault((r, c), {})[i] = v
        for r in range(n):
            for c in range(n):
                rhs = ONE if r == c else ZERO
                coeffs = rows.get((r, c), {})
                if coeffs or rhs:
                    constraints.append((coeffs, rhs))
    try:
        solution = solve_linear(constraints, n)
    except Infeasible:
        return None
    return solution.particular


def find_unit_or_local_units(a: Algebra) -> Optional[Element]:
    """
    The unit of a, or None. In finite dimensions a has local units exactly
    when it has a unit.
    """
    unit = a.unit
    if unit is None:
        return None
    return Element(a, dict(unit))


def validate_algebra(a: Algebra) -> Diagnostics:
    results: Diagnostics = []
    defect = a.associativity_defect
    if defect is None:
        results.append(passed("alg-associative", f"all {a.dim ** 3} basis triples"))
    else:
        i, j, k = defect
        results.append(
            failed(
                "alg-associative",
                f"(e_i e_j) e_k != e_i (e_j e_k) at ({a.labels[i]}, {a.labels[j]}, {a.labels[k]})",
                {"triple": f"({a.labels[i]}, {a.labels[j]}, {a.labels[k]})"},
            )
        )
    results.append(
        verdict("alg-nondegenerate", a.is_nondegenerate, "no nonzero m with mA = 0 or Am = 0")
    )
    rank = a.mult.rank() if a.dim else 0
    results.append(verdict("alg-idempotent", rank == a.dim, f"dim span(A·A) = {rank} of {a.dim}"))
    unit = a.unit
    if unit is not None:
        results[-1].detail += "; unital"
    return results


# Multipliers


@dataclass(frozen=True, eq=False)
class Multiplier:
    """A multiplier of `parent`, held as its left and right actions."""

    parent: Algebra
    left: Matrix
    right: Matrix

    @classmethod
    def identity(cls, parent: Algebra) -> "Multiplier":
        eye = Matrix.identity(parent.dim)
        return cls(parent, eye, eye)

    @classmethod
    def from_element(cls, x: Element) -> "Multiplier":
        return cls(x.parent, mult_operator_left(x), mult_operator_right(x))

    def __matmul__(self, other: "Multiplier") -> "Multiplier":
        _same_parent(self.parent, other.parent)
        return Multiplier(self.parent, self.left @ other.left, other.right @ self.right)

    def __add__(self, other: "Multiplier") -> "Multiplier":
        _same_parent(self.parent, other.parent)
        return Multiplier(self.parent, self.left + other.left, self.right + other.right)

    def scale(self, factor: Any) -> "Multiplier":
        return Multiplier(self.parent, self.left.scale(factor), self.right.scale(factor))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multiplier):
            return NotImplemented
        return self.left == other.left and self.right == other.right

    __hash__ = None

    def compatibility_defect(self) -> Optional[str]:
        """Name the first violated multiplier identity on basis pairs, if any."""
        a = self.parent
        for i in range(a.dim):
            for j in range(a.dim):
                ij = a.product(i, j)
                if self.left.apply(ij) != a.multiply_vectors(self.left.column(i), {j: ONE}):
                    return f"m(e{i}e{j}) != m(e{i})e{j}"
                if self.right.apply(ij) != a.multiply_vectors({i: ONE}, self.right.column(j)):
                    return f"(e{i}e{j})m != e{i}(e{j}m)"
                if a.multiply_vectors({i: ONE}, self.left.column(j)) != a.multiply_vectors(
                    self.right.column(i), {j: ONE}
                ):
                    return f"e{i}(m e{j}) != (e{i}m)e{j}"
        return None

    def as_element(self) -> Optional[Element]:
        """The element x with (L_x, R_x) equal to this multiplier, if any."""
        a = self.parent
        try:
            solution, _ = solve_matrix(_operator_frame(a), _vec_pair(self.left, self.right))
        except Infeasible:
            return None
        return Element(a, solution.column(0))


def _vec(m: Matrix, offset: int, out: Dict[int, Dict[int, Any]], col: int) -> None:
    for i, j, v in m.entries():
        out.setdefault(offset + i * m.cols + j, {})[col] = v


def _vec_pair(left: Matrix, right: Matrix) -> Matrix:
    n2 = left.rows * left.cols
    dod: Dict[int, Dict[int, Any]] = {}
    _vec(left, 0, dod, 0)
    _vec(right, n2, dod, 0)
    return Matrix.from_dod(2 * n2, 1, dod)


def _operator_frame(a: Algebra) -> Matrix:
    n = a.dim
    dod: Dict[int, Dict[int, Any]] = {}
    for k in range(n):
        _vec(a.left_ops[k], 0, dod, k)
        _vec(a.right_ops[k], n * n, dod, k)
    return Matrix.from_dod(2 * n * n, n, dod)


@dataclass(frozen=True, eq=False)
class MultiplierAlgebra:
    """
    M(A) with a chosen basis of multipliers. Coordinates are taken in this
    basis; when A is unital the basis is the embedded basis of A.
    """

    parent: Algebra
    basis: Tuple[Multiplier, ...]
    unital: bool

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def unit(self) -> Multiplier:
        return Multiplier.identity(self.parent)

    def embed(self, x: Element) -> Multiplier:
        _same_parent(self.parent, x.parent)
        return Multiplier.from_element(x)

    def multiplier(self, coords: Vector) -> Multiplier:
        n = self.parent.dim
        left = Matrix.sum(n, n, (self.basis[k].left.scale(c) for k, c in coords.items()))
        right = Matrix.sum(n, n, (self.basis[k].right.scale(c) for k, c in coords.items()))
        return Multiplier(self.parent, left, right)

    @cached_property
    def _frame(self) -> Matrix:
        n = self.parent.dim
        dod: Dict[int, Dict[int, Any]] = {}
        for k, m in enumerate(self.basis):
            _vec(m.left, 0, dod, k)
            _vec(m.right, n * n, dod, k)
        return Matrix.from_dod(2 * n * n, self.dim, dod)

    def coordinates(self, m: Multiplier) -> Vector:
        """
        Coordinates of m in the chosen basis.

        Raises:
            Infeasible: If m is not in M(A).
        """
        if self.unital:
            # m = m·1 and the basis is A itself
            unit = self.parent.unit
            coords = m.left.apply(unit)
            if self.multiplier(coords) != m:
                raise Infeasible("operator pair is not a multiplier")
            return coords
        solution, _ = solve_matrix(self._frame, _vec_pair(m.left, m.right))
        return solution.column(0)

    def product(self, x: Vector, y: Vector) -> Vector:
        return self.coordinates(self.multiplier(x) @ self.multiplier(y))

    def coordinate_map(self, fn) -> Matrix:
        """The d x d matrix of a linear map on M(A) given on basis multipliers."""
        return Matrix.from_columns(self.dim, [self.coordinates(fn(m)) for m in self.basis])


def _accumulate(row: Vector, index: int, value: Any) -> None:
    if not value:
        return
    total = row.get(index, ZERO) + value
    if total:
        row[index] = total
    else:
        row.pop(index, None)


def multiplier_algebra(a: Algebra) -> MultiplierAlgebra:
    """
    A basis of M(A).

    Raises:
        DegenerateProduct: If the product of a is degenerate.
    """
    if not a.is_nondegenerate:
        raise DegenerateProduct("M(A) needs a non-degenerate product")
    if a.unit is not None:
        basis = tuple(Multiplier.from_element(a.basis_element(i)) for i in range(a.dim))
        return MultiplierAlgebra(a, basis, True)
    n, n2 = a.dim, a.dim * a.dim
    # unknowns: left[r][c] at r*n + c, right[r][c] at n² + r*n + c
    constraints = []
    for i in range(n):
        for j in range(n):
            ij = a.product(i, j)
            for r in range(n):
                # left(e_i e_j) = left(e_i) e_j
                row: Vector = {}
                for k, v in ij.items():
                    _accumulate(row, r * n + k, v)
                for s in range(n):
                    _accumulate(row, s * n + i, -a.product(s, j).get(r, ZERO))
                constraints.append(row)
                # right(e_i e_j) = e_i right(e_j)
                row = {}
                for k, v in ij.items():
                    _accumulate(row, n2 + r * n + k, v)
                for s in range(n):
                    _accumulate(row, n2 + s * n + j, -a.product(i, s).get(r, ZERO))
                constraints.append(row)
                # e_i left(e_j) = right(e_i) e_j
                row = {}
                for s in range(n):
                    _accumulate(row, s * n + j, a.product(i, s).get(r, ZERO))
                    _accumulate(row, n2 + s * n + i, -a.product(s, j).get(r, ZERO))
                constraints.append(row)
    solution = solve_linear([(row, ZERO) for row in constraints if row], 2 * n2)
    basis = []
    for vec in solution.space.basis():
        left = Matrix.from_entries(n, n, ((k // n, k % n, v) for k, v in vec.items() if k < n2))
        right = Matrix.from_entries(
            n, n, (((k - n2) // n, (k - n2) % n, v) for k, v in vec.items() if k >= n2)
        )
        basis.append(Multiplier(a, left, right))
    logger.debug("non-unital M(A) of dimension %d over A of dimension %d", len(basis), n)
    return MultiplierAlgebra(a, tuple(basis), False)


class TensorMultiplier:
    """
    An element Σ c_kl m_k⊗m_l of M(A)⊗M(A), acting on A⊗A.
    """

    def __init__(self, malg: MultiplierAlgebra, coeffs: Matrix):
        if coeffs.shape != (malg.dim, malg.dim):
            raise DimensionMismatch(f"coefficients {coeffs.shape} for M(A) of dimension {malg.dim}")
        self.malg = malg
        self.coeffs = coeffs

    @cached_property
    def left(self) -> Matrix:
        basis = self.malg.basis
        n2 = self.malg.parent.dim ** 2
        return Matrix.sum(
            n2, n2, (basis[k].left.kron(basis[l].left).scale(v) for k, l, v in self.coeffs.entries())
        )

    @cached_property
    def right(self) -> Matrix:
        basis = self.malg.basis
        n2 = self.malg.parent.dim ** 2
        return Matrix.sum(
            n2, n2, (basis[k].right.kron(basis[l].right).scale(v) for k, l, v in self.coeffs.entries())
        )

    def map_legs(self, first: Matrix, second: Matrix) -> "TensorMultiplier":
        """(U⊗W) applied in coordinates: c -> U c W^T."""
        return TensorMultiplier(self.malg, first @ self.coeffs @ second.transpose())

    def flipped(self) -> "TensorMultiplier":
        return TensorMultiplier(self.malg, self.coeffs.transpose())

    def left_legs(self) -> Subspace:
        return Subspace.column_space(self.coeffs)

    def right_legs(self) -> Subspace:
        return Subspace.row_space(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorMultiplier):
            return NotImplemented
        return self.coeffs == other.coeffs

    __hash__ = None


# Constructions


def tensor_algebra(a: Algebra, b: Algebra) -> Algebra:
    """A⊗B with (i, j) -> i*dim(B) + j."""
    m = b.dim
    products: Dict[Tuple[int, int], Vector] = {}
    for (i, k), x in a._products.items():
        for (j, l), y in b._products.items():
            vec = {p * m + q: u * v for p, u in x.items() for q, v in y.items()}
            products[(i * m + j, k * m + l)] = vec
    labels = [f"{la}⊗{lb}" for la in a.labels for lb in b.labels]
    return Algebra(a.dim * m, products, labels, f"({a.name})⊗({b.name})")


def opposite(a: Algebra) -> Algebra:
    products = {(j, i): dict(vec) for (i, j), vec in a._products.items()}
    return Algebra(a.dim, products, a.labels, f"({a.name})^op")


def flip_map(dim: int) -> Matrix:
    return flip(dim)


# Star structures


@dataclass(frozen=True)
class StarStructure:
    """x* = J·conj(x) on coefficient vectors."""

    parent: Algebra
    star_matrix: Matrix

    def apply(self, x: Vector) -> Vector:
        return self.star_matrix.apply({k: conjugate(v) for k, v in x.items()})

    @property
    def tensor_matrix(self) -> Matrix:
        """The matrix K = J⊗J of the star on A⊗A."""
        return self.star_matrix.kron(self.star_matrix)


def validate_star(s: StarStructure, a: Algebra) -> Diagnostics:
    n = a.dim
    j = s.star_matrix
    if j.shape != (n, n):
        return [failed("star-valid", f"star matrix is {j.rows}x{j.cols}, algebra has dimension {n}")]
    # (e_a e_b)* = e_b* e_a* as maps A⊗A -> A: J conj(mult) = mult (J⊗J) σ
    lhs = j @ a.mult.conjugate()
    rhs = a.mult @ j.kron(j) @ flip(n)
    return [
        compare(
            "star-valid",
            [("involutive", j @ j.conjugate(), Matrix.identity(n)), ("anti-multiplicative", lhs, rhs)],
        )
    ]
