"""
Exact linear algebra over the Gaussian rationals Q(i).

Matrices are stored sparsely (sympy's SDM, zeros never stored) but behave as
dense grids: every entry is defined and equality is entry-wise. Vectors are
plain dicts {index: nonzero scalar}.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices.sdm import SDM

from .errors import BadProjections, CrossCheckMismatch, DimensionMismatch, Infeasible

logger = logging.getLogger(__name__)

FIELD = QQ_I
ZERO = FIELD.zero
ONE = FIELD.one

Scalar = Any
Vector = Dict[int, Scalar]

_RATIONAL = re.compile(r"^\s*-?[0-9]+(/[0-9]+)?\s*$")


# Scalars


def rational(value: Any):
    """
    Convert an int, Fraction, "p/q" string or sympy rational to a QQ element.

    Args:
        value (Any): The value to convert.

    Returns:
        The exact rational.

    Raises:
        ValueError: If a string is not a rational literal.
        TypeError: If the value has an unsupported type.
    """
    if isinstance(value, str):
        if not _RATIONAL.match(value):
            raise ValueError(f"expected a rational literal like \"3/4\", got {value!r}")
        try:
            frac = Fraction(value.strip())
        except ZeroDivisionError:
            raise ValueError("zero denominator")
        return QQ(frac.numerator, frac.denominator)
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    return QQ.convert(value)


def scalar(re: Any = 0, im: Any = 0) -> Scalar:
    """Build the Gaussian rational re + i*im."""
    if isinstance(re, FIELD.dtype) and im == 0:
        return re
    return FIELD(rational(re), rational(im))


def to_scalar(value: Any) -> Scalar:
    if isinstance(value, FIELD.dtype):
        return value
    return scalar(value)


def conjugate(value: Scalar) -> Scalar:
    return FIELD(value.x, -value.y)


def format_rational(q) -> str:
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def scalar_parts(value: Scalar) -> Tuple[str, str]:
    """Serialize a scalar as the pair of strings (re, im)."""
    return format_rational(value.x), format_rational(value.y)


def scalar_to_json(value: Scalar) -> Dict[str, str]:
    re, im = scalar_parts(value)
    return {"re": re, "im": im}


def format_scalar(value: Scalar) -> str:
    re, im = scalar_parts(value)
    if im == "0":
        return re
    if re == "0":
        return f"{im}*i"
    return f"{re}+{im}*i" if not im.startswith("-") else f"{re}{im}*i"


# Matrices


def _clean(dod: Dict[int, Dict[int, Scalar]]) -> Dict[int, Dict[int, Scalar]]:
    out = {}
    for i, row in dod.items():
        kept = {j: v for j, v in row.items() if v}
        if kept:
            out[i] = kept
    return out


class Matrix:
    """An immutable rows x cols matrix over Q(i)."""

    __slots__ = ("_rep",)

    def __init__(self, rep: SDM):
        self._rep = rep

    # construction

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(SDM({}, (rows, cols), FIELD))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(SDM({i: {i: ONE} for i in range(n)}, (n, n), FIELD))

    @classmethod
    def from_dod(cls, rows: int, cols: int, dod: Dict[int, Dict[int, Any]]) -> "Matrix":
        converted = {i: {j: to_scalar(v) for j, v in row.items()} for i, row in dod.items()}
        for i, row in converted.items():
            if not 0 <= i < rows or any(not 0 <= j < cols for j in row):
                raise DimensionMismatch(f"entry outside a {rows}x{cols} matrix in row {i}")
        return cls(SDM(_clean(converted), (rows, cols), FIELD))

    @classmethod
    def from_entries(
        cls, rows: int, cols: int, entries: Iterable[Tuple[int, int, Any]]
    ) -> "Matrix":
        """Build a matrix from (row, col, value) triples; repeated positions add up."""
        dod: Dict[int, Dict[int, Scalar]] = {}
        for i, j, v in entries:
            if not (0 <= i < rows and 0 <= j < cols):
                raise DimensionMismatch(f"entry ({i}, {j}) outside a {rows}x{cols} matrix")
            row = dod.setdefault(i, {})
            row[j] = row.get(j, ZERO) + to_scalar(v)
        return cls(SDM(_clean(dod), (rows, cols), FIELD))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]]) -> "Matrix":
        n_rows = len(rows)
        n_cols = len(rows[0]) if rows else 0
        if any(len(r) != n_cols for r in rows):
            raise DimensionMismatch("ragged rows")
        return cls.from_entries(
            n_rows, n_cols, ((i, j, v) for i, r in enumerate(rows) for j, v in enumerate(r))
        )

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Vector]) -> "Matrix":
        return cls.from_entries(
            rows, len(columns), ((i, j, v) for j, col in enumerate(columns) for i, v in col.items())
        )

    @classmethod
    def from_row_vectors(cls, cols: int, vectors: Sequence[Vector]) -> "Matrix":
        return cls.from_entries(
            len(vectors), cols, ((i, j, v) for i, vec in enumerate(vectors) for j, v in vec.items())
        )

    @classmethod
    def permutation(cls, images: Sequence[int]) -> "Matrix":
        """The matrix sending basis vector j to basis vector images[j]."""
        n = len(images)
        return cls(SDM(_permutation_dod(images), (n, n), FIELD))

    @classmethod
    def diagonal(cls, values: Sequence[Any]) -> "Matrix":
        n = len(values)
        return cls.from_entries(n, n, ((i, i, v) for i, v in enumerate(values)))

    @classmethod
    def sum(cls, rows: int, cols: int, terms: Iterable["Matrix"]) -> "Matrix":
        total = cls.zeros(rows, cols)
        for term in terms:
            total = total + term
        return total

    # inspection

    @property
    def rows(self) -> int:
        return self._rep.rows

    @property
    def cols(self) -> int:
        return self._rep.cols

    @property
    def shape(self) -> Tuple[int, int]:
        return self._rep.shape

    def entry(self, i: int, j: int) -> Scalar:
        return self._rep.get(i, {}).get(j, ZERO)

    def row(self, i: int) -> Vector:
        return dict(self._rep.get(i, {}))

    def column(self, j: int) -> Vector:
        return {i: row[j] for i, row in self._rep.items() if j in row}

    def columns(self) -> List[Vector]:
        cols: List[Vector] = [{} for _ in range(self.cols)]
        for i, row in self._rep.items():
            for j, v in row.items():
                cols[j][i] = v
        return cols

    def entries(self) -> List[Tuple[int, int, Scalar]]:
        """All nonzero entries in row-major order."""
        return [(i, j, self._rep[i][j]) for i in sorted(self._rep) for j in sorted(self._rep[i])]

    def flat_entries(self, offset: int = 0) -> List[Tuple[int, Scalar]]:
        """Nonzero entries of the row-major flattening, shifted by offset."""
        cols = self.cols
        return [(offset + i * cols + j, v) for i, row in self._rep.items() for j, v in row.items()]

    def nnz(self) -> int:
        return sum(len(row) for row in self._rep.values())

    def is_zero(self) -> bool:
        return not self._rep

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == Matrix.identity(self.rows)

    def to_dod(self) -> Dict[int, Dict[int, Scalar]]:
        return {i: dict(row) for i, row in self._rep.items()}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and dict(self._rep) == dict(other._rep)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, nnz={self.nnz()})"

    # arithmetic

    def _same_shape(self, other: "Matrix", op: str) -> None:
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot {op} {self.shape} and {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other, "add")
        return Matrix(self._rep.add(other._rep))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other, "subtract")
        return Matrix(self._rep.sub(other._rep))

    def __neg__(self) -> "Matrix":
        return Matrix(self._rep.neg())

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        return Matrix(self._rep.matmul(other._rep))

    def scale(self, factor: Any) -> "Matrix":
        factor = to_scalar(factor)
        if not factor:
            return Matrix.zeros(self.rows, self.cols)
        return Matrix(self._rep.mul(factor))

    def apply(self, vector: Vector) -> Vector:
        """Multiply the matrix with a sparse column vector."""
        out: Vector = {}
        keys = vector.keys()
        for i, row in self._rep.items():
            acc = ZERO
            for j in row.keys() & keys:
                acc += row[j] * vector[j]
            if acc:
                out[i] = acc
        return out

    def transpose(self) -> "Matrix":
        return Matrix(self._rep.transpose())

    def conjugate(self) -> "Matrix":
        dod = {i: {j: conjugate(v) for j, v in row.items()} for i, row in self._rep.items()}
        return Matrix(SDM(dod, self.shape, FIELD))

    def hstack(self, *others: "Matrix") -> "Matrix":
        for other in others:
            if other.rows != self.rows:
                raise DimensionMismatch("hstack needs equal row counts")
        if not others:
            return self
        return Matrix(self._rep.hstack(*(o._rep for o in others)))

    def vstack(self, *others: "Matrix") -> "Matrix":
        for other in others:
            if other.cols != self.cols:
                raise DimensionMismatch("vstack needs equal column counts")
        if not others:
            return self
        return Matrix(self._rep.vstack(*(o._rep for o in others)))

    def extract(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        col_pos = {c: k for k, c in enumerate(cols)}
        out = {}
        for new_i, i in enumerate(rows):
            src = self._rep.get(i)
            if not src:
                continue
            kept = {col_pos[c]: v for c, v in src.items() if c in col_pos}
            if kept:
                out[new_i] = kept
        return Matrix(SDM(out, (len(rows), len(cols)), FIELD))

    def kron(self, other: "Matrix") -> "Matrix":
        """Kronecker product, row-major: (i, k), (j, l) -> (i*p + k, j*q + l)."""
        p, q = other.shape
        out = {}
        for i, a_row in self._rep.items():
            for k, b_row in other._rep.items():
                row = {}
                for j, a in a_row.items():
                    base = j * q
                    for l, b in b_row.items():
                        row[base + l] = a * b
                out[i * p + k] = row
        return Matrix(SDM(out, (self.rows * p, self.cols * q), FIELD))

    def rref(self) -> Tuple["Matrix", List[int]]:
        """Reduced row echelon form (zero rows dropped) and pivot columns."""
        reduced, pivots = self._rep.rref()
        rank = len(pivots)
        dod = {i: dict(reduced[i]) for i in range(rank)}
        return Matrix(SDM(dod, (rank, self.cols), FIELD)), list(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def inverse(self) -> "Matrix":
        """
        Inverse of a square matrix.

        Raises:
            DimensionMismatch: If the matrix is not square.
            Infeasible: If the matrix is singular.
        """
        if self.rows != self.cols:
            raise DimensionMismatch(f"cannot invert a {self.rows}x{self.cols} matrix")
        solution, kernel = solve_matrix(self, Matrix.identity(self.rows))
        if kernel.dim:
            raise Infeasible("matrix is singular")
        return solution


def _permutation_dod(images: Sequence[int]) -> Dict[int, Dict[int, Scalar]]:
    if sorted(images) != list(range(len(images))):
        raise DimensionMismatch("not a permutation")
    return {target: {source: ONE} for source, target in enumerate(images)}


def first_difference(a: Matrix, b: Matrix) -> Optional[Tuple[int, int, Scalar, Scalar]]:
    """First entry (row-major) where two equally shaped matrices differ."""
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot compare {a.shape} with {b.shape}")
    da, db = a._rep, b._rep
    for i in sorted(set(da) | set(db)):
        ra, rb = da.get(i, {}), db.get(i, {})
        for j in sorted(set(ra) | set(rb)):
            x, y = ra.get(j, ZERO), rb.get(j, ZERO)
            if x != y:
                return i, j, x, y
    return None


def basis_vector(i: int) -> Vector:
    return {i: ONE}


def vector_add(u: Vector, v: Vector, factor: Any = ONE) -> Vector:
    out = dict(u)
    factor = to_scalar(factor)
    for k, x in v.items():
        y = out.get(k, ZERO) + factor * x
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return out


# Subspaces


@dataclass(frozen=True, eq=False)
class Subspace:
    """
    A subspace of Q(i)^n, held as the nonzero rows of a reduced row echelon
    form. The form is canonical, so equal subspaces compare equal.
    """

    ambient_dim: int
    echelon: Matrix

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Vector]) -> "Subspace":
        rows = [v for v in vectors if v]
        return cls.row_space(Matrix.from_row_vectors(ambient_dim, rows))

    @classmethod
    def row_space(cls, m: Matrix) -> "Subspace":
        reduced, _ = m.rref()
        return cls(m.cols, reduced)

    @classmethod
    def column_space(cls, m: Matrix) -> "Subspace":
        return cls.row_space(m.transpose())

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, Matrix.zeros(0, n))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, Matrix.identity(n))

    @property
    def dim(self) -> int:
        return self.echelon.rows

    def basis(self) -> List[Vector]:
        return [self.echelon.row(i) for i in range(self.dim)]

    def as_columns(self) -> Matrix:
        return self.echelon.transpose()

    def contains(self, vector: Vector) -> bool:
        if not vector:
            return True
        return Subspace.span(self.ambient_dim, self.basis() + [vector]).dim == self.dim

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.echelon == other.echelon

    __hash__ = None


def _check_ambient(u: Subspace, v: Subspace) -> None:
    if u.ambient_dim != v.ambient_dim:
        raise DimensionMismatch(f"subspaces of dimension {u.ambient_dim} and {v.ambient_dim}")


def subspace_equal(u: Subspace, v: Subspace) -> bool:
    _check_ambient(u, v)
    return u == v


def subspace_leq(u: Subspace, v: Subspace) -> bool:
    """True when u is contained in v."""
    _check_ambient(u, v)
    if u.dim > v.dim:
        return False
    return Subspace.span(v.ambient_dim, v.basis() + u.basis()).dim == v.dim


def _kernel_from_rref(reduced: Matrix, pivots: Sequence[int], ncols: int) -> List[Vector]:
    rows = reduced._rep
    pivot_set = set(pivots)
    basis = []
    for j in range(ncols):
        if j in pivot_set:
            continue
        vec = {j: ONE}
        for r, p in enumerate(pivots):
            x = rows.get(r, {}).get(j)
            if x:
                vec[p] = -x
        basis.append(vec)
    return basis


def rank_image_kernel(t: Matrix) -> Tuple[int, Subspace, Subspace]:
    """
    Rank, column space and null space of a matrix.

    Args:
        t (Matrix): Any matrix.

    Returns:
        Tuple[int, Subspace, Subspace]: (rank, image, kernel) with
        rank + dim(kernel) == t.cols.
    """
    reduced, pivots = t.rref()
    kernel = Subspace.span(t.cols, _kernel_from_rref(reduced, pivots, t.cols))
    image = Subspace.column_space(t)
    logger.debug("rank %d of a %dx%d matrix", len(pivots), t.rows, t.cols)
    return len(pivots), image, kernel


@dataclass(frozen=True)
class LinearSolution:
    particular: Vector
    space: Subspace

    @property
    def unique(self) -> bool:
        return self.space.dim == 0


def _normalized_key(row: Vector) -> Tuple:
    lead = row[min(row)]
    return tuple(sorted((k, v / lead) for k, v in row.items()))


def solve_linear(
    constraints: Iterable[Tuple[Any, Any]], unknown_dim: int
) -> LinearSolution:
    """
    Solve a list of scalar equations row . x = rhs exactly.

    Args:
        constraints (Iterable[Tuple[Any, Any]]): (row, rhs) pairs; a row is a
            sparse dict or a dense sequence of length unknown_dim.
        unknown_dim (int): Number of unknowns.

    Returns:
        LinearSolution: A particular solution and the solution space of the
        homogeneous system.

    Raises:
        Infeasible: If the equations contradict each other.
        DimensionMismatch: If a row does not fit unknown_dim.
    """
    seen = set()
    unique_rows: List[Vector] = []
    for row, rhs in constraints:
        if not isinstance(row, dict):
            if len(row) != unknown_dim:
                raise DimensionMismatch(f"row of length {len(row)}, expected {unknown_dim}")
            row = {j: v for j, v in enumerate(row)}
        aug = {j: to_scalar(v) for j, v in row.items()}
        if any(not 0 <= j < unknown_dim for j in aug):
            raise DimensionMismatch("coefficient index outside the unknowns")
        aug = {j: v for j, v in aug.items() if v}
        rhs = to_scalar(rhs)
        if rhs:
            aug[unknown_dim] = rhs
        if not aug:
            continue
        key = _normalized_key(aug)
        if key in seen:
            continue
        seen.add(key)
        unique_rows.append(aug)
    logger.debug("solving %d distinct equations in %d unknowns", len(unique_rows), unknown_dim)
    reduced, pivots = Matrix.from_row_vectors(unknown_dim + 1, unique_rows).rref()
    if pivots and pivots[-1] == unknown_dim:
        raise Infeasible("inconsistent linear system")
    particular = {}
    for r, p in enumerate(pivots):
        value = reduced._rep[r].get(unknown_dim)
        if value:
            particular[p] = value
    kernel = Subspace.span(unknown_dim, _kernel_from_rref(reduced, pivots, unknown_dim))
    return LinearSolution(particular, kernel)


def solve_matrix(a: Matrix, b: Matrix) -> Tuple[Matrix, Subspace]:
    """
    Solve a @ X = b for X.

    Returns:
        Tuple[Matrix, Subspace]: A particular solution X and the kernel of a
        (the freedom in every column of X).

    Raises:
        Infeasible: If some column of b is outside the image of a.
    """
    if a.rows != b.rows:
        raise DimensionMismatch(f"cannot solve {a.shape} against {b.shape}")
    n = a.cols
    reduced, pivots = a.hstack(b).rref()
    if pivots and pivots[-1] >= n:
        raise Infeasible("right-hand side outside the image")
    solution = {}
    for r, p in enumerate(pivots):
        tail = {j - n: v for j, v in reduced._rep[r].items() if j >= n}
        if tail:
            solution[p] = tail
    kernel = Subspace.span(n, _kernel_from_rref(reduced, pivots, n))
    return Matrix(SDM(solution, (n, b.cols), FIELD)), kernel


# Generalized inverses


def projection_violations(t: Matrix, e: Matrix, f: Matrix) -> List[str]:
    """
    Every way in which (e, f) fails to be a range/kernel projection pair for t.

    Raises:
        DimensionMismatch: If e or f has the wrong shape.
    """
    m, n = t.shape
    if e.shape != (m, m) or f.shape != (n, n):
        raise DimensionMismatch(
            f"t is {m}x{n} but e is {e.rows}x{e.cols} and f is {f.rows}x{f.cols}"
        )
    problems = []
    if e @ e != e:
        problems.append("e is not idempotent")
    if f @ f != f:
        problems.append("f is not idempotent")
    _, image_t, kernel_t = rank_image_kernel(t)
    if Subspace.column_space(e) != image_t:
        problems.append("image(e) differs from image(t)")
    if Subspace.column_space(Matrix.identity(n) - f) != kernel_t:
        problems.append("image(1-f) differs from kernel(t)")
    return problems


def inner_inverse(t: Matrix) -> Matrix:
    """A matrix g with t g t = t, built from the pivot columns of t."""
    m, n = t.shape
    _, pivots = t.rref()
    r = len(pivots)
    spanning = t.extract(range(m), pivots)
    _, completion_pivots = spanning.hstack(Matrix.identity(m)).rref()
    chosen = [c - r for c in completion_pivots if c >= r]
    frame = spanning.hstack(Matrix.identity(m).extract(range(m), chosen))
    target = Matrix.from_entries(n, m, ((p, k, ONE) for k, p in enumerate(pivots)))
    return target @ frame.inverse()


def _inverse_by_constraints(t: Matrix, e: Matrix, f: Matrix) -> Matrix:
    m, n = t.shape
    system = t.hstack(Matrix.identity(m) - e)
    rhs = f.hstack(Matrix.zeros(n, m))
    try:
        solution, kernel = solve_matrix(system.transpose(), rhs.transpose())
    except Infeasible:
        raise CrossCheckMismatch("no r with r.t = f and r.(1-e) = 0")
    if kernel.dim:
        raise CrossCheckMismatch("r.t = f and r.(1-e) = 0 do not determine r")
    return solution.transpose()


def generalized_inverse(t: Matrix, e: Matrix, f: Matrix, crosscheck: bool = True) -> Matrix:
    """
    The unique r with t r = e, r t = f (hence t r t = t, r t r = r) and
    r (1 - e) = 0.

    Args:
        t (Matrix): The map to invert, m x n.
        e (Matrix): Idempotent m x m with the same image as t.
        f (Matrix): Idempotent n x n whose complement 1 - f has image ker(t).
        crosscheck (bool): Also solve the defining equations directly and
            require both answers to agree.

    Returns:
        Matrix: r, n x m.

    Raises:
        BadProjections: If e or f violate the preconditions (all violations named).
        CrossCheckMismatch: If the two construction paths disagree.
    """
    problems = projection_violations(t, e, f)
    if problems:
        raise BadProjections(problems)
    r = f @ inner_inverse(t) @ e
    if t @ r != e or r @ t != f:
        raise CrossCheckMismatch("f g e does not invert t against (e, f)")
    if crosscheck:
        other = _inverse_by_constraints(t, e, f)
        if other != r:
            raise CrossCheckMismatch("direct and constraint generalized inverses differ")
    return r
