"""
Tensor legs: the row-major index convention for A⊗A and A⊗A⊗A, Kronecker
products of several operators and the leg permutations used throughout.
"""

from functools import lru_cache
from typing import Sequence, Tuple

from .exactla import ZERO, Matrix, Vector


def flatten(indices: Sequence[int], dim: int) -> int:
    """(i, j, ...) -> i*dim^(k-1) + j*dim^(k-2) + ..."""
    flat = 0
    for i in indices:
        flat = flat * dim + i
    return flat


def unflatten(flat: int, dim: int, legs: int) -> Tuple[int, ...]:
    out = []
    for _ in range(legs):
        flat, r = divmod(flat, dim)
        out.append(r)
    return tuple(reversed(out))


def kron(*factors: Matrix) -> Matrix:
    result = factors[0]
    for factor in factors[1:]:
        result = result.kron(factor)
    return result


def tensor_vector(*vectors: Vector, dim: int) -> Vector:
    """The elementary tensor v1⊗v2⊗... with every leg of dimension dim."""
    result = dict(vectors[0])
    for vec in vectors[1:]:
        result = {i * dim + j: a * b for i, a in result.items() for j, b in vec.items()}
    return result


def apply_leg1(op: Matrix, vector: Vector, dim: int) -> Vector:
    """(op⊗ι) applied to a vector of A⊗A."""
    cols = op.columns()
    out: Vector = {}
    for idx, value in vector.items():
        i, j = divmod(idx, dim)
        for k, c in cols[i].items():
            key = k * dim + j
            total = out.get(key, ZERO) + c * value
            if total:
                out[key] = total
            else:
                out.pop(key, None)
    return out


def apply_leg2(op: Matrix, vector: Vector, dim: int) -> Vector:
    """(ι⊗op) applied to a vector of A⊗A."""
    cols = op.columns()
    out: Vector = {}
    for idx, value in vector.items():
        i, j = divmod(idx, dim)
        for k, c in cols[j].items():
            key = i * dim + k
            total = out.get(key, ZERO) + c * value
            if total:
                out[key] = total
            else:
                out.pop(key, None)
    return out


@lru_cache(maxsize=None)
def flip(dim: int) -> Matrix:
    """σ on A⊗A: e_i⊗e_j -> e_j⊗e_i."""
    return Matrix.permutation([j * dim + i for i in range(dim) for j in range(dim)])


@lru_cache(maxsize=None)
def swap23(dim: int) -> Matrix:
    """ι⊗σ on A⊗A⊗A: e_i⊗e_j⊗e_k -> e_i⊗e_k⊗e_j."""
    images = []
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                images.append(flatten((i, k, j), dim))
    return Matrix.permutation(images)


@lru_cache(maxsize=None)
def identity(dim: int) -> Matrix:
    return Matrix.identity(dim)


def on_legs_13(op: Matrix, dim: int) -> Matrix:
    """An operator on A⊗A placed on legs 1 and 3 of A⊗A⊗A."""
    s = swap23(dim)
    return s @ op.kron(identity(dim)) @ s


def conjugate_by_flip(op: Matrix, dim: int) -> Matrix:
    s = flip(dim)
    return s @ op @ s
