from hypothesis import given
from hypothesis import strategies as st

from wmha.exactla import ONE, Matrix, scalar
from wmha.legs import apply_leg1, apply_leg2, conjugate_by_flip, flatten, flip, kron, on_legs_13, tensor_vector, unflatten

A = Matrix.from_rows([[1, 2], [3, 4]])
B = Matrix.from_rows([[0, 1], [5, 0]])


@given(st.integers(min_value=1, max_value=5), st.data())
def test_tensor_index_convention(dim, data):
    i, j, k = (data.draw(st.integers(min_value=0, max_value=dim - 1)) for _ in range(3))
    assert flatten((i, j), dim) == i * dim + j
    assert unflatten(flatten((i, j, k), dim), dim, 3) == (i, j, k)


def test_leg_operators_match_kronecker_products():
    v = {0: scalar(1), 1: scalar(-1), 3: scalar(5)}
    eye = Matrix.identity(2)
    assert apply_leg1(A, v, 2) == A.kron(eye).apply(v)
    assert apply_leg2(A, v, 2) == eye.kron(A).apply(v)


def test_flip_swaps_the_legs():
    assert flip(2).apply({1: ONE}) == {2: ONE}
    assert conjugate_by_flip(A.kron(B), 2) == B.kron(A)


def test_operator_on_outer_legs():
    assert on_legs_13(A.kron(B), 2) == kron(A, Matrix.identity(2), B)


def test_elementary_tensors():
    assert tensor_vector({1: ONE}, {0: scalar(2)}, dim=3) == {3: scalar(2)}
