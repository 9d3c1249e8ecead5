import pytest
from conftest import model

from wmha.errors import DegenerateProduct, ParentMismatch
from wmha.exactla import ONE, Matrix, scalar
from wmha.fdalg import (
    Algebra,
    Multiplier,
    StarStructure,
    find_unit_or_local_units,
    flip_map,
    mult_operator_left,
    mult_operator_right,
    multiplier_algebra,
    multiply,
    opposite,
    tensor_algebra,
    validate_algebra,
    validate_star,
)
from wmha.legs import tensor_vector
from wmha.report import FAIL, PASS


@pytest.fixture
def matrix_units() -> Algebra:
    """M_2 as the convolution algebra of the pair groupoid on two objects."""
    return model("pair:2", "convolution").algebra


def _statuses(results):
    return {r.id: r.status for r in results}


def test_matrix_units_are_a_unital_algebra(matrix_units):
    assert matrix_units.unit == {0: ONE, 3: ONE}
    assert _statuses(validate_algebra(matrix_units)) == {
        "alg-associative": PASS,
        "alg-nondegenerate": PASS,
        "alg-idempotent": PASS,
    }


def test_zero_product_is_degenerate():
    zero = Algebra.from_structure(1, [])
    statuses = _statuses(validate_algebra(zero))
    assert statuses["alg-nondegenerate"] == FAIL
    assert statuses["alg-idempotent"] == FAIL
    with pytest.raises(DegenerateProduct):
        multiplier_algebra(zero)


def test_associativity_defect_names_a_triple(matrix_units):
    broken = Algebra.from_structure(4, matrix_units.structure_entries() + [(0, 0, 1, ONE)])
    assert broken.associativity_defect is not None
    result = validate_algebra(broken)[0]
    assert result.status == FAIL
    assert "triple" in result.counterexample


def test_opposite_swaps_factors(matrix_units):
    op = opposite(matrix_units)
    for i in range(4):
        for j in range(4):
            assert op.product(i, j) == matrix_units.product(j, i)


def test_tensor_algebra_multiplies_legwise(matrix_units):
    square = tensor_algebra(matrix_units, matrix_units)
    assert square.dim == 16
    # (e01⊗e10)(e10⊗e01) = e00⊗e11
    assert square.product(1 * 4 + 2, 2 * 4 + 1) == {0 * 4 + 3: ONE}


def test_multipliers_of_elements_compose(matrix_units):
    x = matrix_units.element([1, 2, 0, scalar(0, 1)])
    y = matrix_units.element([0, 1, 1, 0])
    mx, my = Multiplier.from_element(x), Multiplier.from_element(y)
    assert mx @ my == Multiplier.from_element(x * y)
    assert (mx @ my).as_element() == x * y
    assert mx.compatibility_defect() is None


def test_operator_pair_that_is_not_a_multiplier(matrix_units):
    eye = Matrix.identity(4)
    bogus = Multiplier(matrix_units, eye, Matrix.zeros(4, 4))
    assert bogus.compatibility_defect() is not None
    assert bogus.as_element() is None


def test_unital_multiplier_algebra_uses_the_basis_of_a(matrix_units):
    malg = multiplier_algebra(matrix_units)
    assert malg.unital and malg.dim == 4
    x = matrix_units.element([3, 0, 1, 2])
    assert malg.coordinates(malg.embed(x)) == x.coeffs
    assert malg.coordinates(malg.unit) == {0: ONE, 3: ONE}


def test_elements_of_different_algebras_do_not_mix(matrix_units):
    other = model("group:cyclic:2", "convolution").algebra
    with pytest.raises(ParentMismatch):
        matrix_units.basis_element(0) * other.basis_element(0)


def test_conjugate_transpose_is_a_star(matrix_units):
    inversion = Matrix.permutation([0, 2, 1, 3])
    assert validate_star(StarStructure(matrix_units, inversion), matrix_units)[0].status == PASS


def test_identity_is_not_a_star_on_matrices(matrix_units):
    result = validate_star(StarStructure(matrix_units, Matrix.identity(4)), matrix_units)[0]
    assert result.status == FAIL
    assert "anti-multiplicative" in result.detail


def test_multiplication_operators_act_by_the_product(matrix_units):
    x = matrix_units.element(["1", "2", "0", "-1"])
    y = matrix_units.element(["0", "1", "3", "1"])
    assert mult_operator_left(x).apply(y.coeffs) == multiply(x, y).coeffs
    assert mult_operator_right(x).apply(y.coeffs) == multiply(y, x).coeffs
    one = find_unit_or_local_units(matrix_units)
    assert mult_operator_left(one) == Matrix.identity(4)
    assert mult_operator_right(one) == Matrix.identity(4)


def test_unit_is_found_only_for_unital_algebras(matrix_units):
    assert find_unit_or_local_units(matrix_units).coeffs == {0: ONE, 3: ONE}
    assert find_unit_or_local_units(Algebra.from_structure(1, [])) is None


def test_flip_exchanges_the_legs():
    x, y = {0: ONE, 2: scalar(3)}, {1: ONE}
    assert flip_map(3).apply(tensor_vector(x, y, dim=3)) == tensor_vector(y, x, dim=3)
    assert flip_map(3) @ flip_map(3) == Matrix.identity(9)
