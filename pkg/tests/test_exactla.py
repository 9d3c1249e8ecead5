import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wmha.errors import BadProjections, DimensionMismatch, Infeasible
from wmha.exactla import (
    ONE,
    Matrix,
    Subspace,
    format_scalar,
    generalized_inverse,
    inner_inverse,
    rank_image_kernel,
    rational,
    scalar,
    solve_linear,
)


def test_scalars_are_exact_gaussian_rationals():
    x = scalar("1/3", 2)
    assert x * scalar(3) == scalar(1, 6)
    assert format_scalar(x) == "1/3+2*i"
    assert format_scalar(scalar(0, -1)) == "-1*i"
    assert format_scalar(scalar("-5/2")) == "-5/2"


@pytest.mark.parametrize("text", ["1.5", "1e3", "x", "1/", "/2", "1/-2"])
def test_rational_rejects_non_literals(text):
    with pytest.raises(ValueError):
        rational(text)


def test_rational_literals_and_zero_denominator():
    assert rational(" -6/8 ") == rational("-3/4")
    with pytest.raises(ValueError, match="zero denominator"):
        rational("1/0")


def test_rank_image_kernel_of_rank_one_matrix():
    m = Matrix.from_rows([[1, 2], [2, 4]])
    rank, image, kernel = rank_image_kernel(m)
    assert rank == 1
    assert image.dim == 1 and image.contains({0: scalar(1), 1: scalar(2)})
    assert kernel.dim == 1 and kernel.contains({0: scalar(-2), 1: ONE})


def test_subspace_form_is_canonical():
    u = Subspace.span(3, [{0: ONE, 1: ONE}, {1: ONE}])
    v = Subspace.span(3, [{0: ONE}, {0: scalar(2), 1: scalar(5)}])
    assert u == v
    assert u != Subspace.full(3)
    assert not u.contains({2: ONE})


def test_inverse_of_singular_matrix_raises():
    with pytest.raises(Infeasible):
        Matrix.from_rows([[1, 1], [1, 1]]).inverse()


def test_solve_linear_reports_particular_solution_and_freedom():
    solution = solve_linear([([1, 1, 0], 2), ([0, 0, 1], 3)], 3)
    assert solution.particular == {0: scalar(2), 2: scalar(3)}
    assert solution.space.dim == 1
    assert not solution.unique


def test_solve_linear_inconsistent_system():
    with pytest.raises(Infeasible):
        solve_linear([([1], 1), ([1], 2)], 1)


def test_solve_linear_rejects_short_rows():
    with pytest.raises(DimensionMismatch):
        solve_linear([([1, 2], 0)], 3)


def test_generalized_inverse_of_nilpotent_block():
    t = Matrix.from_rows([[0, 1], [0, 0]])
    e = Matrix.diagonal([1, 0])
    f = Matrix.diagonal([0, 1])
    assert generalized_inverse(t, e, f) == Matrix.from_rows([[0, 0], [1, 0]])


def test_generalized_inverse_names_every_bad_projection():
    t = Matrix.from_rows([[0, 1], [0, 0]])
    with pytest.raises(BadProjections) as info:
        generalized_inverse(t, Matrix.diagonal([0, 1]), Matrix.diagonal([1, 0]))
    assert "image(e) differs from image(t)" in info.value.violations
    assert "image(1-f) differs from kernel(t)" in info.value.violations


def _unit_triangular(n, entries, lower):
    rows = [[0] * n for _ in range(n)]
    it = iter(entries)
    for i in range(n):
        rows[i][i] = 1
        for j in range(n):
            if (j < i) if lower else (j > i):
                rows[i][j] = next(it)
    return Matrix.from_rows(rows)


@st.composite
def factored_maps(draw, max_dim=5):
    """t = P D Q with P, Q invertible and D = diag(1..1, 0..0)."""
    n = draw(st.integers(min_value=2, max_value=max_dim))
    r = draw(st.integers(min_value=1, max_value=n))
    off = n * (n - 1) // 2
    small = st.integers(min_value=-3, max_value=3)

    def invertible():
        lower = draw(st.lists(small, min_size=off, max_size=off))
        upper = draw(st.lists(small, min_size=off, max_size=off))
        return _unit_triangular(n, lower, True) @ _unit_triangular(n, upper, False)

    d = Matrix.diagonal([1] * r + [0] * (n - r))
    return invertible(), d, invertible()


def assert_generalized_inverse(factors):
    p, d, q = factors
    p_inv, q_inv = p.inverse(), q.inverse()
    t = p @ d @ q
    e = p @ d @ p_inv
    f = q_inv @ d @ q
    r = generalized_inverse(t, e, f, crosscheck=True)
    assert r == generalized_inverse(t, e, f, crosscheck=False)
    assert r == q_inv @ d @ p_inv
    assert t @ r == e
    assert r @ t == f
    assert t @ r @ t == t
    assert r @ t @ r == r
    assert r @ (Matrix.identity(t.rows) - e) == Matrix.zeros(t.cols, t.rows)


@settings(max_examples=25, deadline=None)
@given(factored_maps())
def test_generalized_inverse_of_factored_map(factors):
    assert_generalized_inverse(factors)


@pytest.mark.slow
@settings(max_examples=200, deadline=None)
@given(factored_maps(max_dim=6))
def test_generalized_inverse_over_many_complements(factors):
    assert_generalized_inverse(factors)


@settings(max_examples=25, deadline=None)
@given(factored_maps())
def test_inner_inverse(factors):
    p, d, q = factors
    t = p @ d @ q
    assert t @ inner_inverse(t) @ t == t
