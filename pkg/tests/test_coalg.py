import dataclasses

import pytest
from conftest import model, verified

from wmha.coalg import (
    AXIOM_CHECKS,
    CoproductData,
    check_fullness,
    check_regular_maps,
    delta13_action,
    delta13_right_action,
    derive_regular_maps,
    extend_delta,
    solve_counit,
    verify_wmha,
)
from wmha.exactla import ONE, Matrix
from wmha.fdalg import Algebra, Multiplier
from wmha.pipeline import mutate
from wmha.report import FAIL, PASS, SKIP


def test_function_model_is_a_wmha():
    report = verify_wmha(model("pair:2", "function").coproduct)
    assert report.verdict == PASS
    assert report.witnesses["E"]["rank"] == 8


@pytest.mark.slow
def test_function_model_on_three_objects_has_rank_27_idempotent():
    report = verify_wmha(model("pair:3", "function").coproduct)
    assert report.verdict == PASS
    assert report.witnesses["E"]["rank"] == 27


def test_witnesses_match_the_function_model(pair2_function):
    for check_id in ("oracle-E", "oracle-G", "oracle-counit"):
        assert pair2_function.builder.status(check_id) == PASS
    assert pair2_function.state.E.left.nnz() == 8


def test_witnesses_match_the_convolution_model(pair2_convolution):
    for check_id in ("oracle-E", "oracle-G", "oracle-counit"):
        assert pair2_convolution.builder.status(check_id) == PASS
    assert pair2_convolution.state.counit.functional == {k: ONE for k in range(4)}


def test_counit_of_functions_evaluates_at_units():
    c = model("pair:2", "function").coproduct
    assert solve_counit(c).functional == {0: ONE, 3: ONE}


def test_regular_maps_are_derived_by_cancellation():
    c = model("pair:2", "function").coproduct
    stripped = dataclasses.replace(c, T3=None, T4=None)
    derived = derive_regular_maps(stripped)
    # commutative: T3 = T1 and T4 = T2
    assert derived.T3 == c.T1
    assert derived.T4 == c.T2


def test_supplied_regular_maps_are_checked():
    c = model("pair:2", "convolution").coproduct
    assert [r.status for r in check_regular_maps(c)] == [PASS, PASS]
    swapped = dataclasses.replace(c, T3=c.T4, T4=c.T3)
    assert FAIL in [r.status for r in check_regular_maps(swapped)]


def test_group_algebra_is_full():
    v_space, w_space, full = check_fullness(model("group:cyclic:3", "convolution").coproduct)
    assert full
    assert v_space.dim == w_space.dim == 3


def test_zero_coproduct_is_not_full():
    point = Algebra.from_structure(1, [(0, 0, 0, ONE)])
    zero = Matrix.zeros(1, 1)
    v_space, w_space, full = check_fullness(CoproductData(point, zero, zero))
    assert not full
    assert v_space.dim == w_space.dim == 0


def test_perturbed_canonical_map_breaks_an_axiom():
    p = mutate(model("pair:2", "function"), "T1", (0, 0))
    report = verify_wmha(p.coproduct)
    assert report.verdict == FAIL
    assert report.check("def-1.1-mixed").status == FAIL


def test_perturbed_structure_constant_fails_associativity_first():
    p = mutate(model("pair:2", "function"), "structure", (0, 0, 1))
    report = verify_wmha(p.coproduct)
    assert report.first_failure().id == "alg-associative"
    assert report.check("def-1.1-coassociative").status == "skip"



def model_state(kind):
    return verified("pair:2", kind).state

@pytest.mark.parametrize("kind", ["function", "convolution"])
def test_extended_coproduct_sends_one_to_E(kind):
    state = model_state(kind)
    c = state.coproduct
    one = extend_delta(c, state.E, Multiplier.identity(c.parent))
    assert one.left == state.E.left
    assert one.right == state.E.right
    for x in range(c.n):
        ext = extend_delta(c, state.E, Multiplier(c.parent, c.parent.left_ops[x], c.parent.right_ops[x]))
        assert ext.left == c.left_delta[x]
        assert ext.right == c.right_delta[x]


@pytest.mark.parametrize("kind", ["function", "convolution"])
def test_delta13_places_the_coproduct_on_the_outer_legs(kind):
    c = model_state(kind).coproduct
    n = c.n
    for a in range(n):
        for b in range(n):
            for x in range(n):
                # Δ13(a)(1⊗b⊗x) from T1(a⊗x), (x⊗b⊗1)Δ13(a) from T2(x⊗a)
                left = {(i // n) * n * n + b * n + i % n: v for i, v in c.T1.column(a * n + x).items()}
                right = {(i // n) * n * n + b * n + i % n: v for i, v in c.T2.column(x * n + a).items()}
                assert delta13_action(c, {a: ONE}, {b: ONE}, {x: ONE}) == left
                assert delta13_right_action(c, {x: ONE}, {b: ONE}, {a: ONE}) == right


def test_non_associative_structure_stops_every_later_check():
    broken = mutate(model("pair:2", "function"), "structure", (1, 2, 0))
    report = verify_wmha(broken.coproduct)
    assert report.check("alg-associative").status == FAIL
    assert report.check("alg-associative").counterexample["triple"]
    for check_id in AXIOM_CHECKS:
        assert report.check(check_id).detail == "requires alg-associative"
    assert all(r.status == SKIP for r in report.checks if not r.id.startswith("alg-"))
