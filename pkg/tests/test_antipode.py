import dataclasses

import pytest
from conftest import model, verified

from wmha.antipode import build_generalized_inverses, candidate_r_maps
from wmha.config import Settings
from wmha.errors import BadProjections
from wmha.exactla import Matrix
from wmha.pipeline import ANTIPODE_CHECKS, THM_29_CHECKS, mutate, run_verification
from wmha.report import FAIL, PASS


def test_antipode_of_functions_is_inversion(pair2_function):
    w = pair2_function.antipode
    # (0,0), (0,1), (1,0), (1,1): inversion swaps the two arrows
    assert w.S_matrix == Matrix.permutation([0, 2, 1, 3])
    assert w.bijective


def test_antipode_of_a_cyclic_group_algebra():
    w = verified("group:cyclic:3", "convolution").antipode
    assert w.S_matrix == Matrix.permutation([0, 2, 1])


def test_every_antipode_identity_holds(pair2_function, pair2_convolution):
    for run in (pair2_function, pair2_convolution):
        for check_id in ANTIPODE_CHECKS:
            assert run.builder.status(check_id) == PASS, check_id


def test_generalized_inverses_invert_the_canonical_maps(pair2_convolution):
    state, w = pair2_convolution.state, pair2_convolution.antipode
    c = state.coproduct
    assert c.T1 @ w.R1 == state.E.left
    assert w.R1 @ c.T1 == state.G.G1
    assert c.T2 @ w.R2 == state.E.right
    assert w.R2 @ c.T2 == state.G.G2


def test_source_map_image_is_spanned_by_the_units(pair2_convolution):
    st = pair2_convolution.source_target
    assert st.image_s.dim == 2
    assert st.image_t.dim == 2
    assert st.image_s.contains({0: 1, 3: 1})


def test_candidate_r_maps_from_the_true_antipode_match_the_generalized_inverses(pair2_function):
    c = pair2_function.state.coproduct
    w = pair2_function.antipode
    r1, r2 = candidate_r_maps(c, w.S_matrix)
    assert r1 == w.R1
    assert r2 == w.R2


def test_both_characterizations_agree(pair2_function, pair2_convolution):
    for run in (pair2_function, pair2_convolution):
        for check_id in THM_29_CHECKS + ("thm-2.9-paths-agree",):
            assert run.builder.status(check_id) == PASS, check_id


def test_identity_is_not_an_antipode_of_functions():
    p = dataclasses.replace(model("pair:2", "function"), antipode=Matrix.identity(4))
    run = run_verification(p, Settings(), "thm29")
    assert run.builder.status("thm-2.9-hypotheses") == PASS
    assert run.builder.status("thm-2.9-R-range") == PASS
    assert run.builder.status("thm-2.9-eq-2.5") == FAIL
    assert run.builder.status("thm-2.9-kernels") == "skip"


def test_perturbed_antipode_disagrees_with_the_computed_one():
    p = mutate(model("pair:2", "function"), "S", (1, 2))
    run = run_verification(p, Settings(), "both", classify=False)
    assert run.builder.status("prop-2.7") == PASS
    assert FAIL in (run.builder.status("thm-2.9-eq-2.5"), run.builder.status("thm-2.9-paths-agree"))


def test_generalized_inverses_are_built_from_E_and_G(pair2_function):
    state, w = pair2_function.state, pair2_function.antipode
    r1, r2 = build_generalized_inverses(state.coproduct, state.E, state.G)
    assert r1 == w.R1
    assert r2 == w.R2


@pytest.mark.parametrize("side, name", [("left", "R1: "), ("right", "R2: ")])
def test_bad_projection_names_the_map(pair2_function, side, name):
    state = pair2_function.state
    eye = Matrix.identity(state.coproduct.n ** 2)
    bad = dataclasses.replace(state.E, **{side: eye})
    with pytest.raises(BadProjections) as exc:
        build_generalized_inverses(state.coproduct, bad, state.G)
    assert all(v.startswith(name) for v in exc.value.violations)
    assert f"{name}image(e) differs from image(t)" in exc.value.violations
