import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lorentzhol.discontinuity import DiscontinuityFamily, Verdict, check_properly_discontinuous
from lorentzhol.errors import DiscontinuityRefusal, NotIsometryError, PreconditionError
from lorentzhol.expr import PolyExpr
from lorentzhol.paths import PathSpec
from lorentzhol.ppwave import ambrose_singer_sample, cahen_wallach_spec, flat_chart, ppwave_chart
from lorentzhol.quotient import (FlatAffineGroup, _deck, boost, cahen_wallach_full_holonomy, deck_cross_check,
                                 deck_representative, default_connecting_path, flat_rotation_generator,
                                 flat_quotient_holonomy, quotient_holonomy, sign_flip, v_translation,
                                 validate_isometry)

ROUND = PolyExpr.from_data(4, [[[0, 2, 0, 0], 1], [[0, 0, 2, 0], 1]])
SADDLE = PolyExpr.from_data(4, [[[0, 2, 0, 0], 1], [[0, 0, 2, 0], -1]])
QUARTER = np.array([[0.0, -1.0], [1.0, 0.0]])


def test_valid_isometries_pass():
    chart = ppwave_chart(ROUND, 2)
    validate_isometry(chart, sign_flip(2, A=QUARTER, w=[0, 0]))
    validate_isometry(chart, v_translation(2, 1.5))
    validate_isometry(chart, lambda p: np.array([p[0] + 2.0, -p[2], p[1], p[3] + 1.0]))


def test_non_isometries_are_rejected():
    with pytest.raises(NotIsometryError, match="pullback"):
        validate_isometry(ppwave_chart(SADDLE, 2), sign_flip(2, A=QUARTER))
    with pytest.raises(NotIsometryError):
        validate_isometry(ppwave_chart(ROUND, 2), boost(2, 0.7))
    with pytest.raises(NotIsometryError):
        validate_isometry(ppwave_chart(ROUND, 2), lambda p: np.array([p[0], math.sin(p[1]), p[2], p[3]]))
    with pytest.raises(ValueError, match="orthogonal"):
        _deck(2, A=[[2.0, 0.0], [0.0, 1.0]])


def test_boost_is_an_isometry_of_u_weighted_charts():
    f = PolyExpr.from_data(4, [[[0, 2, 0, -2], 1], [[0, 0, 2, -2], -1]])
    chart = ppwave_chart(f, 2, domain="half-plane")
    validate_isometry(chart, boost(2, 0.7, A=QUARTER @ QUARTER))
    with pytest.raises(NotIsometryError):
        validate_isometry(chart, boost(2, 0.7, w=[1.0, 0.0]))


@given(st.floats(-1, 1), st.floats(-1, 1), st.integers(0, 1), st.integers(0, 3))
def test_representative_is_a_homomorphism(l1, l2, flips, turns):
    A = np.linalg.matrix_power(QUARTER, turns)
    s = boost(2, l1, A=A, w=[l2, 0.0])
    t = sign_flip(2, A=QUARTER, w=[0.0, l1], flips=flips)
    composite = s.compose(t)
    assert np.allclose((s.representative() @ t.representative()).matrix, composite.representative().matrix)
    p = np.array([0.3, -1.0, 0.5, 2.0])
    assert np.allclose(composite(p), s(t(p)))
    assert np.allclose(s.inverse_point(s(p)), p)


@pytest.mark.parametrize("waypoints", [(), ([0.4, 1.0, 0.2, 0.5],), ([-1.0, -0.5, 1.5, 0.0], [0.2, 0.3, -0.4, -0.6])])
def test_cross_check_is_path_independent(waypoints):
    chart = ppwave_chart(ROUND, 2)
    sigma = validate_isometry(chart, sign_flip(2, A=QUARTER))
    base = np.array([0.0, 0.1, 0.2, 0.3])
    connected = ambrose_singer_sample(chart, base)
    check = deck_cross_check(chart, sigma, base, default_connecting_path(chart, sigma, base, waypoints), connected)
    assert check.agrees and check.class_error < 1e-8


def test_connecting_path_must_end_at_preimage():
    chart = ppwave_chart(ROUND, 2)
    with pytest.raises(ValueError, match="connecting path"):
        deck_representative(chart, v_translation(2, 1.0), [0, 0, 0, 0], PathSpec.line([0, 0, 0, 0], [1, 0, 0, 0]))


def test_representative_needs_v_free_f():
    chart = ppwave_chart(PolyExpr.from_data(4, [[[1, 1, 0, 0], 1], [[0, 2, 0, 0], 1], [[0, 0, 2, 0], 1]]), 2)
    with pytest.raises(PreconditionError):
        deck_representative(chart, v_translation(2, 1.0), [0, 0, 0, 1])


def test_cahen_wallach_flip_needs_negative_rational_squares():
    with pytest.raises(PreconditionError):
        cahen_wallach_full_holonomy(cahen_wallach_spec((1, -4)), 1)
    with pytest.raises(PreconditionError):
        cahen_wallach_full_holonomy(cahen_wallach_spec((-1, -2)), 1)
    assert len(cahen_wallach_full_holonomy(cahen_wallach_spec((1, -4)), 0).classes) == 1


def test_cahen_wallach_discrete_parts():
    spec = cahen_wallach_spec((-1, -4))
    assert spec.beta == pytest.approx(1.0)
    odd = cahen_wallach_full_holonomy(spec, 1)
    assert sorted(np.diag(A)[0] for _, A in odd.classes) == [-1.0, 1.0]
    assert len(cahen_wallach_full_holonomy(spec, 2).classes) == 1


def test_failed_verdict_is_refused_with_witness():
    chart = ppwave_chart(ROUND, 2)
    verdict = check_properly_discontinuous(DiscontinuityFamily("boost", (1.0, math.sqrt(2)), domain="punctured"))
    with pytest.raises(DiscontinuityRefusal) as info:
        quotient_holonomy(chart, [v_translation(2, 1.0)], [0, 0, 0, 0], verdict)
    assert info.value.witness["k"] != 0


def test_unknown_verdict_is_conditional():
    chart = ppwave_chart(ROUND, 2)
    desc = quotient_holonomy(chart, [sign_flip(2)], [0, 0, 0, 0], Verdict("unknown", "unknown"))
    assert desc.status == "conditional"
    assert len(desc.classes) == 2 and desc.connected["translation_rank"] == 2


def test_pure_translations_give_trivial_discrete_part():
    chart = flat_chart(2)
    gens = [v_translation(2, 1.0), _deck(2, w=[1.0, 0.0], kind="translation"), _deck(2, w=[0.0, 1.0])]
    verdict = check_properly_discontinuous(DiscontinuityFamily("lattice", vectors=((1, 0, 0), (0, 1, 0), (0, 0, 1))))
    desc = quotient_holonomy(chart, gens, [0, 0, 0, 0], verdict)
    assert len(desc.classes) == 1 and desc.connected["algebra_dim"] == 0


@settings(max_examples=10)
@given(st.sampled_from([(2, 4), (3, 6), (4, 4), (6, 6)]))
def test_flat_rotation_orders_follow_power_oracle(case):
    denom, expected_closure = case
    A = flat_rotation_generator(2 * math.pi / denom)
    order = next(k for k in range(1, 13) if np.allclose(np.linalg.matrix_power(A, k), np.eye(4)))
    sample = flat_quotient_holonomy(FlatAffineGroup([(A, [0, 0, 1.0])]))
    assert sample.order == order
