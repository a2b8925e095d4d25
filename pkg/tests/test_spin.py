import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from lorentzhol.errors import PreconditionError
from lorentzhol.lie import so_basis, su_basis
from lorentzhol.spin import (LiftedGroup, NoLift, Relation, algebra_lift, clifford_generators,
                             conjugation_residual, lift_group, lorentz_fixed_correspondence, lorentz_module,
                             rotation_generator, serialize_complex, spin_lift_element, spinor_module)

from strategies import orthogonal


@pytest.mark.parametrize("p,q", [(p, q) for p in range(13) for q in range(13) if 1 <= p + q <= 12])
def test_clifford_relations(p, q):
    rep = clifford_generators(p, q)
    assert len(rep.gammas) == p + q
    assert rep.relation_residual() < 1e-12


def test_two_dimensional_lorentz_example():
    rep = clifford_generators(1, 1)
    s, t = rep.gammas
    assert np.allclose(s @ s, -np.eye(2)) and np.allclose(t @ t, np.eye(2))
    ell, ell_star = rep.null_elements()
    assert np.allclose(ell, [[0, 0], [math.sqrt(2), 0]])
    assert np.allclose(ell_star, [[0, -math.sqrt(2)], [0, 0]])
    assert np.allclose(ell @ ell, 0) and np.allclose(ell_star @ ell_star, 0)
    assert np.allclose(ell @ ell_star + ell_star @ ell, -2 * np.eye(2))
    with pytest.raises(PreconditionError):
        spinor_module(3).null_elements()


def test_module_dimensions():
    for n in range(1, 9):
        assert spinor_module(n).dim == 2 ** (n // 2)
        assert lorentz_module(n).dim == 2 * 2 ** (n // 2)


@given(st.floats(-3.0, 3.0))
def test_plane_rotation_lifts_to_half_angle(theta):
    rep = spinor_module(3)
    A = np.eye(3)
    A[:2, :2] = [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
    g1, g2 = rep.gammas[:2]
    oracle = math.cos(theta / 2) * np.eye(rep.dim) + math.sin(theta / 2) * g1 @ g2
    lift = spin_lift_element(A, rep)
    assert min(np.abs(lift.element - oracle).max(), np.abs(lift.element + oracle).max()) < 1e-10
    assert lift.residual < 1e-10


def test_half_turn_pair_lifts_to_bivector():
    rep = spinor_module(4)
    lift = spin_lift_element(np.diag([-1.0, -1.0, 1.0, 1.0]), rep).element
    e12 = rep.gammas[0] @ rep.gammas[1]
    assert min(np.abs(lift - e12).max(), np.abs(lift + e12).max()) < 1e-10


@given(orthogonal(5))
@settings(max_examples=20)
def test_random_rotations_lift_and_cover(A):
    rep = spinor_module(5)
    xi = rotation_generator(A)
    assert np.allclose(expm(xi), A, atol=1e-9)
    s = spin_lift_element(A, rep)
    for el in s.both:
        assert conjugation_residual(el, A, rep) < 1e-9


def test_algebra_lift_is_a_homomorphism():
    rep = spinor_module(4)
    basis = so_basis(4)
    for x, y in itertools.combinations(basis, 2):
        lhs = algebra_lift(x @ y - y @ x, rep)
        X, Y = algebra_lift(x, rep), algebra_lift(y, rep)
        assert np.allclose(lhs, X @ Y - Y @ X)


def test_reflections_have_no_spin_lift():
    with pytest.raises(PreconditionError, match="SO"):
        spin_lift_element(np.diag([-1.0, 1.0, 1.0]), spinor_module(3))
    with pytest.raises(PreconditionError, match="orthogonal"):
        spin_lift_element(np.diag([2.0, 1.0, 1.0]), spinor_module(3))


def test_involution_squaring_to_minus_one_has_no_lift():
    result = lift_group([np.diag([-1.0, -1.0, 1.0])], [[1, 1]], spinor_module(3))
    assert isinstance(result, NoLift) and not result
    assert "g1 g1" in result.reason


def test_third_turn_needs_the_minus_sign():
    c, s = math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3)
    A = np.array([[c, -s], [s, c]])
    lifted = lift_group([A], [[1, 1, 1]], spinor_module(2))
    assert isinstance(lifted, LiftedGroup)
    assert lifted.signs == (-1,) and lifted.alternatives == {(-1,): 0}


def test_relation_must_hold_downstairs():
    with pytest.raises(ValueError, match="does not hold"):
        lift_group([np.diag([-1.0, -1.0, 1.0])], [[1]], spinor_module(3))


def test_relation_with_connected_target():
    theta = math.pi
    A = np.diag([-1.0, -1.0, 1.0])
    xi = np.zeros((3, 3))
    xi[1, 0], xi[0, 1] = theta, -theta
    lifted = lift_group([A], [Relation((1,), xi)], spinor_module(3), [xi])
    assert isinstance(lifted, LiftedGroup)


def test_fixed_dimension_shrinks_as_the_group_grows():
    n = 4
    rep = spinor_module(n)
    su = su_basis(2)
    dims = [lift_group((), (), rep, su[:j], n=n).N for j in range(len(su) + 1)]
    assert dims[0] == rep.dim and dims[-1] == 2
    assert all(a >= b for a, b in zip(dims, dims[1:]))
    assert lift_group((), (), rep, so_basis(4), n=n).N == 0


@pytest.mark.parametrize("n", range(1, 9))
def test_translations_alone_fix_half_the_lorentz_module(n):
    lifted = lift_group((), (), spinor_module(n), (), n=n)
    corr = lorentz_fixed_correspondence(lifted)
    assert corr.lorentz_dim == 2 ** (n // 2) == corr.riemannian_dim
    assert corr.v1_norm < 1e-10


def test_serialize_complex_interleaves():
    assert serialize_complex(np.array([[1 + 2j, 3j]])) == [[1.0, 2.0, 0.0, 3.0]]
