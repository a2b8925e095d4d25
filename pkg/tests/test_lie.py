import itertools

import numpy as np
import pytest

from lorentzhol.lie import (cayley_form, g2_basis, g2_form, quat_left, quat_right, right_scalar, so_basis,
                            sp_basis, spin7_basis, su_basis)


def _span_rank(mats):
    return np.linalg.matrix_rank(np.array([m.ravel() for m in mats]), 1e-9)


def _closed(mats):
    cols = np.array([m.ravel() for m in mats]).T
    for x, y in itertools.combinations(mats, 2):
        c = (x @ y - y @ x).ravel()
        coef, *_ = np.linalg.lstsq(cols, c, rcond=None)
        if np.abs(cols @ coef - c).max() > 1e-9:
            return False
    return True


@pytest.mark.parametrize("basis,dim,n", [
    (so_basis(5), 10, 5), (su_basis(2), 3, 4), (su_basis(3), 8, 6), (sp_basis(1), 3, 4), (sp_basis(2), 10, 8),
])
def test_bases_are_skew_subalgebras_of_the_right_size(basis, dim, n):
    assert len(basis) == dim and _span_rank(basis) == dim
    assert all(m.shape == (n, n) and np.allclose(m, -m.T) for m in basis)
    assert _closed(basis)


def test_quaternion_left_and_right_commute():
    p, q = np.array([0.5, 0.5, 0.5, 0.5]), np.array([0.0, 0.6, 0.8, 0.0])
    assert np.allclose(quat_left(p) @ quat_right(q), quat_right(q) @ quat_left(p))
    assert np.allclose(quat_left(p).T @ quat_left(p), np.eye(4))
    r = right_scalar(2, q)
    assert all(np.allclose(r @ m, m @ r) for m in sp_basis(2))


def _preserves(xi, form):
    act = np.zeros_like(form)
    for slot in range(form.ndim):
        act += np.moveaxis(np.tensordot(xi.T, form, axes=([1], [slot])), 0, slot)
    return np.abs(act).max() < 1e-9


def test_exceptional_stabilizers():
    g2 = g2_basis()
    spin7 = spin7_basis()
    assert len(g2) == 14 and len(spin7) == 21
    assert _closed(g2) and _closed(spin7)
    assert all(_preserves(x, g2_form()) for x in g2)
    assert all(_preserves(x, cayley_form()) for x in spin7)
    assert not all(_preserves(x, g2_form()) for x in so_basis(7))
