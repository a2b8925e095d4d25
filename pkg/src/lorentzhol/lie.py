"""Explicit bases of compact subalgebras of so(n) and their discrete companions."""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
from scipy.linalg import null_space

G2_FORM = ((0, 1, 2, 1), (0, 3, 4, 1), (0, 5, 6, 1), (1, 3, 5, 1),
           (1, 4, 6, -1), (2, 3, 6, -1), (2, 4, 5, -1))


def so_basis(n: int) -> list:
    out = []
    for a, b in itertools.combinations(range(n), 2):
        m = np.zeros((n, n))
        m[a, b], m[b, a] = -1.0, 1.0
        out.append(m)
    return out


def complex_to_real(z: np.ndarray) -> np.ndarray:
    """C^m -> R^2m with z = x + iy mapped to (x, y)."""
    x, y = z.real, z.imag
    return np.block([[x, -y], [y, x]])


def su_basis(m: int) -> list:
    mats = []
    for p, q in itertools.combinations(range(m), 2):
        e = np.zeros((m, m), dtype=complex)
        e[p, q], e[q, p] = 1.0, -1.0
        mats.append(e)
        e = np.zeros((m, m), dtype=complex)
        e[p, q] = e[q, p] = 1j
        mats.append(e)
    for p in range(m - 1):
        e = np.zeros((m, m), dtype=complex)
        e[p, p], e[p + 1, p + 1] = 1j, -1j
        mats.append(e)
    return [complex_to_real(e) for e in mats]


def complex_conjugation(m: int) -> np.ndarray:
    return np.diag(np.r_[np.ones(m), -np.ones(m)])


def _quat_mul(p, q):
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return np.array([a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                     a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                     a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                     a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2])


def quat_left(q) -> np.ndarray:
    return np.array([_quat_mul(q, e) for e in np.eye(4)]).T


def quat_right(q) -> np.ndarray:
    return np.array([_quat_mul(e, q) for e in np.eye(4)]).T


def sp_basis(k: int) -> list:
    """sp(k) acting on H^k = R^4k by left multiplication with quaternionic skew-Hermitian matrices."""
    units = [quat_left(e) for e in np.eye(4)]
    out = []

    def place(blocks):
        m = np.zeros((4 * k, 4 * k))
        for (p, q), b in blocks.items():
            m[4 * p:4 * p + 4, 4 * q:4 * q + 4] += b
        return m

    for p in range(k):
        for u in units[1:]:
            out.append(place({(p, p): u}))
    for p, q in itertools.combinations(range(k), 2):
        out.append(place({(p, q): units[0], (q, p): -units[0]}))
        for u in units[1:]:
            out.append(place({(p, q): u, (q, p): u}))
    return out


def right_scalar(k: int, q) -> np.ndarray:
    """Right multiplication by the unit quaternion ``q`` on H^k."""
    return np.kron(np.eye(k), quat_right(q))


def _form_tensor(entries, n, degree):
    t = np.zeros((n,) * degree)
    for *idx, val in entries:
        for perm in itertools.permutations(range(degree)):
            sign = _perm_sign(perm)
            t[tuple(idx[i] for i in perm)] = sign * val
    return t


def _perm_sign(perm) -> int:
    sign, seen = 1, list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def _stabilizer(form: np.ndarray) -> list:
    n, degree = form.shape[0], form.ndim
    basis = so_basis(n)
    cols = []
    for xi in basis:
        act = np.zeros_like(form)
        for slot in range(degree):
            act += np.moveaxis(np.tensordot(xi.T, form, axes=([1], [slot])), 0, slot)
        cols.append(act.ravel())
    kernel = null_space(np.array(cols).T, rcond=1e-10)
    mats = [sum(c * b for c, b in zip(col, basis)) for col in kernel.T]
    return mats


def g2_form() -> np.ndarray:
    return _form_tensor(G2_FORM, 7, 3)


def hodge_star_3form_7(entries) -> list:
    """(i, j, k, l, value) entries of the Hodge dual of a 3-form given by sorted-triple entries."""
    out = []
    for a, b, c, val in entries:
        rest = tuple(i for i in range(7) if i not in (a, b, c))
        out.append((*rest, val * _perm_sign((a, b, c) + rest)))
    return out


def cayley_form() -> np.ndarray:
    """e0 ^ phi + *phi on R^8 with phi shifted to indices 1..7."""
    entries = [(0, a + 1, b + 1, c + 1, v) for a, b, c, v in G2_FORM]
    entries += [(i + 1, j + 1, k + 1, l + 1, v) for i, j, k, l, v in hodge_star_3form_7(G2_FORM)]
    return _form_tensor(entries, 8, 4)


@lru_cache(maxsize=None)
def _g2_cached():
    return tuple(_stabilizer(g2_form()))


@lru_cache(maxsize=None)
def _spin7_cached():
    return tuple(_stabilizer(cayley_form()))


def g2_basis() -> list:
    basis = list(_g2_cached())
    if len(basis) != 14:
        raise RuntimeError(f"g2 stabilizer has dimension {len(basis)}")
    return basis


def spin7_basis() -> list:
    basis = list(_spin7_cached())
    if len(basis) != 21:
        raise RuntimeError(f"spin(7) stabilizer has dimension {len(basis)}")
    return basis
