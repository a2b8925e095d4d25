"""Random parabolic subalgebras of each type, for self-checks and tests."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.stats import special_ortho_group

from .algebra import ParabolicAlgebraElement
from .minkowski import ParabolicElement, block_diagonal, decompose_parabolic


def _rotation(n, i, j):
    m = np.zeros((n, n))
    m[i, j], m[j, i] = -1.0, 1.0
    return m


def _unit(n, i):
    e = np.zeros(n)
    e[i] = 1.0
    return e


@dataclass
class SyntheticAlgebra:
    type_tag: int
    basis: list  # ParabolicAlgebraElement

    @property
    def n(self) -> int:
        return self.basis[0].n


def synthetic_algebra(type_tag: int, rng: np.random.Generator) -> SyntheticAlgebra:
    """Algebra of the requested type in a random screen frame with a random basis."""
    if type_tag in (1, 2):
        n = int(rng.integers(2, 5))
        g = [_rotation(n, 0, 1)] if rng.random() < 0.5 else [_rotation(n, i, j) for i in range(3 if n >= 3 else 2)
                                                              for j in range(i + 1, 3 if n >= 3 else 2)]
        elems = [ParabolicAlgebraElement(0.0, x, np.zeros(n)) for x in g]
        elems += [ParabolicAlgebraElement(0.0, np.zeros((n, n)), _unit(n, i)) for i in range(n)]
        if type_tag == 1:
            elems.append(ParabolicAlgebraElement(1.0, np.zeros((n, n)), np.zeros(n)))
    elif type_tag == 3:
        n = int(rng.choice([2, 4]))
        g = [_rotation(n, 2 * i, 2 * i + 1) for i in range(n // 2)]
        phi = rng.normal(size=len(g))
        phi[0] = np.sign(phi[0]) * max(abs(phi[0]), 0.3)
        elems = [ParabolicAlgebraElement(float(c), x, np.zeros(n)) for c, x in zip(phi, g)]
        elems += [ParabolicAlgebraElement(0.0, np.zeros((n, n)), _unit(n, i)) for i in range(n)]
    elif type_tag == 4:
        pairs = int(rng.integers(1, 3))
        n = 2 * pairs + 1
        g = [_rotation(n, 2 * i, 2 * i + 1) for i in range(pairs)]
        coupling = rng.normal(size=pairs)
        coupling[0] = np.sign(coupling[0]) * max(abs(coupling[0]), 0.3)
        elems = [ParabolicAlgebraElement(0.0, x, float(c) * _unit(n, n - 1)) for c, x in zip(coupling, g)]
        elems += [ParabolicAlgebraElement(0.0, np.zeros((n, n)), _unit(n, i)) for i in range(n - 1)]
    else:
        raise ValueError("type tag must be 1, 2, 3 or 4")
    R = special_ortho_group.rvs(n, random_state=rng) if n > 1 else np.eye(1)
    frame = block_diagonal(1.0, R)
    frame_inv = np.linalg.inv(frame)
    mats = [frame @ e.matrix @ frame_inv for e in elems]
    mix = rng.normal(size=(len(mats), len(mats)))
    while abs(np.linalg.det(mix)) < 0.1:
        mix = rng.normal(size=(len(mats), len(mats)))
    mixed = [sum(mix[i, j] * mats[j] for j in range(len(mats))) for i in range(len(mats))]
    mixed = [m / np.linalg.norm(m) for m in mixed]
    return SyntheticAlgebra(type_tag, [ParabolicAlgebraElement.from_matrix(m) for m in mixed])


def random_group_element(alg: SyntheticAlgebra, rng: np.random.Generator, flip: bool = True,
                         factors: int = 3) -> ParabolicElement:
    """Product of exponentials of random algebra elements, optionally times diag(-1, 1, -1)."""
    D = alg.n + 2
    m = np.eye(D)
    for _ in range(factors):
        coeffs = rng.normal(scale=0.7, size=len(alg.basis))
        xi = sum(c * b.matrix for c, b in zip(coeffs, alg.basis))
        m = m @ expm(xi)
    if flip and rng.random() < 0.5:
        m = block_diagonal(-1.0, np.eye(alg.n)) @ m
    return decompose_parabolic(m, 1e-7)
