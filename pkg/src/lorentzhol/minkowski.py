"""Linear algebra of O(1, n+1) in a null frame and of the stabilizer of a null line.

Matrices act on the frame (l, e_1, ..., e_n, l*) where l and l* are null with
<l, l*> = 1.  The stabilizer P of the line R*l consists of the block matrices

    [[a, x^T, -|x|^2 / (2a)],
     [0,  A,   -A x / a    ],
     [0,  0,    1 / a      ]]

with a != 0, A orthogonal and x in R^n.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import nearest_element
from .errors import HolonomyError, NotLorentzError, NotParabolicError

LORENTZ_TOL = 1e-9
DEDUP_TOL = 1e-8


def gram_matrix(n: int) -> np.ndarray:
    """Gram matrix of the null frame (l, e_1, ..., e_n, l*)."""
    if n < 1:
        raise ValueError("screen dimension must be at least 1")
    g = np.zeros((n + 2, n + 2))
    g[0, -1] = g[-1, 0] = 1.0
    g[1:-1, 1:-1] = np.eye(n)
    return g


def lorentz_defect(m: np.ndarray) -> float:
    """Max-abs entry of M^T G M - G."""
    m = np.asarray(m, dtype=float)
    g = gram_matrix(m.shape[0] - 2)
    return float(np.abs(m.T @ g @ m - g).max())


def is_lorentz(m, tol: float = LORENTZ_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and m.shape[0] >= 3 and lorentz_defect(m) <= tol


def check_lorentz(m, tol: float = LORENTZ_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if not (m.ndim == 2 and m.shape[0] == m.shape[1] and m.shape[0] >= 3):
        raise NotLorentzError(f"expected a square matrix of size >= 3, got shape {m.shape}")
    defect = lorentz_defect(m)
    if defect > tol:
        raise NotLorentzError(f"matrix is not Lorentz: |M^T G M - G| = {defect:.3e} > {tol:.1e}")
    return m


def lorentz_inverse(m: np.ndarray) -> np.ndarray:
    """Inverse of a Lorentz matrix, G M^T G."""
    g = gram_matrix(m.shape[0] - 2)
    return g @ m.T @ g


@dataclass(frozen=True)
class ParabolicElement:
    a: float
    A: np.ndarray
    x: np.ndarray

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return parabolic_matrix(self.a, self.A, self.x)

    def __matmul__(self, other: "ParabolicElement") -> "ParabolicElement":
        return ParabolicElement(
            self.a * other.a, self.A @ other.A, self.a * other.x + other.A.T @ self.x
        )

    def inverse(self) -> "ParabolicElement":
        return ParabolicElement(1.0 / self.a, self.A.T, -self.A @ self.x / self.a)


def parabolic_matrix(a: float, A: np.ndarray, x: np.ndarray) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    x = np.asarray(x, dtype=float).reshape(-1)
    n = A.shape[0]
    m = np.zeros((n + 2, n + 2))
    m[0, 0] = a
    m[0, 1:-1] = x
    m[0, -1] = -0.5 * (x @ x) / a
    m[1:-1, 1:-1] = A
    m[1:-1, -1] = -(A @ x) / a
    m[-1, -1] = 1.0 / a
    return m


def make_parabolic(a: float, A, x, tol: float = LORENTZ_TOL) -> ParabolicElement:
    a = float(a)
    if a == 0.0:
        raise ValueError("scaling part must be nonzero")
    A = np.atleast_2d(np.asarray(A, dtype=float))
    x = np.asarray(x, dtype=float).reshape(-1)
    if A.shape != (x.size, x.size):
        raise ValueError(f"orthogonal part has shape {A.shape} but x has length {x.size}")
    if np.abs(A.T @ A - np.eye(x.size)).max() > tol:
        raise ValueError("orthogonal part is not orthogonal")
    return ParabolicElement(a, A.copy(), x.copy())


def translation(y) -> ParabolicElement:
    y = np.asarray(y, dtype=float).reshape(-1)
    return ParabolicElement(1.0, np.eye(y.size), y)


def block_diagonal(a: float, A) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    return parabolic_matrix(a, A, np.zeros(A.shape[0]))


def decompose_parabolic(m, tol: float = LORENTZ_TOL) -> ParabolicElement:
    """Split a Lorentz matrix fixing the line R*l into (a, A, x)."""
    m = check_lorentz(m, tol)
    scale = max(1.0, float(np.abs(m).max()))
    if np.abs(m[1:, 0]).max() > tol * scale:
        raise NotParabolicError("matrix does not stabilize the null line R*l")
    a = float(m[0, 0])
    A = m[1:-1, 1:-1].copy()
    x = m[0, 1:-1].copy()
    if abs(a) < tol:
        raise NotParabolicError("vanishing scaling part")
    rebuilt = parabolic_matrix(a, A, x)
    if np.abs(rebuilt - m).max() > 10 * tol * scale * scale:
        raise NotParabolicError("matrix is not of parabolic block form")
    return ParabolicElement(a, A, x)


def pr_scale(m) -> float:
    return decompose_parabolic(m).a


def pr_orthogonal(m) -> np.ndarray:
    return decompose_parabolic(m).A


def pr_translation(m) -> np.ndarray:
    return decompose_parabolic(m).x


@dataclass
class GroupSample:
    generators: list
    elements: list
    growth: list
    saturated: bool
    likely_continuous: bool = False
    gaps: list = field(default_factory=list)
    tol: float = DEDUP_TOL

    @property
    def order(self) -> int | None:
        return len(self.elements) if self.saturated else None


def group_closure(generators, max_word_len: int, tol: float = DEDUP_TOL,
                  lorentz_tol: float = LORENTZ_TOL, max_elements: int = 20000) -> GroupSample:
    """Breadth-first enumeration of words in the generators and their inverses.

    ``growth[k]`` counts distinct elements of word length exactly k.  The sample is
    saturated when a whole BFS level adds nothing.  ``gaps[k]`` is the smallest
    distance between a level-k element and anything found earlier.  If the later
    levels of an unsaturated sample land ever closer to known elements, the sample
    is flagged as accumulating along a continuous direction.
    """
    gens = [check_lorentz(g, lorentz_tol) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    dim = gens[0].shape[0]
    letters = []
    for g in gens:
        letters.append(g)
        letters.append(lorentz_inverse(g))
    stack = np.zeros((64, dim, dim))
    stack[0] = np.eye(dim)
    count = 1
    frontier = [0]
    growth = [1]
    gaps = []
    saturated = False
    for _ in range(max_word_len):
        new = []
        gap = np.inf
        for idx in frontier:
            for letter in letters:
                cand = stack[idx] @ letter
                near, dist = nearest_element(stack, count, cand)
                if dist < tol:
                    continue
                gap = min(gap, dist)
                if count == stack.shape[0]:
                    stack = np.concatenate([stack, np.zeros_like(stack)])
                stack[count] = cand
                new.append(count)
                count += 1
                if count >= max_elements:
                    raise HolonomyError(f"group closure exceeded {max_elements} elements")
        growth.append(len(new))
        if not new:
            saturated = True
            break
        gaps.append(float(gap))
        frontier = new
    likely_continuous = False
    if not saturated and len(gaps) >= 4:
        half = len(gaps) // 2
        tail = min(gaps[half:])
        likely_continuous = tail < min(gaps[:half]) and tail < 0.1 * gaps[0]
    return GroupSample(gens, [stack[i].copy() for i in range(count)], growth, saturated,
                       likely_continuous, gaps, tol)


@dataclass
class DiscretePart:
    classes: list  # (a, A) pairs
    lower_bound_only: bool

    def __len__(self):
        return len(self.classes)


def discrete_part(sample: GroupSample, tol: float = DEDUP_TOL) -> DiscretePart:
    """Classes of the sampled elements modulo the translation factor R^n."""
    classes = []
    for m in sample.elements:
        p = decompose_parabolic(m)
        if not any(abs(p.a - a) < tol and np.abs(p.A - A).max() < tol for a, A in classes):
            classes.append((p.a, p.A))
    return DiscretePart(classes, lower_bound_only=not sample.saturated)

