"""Clifford modules, spin lifts of orthogonal groups and fixed spinors.

Convention: in ``clifford_generators(p, q)`` the first p generators square to
-Id and the last q to +Id. The spinor module of R^n uses (n, 0), so unit
vectors square to -1; the Lorentz module of R^{1,n+1} uses (n+1, 1) and is
built as Delta_n (x) Delta_{1,1}.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import expm, schur

from .errors import PreconditionError

NULL_TOL = 1e-9
MAX_SIGN_SEARCH = 8

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Delta_{1,1} in the basis (u1, u2): s = (l + l*)/sqrt2 squares to -1, t = (l - l*)/sqrt2 to +1
_S11 = np.array([[0, -1], [1, 0]], dtype=complex)
_T11 = np.array([[0, 1], [1, 0]], dtype=complex)
_OMEGA = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True, eq=False)
class SpinRep:
    signature: tuple
    gammas: tuple

    @property
    def dim(self) -> int:
        return self.gammas[0].shape[0] if self.gammas else 1

    @property
    def signs(self) -> tuple:
        p, q = self.signature
        return (-1,) * p + (1,) * q

    def relation_residual(self) -> float:
        worst = 0.0
        eye = np.eye(self.dim)
        for i, gi in enumerate(self.gammas):
            for j, gj in enumerate(self.gammas):
                target = 2 * self.signs[i] * eye if i == j else 0 * eye
                worst = max(worst, float(np.abs(gi @ gj + gj @ gi - target).max()))
        return worst

    def vector(self, v) -> np.ndarray:
        """Clifford multiplication by the vector with coordinates ``v``."""
        return sum(c * g for c, g in zip(np.asarray(v, dtype=float), self.gammas))

    @property
    def is_lorentz(self) -> bool:
        return self.signature[1] == 1 and self.signature[0] >= 1

    def null_elements(self):
        """(l, l*) for a Lorentz module: the last two generators span the null plane."""
        if not self.is_lorentz:
            raise PreconditionError("null elements exist only for a Lorentz module")
        s, t = self.gammas[-2], self.gammas[-1]
        return (s + t) / math.sqrt(2), (s - t) / math.sqrt(2)


def _euclidean_gammas(count: int):
    """Hermitian generators squaring to +Id via iterated Pauli tensors."""
    m = count // 2
    out = []
    for j in range(m):
        for mid in (_X, _Y):
            factors = [_Z] * j + [mid] + [_I2] * (m - j - 1)
            out.append(_kron_all(factors))
    if count % 2:
        out.append(_kron_all([_Z] * m) if m else np.eye(1, dtype=complex))
    return out


def _kron_all(factors):
    out = np.eye(1, dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


@lru_cache(maxsize=None)
def clifford_generators(p: int, q: int) -> SpinRep:
    if p < 0 or q < 0 or p + q < 1:
        raise ValueError("signature must have p + q >= 1")
    if q == 1 and p >= 1:
        inner = _euclidean_gammas(p - 1)
        dim = inner[0].shape[0] if inner else 1
        gammas = [np.kron(1j * g, _OMEGA) for g in inner]
        gammas += [np.kron(np.eye(dim), _S11), np.kron(np.eye(dim), _T11)]
    else:
        base = _euclidean_gammas(p + q)
        gammas = [1j * g for g in base[:p]] + base[p:]
    for g in gammas:
        g.setflags(write=False)
    return SpinRep((p, q), tuple(gammas))


def spinor_module(n: int) -> SpinRep:
    return clifford_generators(n, 0)


def lorentz_module(n: int) -> SpinRep:
    """Delta_{1,n+1} = Delta_n (x) Delta_{1,1}; generators e_1..e_n, s, t."""
    return clifford_generators(n + 1, 1)


def algebra_lift(xi: np.ndarray, rep: SpinRep) -> np.ndarray:
    """Image of xi in so(n) in the spin algebra: -1/4 sum xi_jk g_j g_k."""
    n = xi.shape[0]
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for j in range(n):
        for k in range(n):
            if xi[j, k] != 0.0:
                out -= 0.25 * xi[j, k] * rep.gammas[j] @ rep.gammas[k]
    return out


def conjugation_residual(s: np.ndarray, A: np.ndarray, rep: SpinRep) -> float:
    """max |s g(e_i) s^-1 - g(A e_i)| over basis vectors."""
    s_inv = np.linalg.inv(s)
    worst = 0.0
    for i in range(A.shape[0]):
        lhs = s @ rep.gammas[i] @ s_inv
        worst = max(worst, float(np.abs(lhs - rep.vector(A[:, i])).max()))
    return worst


def _check_special_orthogonal(A, tol=1e-9) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or np.abs(A.T @ A - np.eye(A.shape[0])).max() > tol:
        raise PreconditionError("matrix is not orthogonal")
    if np.linalg.det(A) < 0:
        raise PreconditionError("not in SO(n), no spin lift")
    return A


def rotation_generator(A: np.ndarray) -> np.ndarray:
    """A skew matrix xi with expm(xi) = A for A in SO(n), from the real Schur form."""
    A = _check_special_orthogonal(A)
    n = A.shape[0]
    T, Zm = schur(A, output="real")
    blocks = np.zeros((n, n))
    i = 0
    minus = []
    while i < n:
        if i + 1 < n and abs(T[i + 1, i]) > 1e-12:
            theta = math.atan2(T[i + 1, i], T[i, i])
            blocks[i + 1, i], blocks[i, i + 1] = theta, -theta
            i += 2
        else:
            if T[i, i] < 0:
                minus.append(i)
            i += 1
    for a, b in zip(minus[::2], minus[1::2]):
        blocks[b, a], blocks[a, b] = math.pi, -math.pi
    xi = Zm @ blocks @ Zm.T
    return 0.5 * (xi - xi.T)


@dataclass
class SpinLift:
    element: np.ndarray
    residual: float

    @property
    def both(self):
        return (self.element, -self.element)


def spin_lift_element(A, rep: SpinRep) -> SpinLift:
    A = _check_special_orthogonal(A)
    if A.shape[0] != len(rep.gammas) and not (rep.is_lorentz and A.shape[0] == len(rep.gammas) - 2):
        raise ValueError("matrix size does not match the module")
    s = expm(algebra_lift(rotation_generator(A), rep))
    return SpinLift(s, conjugation_residual(s, A, rep))


@dataclass(frozen=True)
class Relation:
    """A word in the generators (1-based, negative for inverses) and an optional target.

    The target, if given, is xi in the connected algebra with expm(xi) equal to
    the word; its lift is expm of the lifted xi. Without a target the word must be Id.
    """
    word: tuple
    target: np.ndarray | None = None

    def label(self) -> str:
        return " ".join(f"g{abs(i)}" + ("^-1" if i < 0 else "") for i in self.word)


def _as_relation(r) -> Relation:
    if isinstance(r, Relation):
        return r
    return Relation(tuple(int(i) for i in r))


def _evaluate(word, mats, inverses):
    out = np.eye(mats[0].shape[0], dtype=mats[0].dtype)
    for i in word:
        out = out @ (mats[i - 1] if i > 0 else inverses[-i - 1])
    return out


def _kernel(blocks, dim, tol=NULL_TOL) -> np.ndarray:
    if not blocks:
        return np.eye(dim, dtype=complex)
    stacked = np.vstack(blocks)
    _, sv, vh = np.linalg.svd(stacked)
    sv = np.r_[sv, np.zeros(dim - sv.size)]
    return vh[sv < tol].conj().T


@dataclass
class LiftedGroup:
    rep: SpinRep
    generators: list
    algebra: list
    lifts: list
    algebra_lifts: list
    signs: tuple
    relations: list
    fixed_basis: np.ndarray
    conjugation_residuals: list
    relation_residuals: list
    alternatives: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return int(self.fixed_basis.shape[1])


@dataclass
class NoLift:
    relation: Relation
    reason: str

    def __bool__(self):
        return False


def fixed_subspace(rep: SpinRep, lifts, algebra_lifts, tol=NULL_TOL) -> np.ndarray:
    eye = np.eye(rep.dim)
    blocks = [s - eye for s in lifts] + list(algebra_lifts)
    return _kernel(blocks, rep.dim, tol)


def lift_group(generators=(), relations=(), rep: SpinRep | None = None, algebra=(), n: int | None = None,
               signs: tuple | None = None):
    """Spin lift of the group generated by ``generators`` and exp(``algebra``).

    Each generator is first lifted through its principal logarithm. Sign
    assignments are then tried in order, all-plus first, and the first one sending
    every relation to its target is returned. The fixed dimension of every other
    valid assignment is kept in ``alternatives``. Pass ``signs`` to pin one choice.
    """
    generators = [_check_special_orthogonal(g) for g in generators]
    algebra = [np.asarray(x, dtype=float) for x in algebra]
    if n is None:
        n = (generators or algebra)[0].shape[0] if (generators or algebra) else len(rep.gammas)
    rep = rep or spinor_module(n)
    relations = [_as_relation(r) for r in relations]
    inverses = [g.T for g in generators]
    for rel in relations:
        value = _evaluate(rel.word, generators, inverses)
        target = np.eye(n) if rel.target is None else expm(rel.target)
        if np.abs(value - target).max() > 1e-8:
            raise ValueError(f"relation {rel.label()} does not hold in SO(n)")
    if len(generators) > MAX_SIGN_SEARCH and signs is None:
        raise PreconditionError(f"sign search over more than {MAX_SIGN_SEARCH} generators not attempted")
    base = [spin_lift_element(g, rep) for g in generators]
    algebra_lifts = [algebra_lift(x, rep) for x in algebra]
    targets = [np.eye(rep.dim, dtype=complex) if r.target is None else expm(algebra_lift(r.target, rep))
               for r in relations]
    candidates = [tuple(signs)] if signs is not None else itertools.product((1, -1), repeat=len(generators))
    found = None
    alternatives = {}
    obstruction = None
    for choice in candidates:
        lifts = [sg * b.element for sg, b in zip(choice, base)]
        inv = [np.linalg.inv(s) for s in lifts]
        residuals, ok = [], True
        for rel, tgt in zip(relations, targets):
            value = _evaluate(rel.word, lifts, inv) if lifts else np.eye(rep.dim, dtype=complex)
            plus = float(np.abs(value - tgt).max())
            minus = float(np.abs(value + tgt).max())
            if min(plus, minus) > 1e-8:
                raise ValueError(f"relation {rel.label()} is not +-target in the spin realization")
            residuals.append(plus)
            if plus > 1e-8:
                ok = False
                obstruction = obstruction or rel
        if not ok:
            continue
        fixed = fixed_subspace(rep, lifts, algebra_lifts)
        alternatives[choice] = int(fixed.shape[1])
        if found is None:
            found = LiftedGroup(rep, generators, algebra, lifts, algebra_lifts, choice, relations, fixed,
                                [b.residual for b in base], residuals)
    if found is None:
        return NoLift(obstruction, f"relation {obstruction.label()} lifts to -Id for every sign choice")
    found.alternatives = alternatives
    return found


def fixed_spinors(lifted: LiftedGroup):
    return lifted.fixed_basis, lifted.N


@dataclass
class LorentzCorrespondence:
    riemannian_dim: int
    lorentz_dim: int
    v1_norm: float
    basis: np.ndarray

    @property
    def equal(self) -> bool:
        return self.riemannian_dim == self.lorentz_dim


def lorentz_fixed_correspondence(lifted: LiftedGroup, rep11: SpinRep | None = None) -> LorentzCorrespondence:
    """Fixed spinors of G x| R^n acting on Delta_{1,n+1} = Delta_n (x) Delta_{1,1}.

    Translations act by 1 + l.x; G by Phi(g) (x) Id.
    """
    rep11 = rep11 or clifford_generators(1, 1)
    n = len(lifted.rep.gammas)
    big = lorentz_module(n)
    eye2 = np.eye(2)
    lifts = [np.kron(s, eye2) for s in lifted.lifts]
    alg = [np.kron(x, eye2) for x in lifted.algebra_lifts]
    ell, _ = big.null_elements()
    translations = [ell @ big.gammas[i] for i in range(n)]
    blocks = [s - np.eye(big.dim) for s in lifts] + alg + translations
    basis = _kernel(blocks, big.dim)
    # u1 components sit at even positions of the (Delta_n, Delta_{1,1}) tensor layout
    v1 = float(np.abs(basis[0::2, :]).max()) if basis.size else 0.0
    return LorentzCorrespondence(lifted.N, int(basis.shape[1]), v1, basis)


def serialize_complex(m: np.ndarray) -> list:
    """Rows of interleaved (re, im) pairs."""
    return [[float(x) for z in row for x in (z.real, z.imag)] for row in np.atleast_2d(m)]
