"""Subalgebras of the stabilizer algebra of a null line.

Elements are triples (a, X, v) with matrix

    [[a, v^T,  0],
     [0,  X,  -v],
     [0,  0,  -a]]

in the null frame (l, e_1, ..., e_n, l*).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from ._linalg import intersect, null_space, orth, span_residual
from .errors import (
    EpimorphismDeficiency,
    HolonomyError,
    IndecomposabilityError,
    NotSubalgebraError,
    PreconditionError,
)
from .minkowski import (
    LORENTZ_TOL,
    ParabolicElement,
    check_lorentz,
    decompose_parabolic,
    gram_matrix,
    group_closure,
    lorentz_inverse,
    translation,
)

SURJECTIVE_TOL = 1e-7


@dataclass(frozen=True)
class ParabolicAlgebraElement:
    a: float
    X: np.ndarray
    v: np.ndarray

    @property
    def n(self) -> int:
        return self.v.size

    @property
    def matrix(self) -> np.ndarray:
        return algebra_matrix(self.a, self.X, self.v)

    @classmethod
    def from_matrix(cls, m, tol: float = LORENTZ_TOL) -> "ParabolicAlgebraElement":
        m = np.asarray(m, dtype=float)
        elem = cls(float(m[0, 0]), m[1:-1, 1:-1].copy(), m[0, 1:-1].copy())
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(elem.matrix - m).max() > tol * scale:
            raise HolonomyError("matrix does not lie in the stabilizer algebra of the null line")
        return elem


def algebra_matrix(a, X, v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    X = np.asarray(X, dtype=float).reshape(v.size, v.size)
    m = np.zeros((v.size + 2, v.size + 2))
    m[0, 0] = a
    m[0, 1:-1] = v
    m[1:-1, 1:-1] = X
    m[1:-1, -1] = -v
    m[-1, -1] = -a
    return m


def make_algebra_element(a, X, v, tol: float = LORENTZ_TOL) -> ParabolicAlgebraElement:
    v = np.asarray(v, dtype=float).reshape(-1)
    X = np.asarray(X, dtype=float).reshape(v.size, v.size)
    if np.abs(X + X.T).max() > tol:
        raise ValueError("X must be skew-symmetric")
    return ParabolicAlgebraElement(float(a), X.copy(), v.copy())


def in_lorentz_algebra(m, tol: float = LORENTZ_TOL) -> bool:
    g = gram_matrix(m.shape[0] - 2)
    return float(np.abs(m.T @ g + g @ m).max()) <= tol


def bracket(x: ParabolicAlgebraElement, y: ParabolicAlgebraElement) -> ParabolicAlgebraElement:
    mx, my = x.matrix, y.matrix
    return ParabolicAlgebraElement.from_matrix(mx @ my - my @ mx)


def exp_element(elem: ParabolicAlgebraElement) -> ParabolicElement:
    return decompose_parabolic(expm(elem.matrix))


@dataclass
class TypeReport:
    type_tag: int
    n: int
    g_basis: list
    center_basis: list
    derived_basis: list
    has_scaling: bool
    translation_basis: np.ndarray  # columns spanning the translations contained in h
    complement_basis: np.ndarray  # columns spanning R^k, empty unless type 4
    phi: np.ndarray | None = None  # phi(Z) = <phi, Z>, phi lies in the center
    psi: np.ndarray | None = None  # psi(Z) = psi @ Z.ravel(), values in R^k inside R^n

    @property
    def k(self) -> int:
        return self.complement_basis.shape[1]

    def phi_of(self, Z) -> float:
        return float(np.sum(self.phi * Z))

    def psi_of(self, Z) -> np.ndarray:
        return self.psi @ np.asarray(Z).ravel()


def _span_of_matrices(mats, atol):
    if not mats:
        return []
    n = mats[0].shape[0]
    basis = orth(np.array([m.ravel() for m in mats]).T, atol)
    return [basis[:, j].reshape(n, n) for j in range(basis.shape[1])]


def _as_columns(mats, size):
    if not mats:
        return np.zeros((size, 0))
    return np.array([m.ravel() for m in mats]).T


def lie_center_and_derived(g_basis, atol=1e-9):
    """Center and derived algebra of the matrix Lie algebra spanned by ``g_basis``."""
    if not g_basis:
        return [], []
    n = g_basis[0].shape[0]
    r = len(g_basis)
    stacked = np.zeros((r * n * n, r))
    brackets = []
    for j, x in enumerate(g_basis):
        for k, y in enumerate(g_basis):
            c = x @ y - y @ x
            stacked[k * n * n:(k + 1) * n * n, j] = c.ravel()
            if j < k:
                brackets.append(c)
    coeffs = null_space(stacked, atol)
    center = [sum(c[j] * g_basis[j] for j in range(r)) for c in coeffs.T]
    center = _span_of_matrices(center, atol)
    derived = _span_of_matrices(brackets, atol)
    return center, derived


def check_bracket_closed(mats, tol: float = 1e-9):
    span = orth(np.array([m.ravel() for m in mats]).T, tol)
    for i, x in enumerate(mats):
        for y in mats[i + 1:]:
            c = x @ y - y @ x
            if span_residual(span, c.ravel()) > tol * max(1.0, np.abs(c).max()):
                raise NotSubalgebraError("basis is not closed under the bracket")
    return span


def _fit_linear_map(inputs, outputs, domain_basis, tol):
    """Least-squares linear map on span(domain_basis) taking inputs to outputs.

    ``inputs`` are flattened matrices (columns), ``outputs`` columns of values.
    Returns the ambient matrix L with L @ z = value for z in the domain.
    """
    coords = domain_basis.T @ inputs
    sol, *_ = np.linalg.lstsq(coords.T, outputs.T, rcond=None)
    residual = np.abs(coords.T @ sol - outputs.T).max() if outputs.size else 0.0
    if residual > tol:
        raise IndecomposabilityError(
            "coupling part is not a function of the orthogonal part (residual %.2e)" % residual)
    return sol.T @ domain_basis.T


def classify_type(basis, tol: float = 1e-9) -> TypeReport:
    """Tag the span of ``basis`` with its type 1-4 and recover the coupling maps."""
    basis = [b if isinstance(b, ParabolicAlgebraElement) else ParabolicAlgebraElement.from_matrix(b)
             for b in basis]
    if not basis:
        raise IndecomposabilityError("empty algebra acts decomposably")
    n = basis[0].n
    mats = [b.matrix for b in basis]
    span = check_bracket_closed(mats, tol)
    dim_n = n + 2
    elems = [ParabolicAlgebraElement.from_matrix(span[:, j].reshape(dim_n, dim_n))
             for j in range(span.shape[1])]
    av = np.array([e.a for e in elems])
    X = np.array([e.X.ravel() for e in elems]).T  # n^2 x r
    V = np.array([e.v for e in elems]).T  # n x r

    if np.linalg.matrix_rank(V, tol) < n:
        raise IndecomposabilityError("projection to the translation part is not onto")
    head = np.vstack([av[None, :], X])
    combos = null_space(head, tol)
    translations = orth(V @ combos, tol) if combos.shape[1] else np.zeros((n, 0))
    scaling = algebra_matrix(1.0, np.zeros((n, n)), np.zeros(n)).ravel()
    has_scaling = span_residual(span, scaling) < 10 * tol

    g_basis = _span_of_matrices([e.X for e in elems], tol)
    center, derived = lie_center_and_derived(g_basis, tol)
    if len(center) + len(derived) != len(g_basis):
        raise IndecomposabilityError("orthogonal projection is not reductive")
    g_cols = _as_columns(g_basis, n * n)
    z_cols = _as_columns(center, n * n)
    d_cols = _as_columns(derived, n * n)
    k = n - translations.shape[1]

    report = TypeReport(0, n, g_basis, center, derived, has_scaling, translations, np.zeros((n, 0)))
    if k == 0:
        if has_scaling:
            report.type_tag = 1
            return report
        if np.abs(av).max() <= tol:
            report.type_tag = 2
            return report
        phi = _fit_linear_map(X, av[None, :], g_cols, 10 * tol).reshape(n, n)
        if d_cols.shape[1] and np.abs(d_cols.T @ phi.ravel()).max() > 10 * tol:
            raise IndecomposabilityError("scaling coupling does not vanish on the derived algebra")
        phi = (z_cols @ (z_cols.T @ phi.ravel())).reshape(n, n)
        if np.linalg.norm(phi) <= SURJECTIVE_TOL:
            raise IndecomposabilityError("scaling coupling is not surjective")
        report.type_tag = 3
        report.phi = phi
        return report
    if k == n:
        raise IndecomposabilityError("algebra contains no translations")
    if np.abs(av).max() > tol:
        raise IndecomposabilityError("scaling part present together with a partial translation ideal")
    comp = null_space(translations.T, tol)
    for x in g_basis:
        if np.abs(x @ comp).max() > 10 * tol:
            raise IndecomposabilityError("orthogonal part acts on the coupled translation block")
    psi_k = _fit_linear_map(X, comp.T @ V, g_cols, 10 * tol)  # k x n^2
    if d_cols.shape[1] and np.abs(psi_k @ d_cols).max() > 10 * tol:
        raise IndecomposabilityError("translation coupling does not vanish on the derived algebra")
    psi_k = psi_k @ z_cols @ z_cols.T
    sv = np.linalg.svd(psi_k @ z_cols, compute_uv=False) if z_cols.shape[1] else np.zeros(0)
    if sv.size < k or sv[k - 1] <= SURJECTIVE_TOL:
        raise IndecomposabilityError("translation coupling is not surjective onto R^k")
    report.type_tag = 4
    report.complement_basis = comp
    report.psi = comp @ psi_k
    return report


def decouple(P, report: TypeReport, tol: float = LORENTZ_TOL) -> ParabolicElement:
    """Element Q of the connected group of ``report`` with P*Q block-diagonal."""
    if not isinstance(P, ParabolicElement):
        P = decompose_parabolic(P, tol)
    n = report.n
    if report.type_tag in (1, 2):
        return translation(-P.x / P.a)
    if report.type_tag == 3:
        s = np.log(abs(P.a))
        phi = report.phi
        Z = -s * phi / float(np.sum(phi * phi))
        q1 = ParabolicElement(np.exp(report.phi_of(Z)), expm(Z), np.zeros(n))
        p1 = P @ q1
        return q1 @ translation(-p1.x / p1.a)
    if report.type_tag == 4:
        t = report.translation_basis
        w = t @ (t.T @ P.x)
        q1 = translation(-w / P.a)
        u = (P @ q1).x
        z_cols = _as_columns(report.center_basis, n * n)
        images = report.psi @ z_cols
        target = -u / P.a
        coeffs, *_ = np.linalg.lstsq(images, target, rcond=None)
        if np.abs(images @ coeffs - target).max() > max(tol, 1e-9) * max(1.0, np.abs(target).max()):
            raise EpimorphismDeficiency("psi(X) = -u/a has no solution in the center")
        Z = (z_cols @ coeffs).reshape(n, n)
        q2 = exp_element(ParabolicAlgebraElement(0.0, Z, report.psi_of(Z)))
        return q1 @ q2
    raise ValueError(f"unknown type tag {report.type_tag}")


@dataclass
class NullLines:
    lines: list
    all_lines: bool = False
    family: np.ndarray | None = None  # invariant subspace carrying infinitely many null lines

    def __len__(self):
        return len(self.lines)


def _real_eigen_clusters(m, cluster_tol=1e-4):
    vals = np.linalg.eigvals(m)
    real = sorted(v.real for v in vals if abs(v.imag) < cluster_tol)
    clusters = []
    for v in real:
        if clusters and abs(v - clusters[-1][-1]) < cluster_tol:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    return [float(np.mean(c)) for c in clusters]


def invariant_null_lines(generators, tol: float = LORENTZ_TOL, eig_tol: float = 1e-6) -> NullLines:
    """Null lines that are eigenlines of every generator."""
    gens = [check_lorentz(g, tol) for g in generators]
    dim = gens[0].shape[0]
    g = gram_matrix(dim - 2)
    spaces = [np.eye(dim)]
    for m in gens:
        if np.abs(m - m[0, 0] * np.eye(dim)).max() < tol:
            continue
        new = []
        for space in spaces:
            for mu in _real_eigen_clusters(m):
                eig = null_space(m - mu * np.eye(dim), eig_tol)
                inter = intersect(space, eig, eig_tol)
                if inter.shape[1] and not any(
                        s.shape == inter.shape and np.linalg.matrix_rank(np.hstack([s, inter]), eig_tol) == s.shape[1]
                        for s in new):
                    new.append(inter)
        spaces = new
    if len(spaces) == 1 and spaces[0].shape[1] == dim:
        return NullLines([], all_lines=True, family=spaces[0])
    lines = []
    family = None
    for space in spaces:
        form = space.T @ g @ space
        w, vecs = np.linalg.eigh(form)
        if space.shape[1] == 1:
            if abs(form[0, 0]) < eig_tol:
                lines.append(space[:, 0])
            continue
        pos, neg = (w > eig_tol).sum(), (w < -eig_tol).sum()
        if pos and neg:
            family = space
        elif pos + neg < len(w):
            radical = space @ vecs[:, np.abs(w) <= eig_tol]
            if radical.shape[1] == 1:
                lines.append(radical[:, 0])
    unit = []
    for line in lines:
        line = line / np.linalg.norm(line)
        if not any(abs(abs(line @ u) - 1) < 1e-8 for u in unit):
            unit.append(line)
    return NullLines(unit, family=family)


@dataclass
class NormalizerResult:
    normalizes: bool
    witness: np.ndarray | None
    reason: str

    def __bool__(self):
        return self.normalizes


def normalizer_check(h0_generators, g, tol: float = 1e-8, word_len: int = 2) -> NormalizerResult:
    """Does ``g`` normalize the group generated by ``h0_generators`` and fix its null line?"""
    lines = invariant_null_lines(h0_generators)
    if lines.all_lines or lines.family is not None or len(lines) != 1:
        raise PreconditionError("connected group does not fix a unique null line")
    ell = lines.lines[0]
    g = check_lorentz(g)
    g_inv = lorentz_inverse(g)
    w = g_inv @ ell
    if np.linalg.norm(w - (w @ ell) * ell) > tol * max(1.0, np.linalg.norm(w)):
        return NormalizerResult(False, w, "g^-1 moves the invariant null line")
    sample = group_closure(h0_generators, word_len)
    span = orth(np.array([e.ravel() for e in sample.elements]).T, 1e-10)
    for h in sample.generators:
        c = g @ h @ g_inv
        if span_residual(span, c.ravel()) > tol * max(1.0, np.abs(c).max()):
            return NormalizerResult(False, c, "conjugate of a generator leaves the sampled group span")
    return NormalizerResult(True, None, "normalizes")
