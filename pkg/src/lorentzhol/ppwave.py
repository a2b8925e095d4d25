"""pp-wave type metrics 2 dv du + 2 f du^2 + sum dx_i^2 over a flat base.

Coordinates are ordered (v, x_1, ..., x_n, u); ``D = n + 2``.  Transports are
returned in the null frame (d_v, d_1, ..., d_n, d_u - f d_v), whose Gram
matrix is ``minkowski.gram_matrix(n)``.

Curvature uses the sign convention R(X, Y) = nabla_[X,Y] - [nabla_X, nabla_Y],
under which R(d_u, X)Y = Hess f(X, Y) d_v.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce

import numpy as np

from . import _kernels
from ._linalg import orth, span_residual
from .algebra import ParabolicAlgebraElement, in_lorentz_algebra
from .errors import DomainError, IntegrationFailure
from .expr import PolyExpr, stack_exprs
from .paths import PathSpec

DOMAINS = ("plane", "punctured", "half-plane")
ODE_TOL = 1e-10
HESSIAN_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PpWaveChart:
    n: int
    f: PolyExpr
    domain: str = "plane"
    periods: tuple = ()
    certificate: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.n + 2

    @property
    def v_free(self) -> bool:
        """Flag for d_v f = 0."""
        return not self.f.depends_on(0)

    @property
    def u_weighted(self) -> bool:
        return any(exps[-1] < 0 for exps, _, _ in self.f.terms())

    @property
    def coord_names(self):
        return ["v"] + [f"x{i + 1}" for i in range(self.n)] + ["u"]

    @cached_property
    def gradient_exprs(self):
        return [self.f.diff(j) for j in range(self.dim)]

    @cached_property
    def hessian_exprs(self):
        return [[g.diff(k) for k in range(self.dim)] for g in self.gradient_exprs]

    @cached_property
    def kernel_arrays(self):
        return stack_exprs([self.f] + self.gradient_exprs)

    def contains(self, point, margin: float = 0.0) -> bool:
        p = np.asarray(point, dtype=float)
        if self.domain == "plane":
            return True
        if self.domain == "punctured":
            return math.hypot(p[0], p[-1]) > margin
        return p[-1] > margin

    def require(self, point):
        if not self.contains(point):
            raise DomainError(f"point {np.asarray(point).tolist()} lies outside the {self.domain} domain")
        return np.asarray(point, dtype=float)

    def values(self, point):
        """f, its gradient and its Hessian at ``point`` (exact derivatives, float evaluation)."""
        p = self.require(point)
        f = self.f(p)
        grad = np.array([g(p) for g in self.gradient_exprs])
        hess = np.array([[h(p) for h in row] for row in self.hessian_exprs])
        return f, grad, hess

    def metric(self, point) -> np.ndarray:
        p = self.require(point)
        g = np.eye(self.dim)
        g[0, 0] = 0.0
        g[-1, -1] = 2.0 * self.f(p)
        g[0, -1] = g[-1, 0] = 1.0
        return g

    def frame(self, point) -> np.ndarray:
        """Columns: coordinate components of d_v, d_i, d_u - f d_v."""
        e = np.eye(self.dim)
        e[0, -1] = -self.f(self.require(point))
        return e

    def screen_hessian(self, point) -> np.ndarray:
        return self.values(point)[2][1:-1, 1:-1]


def ppwave_chart(f: PolyExpr, n: int | None = None, domain: str = "plane", periods=(),
                 certificate=None, divide_by_u2: bool = False, search_certificate: bool = True,
                 seed: int = 0) -> PpWaveChart:
    """Validate the data of a chart and attach a Hessian nondegeneracy certificate."""
    n = f.nvars - 2 if n is None else n
    if f.nvars != n + 2:
        raise ValueError(f"f has {f.nvars} variables, expected {n + 2}")
    if domain not in DOMAINS:
        raise ValueError(f"domain must be one of {DOMAINS}")
    if divide_by_u2:
        if domain != "half-plane":
            raise ValueError("the f/u^2 form needs the half-plane domain")
        f = PolyExpr(f.nvars, [(exps[:-1] + (exps[-1] - 2,), waves, c) for exps, waves, c in f.terms()])
    if domain != "half-plane" and any(exps[-1] < 0 for exps, _, _ in f.terms()):
        raise ValueError("negative powers of u need the half-plane domain")
    if any(exps[0] < 0 or any(e < 0 for e in exps[1:-1]) for exps, _, _ in f.terms()):
        raise ValueError("only u may carry negative exponents")
    periods = tuple(periods) if periods else (None,) * n
    if len(periods) != n:
        raise ValueError("one period entry (or None) per screen coordinate")
    chart = PpWaveChart(n, f, domain, periods, None)
    if certificate is not None:
        certificate = chart.require(certificate)
        if abs(np.linalg.det(chart.screen_hessian(certificate))) <= HESSIAN_TOL:
            raise ValueError("Hessian of f is degenerate at the certificate point")
    elif search_certificate:
        certificate = _find_certificate(chart, seed)
    return PpWaveChart(n, f, domain, periods, certificate)


def _find_certificate(chart: PpWaveChart, seed: int):
    rng = np.random.default_rng(seed)
    candidates = [np.r_[0.0, np.zeros(chart.n), 1.0]]
    candidates += [np.r_[rng.uniform(-1, 1, chart.n + 1), rng.uniform(0.5, 2.0)] for _ in range(16)]
    for p in candidates:
        if chart.contains(p) and abs(np.linalg.det(chart.screen_hessian(p))) > HESSIAN_TOL:
            return p
    return None


def flat_chart(n: int) -> PpWaveChart:
    return ppwave_chart(PolyExpr(n + 2), n)


def christoffel_array(chart: PpWaveChart, point):
    """Gamma[a, b, c] with nabla_{d_b} d_c = Gamma[a, b, c] d_a, and d_k Gamma."""
    f, d, h = chart.values(point)
    D = chart.dim
    V, U = 0, D - 1
    gam = np.zeros((D, D, D))
    dgam = np.zeros((D, D, D, D))
    gam[V, U, U] = d[U] + 2.0 * f * d[V]
    dgam[V, U, U] = h[U] + 2.0 * (d * d[V] + f * h[V])
    gam[U, U, U] = -d[V]
    dgam[U, U, U] = -h[V]
    gam[V, U, V] = gam[V, V, U] = d[V]
    dgam[V, U, V] = dgam[V, V, U] = h[V]
    for i in range(1, D - 1):
        gam[i, U, U] = -d[i]
        dgam[i, U, U] = -h[i]
        gam[V, U, i] = gam[V, i, U] = d[i]
        dgam[V, U, i] = dgam[V, i, U] = h[i]
    return gam, dgam


def christoffel(chart: PpWaveChart, point, tol: float = 0.0) -> dict:
    """Nonzero covariant derivatives nabla_{d_b} d_c as {(b, c): coordinate vector}."""
    gam, _ = christoffel_array(chart, point)
    out = {}
    D = chart.dim
    for b in range(D):
        for c in range(D):
            vec = gam[:, b, c]
            if np.abs(vec).max() > tol:
                out[(b, c)] = vec.copy()
    return out


def riemann_array(chart: PpWaveChart, point) -> np.ndarray:
    """R[a, b, c, d] with R(d_c, d_d) d_b = R[a, b, c, d] d_a."""
    gam, dgam = christoffel_array(chart, point)
    std = (np.einsum("adbc->abcd", dgam) - np.einsum("acbd->abcd", dgam)
           + np.einsum("ace,edb->abcd", gam, gam) - np.einsum("ade,ecb->abcd", gam, gam))
    return -std


def _direction(chart, X):
    if isinstance(X, (int, np.integer)):
        return np.eye(chart.dim)[X]
    return np.asarray(X, dtype=float)


def curvature(chart: PpWaveChart, point, X, Y) -> np.ndarray:
    """Endomorphism R(X, Y) in the coordinate basis; X, Y coordinate indices or vectors."""
    r = riemann_array(chart, point)
    return np.einsum("abcd,c,d->ab", r, _direction(chart, X), _direction(chart, Y))


def curvature_in_frame(chart: PpWaveChart, point, X, Y) -> np.ndarray:
    e = chart.frame(point)
    return np.linalg.solve(e, curvature(chart, point, X, Y) @ e)


def check_path(chart: PpWaveChart, path: PathSpec):
    if path.dim != chart.dim:
        raise ValueError(f"path lives in dimension {path.dim}, chart in {chart.dim}")
    for p in path.sample_points():
        if not chart.contains(p):
            raise DomainError(f"path leaves the {chart.domain} domain near {p.tolist()}")


def _coordinate_transport(chart: PpWaveChart, path: PathSpec, atol: float, max_steps: int):
    coef, exps, trig, freq, offsets = chart.kernel_arrays
    total = np.eye(chart.dim)
    steps = 0
    for seg in path.segments:
        phi, nsteps, ok = _kernels.integrate_segment(
            seg.kind, seg.params, coef, exps, trig, freq, offsets, atol, atol, max_steps)
        if not ok:
            raise IntegrationFailure(f"step control failed after {nsteps} steps")
        total = phi @ total
        steps += nsteps
    return total, steps


@dataclass
class TransportInfo:
    matrix: np.ndarray
    steps: int
    refinements: int
    discrepancy: float


def transport_with_info(chart: PpWaveChart, path: PathSpec, tol: float = ODE_TOL,
                        verify: bool = True, max_refinements: int = 3,
                        max_steps: int = 200000) -> TransportInfo:
    """Parallel transport along ``path`` in the null frame, with step-refinement checks.

    Each result is compared with a rerun at tolerance/32 (half the step size for a
    fifth-order method); the refined result is accepted once two runs agree to
    ``max(100 tol, 1e-9)``.
    """
    check_path(chart, path)
    start = chart.frame(path.start)
    end = chart.frame(path.end)
    coarse, steps = _coordinate_transport(chart, path, tol, max_steps)
    discrepancy = 0.0
    refinements = 0
    if verify:
        accept = max(100 * tol, 1e-9)
        for refinements in range(1, max_refinements + 1):
            fine, steps = _coordinate_transport(chart, path, tol / 32 ** refinements, max_steps)
            discrepancy = float(np.abs(fine - coarse).max()) / max(1.0, float(np.abs(fine).max()))
            coarse = fine
            if discrepancy <= accept:
                break
        else:
            raise IntegrationFailure(
                f"refined transports still differ by {discrepancy:.2e} after {max_refinements} refinements")
    matrix = np.linalg.solve(end, coarse @ start)
    return TransportInfo(matrix, steps, refinements, discrepancy)


def parallel_transport(chart: PpWaveChart, path: PathSpec, tol: float = ODE_TOL, verify: bool = True):
    return transport_with_info(chart, path, tol, verify).matrix


@dataclass
class SampleSpec:
    """Curves from the base point and the coordinate pairs fed to the curvature."""
    paths: list
    pairs: list | None = None


def default_sample_spec(chart: PpWaveChart, base, count: int = 6, radius: float = 1.0,
                        seed: int = 0) -> SampleSpec:
    base = chart.require(base)
    rng = np.random.default_rng(seed)
    paths = [PathSpec.line(base, base)]
    tries = 0
    while len(paths) < count + 1 and tries < 100 * count:
        tries += 1
        end = base + rng.uniform(-radius, radius, chart.dim)
        try:
            path = PathSpec.line(base, end)
            check_path(chart, path)
        except DomainError:
            continue
        paths.append(path)
    return SampleSpec(paths)


def ambrose_singer_sample(chart: PpWaveChart, base, spec: SampleSpec | None = None,
                          tol: float = ODE_TOL, rank_tol: float = 1e-7) -> list:
    """Orthonormal basis of the span of transported curvature endomorphisms at ``base``."""
    base = chart.require(base)
    spec = spec or default_sample_spec(chart, base)
    D = chart.dim
    pairs = spec.pairs or [(c, d) for c in range(D) for d in range(c + 1, D)]
    collected = []
    for path in spec.paths:
        if np.abs(path.start - base).max() > 1e-12:
            raise ValueError("sample curves must start at the base point")
        q = path.end
        if np.abs(q - base).max() == 0.0:
            t = np.eye(D)
        else:
            t = parallel_transport(chart, path, tol)
        t_inv = np.linalg.inv(t)
        for c, d in pairs:
            r = curvature_in_frame(chart, q, c, d)
            collected.append((t_inv @ r @ t).ravel())
    mats = np.array(collected).T
    scale = max(1.0, float(np.abs(mats).max())) if mats.size else 1.0
    basis = orth(mats, rank_tol * scale)
    out = []
    for j in range(basis.shape[1]):
        m = basis[:, j].reshape(D, D)
        if not in_lorentz_algebra(m, 1e-7):
            raise IntegrationFailure("sampled curvature endomorphism left the Lorentz algebra")
        out.append(ParabolicAlgebraElement.from_matrix(m, 1e-7))
    return out


def span_contains(basis, element, tol: float = 1e-7) -> bool:
    if not basis:
        return float(np.abs(element.matrix).max()) <= tol
    cols = np.array([b.matrix.ravel() for b in basis]).T
    return span_residual(orth(cols, 1e-12), element.matrix.ravel()) <= tol


@dataclass(frozen=True)
class CahenWallachSpec:
    lambdas: tuple
    k: tuple | None = None
    beta: float | None = None
    ratios: tuple | None = field(default=None, repr=False)  # k_i / k_1 as Fractions

    @property
    def n(self) -> int:
        return len(self.lambdas)

    @property
    def has_centralizer_flip(self) -> bool:
        """True when all lambda_i = -k_i^2 with pairwise rational k_i / k_j."""
        return self.beta is not None


def cahen_wallach_spec(lambdas, max_denominator: int = 10 ** 6) -> CahenWallachSpec:
    lambdas = tuple(lambdas)
    if not lambdas or any(lam == 0 for lam in lambdas):
        raise ValueError("all lambda entries must be nonzero")
    if any(lam > 0 for lam in lambdas):
        return CahenWallachSpec(lambdas)
    k = tuple(math.sqrt(-float(lam)) for lam in lambdas)
    ratios = []
    for ki in k:
        q = Fraction(ki / k[0]).limit_denominator(max_denominator)
        if abs(float(q) - ki / k[0]) > 1e-12 * max(1.0, ki / k[0]):
            return CahenWallachSpec(lambdas)
        ratios.append(q)
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (q.denominator for q in ratios), 1)
    return CahenWallachSpec(lambdas, k, lcm / k[0], tuple(ratios))


def build_cahen_wallach(spec: CahenWallachSpec) -> PpWaveChart:
    """Chart with 2 f du^2 = sum lambda_j x_j^2 du^2, i.e. f = sum lambda_j x_j^2 / 2."""
    n = spec.n
    pairs = []
    for j, lam in enumerate(spec.lambdas):
        exps = [0] * (n + 2)
        exps[1 + j] = 2
        coef = Fraction(lam) / 2 if isinstance(lam, (int, Fraction)) else lam / 2
        pairs.append((tuple(exps), coef))
    return ppwave_chart(PolyExpr.monomials(n + 2, pairs), n)
