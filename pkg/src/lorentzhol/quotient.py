"""Holonomy of quotients of pp-wave charts and flat space by deck groups.

A deck isometry in normal form acts as

    (v, x, u) -> (a v + tau(x, u), A x + w, u / a + b)

and its holonomy representative is the block-diagonal element diag(a, A, 1/a):
on a flat base the base transport is the identity and the inverse differential of
x -> A^T (x - w) is A.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._linalg import orth, span_residual
from .algebra import ParabolicAlgebraElement, classify_type, exp_element, normalizer_check
from .discontinuity import DiscontinuityFamily, check_properly_discontinuous
from .errors import (
    DiscontinuityRefusal,
    HolonomyError,
    IndecomposabilityError,
    NotIsometryError,
    PreconditionError,
)
from .expr import PolyExpr
from .minkowski import (
    DEDUP_TOL,
    GroupSample,
    ParabolicElement,
    check_lorentz,
    decompose_parabolic,
    discrete_part,
    group_closure,
)
from .paths import PathSpec
from .ppwave import (
    CahenWallachSpec,
    PpWaveChart,
    SampleSpec,
    ambrose_singer_sample,
    build_cahen_wallach,
    check_path,
    parallel_transport,
)

DECK_KINDS = ("translation", "sign-flip", "boost", "cw-flip", "flat-affine", "custom")


@dataclass(frozen=True, eq=False)
class DeckIsometry:
    a: float
    b: float
    tau: PolyExpr
    A: np.ndarray
    w: np.ndarray
    kind: str = "custom"

    @property
    def n(self) -> int:
        return self.w.size

    def __call__(self, point) -> np.ndarray:
        p = np.asarray(point, dtype=float)
        out = np.empty_like(p)
        out[0] = self.a * p[0] + self.tau(p)
        out[1:-1] = self.A @ p[1:-1] + self.w
        out[-1] = p[-1] / self.a + self.b
        return out

    def inverse_point(self, point) -> np.ndarray:
        q = np.asarray(point, dtype=float)
        p = np.empty_like(q)
        p[-1] = self.a * (q[-1] - self.b)
        p[1:-1] = self.A.T @ (q[1:-1] - self.w)
        p[0] = 0.0
        p[0] = (q[0] - self.tau(p)) / self.a
        return p

    def jacobian(self, point) -> np.ndarray:
        p = np.asarray(point, dtype=float)
        D = p.size
        j = np.zeros((D, D))
        j[0, 0] = self.a
        for k in range(1, D):
            j[0, k] = self.tau.diff(k)(p)
        j[1:-1, 1:-1] = self.A
        j[-1, -1] = 1.0 / self.a
        return j

    def tau_constant(self):
        if self.tau.is_zero():
            return 0.0
        if any(any(e) or any(k for k, _ in w) for e, w, _ in self.tau.terms()):
            return None
        return float(sum(c for _, _, c in self.tau.terms()))

    def compose(self, other: "DeckIsometry") -> "DeckIsometry":
        """self o other, for constant tau."""
        t1, t2 = self.tau_constant(), other.tau_constant()
        if t1 is None or t2 is None:
            raise NotImplementedError("composition needs constant tau")
        nv = self.n + 2
        return DeckIsometry(self.a * other.a, other.b / self.a + self.b,
                            PolyExpr.constant(nv, self.a * t2 + t1),
                            self.A @ other.A, self.A @ other.w + self.w, "custom")

    def representative(self) -> ParabolicElement:
        return ParabolicElement(self.a, self.A.copy(), np.zeros(self.n))


def _deck(n, a=1.0, b=0.0, tau=0.0, A=None, w=None, kind="custom") -> DeckIsometry:
    A = np.eye(n) if A is None else np.atleast_2d(np.asarray(A, dtype=float))
    w = np.zeros(n) if w is None else np.asarray(w, dtype=float).reshape(n)
    if np.abs(A.T @ A - np.eye(n)).max() > 1e-9:
        raise ValueError("base map must be orthogonal")
    return DeckIsometry(float(a), float(b), PolyExpr.constant(n + 2, tau), A, w, kind)


def v_translation(n: int, alpha: float) -> DeckIsometry:
    return _deck(n, tau=alpha, kind="translation")


def sign_flip(n: int, A=None, w=None, flips: int = 1) -> DeckIsometry:
    return _deck(n, a=(-1.0) ** flips, A=A, w=w, kind="sign-flip")


def boost(n: int, lam: float, A=None, w=None, tau: float = 0.0) -> DeckIsometry:
    return _deck(n, a=math.exp(lam), A=A, w=w, tau=tau, kind="boost")


def flip_matrix(spec: CahenWallachSpec, m: int) -> np.ndarray:
    """S_m = diag((-1)^(m beta k_i)); m beta k_i is an integer by construction of beta."""
    if not spec.has_centralizer_flip:
        raise PreconditionError("flip generator unavailable: some lambda > 0 or a ratio is not a rational square")
    signs = []
    for q in spec.ratios:
        # m * beta * k_i = m * lcm * q_i with q_i = k_i / k_1
        lcm = round(spec.beta * spec.k[0])
        exponent = m * lcm * q
        if exponent.denominator != 1:
            raise HolonomyError("beta k_i is not an integer")
        signs.append(-1.0 if exponent.numerator % 2 else 1.0)
    return np.diag(signs)


def cw_flip(spec: CahenWallachSpec, m: int) -> DeckIsometry:
    """phi_beta^m: (v, x, u) -> (v, S_m x, u + m beta pi)."""
    return _deck(spec.n, b=m * spec.beta * math.pi, A=flip_matrix(spec, m), kind="cw-flip")


def _sample_points(chart: PpWaveChart, count: int, seed: int):
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < count:
        p = rng.uniform(-2.0, 2.0, chart.dim)
        if chart.domain == "half-plane":
            p[-1] = rng.uniform(0.3, 2.0)
        if chart.contains(p, margin=0.2):
            pts.append(p)
    return pts


def _numeric_jacobian(fn, p, h=1e-6):
    D = p.size
    j = np.zeros((D, D))
    for k in range(D):
        e = np.zeros(D)
        e[k] = h
        j[:, k] = (fn(p + e) - fn(p - e)) / (2 * h)
    return j


def _extract_normal_form(chart: PpWaveChart, fn, points, tol):
    n = chart.n
    jacs = [_numeric_jacobian(fn, p) for p in points]
    j0 = jacs[0]
    for p, j in zip(points, jacs):
        if np.abs(j[1:, 0]).max() > tol:
            raise NotIsometryError("base or u-component depends on v", p)
        if np.abs(j - j0)[1:, :].max() > tol or abs(j[0, 0] - j0[0, 0]) > tol:
            raise NotIsometryError("map is not of the supported affine normal form", p)
    a = j0[0, 0]
    if abs(a) < tol or abs(j0[-1, -1] - 1.0 / a) > tol:
        raise NotIsometryError("u-scaling is not the inverse of the v-scaling", points[0])
    if np.abs(j0[1:-1, -1]).max() > tol or np.abs(j0[-1, 1:-1]).max() > tol:
        raise NotIsometryError("base map mixes with u", points[0])
    A = j0[1:-1, 1:-1]
    if np.abs(A.T @ A - np.eye(n)).max() > 1e-6:
        raise NotIsometryError("base map is not an isometry of the flat base", points[0])
    A = _nearest_orthogonal(A)
    images = [fn(p) for p in points]
    b = images[0][-1] - points[0][-1] / a
    w = images[0][1:-1] - A @ points[0][1:-1]
    taus = [img[0] - a * p[0] for p, img in zip(points, images)]
    if max(taus) - min(taus) > 1e-7:
        raise NotIsometryError("only constant v-shifts are supported", points[0])
    return DeckIsometry(float(a), float(b), PolyExpr.constant(n + 2, float(np.mean(taus))), A, w)


def _nearest_orthogonal(A):
    u, _, vt = np.linalg.svd(A)
    return u @ vt


def validate_isometry(chart: PpWaveChart, candidate, tol: float = 1e-8, samples: int = 8,
                      seed: int = 0) -> DeckIsometry:
    """Check that ``candidate`` (a DeckIsometry or a coordinate map) is an isometry of ``chart``.

    A callable is first brought into normal form from finite-difference Jacobians.
    The pullback of the metric is then compared with the metric at sample points
    using the exact Jacobian of the normal form.
    """
    points = _sample_points(chart, samples, seed)
    if isinstance(candidate, DeckIsometry):
        sigma = candidate
    else:
        sigma = _extract_normal_form(chart, candidate, points, 1e-6)
        for p in points:
            if np.abs(sigma(p) - candidate(p)).max() > 1e-7 * max(1.0, np.abs(p).max()):
                raise NotIsometryError("map differs from its extracted normal form", p)
    if sigma.n != chart.n:
        raise ValueError("isometry and chart have different screen dimensions")
    if sigma.tau.depends_on(0):
        raise NotIsometryError("v-shift depends on v", points[0])
    for p in points:
        q = sigma(p)
        if not chart.contains(q):
            raise NotIsometryError("map leaves the chart domain", p)
        j = sigma.jacobian(p)
        pulled = j.T @ chart.metric(q) @ j
        g = chart.metric(p)
        if np.abs(pulled - g).max() > tol * max(1.0, np.abs(g).max()):
            raise NotIsometryError("pullback metric differs from the metric", p)
    return sigma


def deck_representative(chart: PpWaveChart, sigma: DeckIsometry, base, path: PathSpec | None = None,
                        tol: float = 1e-9) -> ParabolicElement:
    """Block-diagonal representative of the holonomy coset contributed by ``sigma``."""
    if not chart.v_free:
        raise PreconditionError("representative formula needs d_v f = 0")
    base = chart.require(base)
    target = sigma.inverse_point(base)
    if path is not None:
        scale = max(1.0, float(np.abs(target).max()))
        if np.abs(path.start - base).max() > tol * scale or np.abs(path.end - target).max() > tol * scale:
            raise ValueError("connecting path must run from the base point to sigma^-1(base)")
        check_path(chart, path)
    return sigma.representative()


def default_connecting_path(chart: PpWaveChart, sigma: DeckIsometry, base, waypoints=()) -> PathSpec:
    base = np.asarray(base, dtype=float)
    return PathSpec.polyline([base, *[np.asarray(w, dtype=float) for w in waypoints], sigma.inverse_point(base)])


@dataclass
class CrossCheck:
    representative: ParabolicElement
    lifted: np.ndarray
    class_error: float
    remainder: np.ndarray
    remainder_outside: float
    agrees: bool


def deck_cross_check(chart: PpWaveChart, sigma: DeckIsometry, base, path: PathSpec,
                     connected=None, tol: float = 1e-6) -> CrossCheck:
    """Compare the closed-form representative with d(sigma) composed with transport along ``path``.

    The two must agree up to right multiplication by a translation lying in the
    connected part (``connected``: algebra basis, default all translations).
    """
    rep = deck_representative(chart, sigma, base, path, tol=1e-9)
    base = chart.require(base)
    end = path.end
    transport = parallel_transport(chart, path)
    d_sigma = np.linalg.solve(chart.frame(base), sigma.jacobian(end) @ chart.frame(end))
    lifted = d_sigma @ transport
    p = decompose_parabolic(lifted, 1e-7)
    class_error = max(abs(p.a - rep.a), float(np.abs(p.A - rep.A).max()))
    rest = rep.inverse() @ p
    if connected is None:
        outside = 0.0
    else:
        cols = [c.v for c in connected if abs(c.a) < 1e-9 and np.abs(c.X).max() < 1e-9]
        outside = span_residual(orth(np.array(cols).T, 1e-9) if cols else np.zeros((chart.n, 0)), rest.x)
    agrees = class_error <= tol and outside <= tol * max(1.0, float(np.abs(rest.x).max()))
    return CrossCheck(rep, lifted, class_error, rest.x, outside, agrees)


@dataclass
class HolonomyDescription:
    discrete_generators: list  # (a, A) pairs
    connected: dict
    sample: GroupSample
    classes: list
    type_tag: int | None
    status: str  # "certified" or "conditional"
    caveats: list = field(default_factory=list)
    normalizes: list = field(default_factory=list)
    lower_bound_only: bool = False


def _verdict_status(verdict):
    if verdict is None:
        return "unknown", {}
    return verdict.status, getattr(verdict, "witness", {})


def quotient_holonomy(chart: PpWaveChart, generators, base, verdict=None,
                      sample_spec: SampleSpec | None = None, word_len: int = 4,
                      tol: float = DEDUP_TOL) -> HolonomyDescription:
    """Discrete representatives times the connected holonomy at ``base``."""
    status, witness = _verdict_status(verdict)
    if status == "fail":
        raise DiscontinuityRefusal("deck group does not act properly discontinuously", witness)
    caveats = []
    if status != "pass":
        caveats.append("proper discontinuity not certified")
    if verdict is not None:
        caveats.extend(getattr(verdict, "caveats", []))
    sigmas = [validate_isometry(chart, g) for g in generators]
    base = chart.require(base)
    algebra = ambrose_singer_sample(chart, base, sample_spec)
    n = chart.n
    scaling = ParabolicAlgebraElement(1.0, np.zeros((n, n)), np.zeros(n))
    from .ppwave import span_contains
    has_scaling = bool(algebra) and span_contains(algebra, scaling)
    translation_rank = sum(span_contains(algebra, ParabolicAlgebraElement(0.0, np.zeros((n, n)), e))
                           for e in np.eye(n)) if algebra else 0
    type_tag = None
    if algebra:
        try:
            type_tag = classify_type(algebra, 1e-7).type_tag
        except IndecomposabilityError as exc:
            caveats.append(f"connected part not classified: {exc}")
    else:
        caveats.append("connected holonomy is trivial")
    g_dim = len(orth(np.array([e.X.ravel() for e in algebra]).T, 1e-7).T) if algebra else 0
    connected = {"g0": "trivial" if g_dim == 0 else f"dim {g_dim}", "has_scaling": has_scaling,
                 "translation_rank": int(translation_rank), "algebra_dim": len(algebra),
                 "algebra": algebra}
    reps = [s.representative() for s in sigmas]
    normalizes = []
    if algebra and translation_rank == n:
        h0 = [exp_element(e).matrix for e in algebra]
        for r in reps:
            try:
                normalizes.append(bool(normalizer_check(h0, r.matrix)))
            except PreconditionError as exc:
                caveats.append(f"normalizer check skipped: {exc}")
                normalizes.append(False)
        if not all(normalizes):
            caveats.append("a representative does not normalize the connected part")
    mats = [r.matrix for r in reps] or [np.eye(n + 2)]
    sample = group_closure(mats, word_len, tol)
    part = discrete_part(sample, tol)
    if part.lower_bound_only:
        caveats.append(f"discrete part sampled up to word length {word_len}; lower bound only")
    certified = status == "pass" and type_tag is not None and all(normalizes)
    return HolonomyDescription([(r.a, r.A) for r in reps], connected, sample, part.classes, type_tag,
                               "certified" if certified else "conditional", caveats, normalizes,
                               part.lower_bound_only)


@dataclass
class FlatAffineGroup:
    generators: list  # (A, v) pairs

    def __post_init__(self):
        self.generators = [(check_lorentz(A), np.asarray(v, dtype=float)) for A, v in self.generators]

    @property
    def linear_parts(self):
        return [A for A, _ in self.generators]


def flat_quotient_holonomy(group: FlatAffineGroup, word_len: int = 12, tol: float = DEDUP_TOL) -> GroupSample:
    return group_closure(group.linear_parts, word_len, tol)


def flat_rotation_generator(theta: float) -> np.ndarray:
    """Lorentz part of the screw-type affine map in the frame (l, e1, e2, l*)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[1.0, -c, s, -0.5],
                     [0.0, c, -s, 1.0],
                     [0.0, s, c, 0.0],
                     [0.0, 0.0, 0.0, 1.0]])


def cahen_wallach_full_holonomy(spec: CahenWallachSpec, m: int, alpha: float = 1.0, base=None,
                                word_len: int = 4) -> HolonomyDescription:
    """Holonomy of the quotient by the group generated by t_alpha and phi_beta^m."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if m > 0 and not spec.has_centralizer_flip:
        raise PreconditionError("flip generator unavailable: only v-translations centralize here")
    chart = build_cahen_wallach(spec)
    gens = []
    if alpha:
        gens.append(v_translation(spec.n, alpha))
    if m:
        gens.append(cw_flip(spec, m))
    base = np.r_[0.0, np.zeros(spec.n), 0.0] if base is None else base
    vectors = [[alpha, 0.0]] if alpha else []
    if m:
        vectors.append([0.0, m * spec.beta * math.pi])
    verdict = check_properly_discontinuous(
        DiscontinuityFamily("lattice", vectors=tuple(map(tuple, vectors))) if vectors
        else DiscontinuityFamily("trivial"))
    return quotient_holonomy(chart, gens, base, verdict, word_len=word_len)
