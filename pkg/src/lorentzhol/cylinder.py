"""Lorentzian cylinders -dt^2 + (C + 2(t+a) Id)^* g_F over F = R x N, N flat.

g_F = ds^2 + exp(-4s) g_N and C = diag(exp(2s) f'(s), 2 exp(2s) (lam - f(s)) Id)
for a bounded strictly increasing profile f with f(0) = 0 and f < lam.
Coordinates are (t, s, y_1, ..., y_n).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import sympy as sp
from scipy.integrate import solve_ivp

from ._linalg import orth
from .errors import DomainError, IntegrationFailure
from .paths import PathSpec

PROFILES = ("tanh", "arctan", "linear")


@dataclass(frozen=True)
class CodazziProfile:
    kind: str
    amplitude: float
    lam: float
    cap: float | None = None  # linear profiles are only used on |s| <= cap

    def __post_init__(self):
        if self.kind not in PROFILES:
            raise ValueError(f"profile kind must be one of {PROFILES}")
        if self.amplitude <= 0:
            raise ValueError("profile must be strictly increasing")
        if self.kind == "linear":
            if self.cap is None or self.cap <= 0:
                raise ValueError("a linear profile needs a positive cap on |s|")
            if self.amplitude * self.cap >= self.lam:
                raise ValueError("profile reaches lam on the capped interval")
        elif self.amplitude > self.lam:
            raise ValueError("profile supremum exceeds lam")

    def expr(self, s):
        c = sp.nsimplify(self.amplitude)
        if self.kind == "tanh":
            return c * sp.tanh(s)
        if self.kind == "arctan":
            return c * 2 / sp.pi * sp.atan(s)
        return c * s


@dataclass(frozen=True, eq=False)
class CylinderChart:
    profile: CodazziProfile
    a: float
    n: int

    @property
    def dim(self) -> int:
        return self.n + 2

    @cached_property
    def symbols(self):
        return sp.symbols("t s " + " ".join(f"y{i + 1}" for i in range(self.n)))

    @cached_property
    def warps(self):
        """Symbolic (A, B) with g = -dt^2 + A^2 ds^2 + B^2 g_N, from the closed form."""
        t, s = self.symbols[:2]
        f = self.profile.expr(s)
        a = sp.nsimplify(self.a)
        lam = sp.nsimplify(self.profile.lam)
        A = sp.exp(2 * s) * sp.diff(f, s) + 2 * a + 2 * t
        B = 2 * (sp.exp(-2 * s) * t + sp.exp(-2 * s) * a + lam - f)
        return A, B

    @cached_property
    def metric_expr(self):
        A, B = self.warps
        return sp.diag(-1, A ** 2, *([B ** 2] * self.n))

    @cached_property
    def _christoffel_fn(self):
        x = self.symbols
        g = self.metric_expr
        D = self.dim
        gam = sp.MutableDenseNDimArray.zeros(D, D, D)
        # diagonal metric: only derivatives of g_ii survive
        for i in range(D):
            for j in range(D):
                for k in range(D):
                    val = 0
                    if i == j:
                        val += sp.diff(g[i, i], x[k])
                    if i == k:
                        val += sp.diff(g[i, i], x[j])
                    if j == k:
                        val -= sp.diff(g[j, j], x[i])
                    if val != 0:
                        gam[i, j, k] = val / (2 * g[i, i])
        return sp.lambdify(x, gam.tolist(), "numpy"), gam

    @cached_property
    def _riemann_fn(self):
        x = self.symbols
        gam = self._christoffel_fn[1]
        D = self.dim
        r = sp.MutableDenseNDimArray.zeros(D, D, D, D)
        for a in range(D):
            for b in range(D):
                for c in range(D):
                    for d in range(c + 1, D):
                        val = (sp.diff(gam[a, d, b], x[c]) - sp.diff(gam[a, c, b], x[d])
                               + sum(gam[a, c, e] * gam[e, d, b] - gam[a, d, e] * gam[e, c, b]
                                     for e in range(D)))
                        r[a, b, c, d] = val
                        r[a, b, d, c] = -val
        return sp.lambdify(x, r.tolist(), "numpy")

    def contains(self, point) -> bool:
        t, s = point[0], point[1]
        if t <= -self.a:
            return False
        return self.profile.cap is None or abs(s) <= self.profile.cap

    def require(self, point):
        if not self.contains(point):
            raise DomainError(f"point {list(point)} outside the cylinder chart")
        return np.asarray(point, dtype=float)

    def metric(self, point) -> np.ndarray:
        p = self.require(point)
        return np.array(sp.lambdify(self.symbols, self.metric_expr, "numpy")(*p), dtype=float)

    def metric_from_codazzi(self, point) -> np.ndarray:
        """-dt^2 + g_F((C + 2(t+a))., (C + 2(t+a)).) evaluated directly."""
        p = self.require(point)
        t, s = p[0], p[1]
        sym = sp.Symbol("s")
        f = self.profile.expr(sym)
        fv = float(f.subs(sym, s))
        dfv = float(sp.diff(f, sym).subs(sym, s))
        c_s = np.exp(2 * s) * dfv + 2 * (t + self.a)
        c_n = 2 * np.exp(2 * s) * (self.profile.lam - fv) + 2 * (t + self.a)
        g = np.zeros((self.dim, self.dim))
        g[0, 0] = -1.0
        g[1, 1] = c_s ** 2
        g[2:, 2:] = np.eye(self.n) * c_n ** 2 * np.exp(-4 * s)
        return g

    def christoffel_array(self, point) -> np.ndarray:
        p = self.require(point)
        return np.array(self._christoffel_fn[0](*p), dtype=float)

    def riemann_array(self, point) -> np.ndarray:
        """R[a, b, c, d] with R(d_c, d_d) d_b = R[a, b, c, d] d_a (standard sign)."""
        p = self.require(point)
        return np.array(self._riemann_fn(*p), dtype=float)

    def frame(self, point) -> np.ndarray:
        """Orthonormal frame (d_t, d_s / A, d_y / B) as columns."""
        g = self.metric(point)
        return np.diag(1.0 / np.sqrt(np.abs(np.diag(g))))


def build_cylinder_metric(profile: CodazziProfile, a: float, n: int) -> CylinderChart:
    if a <= 0:
        raise ValueError("a must be positive")
    if n < 1:
        raise ValueError("base dimension must be at least 1")
    return CylinderChart(profile, float(a), n)


def cylinder_gram(n: int) -> np.ndarray:
    return np.diag([-1.0] + [1.0] * (n + 1))


def cylinder_transport(chart: CylinderChart, path: PathSpec, tol: float = 1e-10) -> np.ndarray:
    """Transport along ``path`` in orthonormal frames; preserves diag(-1, 1, ..., 1)."""
    for p in path.sample_points():
        chart.require(p)
    D = chart.dim
    total = np.eye(D)
    for seg in path.segments:
        def rhs(s, y, seg=seg):
            pos, vel = seg.state(s)
            gam = chart.christoffel_array(pos)
            a = np.einsum("abc,b->ac", gam, vel)
            return -(a @ y.reshape(D, D)).ravel()
        sol = solve_ivp(rhs, (0.0, 1.0), np.eye(D).ravel(), method="RK45", rtol=tol, atol=tol)
        if not sol.success:
            raise IntegrationFailure(sol.message)
        total = sol.y[:, -1].reshape(D, D) @ total
    return np.linalg.solve(chart.frame(path.end), total @ chart.frame(path.start))


def cylinder_algebra_sample(chart: CylinderChart, base, ends, rank_tol: float = 1e-7) -> list:
    """Span of transported curvature endomorphisms (orthonormal frame at ``base``)."""
    base = chart.require(base)
    D = chart.dim
    collected = []
    for q in [base] + [np.asarray(e, dtype=float) for e in ends]:
        t = np.eye(D) if np.allclose(q, base) else cylinder_transport(chart, PathSpec.line(base, q))
        e = chart.frame(q)
        r = chart.riemann_array(q)
        for c in range(D):
            for d in range(c + 1, D):
                rf = np.linalg.solve(e, r[:, :, c, d] @ e)
                collected.append((np.linalg.inv(t) @ rf @ t).ravel())
    mats = np.array(collected).T
    basis = orth(mats, rank_tol * max(1.0, float(np.abs(mats).max())))
    return [basis[:, j].reshape(D, D) for j in range(basis.shape[1])]
