import json
import os
import subprocess
import sys

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from lorentzhol.errors import DomainError
from lorentzhol.expr import PolyExpr
from lorentzhol.minkowski import lorentz_defect, parabolic_matrix
from lorentzhol.paths import PathSpec
from lorentzhol.ppwave import (ambrose_singer_sample, build_cahen_wallach, cahen_wallach_spec, christoffel,
                               christoffel_array, curvature, flat_chart, parallel_transport, ppwave_chart,
                               riemann_array, transport_with_info)

from strategies import vectors

# f = v x1 + x2^2 u + x1 x2 + cos(x1) u^2, chosen to exercise every Christoffel term
GENERAL_F = PolyExpr.from_data(4, [
    [[1, 1, 0, 0], 1], [[0, 0, 2, 1], 1], [[0, 1, 1, 0], 1],
    {"exp": [0, 0, 0, 2], "coef": 1, "waves": [["", 0], ["cos", 1.0], ["", 0], ["", 0]]},
])
VFREE_F = PolyExpr.from_data(4, [[[0, 2, 0, 0], 1], [[0, 0, 2, 0], -2], [[0, 1, 1, 1], 0.5]])


def _sympy_geometry(f: PolyExpr):
    """Christoffel symbols and standard-sign Riemann tensor computed symbolically from the metric."""
    D = f.nvars
    xs = sp.symbols(f"q0:{D}")
    fs = f.to_sympy(xs)
    g = sp.eye(D)
    g[0, 0] = 0
    g[0, D - 1] = g[D - 1, 0] = 1
    g[D - 1, D - 1] = 2 * fs
    gi = g.inv()
    gam = [[[sp.simplify(sum(gi[a, e] * (sp.diff(g[e, c], xs[b]) + sp.diff(g[e, b], xs[c])
                                         - sp.diff(g[b, c], xs[e])) for e in range(D)) / 2)
             for c in range(D)] for b in range(D)] for a in range(D)]
    riem = [[[[sp.diff(gam[a][d][b], xs[c]) - sp.diff(gam[a][c][b], xs[d])
               + sum(gam[a][c][e] * gam[e][d][b] - gam[a][d][e] * gam[e][c][b] for e in range(D))
               for d in range(D)] for c in range(D)] for b in range(D)] for a in range(D)]
    return sp.lambdify([xs], gam, "numpy"), sp.lambdify([xs], riem, "numpy")


@pytest.fixture(scope="module")
def general_oracle():
    return _sympy_geometry(GENERAL_F)


@pytest.fixture(scope="module")
def vfree_oracle():
    return _sympy_geometry(VFREE_F)


@given(vectors(4, 1.5))
@settings(max_examples=20)
def test_christoffel_symbols_match_symbolic_metric(general_oracle, p):
    chart = ppwave_chart(GENERAL_F, 2)
    gam, _ = christoffel_array(chart, p)
    assert np.allclose(gam, np.array(general_oracle[0](p), dtype=float), atol=1e-10)


def test_christoffel_derivatives_match_finite_differences():
    chart = ppwave_chart(GENERAL_F, 2)
    p = np.array([0.3, -0.4, 0.7, 1.1])
    _, dgam = christoffel_array(chart, p)
    h = 1e-6
    for k in range(4):
        e = np.eye(4)[k] * h
        fd = (christoffel_array(chart, p + e)[0] - christoffel_array(chart, p - e)[0]) / (2 * h)
        assert np.allclose(dgam[..., k], fd, atol=1e-5)


def test_christoffel_dict_lists_nonzero_entries():
    chart = ppwave_chart(VFREE_F, 2)
    table = christoffel(chart, [0.0, 1.0, 0.0, 1.0], tol=1e-14)
    assert set(table) <= {(b, c) for b in range(4) for c in range(4)}
    assert (3, 3) in table


@given(vectors(4, 1.5))
@settings(max_examples=15)
def test_riemann_is_the_negated_standard_tensor(general_oracle, p):
    chart = ppwave_chart(GENERAL_F, 2)
    std = np.array(general_oracle[1](p), dtype=float)
    assert np.allclose(riemann_array(chart, p), -std, atol=1e-9)


@given(vectors(4, 1.5))
@settings(max_examples=15)
def test_riemann_symmetries(p):
    chart = ppwave_chart(GENERAL_F, 2)
    r = riemann_array(chart, p)
    assert np.allclose(r, -np.swapaxes(r, 2, 3), atol=1e-12)
    bianchi = r + np.einsum("abcd->acdb", r) + np.einsum("abcd->adbc", r)
    assert np.abs(bianchi).max() < 1e-10


def test_cahen_wallach_curvature_is_the_hessian():
    chart = build_cahen_wallach(cahen_wallach_spec((-1, -4)))
    p = np.array([0.2, 0.5, -0.3, 0.9])
    hess = np.diag([-1.0, -4.0])
    for i in range(2):
        for j in range(2):
            out = curvature(chart, p, 3, 1 + i) @ np.eye(4)[1 + j]
            assert np.allclose(out, hess[i, j] * np.eye(4)[0], atol=1e-12)


def _oracle_transport(chart, christ, path, start_frame, end_frame):
    """Coordinate parallel transport integrated by scipy, then expressed in the null frame."""
    D = chart.dim
    total = np.eye(D)
    for seg in path.segments:
        def rhs(s, y):
            x, xdot = seg.state(s)
            gam = np.array(christ(x), dtype=float)
            return (-np.einsum("abc,b->ac", gam, xdot) @ y.reshape(D, D)).ravel()
        sol = solve_ivp(rhs, (0.0, 1.0), np.eye(D).ravel(), method="DOP853", rtol=1e-12, atol=1e-12)
        total = sol.y[:, -1].reshape(D, D) @ total
    return np.linalg.solve(end_frame, total @ start_frame)


@given(st.lists(vectors(4, 1.0), min_size=2, max_size=3))
@settings(max_examples=8)
def test_transport_matches_independent_integrator(general_oracle, points):
    chart = ppwave_chart(GENERAL_F, 2)
    path = PathSpec.polyline(points)
    ours = parallel_transport(chart, path)
    oracle = _oracle_transport(chart, general_oracle[0], path, chart.frame(path.start), chart.frame(path.end))
    assert np.allclose(ours, oracle, atol=1e-8)
    assert lorentz_defect(ours) < 1e-8


@given(st.lists(vectors(4, 1.0), min_size=3, max_size=4))
@settings(max_examples=10)
def test_vfree_loops_transport_as_translations(points):
    chart = ppwave_chart(VFREE_F, 2)
    t = parallel_transport(chart, PathSpec.polyline(points, closed=True))
    assert np.abs(t - parabolic_matrix(1.0, np.eye(2), t[0, 1:-1])).max() < 1e-8


def test_flat_transport_is_identity():
    t = transport_with_info(flat_chart(2), PathSpec.polyline([[0, 0, 0, 0], [1, 2, 0, 1], [0, 0, 1, 3]]))
    assert np.allclose(t.matrix, np.eye(4), atol=1e-12) and t.discrepancy < 1e-9


def test_holonomy_span_is_two_translations():
    f = PolyExpr.from_data(4, [[[0, 2, 0, 1], 1], [[0, 0, 2, 0], -1]])
    basis = ambrose_singer_sample(ppwave_chart(f, 2), np.array([0.0, 0.0, 0.0, 1.0]))
    assert len(basis) == 2
    assert all(abs(b.a) < 1e-9 and np.abs(b.X).max() < 1e-9 for b in basis)


def test_domain_errors():
    f = PolyExpr.from_data(4, [[[0, 2, 0, -1], 1], [[0, 0, 2, 0], 1]])
    with pytest.raises(ValueError, match="half-plane"):
        ppwave_chart(f, 2)
    chart = ppwave_chart(f, 2, domain="half-plane")
    with pytest.raises(DomainError):
        parallel_transport(chart, PathSpec.line([0, 0, 0, 1], [0, 0, 0, -1]))
    punctured = ppwave_chart(VFREE_F, 2, domain="punctured")
    with pytest.raises(DomainError):
        punctured.require([0.0, 1.0, 1.0, 0.0])
    with pytest.raises(ValueError, match="degenerate"):
        ppwave_chart(PolyExpr.from_data(4, [[[0, 1, 0, 0], 1]]), 2, certificate=[0, 0, 0, 1])


def test_divide_by_u_squared():
    f = PolyExpr.from_data(4, [[[0, 2, 0, 0], 1], [[0, 0, 2, 0], 1]])
    chart = ppwave_chart(f, 2, domain="half-plane", divide_by_u2=True)
    assert chart.f([0, 1, 1, 2]) == pytest.approx(0.5)


_BACKEND_SCRIPT = """
import json, numpy as np
from lorentzhol._accel import backend_name
from lorentzhol.expr import PolyExpr
from lorentzhol.paths import PathSpec
from lorentzhol.ppwave import ppwave_chart, parallel_transport
from lorentzhol.minkowski import group_closure
from lorentzhol.quotient import flat_rotation_generator
f = PolyExpr.from_data(4, %r)
t = parallel_transport(ppwave_chart(f, 2), PathSpec.polyline([[0,0,0,0],[0.5,1,-1,1],[0,0.2,0.3,2]]))
c = group_closure([flat_rotation_generator(1.0)], 20)
print(json.dumps({"backend": backend_name(), "t": t.tolist(), "n": len(c.elements)}))
""" % (GENERAL_F.to_data(),)


def _run_backend(disable: str):
    env = dict(os.environ, LORENTZHOL_DISABLE_NUMBA=disable)
    out = subprocess.run([sys.executable, "-c", _BACKEND_SCRIPT], env=env, capture_output=True, text=True,
                         check=True)
    return json.loads(out.stdout)


def test_numba_and_numpy_backends_agree():
    pytest.importorskip("numba")
    fast, slow = _run_backend("0"), _run_backend("1")
    assert fast["backend"] == "numba" and slow["backend"] == "numpy"
    assert np.allclose(fast["t"], slow["t"], atol=1e-9)
    assert fast["n"] == slow["n"]


def test_mixed_curvature_term_has_opposite_sign():
    # with R(d_u, X)Y = Hess f(X, Y) d_v fixed, the d_v f term comes out negated
    chart = ppwave_chart(GENERAL_F, 2)
    p = np.array([0.3, -0.4, 0.7, 1.1])
    _, grad, hess = chart.values(p)
    for i in (1, 2):
        out = curvature(chart, p, i, 3) @ np.eye(4)[0]
        assert np.allclose(out, -hess[i, 0] * np.eye(4)[0], atol=1e-12)
