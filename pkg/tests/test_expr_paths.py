import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from lorentzhol.expr import PolyExpr
from lorentzhol.paths import PathSpec, Segment

from strategies import vectors


def _sample_expr():
    return PolyExpr.from_data(3, [
        [[2, 0, 0], 1.5],
        {"exp": [1, 1, 0], "coef": "1/3"},
        {"exp": [0, 1, 0], "coef": 2, "waves": [["", 0], ["", 0], ["cos", 0.5]]},
        {"exp": [0, 0, 0], "coef": -1, "waves": [["sin", 2.0], ["", 0], ["", 0]]},
    ])


@given(vectors(3, 2.0))
def test_evaluation_and_derivatives_agree_with_sympy(p):
    f = _sample_expr()
    syms = sp.symbols("a b c")
    fs = f.to_sympy(syms)
    subs = dict(zip(syms, p))
    assert f(p) == pytest.approx(float(fs.subs(subs)), abs=1e-10)
    for j, s in enumerate(syms):
        assert f.diff(j)(p) == pytest.approx(float(sp.diff(fs, s).subs(subs)), abs=1e-10)


def test_data_round_trip_and_bad_keys():
    f = _sample_expr()
    assert PolyExpr.from_data(3, f.to_data()) == f
    with pytest.raises(ValueError, match="unknown term keys"):
        PolyExpr.from_data(3, [{"exp": [0, 0, 0], "coef": 1, "power": 2}])
    with pytest.raises(ValueError, match="needs 3 exponents"):
        PolyExpr.from_data(3, [[[1, 0], 1]])


def test_arithmetic_and_dependence():
    f = _sample_expr()
    assert (f - f).is_zero()
    assert f.depends_on(2) and f.has_waves()
    g = PolyExpr.monomials(3, [((0, 2, 0), 1)])
    assert not g.depends_on(0) and g.degree(1) == 2
    assert (g * 3)([0, 2, 0]) == 12


def test_line_and_polyline_endpoints():
    path = PathSpec.polyline([[0, 0, 0], [1, 0, 0], [1, 1, 0]])
    assert np.allclose(path.start, 0) and np.allclose(path.end, [1, 1, 0])
    back = path.reversed()
    assert np.allclose(back.start, [1, 1, 0]) and np.allclose(back.end, 0)


def test_arc_traces_a_circle():
    seg = Segment.arc([0, 0, 0], [0, 1, 0], [0, 0, 1], 2.0, 0.0, math.pi)
    for s in np.linspace(0, 1, 7):
        assert np.linalg.norm(seg.point(s)) == pytest.approx(2.0)
    assert np.allclose(seg.reversed().point(0.0), seg.point(1.0))


@given(st.lists(vectors(3), min_size=2, max_size=2))
def test_reversed_polynomial_segment_runs_backwards(ends):
    seg = Segment.polynomial([ends[0], ends[1], [0.5, -1, 2]])
    rev = seg.reversed()
    for s in (0.0, 0.3, 1.0):
        assert np.allclose(rev.point(s), seg.point(1 - s))


def test_discontinuous_paths_are_rejected():
    with pytest.raises(ValueError):
        PathSpec((Segment.line([0, 0], [1, 0]), Segment.line([2, 0], [3, 0])))


def test_path_data_round_trip():
    path = PathSpec((Segment.line([1, 0, 0], [1, 0, 1]),
                     Segment.arc([0, 0, 1], [1, 0, 0], [0, 1, 0], 1.0, 0.0, 1.0)))
    again = PathSpec.from_data(path.to_data())
    assert np.allclose(again.end, path.end)
    with pytest.raises(ValueError):
        Segment.from_data({"kind": "spline", "params": []})
