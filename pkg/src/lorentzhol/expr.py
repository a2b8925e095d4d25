"""Exact expressions for the pp-wave profile f.

A term is ``coef * prod_j x_j**e_j * w_j(freq_j * x_j)`` where each wave factor
w_j is 1, cos or sin.  Exponents may be negative (the f/u^2 charts).  This class
is closed under differentiation, which is done exactly: coefficients may be ints
or Fractions and stay exact.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Number

import numpy as np

NONE, COS, SIN = 0, 1, 2
_WAVE_NAMES = {NONE: "", COS: "cos", SIN: "sin"}


def _normalize_key(exps, waves):
    exps = tuple(int(e) for e in exps)
    waves = tuple((int(kind), float(freq) if kind else 0.0) for kind, freq in waves)
    return exps + tuple(x for w in waves for x in w)


class PolyExpr:
    """Sum of monomial-times-wave terms in a fixed number of variables."""

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self._terms = {}
        for exps, waves, coef in terms or ():
            self._add(exps, waves, coef)

    def _add(self, exps, waves, coef):
        if coef == 0:
            return
        if len(exps) != self.nvars or len(waves) != self.nvars:
            raise ValueError("term arity does not match the number of variables")
        key = _normalize_key(exps, waves)
        total = self._terms.get(key, 0) + coef
        if total == 0:
            self._terms.pop(key, None)
        else:
            self._terms[key] = total

    @classmethod
    def monomials(cls, nvars: int, pairs) -> "PolyExpr":
        """Build from ``[(exponents, coefficient), ...]``."""
        flat = [(NONE, 0.0)] * nvars
        return cls(nvars, [(exps, flat, coef) for exps, coef in pairs])

    @classmethod
    def constant(cls, nvars: int, value) -> "PolyExpr":
        return cls.monomials(nvars, [((0,) * nvars, value)])

    @classmethod
    def wave(cls, nvars: int, var: int, kind: int, freq: float, coef=1) -> "PolyExpr":
        waves = [(NONE, 0.0)] * nvars
        waves[var] = (kind, freq)
        return cls(nvars, [((0,) * nvars, waves, coef)])

    def terms(self):
        """Iterate over (exponents, waves, coefficient) in a canonical order."""
        n = self.nvars
        for key in sorted(self._terms):
            exps = key[:n]
            flat = key[n:]
            waves = tuple((flat[2 * j], flat[2 * j + 1]) for j in range(n))
            yield exps, waves, self._terms[key]

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __add__(self, other):
        if isinstance(other, Number):
            other = PolyExpr.constant(self.nvars, other)
        out = PolyExpr(self.nvars, self.terms())
        for term in other.terms():
            out._add(*term)
        return out

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other if isinstance(other, PolyExpr) else -other)

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            raise TypeError("only scalar multiplication is supported")
        return PolyExpr(self.nvars, [(e, w, c * scalar) for e, w, c in self.terms()])

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, PolyExpr) and self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        return hash(tuple(sorted(self._terms.items())))

    def diff(self, var: int) -> "PolyExpr":
        out = PolyExpr(self.nvars)
        for exps, waves, coef in self.terms():
            e = exps[var]
            kind, freq = waves[var]
            if e != 0:
                lowered = list(exps)
                lowered[var] = e - 1
                out._add(lowered, waves, coef * e)
            if kind != NONE:
                turned = list(waves)
                turned[var] = (SIN if kind == COS else COS, freq)
                sign = -1 if kind == COS else 1
                out._add(exps, turned, coef * sign * _exact(freq))
        return out

    def depends_on(self, var: int) -> bool:
        return any(exps[var] != 0 or waves[var][0] != NONE for exps, waves, _ in self.terms())

    def degree(self, var: int) -> int:
        return max((exps[var] for exps, _, _ in self.terms()), default=0)

    def has_waves(self) -> bool:
        return any(kind != NONE for _, waves, _ in self.terms() for kind, _ in waves)

    def arrays(self):
        """(coef, exps, trig, freq) arrays for the compiled evaluator."""
        rows = list(self.terms())
        count = len(rows)
        coef = np.array([float(c) for _, _, c in rows], dtype=float)
        exps = np.array([e for e, _, _ in rows], dtype=np.int64).reshape(count, self.nvars)
        trig = np.array([[k for k, _ in w] for _, w, _ in rows], dtype=np.int64).reshape(count, self.nvars)
        freq = np.array([[f for _, f in w] for _, w, _ in rows], dtype=float).reshape(count, self.nvars)
        return coef, exps, trig, freq

    def __call__(self, point) -> float:
        x = np.asarray(point, dtype=float)
        total = 0.0
        for exps, waves, coef in self.terms():
            val = float(coef)
            for j in range(self.nvars):
                if exps[j]:
                    val *= x[j] ** exps[j]
                kind, freq = waves[j]
                if kind == COS:
                    val *= np.cos(freq * x[j])
                elif kind == SIN:
                    val *= np.sin(freq * x[j])
            total += val
        return total

    def to_sympy(self, symbols):
        import sympy as sp
        total = sp.Integer(0)
        for exps, waves, coef in self.terms():
            term = sp.nsimplify(coef) if isinstance(coef, (int, Fraction)) else sp.Float(coef)
            for j, s in enumerate(symbols):
                term *= s ** exps[j]
                kind, freq = waves[j]
                if kind == COS:
                    term *= sp.cos(sp.nsimplify(freq) * s)
                elif kind == SIN:
                    term *= sp.sin(sp.nsimplify(freq) * s)
            total += term
        return total

    def to_data(self):
        """Plain list form: one dict per term."""
        out = []
        for exps, waves, coef in self.terms():
            item = {"exp": list(exps), "coef": _coef_data(coef)}
            if any(k for k, _ in waves):
                item["waves"] = [[_WAVE_NAMES[k], f] for k, f in waves]
            out.append(item)
        return out

    @classmethod
    def from_data(cls, nvars: int, items) -> "PolyExpr":
        """Inverse of ``to_data``; a term may also be the pair [exponents, coefficient]."""
        names = {v: k for k, v in _WAVE_NAMES.items()}
        terms = []
        for item in items:
            if isinstance(item, (list, tuple)):
                exps, coef, waves = item[0], item[1], None
            else:
                unknown = set(item) - {"exp", "coef", "waves"}
                if unknown:
                    raise ValueError(f"unknown term keys {sorted(unknown)}")
                exps, coef, waves = item["exp"], item["coef"], item.get("waves")
            if len(exps) != nvars:
                raise ValueError(f"term {item!r} needs {nvars} exponents")
            if waves is None:
                waves = [(NONE, 0.0)] * nvars
            else:
                if len(waves) != nvars:
                    raise ValueError(f"term {item!r} needs {nvars} wave entries")
                waves = [(names[str(k)], float(f)) for k, f in waves]
            terms.append(([int(e) for e in exps], waves, parse_coefficient(coef)))
        return cls(nvars, terms)

    def __repr__(self):
        return f"PolyExpr({self.nvars}, {self.to_data()})"


def _exact(freq: float):
    return int(freq) if float(freq).is_integer() else freq


def _coef_data(coef):
    if isinstance(coef, Fraction):
        return str(coef) if coef.denominator != 1 else int(coef.numerator)
    return coef


def parse_coefficient(value):
    """Accept ints, floats and strings such as '3/2'."""
    if isinstance(value, bool):
        raise ValueError("boolean is not a coefficient")
    if isinstance(value, (int, float, Fraction)):
        return value
    if isinstance(value, str):
        return Fraction(value)
    raise ValueError(f"cannot read coefficient {value!r}")


def stack_exprs(exprs):
    """Concatenate several expressions' arrays with offsets for the evaluator."""
    parts = [e.arrays() for e in exprs]
    offsets = np.zeros(len(parts) + 1, dtype=np.int64)
    for i, p in enumerate(parts):
        offsets[i + 1] = offsets[i] + p[0].shape[0]
    nvars = exprs[0].nvars
    coef = np.concatenate([p[0] for p in parts]) if parts else np.zeros(0)
    exps = np.concatenate([p[1] for p in parts]).reshape(-1, nvars)
    trig = np.concatenate([p[2] for p in parts]).reshape(-1, nvars)
    freq = np.concatenate([p[3] for p in parts]).reshape(-1, nvars)
    return coef, exps, trig, freq, offsets
