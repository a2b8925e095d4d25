"""Named scenarios, one per worked example family, in the scenario file schema."""
from __future__ import annotations

import math

from .spinor_table import SPIN_PRESETS

TWO_PI = 2 * math.pi


def _term(nv, exps, coef, waves=None):
    item = {"exp": list(exps), "coef": coef}
    if waves:
        full = [["", 0.0]] * nv
        for var, kind, freq in waves:
            full = full[:var] + [[kind, freq]] + full[var + 1:]
        item["waves"] = full
    return item


def _sq(n, i, coef=1):
    exps = [0] * (n + 2)
    exps[1 + i] = 2
    return _term(n + 2, exps, coef)


def _cos(n, i, freq=1.0, coef=1):
    return _term(n + 2, [0] * (n + 2), coef, [(1 + i, "cos", freq)])


def _reflection():
    return [[1.0, 0.0], [0.0, -1.0]]


def _rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return [[c, -s], [s, c]]


def _screw_matrix(theta):
    r = _rotation(theta)
    return [[1.0, 0.0, 0.0], [0.0, r[0][0], r[0][1]], [0.0, r[1][0], r[1][1]]]


def _flat_theta(p):
    theta = math.pi * p.get("theta_over_pi", 0.5) if "theta" not in p else p["theta"]
    return {
        "chart": {"kind": "flat-affine", "theta": theta},
        "tasks": ["quotient-holonomy"],
        "word_length": p.get("word_length", 12),
    }


def _ppwave_basic(p):
    n = 2
    return {
        "chart": {"kind": "ppwave", "n": n, "f": [_sq(n, 0), _sq(n, 1)]},
        "deck": {"generators": [], "discontinuity": {"kind": "trivial"}},
        "base": [0.0, 0.0, 0.0, 0.0],
        "tasks": ["transport", "algebra-sample", "classify", "quotient-holonomy"],
        "transport": {"loops": p.get("loops", 50), "radius": 1.5},
    }


def _cahen_wallach(m):
    def build(p):
        return {
            "chart": {"kind": "cahen-wallach", "lambdas": p.get("lambdas", [-1, -4])},
            "deck": {"cahen_wallach": {"m": p.get("m", m), "alpha": p.get("alpha", 1.0)}},
            "base": [0.0, 0.0, 0.0, 0.0],
            "tasks": ["algebra-sample", "classify", "quotient-holonomy"],
        }
    return build


def _sign_flip(p):
    n = 2
    return {
        "chart": {"kind": "ppwave", "n": n, "f": [_cos(n, 0), _cos(n, 1)]},
        "deck": {
            "generators": [{"kind": "sign-flip", "w": [TWO_PI, 0.0]},
                           {"kind": "sign-flip", "w": [0.0, TWO_PI]}],
            "discontinuity": {"kind": "sign-flip", "vectors": [[TWO_PI, 0.0], [0.0, TWO_PI]]},
        },
        "base": [0.1, 0.2, 0.3, 0.4],
        "tasks": ["algebra-sample", "classify", "quotient-holonomy"],
    }


def _boost_quotient(p):
    n = 2
    lams = p.get("lambdas", [1.0, math.sqrt(2.0)])
    return {
        "chart": {"kind": "ppwave", "n": n, "f": [_cos(n, 0), _cos(n, 1)], "domain": "half-plane",
                  "divide_by_u2": True},
        "deck": {
            "generators": [{"kind": "boost", "lam": lams[0], "w": [TWO_PI, 0.0]},
                           {"kind": "boost", "lam": lams[1], "w": [0.0, TWO_PI]}],
            "discontinuity": {"kind": "boost", "lambdas": lams, "domain": "half-plane", "translations": True},
        },
        "base": [0.1, 0.2, 0.3, 1.0],
        "tasks": ["algebra-sample", "classify", "quotient-holonomy"],
        "word_length": 3,
    }


def _boost_pair_punctured(p):
    n = 2
    lams = p.get("lambdas", [1.0, math.sqrt(2.0)])
    return {
        "chart": {"kind": "ppwave", "n": n, "f": [_sq(n, 0), _sq(n, 1)], "domain": "punctured"},
        "deck": {"generators": [], "discontinuity": {"kind": "boost", "lambdas": lams, "domain": "punctured"}},
        "base": [1.0, 0.0, 0.0, 0.0],
        "tasks": ["quotient-holonomy"],
    }


def _boost_single(p):
    n = 2
    lam = p.get("lam", 0.5)
    return {
        "chart": {"kind": "ppwave", "n": n, "f": [_sq(n, 0), _sq(n, 1)], "domain": "half-plane",
                  "divide_by_u2": True},
        "deck": {"generators": [{"kind": "boost", "lam": lam}],
                 "discontinuity": {"kind": "boost", "lambdas": [lam], "domain": "half-plane"}},
        "base": [0.0, 0.3, 0.2, 1.0],
        "tasks": ["algebra-sample", "classify", "quotient-holonomy"],
    }


def _moebius(p):
    n = 2
    m = p.get("m", 1)
    return {
        "chart": {"kind": "ppwave", "n": n, "f": [_cos(n, 0), _sq(n, 1)]},
        "deck": {"generators": [{"kind": "sign-flip", "flips": m, "A": _reflection(), "w": [TWO_PI, 0.0]}],
                 "discontinuity": {"kind": "deck"}},
        "base": [0.1, 0.2, 0.3, 0.4],
        "tasks": ["algebra-sample", "classify", "quotient-holonomy"],
    }


def _klein(p):
    n = 2
    m1, m2 = p.get("m1", 1), p.get("m2", 1)
    return {
        "chart": {"kind": "ppwave", "n": n, "f": [_cos(n, 0), _cos(n, 1)]},
        "deck": {"generators": [{"kind": "sign-flip", "flips": m1, "A": _reflection(), "w": [TWO_PI, 0.0]},
                                {"kind": "sign-flip", "flips": m2, "w": [0.0, TWO_PI]}],
                 "discontinuity": {"kind": "deck"}},
        "base": [0.1, 0.2, 0.3, 0.4],
        "tasks": ["algebra-sample", "classify", "quotient-holonomy"],
    }


def _moebius_boost(p):
    n = 2
    lam = p.get("lam", 0.5)
    return {
        "chart": {"kind": "ppwave", "n": n, "f": [_cos(n, 0), _sq(n, 1)], "domain": "half-plane",
                  "divide_by_u2": True},
        "deck": {"generators": [{"kind": "boost", "lam": lam, "A": _reflection(), "w": [TWO_PI, 0.0]}],
                 "discontinuity": {"kind": "deck"}},
        "base": [0.1, 0.2, 0.3, 1.0],
        "tasks": ["algebra-sample", "classify", "quotient-holonomy"],
        "word_length": 6,
    }


def _rotation_boost(p):
    n = 2
    theta = p.get("theta", math.pi / 2)
    lam, c = p.get("lam", 0.5), p.get("c", 1.0)
    return {
        "chart": {"kind": "ppwave", "n": n, "f": [_sq(n, 0), _sq(n, 1)], "domain": "half-plane",
                  "divide_by_u2": True},
        "deck": {"generators": [{"kind": "boost", "lam": lam, "tau": c, "A": _rotation(theta)}],
                 "discontinuity": {"kind": "boost", "lambdas": [lam], "domain": "half-plane"}},
        "base": [0.1, 0.2, 0.3, 1.0],
        "tasks": ["algebra-sample", "classify", "quotient-holonomy"],
        "word_length": 6,
    }


def _screw(p):
    n = 3
    theta = p.get("theta", TWO_PI / 3)
    m = p.get("m", 1)
    return {
        "chart": {"kind": "ppwave", "n": n, "f": [_cos(n, 0), _sq(n, 1), _sq(n, 2)]},
        "deck": {"generators": [{"kind": "sign-flip", "flips": m, "A": _screw_matrix(theta), "w": [TWO_PI, 0.0, 0.0]}],
                 "discontinuity": {"kind": "deck"}},
        "base": [0.1, 0.2, 0.3, 0.1, 0.4],
        "tasks": ["algebra-sample", "classify", "quotient-holonomy"],
        "word_length": 8,
    }


def _infinitely_generated(p):
    n = 2
    lams = p.get("lambdas", [1.0, math.sqrt(2.0), math.sqrt(3.0)])
    return {
        "chart": {"kind": "ppwave", "n": n, "f": [_sq(n, 0), _sq(n, 1)], "domain": "half-plane",
                  "divide_by_u2": True},
        "deck": {"generators": [{"kind": "boost", "lam": lam} for lam in lams],
                 "discontinuity": {"kind": "deck"},
                 "truncation": {"generators_used": len(lams), "of": "infinitely many"}},
        "base": [0.1, 0.2, 0.3, 1.0],
        "tasks": ["algebra-sample", "classify", "quotient-holonomy"],
        "word_length": 2,
    }


def _cylinder(p):
    return {
        "chart": {"kind": "cylinder", "profile": {"kind": "tanh", "amplitude": 1.0, "lam": 2.0},
                  "a": 1.0, "n": 2},
        "base": [0.5, 0.1, 0.2, 0.3],
        "tasks": ["transport", "algebra-sample"],
        "transport": {"loops": 3, "radius": 0.3},
    }


def _spin(name):
    def build(p):
        return {"tasks": ["spin-check"], "spin": {"preset": name}}
    return build


# name -> (family tag, builder)
PRESETS = {
    "flat-a-theta": ("flat space-time quotient by an affine screw", _flat_theta),
    "flat-a-theta-irrational": ("flat space-time quotient by an affine screw",
                                lambda p: _flat_theta({"theta": 1.0, "word_length": 30, **p})),
    "ppwave-basic": ("pp-wave with abelian holonomy", _ppwave_basic),
    "cahen-wallach-even": ("Cahen-Wallach quotient, even flip power", _cahen_wallach(2)),
    "cahen-wallach-odd": ("Cahen-Wallach quotient, odd flip power", _cahen_wallach(1)),
    "sign-flip-quotient": ("pp-wave quotient by sign flips over a lattice", _sign_flip),
    "boost-quotient": ("pp-wave quotient by boosts over a lattice", _boost_quotient),
    "boost-pair-punctured": ("boost pair on the punctured plane (not discontinuous)", _boost_pair_punctured),
    "boost-single-halfplane": ("single boost on the half-plane", _boost_single),
    "coupled-moebius": ("coupled holonomy over a Moebius strip", _moebius),
    "coupled-klein": ("coupled holonomy over a Klein bottle", _klein),
    "coupled-moebius-boost": ("coupled boost holonomy over a Moebius strip", _moebius_boost),
    "coupled-rotation-boost": ("coupled rotation-boost holonomy", _rotation_boost),
    "screw-5d": ("five-dimensional coupled screw quotient", _screw),
    "infinitely-generated-truncated": ("infinitely generated holonomy, finite truncation", _infinitely_generated),
    "cylinder-codazzi": ("cylinder metric from a Codazzi profile", _cylinder),
}
for _name in SPIN_PRESETS:
    PRESETS[_name] = ("fixed spinors of a spin holonomy group", _spin(_name))


def preset_names() -> list:
    return sorted(PRESETS)


def expand_preset(name: str, params: dict | None = None) -> dict:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}")
    family, builder = PRESETS[name]
    data = builder(dict(params or {}))
    data.setdefault("name", name)
    data["provenance"] = {"preset": name, "family": family}
    return data
