"""Scenario files: loading, validation, execution and report emission."""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import yaml

from . import __version__
from .algebra import ParabolicAlgebraElement, classify_type, exp_element, invariant_null_lines
from .cylinder import CodazziProfile, build_cylinder_metric, cylinder_algebra_sample, cylinder_gram, cylinder_transport
from .discontinuity import DiscontinuityFamily, check_properly_discontinuous
from .errors import DiscontinuityRefusal, HolonomyError, ScenarioError
from .expr import PolyExpr
from .minkowski import lorentz_defect, parabolic_matrix
from .paths import PathSpec
from .ppwave import (ambrose_singer_sample, build_cahen_wallach, cahen_wallach_spec, check_path,
                     default_sample_spec, ppwave_chart, span_contains, transport_with_info)
from .presets import expand_preset
from .quotient import (DeckIsometry, FlatAffineGroup, boost, cw_flip, deck_cross_check, default_connecting_path,
                       flat_quotient_holonomy, flat_rotation_generator, quotient_holonomy, sign_flip, v_translation,
                       validate_isometry, _deck)
from .spin import lorentz_fixed_correspondence, serialize_complex
from .spinor_table import spin_preset

SCHEMA_VERSION = 1
TOL_ENV = "LORENTZHOL_TOL"
TASK_ORDER = ("transport", "algebra-sample", "classify", "quotient-holonomy", "spin-check")
CERTIFIED, CONDITIONAL, FAILED = "certified", "conditional", "failed"
_RANK = {CERTIFIED: 0, CONDITIONAL: 1, FAILED: 2}

TOP_KEYS = {"schema_version", "name", "preset", "params", "chart", "deck", "base", "tasks", "transport", "spin",
            "tolerances", "seed", "word_length", "output", "provenance"}
CHART_KEYS = {
    "ppwave": {"kind", "n", "f", "domain", "divide_by_u2", "periods"},
    "cahen-wallach": {"kind", "lambdas"},
    "cylinder": {"kind", "profile", "a", "n"},
    "flat-affine": {"kind", "theta", "generators"},
}
DECK_KEYS = {"generators", "discontinuity", "cahen_wallach", "truncation", "waypoints"}
GENERATOR_KEYS = {"kind", "alpha", "flips", "lam", "A", "w", "tau", "a", "b"}
DISCONTINUITY_KEYS = {"kind", "lambdas", "vectors", "domain", "translations", "free"}
TRANSPORT_KEYS = {"loops", "radius", "paths", "seed"}
TOLERANCE_KEYS = {"ode", "dedup", "rank", "cross_check"}


def default_tolerances() -> dict:
    ode = float(os.environ.get(TOL_ENV, "1e-10"))
    return {"ode": ode, "dedup": 1e-8, "rank": 1e-7, "cross_check": 1e-6}


@dataclass
class Scenario:
    name: str
    tasks: list
    chart: dict | None = None
    deck: dict | None = None
    base: list | None = None
    transport: dict = field(default_factory=dict)
    spin: dict | None = None
    tolerances: dict = field(default_factory=default_tolerances)
    seed: int = 0
    word_length: int = 4
    output: str | None = None
    provenance: dict = field(default_factory=dict)


def _line_map(text: str) -> dict:
    """Key path -> 1-based line number, from the YAML node tree."""
    lines = {}
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return lines

    def walk(node, path):
        if isinstance(node, yaml.MappingNode):
            for key, value in node.value:
                p = path + (key.value,)
                lines[p] = key.start_mark.line + 1
                walk(value, p)
        elif isinstance(node, yaml.SequenceNode):
            for i, value in enumerate(node.value):
                p = path + (i,)
                lines[p] = value.start_mark.line + 1
                walk(value, p)

    if root is not None:
        walk(root, ())
    return lines


class _Validator:
    def __init__(self, source: str, lines: dict):
        self.source = source
        self.lines = lines

    def fail(self, path, message):
        where = ".".join(str(p) for p in path) or "<root>"
        line = self.lines.get(tuple(path))
        loc = f"{self.source}:{line}" if line else self.source
        raise ScenarioError(f"{loc}: field '{where}': {message}")

    def keys(self, data, allowed, path):
        if not isinstance(data, dict):
            self.fail(path, "expected a mapping")
        for key in data:
            if key not in allowed:
                self.fail(tuple(path) + (key,), f"unknown key (allowed: {', '.join(sorted(allowed))})")


def _merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for key, value in over.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def scenario_from_dict(data: dict, source: str = "<scenario>", lines: dict | None = None) -> Scenario:
    v = _Validator(source, lines or {})
    v.keys(data, TOP_KEYS, ())
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        v.fail(("schema_version",), f"unsupported schema version {version!r}")
    if "preset" in data:
        try:
            expanded = expand_preset(data["preset"], data.get("params"))
        except KeyError as exc:
            v.fail(("preset",), str(exc.args[0]))
        rest = {k: val for k, val in data.items() if k not in ("preset", "params", "schema_version")}
        provenance = expanded.pop("provenance")
        data = _merge(expanded, rest)
        data["provenance"] = _merge(provenance, data.get("provenance", {}))
    tasks = data.get("tasks")
    if not tasks:
        v.fail(("tasks",), "no tasks")
    for i, t in enumerate(tasks):
        if t not in TASK_ORDER:
            v.fail(("tasks", i), f"unknown task {t!r}")
    chart = data.get("chart")
    if chart is not None:
        kind = chart.get("kind") if isinstance(chart, dict) else None
        if kind not in CHART_KEYS:
            v.fail(("chart", "kind"), f"chart kind must be one of {sorted(CHART_KEYS)}")
        v.keys(chart, CHART_KEYS[kind], ("chart",))
    deck = data.get("deck")
    if deck is not None:
        v.keys(deck, DECK_KEYS, ("deck",))
        for i, g in enumerate(deck.get("generators", [])):
            v.keys(g, GENERATOR_KEYS, ("deck", "generators", i))
        if "discontinuity" in deck:
            v.keys(deck["discontinuity"], DISCONTINUITY_KEYS, ("deck", "discontinuity"))
    v.keys(data.get("transport", {}), TRANSPORT_KEYS, ("transport",))
    tolerances = default_tolerances()
    if "tolerances" in data:
        v.keys(data["tolerances"], TOLERANCE_KEYS, ("tolerances",))
        tolerances.update({k: float(x) for k, x in data["tolerances"].items()})
    needs_chart = {"transport", "algebra-sample", "classify", "quotient-holonomy"} & set(tasks)
    if needs_chart and chart is None:
        v.fail(("chart",), f"tasks {sorted(needs_chart)} need a chart")
    if "quotient-holonomy" in tasks and chart and chart["kind"] != "flat-affine" and deck is None:
        v.fail(("deck",), "quotient-holonomy needs a deck group")
    if "spin-check" in tasks:
        spin = data.get("spin")
        if not isinstance(spin, dict) or "preset" not in spin:
            v.fail(("spin",), "spin-check needs an orthogonal-part descriptor (spin.preset)")
        v.keys(spin, {"preset"}, ("spin",))
    return Scenario(
        name=str(data.get("name", "scenario")),
        tasks=[t for t in TASK_ORDER if t in tasks],
        chart=chart, deck=deck, base=data.get("base"),
        transport=dict(data.get("transport", {})), spin=data.get("spin"),
        tolerances=tolerances, seed=int(data.get("seed", 0)),
        word_length=int(data.get("word_length", 4)), output=data.get("output"),
        provenance=dict(data.get("provenance", {})),
    )


def load_scenario(path) -> Scenario:
    path = os.fspath(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read scenario ({exc.strerror})") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{path}: invalid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise ScenarioError(f"{path}: scenario must be a mapping")
    return scenario_from_dict(data, path, _line_map(text))


def preset_scenario(name: str, params: dict | None = None, **overrides) -> Scenario:
    data = {"preset": name}
    if params:
        data["params"] = params
    data.update(overrides)
    return scenario_from_dict(data, f"<preset {name}>")


# ---------------------------------------------------------------- execution

def _build_chart(spec: dict):
    kind = spec["kind"]
    if kind == "ppwave":
        n = int(spec["n"])
        f = PolyExpr.from_data(n + 2, spec.get("f", []))
        periods = spec.get("periods") or ()
        return ppwave_chart(f, n, spec.get("domain", "plane"), periods, divide_by_u2=bool(spec.get("divide_by_u2")))
    if kind == "cahen-wallach":
        lambdas = [Fraction(x) if isinstance(x, str) else x for x in spec["lambdas"]]
        cw = cahen_wallach_spec(lambdas)
        return build_cahen_wallach(cw), cw
    if kind == "cylinder":
        prof = CodazziProfile(**spec["profile"])
        return build_cylinder_metric(prof, float(spec["a"]), int(spec["n"]))
    raise ScenarioError(f"chart kind {kind!r} has no chart object")


def _generator(n: int, g: dict) -> DeckIsometry:
    kind = g.get("kind", "custom")
    A, w = g.get("A"), g.get("w")
    if kind == "translation":
        return v_translation(n, float(g["alpha"]))
    if kind == "sign-flip":
        return sign_flip(n, A, w, int(g.get("flips", 1)))
    if kind == "boost":
        return boost(n, float(g["lam"]), A, w, float(g.get("tau", 0.0)))
    if kind == "custom":
        return _deck(n, g.get("a", 1.0), g.get("b", 0.0), g.get("tau", 0.0), A, w)
    raise ScenarioError(f"unknown generator kind {kind!r}")


def _family(d: dict | None) -> DiscontinuityFamily:
    if not d:
        return DiscontinuityFamily("unknown")
    return DiscontinuityFamily(d["kind"], tuple(float(x) for x in d.get("lambdas", ())),
                               tuple(tuple(float(y) for y in row) for row in d.get("vectors", ())),
                               d.get("domain", "half-plane"), bool(d.get("translations", False)),
                               bool(d.get("free", True)))


def _element_data(e) -> dict:
    return {"a": e.a, "X": e.X, "v": e.v}


def _random_loops(chart, base, count, radius, rng):
    loops = []
    tries = 0
    while len(loops) < count and tries < 50 * count:
        tries += 1
        pts = [base + rng.uniform(-radius, radius, base.size) for _ in range(2)]
        try:
            path = PathSpec.polyline([base, *pts], closed=True)
            if hasattr(chart, "v_free"):
                check_path(chart, path)
            else:
                for p in path.sample_points():
                    chart.require(p)
        except HolonomyError:
            continue
        loops.append(path)
    return loops


class _Context:
    def __init__(self, scenario: Scenario):
        self.s = scenario
        self.chart = None
        self.cw = None
        self.algebra = None
        self.caveats = []
        spec = scenario.chart
        if spec and spec["kind"] != "flat-affine":
            built = _build_chart(spec)
            if isinstance(built, tuple):
                self.chart, self.cw = built
            else:
                self.chart = built
        self.base = None
        if self.chart is not None:
            if scenario.base is None:
                raise ScenarioError("chart tasks need a base point")
            self.base = self.chart.require(np.asarray(scenario.base, dtype=float))

    @property
    def is_cylinder(self):
        return self.chart is not None and not hasattr(self.chart, "v_free")


def _task_transport(ctx: _Context) -> dict:
    s, chart = ctx.s, ctx.chart
    tol = s.tolerances["ode"]
    rng = np.random.default_rng(s.transport.get("seed", s.seed))
    paths = [PathSpec.from_data(p) for p in s.transport.get("paths", [])]
    paths += _random_loops(chart, ctx.base, int(s.transport.get("loops", 0)), float(s.transport.get("radius", 1.0)), rng)
    if ctx.is_cylinder:
        gram = cylinder_gram(chart.n)
        mats = [cylinder_transport(chart, p, tol) for p in paths]
        defect = max((float(np.abs(m.T @ gram @ m - gram).max()) for m in mats), default=0.0)
        return {"status": CERTIFIED, "tolerance": tol, "paths": len(paths), "max_metric_defect": defect}
    infos = [transport_with_info(chart, p, tol) for p in paths]
    n = chart.n
    pattern = 0.0
    if chart.v_free:
        for info in infos:
            t = info.matrix
            pattern = max(pattern, float(np.abs(t - parabolic_matrix(1.0, np.eye(n), t[0, 1:-1])).max()))
    out = {
        "status": CERTIFIED, "tolerance": tol, "paths": len(paths),
        "max_lorentz_defect": max((lorentz_defect(i.matrix) for i in infos), default=0.0),
        "max_pattern_defect": pattern if chart.v_free else None,
        "max_refinement_discrepancy": max((i.discrepancy for i in infos), default=0.0),
        "matrices": [i.matrix for i in infos[: len(s.transport.get("paths", []))]],
    }
    return out


def _task_algebra(ctx: _Context) -> dict:
    s, chart = ctx.s, ctx.chart
    rank_tol = s.tolerances["rank"]
    if ctx.is_cylinder:
        rng = np.random.default_rng(s.seed)
        ends = [ctx.base + rng.uniform(-0.3, 0.3, ctx.base.size) for _ in range(4)]
        basis = cylinder_algebra_sample(chart, ctx.base, ends, rank_tol)
        ctx.algebra = []
        out = {"status": CONDITIONAL, "tolerance": rank_tol, "dimension": len(basis),
               "caveats": ["cylinder algebra is reported in an orthonormal frame without type analysis"]}
        if not basis:
            out["caveats"].append("curvature vanishes: the sampled metric is flat")
        return out
    spec = default_sample_spec(chart, ctx.base, seed=s.seed)
    basis = ambrose_singer_sample(chart, ctx.base, spec, s.tolerances["ode"], rank_tol)
    ctx.algebra = basis
    n = chart.n
    rank = sum(span_contains(basis, ParabolicAlgebraElement(0.0, np.zeros((n, n)), e)) for e in np.eye(n)) if basis else 0
    return {"status": CERTIFIED, "tolerance": rank_tol, "dimension": len(basis), "translation_rank": int(rank),
            "samples": len(spec.paths), "basis": [_element_data(e) for e in basis]}


def _task_classify(ctx: _Context) -> dict:
    if ctx.algebra is None:
        _task_algebra(ctx)
    if not ctx.algebra:
        return {"status": CONDITIONAL, "type_tag": None, "caveats": ["connected holonomy is trivial; no type"]}
    tol = ctx.s.tolerances["rank"]
    try:
        r = classify_type(ctx.algebra, tol)
    except HolonomyError as exc:
        return {"status": CONDITIONAL, "type_tag": None, "tolerance": tol, "caveats": [str(exc)]}
    return {"status": CERTIFIED, "tolerance": tol, "type_tag": r.type_tag, "dim_center": len(r.center_basis),
            "dim_derived": len(r.derived_basis), "k": r.k, "has_scaling": r.has_scaling,
            "phi": r.phi, "psi": r.psi, "indecomposability": _indecomposability(ctx.algebra)}


def _indecomposability(algebra) -> dict:
    # only invariant null lines are searched; nondegenerate invariant subspaces are not
    lines = invariant_null_lines([exp_element(e).matrix for e in algebra])
    return {"invariant_null_lines": len(lines), "nondegenerate_subspaces": "not certified"}


def _cross_check_paths(chart, sigma, base, waypoints):
    paths = [default_connecting_path(chart, sigma, base)]
    for wp in waypoints:
        try:
            path = default_connecting_path(chart, sigma, base, [wp])
            check_path(chart, path)
        except HolonomyError:
            continue
        paths.append(path)
    return paths


def _default_waypoints(base):
    out = []
    for shift in (0.6, -0.45):
        w = base.copy()
        w[1:-1] += shift * np.linspace(1.0, 0.5, base.size - 2)
        w[0] += shift
        w[-1] += 0.25 * abs(shift)
        out.append(w)
    return out


def _task_quotient(ctx: _Context) -> dict:
    s = ctx.s
    if s.chart["kind"] == "flat-affine":
        spec = s.chart
        if "generators" in spec:
            group = FlatAffineGroup([(np.asarray(g["matrix"], dtype=float), g.get("vector", [0.0] * 4))
                                     for g in spec["generators"]])
        else:
            group = FlatAffineGroup([(flat_rotation_generator(float(spec["theta"])), [0.0, 0.0, 0.0, 1.0])])
        sample = flat_quotient_holonomy(group, s.word_length, s.tolerances["dedup"])
        out = {"tolerance": s.tolerances["dedup"], "word_length": s.word_length, "saturated": sample.saturated,
               "order": sample.order, "growth": sample.growth, "likely_continuous": sample.likely_continuous,
               "sampled_elements": len(sample.elements), "generators": [A for A in group.linear_parts]}
        if sample.saturated:
            out["status"] = CERTIFIED
        else:
            out["status"] = CONDITIONAL
            out["caveats"] = [f"closure not saturated at word length {s.word_length}; group likely infinite"]
        return out
    chart, deck = ctx.chart, s.deck
    n = chart.n
    if "cahen_wallach" in deck:
        m = int(deck["cahen_wallach"].get("m", 0))
        alpha = float(deck["cahen_wallach"].get("alpha", 1.0))
        gens = [v_translation(n, alpha)] if alpha else []
        if m:
            gens.append(cw_flip(ctx.cw, m))
        vectors = [[alpha, 0.0]] if alpha else []
        if m:
            vectors.append([0.0, m * ctx.cw.beta * math.pi])
        family = DiscontinuityFamily("lattice", vectors=tuple(map(tuple, vectors))) if vectors \
            else DiscontinuityFamily("trivial")
    else:
        gens = [_generator(n, g) for g in deck.get("generators", [])]
        family = _family(deck.get("discontinuity"))
    verdict = check_properly_discontinuous(family)
    out = {"tolerance": s.tolerances["dedup"], "word_length": s.word_length, "discontinuity": verdict.to_data()}
    if "truncation" in deck:
        out["truncation"] = deck["truncation"]
    try:
        desc = quotient_holonomy(chart, gens, ctx.base, verdict, word_len=s.word_length,
                                 tol=s.tolerances["dedup"])
    except DiscontinuityRefusal as exc:
        out.update({"status": FAILED, "refused": True, "reason": str(exc), "witness": exc.witness})
        return out
    connected = {k: v for k, v in desc.connected.items() if k != "algebra"}
    waypoints = [np.asarray(w, dtype=float) for w in deck.get("waypoints", [])] or _default_waypoints(ctx.base)
    checks = []
    algebra = desc.connected["algebra"]
    for i, sigma in enumerate(validate_isometry(chart, g) for g in gens):
        for path in _cross_check_paths(chart, sigma, ctx.base, waypoints):
            cc = deck_cross_check(chart, sigma, ctx.base, path, algebra, s.tolerances["cross_check"])
            checks.append({"generator": i, "class_error": cc.class_error, "outside_connected": cc.remainder_outside,
                           "agrees": cc.agrees})
    status = CERTIFIED if desc.status == "certified" else CONDITIONAL
    if not all(c["agrees"] for c in checks):
        status = FAILED
    out.update({
        "status": status, "type_tag": desc.type_tag, "connected": connected,
        "discrete_generators": [{"a": a, "A": A} for a, A in desc.discrete_generators],
        "classes": [{"a": a, "A": A} for a, A in desc.classes], "class_count": len(desc.classes),
        "lower_bound_only": desc.lower_bound_only, "saturated": desc.sample.saturated,
        "normalizes": desc.normalizes, "cross_checks": checks, "caveats": desc.caveats,
    })
    return out


def _task_spin(ctx: _Context) -> dict:
    preset = spin_preset(ctx.s.spin["preset"])
    lifted = preset.lift()
    if not lifted:
        return {"status": FAILED, "lift": False, "relation": lifted.relation.label(), "reason": lifted.reason}
    corr = lorentz_fixed_correspondence(lifted)
    expected = preset.expected()
    ok = lifted.N == expected and corr.equal and corr.v1_norm < 1e-10
    return {
        "status": CERTIFIED if ok else FAILED, "tolerance": 1e-9, "lift": True, "n": preset.n,
        "table_row": preset.row, "table_params": preset.params, "N": lifted.N, "expected_N": expected,
        "lorentz_N": corr.lorentz_dim, "v1_norm": corr.v1_norm, "signs": list(lifted.signs),
        "alternatives": [{"signs": list(k), "N": v} for k, v in lifted.alternatives.items()],
        "max_conjugation_residual": max(lifted.conjugation_residuals, default=0.0),
        "fixed_basis": serialize_complex(_canonical_basis(lifted.fixed_basis)),
    }


def _canonical_basis(basis: np.ndarray) -> np.ndarray:
    """Basis of the same span in reduced column-echelon form, so output does not depend on SVD phases."""
    if basis.size == 0:
        return basis
    m = basis.T.copy()
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(m[r:, c])))
        if abs(m[p, c]) < 1e-9:
            continue
        m[[r, p]] = m[[p, r]]
        m[r] /= m[r, c]
        for i in range(rows):
            if i != r:
                m[i] -= m[i, c] * m[r]
        r += 1
    m[np.abs(m) < 1e-12] = 0.0
    return m.T


_TASKS = {
    "transport": _task_transport,
    "algebra-sample": _task_algebra,
    "classify": _task_classify,
    "quotient-holonomy": _task_quotient,
    "spin-check": _task_spin,
}


def run_scenario(scenario: Scenario) -> dict:
    ctx = _Context(scenario)
    results = {}
    for task in scenario.tasks:
        try:
            results[task] = _TASKS[task](ctx)
        except HolonomyError as exc:
            raise type(exc)(f"task {task}: {exc}") from exc
    status = max((r["status"] for r in results.values()), key=_RANK.__getitem__, default=CERTIFIED)
    return {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "scenario": scenario.name,
        "provenance": {**scenario.provenance, "tolerances": scenario.tolerances, "seed": scenario.seed},
        "tasks": results,
        "status": status,
    }


def exit_code(report: dict) -> int:
    return _RANK[report["status"]]


# ---------------------------------------------------------------- emission

def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        x = float(f"{x:.12g}")
        return 0.0 if x == 0 else x
    return obj


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        for i, x in enumerate(obj):
            yield from _flatten(x, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def format_report(report: dict, fmt: str = "json") -> str:
    data = _clean(report)
    if fmt == "json":
        return json.dumps(data, sort_keys=True, indent=2) + "\n"
    if fmt == "table":
        rows = list(_flatten(data))
        width = max((len(k) for k, _ in rows), default=0)
        return "".join(f"{k.ljust(width)}  {json.dumps(v)}\n" for k, v in rows)
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(report: dict, fmt: str = "json", path=None) -> str:
    text = format_report(report, fmt)
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise ScenarioError(f"{path}: cannot write report ({exc.strerror})") from None
    return text
