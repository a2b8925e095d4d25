"""Proper-discontinuity verdicts for the supported parametric deck groups.

Verdicts are "pass", "fail" or "unknown"; unsupported families are never guessed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

PASS, FAIL, UNKNOWN = "pass", "fail", "unknown"
MAX_DENOMINATOR = 10 ** 6
KINDS = ("trivial", "lattice", "deck", "finite", "sign-flip", "boost")


@dataclass
class Verdict:
    pd1: str
    pd2: str
    witness: dict = field(default_factory=dict)
    caveats: list = field(default_factory=list)

    @property
    def status(self) -> str:
        if FAIL in (self.pd1, self.pd2):
            return FAIL
        if self.pd1 == self.pd2 == PASS:
            return PASS
        return UNKNOWN

    def to_data(self):
        return {"pd1": self.pd1, "pd2": self.pd2, "status": self.status,
                "witness": self.witness, "caveats": list(self.caveats)}


@dataclass(frozen=True)
class DiscontinuityFamily:
    """A parametric group of isometries.

    kinds:
      trivial    -- the trivial group
      lattice    -- translations by ``vectors`` (rows) of a Euclidean space
      deck       -- a fundamental group acting by deck transformations
      finite     -- a finite group; ``free`` says whether it acts freely
      sign-flip  -- (v, u, x) -> ((-1)^m v, (-1)^m u, x + lattice element)
      boost      -- (v, u, x) -> (e^l v, e^-l u, x + a) for l in the lattice of
                    ``lambdas``; ``translations`` says whether the x-shifts form a
                    lattice of rank len(lambdas); ``domain`` is "half-plane" or "punctured"
    """
    kind: str
    lambdas: tuple = ()
    vectors: tuple = ()
    domain: str = "half-plane"
    translations: bool = False
    free: bool = True


def rationality(x: float, max_denominator: int = MAX_DENOMINATOR):
    """Best rational p/q with q <= bound if it matches x to 1e-12, else None."""
    q = Fraction(x).limit_denominator(max_denominator)
    return q if abs(float(q) - x) <= 1e-12 * max(1.0, abs(x)) else None


def small_combination(l1: float, l2: float, bound: float = 1e-3, max_terms: int = 64):
    """Continued-fraction search for integers (k, l) != 0 with |k l1 + l l2| < bound.

    Returns the list of convergent pairs tried, ending with the first that works.
    """
    r = l2 / l1
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    x = r
    sequence = []
    for _ in range(max_terms):
        a = math.floor(x)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        # h1 / k1 approximates r, so -h1 * l1 + k1 * l2 is small
        pair = (-h1, k1)
        value = pair[0] * l1 + pair[1] * l2
        sequence.append((pair, value))
        if abs(value) < bound:
            return sequence
        frac = x - a
        if frac == 0:
            break
        x = 1.0 / frac
    return sequence


def check_properly_discontinuous(family: DiscontinuityFamily) -> Verdict:
    kind = family.kind
    if kind == "trivial":
        return Verdict(PASS, PASS)
    if kind == "deck":
        return Verdict(PASS, PASS, caveats=["deck group of a covering"])
    if kind == "finite":
        if family.free:
            return Verdict(PASS, PASS)
        return Verdict(UNKNOWN, UNKNOWN, caveats=["finite group with fixed points"])
    if kind in ("lattice", "sign-flip"):
        vecs = np.atleast_2d(np.asarray(family.vectors, dtype=float))
        if vecs.size and np.linalg.matrix_rank(vecs, 1e-9) == vecs.shape[0]:
            return Verdict(PASS, PASS)
        return Verdict(UNKNOWN, UNKNOWN, caveats=["translation vectors are linearly dependent"])
    if kind == "boost":
        return _boost_verdict(family)
    return Verdict(UNKNOWN, UNKNOWN, caveats=[f"unsupported family {kind!r}"])


def _boost_verdict(family: DiscontinuityFamily) -> Verdict:
    lambdas = [float(x) for x in family.lambdas]
    if not lambdas or any(x == 0 for x in lambdas):
        return Verdict(UNKNOWN, UNKNOWN, caveats=["boost exponents must be nonzero"])
    if family.translations:
        # the x-translations already form a lattice, so the product action is discontinuous
        return Verdict(PASS, PASS, caveats=["discontinuity carried by the lattice translations"])
    caveats = []
    for other in lambdas[1:]:
        ratio = other / lambdas[0]
        if rationality(ratio) is None:
            seq = small_combination(lambdas[0], other)
            (k, l), value = seq[-1]
            caveats.append(f"Q-independence certified only up to denominator {MAX_DENOMINATOR}")
            witness = {"k": k, "l": l, "value": value, "lambdas": [lambdas[0], other],
                       "sequence": [[list(p), v] for p, v in seq]}
            return Verdict(FAIL, UNKNOWN, witness, caveats)
        caveats.append("exponent ratios treated as rational (numeric rationality)")
    if family.domain == "half-plane":
        return Verdict(PASS, PASS, caveats=caveats)
    if family.domain == "punctured":
        witness = {"p": [1.0, 0.0], "q": [0.0, 1.0], "coordinates": "(v, u)",
                   "reason": "orbits of the boosts through p and q accumulate on each other"}
        return Verdict(PASS, FAIL, witness, caveats)
    return Verdict(UNKNOWN, UNKNOWN, caveats=caveats + [f"unsupported domain {family.domain!r}"])


@dataclass(frozen=True)
class QuotientTypeDescriptor:
    """Gamma acting on M1 x M2 through its projection to M2, the subgroup acting
    trivially on M2, and the fibres over each element of the projection."""
    projection: DiscontinuityFamily
    identity_part: DiscontinuityFamily
    sections: object = "finite"  # "finite" or a DiscontinuityFamily


@dataclass
class QuotientVerdict:
    projection: str
    identity_pd1: str
    sections: str
    caveats: list = field(default_factory=list)

    @property
    def quotient_type(self) -> str:
        parts = (self.projection, self.identity_pd1, self.sections)
        if all(p == PASS for p in parts):
            return PASS
        return FAIL if FAIL in parts else UNKNOWN

    @property
    def status(self) -> str:
        # quotient type is sufficient, not necessary
        return PASS if self.quotient_type == PASS else UNKNOWN

    def to_data(self):
        return {"projection": self.projection, "identity_pd1": self.identity_pd1,
                "sections": self.sections, "quotient_type": self.quotient_type,
                "status": self.status, "caveats": list(self.caveats)}


def check_quotient_type(desc: QuotientTypeDescriptor) -> QuotientVerdict:
    proj = check_properly_discontinuous(desc.projection)
    ident = check_properly_discontinuous(desc.identity_part)
    if desc.sections == "finite":
        sections = PASS
    elif isinstance(desc.sections, DiscontinuityFamily):
        sections = check_properly_discontinuous(desc.sections).pd2
    else:
        sections = UNKNOWN
    return QuotientVerdict(proj.status, ident.pd1, sections, proj.caveats + ident.caveats)
