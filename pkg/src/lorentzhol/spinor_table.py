"""Fixed-spinor table for groups with a fixed spinor and matching spin presets."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .lie import (complex_conjugation, g2_basis, quat_left, right_scalar, sp_basis, spin7_basis,
                  su_basis)
from .spin import LiftedGroup, NoLift, Relation, lift_group, spinor_module

SEE_REFERENCE = "see-reference"


@dataclass(frozen=True)
class TableRow:
    N: int | str
    conditions: str
    n: int


def _require(ok: bool, row: str, conditions: str):
    if not ok:
        raise ValueError(f"{row}: parameters violate the conditions '{conditions}'")


def wang_table_lookup(name: str, **params) -> TableRow:
    """Expected fixed dimension N and side conditions for a table row.

    Rows: SU(m), SU(m)xZ2, Sp(k), Sp(k)xZd, Sp(k).Z2d, Sp(k).Q4d, Sp(k).B4d,
    Sp(k).Gamma, Spin(7), G2.
    """
    m, k, d = params.get("m"), params.get("k"), params.get("d")
    if name == "SU(m)":
        return TableRow(2, "", 2 * m)
    if name == "SU(m)xZ2":
        cond = "m divisible by 4"
        _require(m % 4 == 0, name, cond)
        return TableRow(1, cond, 2 * m)
    if name == "Sp(k)":
        return TableRow(k + 1, "", 4 * k)
    if name == "Sp(k)xZd":
        cond = "d > 1, d odd and divides k+1"
        _require(d > 1 and d % 2 == 1 and (k + 1) % d == 0, name, cond)
        return TableRow((k + 1) // d, cond, 4 * k)
    if name == "Sp(k).Z2d":
        cond = "k even, 1<d<=2d"
        _require(k % 2 == 0 and d > 1, name, cond)
        return TableRow(2 * (k // (2 * d)) + 1, cond, 4 * k)
    if name == "Sp(k).Q4d":
        cond = "k even, 1<d<=2d"
        _require(k % 2 == 0 and d > 1, name, cond)
        base = k // (2 * d)
        return TableRow(base if (k // 2) % 2 else base + 1, cond, 4 * k)
    if name == "Sp(k).B4d":
        cond = "k even and conditions in the original classification"
        _require(k % 2 == 0, name, cond)
        return TableRow(SEE_REFERENCE, cond, 4 * k)
    if name == "Sp(k).Gamma":
        cond = "k even"
        _require(k % 2 == 0, name, cond)
        return TableRow(1, cond, 4 * k)
    if name == "Spin(7)":
        return TableRow(1, "", 8)
    if name == "G2":
        return TableRow(1, "", 7)
    raise KeyError(f"unknown table row {name!r}")


@dataclass(frozen=True)
class SpinPreset:
    name: str
    row: str | None
    params: dict
    n: int

    def group_data(self) -> dict:
        return _GROUP_BUILDERS[self.name](self)

    def lift(self) -> LiftedGroup | NoLift:
        data = self.group_data()
        return lift_group(data.get("generators", ()), data.get("relations", ()), spinor_module(self.n),
                          data.get("algebra", ()), n=self.n)

    def expected(self) -> int | None:
        if self.row is None:
            return 2 ** (self.n // 2)
        return wang_table_lookup(self.row, **self.params).N


def _trivial(p):
    return {}


def _su(p):
    return {"algebra": su_basis(p.params["m"])}


def _su_z2(p):
    m = p.params["m"]
    return {"algebra": su_basis(m), "generators": [complex_conjugation(m)], "relations": [[1, 1]]}


def _sp(p):
    return {"algebra": sp_basis(p.params["k"])}


def _sp_zd(p):
    k, d = p.params["k"], p.params["d"]
    w = 2 * math.pi / d
    return {"algebra": sp_basis(k), "generators": [right_scalar(k, [math.cos(w), math.sin(w), 0, 0])],
            "relations": [[1] * d]}


def _sp_z2d(p):
    # the d-th power of the generator is -Id, which lies in Sp(k)
    k, d = p.params["k"], p.params["d"]
    w = math.pi / d
    minus_one = math.pi * np.kron(np.eye(k), quat_left([0, 1, 0, 0]))
    return {"algebra": sp_basis(k), "generators": [right_scalar(k, [math.cos(w), math.sin(w), 0, 0])],
            "relations": [Relation(tuple([1] * d), minus_one)]}


def _g2(p):
    return {"algebra": g2_basis()}


def _spin7(p):
    return {"algebra": spin7_basis()}


_GROUP_BUILDERS = {}


def _register(name, builder, row, params, n):
    _GROUP_BUILDERS[name] = builder
    SPIN_PRESETS[name] = SpinPreset(name, row, params, n)


SPIN_PRESETS: dict = {}
for _n in range(1, 9):
    _register(f"spin-trivial-{_n}", _trivial, None, {}, _n)
_register("spin-su2", _su, "SU(m)", {"m": 2}, 4)
_register("spin-su3", _su, "SU(m)", {"m": 3}, 6)
_register("spin-su4-z2", _su_z2, "SU(m)xZ2", {"m": 4}, 8)
_register("spin-sp1", _sp, "Sp(k)", {"k": 1}, 4)
_register("spin-sp2-z3", _sp_zd, "Sp(k)xZd", {"k": 2, "d": 3}, 8)
_register("spin-sp2-z4", _sp_z2d, "Sp(k).Z2d", {"k": 2, "d": 2}, 8)
_register("spin-g2", _g2, "G2", {}, 7)
_register("spin-spin7", _spin7, "Spin(7)", {}, 8)


def spin_preset(name: str) -> SpinPreset:
    try:
        return SPIN_PRESETS[name]
    except KeyError:
        raise PreconditionError(f"unknown spin preset {name!r}") from None
