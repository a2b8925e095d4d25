import math

import pytest
from hypothesis import given, strategies as st

from lorentzhol.discontinuity import (DiscontinuityFamily, QuotientTypeDescriptor, check_properly_discontinuous,
                                      check_quotient_type, rationality, small_combination)


def test_rationality():
    assert rationality(0.75) == 3 / 4
    assert rationality(math.sqrt(2)) is None


@given(st.sampled_from([math.sqrt(2), math.sqrt(3), math.pi, math.e, (1 + math.sqrt(5)) / 2]))
def test_small_combination_finds_a_witness(r):
    (k, l), value = small_combination(1.0, r)[-1]
    assert (k, l) != (0, 0)
    assert abs(k + l * r) < 1e-3
    assert value == pytest.approx(k + l * r)


def test_incommensurable_boosts_fail_on_punctured_plane():
    v = check_properly_discontinuous(DiscontinuityFamily("boost", (1.0, math.sqrt(2)), domain="punctured"))
    assert v.pd1 == "fail" and v.status == "fail"
    assert abs(v.witness["k"] + v.witness["l"] * math.sqrt(2)) < 1e-3


def test_single_boost_on_half_plane_passes_and_punctured_fails_pd2():
    assert check_properly_discontinuous(DiscontinuityFamily("boost", (0.5,), domain="half-plane")).status == "pass"
    v = check_properly_discontinuous(DiscontinuityFamily("boost", (0.5,), domain="punctured"))
    assert v.pd1 == "pass" and v.pd2 == "fail"


def test_boosts_with_translation_lattice_pass():
    v = check_properly_discontinuous(DiscontinuityFamily("boost", (1.0, math.sqrt(2)), translations=True))
    assert v.status == "pass"


def test_lattice_and_finite_families():
    assert check_properly_discontinuous(DiscontinuityFamily("lattice", vectors=((1, 0), (0, 1)))).status == "pass"
    assert check_properly_discontinuous(DiscontinuityFamily("lattice", vectors=((1, 0), (2, 0)))).status == "unknown"
    assert check_properly_discontinuous(DiscontinuityFamily("finite", free=False)).status == "unknown"
    assert check_properly_discontinuous(DiscontinuityFamily("mystery")).status == "unknown"


def test_quotient_type_is_sufficient_only():
    good = check_quotient_type(QuotientTypeDescriptor(DiscontinuityFamily("lattice", vectors=((1.0,),)),
                                                      DiscontinuityFamily("trivial")))
    assert good.quotient_type == "pass" and good.status == "pass"
    bad = check_quotient_type(QuotientTypeDescriptor(
        DiscontinuityFamily("boost", (1.0, math.sqrt(2)), domain="punctured"), DiscontinuityFamily("trivial")))
    assert bad.quotient_type == "fail" and bad.status == "unknown"
