import pytest

from lorentzhol.errors import PreconditionError
from lorentzhol.spinor_table import SEE_REFERENCE, SPIN_PRESETS, spin_preset, wang_table_lookup


@pytest.mark.parametrize("row,params,N", [
    ("SU(m)", {"m": 3}, 2), ("SU(m)xZ2", {"m": 4}, 1), ("Sp(k)", {"k": 2}, 3),
    ("Sp(k)xZd", {"k": 2, "d": 3}, 1), ("Sp(k).Z2d", {"k": 2, "d": 2}, 1), ("Sp(k).Q4d", {"k": 4, "d": 2}, 2),
    ("Sp(k).Gamma", {"k": 2}, 1), ("Spin(7)", {}, 1), ("G2", {}, 1),
])
def test_table_values(row, params, N):
    assert wang_table_lookup(row, **params).N == N


def test_reference_sentinel_and_condition_errors():
    assert wang_table_lookup("Sp(k).B4d", k=2, d=2).N == SEE_REFERENCE
    with pytest.raises(ValueError, match="divisible by 4"):
        wang_table_lookup("SU(m)xZ2", m=3)
    with pytest.raises(ValueError, match="odd"):
        wang_table_lookup("Sp(k)xZd", k=3, d=2)
    with pytest.raises(ValueError):
        wang_table_lookup("Sp(k).Z2d", k=3, d=2)
    with pytest.raises(KeyError):
        wang_table_lookup("E8")


@pytest.mark.parametrize("name", sorted(SPIN_PRESETS))
def test_presets_match_the_table(name):
    preset = SPIN_PRESETS[name]
    lifted = preset.lift()
    assert lifted and lifted.N == preset.expected()


def test_sign_alternatives_are_recorded():
    lifted = SPIN_PRESETS["spin-sp2-z4"].lift()
    assert lifted.signs == (1,)
    assert lifted.alternatives == {(1,): 1, (-1,): 2}


def test_unknown_spin_preset():
    with pytest.raises(PreconditionError):
        spin_preset("spin-e8")
