"""Shared hypothesis strategies."""
import numpy as np
from hypothesis import strategies as st
from scipy.stats import special_ortho_group


def orthogonal(n: int):
    return st.integers(0, 2 ** 31 - 1).map(
        lambda seed: special_ortho_group.rvs(n, random_state=seed) if n > 1 else np.eye(1))


def vectors(n: int, bound: float = 3.0):
    return st.lists(st.floats(-bound, bound, allow_nan=False), min_size=n, max_size=n).map(np.array)


def scales():
    return st.floats(0.2, 4.0).flatmap(lambda a: st.sampled_from([a, -a]))


def parabolic_triples(n: int):
    return st.tuples(scales(), orthogonal(n), vectors(n))
