import numpy as np
import pytest
from hypothesis import strategies as st

from treel1.tree import build_tree, random_tree

REL = 1e-9


def close(a, b, rel=REL):
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def random_trees(count, n_max, seed, max_degree=None, n_min=2, zero_frac=0.0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        deg = max_degree if max_degree is not None else int(rng.integers(2, 6))
        t = random_tree(n, rng, max_degree=deg)
        if zero_frac:
            edges = [(p, c, 0.0 if rng.random() < zero_frac else w) for p, c, w in t.edges()]
            t = build_tree(t.root, edges)
        out.append(t)
    return out


@st.composite
def trees(draw, max_n=30, integer_lengths=False):
    """Random rooted trees with vertex 0 as root and parents earlier in id order."""
    n = draw(st.integers(2, max_n))
    edges = []
    for v in range(1, n):
        p = draw(st.integers(0, v - 1))
        if integer_lengths:
            w = float(draw(st.integers(1, 16)))
        else:
            w = draw(st.floats(0.01, 100.0, allow_nan=False, allow_infinity=False))
        edges.append((p, v, w))
    return build_tree(0, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
