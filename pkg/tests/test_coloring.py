import math

import numpy as np
import pytest
from hypothesis import given, settings

from treel1.coloring import (MonotoneColoring, monotone_coloring, multiplicity, rho_chi,
                             significant_colors, validate)
from treel1.errors import UnknownColor
from treel1.tree import build_tree, caterpillar_star, kary_tree, path_tree, star_tree

from conftest import random_trees, trees


def path_walk_multiplicity(chi):
    t = chi.tree
    best = 0
    for v in range(t.n):
        seen = set()
        x = v
        while x != t.root:
            seen.add(int(chi.color_of[x]))
            x = int(t.parent[x])
        best = max(best, len(seen))
    return best


def test_path_single_color():
    chi = monotone_coloring(path_tree(6))
    assert chi.num_colors == 1 and multiplicity(chi) == 1
    assert validate(chi) is None


def test_star_each_edge_own_color():
    chi = monotone_coloring(star_tree(5))
    assert chi.num_colors == 5 and multiplicity(chi) == 1


def test_sentinel_structure():
    t = kary_tree(2, 3)
    chi = monotone_coloring(t)
    C = chi.num_colors
    assert chi.color_of[t.root] == C == chi.sentinel
    assert chi.top[C] == t.root and chi.parent_color[C] == C
    assert chi.subtree_edges[C] == t.n - 1
    for c in chi.colors():
        g = chi.gamma[c]
        assert all(t.parent[b] == a for a, b in zip(g, g[1:]))
        assert chi.class_length[c] == pytest.approx(t.depth[g[-1]] - t.depth[g[0]])
        assert chi.subtree_edges[c] == len(t.subtree(g[1]))


def test_multiplicity_bound_random():
    for t in random_trees(30, 300, seed=5):
        chi = monotone_coloring(t)
        assert validate(chi) is None
        M = path_walk_multiplicity(chi)
        assert multiplicity(chi) == M
        assert M <= 1 + math.log2(t.n)


@settings(max_examples=50, deadline=None)
@given(trees(max_n=40))
def test_coloring_properties(t):
    chi = monotone_coloring(t)
    assert validate(chi) is None
    assert multiplicity(chi) == path_walk_multiplicity(chi)
    assert multiplicity(chi) <= 1 + math.log2(t.n)


def test_validate_detects_branching_class():
    t = star_tree(2)
    chi = MonotoneColoring(t, [9, 0, 0])
    v = validate(chi)
    assert v is not None and v.color == 0


def test_validate_detects_gap():
    t = path_tree(4)
    chi = MonotoneColoring(t, [9, 0, 1, 0])
    assert validate(chi) is not None


def test_unknown_color():
    chi = monotone_coloring(path_tree(3))
    with pytest.raises(UnknownColor):
        chi._check_color(5)


def test_significant_colors_small_contribution():
    # root -- a (len 10, color 0) -- b (len 1, color 0); root -- c (len 1, color 1)
    t = build_tree(0, [(0, 1, 10.0), (1, 2, 1.0), (0, 3, 1.0)])
    chi = MonotoneColoring(t, [9, 0, 0, 1])
    # x=2, y=1 share color 0; nothing on one side only
    assert significant_colors(chi, 2, 1, 0.5) == set()
    # x=3 vs y=0: color 1 contributes 1.0 of class length 1.0
    assert significant_colors(chi, 3, 0, 0.5) == set()
    assert significant_colors(chi, 3, 0, 1.0) == {1}
    assert rho_chi(chi, 3, 0, 1.0) == 1.0


def test_caterpillar_star_multiplicity():
    for h in range(1, 5):
        chi = monotone_coloring(caterpillar_star(h))
        assert multiplicity(chi) <= 1 + math.log2(chi.tree.n)
