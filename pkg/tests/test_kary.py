import numpy as np
import pytest

from treel1.errors import MissingLabel, RoundBudgetExceeded, SizeOverflow
from treel1.kary import (KaryLabels, build_kary_tree, embed_kary, g_embed, kary_params,
                         pairwise_units, violated_pairs)
from treel1.verify import distortion


def dense_units(g):
    """m * L1 distance straight from the dense coordinates."""
    X = g.dense()
    return np.abs(X[:, None, :] - X[None, :, :]).sum(-1) * g.m


def test_params():
    assert kary_params(2, 1 / 28) == (28, 28)
    assert kary_params(8, 0.25) == (4, 12)


def test_size_overflow():
    with pytest.raises(SizeOverflow):
        build_kary_tree(10, 8, max_vertices=1000)


def test_codes_match_dense_and_are_lipschitz():
    tree = build_kary_tree(3, 3)
    rng = np.random.default_rng(0)
    labels = KaryLabels.sample(tree, 3, 3, 0.25, rng)
    g = g_embed(tree, labels)
    U = g.units()
    assert np.array_equal(U, np.rint(dense_units(g)).astype(np.int64))
    D = tree.distance_matrix()
    assert np.all(g.distances() <= D + 1e-12)
    # ancestor pairs are exact
    for v in range(tree.n):
        for a in tree.ancestors(v):
            assert g.distances()[a, v] == pytest.approx(D[a, v])


def test_missing_label():
    tree = build_kary_tree(2, 2)
    labels = KaryLabels.sample(tree, 2, 2, 0.25, np.random.default_rng(0))
    labels.labels[3, 0] = -1
    with pytest.raises(MissingLabel):
        g_embed(tree, labels)


def test_resampling_clears_violations():
    # coarse labels make sibling collisions likely, forcing resampling rounds
    total = 0
    for seed in range(5):
        g, rounds = embed_kary(4, 2, 0.25, seed=seed, C=2.0)
        total += rounds
        assert violated_pairs(g, 0.25, C=2.0) == []
        assert np.array_equal(g.units(), pairwise_units(g.codes))
    assert total > 0


def test_round_budget():
    with pytest.raises(RoundBudgetExceeded):
        embed_kary(4, 2, 0.25, seed=0, C=2.0, max_rounds=0)


def test_eps_range():
    with pytest.raises(ValueError):
        embed_kary(2, 3, 0.5)


def test_violated_pairs_trivial_factor():
    tree = build_kary_tree(2, 2)
    g = g_embed(tree, KaryLabels.sample(tree, 2, 2, 0.5, np.random.default_rng(0)))
    assert violated_pairs(g, 0.5, C=2.0) == []


def test_h6_distortion_at_most_two():
    g, _ = embed_kary(2, 6, 1 / 28, seed=0)
    rep = distortion(g.dense(), g.tree)
    assert rep.expansion <= 1 + 1e-12
    assert rep.distortion <= 2.0


def test_three_vertex_tree():
    g, _ = embed_kary(2, 1, 1 / 28, seed=0)
    assert g.tree.n == 3
    # the two leaves land on different columns somewhere in the first block
    assert g.units()[1, 2] > 0
    assert distortion(g.dense(), g.tree).distortion <= 2.0


def test_root_zero_and_depth_norm():
    g, _ = embed_kary(3, 3, 1 / 28, seed=2)
    X = g.dense()
    assert not X[0].any()
    deep = g.tree.n - 1
    assert np.abs(X[deep]).sum() == pytest.approx(3.0)


def test_vacuous_threshold():
    tree = build_kary_tree(2, 3)
    g = g_embed(tree, KaryLabels.sample(tree, 2, 3, 1 / 14, np.random.default_rng(0)))
    assert violated_pairs(g, 1 / 14) == []


def test_sizes_and_k4():
    assert build_kary_tree(2, 1).n == 3
    assert build_kary_tree(3, 4).n == 121
    g, _ = embed_kary(4, 4, 1 / 28, seed=0)
    assert (g.t, g.m) == (28, 56) and g.dim == 56 * 4 * 28
    assert distortion(g.dense(), g.tree).distortion <= 2.0
