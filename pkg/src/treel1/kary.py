"""
Embedding complete k-ary trees by stacking random edge labels.

Every edge gets an ``m x t`` label whose rows are scaled standard basis
vectors ``e_b / m``.  A vertex is mapped to the labels of its root path,
stacked one ``m``-row block per depth level.  Pairs that contract too much
are repaired by resampling the labels on their path until none remain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MissingLabel, RoundBudgetExceeded, SizeOverflow
from .tree import RootedTree, kary_tree

MAX_VERTICES = 2_000_000


def kary_params(k: int, eps: float) -> tuple[int, int]:
    """Column count ``t`` and rows per level ``m``."""
    t = math.ceil(1.0 / eps - 1e-12)
    m = t * max(1, math.ceil(math.log2(k) - 1e-12))
    return t, m


def build_kary_tree(k: int, h: int, max_vertices: int = MAX_VERTICES) -> RootedTree:
    if k < 2 or h < 1:
        raise ValueError("need k >= 2 and h >= 1")
    n = (k ** (h + 1) - 1) // (k - 1)
    if n > max_vertices:
        raise SizeOverflow(f"{n} vertices exceeds cap {max_vertices}")
    return kary_tree(k, h)


@dataclass
class KaryLabels:
    """
    Per-edge labels.  ``labels[v, r]`` is the column of the single entry in
    row ``r`` of the label on edge ``(v, parent(v))``; the root row is ``-1``.
    """

    k: int
    h: int
    eps: float
    t: int
    m: int
    labels: np.ndarray
    seed: int | None = None
    resamples: int = 0

    @classmethod
    def sample(cls, tree: RootedTree, k: int, h: int, eps: float,
               rng: np.random.Generator, seed=None) -> "KaryLabels":
        t, m = kary_params(k, eps)
        labels = rng.integers(t, size=(tree.n, m))
        labels[tree.root] = -1
        return cls(k, h, eps, t, m, labels, seed)


@dataclass
class KaryEmbedding:
    """
    Coordinates as column codes: ``codes[v, row]`` is the column holding
    ``1/m`` in that row of ``g(v)``, or ``-1`` for an all-zero row.
    """

    tree: RootedTree
    labels: KaryLabels
    codes: np.ndarray
    _units: np.ndarray | None = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return self.labels.m

    @property
    def t(self) -> int:
        return self.labels.t

    @property
    def dim(self) -> int:
        return self.codes.shape[1] * self.labels.t

    def dense(self) -> np.ndarray:
        """Coordinates as an ``n x (rows * t)`` array."""
        n, rows = self.codes.shape
        out = np.zeros((n, rows, self.t))
        v, r = np.nonzero(self.codes >= 0)
        out[v, r, self.codes[v, r]] = 1.0 / self.m
        return out.reshape(n, rows * self.t)

    def units(self) -> np.ndarray:
        """All-pairs ``m * ||g(u) - g(v)||_1`` as exact integers."""
        if self._units is None:
            self._units = pairwise_units(self.codes)
        return self._units

    def distances(self) -> np.ndarray:
        return self.units() / self.m


def _units_against(codes: np.ndarray, u: int) -> np.ndarray:
    a = codes[u][None, :]
    b = codes
    za, zb = a < 0, b < 0
    one = za ^ zb
    two = ~za & ~zb & (a != b)
    return one.sum(axis=1) + 2 * two.sum(axis=1)


def pairwise_units(codes: np.ndarray) -> np.ndarray:
    n = codes.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    for u in range(n):
        out[u] = _units_against(codes, u)
    return out


def g_embed(tree: RootedTree, labels: KaryLabels) -> KaryEmbedding:
    """Stack the labels of each root path, one ``m``-row block per level."""
    lab = labels.labels
    if lab.shape[0] != tree.n:
        raise MissingLabel("label table does not match the tree")
    m = labels.m
    codes = np.full((tree.n, labels.h * m), -1, dtype=np.int64)
    for v in tree.order[1:]:
        if (lab[v] < 0).any():
            raise MissingLabel(int(v))
        level = int(tree.hops[v])
        codes[v] = codes[tree.parent[v]]
        codes[v, (level - 1) * m: level * m] = lab[v]
    return KaryEmbedding(tree, labels, codes)


def _violation_mask(units: np.ndarray, dist: np.ndarray, m: int, factor: float) -> np.ndarray:
    thresh = factor * dist * m
    mask = units <= thresh + 1e-9 * np.maximum(1.0, thresh)
    return np.triu(mask & (dist > 0), 1)


def violated_pairs(g: KaryEmbedding, eps: float, C: float = 14.0,
                   dist: np.ndarray | None = None) -> list[tuple[int, int]]:
    """
    All pairs with ``||g(u) - g(v)||_1 <= (1 - C eps) d(u, v)``, ordered by
    ``(distance, u, v)``.
    """
    factor = 1.0 - C * eps
    if factor <= 0:
        return []
    dist = g.tree.distance_matrix() if dist is None else dist
    u, v = np.nonzero(_violation_mask(g.units(), dist, g.m, factor))
    order = np.lexsort((v, u, dist[u, v]))
    return [(int(u[i]), int(v[i])) for i in order]


def _path_vertices(tree: RootedTree, u: int, v: int) -> list[int]:
    """Child endpoints of the edges on the u-v path."""
    w = tree.lca(u, v)
    out = []
    for x in (u, v):
        while x != w:
            out.append(x)
            x = int(tree.parent[x])
    return out


def embed_kary(k: int, h: int, eps: float, seed: int = 0,
               max_rounds: int | None = None, C: float = 14.0) -> tuple[KaryEmbedding, int]:
    """
    Sample labels, then repeatedly resample the labels on the path of the
    closest violated pair until no pair contracts below ``1 - C eps``.

    Raises ``RoundBudgetExceeded`` if violations remain after ``max_rounds``
    resampling rounds (default ``200 n``).
    """
    if not 0 < eps <= 1.0 / C:
        raise ValueError(f"eps must lie in (0, 1/{C:g}]")
    tree = build_kary_tree(k, h)
    rng = np.random.default_rng(seed)
    labels = KaryLabels.sample(tree, k, h, eps, rng, seed)
    g = g_embed(tree, labels)
    if max_rounds is None:
        max_rounds = 200 * tree.n
    dist = tree.distance_matrix()
    factor = 1.0 - C * eps
    units = g.units()
    m = labels.m

    rounds = 0
    while True:
        bad = _violation_mask(units, dist, m, factor)
        if not bad.any():
            break
        if rounds >= max_rounds:
            u, v = np.nonzero(bad)
            raise RoundBudgetExceeded(max_rounds, list(zip(u.tolist(), v.tolist())))
        u, v = np.nonzero(bad)
        first = np.lexsort((v, u, dist[u, v]))[0]
        x, y = int(u[first]), int(v[first])
        edges = _path_vertices(tree, x, y)
        for e in edges:
            labels.labels[e] = rng.integers(labels.t, size=m)
        touched = np.zeros(tree.n, dtype=bool)
        for e in edges:
            touched[tree.subtree(e)] = True
        codes = g.codes
        for w in tree.order[1:]:
            if touched[w]:
                level = int(tree.hops[w])
                codes[w] = codes[tree.parent[w]]
                codes[w, (level - 1) * m: level * m] = labels.labels[w]
        for w in np.nonzero(touched)[0]:
            row = _units_against(codes, int(w))
            units[w] = row
            units[:, w] = row
        rounds += 1
    labels.resamples = rounds
    return g, rounds
