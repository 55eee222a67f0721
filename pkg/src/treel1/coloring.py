"""
Monotone (caterpillar) edge colorings.

A coloring assigns each non-root vertex ``v`` the color of the edge
``(v, parent(v))``.  Colors are dense integers ``0..C-1``; the virtual edge
above the root carries the sentinel color ``C``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import UnknownColor
from .tree import RootedTree

_REL = 1e-12


@dataclass(frozen=True)
class ColoringViolation:
    color: int
    u: int
    v: int
    reason: str


class MonotoneColoring:
    """
    Edge coloring together with its per-color structure.

    Attributes
    ----------
    tree          : RootedTree
    color_of      : int64[n]      Color of edge (v, parent(v)); sentinel at the root.
    num_colors    : int           Number of real colors C.
    sentinel      : int           The sentinel color (== C).
    gamma         : list[list[int]]  Vertices of each colored path, top vertex first.
    top           : int64[C+1]    Top vertex of each class (root for the sentinel).
    parent_color  : int64[C+1]    Color of the edge above the top vertex.
    class_length  : float64[C+1]  Total length of each class.
    subtree_edges : int64[C+1]    Edge count of the subtree hanging below each class.
    child_colors  : list[list[int]]  Colors whose parent color is the index.
    """

    def __init__(self, tree: RootedTree, color_of: Sequence[int]):
        colors = np.asarray(color_of, dtype=np.int64).copy()
        real = np.delete(colors, tree.root) if tree.n > 1 else np.empty(0, np.int64)
        uniq = np.unique(real)
        remap = {int(c): i for i, c in enumerate(uniq)}
        C = len(uniq)
        colors = np.array([remap[int(c)] if v != tree.root else C
                           for v, c in enumerate(colors)], dtype=np.int64)
        self.tree = tree
        self.color_of = colors
        self.num_colors = C
        self.sentinel = C

        members: list[list[int]] = [[] for _ in range(C)]
        for v in tree.order[1:]:
            members[colors[v]].append(int(v))
        top = np.empty(C + 1, dtype=np.int64)
        top[C] = tree.root
        gamma: list[list[int]] = []
        for c in range(C):
            first = members[c][0]  # shallowest in BFS order
            top[c] = tree.parent[first]
            gamma.append([int(top[c])] + members[c])
        gamma.append([tree.root])
        self.gamma = gamma
        self.top = top

        parent_color = np.empty(C + 1, dtype=np.int64)
        parent_color[:C] = colors[top[:C]]
        parent_color[C] = C
        self.parent_color = parent_color

        class_length = np.zeros(C + 1)
        np.add.at(class_length, colors[_real_idx(tree)], tree.length[_real_idx(tree)])
        self.class_length = class_length

        sizes = tree.subtree_sizes()
        sub = np.empty(C + 1, dtype=np.int64)
        for c in range(C):
            sub[c] = sizes[members[c][0]]
        sub[C] = tree.n - 1
        self.subtree_edges = sub

        self.child_colors: list[list[int]] = [[] for _ in range(C + 1)]
        for c in range(C):
            self.child_colors[parent_color[c]].append(c)

    # ------------------------------------------------------------------ #

    def colors(self) -> range:
        return range(self.num_colors)

    def _check_color(self, c: int) -> int:
        if not 0 <= c <= self.num_colors:
            raise UnknownColor(c)
        return int(c)

    def path_colors(self, v: int) -> dict[int, float]:
        """Colors on the root-to-``v`` path mapped to their length on that path."""
        t = self.tree
        out: dict[int, float] = {}
        for x in t.ancestors(v)[:-1]:
            c = int(self.color_of[x])
            out[c] = out.get(c, 0.0) + float(t.length[x])
        return out

    def multiplicity(self) -> int:
        return multiplicity(self)

    def dump(self) -> str:
        t = self.tree
        return "".join(f"{v} {self.color_of[v]}\n" for v in range(t.n) if v != t.root)


def _real_idx(tree: RootedTree) -> np.ndarray:
    idx = np.arange(tree.n)
    return idx[idx != tree.root]


def monotone_coloring(t: RootedTree) -> MonotoneColoring:
    """
    Color the tree by repeatedly following the child with the most leaves.

    Each color class starts at an edge that is not the heavy continuation of
    its parent's class and extends down through heaviest children (ties go to
    the smaller vertex id).  Leaving a class through a light child at least
    halves the number of leaves below, which bounds the number of colors on any
    root path by ``1 + log2(#leaves)``.
    """
    leaves = np.zeros(t.n, dtype=np.int64)
    for v in t.order[::-1]:
        if not t.children[v]:
            leaves[v] = 1
        if v != t.root:
            leaves[t.parent[v]] += leaves[v]

    heavy = np.full(t.n, -1, dtype=np.int64)
    for v in range(t.n):
        ch = t.children[v]
        if ch:
            heavy[v] = min(ch, key=lambda c: (-leaves[c], c))

    color = np.full(t.n, -1, dtype=np.int64)
    nxt = 0
    for v in t.order[1:]:
        p = t.parent[v]
        if p != t.root and heavy[p] == v:
            color[v] = color[p]
        else:
            color[v] = nxt
            nxt += 1
    color[t.root] = nxt
    return MonotoneColoring(t, color)


def multiplicity(chi: MonotoneColoring) -> int:
    """Maximum number of distinct colors on a root-to-vertex path."""
    t = chi.tree
    if t.n == 1:
        return 0
    counts: dict[int, int] = {}
    best = 0
    # iterative DFS keeping a multiset of colors on the current root path
    stack: list[tuple[int, bool]] = [(t.root, False)]
    while stack:
        v, leaving = stack.pop()
        if v == t.root:
            if not leaving:
                stack.append((v, True))
                stack.extend((c, False) for c in reversed(t.children[v]))
            continue
        c = int(chi.color_of[v])
        if leaving:
            counts[c] -= 1
            if counts[c] == 0:
                del counts[c]
            continue
        counts[c] = counts.get(c, 0) + 1
        best = max(best, len(counts))
        stack.append((v, True))
        stack.extend((w, False) for w in reversed(t.children[v]))
    return best


def validate(chi: MonotoneColoring, t: RootedTree | None = None) -> ColoringViolation | None:
    """
    Check that every color class is a contiguous, depth-monotone path.

    Returns ``None`` when the coloring is monotone, otherwise the first
    offending ``(color, vertex, vertex)`` triple found.
    """
    t = chi.tree if t is None else t
    members: dict[int, list[int]] = {}
    for v in t.order[1:]:
        members.setdefault(int(chi.color_of[v]), []).append(int(v))
    for c, vs in sorted(members.items()):
        vs.sort(key=lambda v: (t.hops[v], v))
        for a, b in zip(vs, vs[1:]):
            if t.hops[b] == t.hops[a]:
                return ColoringViolation(c, a, b, "two edges at the same depth")
            if t.parent[b] != a:
                return ColoringViolation(c, a, b, "class is not a contiguous path")
    return None


def significant_colors(chi: MonotoneColoring, x: int, y: int, delta: float) -> set[int]:
    """
    Colors seen on exactly one of the root paths to ``x`` and ``y`` whose
    share of the ``x``-``y`` path is at most ``delta`` times their class length.
    """
    px = chi.path_colors(x)
    py = chi.path_colors(y)
    out = set()
    for side, other in ((px, py), (py, px)):
        for c, contrib in side.items():
            if c in other:
                continue
            # contribution is entirely below the LCA, hence on the x-y path
            if contrib <= delta * chi.class_length[c] * (1.0 + _REL):
                out.add(c)
    return out


def rho_chi(chi: MonotoneColoring, x: int, y: int, delta: float) -> float:
    return float(sum(chi.class_length[c] for c in significant_colors(chi, x, y, delta)))
