"""
Folding the half-line into k stars, and trees into k folded trees.

Star ``i`` (``1 <= i <= k``) has one branch per integer ``j`` of length
``2**(i - 1 + k(j + 1))``.  The map into star ``i`` walks out along branch
``j`` while ``x`` grows through the first half of the dyadic band
``[2**(i+kj), 2**(i+k(j+1)))`` and back to the root through the second half.

A tree is folded by sending each color class through the same maps, measured
from the top of the class, and hanging the images off the image of the top.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coloring import MonotoneColoring, rho_chi
from .errors import NoWitness, StarMismatch
from .scales import color_potentials
from .tree import RootedTree, build_tree


@dataclass(frozen=True)
class RStarPoint:
    star: int
    branch: int
    offset: float

    @property
    def is_root(self) -> bool:
        return self.offset == 0.0


def branch_length(i: int, j: int, k: int) -> float:
    return math.ldexp(1.0, i - 1 + k * (j + 1))


def fold_halfline(x: float, i: int, k: int) -> RStarPoint:
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0:
        return RStarPoint(i, 0, 0.0)
    e = math.frexp(x)[1] - 1  # floor(log2 x), exact
    j = (e - i) // k
    if e - i < k * (j + 1) - 1:
        d = (x - math.ldexp(1.0, i + k * j)) / (1.0 - math.ldexp(1.0, 1 - k))
    else:
        d = math.ldexp(1.0, i + k * (j + 1)) - x
    if d <= 0.0:
        return RStarPoint(i, 0, 0.0)
    return RStarPoint(i, j, min(d, branch_length(i, j, k)))


def branch_of(p: RStarPoint, k: int) -> float:
    """Length of the branch holding ``p``; zero at the root."""
    return 0.0 if p.is_root else branch_length(p.star, p.branch, k)


def rstar_distance(p: RStarPoint, q: RStarPoint) -> float:
    if p.star != q.star:
        raise StarMismatch(f"stars {p.star} and {q.star}")
    if p.is_root or q.is_root or p.branch != q.branch:
        return p.offset + q.offset
    return abs(p.offset - q.offset)


# ---------------------------------------------------------------------- #
# tree folding
# ---------------------------------------------------------------------- #


@dataclass
class FoldedFamily:
    k: int
    eps: float
    trees: list[RootedTree]
    colorings: list[MonotoneColoring]
    vertex_maps: list[np.ndarray]

    def distance_matrices(self) -> list[np.ndarray]:
        out = []
        for tr, f in zip(self.trees, self.vertex_maps):
            d = tr.distance_matrix()
            out.append(d[np.ix_(f, f)])
        return out


def fold_count(eps: float) -> int:
    return math.ceil(7.0 / eps - 1e-12)


def fold_tree(t: RootedTree, chi: MonotoneColoring, eps: float,
              k: int | None = None) -> FoldedFamily:
    """
    Build ``k`` folded trees (default ``ceil(7/eps)``).

    Classes are handled parents first.  In folded tree ``i`` the vertices of a
    class are placed at ``fold_halfline(offset, i, k)`` where ``offset`` is
    their distance to the class top; each star branch that gets hit becomes a
    new path under the image of the top, with its own color.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    k = fold_count(eps) if k is None else int(k)
    if k < 2:
        raise ValueError("need k >= 2")
    _, phi = color_potentials(chi)
    order = sorted(chi.colors(), key=lambda c: (int(phi[c]), c))

    trees, colorings, maps = [], [], []
    for i in range(1, k + 1):
        f = np.full(t.n, -1, dtype=np.int64)
        f[t.root] = 0
        edges: list[tuple[int, int, float]] = []
        colors = [0]  # root slot, replaced by sentinel later
        nxt = 1
        ncol = 0
        for c in order:
            top = int(chi.top[c])
            anchor = int(f[top])
            base = t.depth[top]
            branches: dict[int, dict[float, list[int]]] = {}
            for v in chi.gamma[c][1:]:
                p = fold_halfline(float(t.depth[v] - base), i, k)
                if p.is_root:
                    f[v] = anchor
                    continue
                branches.setdefault(p.branch, {}).setdefault(p.offset, []).append(v)
            for j in sorted(branches):
                prev, prev_off = anchor, 0.0
                for off in sorted(branches[j]):
                    node = nxt
                    nxt += 1
                    edges.append((prev, node, off - prev_off))
                    colors.append(ncol)
                    for v in branches[j][off]:
                        f[v] = node
                    prev, prev_off = node, off
                ncol += 1
        colors[0] = ncol
        tr = build_tree(0, edges)
        trees.append(tr)
        colorings.append(MonotoneColoring(tr, colors))
        maps.append(f)
    return FoldedFamily(k, eps, trees, colorings, maps)


def check_rho_condition(family: FoldedFamily, t: RootedTree, x: int, y: int,
                        eps: float | None = None) -> int:
    """
    Find an index ``j`` whose removal keeps the remaining folded trees'
    significant-color mass within ``eps * d(x, y)``.  Raises ``NoWitness``
    when no index works.
    """
    eps = family.eps if eps is None else eps
    k = family.k
    delta = 2.0 ** -(k + 1)
    rhos = np.array([rho_chi(chi, int(f[x]), int(f[y]), delta)
                     for chi, f in zip(family.colorings, family.vertex_maps)])
    lhs = eps * t.distance(x, y)
    total = rhos.sum()
    for j in np.argsort(-rhos, kind="stable"):
        rhs = delta / k * (total - rhos[j])
        if rhs <= lhs * (1 + 1e-9) + 1e-300:
            return int(j)
    raise NoWitness(f"no index satisfies the rho bound for ({x}, {y})")
