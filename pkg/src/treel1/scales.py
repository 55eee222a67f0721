"""
Scale selection: branching factors, potentials and per-scale step counts.

For every vertex ``v`` in color class ``c`` the table stores integers
``tau[i]`` saying how many steps of magnitude ``2**i`` are spent covering the
distance from the top of the class down to ``v``.  The counts at one scale
are shared between a vertex and the tops of all classes above it, and the
shared budget is the potential ``phi(c)``.
"""

from __future__ import annotations

import math

import numpy as np

from .coloring import MonotoneColoring, multiplicity
from .errors import DegenerateTree, UnknownColor, UnknownVertex
from .tree import RootedTree

CEIL_GUARD = 1e-12


def guarded_ceil(x: float) -> int:
    return math.ceil(x - CEIL_GUARD * max(1.0, abs(x)))


def floor_log2(x: float) -> int:
    """Exact ``floor(log2(x))`` for a positive float."""
    _, e = math.frexp(x)
    return e - 1


def lowest_scale(min_length: float, mult: int, num_edges: int) -> int:
    """``floor(log2(min_length / (mult + log2 num_edges)))``."""
    return floor_log2(min_length / (mult + math.log2(num_edges)))


class ScaleTable:
    """
    Per-vertex, per-scale step counts with the color potentials they depend on.

    Attributes
    ----------
    kappa   : int64[C+1]   Branching factor per color (0 at the sentinel).
    phi     : int64[C+1]   Potential per color, 0 at the sentinel.
    i_min   : int          No vertex uses a scale below this.
    taus    : list[dict[int, int]]   Nonzero counts per vertex.
    i_max   : list[int | None]       Largest scale with a nonzero count.
    """

    def __init__(self, tree, coloring, kappa, phi, i_min, taus, used):
        self.tree = tree
        self.coloring = coloring
        self.kappa_ = kappa
        self.phi_ = phi
        self.i_min = i_min
        self.taus = taus
        self._used = used
        self.i_max = [max(d) if d else None for d in taus]

    def kappa(self, c: int) -> int:
        if not 0 <= c < self.coloring.num_colors:
            raise UnknownColor(c)
        return int(self.kappa_[c])

    def phi(self, c: int) -> int:
        if not 0 <= c <= self.coloring.num_colors:
            raise UnknownColor(c)
        return int(self.phi_[c])

    def tau(self, v: int, i: int) -> int:
        if not 0 <= v < self.tree.n:
            raise UnknownVertex(v)
        return self.taus[v].get(i, 0)

    def budget_used(self, c: int, i: int) -> int:
        """Sum of ``tau_i`` over the tops of all classes on a root path into ``c``."""
        return self._used[c].get(i, 0)

    def weighted_sum(self, v: int, below: int | None = None) -> float:
        """``sum 2**i tau_i(v)`` over all scales, or only those below ``below``."""
        return sum(math.ldexp(float(n), i) for i, n in self.taus[v].items()
                   if below is None or i < below)

    def scale_range(self) -> tuple[int, int] | None:
        tops = [m for m in self.i_max if m is not None]
        if not tops:
            return None
        lows = [min(d) for d in self.taus if d]
        return min(lows), max(tops)

    def offset(self, v: int) -> float:
        """Distance from ``v`` to the top of its color class."""
        c = self.coloring.color_of[v]
        return float(self.tree.depth[v] - self.tree.depth[self.coloring.top[c]])

    def dump(self) -> str:
        return "".join(f"{v} {i} {n}\n" for v in range(self.tree.n)
                       for i, n in sorted(self.taus[v].items()))


def color_potentials(chi: MonotoneColoring) -> tuple[np.ndarray, np.ndarray]:
    """Branching factors and cumulative potentials for every color."""
    C = chi.num_colors
    kappa = np.zeros(C + 1, dtype=np.int64)
    phi = np.zeros(C + 1, dtype=np.int64)
    # parents come first in BFS order over class tops
    for c in _colors_top_down(chi):
        a = int(chi.subtree_edges[chi.parent_color[c]])
        b = int(chi.subtree_edges[c])
        kappa[c] = (a // b).bit_length()
        phi[c] = kappa[c] + phi[chi.parent_color[c]]
    return kappa, phi


def _colors_top_down(chi: MonotoneColoring) -> list[int]:
    out = []
    queue = list(chi.child_colors[chi.sentinel])
    head = 0
    while head < len(queue):
        c = queue[head]
        head += 1
        out.append(c)
        queue.extend(chi.child_colors[c])
    return out


def build_scale_table(t: RootedTree, chi: MonotoneColoring) -> ScaleTable:
    """
    Compute step counts for every vertex.

    Scales are scanned upward from the lowest admissible one.  At each scale
    the count is the smaller of the number of ``2**i`` steps still needed to
    cover the remaining distance and the unused budget at that scale.  Once
    the distance-driven count is the smaller one, every higher scale is zero,
    so the scan stops there.
    """
    m_t = t.min_positive_length()
    if m_t is None:
        raise DegenerateTree("all edge lengths are zero")
    kappa, phi = color_potentials(chi)
    i_min = lowest_scale(m_t, multiplicity(chi), t.num_edges)

    C = chi.num_colors
    taus: list[dict[int, int]] = [dict() for _ in range(t.n)]
    used: list[dict[int, int] | None] = [None] * (C + 1)
    used[C] = {}

    for v in t.order[1:]:
        c = int(chi.color_of[v])
        if used[c] is None:
            top = int(chi.top[c])
            acc = dict(used[chi.parent_color[c]])
            for i, n in taus[top].items():
                acc[i] = acc.get(i, 0) + n
            used[c] = acc
        budget = used[c]
        d = float(t.depth[v] - t.depth[chi.top[c]])
        if d <= 0.0:
            continue
        row = taus[v]
        covered = 0.0
        i = i_min
        while True:
            step = math.ldexp(1.0, i)
            need = guarded_ceil((d - min(d, covered)) / step)
            free = int(phi[c]) - budget.get(i, 0)
            assert free >= 1, "scale budget exhausted"
            n = min(need, free)
            if n:
                row[i] = n
                covered += step * n
            if need <= free:
                break
            i += 1
    return ScaleTable(t, chi, kappa, phi, i_min, taus, used)


def check_count_bound(table: ScaleTable, chi: MonotoneColoring):
    """
    For every color, count descendant colors at each potential offset ``k``
    and check the count is at most ``2**k``.  Returns ``None`` or the first
    ``(color, k, count)`` exceeding the bound.
    """
    for c in chi.colors():
        counts: dict[int, int] = {}
        stack = [c]
        while stack:
            x = stack.pop()
            k = int(table.phi_[x] - table.phi_[c])
            counts[k] = counts.get(k, 0) + 1
            stack.extend(chi.child_colors[x])
        for k, n in sorted(counts.items()):
            if n > 2 ** k:
                return (c, k, n)
    return None
