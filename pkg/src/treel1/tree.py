"""
Edge-weighted rooted trees with exact path queries.

Vertices are dense integers ``0..n-1``.  The edge above a non-root vertex
``v`` is identified with ``v`` itself, so per-edge data (length, color) lives
in arrays indexed by the child endpoint.

All per-vertex arrays are computed once at construction and the object is
treated as immutable afterwards.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CycleDetected,
    DisconnectedVertex,
    DuplicateChild,
    NegativeLength,
    ParseError,
    UnknownVertex,
)


class RootedTree:
    """
    Rooted tree with nonnegative edge lengths.

    Attributes
    ----------
    n          : int               Number of vertices.
    root       : int               Root vertex id.
    parent     : int64[n]          Parent id, ``parent[root] == root``.
    length     : float64[n]        Length of edge (v, parent(v)); 0 at the root.
    children   : list[list[int]]   Children in insertion order.
    depth      : float64[n]        Weighted distance to the root.
    hops       : int64[n]          Number of edges to the root.
    order      : int64[n]          BFS order from the root (children in insertion order).
    """

    def __init__(self, root: int, parent: Sequence[int], length: Sequence[float],
                 children: list[list[int]]):
        self.n = len(parent)
        self.root = int(root)
        self.parent = np.asarray(parent, dtype=np.int64)
        self.length = np.asarray(length, dtype=np.float64)
        self.children = [list(c) for c in children]

        order = [self.root]
        head = 0
        while head < len(order):
            order.extend(self.children[order[head]])
            head += 1
        self.order = np.asarray(order, dtype=np.int64)

        self.depth = np.zeros(self.n)
        self.hops = np.zeros(self.n, dtype=np.int64)
        for v in order[1:]:
            p = self.parent[v]
            self.depth[v] = self.depth[p] + self.length[v]
            self.hops[v] = self.hops[p] + 1

        # binary lifting table; up[0] is the parent array
        levels = max(1, int(self.hops.max()).bit_length()) if self.n > 1 else 1
        up = np.empty((levels, self.n), dtype=np.int64)
        up[0] = self.parent
        for j in range(1, levels):
            up[j] = up[j - 1][up[j - 1]]
        self._up = up

    # ------------------------------------------------------------------ #
    # basic accessors
    # ------------------------------------------------------------------ #

    @property
    def num_edges(self) -> int:
        return self.n - 1

    def edges(self) -> list[tuple[int, int, float]]:
        """Edges as ``(parent, child, length)`` in BFS order."""
        return [(int(self.parent[v]), int(v), float(self.length[v])) for v in self.order[1:]]

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    def leaves(self) -> list[int]:
        return [v for v in range(self.n) if not self.children[v]]

    def total_length(self) -> float:
        return float(self.length.sum())

    def _check(self, v) -> int:
        if not isinstance(v, (int, np.integer)) or not 0 <= v < self.n:
            raise UnknownVertex(v)
        return int(v)

    def __repr__(self):
        return f"RootedTree(n={self.n}, root={self.root})"

    # ------------------------------------------------------------------ #
    # queries
    # ------------------------------------------------------------------ #

    def lca(self, u: int, v: int) -> int:
        u, v = self._check(u), self._check(v)
        if self.hops[u] < self.hops[v]:
            u, v = v, u
        diff = int(self.hops[u] - self.hops[v])
        j = 0
        while diff:
            if diff & 1:
                u = int(self._up[j, u])
            diff >>= 1
            j += 1
        if u == v:
            return u
        for j in range(self._up.shape[0] - 1, -1, -1):
            if self._up[j, u] != self._up[j, v]:
                u, v = int(self._up[j, u]), int(self._up[j, v])
        return int(self.parent[u])

    def distance(self, u: int, v: int) -> float:
        w = self.lca(u, v)
        return float(self.depth[u] + self.depth[v] - 2.0 * self.depth[w])

    def root_path_edges(self, v: int) -> list[int]:
        """Edges on the root-to-``v`` path, root side first (as child ids)."""
        v = self._check(v)
        out = []
        while v != self.root:
            out.append(v)
            v = int(self.parent[v])
        out.reverse()
        return out

    def ancestors(self, v: int) -> list[int]:
        """``v`` and all its ancestors, ``v`` first."""
        v = self._check(v)
        out = [v]
        while v != self.root:
            v = int(self.parent[v])
            out.append(v)
        return out

    def is_ancestor(self, u: int, v: int) -> bool:
        """True if ``u`` lies on the root-to-``v`` path."""
        return self.lca(u, v) == u

    def subtree(self, v: int) -> list[int]:
        """Vertices of the subtree rooted at ``v`` in BFS order."""
        v = self._check(v)
        out = [v]
        head = 0
        while head < len(out):
            out.extend(self.children[out[head]])
            head += 1
        return out

    def subtree_sizes(self) -> np.ndarray:
        size = np.ones(self.n, dtype=np.int64)
        for v in self.order[:0:-1]:
            size[self.parent[v]] += size[v]
        return size

    def min_positive_length(self) -> float | None:
        pos = self.length[self.length > 0]
        if pos.size == 0:
            return None
        return float(pos.min())

    def lca_many(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        """Vectorized LCA over paired index arrays."""
        u = np.asarray(us, dtype=np.int64).copy()
        v = np.asarray(vs, dtype=np.int64).copy()
        swap = self.hops[u] < self.hops[v]
        u[swap], v[swap] = v[swap], u[swap].copy()
        diff = self.hops[u] - self.hops[v]
        for j in range(self._up.shape[0]):
            bit = (diff >> j) & 1 == 1
            u[bit] = self._up[j, u[bit]]
        for j in range(self._up.shape[0] - 1, -1, -1):
            move = self._up[j, u] != self._up[j, v]
            u[move] = self._up[j, u[move]]
            v[move] = self._up[j, v[move]]
        done = u == v
        return np.where(done, u, self.parent[u])

    def distance_matrix(self) -> np.ndarray:
        """All-pairs tree distances as an ``n x n`` array."""
        iu, iv = np.meshgrid(np.arange(self.n), np.arange(self.n), indexing="ij")
        w = self.lca_many(iu.ravel(), iv.ravel()).reshape(self.n, self.n)
        d = self.depth[:, None] + self.depth[None, :] - 2.0 * self.depth[w]
        np.maximum(d, 0.0, out=d)
        return d


# ---------------------------------------------------------------------- #
# construction
# ---------------------------------------------------------------------- #


def build_tree(root: int, edges: Iterable[tuple[int, int, float]]) -> RootedTree:
    """
    Build a tree from ``(parent, child, length)`` triples.

    The vertex count is ``len(edges) + 1`` and ids must be ``0..n-1``.
    Children keep the order in which their edges were listed.
    """
    edges = [(int(p), int(c), float(w)) for p, c, w in edges]
    n = len(edges) + 1
    parent = [-1] * n
    length = [0.0] * n
    children: list[list[int]] = [[] for _ in range(n)]
    if not 0 <= root < n:
        raise DisconnectedVertex(f"root {root} outside 0..{n - 1}")
    for p, c, w in edges:
        if not (w >= 0.0) or not np.isfinite(w):
            raise NegativeLength(f"edge ({p}, {c}) has length {w}")
        for x in (p, c):
            if not 0 <= x < n:
                raise DisconnectedVertex(f"vertex {x} outside 0..{n - 1}")
        if c == root or p == c:
            raise CycleDetected(f"edge ({p}, {c}) points into the root or itself")
        if parent[c] != -1:
            raise DuplicateChild(f"vertex {c} listed as a child twice")
        parent[c] = p
        length[c] = w
        children[p].append(c)
    parent[root] = root
    missing = [v for v in range(n) if parent[v] == -1]
    if missing:
        raise DisconnectedVertex(f"vertex {missing[0]} has no parent edge")

    # every vertex must reach the root
    state = [0] * n  # 0 unknown, 1 on stack, 2 reaches root
    state[root] = 2
    for v in range(n):
        path = []
        x = v
        while state[x] == 0:
            state[x] = 1
            path.append(x)
            x = parent[x]
        if state[x] == 1:
            raise CycleDetected(f"cycle through vertex {x}")
        for y in path:
            state[y] = 2
    return RootedTree(root, parent, length, children)


def contract_zero_edges(t: RootedTree) -> tuple[RootedTree, np.ndarray]:
    """
    Merge every zero-length edge into its parent.

    Returns the contracted tree and an array mapping old vertex ids to new
    ones.  Kept vertices are renumbered in increasing order of their old id.
    """
    keep = (t.length > 0.0)
    keep[t.root] = True
    new_id = np.full(t.n, -1, dtype=np.int64)
    new_id[keep] = np.arange(int(keep.sum()))
    rep = np.empty(t.n, dtype=np.int64)
    for v in t.order:
        rep[v] = new_id[v] if keep[v] else rep[t.parent[v]]
    edges = [(int(rep[t.parent[v]]), int(new_id[v]), float(t.length[v]))
             for v in t.order[1:] if keep[v]]
    return build_tree(int(new_id[t.root]), edges), rep


# ---------------------------------------------------------------------- #
# generators
# ---------------------------------------------------------------------- #


def path_tree(n: int, length: float = 1.0) -> RootedTree:
    return build_tree(0, [(v - 1, v, length) for v in range(1, n)])


def star_tree(leaves: int, length: float = 1.0) -> RootedTree:
    return build_tree(0, [(0, v, length) for v in range(1, leaves + 1)])


def kary_tree(k: int, h: int, length: float = 1.0) -> RootedTree:
    """Complete ``k``-ary tree of height ``h`` numbered in BFS order."""
    edges = []
    n = (k ** (h + 1) - 1) // (k - 1) if k > 1 else h + 1
    for v in range(1, n):
        edges.append(((v - 1) // k, v, length))
    return build_tree(0, edges)


def random_tree(n: int, rng: np.random.Generator, max_degree: int | None = None,
                low: float = 1.0, high: float = 100.0) -> RootedTree:
    """
    Uniform-attachment random tree.

    Vertex ``v`` attaches to a uniformly chosen earlier vertex that still has
    fewer than ``max_degree`` children.  Lengths are log-uniform in
    ``[low, high]``.
    """
    nchild = [0] * n
    open_ = [0]
    edges = []
    for v in range(1, n):
        idx = int(rng.integers(len(open_)))
        p = open_[idx]
        nchild[p] += 1
        if max_degree is not None and nchild[p] >= max_degree:
            open_[idx] = open_[-1]
            open_.pop()
        w = float(np.exp(rng.uniform(np.log(low), np.log(high)))) if high > low else float(low)
        edges.append((p, v, w))
        open_.append(v)
    return build_tree(0, edges)


def caterpillar_star(h: int, length: float = 1.0) -> RootedTree:
    """Complete binary tree of height ``h`` with ``2**h`` pendant leaves on every node."""
    base = kary_tree(2, h, length)
    edges = base.edges()
    nxt = base.n
    for v in range(base.n):
        for _ in range(2 ** h):
            edges.append((v, nxt, length))
            nxt += 1
    return build_tree(0, edges)


# ---------------------------------------------------------------------- #
# text format
# ---------------------------------------------------------------------- #


def parse_tree(text: str) -> RootedTree:
    """Parse ``root <id>`` followed by ``<parent> <child> <length>`` lines."""
    root = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if root is None:
                if len(parts) != 2 or parts[0] != "root":
                    raise ParseError(f"line {lineno}: expected 'root <id>'")
                root = int(parts[1])
                continue
            if len(parts) != 3:
                raise ParseError(f"line {lineno}: expected '<parent> <child> <length>'")
            edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"line {lineno}: {exc}") from None
    if root is None:
        raise ParseError("missing 'root <id>' line")
    try:
        return build_tree(root, edges)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def format_tree(t: RootedTree) -> str:
    lines = [f"root {t.root}"]
    lines += [f"{p} {c} {w!r}" for p, c, w in t.edges()]
    return "\n".join(lines) + "\n"
