"""Exact all-pairs distortion, the edge-indicator baseline, and slack checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy.spatial.distance import cdist

from .coloring import MonotoneColoring, rho_chi
from .errors import UnknownVertex
from .tree import RootedTree

REL_TOL = 1e-9
BLOCK = 4096


@dataclass
class DistortionReport:
    expansion: float
    contraction: float
    distortion: float
    worst_expansion: tuple[int, int] | None
    worst_contraction: tuple[int, int] | None
    pairs: int
    zero_pairs: int

    def to_dict(self) -> dict:
        return asdict(self)


def isometric_baseline(t: RootedTree) -> np.ndarray:
    """One coordinate per edge: its length if the edge lies on the root path."""
    out = np.zeros((t.n, max(t.n - 1, 0)))
    col = {v: j for j, v in enumerate(x for x in range(t.n) if x != t.root)}
    for v in t.order[1:]:
        out[v] = out[t.parent[v]]
        out[v, col[int(v)]] = t.length[v]
    return out


def l1_matrix(coords) -> np.ndarray:
    """
    All-pairs L1 distances.  ``coords`` is an array or a list of arrays
    holding column blocks of the same points; block distances are summed.
    """
    blocks = coords if isinstance(coords, (list, tuple)) else [coords]
    n = blocks[0].shape[0]
    out = np.zeros((n, n))
    for b in blocks:
        b = np.asarray(b, dtype=float)
        for lo in range(0, b.shape[1], BLOCK):
            chunk = b[:, lo:lo + BLOCK]
            if chunk.shape[1]:
                out += cdist(chunk, chunk, "cityblock")
    return out


def distortion(coords, t: RootedTree, dist: np.ndarray | None = None) -> DistortionReport:
    """
    Expansion and contraction over all unordered pairs with positive tree
    distance.  Zero-distance pairs must land on the same point; if one does
    not, expansion is reported as infinite.
    """
    blocks = coords if isinstance(coords, (list, tuple)) else [coords]
    for b in blocks:
        if b.shape[0] != t.n:
            raise UnknownVertex(f"coordinates cover {b.shape[0]} of {t.n} vertices")
    emb = l1_matrix(blocks)
    dist = t.distance_matrix() if dist is None else dist
    iu, ju = np.triu_indices(t.n, 1)
    d = dist[iu, ju]
    e = emb[iu, ju]
    pos = d > 0
    zero = ~pos
    zero_pairs = int(zero.sum())
    if not pos.any():
        bad = zero & (e > 0)
        exp = math.inf if bad.any() else 1.0
        return DistortionReport(exp, 1.0, exp, None, None, 0, zero_pairs)

    dp, ep = d[pos], e[pos]
    ip, jp = iu[pos], ju[pos]
    ratio = ep / dp
    a = int(np.argmax(ratio))
    expansion = float(ratio[a])
    worst_exp = (int(ip[a]), int(jp[a]))
    bad = zero & (e > REL_TOL * float(dp.max()))
    if bad.any():
        expansion = math.inf
        b = int(np.nonzero(bad)[0][0])
        worst_exp = (int(iu[b]), int(ju[b]))

    with np.errstate(divide="ignore"):
        inv = np.where(ep > 0, dp / np.where(ep > 0, ep, 1.0), math.inf)
    b = int(np.argmax(inv))
    contraction = float(inv[b])
    return DistortionReport(expansion, contraction, expansion * contraction,
                            worst_exp, (int(ip[b]), int(jp[b])),
                            int(pos.sum()), zero_pairs)


@dataclass
class AllButReport:
    ok: bool
    worst_pair: tuple[int, int] | None
    upper_excess: float
    lower_deficit: float
    required_eps: float


def check_allbut(coords, t: RootedTree, chi: MonotoneColoring, eps: float,
                 delta: float) -> AllButReport:
    """
    Check ``(1 - eps) d - delta * rho(x, y; delta) <= ||F(x) - F(y)||_1 <= d``
    on all pairs.  ``required_eps`` is the smallest ``eps`` for which the
    lower bound holds everywhere.
    """
    emb = l1_matrix(coords)
    dist = t.distance_matrix()
    worst, up_ex, lo_def, req = None, 0.0, 0.0, 0.0
    for x in range(t.n):
        for y in range(x + 1, t.n):
            d, e = dist[x, y], emb[x, y]
            if d <= 0:
                continue
            over = e - d * (1 + REL_TOL)
            slack = delta * rho_chi(chi, x, y, delta)
            under = (1 - eps) * d - slack - e
            req = max(req, (d - slack - e) / d)
            if over > up_ex or (under > REL_TOL * d and under / d > lo_def):
                worst = (x, y)
            up_ex = max(up_ex, over)
            if under > REL_TOL * d:
                lo_def = max(lo_def, under / d)
    ok = up_ex <= 0 and lo_def == 0
    return AllButReport(ok, None if ok else worst, up_ex, lo_def, req)
