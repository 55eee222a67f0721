"""
Multi-scale tree embedding into l1.

For each scale ``i`` every vertex gets a sparse ``m x t`` matrix.  Within a
color class the matrix fills rows with steps of ``2**i / t**2`` until the
distance to the class top is covered.  A child class is shifted by the matrix
of its top vertex and each of its rows is permuted by a fresh random column
permutation.  The per-scale maps are collapsed by the combiner, and the whole
construction is repeated on ``k`` folded copies of the tree whose outputs are
concatenated and averaged.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .coloring import MonotoneColoring, monotone_coloring, multiplicity
from .combiner import ScaleFamily, combine, interleave_count
from .errors import RetryBudgetExhausted, RowOverflow
from .folding import FoldedFamily, fold_count, fold_tree
from .scales import ScaleTable, build_scale_table
from .tree import RootedTree, contract_zero_edges
from .verify import DistortionReport, distortion, l1_matrix

FLOOR_GUARD = 1e-12
SCALE_OFFSET = 2 ** 20  # keeps negative scales nonnegative in seed words


@dataclass(frozen=True)
class EmbedParams:
    eps: float
    delta: float
    t: int
    m: int

    @property
    def K(self) -> int:
        return interleave_count(self.eps)

    @property
    def dim(self) -> int:
        return self.m * self.t * self.K

    @staticmethod
    def columns(eps: float, delta: float) -> int:
        inner = math.ceil(math.log2(1.0 / delta) - FLOOR_GUARD)
        return math.ceil(1.0 / eps + math.log2(max(inner, 1)) - FLOOR_GUARD)

    @classmethod
    def for_tree(cls, eps: float, delta: float, mult: int, num_edges: int) -> "EmbedParams":
        if not (0 < eps <= 0.5 and 0 < delta <= 0.5):
            raise ValueError("eps and delta must lie in (0, 1/2]")
        t = cls.columns(eps, delta)
        if num_edges == 0:
            return cls(eps, delta, t, 0)
        m = math.ceil(t * t * (mult + math.log2(num_edges)) - FLOOR_GUARD)
        return cls(eps, delta, t, m)


def _guarded_floor(x: float) -> int:
    return math.floor(x + FLOOR_GUARD * max(1.0, abs(x)))


def delta(v: int, i: int, table: ScaleTable, params: EmbedParams):
    """
    Nonzero entries of the step matrix of ``v`` at scale ``i`` as
    ``(rows, cols, vals)``, rows 0-indexed.  All entries sit in column 0.
    """
    tau = table.tau(v, i)
    empty = (np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0))
    if tau == 0:
        return empty
    chi = table.coloring
    c = int(chi.color_of[v])
    t2 = params.t * params.t
    step = math.ldexp(1.0, i) / t2
    d = table.offset(v)
    below = table.weighted_sum(v, below=i)
    alpha = t2 * table.budget_used(c, i)
    full = min(t2 * tau, _guarded_floor((d - below) / step))
    beta = alpha + full
    rows = list(range(alpha, beta))
    vals = [step] * full
    if full < t2 * tau:
        rest = d - (below + full * step)
        if rest > 0:
            rows.append(beta)
            vals.append(min(rest, step))
    if rows and rows[-1] >= params.m:
        raise RowOverflow(f"vertex {v} scale {i} needs row {rows[-1]} of {params.m}")
    rows_a = np.asarray(rows, dtype=np.int64)
    return rows_a, np.zeros_like(rows_a), np.asarray(vals, dtype=float)


def dense_block(entry, params: EmbedParams) -> np.ndarray:
    out = np.zeros((params.m, params.t))
    if entry is not None:
        rows, cols, vals = entry
        np.add.at(out, (rows, cols), vals)
    return out


def _seed_words(seed) -> list[int]:
    return [int(s) for s in (seed if isinstance(seed, (tuple, list)) else (seed,))]


class ScaleMaps:
    """
    Per-vertex, per-scale sparse matrices ``f_i(v)``.

    ``entries[v][i]`` is ``(rows, cols, vals)``.  Row permutations are drawn
    lazily: one generator per (scale, color), seeded from the master seed and
    the pair, so the draw does not depend on construction order.
    """

    def __init__(self, tree: RootedTree, chi: MonotoneColoring, table: ScaleTable,
                 params: EmbedParams, seed=0):
        self.tree = tree
        self.chi = chi
        self.table = table
        self.params = params
        self.seed = _seed_words(seed)
        self._perm: dict[tuple[int, int], np.ndarray] = {}
        self._comp: dict[tuple[int, int], np.ndarray] = {}
        self.entries: list[dict[int, tuple]] = [dict() for _ in range(tree.n)]
        self._build()

    def permutation(self, i: int, c: int) -> np.ndarray:
        """``P[r, a]``: where row ``r`` sends column ``a``."""
        key = (i, c)
        if key not in self._perm:
            ss = np.random.SeedSequence(self.seed + [i + SCALE_OFFSET, c])
            rng = np.random.default_rng(ss)
            base = np.tile(np.arange(self.params.t), (self.params.m, 1))
            self._perm[key] = rng.permuted(base, axis=1)
        return self._perm[key]

    def composite(self, i: int, c: int) -> np.ndarray:
        """Row permutation applied to class ``c`` and everything above it."""
        if c == self.chi.sentinel:
            return np.tile(np.arange(self.params.t), (self.params.m, 1))
        key = (i, c)
        if key not in self._comp:
            outer = self.composite(i, int(self.chi.parent_color[c]))
            self._comp[key] = np.take_along_axis(outer, self.permutation(i, c), axis=1)
        return self._comp[key]

    def _build(self) -> None:
        chi, table = self.chi, self.table
        for v in self.tree.order[1:]:
            c = int(chi.color_of[v])
            acc = dict(self.entries[chi.top[c]])
            for i in table.taus[v]:
                rows, _, vals = delta(int(v), i, table, self.params)
                if rows.size == 0:
                    continue
                cols = self.composite(i, c)[rows, 0]
                if i in acc:
                    r0, c0, v0 = acc[i]
                    acc[i] = (np.concatenate([r0, rows]), np.concatenate([c0, cols]),
                              np.concatenate([v0, vals]))
                else:
                    acc[i] = (rows, cols, vals)
            self.entries[v] = acc

    def scales(self) -> list[int]:
        s: set[int] = set()
        for e in self.entries:
            s.update(e)
        return sorted(s)

    def dense(self, v: int, i: int) -> np.ndarray:
        return dense_block(self.entries[v].get(i), self.params)

    def l1(self, x: int, y: int) -> float:
        """``sum_i ||f_i(x) - f_i(y)||_1``."""
        total = 0.0
        for i in set(self.entries[x]) | set(self.entries[y]):
            total += np.abs(self.dense(x, i) - self.dense(y, i)).sum()
        return float(total)

    def pairwise_l1(self) -> np.ndarray:
        """All-pairs ``sum_i ||f_i(x) - f_i(y)||_1`` as an ``n x n`` array."""
        n, p = self.tree.n, self.params
        out = np.zeros((n, n))
        for i in self.scales():
            X = np.zeros((n, p.m * p.t))
            for v, e in enumerate(self.entries):
                if i in e:
                    rows, cols, vals = e[i]
                    X[v, rows * p.t + cols] = vals
            used = np.nonzero(X.any(axis=0))[0]
            out += l1_matrix(X[:, used])
        return out

    def family(self) -> ScaleFamily:
        """The maps rescaled by ``t**2 / 2**i`` into ``[0, 1]``."""
        p = self.params
        fam = ScaleFamily(self.tree.n, p.m * p.t, p.eps, base=self.tree.root)
        t2 = p.t * p.t
        for v, e in enumerate(self.entries):
            for i, (rows, cols, vals) in e.items():
                fam.set(v, i, rows * p.t + cols, np.minimum(np.ldexp(vals * t2, -i), 1.0))
        return fam


@dataclass
class SingleTreeEmbedding:
    coords: np.ndarray
    params: EmbedParams
    maps: ScaleMaps | None


def embed_single_tree(tree: RootedTree, chi: MonotoneColoring, eps: float,
                      delta_: float, seed=0) -> SingleTreeEmbedding:
    """
    Embed one tree with positive edge lengths.  Coordinates are laid out as
    ``(row * t + col) * K + r`` and the root maps to the origin.
    """
    params = EmbedParams.for_tree(eps, delta_, multiplicity(chi), tree.num_edges)
    if tree.num_edges == 0:
        return SingleTreeEmbedding(np.zeros((tree.n, 0)), params, None)
    table = build_scale_table(tree, chi)
    maps = ScaleMaps(tree, chi, table, params, seed)
    coords = combine(maps.family()) / (params.t * params.t)
    return SingleTreeEmbedding(coords, params, maps)


# ---------------------------------------------------------------------- #
# full pipeline
# ---------------------------------------------------------------------- #


def default_target(eps: float) -> float | None:
    return 1.0 / (1.0 - 10.0 * eps) if eps < 0.1 else None


@dataclass
class EmbedOptions:
    k: int | None = None
    delta: float | None = None
    target: float | None = None
    retries: int = 1
    use_default_target: bool = True


@dataclass
class EmbeddingResult:
    coords: np.ndarray
    dim: int
    eps: float
    delta: float
    k: int
    t: int
    ms: list[int]
    seed: int
    attempts: int
    report: DistortionReport
    target: float | None = None
    millis: float = 0.0
    blocks: list[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def met_target(self) -> bool:
        return self.target is None or self.report.distortion <= self.target

    def to_document(self, sparse: bool = False) -> dict:
        doc = {
            "eps": self.eps, "delta": self.delta, "k": self.k, "t": self.t,
            "m": list(self.ms), "dim": self.dim, "seed": self.seed,
            "attempts": self.attempts, "expansion": self.report.expansion,
            "contraction": self.report.contraction,
            "distortion": self.report.distortion,
        }
        if sparse:
            v, j = np.nonzero(self.coords)
            doc["coords"] = {"format": "triplets", "n": int(self.coords.shape[0]),
                             "entries": [[int(a), int(b), float(self.coords[a, b])]
                                         for a, b in zip(v, j)]}
        else:
            doc["coords"] = self.coords.tolist()
        return doc


def closed_form_dim(ms: list[int], t: int, eps: float) -> int:
    return sum(ms) * t * interleave_count(eps)


def _assemble(folded: FoldedFamily, rep: np.ndarray, eps: float, delta_: float,
              seed: int) -> tuple[list[np.ndarray], list[int], int]:
    blocks, ms, t = [], [], EmbedParams.columns(eps, delta_)
    k = folded.k
    for j, (tr, chi, f) in enumerate(zip(folded.trees, folded.colorings, folded.vertex_maps)):
        single = embed_single_tree(tr, chi, eps, delta_, seed=(seed, j))
        ms.append(single.params.m)
        blocks.append(single.coords[f][rep] / k)
    return blocks, ms, t


def embed(tree: RootedTree, eps: float, seed: int = 0,
          opts: EmbedOptions | None = None) -> EmbeddingResult:
    """
    Fold the tree into ``k`` trees, embed each, concatenate with weight
    ``1/k`` and verify.  Retries with ``seed + attempt`` until the target
    distortion is met; raises ``RetryBudgetExhausted`` holding the best
    attempt otherwise.
    """
    opts = opts or EmbedOptions()
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    if opts.retries < 1:
        raise ValueError("retries must be at least 1")
    start = time.perf_counter()
    target = opts.target
    if target is None and opts.use_default_target:
        target = default_target(eps)

    small, rep = contract_zero_edges(tree)
    k = opts.k if opts.k is not None else fold_count(eps)
    delta_ = opts.delta if opts.delta is not None else 2.0 ** -(k + 1)
    if small.num_edges == 0:
        folded = None
    else:
        folded = fold_tree(small, monotone_coloring(small), eps, k=k)
    dist = tree.distance_matrix()

    best: EmbeddingResult | None = None
    for a in range(opts.retries):
        s = seed + a
        if folded is None:
            blocks, ms = [np.zeros((tree.n, 0))], [0] * k
            t = EmbedParams.columns(eps, delta_)
        else:
            blocks, ms, t = _assemble(folded, rep, eps, delta_, s)
        coords = np.hstack(blocks)
        report = distortion(blocks, tree, dist=dist)
        res = EmbeddingResult(coords, coords.shape[1], eps, delta_, k, t, ms, s, a + 1,
                              report, target, blocks=blocks)
        if best is None or report.distortion < best.report.distortion:
            best = res
        best.attempts = a + 1
        if res.met_target:
            res.attempts = a + 1
            res.millis = (time.perf_counter() - start) * 1e3
            return res
    best.millis = (time.perf_counter() - start) * 1e3
    raise RetryBudgetExhausted(best, opts.retries)
