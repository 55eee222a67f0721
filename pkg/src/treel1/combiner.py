"""
Collapsing a family of per-scale coordinate maps into a few interleaved copies.

A family assigns every point a sparse vector ``f_i(x)`` in ``[0, 1]^P`` for
each integer scale ``i``.  Scales are grouped by residue mod ``K`` and each
group is summed with weights ``2**i``, giving ``K`` vectors of length ``P``.
The output is laid out position-major: coordinate ``pos * K + r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteSum


def interleave_count(eps: float) -> int:
    return 2 + math.ceil(math.log2(1.0 / eps) - 1e-12)


@dataclass
class ScaleFamily:
    """
    Sparse family of maps.  ``entries[x]`` maps a scale ``i`` to a pair of
    arrays ``(pos, val)`` listing the nonzero coordinates of ``f_i(x)``.
    """

    num_points: int
    positions: int
    eps: float
    entries: list[dict[int, tuple[np.ndarray, np.ndarray]]] = field(default_factory=list)
    base: int = 0

    def __post_init__(self):
        if not self.entries:
            self.entries = [dict() for _ in range(self.num_points)]

    @property
    def K(self) -> int:
        return interleave_count(self.eps)

    @property
    def dim(self) -> int:
        return self.positions * self.K

    def set(self, x: int, i: int, pos, val) -> None:
        pos = np.asarray(pos, dtype=np.int64)
        val = np.asarray(val, dtype=float)
        keep = val != 0
        if keep.any():
            self.entries[x][int(i)] = (pos[keep], val[keep])
        else:
            self.entries[x].pop(int(i), None)

    def dense_scale(self, x: int, i: int) -> np.ndarray:
        out = np.zeros(self.positions)
        if i in self.entries[x]:
            pos, val = self.entries[x][i]
            np.add.at(out, pos, val)
        return out

    def scales(self) -> list[int]:
        s: set[int] = set()
        for e in self.entries:
            s.update(e)
        return sorted(s)

    def validate(self) -> None:
        for x, e in enumerate(self.entries):
            for i, (pos, val) in e.items():
                if not np.all(np.isfinite(val)) or not math.isfinite(math.ldexp(1.0, i)):
                    raise NonFiniteSum(f"point {x} scale {i}")
                if val.min() < 0 or val.max() > 1 + 1e-12:
                    raise ValueError(f"value outside [0, 1] at point {x} scale {i}")


def weighted_l1(fam: ScaleFamily, x: int, y: int) -> float:
    """``sum_i 2**i ||f_i(x) - f_i(y)||_1``."""
    total = 0.0
    for i in set(fam.entries[x]) | set(fam.entries[y]):
        d = np.abs(fam.dense_scale(x, i) - fam.dense_scale(y, i)).sum()
        total += math.ldexp(d, i)
    return total


def combine(fam: ScaleFamily) -> np.ndarray:
    """
    ``F_r(x) = sum over i = r mod K of 2**i (f_i(x) - f_i(base))``, returned
    densely as an ``(num_points, positions * K)`` array.
    """
    fam.validate()
    K = fam.K
    out = np.zeros((fam.num_points, fam.positions, K))
    for x, e in enumerate(fam.entries):
        for i, (pos, val) in e.items():
            np.add.at(out[x, :, i % K], pos, np.ldexp(val, i))
    out -= out[fam.base][None]
    return out.reshape(fam.num_points, fam.positions * K)


def zeta(fam: ScaleFamily, x: int, y: int) -> float:
    """
    For each coordinate, sum ``2**i * frac(|f_i(x) - f_i(y)|)`` over scales
    strictly above the lowest scale at which that coordinate differs.
    """
    diffs: dict[int, dict[int, float]] = {}
    for i in set(fam.entries[x]) | set(fam.entries[y]):
        d = np.abs(fam.dense_scale(x, i) - fam.dense_scale(y, i))
        for p in np.nonzero(d)[0]:
            diffs.setdefault(int(p), {})[i] = float(d[p])
    total = 0.0
    for per_scale in diffs.values():
        lo = min(per_scale)
        for i, d in per_scale.items():
            if i > lo:
                total += math.ldexp(d - math.floor(d), i)
    return total
