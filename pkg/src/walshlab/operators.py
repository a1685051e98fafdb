"""Dyadic operator zoo: block sums, maximal functions, square function.

The central object is the map sending a scalar grid function f to the family

    s  |->  sum over j in Theta_s of  Delta_j(w_{a_s} * f),

one component per decomposed interval, where a_s is the interval's anchor and
Theta_s its left-piece levels (`block_sum_family`).  Multiplying component s
by w_{a_s} recovers the spectral projection of f onto the union of the left
pieces, which is how the square function of arbitrary interval projections is
reduced to martingale machinery.

Maximal and oscillation functionals are dyadic throughout: suprema range over
the dyadic cells of levels 0..N only, which loses nothing because the
functions are cell-constant at level N.  Tree sweeps run bottom-up with
pairwise sums, so a sharp/maximal evaluation costs O(2**N * (N + S)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dyadic import delta_block
from .intervals import Decomposition
from .walsh import (
    DyadicFunction,
    ResolutionError,
    analyze_values,
    synthesize_values,
    walsh_eval,
)


@dataclass(frozen=True, eq=False)
class SeqFunction:
    """Finitely many grid functions viewed as one l2-sequence-valued function."""

    resolution: int
    values: np.ndarray  # shape (components, 2**resolution)

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != (1 << self.resolution):
            raise ValueError(
                f"expected shape (S, {1 << self.resolution}), got {arr.shape}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_components(cls, components: Sequence[DyadicFunction]) -> "SeqFunction":
        if not components:
            raise ValueError("need at least one component")
        res = components[0].resolution
        for g in components[1:]:
            if g.resolution != res:
                raise ResolutionError("components live on different grids")
        return cls(res, np.stack([g.values for g in components]))

    @property
    def components(self) -> tuple[DyadicFunction, ...]:
        return tuple(DyadicFunction(self.resolution, row) for row in self.values)

    def pointwise_norm(self) -> DyadicFunction:
        return DyadicFunction(self.resolution, np.sqrt((self.values**2).sum(axis=0)))


def _levels_mask(levels: Iterable[int], resolution: int) -> np.ndarray:
    mask = np.zeros(1 << resolution, dtype=bool)
    for j in levels:
        if j > resolution:
            raise ResolutionError(f"level {j} exceeds resolution {resolution}")
        blk = delta_block(j)
        mask[blk.lo : blk.hi] = True
    return mask


def block_sum(f: DyadicFunction, a: int, levels: Iterable[int]) -> DyadicFunction:
    """Sum over j in `levels` of the level-j martingale difference of w_a * f.

    Computed spectrally: modulate by w_a, then keep the coefficient blocks of
    the requested levels.  Multiplying the result by w_a again gives the
    spectral projection of f onto the union of the translated blocks.
    """
    mask = _levels_mask(levels, f.resolution)
    modulated = walsh_eval(a, f.resolution).values * f.values
    coeffs = analyze_values(modulated)
    coeffs[~mask] = 0.0
    return DyadicFunction(f.resolution, synthesize_values(coeffs))


def block_sum_family(
    f: DyadicFunction, decomps: Sequence[Decomposition]
) -> SeqFunction:
    """One block sum per decomposition, using its anchor and left-piece levels.

    Every component integrates to zero since left levels are >= 1.
    """
    rows = [block_sum(f, dec.anchor, dec.left_levels).values for dec in decomps]
    return SeqFunction(f.resolution, np.stack(rows) if rows else np.zeros((0, f.size)))


def _level_stats(values: np.ndarray, resolution: int):
    """Yield (level, per-cell sums) from the leaves up to the root."""
    cur = values
    yield resolution, cur
    for level in range(resolution - 1, -1, -1):
        cur = cur[..., 0::2] + cur[..., 1::2]
        yield level, cur


def sharp_maximal(g: SeqFunction) -> DyadicFunction:
    """Dyadic sharp function: sup over cells of the rms oscillation about the cell mean.

    Uses the per-cell variance identity (mean of the squared norm minus the
    squared norm of the mean) so each level costs one pairwise-sum pass.
    """
    n = 1 << g.resolution
    sq_levels = _level_stats((g.values**2).sum(axis=0), g.resolution)
    comp_levels = _level_stats(g.values, g.resolution)
    best = np.zeros(n)
    for (level, sq), (_, comp) in zip(sq_levels, comp_levels):
        count = 1 << (g.resolution - level)
        osc2 = sq / count - ((comp / count) ** 2).sum(axis=0)
        best = np.maximum(best, np.repeat(np.maximum(osc2, 0.0), count))
    return DyadicFunction(g.resolution, np.sqrt(best))


def maximal_function(f: DyadicFunction) -> DyadicFunction:
    """Dyadic Hardy-Littlewood maximal function: sup of cell averages of |f|."""
    n = f.size
    best = np.zeros(n)
    for level, sums in _level_stats(np.abs(f.values), f.resolution):
        count = 1 << (f.resolution - level)
        best = np.maximum(best, np.repeat(sums / count, count))
    return DyadicFunction(f.resolution, best)


def rms_maximal(f: DyadicFunction) -> DyadicFunction:
    """Root-mean-square maximal function: sup of (cell average of f**2)**(1/2).

    Equals the maximal function of f**2 followed by a pointwise square root.
    """
    squared = DyadicFunction(f.resolution, f.values**2)
    return DyadicFunction(f.resolution, np.sqrt(maximal_function(squared).values))


def square_function(g: SeqFunction) -> DyadicFunction:
    """Martingale square function over levels 1..N, summed across components.

    The level-0 term (the mean) is deliberately excluded.
    """
    res = g.resolution
    n = 1 << res
    means = [g.values]
    for _ in range(res):
        prev = means[-1]
        means.append(0.5 * (prev[:, 0::2] + prev[:, 1::2]))
    means.reverse()  # means[k] now holds the level-k cell means, shape (S, 2**k)
    acc = np.zeros(n)
    for k in range(1, res + 1):
        diff = means[k] - np.repeat(means[k - 1], 2, axis=1)
        acc += np.repeat((diff**2).sum(axis=0), n >> k)
    return DyadicFunction(res, np.sqrt(acc))
