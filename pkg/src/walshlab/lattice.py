"""Finite-dimensional lattice-valued analysis.

Values live in l^q(d): d coordinates with the coordinatewise order and the
q-norm (max for q = inf).  A lattice-valued grid function is a (2**N, d)
array of cell values.  On top of that this module provides

* the mixed norms: L^p of the lattice norm, the lattice norm of the
  coordinatewise l2 sum across a finite sequence, and the L^p norm of a
  Rademacher sum (exact sign enumeration up to 20 components, seeded Monte
  Carlo beyond);
* the segment transform pair: component s of the forward map is the sum of
  martingale differences of w_{a_s} * f over the anchor level 0 and the
  left-piece levels of interval s, so that modulating back by w_{a_s}
  projects f onto the contiguous segment {a_s} u (left pieces); the adjoint
  recombines a component family with the same blocks and modulations, and the
  two are exact adjoints for the sign-averaged coordinatewise pairing;
* the Calderon-Zygmund splitting at a height lam: stop at the maximal dyadic
  cells whose average pointwise norm exceeds lam, replace the function by its
  mean on each stopping cell (good part h), and keep the remainder (bad part
  b).  Off the stopping cells |h| <= lam pointwise; on a stopping cell the
  parent average bounds the mean by 2*lam, so |h| <= 2*lam whenever the root
  is not selected, i.e. whenever lam >= the L^1 norm of the pointwise norms.
  The bad part has zero mean, its level-n martingale difference is supported
  on the stopping cells of level <= n-1, and the stopping cells have total
  measure at most (L^1 norm)/lam.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .intervals import Decomposition
from .walsh import (
    DyadicCell,
    DyadicFunction,
    ResolutionError,
    analyze_values,
    synthesize_values,
    walsh_eval,
)
from .operators import _levels_mask

EXACT_SIGN_LIMIT = 20
_SIGN_CHUNK = 1 << 12


def lattice_norm(coords: np.ndarray, q: float, axis: int = -1) -> np.ndarray:
    """l^q norm along `axis` (max for q = inf)."""
    if q == np.inf:
        return np.abs(coords).max(axis=axis)
    if q < 1:
        raise ValueError(f"lattice exponent must be >= 1, got {q}")
    return (np.abs(coords) ** q).sum(axis=axis) ** (1.0 / q)


@dataclass(frozen=True, eq=False)
class LatticePoint:
    """A point of l^q(d)."""

    coords: np.ndarray
    q: float

    def __post_init__(self) -> None:
        arr = np.array(self.coords, dtype=float)
        if arr.ndim != 1:
            raise ValueError("coords must be one-dimensional")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    def norm(self) -> float:
        return float(lattice_norm(self.coords, self.q))


@dataclass(frozen=True, eq=False)
class LatticeFunction:
    """l^q(d)-valued function, constant on the cells of generation `resolution`."""

    resolution: int
    values: np.ndarray  # shape (2**resolution, d)
    q: float

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != (1 << self.resolution):
            raise ValueError(
                f"expected shape ({1 << self.resolution}, d), got {arr.shape}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def norm_values(self) -> np.ndarray:
        """Pointwise lattice norms, one per cell."""
        return lattice_norm(self.values, self.q, axis=1)

    def coordinate(self, c: int) -> DyadicFunction:
        return DyadicFunction(self.resolution, self.values[:, c])

    def _check_compatible(self, other: "LatticeFunction") -> None:
        if self.resolution != other.resolution:
            raise ResolutionError(
                f"resolution mismatch: {self.resolution} vs {other.resolution}"
            )
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "LatticeFunction") -> "LatticeFunction":
        self._check_compatible(other)
        return LatticeFunction(self.resolution, self.values + other.values, self.q)

    def __sub__(self, other: "LatticeFunction") -> "LatticeFunction":
        self._check_compatible(other)
        return LatticeFunction(self.resolution, self.values - other.values, self.q)

    def __mul__(self, scalar: float) -> "LatticeFunction":
        return LatticeFunction(self.resolution, self.values * float(scalar), self.q)

    __rmul__ = __mul__


def lp_x_norm(f: LatticeFunction, p: float) -> float:
    """L^p norm of the pointwise lattice norm (cell max for p = inf)."""
    norms = f.norm_values()
    if p == np.inf:
        return float(norms.max())
    if p < 1:
        raise ValueError(f"exponent must be >= 1, got {p}")
    return float(np.mean(norms**p) ** (1.0 / p))


def x_l2_norm(points: Sequence[LatticePoint]) -> float:
    """Lattice norm of the coordinatewise l2 sum of a finite point sequence."""
    if not points:
        return 0.0
    d, q = points[0].dim, points[0].q
    for pt in points[1:]:
        if pt.dim != d or pt.q != q:
            raise ValueError("points live in different lattices")
    stacked = np.stack([pt.coords for pt in points])
    return float(lattice_norm(np.sqrt((stacked**2).sum(axis=0)), q))


@dataclass(frozen=True, eq=False)
class RadElement:
    """Formal Rademacher sum: one lattice point per independent sign."""

    points: tuple[LatticePoint, ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("need at least one point")
        d, q = self.points[0].dim, self.points[0].q
        for pt in self.points[1:]:
            if pt.dim != d or pt.q != q:
                raise ValueError("points live in different lattices")

    @property
    def matrix(self) -> np.ndarray:
        return np.stack([pt.coords for pt in self.points])

    @property
    def q(self) -> float:
        return self.points[0].q


@lru_cache(maxsize=8)
def _sign_matrix_cached(count: int) -> np.ndarray:
    rows = np.arange(1 << count, dtype=np.int64)
    signs = 1.0 - 2.0 * ((rows[:, None] >> np.arange(count)) & 1)
    signs.setflags(write=False)
    return signs


def _sign_rows(count: int, mode: str, seed) -> np.ndarray:
    """Sign vectors to average over: the full hypercube or a seeded sample."""
    if mode == "exact":
        if count > EXACT_SIGN_LIMIT:
            raise ValueError(
                f"exact sign enumeration supports at most {EXACT_SIGN_LIMIT} "
                f"components, got {count}; use an mc:<samples> mode"
            )
        if count <= 14:
            return _sign_matrix_cached(count)
        rows = np.arange(1 << count, dtype=np.int64)  # too big to keep cached
        return 1.0 - 2.0 * ((rows[:, None] >> np.arange(count)) & 1)
    if mode.startswith("mc:"):
        samples = int(mode.split(":", 1)[1])
        if samples < 1:
            raise ValueError(f"need at least one Monte Carlo sample, got {samples}")
        rng = np.random.default_rng(seed)
        return 1.0 - 2.0 * rng.integers(0, 2, size=(samples, count)).astype(float)
    raise ValueError(f"unknown sign mode {mode!r}; expected 'exact' or 'mc:<samples>'")


def rad_norm(element: RadElement, p: float, mode: str = "exact", seed=None) -> float:
    """L^p norm of the random sum  sum_s eps_s x_s  over independent signs.

    Exact mode averages the p-th power of the lattice norm over all sign
    vectors; Monte Carlo draws them from the given seed.  Invariant under
    permuting the points and under flipping the sign of any point.
    """
    if p < 1:
        raise ValueError(f"exponent must be >= 1, got {p}")
    mat = element.matrix
    signs = _sign_rows(mat.shape[0], mode, seed)
    norms = lattice_norm(signs @ mat, element.q, axis=1)
    return float(np.mean(norms**p) ** (1.0 / p))


def _stacked(components: Sequence[LatticeFunction]) -> np.ndarray:
    if not components:
        raise ValueError("need at least one component")
    first = components[0]
    for g in components[1:]:
        first._check_compatible(g)
        if g.q != first.q:
            raise ValueError("components carry different lattice exponents")
    return np.stack([g.values for g in components])  # (S, cells, d)


def rad_norm_values(
    components: Sequence[LatticeFunction],
    p: float,
    mode: str = "exact",
    seed=None,
) -> np.ndarray:
    """Per-cell L^p Rademacher-average norms of a component family.

    Sign enumeration is chunked so exact mode stays memory-safe up to the
    component limit.
    """
    if p < 1:
        raise ValueError(f"exponent must be >= 1, got {p}")
    stacked = _stacked(components)
    q = components[0].q
    signs = _sign_rows(stacked.shape[0], mode, seed)
    cells = stacked.shape[1]
    acc = np.zeros(cells)
    for start in range(0, signs.shape[0], _SIGN_CHUNK):
        chunk = signs[start : start + _SIGN_CHUNK]
        sums = np.einsum("ks,scd->kcd", chunk, stacked)
        acc += (lattice_norm(sums, q, axis=2) ** p).sum(axis=0)
    return (acc / signs.shape[0]) ** (1.0 / p)


def lp_radx_norm(
    components: Sequence[LatticeFunction],
    p: float,
    mode: str = "exact",
    seed=None,
) -> float:
    """L^p norm in x of the cellwise Rademacher-average norm."""
    cell_norms = rad_norm_values(components, p, mode, seed)
    return float(np.mean(cell_norms**p) ** (1.0 / p))


def duality_pairing(f: LatticeFunction, g: LatticeFunction) -> float:
    """Integral over [0,1) of the coordinatewise dot product."""
    f._check_compatible(g)
    return float((f.values * g.values).sum(axis=1).mean())


def _masked_blocks(values: np.ndarray, levels, resolution: int) -> np.ndarray:
    """Keep the coefficient blocks of the given levels plus level 0."""
    mask = _levels_mask(levels, resolution)
    mask[0] = True
    coeffs = analyze_values(values)
    coeffs[~mask] = 0.0
    return synthesize_values(coeffs)


def segment_transform(
    f: LatticeFunction, decomps: Sequence[Decomposition]
) -> list[LatticeFunction]:
    """Forward transform: one component per interval.

    Component s collects the martingale differences of w_{a_s} * f over the
    anchor level 0 and the left-piece levels; multiplied back by w_{a_s} it
    is the spectral projection of f onto the segment {a_s} u (left pieces).
    """
    out = []
    for dec in decomps:
        w = walsh_eval(dec.anchor, f.resolution).values[:, None]
        vals = _masked_blocks(w * f.values, dec.left_levels, f.resolution)
        out.append(LatticeFunction(f.resolution, vals, f.q))
    return out


def segment_transform_adjoint(
    components: Sequence[LatticeFunction], decomps: Sequence[Decomposition]
) -> LatticeFunction:
    """Adjoint transform: recombine one component per interval.

    Sums w_{a_s} times the same block-restricted martingale differences of
    component s.  Exact adjoint of `segment_transform` for the sign-averaged
    coordinatewise pairing.
    """
    if len(components) != len(decomps):
        raise ValueError(
            f"{len(components)} components for {len(decomps)} decompositions"
        )
    first = components[0]
    acc = np.zeros_like(first.values)
    for g, dec in zip(components, decomps):
        first._check_compatible(g)
        w = walsh_eval(dec.anchor, g.resolution).values[:, None]
        acc = acc + w * _masked_blocks(g.values, dec.left_levels, g.resolution)
    return LatticeFunction(first.resolution, acc, first.q)


# ---------------------------------------------------------------------------
# Calderon-Zygmund splitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CZResult:
    """Splitting g = b + h at height lam with its stopping cells."""

    b: LatticeFunction
    h: LatticeFunction
    cells: tuple[DyadicCell, ...]
    lam: float

    def bad_set_mask(self, max_level: int | None = None) -> np.ndarray:
        """Grid mask of the union of stopping cells (of level <= max_level)."""
        resolution = self.b.resolution
        mask = np.zeros(1 << resolution, dtype=bool)
        for cell in self.cells:
            if max_level is None or cell.level <= max_level:
                mask[cell.grid_slice(resolution)] = True
        return mask


def stopping_cells(leaf_norms: np.ndarray, lam: float) -> list[DyadicCell]:
    """Maximal dyadic cells whose average of `leaf_norms` exceeds lam.

    Top-down sweep; a cell is selected iff its average is strictly above lam
    and no ancestor was selected.
    """
    if lam <= 0:
        raise ValueError(f"threshold must be positive, got {lam}")
    n = leaf_norms.shape[0]
    resolution = int(n).bit_length() - 1
    sums = [leaf_norms]
    for _ in range(resolution):
        prev = sums[-1]
        sums.append(prev[0::2] + prev[1::2])
    sums.reverse()  # sums[m] holds the level-m cell sums
    cells: list[DyadicCell] = []
    covered = np.zeros(1, dtype=bool)
    for m in range(resolution + 1):
        count = 1 << (resolution - m)
        selected = (sums[m] / count > lam) & ~covered
        cells.extend(DyadicCell(m, int(pos)) for pos in np.flatnonzero(selected))
        covered |= selected
        if m < resolution:
            covered = np.repeat(covered, 2)
    return cells


def split_at_cells(
    values: np.ndarray, cells: Sequence[DyadicCell], resolution: int
):
    """Good/bad split of raw cell values over the given stopping cells."""
    good = values.copy()
    for cell in cells:
        sl = cell.grid_slice(resolution)
        good[sl] = values[sl].mean(axis=0)
    return values - good, good


def cz_decompose(g: LatticeFunction, lam: float) -> CZResult:
    """Calderon-Zygmund splitting of a lattice-valued grid function.

    Stops at the maximal dyadic cells where the average pointwise norm
    exceeds lam; h freezes g to its mean on each stopping cell, b = g - h.
    """
    cells = stopping_cells(g.norm_values(), lam)
    bad, good = split_at_cells(g.values, cells, g.resolution)
    return CZResult(
        b=LatticeFunction(g.resolution, bad, g.q),
        h=LatticeFunction(g.resolution, good, g.q),
        cells=tuple(cells),
        lam=float(lam),
    )


def verify_cz(result: CZResult, g: LatticeFunction, tol: float = 1e-10) -> dict:
    """Check every invariant of a splitting; returns a report, never raises.

    The pointwise bound on h is 2*lam when the root is not a stopping cell
    and degrades to the L^1 norm of g when it is (the mean of g is then the
    only admissible good part).
    """
    n = 1 << g.resolution
    norms = g.norm_values()
    l1 = float(norms.mean())
    root_selected = any(c.level == 0 for c in result.cells)
    h_bound = l1 + tol if root_selected else 2.0 * result.lam + tol

    checks = {}
    checks["sum"] = float(
        np.abs(result.b.values + result.h.values - g.values).max()
    ) <= tol
    checks["h_inf"] = float(result.h.norm_values().max()) <= h_bound
    checks["h_l1"] = float(result.h.norm_values().mean()) <= l1 + tol
    checks["b_mean_zero"] = float(np.abs(result.b.values.mean(axis=0)).max()) <= tol

    support_ok = True
    for level in range(1, g.resolution + 1):
        diff = np.repeat(
            result.b.values.reshape(1 << level, -1, g.dim).mean(axis=1),
            n >> level,
            axis=0,
        )
        if level > 1:
            coarse = np.repeat(
                result.b.values.reshape(1 << (level - 1), -1, g.dim).mean(axis=1),
                n >> (level - 1),
                axis=0,
            )
            diff = diff - coarse
        else:
            diff = diff - result.b.values.mean(axis=0)
        off = ~result.bad_set_mask(max_level=level - 1)
        if off.any() and float(np.abs(diff[off]).max()) > tol:
            support_ok = False
            break
    checks["diff_support"] = support_ok

    measure = float(result.bad_set_mask().mean())
    checks["bad_set_measure"] = measure <= l1 / result.lam + tol

    disjoint = True
    cover = np.zeros(n, dtype=bool)
    for cell in result.cells:
        sl = cell.grid_slice(g.resolution)
        if cover[sl].any():
            disjoint = False
        cover[sl] = True
    checks["cells_disjoint"] = disjoint

    return {
        "passed": all(checks.values()),
        "checks": checks,
        "lam": result.lam,
        "l1_norm": l1,
        "root_selected": root_selected,
        "stopping_cells": len(result.cells),
        "bad_set_measure": measure,
    }
