"""Discrete Walsh analysis on the dyadic grid of [0, 1).

Functions live on the 2**N half-open cells [j/2**N, (j+1)/2**N) of a fixed
generation N and are exactly representable iff their spectrum sits below
2**N.  Coefficients are stored in Paley order: coefficient n pairs with the
Walsh function w_n, the product of Rademacher functions selected by the
binary digits of n.  With that ordering the index blocks of `dyadic.delta_block`
are exactly the spectral supports of the martingale differences of the
canonical dyadic filtration.

Conventions baked in here:

* ``analyze`` includes the 1/2**N factor, so coefficients are true integrals
  (f, w_n) and Parseval reads  sum_n coeff[n]**2 == integral of f**2.
* ``synthesize`` carries no factor; it is the plain expansion sum.
* The fast transform is the natural-order butterfly composed with a
  bit-reversal index permutation, O(N * 2**N).
* All operations require operands on a common grid and reject mismatches
  (ResolutionError) rather than resampling silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dyadic import IntInterval, check_index


class ResolutionError(ValueError):
    """An index or level exceeds what the grid resolves, or grids mismatch."""


def _as_grid_values(values, resolution: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != (1 << resolution):
        raise ValueError(
            f"expected {1 << resolution} cell values for resolution {resolution}, "
            f"got shape {arr.shape}"
        )
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DyadicFunction:
    """Real function on [0, 1), constant on the 2**N cells of generation N."""

    resolution: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.resolution < 0:
            raise ValueError("resolution must be nonnegative")
        object.__setattr__(self, "values", _as_grid_values(self.values, self.resolution))

    @classmethod
    def constant(cls, c: float, resolution: int) -> "DyadicFunction":
        return cls(resolution, np.full(1 << resolution, float(c)))

    @property
    def size(self) -> int:
        return 1 << self.resolution

    def integral(self) -> float:
        return float(self.values.mean())

    def norm(self, p: float) -> float:
        """L^p norm with respect to Lebesgue measure on [0, 1)."""
        if p == np.inf:
            return float(np.abs(self.values).max())
        if p < 1:
            raise ValueError(f"exponent must be >= 1, got {p}")
        return float(np.mean(np.abs(self.values) ** p) ** (1.0 / p))

    def _check_same_grid(self, other: "DyadicFunction") -> None:
        if self.resolution != other.resolution:
            raise ResolutionError(
                f"resolution mismatch: {self.resolution} vs {other.resolution}"
            )

    def __add__(self, other: "DyadicFunction") -> "DyadicFunction":
        self._check_same_grid(other)
        return DyadicFunction(self.resolution, self.values + other.values)

    def __sub__(self, other: "DyadicFunction") -> "DyadicFunction":
        self._check_same_grid(other)
        return DyadicFunction(self.resolution, self.values - other.values)

    def __neg__(self) -> "DyadicFunction":
        return DyadicFunction(self.resolution, -self.values)

    def __mul__(self, other):
        if isinstance(other, DyadicFunction):
            self._check_same_grid(other)
            return DyadicFunction(self.resolution, self.values * other.values)
        return DyadicFunction(self.resolution, self.values * float(other))

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Walsh coefficients of a grid function, Paley ordered, coeffs[n] = (f, w_n)."""

    resolution: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _as_grid_values(self.coeffs, self.resolution))


@dataclass(frozen=True)
class DyadicCell:
    """Dyadic cell [position/2**level, (position+1)/2**level) of [0, 1)."""

    level: int
    position: int

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValueError("level must be nonnegative")
        if not 0 <= self.position < (1 << self.level):
            raise ValueError(f"position {self.position} out of range at level {self.level}")

    @property
    def measure(self) -> float:
        return 2.0 ** (-self.level)

    def grid_slice(self, resolution: int) -> slice:
        """Indices of the generation-`resolution` cells inside this cell."""
        if self.level > resolution:
            raise ResolutionError(
                f"cell level {self.level} finer than resolution {resolution}"
            )
        width = 1 << (resolution - self.level)
        return slice(self.position * width, (self.position + 1) * width)


@lru_cache(maxsize=None)
def bit_reversal(n_bits: int) -> np.ndarray:
    """Permutation reversing the lowest n_bits bits of 0 .. 2**n_bits - 1."""
    idx = np.arange(1 << n_bits, dtype=np.int64)
    rev = np.zeros_like(idx)
    for b in range(n_bits):
        rev |= ((idx >> b) & 1) << (n_bits - 1 - b)
    rev.setflags(write=False)
    return rev


def fwht(values: np.ndarray) -> np.ndarray:
    """Natural-order fast Walsh-Hadamard butterfly along axis 0.

    out[n] = sum_j values[j] * (-1)**popcount(j & n).  Self-inverse up to the
    factor 2**N.  Accepts trailing axes and transforms each column.
    """
    a = np.array(values, dtype=float)
    n = a.shape[0]
    if n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    trailing = a.shape[1:]
    h = 1
    while h < n:
        a = a.reshape(n // (2 * h), 2, h, *trailing)
        top = a[:, 0].copy()
        a[:, 0] += a[:, 1]
        a[:, 1] = top - a[:, 1]
        a = a.reshape(n, *trailing)
        h *= 2
    return a


def walsh_eval(n: int, resolution: int) -> DyadicFunction:
    """Sample the n-th Walsh function on the generation-`resolution` grid.

    The value on cell j is the product over the set binary digits k of n of
    the (k+1)-th Rademacher function, which on cell j equals (-1) raised to
    the (k+1)-th leading binary digit of j.  Requires n < 2**resolution,
    otherwise the function is not constant on cells.
    """
    check_index(n, "n")
    if n >= (1 << resolution):
        raise ResolutionError(
            f"index {n} is not resolved on a generation-{resolution} grid"
        )
    rev = bit_reversal(resolution)
    parity = np.bitwise_count(np.bitwise_and(rev, n)) & 1
    return DyadicFunction(resolution, 1.0 - 2.0 * parity.astype(float))


def analyze_values(values: np.ndarray) -> np.ndarray:
    """Paley-ordered Walsh coefficients of raw cell values (axis 0)."""
    n = values.shape[0]
    rev = bit_reversal(int(n).bit_length() - 1)
    return fwht(np.asarray(values, dtype=float)[rev]) / n


def synthesize_values(coeffs: np.ndarray) -> np.ndarray:
    """Cell values of a Paley-ordered coefficient array (axis 0)."""
    n = coeffs.shape[0]
    rev = bit_reversal(int(n).bit_length() - 1)
    return fwht(coeffs)[rev]


def analyze(f: DyadicFunction) -> Spectrum:
    """Walsh coefficients of f; coeffs[n] = integral of f * w_n."""
    return Spectrum(f.resolution, analyze_values(f.values))


def synthesize(spectrum: Spectrum) -> DyadicFunction:
    """Expansion sum_n coeffs[n] * w_n back onto the grid."""
    return DyadicFunction(spectrum.resolution, synthesize_values(spectrum.coeffs))


def _index_mask(indices, resolution: int) -> np.ndarray:
    size = 1 << resolution
    mask = np.zeros(size, dtype=bool)
    if isinstance(indices, IntInterval):
        if indices.hi > size:
            raise ResolutionError(
                f"index {indices.hi - 1} is not resolved on a generation-{resolution} grid"
            )
        mask[indices.lo : indices.hi] = True
        return mask
    for n in indices:
        check_index(n, "projection index")
        if n >= size:
            raise ResolutionError(
                f"index {n} is not resolved on a generation-{resolution} grid"
            )
        mask[n] = True
    return mask


def project(indices, f: DyadicFunction) -> DyadicFunction:
    """Spectral projection: keep the Walsh coefficients with index in `indices`.

    Idempotent and self-adjoint for the L^2 pairing.  `indices` may be any
    iterable of indices or an IntInterval.
    """
    mask = _index_mask(indices, f.resolution)
    coeffs = analyze_values(f.values)
    coeffs[~mask] = 0.0
    return DyadicFunction(f.resolution, synthesize_values(coeffs))


def _check_level(k: int, resolution: int) -> None:
    if k < 0:
        raise ValueError(f"level must be nonnegative, got {k}")
    if k > resolution:
        raise ResolutionError(f"level {k} exceeds resolution {resolution}")


def expectation(k: int, f: DyadicFunction) -> DyadicFunction:
    """Conditional expectation onto generation k: cell averages at level k.

    Spectrally this keeps exactly the coefficients below 2**k.
    """
    _check_level(k, f.resolution)
    width = 1 << (f.resolution - k)
    means = f.values.reshape(1 << k, width).mean(axis=1)
    return DyadicFunction(f.resolution, np.repeat(means, width))


def mart_diff(k: int, f: DyadicFunction) -> DyadicFunction:
    """Martingale difference at level k.

    For k >= 1 this is the drop between consecutive conditional expectations,
    equivalently the spectral projection onto delta_block(k); for k = 0 it is
    the constant mean.  The differences over k = 0..N telescope back to f.
    """
    _check_level(k, f.resolution)
    if k == 0:
        return DyadicFunction.constant(f.integral(), f.resolution)
    return expectation(k, f) - expectation(k - 1, f)


def restrict_rescale(f: DyadicFunction, cell: DyadicCell) -> DyadicFunction:
    """Restrict f to a dyadic cell and rescale the cell onto [0, 1).

    The result lives at resolution N - level and represents f under the
    normalized measure of the cell.  Restricting a Walsh function w_a gives
    (plus or minus) the Walsh function whose index drops the lowest `level`
    digits of a, the sign being the constant value on the cell of the
    dropped Rademacher factors.
    """
    sl = f.values[cell.grid_slice(f.resolution)]
    return DyadicFunction(f.resolution - cell.level, sl)
