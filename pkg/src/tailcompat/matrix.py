"""Matrix value types and the elementary transforms on them.

Matrices are dense numpy arrays, either ``float64`` or ``object`` arrays of
:class:`fractions.Fraction` for the exact-arithmetic paths.  All value types
are immutable: their arrays are copied on construction and marked read-only.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    BadDiagonal,
    BadParam,
    BadWeight,
    DimMismatch,
    DimTooLarge,
    NotSymmetric,
    OutOfRange,
)

MAX_DIM = 20
SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-9

__all__ = [
    "MAX_DIM",
    "SquareUnitMatrix",
    "TailMatrix",
    "SubstochasticMatrix",
    "BoundViolation",
    "validate_tail_candidate",
    "lift_diag",
    "hadamard",
    "convex_mix",
    "frechet_bernoulli_bounds_check",
    "psd_necessary_check",
    "equicorr_matrix",
    "ar1_matrix",
    "ma1_matrix",
    "gamma_matrix",
    "bits_of",
]


def _is_exact(arr: np.ndarray) -> bool:
    return arr.dtype == object


def _coerce(m) -> np.ndarray:
    if isinstance(m, SquareUnitMatrix):
        return m.values
    arr = np.asarray(m)
    if arr.dtype == object:
        return np.vectorize(Fraction, otypes=[object])(arr) if arr.size else arr
    return np.asarray(arr, dtype=float)


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = arr.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class SquareUnitMatrix:
    """A d x d matrix with every entry in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        arr = _coerce(self.values)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise DimMismatch(f"expected a non-empty square matrix, got shape {arr.shape}")
        if arr.shape[0] > MAX_DIM:
            raise DimTooLarge(f"d={arr.shape[0]} exceeds the library cap d <= {MAX_DIM}")
        if not _is_exact(arr) and not np.all(np.isfinite(arr)):
            raise OutOfRange("matrix has non-finite entries")
        if not (np.all(arr >= 0) and np.all(arr <= 1)):
            raise OutOfRange("matrix entries must lie in [0, 1]")
        object.__setattr__(self, "values", _frozen(arr))

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    @property
    def exact(self) -> bool:
        return _is_exact(self.values)

    def to_float(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values.astype(float), dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, SquareUnitMatrix):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(np.all(self.values == other.values))

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}({self.values.tolist()!r})"


class TailMatrix(SquareUnitMatrix):
    """Symmetric unit-diagonal :class:`SquareUnitMatrix` (candidate element of T_d).

    The constructor is strict (exact symmetry, diagonal exactly 1); use
    :func:`validate_tail_candidate` for tolerant validation of raw input.
    """

    def __post_init__(self):
        super().__post_init__()
        v = self.values
        if not np.all(v == v.T):
            raise NotSymmetric("tail matrix must be exactly symmetric")
        if not np.all(np.diag(v) == 1):
            raise BadDiagonal("tail matrix must have unit diagonal")


@dataclass(frozen=True, eq=False)
class SubstochasticMatrix:
    """Nonnegative d x m matrix whose rows sum to at most one."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2 or 0 in arr.shape:
            raise DimMismatch(f"expected a non-empty 2-d array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise OutOfRange("substochastic entries must be finite and nonnegative")
        if np.any(arr.sum(axis=1) > 1 + 1e-12):
            raise OutOfRange("substochastic row sums must not exceed 1")
        object.__setattr__(self, "values", _frozen(arr))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def validate_tail_candidate(m, tol: float = SYMMETRY_TOL) -> TailMatrix:
    """Validate a candidate tail-dependence matrix.

    Entries within `tol` outside [0, 1] are clipped, diagonal entries within
    `tol` of one are set to exactly one, and mirror entries are averaged.

    Raises
    ------
    OutOfRange, NotSymmetric, BadDiagonal
    """
    arr = np.array(_coerce(m), copy=True)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimMismatch(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not _is_exact(arr) and not np.all(np.isfinite(arr)):
        raise OutOfRange("matrix has non-finite entries")
    if np.any(arr < -tol) or np.any(arr > 1 + tol):
        raise OutOfRange("matrix entries must lie in [0, 1]")
    exact = _is_exact(arr)
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
    arr[arr < 0] = zero
    arr[arr > 1] = one
    d = arr.shape[0]
    for i in range(d):
        for j in range(i + 1, d):
            gap = abs(arr[i, j] - arr[j, i])
            if gap > tol:
                raise NotSymmetric(f"|a[{i},{j}] - a[{j},{i}]| = {float(gap):.3g} exceeds {tol:g}")
            avg = (arr[i, j] + arr[j, i]) / 2
            arr[i, j] = arr[j, i] = avg
        if abs(arr[i, i] - 1) > tol:
            raise BadDiagonal(f"diagonal entry {i} is {arr[i, i]}, expected 1")
        arr[i, i] = one
    return TailMatrix(arr)


def lift_diag(m):
    """Set every diagonal entry to one, keeping the off-diagonal entries."""
    arr = np.array(_coerce(m), copy=True)
    np.fill_diagonal(arr, Fraction(1) if _is_exact(arr) else 1.0)
    return SquareUnitMatrix(arr)


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    x, y = _coerce(a), _coerce(b)
    if x.shape != y.shape:
        raise DimMismatch(f"shape {x.shape} vs {y.shape}")
    if _is_exact(x) != _is_exact(y):
        x, y = x.astype(float), y.astype(float)
    return x, y


def _tail(m) -> TailMatrix:
    if isinstance(m, TailMatrix):
        return m
    return validate_tail_candidate(m)


def hadamard(a, b) -> TailMatrix:
    """Entrywise product of two tail matrices."""
    x, y = _pair(_tail(a), _tail(b))
    return TailMatrix(x * y)


def convex_mix(a, b, t) -> TailMatrix:
    """Return ``t * a + (1 - t) * b``."""
    if not 0 <= t <= 1:
        raise BadWeight(f"mixing weight must lie in [0, 1], got {t}")
    x, y = _pair(_tail(a), _tail(b))
    if _is_exact(x):
        t = Fraction(t)
    return validate_tail_candidate(t * x + (1 - t) * y)


class BoundViolation(NamedTuple):
    i: int
    j: int
    value: float
    lower: float
    upper: float


def frechet_bernoulli_bounds_check(b, tol: float = SYMMETRY_TOL) -> list[BoundViolation]:
    """Check ``max(b_ii + b_jj - 1, 0) <= b_ij <= min(b_ii, b_jj)`` for all i < j.

    Both ``b_ij`` and ``b_ji`` are checked; a pair is reported once per
    violating entry.  An empty list means the necessary condition for
    Bernoulli compatibility holds.
    """
    arr = np.asarray(_coerce(b), dtype=float)
    d = arr.shape[0]
    out = []
    for i in range(d):
        for j in range(i + 1, d):
            lo = max(arr[i, i] + arr[j, j] - 1.0, 0.0)
            hi = min(arr[i, i], arr[j, j])
            for r, c in ((i, j), (j, i)):
                v = arr[r, c]
                if v < lo - tol or v > hi + tol:
                    out.append(BoundViolation(r, c, float(v), lo, hi))
                if arr[i, j] == arr[j, i]:
                    break
    return out


def psd_necessary_check(m, tol: float = PSD_TOL) -> bool:
    """Smallest eigenvalue >= -tol.

    False proves the matrix is not a tail-dependence matrix; True is only a
    necessary condition.
    """
    arr = np.asarray(_coerce(m), dtype=float)
    return bool(np.linalg.eigvalsh((arr + arr.T) / 2).min() >= -tol)


def _build(d: int, alpha, fn: Callable[[int, int], object]) -> np.ndarray:
    if d < 1:
        raise BadParam("d must be positive")
    exact = isinstance(alpha, Rational)
    arr = np.empty((d, d), dtype=object if exact else float)
    one = Fraction(1) if exact else 1.0
    for i in range(d):
        for j in range(d):
            arr[i, j] = one if i == j else fn(i, j)
    return arr


def _check_alpha(alpha, hi=1):
    if not 0 <= alpha <= hi:
        raise BadParam(f"alpha must lie in [0, {hi}], got {alpha}")


def equicorr_matrix(d: int, alpha) -> TailMatrix:
    """Unit diagonal, every off-diagonal entry equal to `alpha`.

    Pass a :class:`~fractions.Fraction` (or int) `alpha` to get an exact matrix.
    """
    _check_alpha(alpha)
    return TailMatrix(_build(d, alpha, lambda i, j: alpha))


def ar1_matrix(d: int, alpha) -> TailMatrix:
    """``alpha ** |i - j|``."""
    _check_alpha(alpha)
    return TailMatrix(_build(d, alpha, lambda i, j: alpha ** abs(i - j)))


def ma1_matrix(d: int, alpha) -> TailMatrix:
    """Unit diagonal, `alpha` on the first off-diagonals, zero elsewhere."""
    _check_alpha(alpha, Fraction(1, 2))
    zero = alpha * 0
    return TailMatrix(_build(d, alpha, lambda i, j: alpha if abs(i - j) == 1 else zero))


def gamma_matrix(d: int, alpha) -> TailMatrix:
    """Identity except the last row and column, whose off-diagonal entries are `alpha`."""
    _check_alpha(alpha)
    zero = alpha * 0
    return TailMatrix(_build(d, alpha, lambda i, j: alpha if d - 1 in (i, j) else zero))


def bits_of(index: int, d: int) -> tuple[int, ...]:
    """Binary vector of length `d` whose component i is bit i of `index`."""
    return tuple((index >> i) & 1 for i in range(d))
