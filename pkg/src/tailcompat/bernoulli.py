"""Finite distributions of Bernoulli vectors and exclusive-row Bernoulli matrices.

Distributions are stored as explicit supports: an array of binary atoms and
an array of probabilities.  Moments are computed exactly by summing over the
support, which keeps everything at desk scale (d <= 20).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BadParam, DimMismatch, DimTooLarge, OutOfRange
from .matrix import MAX_DIM, SquareUnitMatrix, SubstochasticMatrix

PROB_TOL = 1e-12
MAX_SUPPORT = 1 << 20
AR1_MAX_DIM = 10

__all__ = [
    "BernoulliVectorDistribution",
    "ExclusiveAssignmentDistribution",
    "MomentMatrix",
    "moment_matrix",
    "equicorrelation_x",
    "ar1_x",
    "ma1_x",
    "gamma_partition_x",
    "substochastic_x",
    "diag_embed",
]


def _normalized(probs) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise BadParam("support must be a non-empty list")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise OutOfRange("probabilities must be finite and nonnegative")
    total = p.sum()
    if abs(total - 1.0) > PROB_TOL:
        raise BadParam(f"probabilities sum to {total!r}, not 1")
    if abs(total - 1.0) <= 4 * np.finfo(float).eps * p.size:
        return p  # summation rounding only; keep the values bit-stable across round trips
    return p / total


def _binary(arr, ndim: int, what: str) -> np.ndarray:
    a = np.asarray(arr)
    if a.ndim != ndim:
        raise DimMismatch(f"{what} must be a {ndim}-d array, got shape {a.shape}")
    if not np.all((a == 0) | (a == 1)):
        raise OutOfRange(f"{what} entries must be 0 or 1")
    return a.astype(np.uint8)


def _readonly(*arrays):
    for a in arrays:
        a.setflags(write=False)


@dataclass(frozen=True, eq=False)
class BernoulliVectorDistribution:
    """Distribution of a random vector X supported on {0,1}^d.

    Parameters
    ----------
    bits : (s, d) array of 0/1
        Support atoms, pairwise distinct.
    probs : (s,) array
        Their probabilities; drift from 1 up to 1e-12 is renormalized.
    """

    bits: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        bits = _binary(self.bits, 2, "support vectors")
        probs = _normalized(self.probs)
        if bits.shape[0] != probs.shape[0]:
            raise DimMismatch("one probability per support vector required")
        if bits.shape[1] < 1 or bits.shape[1] > MAX_DIM:
            raise DimTooLarge(f"d must lie in [1, {MAX_DIM}]")
        if np.unique(bits, axis=0).shape[0] != bits.shape[0]:
            raise BadParam("support vectors must be pairwise distinct")
        bits, probs = bits.copy(), probs.copy()
        _readonly(bits, probs)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_pairs(cls, pairs) -> "BernoulliVectorDistribution":
        """Build from ``[(bits, probability), ...]``."""
        pairs = list(pairs)
        return cls(np.array([b for b, _ in pairs]), np.array([p for _, p in pairs], dtype=float))

    @classmethod
    def from_codes(cls, codes, probs, d: int, drop_zero: bool = True) -> "BernoulliVectorDistribution":
        """Aggregate probability mass on integer-coded atoms (bit i of the code is X_i)."""
        codes = np.asarray(codes, dtype=np.int64)
        uniq, inv = np.unique(codes, return_inverse=True)
        mass = np.bincount(inv.ravel(), weights=np.asarray(probs, dtype=float).ravel())
        if drop_zero:
            keep = mass > 0
            uniq, mass = uniq[keep], mass[keep]
        bits = (uniq[:, None] >> np.arange(d)) & 1
        return cls(bits, mass)

    @property
    def dim(self) -> int:
        return self.bits.shape[1]

    def __len__(self) -> int:
        return self.bits.shape[0]

    def mean(self) -> np.ndarray:
        return self.probs @ self.bits

    def sample_indices(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.choice(len(self), size=n, p=self.probs)

    def to_dict(self) -> dict:
        return {
            "d": self.dim,
            "support": [{"bits": b.tolist(), "p": float(p)} for b, p in zip(self.bits, self.probs)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BernoulliVectorDistribution":
        support = data["support"]
        bits = np.array([s["bits"] for s in support]).reshape(len(support), -1)
        if bits.shape[1] != int(data["d"]):
            raise DimMismatch(f"declared d={data['d']} but atoms have length {bits.shape[1]}")
        return cls(bits, [s["p"] for s in support])


@dataclass(frozen=True, eq=False)
class ExclusiveAssignmentDistribution:
    """Distribution of a random binary d x m matrix with at most one 1 per row."""

    mats: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        mats = _binary(self.mats, 3, "support matrices")
        probs = _normalized(self.probs)
        if mats.shape[0] != probs.shape[0]:
            raise DimMismatch("one probability per support matrix required")
        if mats.shape[1] < 1 or mats.shape[2] < 1:
            raise DimMismatch("support matrices must be non-empty")
        if mats.shape[1] > MAX_DIM:
            raise DimTooLarge(f"d must not exceed {MAX_DIM}")
        if np.any(mats.sum(axis=2) > 1):
            raise BadParam("rows of every support matrix must be mutually exclusive")
        mats, probs = mats.copy(), probs.copy()
        _readonly(mats, probs)
        object.__setattr__(self, "mats", mats)
        object.__setattr__(self, "probs", probs)

    @property
    def rows(self) -> int:
        return self.mats.shape[1]

    @property
    def cols(self) -> int:
        return self.mats.shape[2]

    def __len__(self) -> int:
        return self.mats.shape[0]

    def mean(self) -> np.ndarray:
        """E[X], a substochastic d x m matrix."""
        return np.einsum("s,sij->ij", self.probs, self.mats)

    def quadratic_moment(self, lam) -> np.ndarray:
        """E[X lam X^T] for an m x m matrix `lam`."""
        lam = np.asarray(lam, dtype=float)
        if lam.shape != (self.cols, self.cols):
            raise DimMismatch(f"expected a {self.cols}x{self.cols} matrix, got {lam.shape}")
        m = self.mats.astype(float)
        return np.einsum("s,sik,kl,sjl->ij", self.probs, m, lam, m)

    def sample_indices(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.choice(len(self), size=n, p=self.probs)

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "support": [{"mat": a.tolist(), "p": float(p)} for a, p in zip(self.mats, self.probs)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExclusiveAssignmentDistribution":
        support = data["support"]
        mats = np.array([s["mat"] for s in support])
        if mats.ndim != 3 or mats.shape[1:] != (int(data["rows"]), int(data["cols"])):
            raise DimMismatch("support matrices do not match declared rows/cols")
        return cls(mats, [s["p"] for s in support])


@dataclass(frozen=True, eq=False)
class MomentMatrix:
    """E[XX^T] together with the margins E[X_i] (its diagonal)."""

    base: SquareUnitMatrix
    margin: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.base.values

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.base.values, dtype=dtype)


def moment_matrix(x: BernoulliVectorDistribution) -> MomentMatrix:
    """E[XX^T] by summing over the support."""
    b = x.bits.astype(float)
    mom = b.T @ (x.probs[:, None] * b)
    mom = np.clip((mom + mom.T) / 2, 0.0, 1.0)
    margin = np.diag(mom).copy()
    margin.setflags(write=False)
    return MomentMatrix(SquareUnitMatrix(mom), margin)


def _check_dim(d: int, cap: int = MAX_DIM):
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise BadParam(f"d must be a positive integer, got {d!r}")
    if d > cap:
        raise DimTooLarge(f"d={d} exceeds the enumeration cap {cap}")


def _check_alpha(alpha, hi=1.0, what="alpha"):
    if not 0 <= alpha <= hi:
        raise BadParam(f"{what} must lie in [0, {hi:g}], got {alpha}")


def equicorrelation_x(d: int, alpha: float) -> BernoulliVectorDistribution:
    """Independent Bernoulli(alpha) components."""
    _check_dim(d)
    _check_alpha(alpha)
    codes = np.arange(1 << d, dtype=np.int64)
    ones = ((codes[:, None] >> np.arange(d)) & 1).sum(axis=1)
    probs = float(alpha) ** ones * (1.0 - float(alpha)) ** (d - ones)
    return BernoulliVectorDistribution.from_codes(codes, probs, d)


def ar1_x(d: int, alpha: float) -> BernoulliVectorDistribution:
    """X_i = Z_i Z_{i+1} ... Z_{i+d-1} for 2d - 1 independent Bernoulli(alpha) Z_j.

    Enumerates all 2^(2d-1) outcomes of Z, so d is capped at 10.
    """
    _check_dim(d, AR1_MAX_DIM)
    _check_alpha(alpha)
    nz = 2 * d - 1
    z = (np.arange(1 << nz, dtype=np.int64)[:, None] >> np.arange(nz)) & 1
    ones = z.sum(axis=1)
    probs = float(alpha) ** ones * (1.0 - float(alpha)) ** (nz - ones)
    window = np.lib.stride_tricks.sliding_window_view(z, d, axis=1)  # (N, d, d)
    x = window.min(axis=2)
    codes = x @ (1 << np.arange(d, dtype=np.int64))
    return BernoulliVectorDistribution.from_codes(codes, probs, d)


def ma1_x(d: int, alpha: float) -> BernoulliVectorDistribution:
    """X_i = 1{Z in [(i-1)(1-alpha), (i-1)(1-alpha) + 1]} for Z ~ U[0, d].

    The pmf is read off the interval geometry: every maximal segment of
    [0, d] on which the indicator pattern is constant is one atom with mass
    length / d.
    """
    _check_dim(d)
    if not 0 <= alpha <= 0.5:
        raise BadParam(f"ma1 requires 0 <= alpha <= 1/2, got {alpha}")
    step = 1.0 - float(alpha)
    lo = np.arange(d) * step
    hi = lo + 1.0
    cuts = np.unique(np.concatenate([[0.0, float(d)], lo, hi]))
    cuts = cuts[(cuts >= 0) & (cuts <= d)]
    cuts = cuts[np.concatenate([[True], np.diff(cuts) > 1e-12])]
    cuts[-1] = float(d)
    left, right = cuts[:-1], cuts[1:]
    mid = (left + right) / 2
    x = (mid[:, None] >= lo) & (mid[:, None] <= hi)
    codes = x.astype(np.int64) @ (1 << np.arange(d, dtype=np.int64))
    return BernoulliVectorDistribution.from_codes(codes, (right - left) / d, d)


def gamma_partition_x(d: int, alpha: float) -> ExclusiveAssignmentDistribution:
    """X = (1_{O_1}, ..., 1_{O_{d-1}}, 1) for a partition with P(O_i) = alpha, i < d.

    Returned as a d x 1 exclusive-assignment matrix with d support points,
    the last one (only X_d = 1) carrying the remainder 1 - (d - 1) alpha.
    """
    _check_dim(d)
    if d < 2:
        raise BadParam("d must be at least 2")
    if alpha < 0 or alpha * (d - 1) > 1 + PROB_TOL:
        raise BadParam(f"gamma requires 0 <= alpha <= 1/(d-1) = {1 / (d - 1):.6g}, got {alpha}")
    mats = np.zeros((d, d, 1), dtype=np.uint8)
    mats[:, d - 1, 0] = 1
    for i in range(d - 1):
        mats[i, i, 0] = 1
    probs = np.full(d, float(alpha))
    probs[-1] = max(1.0 - (d - 1) * float(alpha), 0.0)
    return ExclusiveAssignmentDistribution(mats, probs)


def substochastic_x(q) -> ExclusiveAssignmentDistribution:
    """Independent rows; row i puts its 1 in column k with probability q[i, k].

    With probability 1 - sum_k q[i, k] row i is all zeros.  Atoms of zero
    mass (remainders below 1e-12 included) are left out of the support.
    """
    q = q if isinstance(q, SubstochasticMatrix) else SubstochasticMatrix(q)
    arr = q.values
    d, m = arr.shape
    if d > MAX_DIM:
        raise DimTooLarge(f"d={d} exceeds {MAX_DIM}")
    rest = 1.0 - arr.sum(axis=1)
    rest[rest <= PROB_TOL] = 0.0
    # outcome 0: empty row; outcome k >= 1: the 1 sits in column k - 1
    row_probs = np.column_stack([rest, arr])
    choices = [np.flatnonzero(row_probs[i] > 0) for i in range(d)]
    size = int(np.prod([len(c) for c in choices], dtype=float))
    if size > MAX_SUPPORT:
        raise DimTooLarge(f"support of {size} atoms exceeds {MAX_SUPPORT}")
    mats = np.zeros((size, d, m), dtype=np.uint8)
    probs = np.ones(size)
    for s, combo in enumerate(itertools.product(*choices)):
        for i, k in enumerate(combo):
            probs[s] *= row_probs[i, k]
            if k > 0:
                mats[s, i, k - 1] = 1
    return ExclusiveAssignmentDistribution(mats, probs)


def diag_embed(w: BernoulliVectorDistribution) -> ExclusiveAssignmentDistribution:
    """Map each atom w to the diagonal matrix diag(w), keeping its probability."""
    d = w.dim
    mats = np.zeros((len(w), d, d), dtype=np.uint8)
    idx = np.arange(d)
    mats[:, idx, idx] = w.bits
    return ExclusiveAssignmentDistribution(mats, w.probs)
