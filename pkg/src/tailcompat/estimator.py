"""Rank-based empirical lower tail-dependence matrices.

For a threshold k, the estimate of lambda_ij is the fraction of the k
smallest observations of column i whose partner in column j is also among
the k smallest of column j.  This is a finite-u surrogate for the limit
C(u, u) / u with u = k / n; :func:`threshold_sweep` shows how the estimate
moves with k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .copulas import SampleBatch
from .errors import BadThreshold, TooFewSamples

MIN_SAMPLES = 100

__all__ = ["EmpiricalTailEstimate", "default_threshold", "ranks", "empirical_tail_matrix", "threshold_sweep"]


@dataclass(frozen=True, eq=False)
class EmpiricalTailEstimate:
    matrix: np.ndarray
    threshold_k: int
    n: int
    standard_error: np.ndarray

    @property
    def se_max(self) -> float:
        return float(self.standard_error.max())


def default_threshold(n: int) -> int:
    """ceil(n ** 0.4)."""
    return math.ceil(n ** 0.4)


def ranks(values: np.ndarray) -> np.ndarray:
    """Column-wise ranks 1..n; ties go to the earlier row."""
    values = np.asarray(values)
    order = np.argsort(values, axis=0, kind="stable")
    out = np.empty(values.shape, dtype=np.int64)
    rows = np.arange(1, values.shape[0] + 1, dtype=np.int64)
    for j in range(values.shape[1]):
        out[order[:, j], j] = rows
    return out


def _values(batch) -> np.ndarray:
    return batch.values if isinstance(batch, SampleBatch) else np.asarray(batch, dtype=float)


def _estimate(r: np.ndarray, k: int) -> EmpiricalTailEstimate:
    n = r.shape[0]
    counts = kernels.coexceedance_counts(np.ascontiguousarray(r), k)
    lam = counts / k
    np.fill_diagonal(lam, 1.0)
    se = np.sqrt(lam * (1.0 - lam) / k)
    lam.setflags(write=False)
    se.setflags(write=False)
    return EmpiricalTailEstimate(lam, k, n, se)


def _check(n: int, k: int):
    if n < MIN_SAMPLES:
        raise TooFewSamples(f"need at least {MIN_SAMPLES} samples, got {n}")
    if not (1 <= k <= n / 4):
        raise BadThreshold(f"threshold k must satisfy 1 <= k <= n/4 = {n / 4:g}, got {k}")


def empirical_tail_matrix(batch, k: int | None = None) -> EmpiricalTailEstimate:
    """Estimate the tail-dependence matrix of an n x d sample.

    Parameters
    ----------
    batch : SampleBatch or array_like
        Observations, one row per draw.  Only ranks matter.
    k : int, optional
        Threshold rank, ``1 <= k <= n/4``; defaults to ``ceil(n ** 0.4)``.

    Returns
    -------
    EmpiricalTailEstimate
        Counts divided by k, unit diagonal, with binomial standard errors
        ``sqrt(lam (1 - lam) / k)``.
    """
    v = _values(batch)
    n = v.shape[0]
    k = default_threshold(n) if k is None else int(k)
    _check(n, k)
    return _estimate(ranks(v), k)


def threshold_sweep(batch, ks) -> list[EmpiricalTailEstimate]:
    """One estimate per threshold in `ks` (ascending), sharing a single ranking pass."""
    ks = [int(k) for k in ks]
    if ks != sorted(ks):
        raise BadThreshold("thresholds must be sorted ascending")
    v = _values(batch)
    n = v.shape[0]
    for k in ks:
        _check(n, k)
    r = ranks(v)
    return [_estimate(r, k) for k in ks]
