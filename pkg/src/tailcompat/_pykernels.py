"""Pure numpy implementations of the hot kernels.

Each function has the same signature and results as its counterpart in
``_ckernels``.
"""
import numpy as np

_CHUNK = 1 << 14


def _bit_matrix(start: int, stop: int, d: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    return ((idx[:, None] >> np.arange(d)) & 1).astype(float)


def first_entering_column(ymat, d: int, tol: float, start: int = 1) -> int:
    """Smallest index p >= start with sum_{i<=j, p_i=p_j=1} ymat[i, j] > tol, else -1."""
    y = np.triu(np.asarray(ymat, dtype=float))
    quad = (y + y.T) / 2
    np.fill_diagonal(quad, np.diag(y))
    stop = 1 << d
    for lo in range(start, stop, _CHUNK):
        hi = min(lo + _CHUNK, stop)
        bits = _bit_matrix(lo, hi, d)
        s = np.einsum("ni,ij,nj->n", bits, quad, bits)
        hits = np.flatnonzero(s > tol)
        if hits.size:
            return lo + int(hits[0])
    return -1


def coexceedance_counts(ranks, k: int) -> np.ndarray:
    """counts[i, j] = #{t : ranks[t, i] <= k and ranks[t, j] <= k}."""
    mask = np.asarray(ranks) <= k
    rows = mask[mask.any(axis=1)].astype(np.int64)
    return rows.T @ rows
