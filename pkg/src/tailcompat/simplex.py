"""Phase-1 revised simplex for the cone-membership feasibility problem.

Find ``a_p >= 0`` (p ranging over nonzero binary vectors of length d) with

    sum_p a_p p_i p_j = target[i, j]    for all i <= j.

Columns are indexed by the integer value of p, so column order is the
enumeration order of {0,1}^d minus the zero vector.  One artificial variable
per row starts basic; the phase-1 objective is their sum.  Entering and
leaving variables follow Bland's rule.  Two arithmetic back ends share the
pivoting logic: float64 with an explicit basis inverse (refactorized
periodically), and exact :class:`fractions.Fraction` arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels

__all__ = ["PhaseOneResult", "phase_one_float", "phase_one_exact", "row_pairs"]


def row_pairs(d: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(d) for j in range(i, d)]


@dataclass
class PhaseOneResult:
    objective: float | Fraction
    weights: dict[int, float | Fraction]  # column index -> value, basic real columns only
    iterations: int
    pivot_min: float  # smallest |pivot| met; tiny values flag ill-conditioning


def _column(p: int, pairs) -> np.ndarray:
    return np.array([((p >> i) & 1) & ((p >> j) & 1) for i, j in pairs], dtype=float)


def phase_one_float(
    target: np.ndarray,
    feas_tol: float = 1e-9,
    price_tol: float = 1e-11,
    pivot_tol: float = 1e-11,
    refactor_every: int = 50,
    max_iter: int | None = None,
) -> PhaseOneResult:
    d = target.shape[0]
    pairs = row_pairs(d)
    r = len(pairs)
    ncols = 1 << d
    b = np.array([target[i, j] for i, j in pairs], dtype=float)
    basis = [ncols + k for k in range(r)]  # artificial k has id ncols + k
    binv = np.eye(r)
    xb = b.copy()
    iu = np.triu_indices(d)
    order = {pair: k for k, pair in enumerate(pairs)}
    tri_pos = np.array([order[(i, j)] for i, j in zip(*iu)])
    max_iter = max_iter or 50 * (r + ncols)
    pivot_min = np.inf

    it = 0
    for it in range(1, max_iter + 1):
        cb = np.array([1.0 if v >= ncols else 0.0 for v in basis])
        if cb @ xb <= feas_tol:
            break
        y = cb @ binv
        ymat = np.zeros((d, d))
        ymat[iu] = y[tri_pos]
        enter = kernels.first_entering_column(np.ascontiguousarray(ymat), d, price_tol, 1)
        if enter < 0:
            break
        w = binv @ _column(enter, pairs)
        rows = np.flatnonzero(w > pivot_tol)
        if rows.size == 0:  # unbounded direction; impossible with a bounded phase-1 objective
            break
        ratios = xb[rows] / w[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        leave = min(ties, key=lambda k: basis[k])
        piv = w[leave]
        pivot_min = min(pivot_min, abs(piv))
        binv[leave] /= piv
        xb[leave] /= piv
        others = np.arange(r) != leave
        binv[others] -= np.outer(w[others], binv[leave])
        xb[others] -= w[others] * xb[leave]
        xb[np.abs(xb) < 1e-15] = 0.0
        basis[leave] = enter
        if it % refactor_every == 0:
            binv, xb = _refactor(basis, pairs, ncols, b)
    binv, xb = _refactor(basis, pairs, ncols, b)
    cb = np.array([1.0 if v >= ncols else 0.0 for v in basis])
    weights = {v: float(x) for v, x in zip(basis, xb) if v < ncols}
    return PhaseOneResult(float(cb @ np.maximum(xb, 0.0)), weights, it, float(pivot_min))


def _refactor(basis, pairs, ncols, b):
    r = len(pairs)
    bmat = np.zeros((r, r))
    for k, v in enumerate(basis):
        if v >= ncols:
            bmat[v - ncols, k] = 1.0
        else:
            bmat[:, k] = _column(v, pairs)
    binv = np.linalg.inv(bmat)
    return binv, binv @ b


def phase_one_exact(target, max_iter: int | None = None) -> PhaseOneResult:
    """Same pivoting as :func:`phase_one_float` in rational arithmetic."""
    d = len(target)
    pairs = row_pairs(d)
    r = len(pairs)
    ncols = 1 << d
    b = [Fraction(target[i][j]) for i, j in pairs]
    col_rows = [
        [k for k, (i, j) in enumerate(pairs) if (p >> i) & 1 and (p >> j) & 1] for p in range(ncols)
    ]
    basis = [ncols + k for k in range(r)]
    zero, one = Fraction(0), Fraction(1)
    binv = [[one if i == j else zero for j in range(r)] for i in range(r)]
    xb = list(b)
    max_iter = max_iter or 50 * (r + ncols)

    it = 0
    for it in range(1, max_iter + 1):
        art = [k for k, v in enumerate(basis) if v >= ncols]
        if sum((xb[k] for k in art), zero) == 0:
            break
        y = [sum((binv[k][c] for k in art), zero) for c in range(r)]
        enter = -1
        for p in range(1, ncols):
            if sum((y[k] for k in col_rows[p]), zero) > 0:
                enter = p
                break
        if enter < 0:
            break
        rows_p = col_rows[enter]
        w = [sum((binv[i][k] for k in rows_p), zero) for i in range(r)]
        best, leave = None, -1
        for i in range(r):
            if w[i] > 0:
                ratio = xb[i] / w[i]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave < 0:
            break
        piv = w[leave]
        prow = [v / piv for v in binv[leave]]
        binv[leave] = prow
        xb[leave] = xb[leave] / piv
        for i in range(r):
            if i != leave and w[i] != 0:
                f = w[i]
                row = binv[i]
                binv[i] = [a - f * c for a, c in zip(row, prow)]
                xb[i] -= f * xb[leave]
        basis[leave] = enter
    objective = sum((x for v, x in zip(basis, xb) if v >= ncols), zero)
    weights = {v: x for v, x in zip(basis, xb) if v < ncols}
    return PhaseOneResult(objective, weights, it, 1.0)
