"""Membership in T_d via linear feasibility over the cone of binary rank-one matrices.

A unit-diagonal symmetric matrix is a tail-dependence matrix exactly when it
is a nonnegative combination of matrices ``p p^T`` with ``p`` binary.
:func:`membership` decides this with a phase-1 simplex; diagonally dominant
matrices get a closed-form decomposition through :func:`dd_decompose`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bernoulli import BernoulliVectorDistribution
from .errors import BadDiagonal, BadWeight, DimMismatch, DimTooLarge, NotDiagonallyDominant
from .matrix import MAX_DIM, SYMMETRY_TOL, TailMatrix, _coerce, bits_of, validate_tail_candidate
from .simplex import phase_one_exact, phase_one_float

EXACT_MAX_DIM = 10
FEAS_TOL = 1e-9
INCONCLUSIVE_TOL = 1e-6
RESIDUAL_TOL = 1e-8

__all__ = [
    "Status",
    "ConeDecomposition",
    "MembershipVerdict",
    "membership",
    "dd_check",
    "dd_decompose",
    "decomposition_to_bernoulli",
    "verify_decomposition",
]


class Status(str, enum.Enum):
    COMPATIBLE = "Compatible"
    INCOMPATIBLE = "Incompatible"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ConeDecomposition:
    """Nonnegative weights on binary vectors, standing for sum_k a_k p_k p_k^T."""

    dim: int
    terms: tuple[tuple[tuple[int, ...], float | Fraction], ...]

    def __post_init__(self):
        terms = tuple((tuple(int(b) for b in bits), w) for bits, w in self.terms)
        for bits, w in terms:
            if len(bits) != self.dim or any(b not in (0, 1) for b in bits):
                raise DimMismatch(f"term {bits} is not a binary vector of length {self.dim}")
            if w < 0:
                raise BadWeight(f"negative weight {w} on {bits}")
        object.__setattr__(self, "terms", terms)

    @property
    def exact(self) -> bool:
        return all(isinstance(w, (int, Fraction)) for _, w in self.terms)

    def total_weight(self):
        return sum((w for _, w in self.terms), Fraction(0) if self.exact else 0.0)

    def matrix(self) -> np.ndarray:
        """Reconstruct sum a p p^T (an object array of Fractions when all weights are exact)."""
        if self.exact:
            out = np.full((self.dim, self.dim), Fraction(0), dtype=object)
            for bits, w in self.terms:
                p = np.array(bits, dtype=object)
                out = out + Fraction(w) * np.outer(p, p)
            return out
        out = np.zeros((self.dim, self.dim))
        for bits, w in self.terms:
            p = np.array(bits, dtype=float)
            out += float(w) * np.outer(p, p)
        return out

    def to_list(self) -> list[dict]:
        return [{"bits": list(bits), "weight": float(w)} for bits, w in self.terms]


@dataclass
class MembershipVerdict:
    status: Status
    decomposition: ConeDecomposition | None = None
    certificate_note: str = ""
    residual: float = float("nan")
    objective: float = float("nan")
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "status": str(self.status),
            "residual": None if np.isnan(self.residual) else float(self.residual),
            "decomposition": self.decomposition.to_list() if self.decomposition else [],
            "certificate_note": self.certificate_note,
            "objective": None if np.isnan(self.objective) else float(self.objective),
        }
        out.update(self.extras)
        return out


def _as_tail(lam) -> TailMatrix:
    return lam if isinstance(lam, TailMatrix) else validate_tail_candidate(lam)


def _exact_values(lam: TailMatrix) -> np.ndarray:
    if lam.exact:
        return lam.values
    # floats are read as the decimal they print as, e.g. 0.1 -> 1/10
    return np.vectorize(lambda v: Fraction(repr(float(v))), otypes=[object])(lam.values)


def membership(lam, exact: bool = False) -> MembershipVerdict:
    """Decide whether `lam` is a tail-dependence matrix.

    Parameters
    ----------
    lam : TailMatrix or array_like
        Candidate; raw arrays go through :func:`validate_tail_candidate`.
    exact : bool
        Use rational arithmetic (d <= 10).  Float entries are converted
        through their shortest decimal representation.

    Returns
    -------
    MembershipVerdict
        Compatible verdicts carry a decomposition with residual <= 1e-8.
        The float path reports Inconclusive when the phase-1 optimum lands
        in (1e-9, 1e-6) or the decomposition fails to reconstruct.
    """
    lam = _as_tail(lam)
    d = lam.dim
    if exact:
        if d > EXACT_MAX_DIM:
            raise DimTooLarge(f"exact path supports d <= {EXACT_MAX_DIM}, got {d}")
        target = _exact_values(lam)
        res = phase_one_exact(target.tolist())
        if res.objective == 0:
            dec = _decomposition(d, res.weights)
            resid = verify_decomposition(dec, target)
            return MembershipVerdict(
                Status.COMPATIBLE, dec, f"exact phase-1 optimum 0 after {res.iterations} pivots",
                float(resid), 0.0,
            )
        return MembershipVerdict(
            Status.INCOMPATIBLE, None,
            f"exact phase-1 optimum {res.objective} > 0 after {res.iterations} pivots",
            float("nan"), float(res.objective),
        )

    if d > MAX_DIM:
        raise DimTooLarge(f"float path supports d <= {MAX_DIM}, got {d}")
    target = lam.to_float()
    res = phase_one_float(target, feas_tol=FEAS_TOL)
    note = f"phase-1 optimum {res.objective:.3e} after {res.iterations} pivots"
    if res.objective >= INCONCLUSIVE_TOL:
        return MembershipVerdict(Status.INCOMPATIBLE, None, note, float("nan"), res.objective)
    if res.objective > FEAS_TOL:
        return MembershipVerdict(
            Status.INCONCLUSIVE, None, note + "; objective in the borderline band", float("nan"), res.objective
        )
    dec = _decomposition(d, {k: max(w, 0.0) for k, w in res.weights.items()})
    resid = verify_decomposition(dec, target)
    if resid > RESIDUAL_TOL:
        return MembershipVerdict(
            Status.INCONCLUSIVE, dec, note + f"; reconstruction residual {resid:.3e} too large",
            resid, res.objective,
        )
    return MembershipVerdict(Status.COMPATIBLE, dec, note, resid, res.objective)


def _decomposition(d: int, weights: dict) -> ConeDecomposition:
    terms = [(bits_of(k, d), w) for k, w in sorted(weights.items()) if w > 0]
    return ConeDecomposition(d, tuple(terms))


def dd_check(lam, tol: float = SYMMETRY_TOL) -> bool:
    """True iff every row has off-diagonal sum <= 1 (sufficient for membership)."""
    arr = np.asarray(_coerce(_as_tail(lam)), dtype=float)
    off = arr.sum(axis=1) - np.diag(arr)
    return bool(np.all(off <= 1 + tol))


def dd_decompose(dmat, tol: float = SYMMETRY_TOL) -> ConeDecomposition:
    """Closed-form cone decomposition of a nonnegative diagonally dominant matrix.

    Each unordered pair i < j gets weight ``d_ij`` on the vector with ones at
    i and j, and each singleton e_i gets the slack ``d_ii - sum_{j != i} d_ij``.
    Exact (Fraction) input gives an exact decomposition.
    """
    arr = _coerce(dmat)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {arr.shape}")
    d = arr.shape[0]
    if np.any(arr < 0):
        raise NotDiagonallyDominant("entries must be nonnegative")
    if np.any(abs(arr - arr.T) > tol):
        raise NotDiagonallyDominant("matrix must be symmetric")
    exact = arr.dtype == object
    zero = Fraction(0) if exact else 0.0
    terms = []
    for i in range(d):
        for j in range(i + 1, d):
            bits = tuple(1 if k in (i, j) else 0 for k in range(d))
            terms.append((bits, arr[i, j]))
    for i in range(d):
        slack = arr[i, i] - (sum(arr[i, j] for j in range(d) if j != i) if d > 1 else zero)
        if slack < -tol:
            raise NotDiagonallyDominant(f"row {i}: off-diagonal sum exceeds the diagonal by {float(-slack):.3g}")
        bits = tuple(1 if k == i else 0 for k in range(d))
        terms.append((bits, max(slack, zero)))
    return ConeDecomposition(d, tuple(terms))


def decomposition_to_bernoulli(c: ConeDecomposition, tol: float = 1e-9):
    """Turn a unit-diagonal cone decomposition into (X, p) with E[XX^T] / p equal to it.

    With s the total weight, X puts probability a_k / s on p_k and
    ``p = 1 / s``; every margin E[X_i] then equals p.

    Returns
    -------
    (BernoulliVectorDistribution, float)
    """
    rec = np.asarray(c.matrix(), dtype=float)
    if np.any(np.abs(np.diag(rec) - 1.0) > tol):
        raise BadDiagonal("decomposition must reconstruct a unit diagonal")
    mass: dict[tuple[int, ...], float | Fraction] = {}
    for bits, w in c.terms:
        if w > 0:
            mass[bits] = mass.get(bits, 0) + w
    s = sum(mass.values())
    bits = np.array(list(mass.keys()), dtype=np.uint8).reshape(len(mass), c.dim)
    probs = np.array([float(Fraction(w) / Fraction(s)) if c.exact else w / s for w in mass.values()])
    probs = probs / probs.sum()
    return BernoulliVectorDistribution(bits, probs), float(1 / Fraction(s)) if c.exact else 1.0 / s


def verify_decomposition(c: ConeDecomposition, target):
    """Max-abs entrywise gap between the reconstruction and `target`.

    Exact (Fraction) when both sides are exact, float otherwise.
    """
    tgt = _coerce(target)
    if tgt.shape != (c.dim, c.dim):
        raise DimMismatch(f"decomposition has d={c.dim}, target shape {tgt.shape}")
    rec = c.matrix()
    if c.exact and tgt.dtype == object:
        return max((abs(a - b) for a, b in zip(rec.ravel(), tgt.ravel())), default=Fraction(0))
    return float(np.max(np.abs(np.asarray(rec, dtype=float) - np.asarray(tgt, dtype=float))))
