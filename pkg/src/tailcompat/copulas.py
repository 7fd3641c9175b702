"""Base copulas and the composite constructions that realize tail-dependence matrices.

Every model knows its dimension, how to draw samples from a
:class:`numpy.random.Generator`, its analytic (lower) tail-dependence matrix
and, where one exists, its distribution function.  Composite models:

``SModel``
    Y = X p U + (1 - X)(p + (1 - p) V) for a Bernoulli vector X with equal
    margins p and scalar uniforms U, V.
``StochRep``
    Y = X U + Z * V with X an exclusive-row binary matrix, U ~ C^U,
    V ~ C^V and Z_i = 1 - sum_k X_ik.
``LiebscherProduct``
    Componentwise (max_l U_li)^k over k independent factor draws; its
    distribution function is prod_l C_l(u^(1/k)).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .bernoulli import BernoulliVectorDistribution, ExclusiveAssignmentDistribution, moment_matrix, substochastic_x
from .errors import BadModel, BadParam, BadPoint, DimMismatch, UnsupportedFactor
from .matrix import TailMatrix, hadamard, lift_diag, validate_tail_candidate

SAMPLE_CHUNK = 1 << 16

__all__ = [
    "CopulaModel",
    "Independence",
    "Comonotone",
    "Clayton",
    "SurvivalMarshallOlkin",
    "Gaussian",
    "SModel",
    "StochRep",
    "LiebscherProduct",
    "SampleBatch",
    "sample",
    "eval_smodel_copula",
    "eval_stochrep_copula",
    "tail_matrix_of",
    "substochastic_tail_matrix",
    "substochastic_model",
    "gaussian_rho_from_kendall",
    "bivariate_normal_cdf",
    "model_to_dict",
    "model_from_dict",
]


class CopulaModel:
    """Common interface of all copula models."""

    family: str = ""

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n x dim array of draws."""
        raise NotImplementedError

    def cdf(self, u) -> np.ndarray:
        """Copula value at u, shape (..., dim) -> (...)."""
        raise UnsupportedFactor(f"{self.family} has no closed-form evaluator")

    def tail_matrix(self) -> TailMatrix:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def _points(u, d: int) -> np.ndarray:
    arr = np.asarray(u, dtype=float)
    if arr.shape[-1:] != (d,):
        raise DimMismatch(f"expected points of dimension {d}, got shape {arr.shape}")
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise BadPoint("evaluation points must lie in the unit cube")
    return arr


def _check_dim(d):
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise BadModel(f"dimension must be a positive integer, got {d!r}")


def _offdiag(d: int, value: float) -> TailMatrix:
    arr = np.full((d, d), float(value))
    np.fill_diagonal(arr, 1.0)
    return TailMatrix(arr)


@dataclass(frozen=True)
class Independence(CopulaModel):
    d: int
    family = "independence"

    def __post_init__(self):
        _check_dim(self.d)

    @property
    def dim(self):
        return self.d

    def draw(self, rng, n):
        return rng.random((n, self.d))

    def cdf(self, u):
        return _points(u, self.d).prod(axis=-1)

    def tail_matrix(self):
        return _offdiag(self.d, 0.0)

    def to_dict(self):
        return {"family": self.family, "d": self.d}


@dataclass(frozen=True)
class Comonotone(CopulaModel):
    d: int
    family = "comonotone"

    def __post_init__(self):
        _check_dim(self.d)

    @property
    def dim(self):
        return self.d

    def draw(self, rng, n):
        return np.repeat(rng.random((n, 1)), self.d, axis=1)

    def cdf(self, u):
        return _points(u, self.d).min(axis=-1)

    def tail_matrix(self):
        return _offdiag(self.d, 1.0)

    def to_dict(self):
        return {"family": self.family, "d": self.d}


@dataclass(frozen=True)
class Clayton(CopulaModel):
    """Clayton copula, sampled through its gamma frailty representation."""

    d: int
    theta: float
    family = "clayton"

    def __post_init__(self):
        _check_dim(self.d)
        if not (self.theta > 0 and math.isfinite(self.theta)):
            raise BadModel(f"Clayton requires theta > 0, got {self.theta}")

    @property
    def dim(self):
        return self.d

    def draw(self, rng, n):
        w = rng.gamma(1.0 / self.theta, 1.0, size=(n, 1))
        e = rng.standard_exponential((n, self.d))
        return (1.0 + e / w) ** (-1.0 / self.theta)

    def cdf(self, u):
        u = _points(u, self.d)
        out = np.zeros(u.shape[:-1])
        pos = np.all(u > 0, axis=-1)
        s = np.sum(u[pos] ** -self.theta, axis=-1) - self.d + 1.0
        out[pos] = s ** (-1.0 / self.theta)
        return out

    def tail_matrix(self):
        return _offdiag(self.d, 2.0 ** (-1.0 / self.theta))

    def to_dict(self):
        return {"family": self.family, "d": self.d, "theta": self.theta}


def _root(v: np.ndarray, a: float) -> np.ndarray:
    # v ** (1/a), with the a = 0 limit 0 for v < 1
    return np.zeros_like(v) if a == 0 else v ** (1.0 / a)


@dataclass(frozen=True)
class SurvivalMarshallOlkin(CopulaModel):
    """Survival copula of the bivariate Marshall-Olkin copula.

    ``C_MO(a, b) = min(a^(1 - alpha1) b, a b^(1 - alpha2))`` has upper tail
    coefficient min(alpha1, alpha2); reflecting both coordinates moves that
    dependence to the lower-left corner.  Draws use three independent
    uniforms: ``U_i = max(V_i^(1/(1-alpha_i)), V_3^(1/alpha_i))`` has the MO
    copula, and the model returns ``1 - U``.
    """

    alpha1: float
    alpha2: float
    family = "survival_mo"

    def __post_init__(self):
        for a in (self.alpha1, self.alpha2):
            if not 0 <= a <= 1:
                raise BadModel(f"Marshall-Olkin parameters must lie in [0, 1], got {a}")

    @property
    def dim(self):
        return 2

    def draw(self, rng, n):
        v = rng.random((n, 3))
        u1 = np.maximum(_root(v[:, 0], 1.0 - self.alpha1), _root(v[:, 2], self.alpha1))
        u2 = np.maximum(_root(v[:, 1], 1.0 - self.alpha2), _root(v[:, 2], self.alpha2))
        return 1.0 - np.column_stack([u1, u2])

    def _mo(self, a, b):
        return np.minimum(a ** (1.0 - self.alpha1) * b, a * b ** (1.0 - self.alpha2))

    def cdf(self, u):
        u = _points(u, 2)
        u1, u2 = u[..., 0], u[..., 1]
        return np.clip(u1 + u2 - 1.0 + self._mo(1.0 - u1, 1.0 - u2), 0.0, 1.0)

    def tail_matrix(self):
        return _offdiag(2, min(self.alpha1, self.alpha2))

    def to_dict(self):
        return {"family": self.family, "alpha1": self.alpha1, "alpha2": self.alpha2}


def gaussian_rho_from_kendall(tau: float) -> float:
    """Correlation of the Gaussian copula with Kendall's tau `tau`."""
    return math.sin(math.pi * tau / 2)


def _owen_term(x, y, rho, s):
    # T(x, (y - rho x) / (x s)), taking x = 0 as the limit x -> 0+
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (y - rho * x) / (x * s)
        general = special.owens_t(x, a)
    at_zero = np.where(y == 0, np.arctan((1 - rho) / s) / (2 * np.pi), np.sign(y) / 4)
    return np.where(x == 0, at_zero, general)


def bivariate_normal_cdf(h, k, rho: float) -> np.ndarray:
    """P(Z1 <= h, Z2 <= k) for standard normals with correlation |rho| < 1.

    Owen's T function representation; accurate to double precision.
    """
    h, k = np.broadcast_arrays(np.asarray(h, dtype=float), np.asarray(k, dtype=float))
    s = math.sqrt(1.0 - rho * rho)
    hf = np.where(np.isfinite(h), h, 0.0)
    kf = np.where(np.isfinite(k), k, 0.0)
    beta = np.where((hf < 0) != (kf < 0), 0.5, 0.0)
    val = 0.5 * (special.ndtr(hf) + special.ndtr(kf)) - _owen_term(hf, kf, rho, s) - _owen_term(kf, hf, rho, s) - beta
    val = np.where(np.isposinf(h), special.ndtr(kf), val)
    val = np.where(np.isposinf(k), special.ndtr(np.where(np.isposinf(h), np.inf, hf)), val)
    val = np.where(np.isneginf(h) | np.isneginf(k), 0.0, val)
    return np.clip(val, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class Gaussian(CopulaModel):
    """Gaussian copula with a positive definite correlation matrix."""

    corr: np.ndarray
    family = "gaussian"
    _chol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        c = np.array(self.corr, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] < 1:
            raise BadModel("correlation must be a square matrix")
        if not np.allclose(c, c.T, atol=1e-12) or not np.allclose(np.diag(c), 1.0, atol=1e-12):
            raise BadModel("correlation must be symmetric with unit diagonal")
        try:
            chol = np.linalg.cholesky(c)
        except np.linalg.LinAlgError:
            raise BadModel("correlation must be positive definite (|rho| < 1)") from None
        c.setflags(write=False)
        object.__setattr__(self, "corr", c)
        object.__setattr__(self, "_chol", chol)

    @classmethod
    def equicorrelated(cls, d: int, rho: float) -> "Gaussian":
        c = np.full((d, d), float(rho))
        np.fill_diagonal(c, 1.0)
        return cls(c)

    @property
    def dim(self):
        return self.corr.shape[0]

    def draw(self, rng, n):
        z = rng.standard_normal((n, self.dim)) @ self._chol.T
        return special.ndtr(z)

    def cdf(self, u):
        """Closed form while at most two coordinates of each point are below 1."""
        u = _points(u, self.dim)
        flat = u.reshape(-1, self.dim)
        out = np.empty(flat.shape[0])
        for t, pt in enumerate(flat):
            free = np.flatnonzero(pt < 1)
            if free.size == 0:
                out[t] = 1.0
            elif free.size == 1:
                out[t] = pt[free[0]]
            elif free.size == 2:
                i, j = free
                h, k = special.ndtri(pt[[i, j]])
                out[t] = bivariate_normal_cdf(h, k, self.corr[i, j])
            else:
                raise UnsupportedFactor("Gaussian copula is only evaluated in closed form for d <= 2")
        return out.reshape(u.shape[:-1])

    def tail_matrix(self):
        return _offdiag(self.dim, 0.0)

    def to_dict(self):
        return {"family": self.family, "corr": self.corr.tolist()}


@dataclass(frozen=True, eq=False)
class SModel(CopulaModel):
    """Y = X p U + (1 - X)(p + (1 - p) V); tail matrix E[XX^T] / p."""

    x: BernoulliVectorDistribution
    p: float
    family = "smodel"

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise BadModel(f"p must lie in (0, 1], got {self.p}")
        margins = self.x.mean()
        if np.any(np.abs(margins - self.p) > 1e-12):
            raise BadModel(f"all margins E[X_i] must equal p={self.p}; got {margins.tolist()}")

    @property
    def dim(self):
        return self.x.dim

    def draw(self, rng, n):
        xs = self.x.bits[self.x.sample_indices(rng, n)].astype(float)
        u = rng.random((n, 1))
        v = rng.random((n, 1))
        return xs * self.p * u + (1.0 - xs) * (self.p + (1.0 - self.p) * v)

    def cdf(self, u):
        return eval_smodel_copula(self.x, self.p, u)

    def tail_matrix(self):
        return validate_tail_candidate(lift_diag(np.clip(moment_matrix(self.x).values / self.p, 0.0, 1.0)))

    def to_dict(self):
        return {"family": self.family, "p": self.p, "x": self.x.to_dict()}


_TAIL_INDEPENDENT = (Independence, Gaussian)


@dataclass(frozen=True, eq=False)
class StochRep(CopulaModel):
    """Y = X U + Z * V with X exclusive-row binary d x m, U ~ cu (dim m), V ~ cv (dim d).

    `cv` must have tail-dependence matrix I_d; this is enforced by allowing
    only the independence and Gaussian families.
    """

    x: ExclusiveAssignmentDistribution
    cu: CopulaModel
    cv: CopulaModel
    family = "stochrep"

    def __post_init__(self):
        if self.cu.dim != self.x.cols:
            raise BadModel(f"cu has dimension {self.cu.dim}, X has {self.x.cols} columns")
        if self.cv.dim != self.x.rows:
            raise BadModel(f"cv has dimension {self.cv.dim}, X has {self.x.rows} rows")
        if not isinstance(self.cv, _TAIL_INDEPENDENT):
            raise BadModel("cv must be tail independent (independence or Gaussian family)")

    @property
    def dim(self):
        return self.x.rows

    def draw(self, rng, n):
        a = self.x.mats[self.x.sample_indices(rng, n)].astype(float)
        uu = self.cu.draw(rng, n)
        vv = self.cv.draw(rng, n)
        z = 1.0 - a.sum(axis=2)
        return np.einsum("ndm,nm->nd", a, uu) + z * vv

    def cdf(self, u):
        return eval_stochrep_copula(self, u)

    def tail_matrix(self):
        lam_u = self.cu.tail_matrix().to_float()
        return validate_tail_candidate(lift_diag(np.clip(self.x.quadratic_moment(lam_u), 0.0, 1.0)))

    def to_dict(self):
        return {"family": self.family, "x": self.x.to_dict(), "cu": self.cu.to_dict(), "cv": self.cv.to_dict()}


@dataclass(frozen=True, eq=False)
class LiebscherProduct(CopulaModel):
    """C(u) = prod_l C_l(u^(1/k)); tail matrix is the Hadamard product of the factors'."""

    factors: tuple
    family = "liebscher"

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise BadModel("at least one factor is required")
        if len({f.dim for f in factors}) != 1:
            raise BadModel("all factors must share one dimension")
        object.__setattr__(self, "factors", factors)

    @property
    def dim(self):
        return self.factors[0].dim

    def draw(self, rng, n):
        top = self.factors[0].draw(rng, n)
        for f in self.factors[1:]:
            np.maximum(top, f.draw(rng, n), out=top)
        return top ** len(self.factors)

    def cdf(self, u):
        g = _points(u, self.dim) ** (1.0 / len(self.factors))
        out = np.ones(g.shape[:-1])
        for f in self.factors:
            out = out * f.cdf(g)
        return out

    def tail_matrix(self):
        out = self.factors[0].tail_matrix()
        for f in self.factors[1:]:
            out = hadamard(out, f.tail_matrix())
        return out

    def to_dict(self):
        return {"family": self.family, "factors": [f.to_dict() for f in self.factors]}


def eval_smodel_copula(x: BernoulliVectorDistribution, p: float, u) -> np.ndarray:
    """Copula of Y = X p U + (1 - X)(p + (1 - p) V) at u.

    Sums ``min(m1 / p, 1) * max((m0 - p) / (1 - p), 0) * P(X = i)`` over the
    support, where m1 (m0) is the smallest u_r with i_r = 1 (i_r = 0) and an
    empty minimum is 1.  Atoms without zero components get second factor 1,
    which also covers p = 1.
    """
    if not 0 < p <= 1:
        raise BadParam(f"p must lie in (0, 1], got {p}")
    u = _points(u, x.dim)
    bits = x.bits.astype(bool)
    pts = u[..., None, :]  # (..., 1, d) against atoms (s, d)
    m1 = np.where(bits, pts, 1.0).min(axis=-1)
    m0 = np.where(bits, 1.0, pts).min(axis=-1)
    first = np.minimum(m1 / p, 1.0)
    has_zero = ~bits.all(axis=1)
    if p < 1:
        second = np.where(has_zero, np.maximum((m0 - p) / (1.0 - p), 0.0), 1.0)
    else:
        second = np.where(has_zero, 0.0, 1.0) * np.ones_like(m0)
    return (first * second) @ x.probs


def eval_stochrep_copula(model: StochRep, u) -> np.ndarray:
    """Copula of Y = X U + Z * V at u.

    ``sum_A C^V(u_A) C^U(u*_A) P(X = A)``: u_A replaces the coordinates of
    rows that carry a 1 by 1, and u*_A[k] is the smallest u_r over rows r
    assigned to column k (1 if none).
    """
    if not isinstance(model, StochRep):
        raise BadModel("expected a StochRep model")
    u = _points(u, model.dim)
    mats = model.x.mats.astype(bool)  # (s, d, m)
    routed = mats.any(axis=2)  # (s, d)
    pts = u[..., None, :]  # (..., 1, d)
    u_a = np.where(routed, 1.0, pts)  # (..., s, d)
    u_star = np.where(mats, u[..., None, :, None], 1.0).min(axis=-2)  # (..., s, m)
    return (model.cv.cdf(u_a) * model.cu.cdf(u_star)) @ model.x.probs


def tail_matrix_of(model: CopulaModel) -> TailMatrix:
    """Analytic lower tail-dependence matrix of `model`."""
    return model.tail_matrix()


def substochastic_tail_matrix(q, lam) -> TailMatrix:
    """lift_diag(Q Λ Q^T) for a substochastic d x m matrix Q and an m x m tail matrix Λ."""
    from .matrix import SubstochasticMatrix

    qm = q if isinstance(q, SubstochasticMatrix) else SubstochasticMatrix(q)
    lam_m = validate_tail_candidate(lam).to_float()
    if lam_m.shape[0] != qm.shape[1]:
        raise DimMismatch(f"Q has {qm.shape[1]} columns, Λ has dimension {lam_m.shape[0]}")
    prod = qm.values @ lam_m @ qm.values.T
    return validate_tail_candidate(lift_diag(np.clip((prod + prod.T) / 2, 0.0, 1.0)))


def substochastic_model(q, cu: CopulaModel, cv: CopulaModel | None = None) -> StochRep:
    """StochRep model realizing :func:`substochastic_tail_matrix` (q, tail matrix of cu)."""
    x = substochastic_x(q)
    return StochRep(x, cu, cv if cv is not None else Independence(x.rows))


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """n x d draws in [0, 1] together with the seed that produced them."""

    values: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise BadParam(f"sample batch must be a non-empty n x d array, got shape {v.shape}")
        if np.any(~np.isfinite(v)) or np.any(v < 0) or np.any(v > 1):
            raise BadParam("sample values must lie in [0, 1]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))


def sample(model: CopulaModel, n: int, seed: int, threads: int = 1, chunk_size: int = SAMPLE_CHUNK) -> SampleBatch:
    """Draw n rows from `model`.

    Rows are generated in fixed-size chunks, chunk c from its own stream
    ``SeedSequence(seed, spawn_key=(c,))``, so the output depends only on
    (model, n, seed, chunk_size) and not on `threads`.
    """
    if not isinstance(model, CopulaModel):
        raise BadModel(f"not a copula model: {model!r}")
    if int(n) < 1:
        raise BadParam(f"n must be at least 1, got {n}")
    n, seed = int(n), int(seed)
    sizes = [min(chunk_size, n - lo) for lo in range(0, n, chunk_size)]

    def run(c):
        return model.draw(_chunk_rng(seed, c), sizes[c])

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(c) for c in range(len(sizes))]
    return SampleBatch(np.clip(np.concatenate(parts), 0.0, 1.0), seed)


def model_to_dict(model: CopulaModel) -> dict:
    return model.to_dict()


def model_from_dict(data: dict) -> CopulaModel:
    """Inverse of :func:`model_to_dict`; raises BadModel on unknown families."""
    try:
        fam = data["family"]
        if fam == "independence":
            return Independence(int(data["d"]))
        if fam == "comonotone":
            return Comonotone(int(data["d"]))
        if fam == "clayton":
            return Clayton(int(data["d"]), float(data["theta"]))
        if fam == "survival_mo":
            return SurvivalMarshallOlkin(float(data["alpha1"]), float(data["alpha2"]))
        if fam == "gaussian":
            return Gaussian(np.array(data["corr"], dtype=float))
        if fam == "smodel":
            return SModel(BernoulliVectorDistribution.from_dict(data["x"]), float(data["p"]))
        if fam == "stochrep":
            return StochRep(
                ExclusiveAssignmentDistribution.from_dict(data["x"]),
                model_from_dict(data["cu"]),
                model_from_dict(data["cv"]),
            )
        if fam == "liebscher":
            return LiebscherProduct(tuple(model_from_dict(f) for f in data["factors"]))
    except (KeyError, TypeError) as exc:
        raise BadModel(f"malformed model specification: {exc}") from None
    raise BadModel(f"unknown model family {data.get('family')!r}")
