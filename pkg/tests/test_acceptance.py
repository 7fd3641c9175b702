"""Acceptance criteria, one test each, every test printing a single PASS/FAIL line.

Monte Carlo criteria use the fixed seed ``ACCEPTANCE_SEED``; tolerances are
applied exactly as stated, without widening.
"""
import time
from fractions import Fraction

import numpy as np
import pytest

from tailcompat.bernoulli import (
    BernoulliVectorDistribution,
    ar1_x,
    equicorrelation_x,
    gamma_partition_x,
    ma1_x,
    moment_matrix,
    substochastic_x,
)
from tailcompat.copulas import (
    Clayton,
    Comonotone,
    Gaussian,
    Independence,
    LiebscherProduct,
    SModel,
    StochRep,
    SurvivalMarshallOlkin,
    eval_stochrep_copula,
    sample,
    tail_matrix_of,
)
from tailcompat.estimator import default_threshold, empirical_tail_matrix
from tailcompat.matrix import (
    ar1_matrix,
    convex_mix,
    equicorr_matrix,
    frechet_bernoulli_bounds_check,
    gamma_matrix,
    hadamard,
    ma1_matrix,
    psd_necessary_check,
)
from tailcompat.solver import (
    ConeDecomposition,
    Status,
    dd_check,
    decomposition_to_bernoulli,
    membership,
    verify_decomposition,
)

from .conftest import random_compatible, random_diag_dominant

ACCEPTANCE_SEED = 12345
N_MC = 10**6
PROPERTY_INSTANCES = 200


@pytest.fixture
def report(capsys):
    def _report(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return _report


def test_criterion_1_gamma_boundary(report):
    t0 = time.perf_counter()
    wrong = []
    for d in range(3, 9):
        edge = Fraction(1, d - 1)
        if membership(gamma_matrix(d, edge), exact=True).status is not Status.COMPATIBLE:
            wrong.append(f"d={d} at 1/(d-1)")
        if membership(gamma_matrix(d, edge + Fraction(1, 1000)), exact=True).status is not Status.INCOMPATIBLE:
            wrong.append(f"d={d} at 1/(d-1)+1/1000")
    elapsed = time.perf_counter() - t0
    ok = not wrong and elapsed < 10
    report(1, ok, f"exact boundary d=3..8, {elapsed:.2f}s" + (f"; wrong: {wrong}" if wrong else ""))


def test_criterion_2_gamma_two_thirds(report):
    t0 = time.perf_counter()
    lam = gamma_matrix(3, Fraction(2, 3))
    psd = psd_necessary_check(lam)
    status = membership(lam, exact=True).status
    elapsed = time.perf_counter() - t0
    ok = psd and status is Status.INCOMPATIBLE and elapsed < 1
    report(2, ok, f"Gamma_3(2/3): psd={psd}, membership={status}, {elapsed:.3f}s")


def _enumerated_moment(x: BernoulliVectorDistribution) -> np.ndarray:
    return sum(p * np.outer(b, b) for b, p in zip(x.bits.astype(float), x.probs))


def test_criterion_3_two_decompositions(report):
    t0 = time.perf_counter()
    quarter = Fraction(1, 4)
    target = np.array([[2, 1, 1], [1, 2, 1], [1, 1, 2]], dtype=object) * quarter
    supports = [
        [(1, 1, 1), (1, 0, 0), (0, 1, 0), (0, 0, 1)],
        [(1, 1, 0), (1, 0, 1), (0, 1, 1), (0, 0, 0)],
    ]
    details, ok = [], True
    for support in supports:
        dec = ConeDecomposition(3, tuple((b, quarter) for b in support))
        resid = verify_decomposition(dec, target)
        # B has diagonal 1/2; 2B is its unit-diagonal rescaling
        unit = ConeDecomposition(3, tuple((b, 2 * quarter) for b in support))
        x, p = decomposition_to_bernoulli(unit)
        gap = np.abs(_enumerated_moment(x) - target.astype(float)).max()
        margins = np.abs(x.mean() - p).max()
        ok &= resid == 0 and gap <= 1e-12 and margins <= 1e-12
        details.append(f"residual={resid}, p={p}, |E[XX^T]-B|={gap:.1e}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 1
    report(3, ok, "; ".join(details) + f"; {elapsed:.3f}s")


def test_criterion_4_named_families(report):
    t0 = time.perf_counter()
    cases = {
        "equicorr(4,0.3)": (SModel(equicorrelation_x(4, 0.3), 0.3), equicorr_matrix(4, 0.3)),
        "ar1(4,0.6)": (SModel(ar1_x(4, 0.6), 0.6**4), ar1_matrix(4, 0.6)),
        "ma1(4,0.4)": (SModel(ma1_x(4, 0.4), 0.25), ma1_matrix(4, 0.4)),
    }
    gaps = {k: float(np.abs(tail_matrix_of(m).to_float() - want.to_float()).max()) for k, (m, want) in cases.items()}
    elapsed = time.perf_counter() - t0
    ok = all(g <= 1e-12 for g in gaps.values()) and elapsed < 1
    report(4, ok, ", ".join(f"{k}: {g:.1e}" for k, g in gaps.items()) + f"; {elapsed:.3f}s")


def test_criterion_5_monte_carlo_pipeline(report):
    t0 = time.perf_counter()
    model = StochRep(gamma_partition_x(4, 1 / 3), Independence(1), Independence(4))
    est = empirical_tail_matrix(sample(model, N_MC, ACCEPTANCE_SEED))
    assert est.threshold_k == default_threshold(N_MC) == 252
    lam = est.matrix
    last = lam[:3, 3]
    inner = lam[:3, :3][~np.eye(3, dtype=bool)]
    elapsed = time.perf_counter() - t0
    ok = bool(np.all(np.abs(last - 1 / 3) <= 0.03) and np.all(np.abs(inner) <= 0.03)) and elapsed < 60
    report(5, ok, f"(i,4)={np.round(last, 4).tolist()} vs 1/3+-0.03, "
                  f"max inner={inner.max():.4f} vs 0+-0.03, k={est.threshold_k}, {elapsed:.1f}s")


def test_criterion_6_liebscher_value(report):
    t0 = time.perf_counter()
    clayton = Clayton(2, 4.0)
    prod = LiebscherProduct((clayton, SurvivalMarshallOlkin(2**-0.75, 0.8)))
    lam = empirical_tail_matrix(sample(prod, N_MC, ACCEPTANCE_SEED)).matrix[0, 1]
    lam1 = empirical_tail_matrix(sample(clayton, N_MC, ACCEPTANCE_SEED)).matrix[0, 1]
    elapsed = time.perf_counter() - t0
    ok = abs(lam - 0.5) <= 0.03 and abs(lam1 - 0.8409) <= 0.03 and elapsed < 60
    report(6, ok, f"product {lam:.4f} vs 0.5+-0.03, Clayton {lam1:.4f} vs 0.8409+-0.03, {elapsed:.1f}s")


def _random_model(rng, d):
    kind = rng.integers(10)
    if kind == 0:
        return Independence(d)
    if kind == 1:
        return Comonotone(d)
    if kind == 2:
        return Clayton(d, float(rng.uniform(0.2, 5)))
    if kind == 3:
        return SurvivalMarshallOlkin(*rng.uniform(0, 1, 2))
    if kind == 4:
        return Gaussian.equicorrelated(d, float(rng.uniform(0, 0.9)))
    if kind == 5:
        a = float(rng.uniform(0.05, 1))
        return SModel(equicorrelation_x(d, a), a)
    if kind == 6:
        a = float(rng.uniform(0.3, 1))
        return SModel(ar1_x(min(d, 5), a), a ** min(d, 5))
    if kind == 7:
        return SModel(ma1_x(d, float(rng.uniform(0, 0.5))), 1 / d)
    if kind == 8:
        m = int(rng.integers(1, 4))
        q = rng.dirichlet(np.ones(m + 1), size=d)[:, :m]
        return StochRep(substochastic_x(q), Clayton(m, float(rng.uniform(0.5, 4))), Gaussian.equicorrelated(d, 0.3))
    return LiebscherProduct((Clayton(d, float(rng.uniform(0.5, 4))), Gaussian.equicorrelated(d, 0.5)))


def test_criterion_7_property_suites(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(ACCEPTANCE_SEED)
    failures = {"hadamard": 0, "convex": 0, "dd": 0, "frechet": 0, "margins": 0}
    for _ in range(PROPERTY_INSTANCES):
        d = int(rng.integers(2, 7))
        a, b = random_compatible(rng, d), random_compatible(rng, d)
        failures["hadamard"] += membership(hadamard(a, b)).status is not Status.COMPATIBLE
        t = float(rng.choice([0.25, 0.5, 0.75]))
        failures["convex"] += membership(convex_mix(a, b, t)).status is not Status.COMPATIBLE
        dd = random_diag_dominant(rng, d)
        failures["dd"] += not (dd_check(dd) and membership(dd).status is Status.COMPATIBLE)
        codes = rng.choice(2**d, size=int(rng.integers(1, 2**d + 1)), replace=False)
        x = BernoulliVectorDistribution.from_codes(codes, rng.dirichlet(np.ones(len(codes))), d)
        failures["frechet"] += bool(frechet_bernoulli_bounds_check(moment_matrix(x).values))
        y = sample(_random_model(rng, d), 10**5, int(rng.integers(2**32))).values
        bad = np.any(np.abs(y.mean(axis=0) - 0.5) > 0.005) or np.any(np.abs(y.var(axis=0) - 1 / 12) > 0.003)
        failures["margins"] += bool(bad)
    elapsed = time.perf_counter() - t0
    ok = not any(failures.values()) and elapsed < 300
    report(7, ok, f"{PROPERTY_INSTANCES} instances per suite, failures={failures}, {elapsed:.1f}s")


def _mixture_form(x, cu, cv, u1, u2):
    prob = {tuple(a.ravel()): p for a, p in zip(x.mats, x.probs)}

    def p_of(*mats):
        return sum(prob.get(k, 0.0) for k in mats)

    return (
        min(u1, u2) * p_of((1, 0, 1, 0), (0, 1, 0, 1))
        + cu.cdf([u1, u2]) * p_of((1, 0, 0, 1))
        + cu.cdf([u2, u1]) * p_of((0, 1, 1, 0))
        + cv.cdf([u1, u2]) * p_of((0, 0, 0, 0))
        + u1 * u2 * p_of((0, 0, 1, 0), (0, 0, 0, 1), (1, 0, 0, 0), (0, 1, 0, 0))
    )


def test_criterion_8_copula_evaluators(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(ACCEPTANCE_SEED)
    x = substochastic_x([[0.3, 0.45], [0.5, 0.25]])
    cu, cv = SurvivalMarshallOlkin(0.25, 0.75), Gaussian.equicorrelated(2, 0.4)
    model = StochRep(x, cu, cv)
    pts = rng.random((100, 2))
    mix_gap = max(abs(eval_stochrep_copula(model, u) - _mixture_form(x, cu, cv, *u)) for u in pts)

    frechet = StochRep(gamma_partition_x(2, 0.5), Independence(1), Independence(2))
    value = float(eval_stochrep_copula(frechet, [0.5, 0.5]))

    n = N_MC
    y = sample(model, n, ACCEPTANCE_SEED).values
    mc_pts = rng.uniform(0.05, 0.95, size=(20, 2))
    exact = eval_stochrep_copula(model, mc_pts)
    emp = np.array([np.mean((y[:, 0] <= a) & (y[:, 1] <= b)) for a, b in mc_pts])
    z = np.abs(emp - exact) / np.sqrt(exact * (1 - exact) / n)
    elapsed = time.perf_counter() - t0
    ok = mix_gap <= 1e-12 and abs(value - 0.375) <= 1e-15 and z.max() <= 4 and elapsed < 120
    report(8, ok, f"mixture gap {mix_gap:.1e}, C(0.5,0.5)={value}, max MC z={z.max():.2f}, {elapsed:.1f}s")
