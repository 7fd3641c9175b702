from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from tailcompat.errors import BadDiagonal, BadWeight, DimMismatch, DimTooLarge, NotSymmetric, OutOfRange
from tailcompat.matrix import (
    SquareUnitMatrix,
    SubstochasticMatrix,
    TailMatrix,
    ar1_matrix,
    bits_of,
    convex_mix,
    equicorr_matrix,
    frechet_bernoulli_bounds_check,
    gamma_matrix,
    hadamard,
    lift_diag,
    psd_necessary_check,
    validate_tail_candidate,
)

from .conftest import random_compatible


class TestValidate:
    def test_identity(self):
        t = validate_tail_candidate(np.eye(3))
        assert isinstance(t, TailMatrix)
        assert_array_equal(t.values, np.eye(3))

    def test_symmetric_unit_diagonal(self):
        assert_array_equal(validate_tail_candidate([[1, 0.2], [0.2, 1]]).values, [[1, 0.2], [0.2, 1]])

    def test_asymmetric(self):
        with pytest.raises(NotSymmetric):
            validate_tail_candidate([[1, 0.3], [0.2, 1]])

    def test_bad_diagonal(self):
        with pytest.raises(BadDiagonal):
            validate_tail_candidate([[0.9, 0.2], [0.2, 1]])

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            validate_tail_candidate([[1, 1.5], [1.5, 1]])
        with pytest.raises(OutOfRange):
            validate_tail_candidate([[1, -0.1], [-0.1, 1]])

    def test_not_square(self):
        with pytest.raises(DimMismatch):
            validate_tail_candidate(np.ones((2, 3)))

    def test_snaps_within_tolerance(self):
        m = np.array([[1 - 5e-13, 0.2 + 4e-13], [0.2, 1 + 3e-13]])
        t = validate_tail_candidate(m)
        assert_array_equal(np.diag(t.values), [1.0, 1.0])
        assert t.values[0, 1] == t.values[1, 0]

    def test_exact_entries_stay_exact(self):
        t = validate_tail_candidate(np.array([[1, Fraction(1, 3)], [Fraction(1, 3), 1]], dtype=object))
        assert t.exact
        assert t.values[0, 1] == Fraction(1, 3)

    def test_dimension_cap(self):
        with pytest.raises(DimTooLarge):
            SquareUnitMatrix(np.eye(21))

    def test_immutable(self):
        t = validate_tail_candidate(np.eye(2))
        with pytest.raises(ValueError):
            t.values[0, 1] = 0.5

    def test_strict_constructor(self):
        with pytest.raises(NotSymmetric):
            TailMatrix(np.array([[1, 0.2], [0.2 + 1e-15, 1]]))


class TestLiftDiag:
    def test_definition(self):
        assert_array_equal(lift_diag([[0.5, 0.2], [0.2, 0.7]]).values, [[1, 0.2], [0.2, 1]])

    def test_identity_fixed(self):
        assert_array_equal(lift_diag(np.eye(3)).values, np.eye(3))

    def test_three_by_three(self):
        m = np.full((3, 3), 0.1)
        np.fill_diagonal(m, 0.25)
        want = np.full((3, 3), 0.1)
        np.fill_diagonal(want, 1.0)
        assert_array_equal(lift_diag(m).values, want)

    @given(st.integers(1, 6), st.integers(0, 2**32 - 1))
    def test_idempotent(self, d, seed):
        m = np.random.default_rng(seed).random((d, d))
        once = lift_diag(m)
        assert lift_diag(once) == once


class TestHadamard:
    def test_equicorr_product(self):
        assert_allclose(hadamard(equicorr_matrix(3, 0.5), equicorr_matrix(3, 0.4)).values,
                        equicorr_matrix(3, 0.2).values, atol=1e-15)

    def test_ones_is_identity_element(self, rng):
        lam = validate_tail_candidate(random_compatible(rng, 4))
        assert hadamard(lam, np.ones((4, 4))) == lam

    def test_ar1_squares(self):
        got = hadamard(ar1_matrix(3, 0.5), ar1_matrix(3, 0.5))
        # (a ** |i-j|) ** 2 == (a ** 2) ** |i-j|
        want = np.array([[0.25 ** abs(i - j) for j in range(3)] for i in range(3)])
        assert_allclose(got.values, want, atol=1e-15)

    def test_exact(self):
        got = hadamard(equicorr_matrix(3, Fraction(1, 2)), equicorr_matrix(3, Fraction(2, 3)))
        assert got.values[0, 1] == Fraction(1, 3)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            hadamard(np.eye(2), np.eye(3))

    @given(st.integers(1, 6), st.integers(0, 2**32 - 1))
    def test_commutative_associative(self, d, seed):
        g = np.random.default_rng(seed)
        a, b, c = (random_compatible(g, d) for _ in range(3))
        assert_allclose(hadamard(a, b).values, hadamard(b, a).values, atol=1e-15)
        assert_allclose(hadamard(hadamard(a, b), c).values, hadamard(a, hadamard(b, c)).values, atol=1e-15)
        assert isinstance(hadamard(a, b), TailMatrix)


class TestConvexMix:
    def test_endpoint(self, rng):
        a, b = random_compatible(rng, 3), random_compatible(rng, 3)
        assert_array_equal(convex_mix(a, b, 1).values, validate_tail_candidate(a).values)

    def test_midpoint(self):
        assert_array_equal(convex_mix(np.eye(2), np.ones((2, 2)), 0.5).values, [[1, 0.5], [0.5, 1]])

    def test_quarter(self):
        got = convex_mix(equicorr_matrix(3, 0.8), equicorr_matrix(3, 0.4), 0.25)
        assert_allclose(got.values, equicorr_matrix(3, 0.5).values, atol=1e-15)

    @pytest.mark.parametrize("t", [-0.1, 1.1])
    def test_bad_weight(self, t):
        with pytest.raises(BadWeight):
            convex_mix(np.eye(2), np.eye(2), t)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            convex_mix(np.eye(2), np.eye(3), 0.5)


class TestFrechetBounds:
    def test_lower_bound_violation(self):
        b = np.array([[0.6, 0.2], [0.2, 0.7]])
        (v,) = frechet_bernoulli_bounds_check(b)
        assert (v.i, v.j) == (0, 1)
        assert v.lower == pytest.approx(0.3)

    def test_upper_bound_violation(self):
        v = frechet_bernoulli_bounds_check(np.array([[0.3, 0.5], [0.5, 0.7]]))
        assert len(v) == 1 and v[0].upper == pytest.approx(0.3)

    def test_identity_flags_all_pairs(self):
        # unit margins force b_ij = 1, so I_d is not a Bernoulli second-moment matrix
        assert {(v.i, v.j) for v in frechet_bernoulli_bounds_check(np.eye(3))} == {(0, 1), (0, 2), (1, 2)}

    def test_asymmetric_reports_both(self):
        b = np.array([[0.5, 0.9], [0.1, 0.5]])
        assert {(v.i, v.j) for v in frechet_bernoulli_bounds_check(b)} == {(0, 1)}

    @given(st.integers(1, 5), st.integers(0, 2**32 - 1))
    def test_moments_of_bernoulli_vectors_pass(self, d, seed):
        g = np.random.default_rng(seed)
        probs = g.dirichlet(np.ones(2**d))
        # direct expectation over the full cube
        b = sum(p * np.outer(bits_of(k, d), bits_of(k, d)) for k, p in enumerate(probs))
        assert frechet_bernoulli_bounds_check(b) == []


class TestPSD:
    def test_gamma_two_thirds(self):
        assert psd_necessary_check(gamma_matrix(3, Fraction(2, 3)))

    def test_gamma_point_eight(self):
        assert not psd_necessary_check(gamma_matrix(3, 0.8))

    def test_identity(self):
        assert psd_necessary_check(np.eye(5))

    @pytest.mark.parametrize("d", range(2, 11))
    def test_gamma_threshold(self, d):
        # eigenvalues of Gamma_d(a) are 1 (multiplicity d-2) and 1 +- a sqrt(d-1)
        for alpha in np.round(np.arange(0, 1.0001, 0.01), 2):
            expected = not alpha > 1 / np.sqrt(d - 1) + 1e-9
            assert psd_necessary_check(gamma_matrix(d, float(alpha))) == expected, alpha


class TestConstructors:
    def test_gamma_layout(self):
        assert_array_equal(
            gamma_matrix(3, 0.5).values, [[1, 0, 0.5], [0, 1, 0.5], [0.5, 0.5, 1]]
        )

    def test_exact_alpha(self):
        assert gamma_matrix(4, Fraction(1, 3)).exact
        assert not gamma_matrix(4, 1 / 3).exact

    def test_bits_of(self):
        assert bits_of(5, 4) == (1, 0, 1, 0)


class TestSubstochastic:
    def test_row_sum(self):
        with pytest.raises(OutOfRange):
            SubstochasticMatrix([[0.6, 0.5]])
        assert SubstochasticMatrix([[0.5, 0.5 + 5e-13]]).shape == (1, 2)

    def test_negative(self):
        with pytest.raises(OutOfRange):
            SubstochasticMatrix([[-0.1]])
