import math
from math import comb

import numpy as np
import pytest

from qratio.errors import DomainError
from qratio.spin import (SpinCoherentState, approximate_distribution,
                         classical_limit_diagnostics, coefficient,
                         distribution, saddle_point_peak, stirling_log_weight)


def brute_force_weights(two_j, theta):
    """Exact binomial evaluation with integer coefficients (oracle)."""
    p = math.cos(theta / 2.0) ** 2
    return np.array([comb(two_j, k) * p ** k * (1.0 - p) ** (two_j - k)
                     for k in range(two_j + 1)])


class TestCoefficient:
    def test_aligned_spin_half(self):
        s = SpinCoherentState.from_j(0.5, 0.0)
        assert coefficient(s, 1) == 1.0
        assert coefficient(s, 0) == 0.0

    def test_equator_spin_half(self):
        s = SpinCoherentState.from_j(0.5, math.pi / 2)
        assert abs(coefficient(s, 0)) ** 2 == pytest.approx(0.5, rel=1e-12)
        assert abs(coefficient(s, 1)) ** 2 == pytest.approx(0.5, rel=1e-12)

    def test_peak_position_13_half(self):
        s = SpinCoherentState.from_j(6.5, math.pi / 4)
        w = np.array([abs(coefficient(s, k)) ** 2 for k in range(14)])
        m_peak = np.argmax(w) - 6.5
        assert abs(m_peak - 6.5 * math.cos(math.pi / 4)) <= 1.0

    def test_phi_enters_phase_only(self):
        a = coefficient(SpinCoherentState.from_j(2.5, 1.0, 0.0), 2)
        b = coefficient(SpinCoherentState.from_j(2.5, 1.0, 1.7), 2)
        assert abs(a) == pytest.approx(abs(b), rel=1e-14)
        assert a != b

    def test_out_of_range_index(self):
        s = SpinCoherentState.from_j(1.0, 0.3)
        with pytest.raises(DomainError):
            coefficient(s, 3)


class TestDistribution:
    def test_antialigned_one_hot(self):
        d = distribution(SpinCoherentState.from_j(0.5, math.pi))
        assert d.weights.tolist() == [1.0, 0.0]

    def test_spin_one_equator(self):
        d = distribution(SpinCoherentState.from_j(1.0, math.pi / 2))
        assert np.allclose(d.weights, [0.25, 0.5, 0.25], atol=1e-14)

    def test_13_half_equator_symmetric(self):
        d = distribution(SpinCoherentState.from_j(6.5, math.pi / 2))
        assert np.allclose(d.weights, d.weights[::-1], atol=1e-15)

    @pytest.mark.parametrize("two_j,theta", [
        (13, math.pi / 2), (13, math.pi / 4), (27, 1.0), (100, 2.2),
    ])
    def test_matches_integer_binomial_oracle(self, two_j, theta):
        d = distribution(SpinCoherentState(two_j, theta))
        assert np.max(np.abs(d.weights - brute_force_weights(two_j, theta))) < 1e-12

    @pytest.mark.parametrize("two_j", [13, 2000, 20000])
    def test_normalization(self, two_j):
        d = distribution(SpinCoherentState(two_j, 0.9))
        assert abs(d.weights.sum() - 1.0) < 1e-12
        assert d.normalization_defect < 1e-10

    def test_reversal_symmetry(self):
        theta = 0.7
        a = distribution(SpinCoherentState(40, theta)).weights
        b = distribution(SpinCoherentState(40, math.pi - theta)).weights
        assert np.allclose(a, b[::-1], atol=1e-15)

    @pytest.mark.parametrize("phi", [0.0, 1.0, math.pi])
    def test_phi_independence_bitwise(self, phi):
        ref = distribution(SpinCoherentState(21, 1.1, 0.0)).weights
        other = distribution(SpinCoherentState(21, 1.1, phi)).weights
        assert np.array_equal(ref, other)

    def test_large_spin_no_overflow(self):
        d = distribution(SpinCoherentState(2 * 10 ** 6, math.pi / 3))
        assert np.isfinite(d.weights).all()
        assert abs(d.weights.sum() - 1.0) < 1e-12


class TestStirlingForm:
    def test_zero_at_peak(self):
        for theta in (0.4, math.pi / 2, 2.0):
            x0 = math.cos(theta / 2) ** 2
            assert stirling_log_weight(10.0, theta, x0) == pytest.approx(0.0, abs=1e-14)

    def test_negative_away_from_peak(self):
        theta = math.pi / 3
        x0 = math.cos(theta / 2) ** 2
        for x in (0.05, 0.3, 0.6, 0.95):
            if abs(x - x0) > 1e-9:
                assert stirling_log_weight(7.5, theta, x) < 0.0

    def test_frozen_value_at_quarter(self):
        # -0.25 ln 0.25 - 0.75 ln 0.75 - ln 2, by hand
        assert stirling_log_weight(100.0, math.pi / 2, 0.25) == pytest.approx(
            -0.130812035941137, rel=1e-12)

    def test_second_order_taylor_curvature(self):
        # f(x) ~ -(x-x0)^2 / (2 x0 (1-x0)) near the peak
        theta = math.pi / 2
        x0 = 0.5
        for dx in (0.01, 0.005):
            f = stirling_log_weight(50.0, theta, x0 + dx)
            taylor = -dx ** 2 / (2 * x0 * (1 - x0))
            assert f == pytest.approx(taylor, rel=2e-4)
        # numerical curvature at the peak
        h = 1e-5
        second = (stirling_log_weight(50.0, theta, x0 + h)
                  + stirling_log_weight(50.0, theta, x0 - h)) / h ** 2
        assert second == pytest.approx(-1.0 / (x0 * (1 - x0)), rel=1e-4)

    def test_domain_errors(self):
        for bad_x in (0.0, 1.0, -0.2, 1.3):
            with pytest.raises(DomainError):
                stirling_log_weight(5.0, 1.0, bad_x)
        for bad_theta in (0.0, math.pi):
            with pytest.raises(DomainError):
                stirling_log_weight(5.0, bad_theta, 0.5)


class TestSaddlePoint:
    def test_equator(self):
        x0, m = saddle_point_peak(100.0, math.pi / 2)
        assert x0 == pytest.approx(0.5, rel=1e-14)
        assert m == pytest.approx(0.0, abs=1e-10)

    def test_quarter_turn(self):
        _, m = saddle_point_peak(100.0, math.pi / 4)
        assert m == pytest.approx(100.0 / math.sqrt(2), rel=1e-12)

    def test_aligned_limit(self):
        x0, m = saddle_point_peak(10.0, 1e-8)
        assert x0 == pytest.approx(1.0, abs=1e-12)
        assert m == pytest.approx(10.0, rel=1e-12)


class TestClassicalLimit:
    def test_large_spin_argmax_tracks_classical_value(self):
        rep = classical_limit_diagnostics(2 * 10 ** 5, math.pi / 4)
        assert rep.argmax_offset <= 1.0

    def test_width_halves_when_spin_quadruples(self):
        r50 = classical_limit_diagnostics(50.0, math.pi / 3)
        r200 = classical_limit_diagnostics(200.0, math.pi / 3)
        assert r200.relative_width / r50.relative_width == pytest.approx(0.5, rel=0.05)

    def test_width_scaling_formula(self):
        # relative width = 2 sqrt(x0 (1 - x0)) / sqrt(2j)
        for j in (50, 200, 800):
            for theta in (math.pi / 6, math.pi / 4, math.pi / 2):
                x0 = math.cos(theta / 2) ** 2
                expected = 2 * math.sqrt(x0 * (1 - x0)) / math.sqrt(2 * j)
                rep = classical_limit_diagnostics(j, theta)
                assert rep.relative_width == pytest.approx(expected, rel=0.05)

    def test_spin_half_has_no_concentration(self):
        rep = classical_limit_diagnostics(0.5, math.pi / 2)
        assert rep.relative_width == pytest.approx(1.0, rel=1e-9)

    @pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 4, math.pi / 2,
                                       3 * math.pi / 4])
    @pytest.mark.parametrize("j", [50, 214.5, 1000])
    def test_argmax_within_one_unit(self, j, theta):
        rep = classical_limit_diagnostics(j, theta)
        assert rep.argmax_offset <= 1.0


class TestAsymptoticAgreement:
    def test_stirling_matches_exact_at_j500(self):
        two_j = 1000
        theta = 1.1
        d = distribution(SpinCoherentState(two_j, theta))
        k = np.arange(1, two_j)
        x = k / two_j
        f = np.array([stirling_log_weight(two_j / 2, theta, xi) for xi in x])
        # exp(n f) needs the 1/sqrt(2 pi n x (1-x)) Stirling prefactor,
        # i.e. -0.5 log(4 pi j x (1-x)) in the log
        approx_log = two_j * f - 0.5 * np.log(4 * math.pi * (two_j / 2) * x * (1 - x))
        bulk = d.weights[1:-1] > 1e-10 * d.weights.max()
        exact_log = np.log(d.weights[1:-1][bulk])
        assert np.max(np.abs(approx_log[bulk] - exact_log)) < 0.01

    def test_argmax_agreement_with_approximation(self):
        theta = 0.9
        exact = distribution(SpinCoherentState(1000, theta))
        approx = approximate_distribution(500.0, theta)
        assert abs(int(np.argmax(exact.weights))
                   - int(np.argmax(approx.weights))) <= 1


def test_state_validation():
    with pytest.raises(DomainError):
        SpinCoherentState.from_j(0.3, 1.0)   # not half-integer
    with pytest.raises(DomainError):
        SpinCoherentState.from_j(1.0, 3.5)   # theta out of range
    with pytest.raises(DomainError):
        SpinCoherentState.from_j(-0.5, 1.0)
