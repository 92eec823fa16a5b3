import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from binomial_evidence.core import (
    HCClass,
    HypothesisContrast,
    Observation,
    constrained_mle,
    denominator_side,
    kld,
    kld_obs,
    log_likelihood,
    unconstrained_mle,
)

unit = st.floats(0.0, 1.0)
sizes = st.floats(0.01, 1e4)


class TestObservation:
    def test_fields_become_floats(self):
        obs = Observation(10, 3)
        assert isinstance(obs.n, float) and isinstance(obs.x, float)

    @pytest.mark.parametrize("n, x", [(0, 0), (-1, 0), (math.inf, 0), (5, -0.1), (5, 5.1), (math.nan, 0)])
    def test_rejects_invalid(self, n, x):
        with pytest.raises(ValueError):
            Observation(n, x)

    def test_from_ratio_keeps_x_in_range(self):
        obs = Observation.from_ratio(0.3, 1.0)
        assert obs.x == obs.n
        with pytest.raises(ValueError):
            Observation.from_ratio(5, 1.5)

    @given(sizes, unit)
    def test_mirror_is_involution(self, n, r):
        obs = Observation.from_ratio(n, r)
        assert_allclose(obs.mirrored().mirrored().x, obs.x, rtol=1e-12, atol=1e-12 * n)
        assert_allclose(obs.mirrored().ratio(), 1 - obs.ratio(), atol=1e-12)


class TestHypothesisContrast:
    @pytest.mark.parametrize("tag, expected", [
        ("1a", HCClass.I_A), ("IB", HCClass.I_B), ("ii_a", HCClass.II_A), ("class2b", HCClass.II_B),
    ])
    def test_parse_aliases(self, tag, expected):
        assert HCClass.parse(tag) is expected

    def test_parse_unknown(self):
        with pytest.raises(ValueError):
            HCClass.parse("3c")

    @pytest.mark.parametrize("left, right", [(0.6, 0.4), (0.0, 1.0), (0.3, 0.6), (0.5, 0.5)])
    def test_two_b_rejects_bad_intervals(self, left, right):
        with pytest.raises(ValueError):
            HypothesisContrast.two_b(left, right)

    def test_two_b_snaps_to_exact_symmetry(self):
        hc = HypothesisContrast.two_b(0.4, 0.6)
        assert hc.theta2_left + hc.theta2_right == 1.0
        assert hc.label() == "2b[0.4,0.6]"
        assert_allclose(hc.width(), 0.2)

    def test_intervals(self):
        assert HypothesisContrast.one_b().interval(2) == (0.5, 1.0)
        assert HypothesisContrast.one_a().domain() == (0.0, 0.5)
        assert HypothesisContrast.two_a().interval(1) == (0.0, 1.0)
        with pytest.raises(ValueError):
            HypothesisContrast.two_a().interval(3)

    def test_nesting_and_symmetry_flags(self):
        assert [hc.nested for hc in (HypothesisContrast.one_a(), HypothesisContrast.two_a())] == [False, True]
        assert not HypothesisContrast.one_a().symmetric
        assert HypothesisContrast.one_b().symmetric


class TestLogLikelihood:
    def test_symmetric_point(self):
        assert_allclose(log_likelihood(0.5, Observation(10, 5)), 10 * math.log(0.5))

    def test_zero_power_convention(self):
        assert log_likelihood(0.0, Observation(7, 0)) == 0.0

    def test_hand_value(self):
        assert_allclose(log_likelihood(0.4, Observation(50, 20)), 20 * math.log(0.4) + 30 * math.log(0.6))
        assert_allclose(log_likelihood(0.4, Observation(50, 20)), -33.6506, atol=5e-5)

    def test_minus_infinity_is_legal(self):
        assert log_likelihood(0.0, Observation(3, 1)) == -math.inf

    @given(sizes, unit, unit)
    def test_maximised_at_ratio(self, n, r, theta):
        obs = Observation.from_ratio(n, r)
        assert log_likelihood(theta, obs) <= log_likelihood(obs.ratio(), obs) + 1e-9 * max(1.0, n)


class TestConstrainedMle:
    def test_clamps_into_theta2(self):
        hc = HypothesisContrast.two_b(0.4, 0.6)
        assert constrained_mle(hc, Observation(10, 7), side=2) == 0.6

    def test_simple_theta2(self):
        assert constrained_mle(HypothesisContrast.one_a(), Observation(10, 1), side=2) == 0.5

    @pytest.mark.parametrize("x, side", [(3, 2), (7, 1)])
    def test_one_b_switches_side_but_stays_at_half(self, x, side):
        hc = HypothesisContrast.one_b()
        obs = Observation(10, x)
        assert denominator_side(hc, obs) == side
        assert constrained_mle(hc, obs) == 0.5

    def test_unconstrained(self):
        assert unconstrained_mle(HypothesisContrast.one_a(), Observation(10, 8)) == 0.5
        assert unconstrained_mle(HypothesisContrast.two_a(), Observation(10, 8)) == 0.8


class TestKld:
    def test_identical(self):
        assert kld(0.3, 0.3, 17) == 0.0

    def test_hand_value(self):
        assert_allclose(kld(0.5, 0.25, 1), 0.5 * math.log(2) + 0.5 * math.log(2 / 3), rtol=1e-14)
        assert_allclose(kld(0.5, 0.25, 1), 0.14384, atol=1e-5)

    def test_infinite_when_support_missing(self):
        assert kld(0.3, 0.0, 5) == math.inf

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            kld(1.2, 0.5, 1)

    @given(unit, st.floats(1e-6, 1 - 1e-6), sizes)
    def test_non_negative_and_linear_in_n(self, t1, t2, n):
        k = kld(t1, t2, n)
        assert k >= 0.0
        assert_allclose(k, n * kld(t1, t2, 1.0), rtol=1e-12, atol=1e-300)

    def test_observed(self):
        assert kld_obs(Observation(10, 5), 0.5) == 0.0
        assert_allclose(kld_obs(Observation(7, 0), 0.5), 7 * math.log(2))
        assert_allclose(kld_obs(Observation(7, 0), 0.5), 4.8520, atol=5e-5)
