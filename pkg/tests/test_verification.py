import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.special import betaln

from binomial_evidence.core import HypothesisContrast, Observation, kld
from binomial_evidence.eos import EvidenceModel
from binomial_evidence.errors import OutOfRange
from binomial_evidence.verification import (
    STANDARD_HCS,
    VerificationReport,
    binomial_kld_sum,
    bbp_diminishing_increments,
    bbp_transition_points,
    check_closed_forms,
    check_kld_identity,
    check_kld_summation,
    closed_form_E,
    kld_identity_grid,
    mlr_negative_control,
    run_bbp_suite,
    v_oracle,
)

ONE_A, ONE_B, TWO_A, TWO_B = STANDARD_HCS


class TestOracle:
    def test_closed_forms(self):
        assert_allclose(v_oracle(7, 0, 0.5, 0.5), 15.9375, rtol=1e-15)
        assert_allclose(v_oracle(3, 0, 1.0, 0.5), 2.0, rtol=1e-15)
        assert_allclose(v_oracle(50, 25, 1.0, 0.5), 0.17464, atol=5e-6)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 60), st.data())
    def test_full_range_matches_beta(self, n, data):
        x = data.draw(st.integers(0, n))
        expected = math.exp(betaln(x + 1, n - x + 1) - n * math.log(0.5))
        assert_allclose(v_oracle(n, x, 1.0, 0.5), expected, rtol=1e-12)

    @given(st.integers(1, 60), st.data())
    def test_halves_add_up(self, n, data):
        x = data.draw(st.integers(0, n))
        left = v_oracle(n, x, 0.5, 0.5)
        right = v_oracle(n, n - x, 0.5, 0.5)
        assert_allclose(left + right, v_oracle(n, x, 1.0, 0.5), rtol=1e-13)

    @pytest.mark.parametrize("args", [(61, 0, 1.0, 0.5), (10.5, 2, 1.0, 0.5), (10, 11, 1.0, 0.5),
                                      (0, 0, 1.0, 0.5), (10, 2, 0.7, 0.5)])
    def test_out_of_range(self, args):
        with pytest.raises(OutOfRange):
            v_oracle(*args)


class TestIdentities:
    @pytest.mark.parametrize("hc, n, x", [(ONE_A, 10, 3), (TWO_A, 12, 6), (ONE_B, 9, 7)])
    def test_named_cells(self, hc, n, x):
        report = check_kld_identity([(hc, Observation(n, x))])
        assert report.passed and report.deviation < 1e-12

    def test_grid_size(self):
        assert len(kld_identity_grid()) == 200

    def test_full_grid(self):
        assert check_kld_identity().passed

    def test_summation(self):
        report = check_kld_summation()
        assert report.passed and report.deviation < 1e-10

    @given(st.integers(1, 12), st.floats(0, 1), st.floats(0.01, 0.99))
    def test_summation_property(self, n, t1, t2):
        assert_allclose(binomial_kld_sum(t1, t2, n), kld(t1, t2, n), rtol=1e-9, atol=1e-12)

    def test_closed_forms_report(self):
        assert check_closed_forms().passed
        assert_allclose(closed_form_E(TWO_B, 3.6), 4.6 ** (1 / 2.2))


class TestMlrControl:
    def test_all_tails(self):
        report = mlr_negative_control(ONE_A, 0.0, (10, 20, 30))
        assert report.passed
        assert "6.931471805599" in report.details[0]

    def test_interior_ratio(self):
        report = mlr_negative_control(ONE_A, 0.1, (20, 40, 60))
        assert report.passed and report.deviation < 1e-9

    def test_step_size_in_increment(self):
        # increment equals the n step times the per-toss divergence
        report = mlr_negative_control(TWO_A, 0.2, (10, 15, 20, 25))
        assert report.passed
        increments = json.loads(report.details[0].split("increments ")[1])
        assert_allclose(increments, 5 * kld(0.2, 0.5, 1), rtol=1e-11)

    def test_rejects_uneven_grid(self):
        with pytest.raises(ValueError):
            mlr_negative_control(ONE_A, 0.1, (10, 20, 40))

    def test_fails_for_overshooting_exponent(self):
        report = mlr_negative_control(ONE_A, 0.1, (20, 40, 60), model=EvidenceModel(c1=0.4))
        assert not report.passed


@pytest.fixture(scope="module")
def default_suite():
    return run_bbp_suite()


class TestBbpSuite:
    def test_all_families_pass(self, default_suite):
        failed = [r.line() for r in default_suite if not r.passed]
        assert not failed

    def test_families_present(self, default_suite):
        names = {r.name.split("[")[0] for r in default_suite}
        assert {"bbp_i", "bbp_ii", "bbp_iii", "bbp_iv", "symmetry", "class_ordering",
                "continuity", "trp_placement", "v_minus_b_positive"} <= names

    def test_forced_small_exponent_breaks_increments(self):
        model = EvidenceModel(c1=0.4)
        assert not any(bbp_diminishing_increments(hc, model=model).passed for hc in STANDARD_HCS)

    def test_no_correction_breaks_trp_count(self):
        report = bbp_transition_points(TWO_A, model=EvidenceModel(apply_correction=False))
        assert not report.passed
        assert "found 0" in report.details[0]

    def test_report_serialises(self, default_suite):
        d = default_suite[0].to_dict()
        assert set(d) == {"name", "passed", "deviation", "grid", "details"}
        assert VerificationReport("x", False, -1.0, "g").line().startswith("[FAIL]")
