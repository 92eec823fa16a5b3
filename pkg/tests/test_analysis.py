import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from binomial_evidence.analysis import (
    ContourSpec,
    TransitionPoints,
    favored,
    find_trp,
    golden_section_minimize,
    iso_contour,
    iso_sample_size,
    sweep_evidence,
)
from binomial_evidence.core import HypothesisContrast, Observation
from binomial_evidence.eos import EvidenceModel, Favored, evidence_value
from binomial_evidence.errors import DegenerateMinimum, NotBracketable
from binomial_evidence.state import LITERAL_B_NUMERATOR

ONE_A = HypothesisContrast.one_a()
ONE_B = HypothesisContrast.one_b()
TWO_A = HypothesisContrast.two_a()
TWO_B = HypothesisContrast.two_b(0.4, 0.6)


class TestGoldenSection:
    @settings(max_examples=50, deadline=None)
    @given(st.floats(-5, 5), st.floats(0.1, 10))
    def test_quadratic(self, centre, width):
        x, fx = golden_section_minimize(lambda t: (t - centre) ** 2, centre - width, centre + 2 * width, 1e-9)
        assert abs(x - centre) < 1e-8
        assert fx < 1e-15

    def test_reversed_bracket_and_edge_minimum(self):
        x, _ = golden_section_minimize(lambda t: t, 3.0, 1.0, 1e-10)
        assert_allclose(x, 1.0, atol=1e-9)


class TestTransitionPoints:
    def test_one_b_at_half(self):
        trp = find_trp(ONE_B, 50)
        assert trp.ratios == (0.5,)

    @pytest.mark.parametrize("n", [10, 50, 200])
    def test_two_a_symmetric(self, n):
        t = find_trp(TWO_A, n).ratios
        assert len(t) == 2
        assert abs(t[0] + t[1] - 1) < 1e-6

    def test_values_at_fifty(self):
        assert_allclose(find_trp(ONE_A, 50).ratios, [0.35108], atol=1e-5)
        assert_allclose(find_trp(TWO_A, 50).ratios, [0.34415, 0.65585], atol=1e-5)
        assert_allclose(find_trp(TWO_B, 50).ratios, [0.26315, 0.73685], atol=1e-5)

    def test_is_minimum_of_scan(self):
        trp = find_trp(TWO_B, 50)
        grid = np.linspace(0, 0.5, 201)
        values = [evidence_value(TWO_B, Observation.from_ratio(50, r)) for r in grid]
        assert trp.points[0].E <= min(values) + 1e-12
        assert abs(grid[int(np.argmin(values))] - trp.ratios[0]) <= 0.5 / 200

    def test_two_b_converges_to_boundary(self):
        lefts = [find_trp(TWO_B, n).ratios[0] for n in (25, 50, 100, 200, 400)]
        assert all(a < b < 0.4 for a, b in zip(lefts, lefts[1:]))

    def test_no_correction_collapses_second_minimum(self):
        with pytest.raises(DegenerateMinimum) as info:
            find_trp(TWO_A, 50, model=EvidenceModel(apply_correction=False))
        assert tuple(info.value.found) == ()

    def test_literal_numerator_collapses_second_minimum(self):
        # with sqrt(2 pi) in b, II_a keeps only a cusp at 1/2
        with pytest.raises(DegenerateMinimum):
            find_trp(TWO_A, 50, model=EvidenceModel(b_numerator=LITERAL_B_NUMERATOR))

    def test_minima_merge_at_small_n(self):
        with pytest.raises(DegenerateMinimum):
            find_trp(TWO_A, 3)


class TestFavored:
    def test_extreme_tails_favour_h1(self):
        for n in (5, 20, 100):
            obs = Observation.from_ratio(n, 0.01)
            assert favored(ONE_A, obs, find_trp(ONE_A, n)) is Favored.H1

    def test_two_a_centre(self):
        assert favored(TWO_A, Observation(50, 25), find_trp(TWO_A, 50)) is Favored.H2

    def test_two_b_outside(self):
        assert favored(TWO_B, Observation(50, 0), find_trp(TWO_B, 50)) is Favored.H1

    def test_boundary_marker(self):
        trp = find_trp(TWO_A, 50)
        assert favored(TWO_A, Observation.from_ratio(50, trp.ratios[1]), trp) is Favored.BOUNDARY

    def test_one_b_sides(self):
        trp = TransitionPoints(ONE_B, 10, ())
        assert favored(ONE_B, Observation(10, 2), trp) is Favored.H1
        assert favored(ONE_B, Observation(10, 8), trp) is Favored.H2
        assert favored(ONE_B, Observation(10, 5), trp) is Favored.BOUNDARY


class TestIsoSampleSize:
    def test_one_b_exact(self):
        assert_allclose(iso_sample_size(ONE_B, 0.0, 8.0), 7.0, rtol=1e-7)

    def test_two_a_exact(self):
        assert_allclose(iso_sample_size(TWO_A, 0.0, 2.0), 3.0, rtol=1e-7)

    def test_one_a(self):
        assert_allclose(iso_sample_size(ONE_A, 0.0, 4.0), 7.0, rtol=0.01)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(1.5, 20))
    def test_two_b_closed_form(self, target):
        w = 0.2
        assert_allclose(iso_sample_size(TWO_B, 0.0, target), target ** (2 + w) - 1, rtol=1e-7)

    @settings(max_examples=20, deadline=None)
    @given(st.sampled_from((ONE_A, ONE_B, TWO_A, TWO_B)), st.floats(0, 0.5), st.floats(2, 6))
    def test_solves_target(self, hc, ratio, target):
        n = iso_sample_size(hc, ratio, target)
        assert_allclose(evidence_value(hc, Observation.from_ratio(n, ratio)), target, rtol=1e-6)

    def test_target_below_floor(self):
        with pytest.raises(NotBracketable):
            iso_sample_size(ONE_B, 0.0, 1.0)

    def test_target_out_of_reach(self):
        with pytest.raises(NotBracketable):
            iso_sample_size(ONE_B, 0.0, 1e7, n_bracket=(1e-3, 1e3))

    def test_rejects_non_positive_target(self):
        with pytest.raises(ValueError):
            iso_sample_size(ONE_B, 0.0, 0.0)


class TestContour:
    def test_apex_at_transition_point(self):
        pts = iso_contour(TWO_A, ContourSpec(2.0, tuple(np.linspace(0, 0.5, 11))))
        apex = [p for p in pts if p.apex]
        assert len(apex) == 1 and len(pts) == 12
        t = find_trp(TWO_A, apex[0].n).ratios[0]
        assert abs(apex[0].ratio - t) < 1e-5
        assert [p.ratio for p in pts] == sorted(p.ratio for p in pts)

    def test_contains_all_tails_point(self):
        pts = iso_contour(TWO_A, ContourSpec(2.0, (0.0, 0.25, 0.5)), refine_apex=False)
        assert_allclose(pts[0].n, 3.0, rtol=1e-7)

    def test_unbracketable_points_kept(self):
        pts = iso_contour(ONE_B, ContourSpec(1.2, (0.0, 0.5), n_bracket=(0.5, 1e6)))
        assert pts[0].n is None and "already" in pts[0].error
        assert pts[1].n is not None

    @pytest.mark.parametrize("kwargs", [{"target_E": 0.0}, {"n_bracket": (5, 1)}])
    def test_spec_validation(self, kwargs):
        args = {"target_E": 2.0, "ratios": (0.1,), **kwargs}
        with pytest.raises(ValueError):
            ContourSpec(**args)


class TestSweep:
    def test_maximum_at_half_within_theta2(self):
        rows = sweep_evidence(TWO_B, [50], list(np.linspace(0.4, 0.6, 21)), classify=False)
        es = [row.result.E for row in rows]
        assert int(np.argmax(es)) == 10

    def test_order_and_errors_recorded(self):
        model = EvidenceModel(apply_correction=False)
        rows = sweep_evidence(TWO_A, [10, 20], [0.1, 0.2], model=model)
        assert [(r.n, r.ratio) for r in rows] == [(10, 0.1), (10, 0.2), (20, 0.1), (20, 0.2)]
        assert all(r.result is not None and r.result.favored is None and r.result.note for r in rows)
