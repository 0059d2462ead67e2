import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import mass_vectors
from renewal_lab.errors import (
    EmptySupport,
    InvalidRational,
    NegativeMass,
    NotInSimplex,
    NotNormalized,
    ResolutionZero,
)
from renewal_lab.masses import (
    SamplePlan,
    SimplexPoint,
    from_simplex_point,
    grid_size,
    make_masses,
    period,
    random_masses,
    sample_simplex,
)
from renewal_lab.rational import format_rational, parse_rational, parse_rational_list


class TestRational:
    @pytest.mark.parametrize("text, value", [("1/2", F(1, 2)), ("0", F(0)), ("-3/6", F(-1, 2)), (" 4 ", F(4))])
    def test_parse(self, text, value):
        assert parse_rational(text) == value

    @pytest.mark.parametrize("bad", ["0.5", "1e-3", "1/0", "", "a/b", 0.5, True])
    def test_rejects_inexact(self, bad):
        with pytest.raises(InvalidRational):
            parse_rational(bad)

    def test_format_lowest_terms(self):
        assert format_rational(F(2, 4)) == "1/2"
        assert format_rational(F(3)) == "3"
        assert format_rational(0) == "0"

    def test_list(self):
        assert parse_rational_list("1/2,1/4,1/4") == [F(1, 2), F(1, 4), F(1, 4)]
        with pytest.raises(InvalidRational):
            parse_rational_list("1/2,,1/2")


class TestMakeMasses:
    def test_unit_step(self):
        m = make_masses([1])
        assert (m.k, m.p) == (1, (F(1),))

    def test_canonical(self):
        m = make_masses(["1/2", "1/4", "1/4"])
        assert m.k == 3 and m.p == (F(1, 2), F(1, 4), F(1, 4))

    def test_trailing_zero_stripped(self):
        m = make_masses(["1/2", "1/2", "0"])
        assert m.k == 2 and m.p == (F(1, 2), F(1, 2))

    @pytest.mark.parametrize(
        "values, exc",
        [
            (["-1/2", "3/2"], NegativeMass),
            (["1/2", "1/4"], NotNormalized),
            (["0", "0"], EmptySupport),
            ([], EmptySupport),
        ],
    )
    def test_errors(self, values, exc):
        with pytest.raises(exc):
            make_masses(values)

    def test_json(self):
        assert make_masses(["1/2", "1/4", "1/4"]).to_json() == {"k": 3, "p": ["1/2", "1/4", "1/4"]}


class TestSimplexPoint:
    def test_complement_fill(self):
        assert from_simplex_point(SimplexPoint.of(3, ["1/2", "1/4"])).p == (F(1, 2), F(1, 4), F(1, 4))

    def test_zero_complement_shrinks_support(self):
        m = from_simplex_point(SimplexPoint.of(3, ["1/2", "1/2"]))
        assert m.k == 2 and m.p == (F(1, 2), F(1, 2))

    def test_point_mass_at_two(self):
        m = from_simplex_point(SimplexPoint.of(2, ["0"]))
        assert m.k == 2 and m.p == (F(0), F(1))

    @pytest.mark.parametrize("q", [["1/2", "3/4"], ["-1/4", "1/4"]])
    def test_outside(self, q):
        with pytest.raises(NotInSimplex):
            SimplexPoint.of(3, q)

    def test_wrong_arity(self):
        with pytest.raises(NotInSimplex):
            SimplexPoint.of(3, ["1/2"])

    @given(mass_vectors())
    def test_roundtrip(self, m):
        assert from_simplex_point(m.to_simplex_point()) == m


class TestPeriod:
    @pytest.mark.parametrize(
        "p, d", [(["0", "1"], 2), (["1/2", "0", "1/2"], 1), (["0", "1/2", "0", "1/2"], 2), (["0", "0", "1"], 3)]
    )
    def test_examples(self, p, d):
        assert period(make_masses(p)) == d

    @given(mass_vectors())
    def test_p1_positive_is_aperiodic(self, m):
        if m.p[0] > 0:
            assert period(m) == 1


class TestSampling:
    def test_line(self):
        pts = [pt.q for pt in sample_simplex(2, SamplePlan.grid(2))]
        assert pts == [(F(0),), (F(1, 2),), (F(1),)]

    def test_triangle(self):
        pts = {pt.q for pt in sample_simplex(3, SamplePlan.grid(2))}
        expected = {(0, 0), (0, F(1, 2)), (0, 1), (F(1, 2), 0), (F(1, 2), F(1, 2)), (1, 0)}
        assert pts == {tuple(F(x) for x in q) for q in expected}

    @pytest.mark.parametrize("k", range(2, 7))
    @pytest.mark.parametrize("r", range(1, 11))
    def test_grid_cardinality(self, k, r):
        pts = list(sample_simplex(k, SamplePlan.grid(r)))
        assert len(pts) == grid_size(k, r) == math.comb(r + k - 1, k - 1)
        assert len(set(pts)) == len(pts)

    def test_random_is_reproducible(self):
        plan = SamplePlan.random(100, 7)
        assert list(sample_simplex(3, plan)) == list(sample_simplex(3, plan))
        assert list(sample_simplex(3, plan)) != list(sample_simplex(3, SamplePlan.random(100, 8)))

    def test_random_points_exact_and_inside(self):
        for pt in sample_simplex(5, SamplePlan.random(200, 3)):
            assert all(x >= 0 for x in pt.q) and sum(pt.q) <= 1
            assert all(x.denominator <= 2**32 for x in pt.q)

    def test_random_prefix_stable(self):
        # points depend on (seed, index) only
        short = list(sample_simplex(4, SamplePlan.random(5, 11)))
        long = list(sample_simplex(4, SamplePlan.random(50, 11)))
        assert long[:5] == short

    @pytest.mark.parametrize("plan", [SamplePlan.grid(0), SamplePlan.random(0, 1)])
    def test_resolution_zero(self, plan):
        with pytest.raises(ResolutionZero):
            list(sample_simplex(3, plan))

    @settings(max_examples=25)
    @given(st.integers(2, 5), st.integers(1, 6))
    def test_grid_points_in_simplex(self, k, r):
        for pt in sample_simplex(k, SamplePlan.grid(r)):
            assert min(pt.q) >= 0 and sum(pt.q) <= 1


def test_random_masses_corpus():
    corpus = random_masses(50, 6, 42, k_min=2, require_p1_in_open_unit=True)
    assert len(corpus) == 50
    assert all(0 < m.p[0] < 1 and 2 <= m.k <= 6 for m in corpus)
    assert corpus == random_masses(50, 6, 42, k_min=2, require_p1_in_open_unit=True)
