from __future__ import annotations

import random
from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from flatcover.constructions import complete_simplex, nonblocking_balanced
from flatcover.errors import InfeasibleError, ParameterError
from flatcover.f2 import PointSet
from flatcover.verify import (
    check_witnesses,
    find_subspace,
    is_complete,
    is_nonblocking,
    sum3_property,
)


@st.composite
def point_sets(draw, r_min=1, r_max=4):
    r = draw(st.integers(r_min, r_max))
    bits = draw(st.integers(0, (1 << (1 << r)) - 1))
    return PointSet(r, bits)


class TestExamples:
    @pytest.mark.parametrize("r", range(1, 5))
    def test_full_space(self, r):
        assert is_complete(PointSet.full(r), r).holds

    def test_singleton(self):
        rep = is_complete(PointSet.from_points(3, [5]), 1)
        assert not rep.holds and rep.counterexample == 5

    @pytest.mark.parametrize("r", range(1, 6))
    def test_two_points(self, r):
        rnd = random.Random(r)
        a, b = rnd.sample(range(1 << r), 2)
        s = PointSet.from_points(r, [a, b])
        assert is_complete(s, 1).holds
        assert is_nonblocking(s, 1).holds
        assert is_nonblocking(s, 1, method="direct").holds

    def test_three_points_block(self):
        for pts in ([0, 1, 2], [1, 2, 4], [3, 5, 6]):
            s = PointSet.from_points(3, pts)
            assert not is_nonblocking(s, 1).holds
            assert not is_nonblocking(s, 1, method="direct").holds

    def test_empty(self):
        for d in range(4):
            assert is_nonblocking(PointSet(3), d).holds

    def test_errors(self):
        with pytest.raises(ParameterError):
            is_complete(PointSet.full(3), 4)
        with pytest.raises(ParameterError):
            is_nonblocking(PointSet.full(3), 1, method="bogus")
        with pytest.raises(InfeasibleError):
            is_complete(PointSet.full(8), 4, exhaustive=True, budget=1000)


class TestProperties:
    @given(point_sets(), st.integers(0, 4))
    def test_duality(self, b, d):
        d = min(d, b.r)
        direct = is_nonblocking(b, d, method="direct").holds
        assert direct == is_complete(b.complement(), b.r - d).holds
        assert direct == is_nonblocking(b, d).holds

    @given(point_sets(r_max=5), st.integers(1, 5))
    def test_monotone(self, c, d):
        d = min(d, c.r)
        if is_complete(c, d).holds:
            assert all(is_complete(c, k).holds for k in range(d))
        if is_nonblocking(c, d).holds:
            assert all(is_nonblocking(c, k).holds for k in range(d, c.r + 1))

    @given(point_sets(r_max=5), st.integers(0, 5), st.integers(0, 31))
    def test_translation(self, c, d, t):
        d = min(d, c.r)
        t &= (1 << c.r) - 1
        shifted = c.translate(t)
        assert is_complete(c, d).holds == is_complete(shifted, d).holds

    @given(point_sets(r_min=2, r_max=4))
    def test_sum3_equivalence(self, c):
        if len(c) >= 3:
            assert sum3_property(c, cross_check=True) == is_complete(c, 2).holds

    @given(point_sets(r_max=4), st.integers(0, 4))
    def test_exhaustive_agrees(self, c, d):
        d = min(d, c.r)
        assert is_complete(c, d).holds == is_complete(c, d, exhaustive=True).holds

    @given(point_sets(r_max=4), st.integers(1, 4))
    def test_counterexample_rechecks(self, c, d):
        d = min(d, c.r)
        rep = is_complete(c, d)
        if not rep.holds:
            v = rep.counterexample
            dirs = {int(x) ^ v for x in c.points() if int(x) != v}
            assert find_subspace(dirs, d) is None


def test_sum3_full_and_counting():
    for r in range(2, 6):
        assert sum3_property(PointSet.full(r))
    assert not sum3_property(PointSet.from_points(3, [0, 1]))


def test_sampled_report():
    rep = is_complete(PointSet.full(6), 3, sample=20, seed=7)
    assert rep.checked == "sampled" and rep.seed == 7 and rep.sample_count == 20
    assert rep.to_json()["seed"] == 7


def test_workers_agree():
    s = nonblocking_balanced(8, 2).pointset
    a = is_nonblocking(s, 2, workers=1)
    b = is_nonblocking(s, 2, workers=3)
    assert a.holds and b.holds


class TestWitnessCheck:
    def test_balanced(self):
        rep = check_witnesses(nonblocking_balanced(8, 2))
        assert rep.holds and rep.checked == "full"

    def test_simplex_full(self):
        rep = check_witnesses(complete_simplex(14, 3))
        assert rep.holds and rep.checked == "full"

    def test_mutation_complete(self):
        rec = complete_simplex(7, 3)
        s = rec.pointset
        victim = next(int(p) for p in s.points() if int(p))
        smaller = PointSet(s.r, s.mask & ~(1 << victim))
        rep = check_witnesses(rec, members=smaller)
        assert not rep.holds and rep.detail
        assert not is_complete(smaller, 3).holds or rep.counterexample is not None

    def test_mutation_nonblocking(self):
        rec = nonblocking_balanced(6, 2)
        s = rec.pointset
        extra = next(v for v in range(64) if v not in s)
        bigger = PointSet(6, s.mask | (1 << extra))
        rep = check_witnesses(rec, members=bigger)
        assert not rep.holds

    def test_broken_witness(self):
        rec = nonblocking_balanced(6, 2)
        bad = replace(rec, witness=lambda v: rec.witness(v ^ 1))
        assert not check_witnesses(bad).holds

    @pytest.mark.parametrize("r,d", [(4, 2), (5, 2)])
    def test_witness_implies_oracle(self, r, d):
        rec = nonblocking_balanced(r, d)
        assert check_witnesses(rec).holds
        assert is_nonblocking(rec.pointset, d, exhaustive=True).holds
