from __future__ import annotations


import pytest
from hypothesis import given, strategies as st

from flatcover.codes import (
    PRIMITIVE_POLYS,
    GF2mField,
    LinearCode,
    bch_dimension_condition,
    carlitz_uchiyama_check,
    carlitz_uchiyama_interval,
    dual_bch,
    griesmer_length,
    loose_cu_interval,
    simplex_code,
    weight_stats,
)
from flatcover.errors import ConstructionError, InfeasibleError, ParameterError


@pytest.mark.parametrize("m", sorted(PRIMITIVE_POLYS))
def test_builtin_polynomials_are_primitive(m):
    f = GF2mField.standard(m)
    if m <= 12:
        assert len(set(f.exp_table)) == (1 << m) - 1


def test_non_primitive_rejected():
    with pytest.raises(ConstructionError):
        GF2mField(4, 0b11111)  # x^4+x^3+x^2+x+1 has order 5
    with pytest.raises(ConstructionError):
        GF2mField(4, 0b10101)  # reducible


def test_field_arithmetic():
    f = GF2mField.standard(4)
    assert f.alpha_pow(15) == 1 and f.alpha_pow(1) == 2
    assert f.mul_slow(f.alpha_pow(3), f.alpha_pow(5)) == f.alpha_pow(8)


class TestSimplex:
    def test_small(self):
        c = simplex_code(1)
        assert (c.n, c.k) == (1, 1) and sorted(c.codewords()) == [0, 1]
        assert weight_stats(simplex_code(3)).distribution == {0: 1, 4: 7}
        assert weight_stats(simplex_code(8)).distribution == {0: 1, 128: 255}

    @pytest.mark.parametrize("d", range(1, 11))
    def test_constant_weight(self, d):
        c = simplex_code(d)
        assert c.n == (1 << d) - 1 and c.k == d
        assert weight_stats(c).distribution == {0: 1, 1 << (d - 1): (1 << d) - 1}


class TestDualBch:
    def test_examples(self):
        assert weight_stats(dual_bch(3, 1)).distribution == {0: 1, 4: 7}
        assert weight_stats(dual_bch(4, 1)).distribution == {0: 1, 8: 15}
        s = weight_stats(dual_bch(4, 2))
        assert s.distribution == {0: 1, 4: 15, 6: 100, 8: 75, 10: 60, 12: 5}
        assert s.min_nonzero == 4 and s.max == 12

    @pytest.mark.parametrize("m", range(3, 7))
    def test_dimension(self, m):
        e_max = 1 << ((m + 1) // 2 - 1)
        for e in range(1, e_max + 1):
            assert dual_bch(m, e).k == e * m

    def test_parameter_errors(self):
        with pytest.raises(ParameterError):
            dual_bch(2, 1)
        with pytest.raises(ParameterError):
            dual_bch(4, 3)
        assert bch_dimension_condition(5, 4) and not bch_dimension_condition(4, 3)

    def test_modulus_independence(self):
        # another primitive polynomial of degree 4 gives an equivalent code
        a = weight_stats(dual_bch(4, 2))
        b = weight_stats(dual_bch(4, 2, modulus=0b11001))
        assert a.distribution == b.distribution

    @pytest.mark.parametrize("m,e", [(4, 2), (5, 2), (6, 2), (5, 4), (3, 1), (4, 1)])
    def test_carlitz_uchiyama(self, m, e):
        assert carlitz_uchiyama_check(dual_bch(m, e), m, e)

    def test_loose_interval_misses_top_weight(self):
        assert not carlitz_uchiyama_check(dual_bch(4, 2), 4, 2, loose=True)
        assert carlitz_uchiyama_check(dual_bch(5, 2), 5, 2, loose=True)
        assert carlitz_uchiyama_check(dual_bch(3, 1), 3, 1, loose=True)
        for m, e in [(4, 2), (5, 2), (6, 2)]:
            lo, hi = loose_cu_interval(m, e)
            slo, shi = carlitz_uchiyama_interval(m, e)
            assert hi < shi and shi - slo > hi - lo

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            carlitz_uchiyama_check(simplex_code(3), 4, 1)


class TestLinearCode:
    def test_dependent_rows_rejected(self):
        with pytest.raises(ParameterError):
            LinearCode(3, (1, 1))
        with pytest.raises(ParameterError):
            LinearCode(2, (4,))

    def test_zero_code(self):
        s = weight_stats(LinearCode(5, ()))
        assert s.distribution == {0: 1} and s.min_nonzero is None

    @given(st.randoms())
    def test_closed_under_addition(self, rnd):
        c = dual_bch(5, 2)
        words = list(c.codewords())
        for _ in range(20):
            a, b = rnd.choice(words), rnd.choice(words)
            assert c.contains(a ^ b)

    def test_counts_sum(self):
        for c in (simplex_code(4), dual_bch(5, 2), dual_bch(6, 2)):
            s = weight_stats(c)
            assert sum(s.distribution.values()) == 2**c.k and s.distribution[0] == 1

    def test_workers_agree(self):
        c = dual_bch(5, 2)
        assert weight_stats(c, workers=4).distribution == weight_stats(c).distribution

    def test_griesmer(self):
        for c in (simplex_code(3), simplex_code(5), dual_bch(4, 2), dual_bch(5, 2), dual_bch(6, 2)):
            s = weight_stats(c)
            assert c.n >= griesmer_length(c.k, s.min_nonzero)
        assert griesmer_length(3, 4) == 7

    def test_enumeration_limit(self):
        c = dual_bch(8, 4)  # k = 32
        with pytest.raises(InfeasibleError):
            weight_stats(c)

    def test_subcode(self):
        c = simplex_code(4)
        assert c.subcode(2).k == 2
        with pytest.raises(ParameterError):
            c.subcode(5)

    def test_json(self):
        c = simplex_code(3)
        assert weight_stats(c).to_json(c) == {"n": 7, "k": 3, "weights": {"0": 1, "4": 7}}
