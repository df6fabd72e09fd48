from __future__ import annotations

import json
import math

import pytest

from flatcover.bounds import bounds_row
from flatcover.errors import InfeasibleError, ParameterError
from flatcover.exact import ExactCache, ExactResult, binomial_floor, exact_beta, exact_gamma, exact_sum3, exact_table
from flatcover.verify import is_complete, is_nonblocking

GAMMA = {2: [0, 2, 4], 3: [0, 2, 6, 8], 4: [0, 2, 7, 14, 16]}
BETA = {2: [0, 2, 4], 3: [0, 2, 6, 8], 4: [0, 2, 9, 14, 16]}


@pytest.fixture(scope="module")
def small_rows():
    return {(row["r"], row["d"]): row for row in exact_table([2, 3, 4])}


def test_examples():
    assert exact_gamma(3, 1).value == 2
    assert exact_gamma(3, 3).value == 8
    assert exact_gamma(3, 2).value == 6
    assert exact_beta(4, 3).value == 14
    assert exact_beta(2, 1).value == 2
    assert 6 <= exact_beta(4, 2).value <= 11


def test_table_values(small_rows):
    for r in GAMMA:
        assert [small_rows[r, d]["gamma"] for d in range(r + 1)] == GAMMA[r]
        assert [small_rows[r, d]["beta"] for d in range(r + 1)] == BETA[r]


def test_duality(small_rows):
    for (r, d), row in small_rows.items():
        assert row["beta"] + small_rows[r, r - d]["gamma"] == 1 << r


def test_monotone_endpoints(small_rows):
    for r in GAMMA:
        g = [small_rows[r, d]["gamma"] for d in range(r + 1)]
        assert g == sorted(g) and g[0] < g[1] and g[-2] < g[-1]


def test_sub_multiplicative(small_rows):
    for r1 in GAMMA:
        for r2 in GAMMA:
            if r1 + r2 in GAMMA:
                for d in range(min(r1, r2) + 1):
                    prod = small_rows[r1, d]["gamma"] * small_rows[r2, d]["gamma"]
                    assert small_rows[r1 + r2, d]["gamma"] <= prod


def test_sandwich(small_rows):
    for (r, d), row in small_rows.items():
        b = bounds_row(r, d)
        assert b.admits("gamma", row["gamma"]), (r, d)
        assert b.admits("beta", row["beta"]), (r, d)


def test_optimal_sets_verified(small_rows):
    from flatcover.f2 import PointSet
    for (r, d), row in small_rows.items():
        assert is_complete(PointSet.from_points(r, row["gamma_set"]), d).holds
        assert is_nonblocking(PointSet.from_points(r, row["beta_set"]), d).holds


def test_degree_floor(small_rows):
    for (r, d), row in small_rows.items():
        assert row["gamma"] >= binomial_floor(r, d)


@pytest.mark.parametrize("r", [2, 3, 4])
def test_sum3(r):
    s = exact_sum3(r)
    assert s.value == exact_gamma(r, 2).value
    assert math.comb(s.value, 3) >= 1 << r


def test_sum3_infeasible():
    with pytest.raises(InfeasibleError):
        exact_sum3(5)


def test_infeasible_and_errors():
    with pytest.raises(InfeasibleError):
        exact_gamma(6, 3)
    with pytest.raises(InfeasibleError):
        exact_gamma(5, 2, budget=10)
    with pytest.raises(ParameterError):
        exact_gamma(3, 4)


def test_fast_paths_r6():
    assert [exact_gamma(6, d).value for d in (0, 1, 5, 6)] == [0, 2, 62, 64]
    assert exact_gamma(6, 1).method == "closed_form"


def test_cache_roundtrip(tmp_path):
    path = tmp_path / "exact-cache.json"
    cache = ExactCache(path)
    first = exact_gamma(3, 2, cache=cache)
    again = ExactCache(path).get("gamma", 3, 2)
    assert again == first


def test_cache_rejects_tampered(tmp_path):
    path = tmp_path / "exact-cache.json"
    exact_gamma(3, 2, cache=ExactCache(path))
    data = json.loads(path.read_text())
    entry = data["gamma:3:2"]
    entry["optimal_set"] = entry["optimal_set"][:-1]
    entry["value"] = 5
    path.write_text(json.dumps(data))
    assert ExactCache(path).get("gamma", 3, 2) is None
    assert exact_gamma(3, 2, cache=ExactCache(path)).value == 6


def test_result_json():
    res = exact_gamma(2, 1)
    assert ExactResult.from_json(res.to_json()) == res


@pytest.mark.slow
def test_r5():
    g = [exact_gamma(5, d).value for d in range(6)]
    b = [exact_beta(5, d).value for d in range(6)]
    assert g == [0, 2, 8, 19, 30, 32]
    assert b == [0, 2, 13, 24, 30, 32]
    for d in range(6):
        assert g[d] + b[5 - d] == 32
        row = bounds_row(5, d)
        assert row.admits("gamma", g[d]) and row.admits("beta", b[d])
