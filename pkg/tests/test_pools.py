"""Pool construction and random selection tests."""

from __future__ import annotations

import math

import pytest
from scipy import stats

from spwtsim import build_lss, build_pool, build_pss, build_qss, select_random
from spwtsim.pools import (SubcarrierPool, lss_cardinality, pss_cardinality,
                           pss_cardinality_estimate, qss_cardinality, sieve_primes)


def trial_division_primes(limit: int) -> list[int]:
    """Independent primality predicate for cross-checking the sieve."""
    out = []
    for n in range(2, limit + 1):
        if all(n % q for q in range(2, int(math.isqrt(n)) + 1)):
            out.append(n)
    return out


class TestLss:
    def test_small_enumeration(self):
        pool = build_lss(16, a=3, b=1)
        assert pool.indices == (1, 4, 7, 10, 13)
        assert pool.cardinality == 5
        assert lss_cardinality(16, 3, 1) == 5

    def test_degenerate_full_set(self):
        pool = build_lss(16, a=1, b=0)
        assert pool.indices == tuple(range(16))
        assert pool.cardinality == 16

    def test_even_indices_count(self):
        assert build_lss(16384, a=2, b=0).cardinality == 8192

    def test_membership_predicate(self):
        pool = build_lss(1000, a=7, b=3)
        assert all(k % 7 == 3 for k in pool.indices)
        assert all(0 <= k < 1000 for k in pool.indices)
        assert pool.cardinality == lss_cardinality(1000, 7, 3)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            build_lss(16, a=0, b=1)
        with pytest.raises(ValueError):
            build_lss(16, a=2, b=16)


class TestQss:
    def test_squares_below_16(self):
        pool = build_qss(16, 1, 0, 0)
        assert pool.indices == (0, 1, 4, 9)
        assert pool.cardinality == 4

    @pytest.mark.parametrize("ns,expected", [(1000, 31), (16384, 128)])
    def test_canonical_cardinality(self, ns, expected):
        pool = build_qss(ns, 1, 0, 0)
        assert pool.cardinality == expected == qss_cardinality(ns)

    def test_cardinality_formula_over_range(self):
        for ns in [4, 5, 10, 100, 1001, 4096, 99856, 10 ** 6]:
            assert build_qss(ns, 1, 0, 0).cardinality == math.isqrt(ns)

    def test_general_parameters(self):
        pool = build_qss(100, a=2, b=3, c=1)
        expected = tuple(2 * s * s + 3 * s + 1 for s in range(7))  # 2*49+21+1 = 120 > 99
        assert pool.indices == expected

    def test_membership_predicate(self):
        pool = build_qss(5000, a=3, b=1, c=2)
        gen = {3 * s * s + s + 2 for s in range(50)}
        assert all(k in gen for k in pool.indices)

    def test_duplicate_values_rejected(self):
        # vertex at s = 2 makes s=1 and s=3 collide: 4 - 4s + s^2
        with pytest.raises(ValueError):
            build_qss(100, a=1, b=-4, c=4)

    def test_invalid_leading_coefficient(self):
        with pytest.raises(ValueError):
            build_qss(100, a=0)


class TestPss:
    def test_small_enumeration(self):
        pool = build_pss(16)
        assert pool.indices == (2, 3, 5, 7, 11, 13)
        assert pool.cardinality == 6

    def test_sieve_against_trial_division(self):
        assert list(sieve_primes(999)) == trial_division_primes(999)
        pool = build_pss(1000)
        assert pool.cardinality == len(trial_division_primes(999)) == 168

    def test_estimate_undercounts_at_1000(self):
        est = pss_cardinality_estimate(1000)
        assert est == pytest.approx(1000 / math.log(1000))
        assert est == pytest.approx(144.76, abs=0.01)
        assert pss_cardinality(1000) > est

    def test_exceeds_quadratic_pool_at_16384(self):
        assert pss_cardinality(16384) > qss_cardinality(16384) == 128

    def test_too_small(self):
        with pytest.raises(ValueError):
            build_pss(2)


class TestPoolInvariants:
    @pytest.mark.parametrize("pool", [
        build_lss(512, a=3, b=2),
        build_qss(512, 1, 0, 0),
        build_pss(512),
    ], ids=["lss", "qss", "pss"])
    def test_strictly_increasing_in_range(self, pool):
        idx = pool.indices
        assert all(b > a for a, b in zip(idx, idx[1:]))
        assert 0 <= idx[0] and idx[-1] < pool.num_subcarriers

    def test_constructor_rejects_disorder(self):
        with pytest.raises(ValueError):
            SubcarrierPool("lss", 16, (3, 1, 5))
        with pytest.raises(ValueError):
            SubcarrierPool("pss", 16, (2, 3, 17))
        with pytest.raises(ValueError):
            SubcarrierPool("xss", 16, (1, 2))

    def test_json_round_trip(self):
        pool = build_qss(100, a=2, b=3, c=1)
        clone = SubcarrierPool.from_dict(pool.to_dict())
        assert clone == pool

    def test_build_pool_dispatch(self):
        assert build_pool("lss", 64, a=4, b=1).kind == "lss"
        assert build_pool("qss", 64).kind == "qss"
        assert build_pool("pss", 64).kind == "pss"
        with pytest.raises(ValueError):
            build_pool("fss", 64)


class TestSelectRandom:
    def test_forced_selection_returns_whole_pool(self):
        pool = build_pss(16)
        plan = select_random(pool, 6, seed=0)
        assert plan.indices == pool.indices

    def test_determinism(self):
        pool = build_pss(4096)
        a = select_random(pool, 50, seed=123)
        b = select_random(pool, 50, seed=123)
        assert a.indices == b.indices
        assert a.indices != select_random(pool, 50, seed=124).indices

    def test_subset_of_pool_ascending(self):
        pool = build_lss(10000, a=3, b=1)
        plan = select_random(pool, 64, seed=5)
        assert len(set(plan.indices)) == 64
        assert set(plan.indices) <= set(pool.indices)
        assert plan.indices == tuple(sorted(plan.indices))
        assert plan.source_kind == "lss"

    def test_pool_too_small(self):
        with pytest.raises(ValueError):
            select_random(build_pss(16), 7, seed=0)

    def test_chi_square_uniformity_over_subsets(self):
        # all C(6,2) = 15 pairs from a 6-element pool should be equally likely
        pool = build_pss(16)
        draws = 100_000
        counts: dict[tuple, int] = {}
        for seed in range(draws):
            plan = select_random(pool, 2, seed=seed)
            counts[plan.indices] = counts.get(plan.indices, 0) + 1
        assert len(counts) == 15
        _, p_value = stats.chisquare(list(counts.values()))
        assert p_value > 0.001
