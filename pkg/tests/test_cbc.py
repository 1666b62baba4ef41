import math

import numpy as np
import pytest

from qmcforge.cbc import cbc_construct, cbc_construct_fast, euler_totient, primitive_root
from qmcforge.errors import UsageError
from qmcforge.korobov import LatticeRule, omega_table, p_merit_closed
from qmcforge.stability import prop_bound_lattice
from qmcforge.weights import SpaceParams, WeightSet


def unit_params(s, alpha=1.0):
    return SpaceParams(alpha=alpha, weights=WeightSet.order_dependent([1.0] * s))


class TestTotient:
    def test_one(self):
        assert euler_totient(1) == 1

    def test_twelve(self):
        assert euler_totient(12) == 4

    def test_prime(self):
        assert euler_totient(13) == 12

    @pytest.mark.parametrize("N", [2, 6, 30, 97, 360])
    def test_matches_gcd_scan(self, N):
        direct = sum(1 for n in range(1, N + 1) if math.gcd(n, N) == 1)
        assert euler_totient(N) == direct


class TestPrimitiveRoot:
    @pytest.mark.parametrize("N", [3, 5, 13, 31, 127, 251])
    def test_generates_whole_group(self, N):
        g = primitive_root(N)
        seen = set()
        acc = 1
        for _ in range(N - 1):
            seen.add(acc)
            acc = (acc * g) % N
        assert seen == set(range(1, N))

    def test_composite_rejected(self):
        with pytest.raises(UsageError):
            primitive_root(12)


class TestNaiveCbc:
    def test_first_component_fixed(self):
        for N in (4, 9, 17):
            rule, _ = cbc_construct(N, 1, unit_params(1))
            assert rule.z == (1,)

    def test_n5_pair_tiebreak(self):
        # brute force: symmetric candidates 2 and 3 tie; smallest wins
        params = unit_params(2)
        table = omega_table(1, 5)
        n = np.arange(5)
        merits = {}
        for z2 in range(1, 5):
            f1 = table[n % 5]
            f2 = table[(z2 * n) % 5]
            merits[z2] = float(np.mean((1 + f1) * (1 + f2) - 1))
        best = min(merits.values())
        tied = {z for z, m in merits.items() if m <= best * (1 + 1e-12)}
        assert tied == {2, 3}
        rule, _ = cbc_construct(5, 2, params)
        assert rule.z == (1, 2)

    def test_prefix_property(self):
        params = SpaceParams(alpha=1.0, weights=WeightSet.product(
            [j ** -2.0 for j in range(1, 7)]))
        full, _ = cbc_construct(32, 6, params)
        for s in range(1, 6):
            part, _ = cbc_construct(32, s, params)
            assert part.z == full.z[:s]

    def test_trace_merit_matches_fresh_evaluation(self):
        params = SpaceParams(alpha=2.0, weights=WeightSet.product([1.0, 0.5, 0.25]))
        rule, trace = cbc_construct(27, 3, params)
        fresh = p_merit_closed(rule, params).p_value
        assert trace.choices[-1][1] == pytest.approx(fresh, rel=1e-12)
        assert trace.evaluations == 1 + 2 * 26

    @pytest.mark.parametrize("kind", ["pod", "order", "explicit"])
    def test_other_weight_kinds_match_rescans(self, kind):
        # the incremental state must agree with a fresh argmin at every step
        if kind == "pod":
            W = WeightSet.pod([1.0, 0.5, 0.25], [1.0, 0.8, 0.6])
        elif kind == "order":
            W = WeightSet.order_dependent([1.0, 0.5, 0.25])
        else:
            W = WeightSet.explicit({(1,): 1.0, (2,): 0.7, (1, 2): 0.4,
                                    (1, 3): 0.2, (1, 2, 3): 0.1}, s_max=3)
        params = SpaceParams(alpha=1.0, weights=W)
        rule, trace = cbc_construct(16, 3, params)
        for ell in range(1, 3):
            prefix = rule.z[:ell]
            merits = {}
            for cand in range(1, 16):
                trial = LatticeRule(N=16, z=prefix + (cand,))
                merits[cand] = p_merit_closed(trial, params).p_value
            best = min(merits.values())
            expect = min(c for c, m in merits.items()
                         if m <= best + 1e-12 * abs(best))
            assert rule.z[ell] == expect

    def test_zero_new_weight_keeps_smallest_candidate(self):
        W = WeightSet.product([1.0, 0.0])
        rule, _ = cbc_construct(11, 2, SpaceParams(alpha=1, weights=W))
        assert rule.z == (1, 1)

    def test_cbc_guarantee(self):
        params = SpaceParams(alpha=1.0, weights=WeightSet.product([1.0, 0.25]))
        for N in (8, 13, 21):
            rule, _ = cbc_construct(N, 2, params)
            p = p_merit_closed(rule, params).p_value
            for lam in (1.0, 0.75):
                bound = prop_bound_lattice(N, 2, 1.0, params.weights, lam)
                assert p <= bound * (1 + 1e-9)


class TestFastCbc:
    def test_composite_rejected(self):
        with pytest.raises(UsageError):
            cbc_construct_fast(12, 2, 1, [1.0, 1.0])

    def test_dimension_one(self):
        rule, _ = cbc_construct_fast(13, 1, 1, [1.0])
        assert rule.z == (1,)

    @pytest.mark.parametrize("N,s", [(13, 4), (31, 5), (127, 6), (251, 8)])
    def test_matches_naive(self, N, s):
        gammas = [j ** -2.0 for j in range(1, s + 1)]
        fast_rule, fast_trace = cbc_construct_fast(N, s, 1, gammas)
        naive_rule, naive_trace = cbc_construct(
            N, s, SpaceParams(alpha=1.0, weights=WeightSet.product(gammas)))
        assert fast_rule.z == naive_rule.z
        for (_, mf), (_, mn) in zip(fast_trace.choices, naive_trace.choices):
            assert mf == pytest.approx(mn, rel=1e-9)

    def test_matches_naive_alpha2(self):
        gammas = [1.0, 0.5, 0.25]
        fast_rule, _ = cbc_construct_fast(31, 3, 2, gammas)
        naive_rule, _ = cbc_construct(
            31, 3, SpaceParams(alpha=2.0, weights=WeightSet.product(gammas)))
        assert fast_rule.z == naive_rule.z


class TestConvergenceRate:
    def test_sqrtp_slope_near_minus_one(self):
        gammas = [1.0, 0.25]
        logs = []
        for N in (17, 31, 61, 127, 251):
            rule, _ = cbc_construct_fast(N, 2, 1, gammas)
            p = p_merit_closed(rule, SpaceParams(alpha=1.0,
                                                 weights=WeightSet.product(gammas))).p_value
            logs.append((math.log(N), 0.5 * math.log(p)))
        xs = np.asarray([x for x, _ in logs])
        ys = np.asarray([y for _, y in logs])
        slope = float(np.polyfit(xs, ys, 1)[0])
        assert slope <= -0.85
