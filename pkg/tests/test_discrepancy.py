import math

import numpy as np
import pytest

from qmcforge.discrepancy import (exact_star_discrepancy, r_tilde, r_u_lattice, r_u_poly,
                                  sine_factor, star_disc_bound_lattice,
                                  star_disc_bound_poly, star_disc_bound_rho_lattice,
                                  star_disc_bound_rho_poly)
from qmcforge.errors import UsageError
from qmcforge.gfpoly import GFPoly, smallest_irreducible
from qmcforge.korobov import LatticeRule, lattice_points
from qmcforge.oracle import reference_star_discrepancy
from qmcforge.walsh import PolyLatticeRule, poly_lattice_points
from qmcforge.weights import WeightSet

P3 = GFPoly(2, (1, 1, 0, 1))


class TestRLattice:
    def test_singleton_no_dual_in_box(self):
        assert r_u_lattice(LatticeRule(N=4, z=(1,)), [1]) == 0.0

    def test_pair_n2(self):
        assert r_u_lattice(LatticeRule(N=2, z=(1, 1)), [1, 2]) == 1.0

    def test_empty_subset_rejected(self):
        with pytest.raises(UsageError):
            r_u_lattice(LatticeRule(N=4, z=(1,)), [])

    def test_reflection_invariance(self):
        for N in (5, 8, 13):
            for z2 in range(1, N):
                a = r_u_lattice(LatticeRule(N=N, z=(1, z2)), [1, 2])
                b = r_u_lattice(LatticeRule(N=N, z=(1, N - z2 if z2 < N else z2)), [1, 2])
                assert a == pytest.approx(b, abs=0.0)

    def test_matches_direct_box_scan(self):
        rule = LatticeRule(N=6, z=(1, 5))
        got = r_u_lattice(rule, [1, 2])
        direct = 0.0
        for k1 in range(-2, 4):
            for k2 in range(-2, 4):
                if (k1, k2) == (0, 0):
                    continue
                if (k1 * 1 + k2 * 5) % 6 == 0:
                    direct += 1 / (max(1, abs(k1)) * max(1, abs(k2)))
        assert got == pytest.approx(direct, rel=1e-13)


class TestJoeBoundLattice:
    def test_singleton_example(self):
        b, _ = star_disc_bound_lattice(LatticeRule(N=4, z=(1,)), WeightSet.product([1.0]))
        assert b == pytest.approx(0.25)

    def test_zero_weights(self):
        b, _ = star_disc_bound_lattice(LatticeRule(N=4, z=(1, 3)),
                                       WeightSet.product([0.0, 0.0]))
        assert b == 0.0

    def test_pair_example(self):
        b, _ = star_disc_bound_lattice(LatticeRule(N=2, z=(1, 1)),
                                       WeightSet.order_dependent([1.0, 1.0]))
        assert b == pytest.approx(2.25)


class TestRhoBoundLattice:
    def test_singleton_example(self):
        W = WeightSet.product([1.0])
        b, vac = star_disc_bound_rho_lattice(LatticeRule(N=5, z=(1,)), 1.0, W, W)
        expect = 0.2 + 0.1 * (math.log(2) * math.log2(5) + 3.0)
        assert not vac
        assert b == pytest.approx(expect, rel=1e-12)

    def test_zero_prime_weights(self):
        W = WeightSet.product([1.0])
        Wp = WeightSet.product([0.0])
        b, vac = star_disc_bound_rho_lattice(LatticeRule(N=5, z=(1,)), 1.0, W, Wp)
        assert b == 0.0 and not vac

    def test_vacuous_flag(self):
        W = WeightSet.explicit({(1,): 1.0}, s_max=2)
        Wp = WeightSet.order_dependent([1.0, 1.0])
        b, vac = star_disc_bound_rho_lattice(LatticeRule(N=5, z=(1, 2)), 1.0, W, Wp)
        assert vac and math.isinf(b)

    def test_nonmonotone_rejected(self):
        W = WeightSet.explicit({(1,): 0.1, (1, 2): 0.5}, s_max=2)
        with pytest.raises(UsageError):
            star_disc_bound_rho_lattice(LatticeRule(N=5, z=(1, 2)), 1.0, W, W)


class TestRPoly:
    def test_r_tilde_values(self):
        assert r_tilde(0, 2) == 1.0
        assert r_tilde(1, 2) == pytest.approx(0.5)
        assert r_tilde(2, 2) == pytest.approx(0.25)

    def test_sine_factor(self):
        assert sine_factor(2) == 1.0
        assert sine_factor(3) == pytest.approx(1 + 2 / math.sqrt(3), rel=1e-12)

    def test_full_grid_has_empty_dual_box(self):
        rule = PolyLatticeRule(b=2, m=3, p=P3, q=(GFPoly.one(2),))
        assert r_u_poly(rule, [1]) == 0.0

    def test_matches_direct_scan(self):
        rule = PolyLatticeRule(b=2, m=2, p=GFPoly(2, (1, 1, 1)),
                               q=(GFPoly.from_code(2, 1), GFPoly.from_code(2, 3)))
        from qmcforge.oracle import dual_enumerate_poly
        direct = sum(r_tilde(k1, 2) * r_tilde(k2, 2)
                     for (k1, k2) in dual_enumerate_poly(rule, 2)
                     if (k1, k2) != (0, 0))
        assert r_u_poly(rule, [1, 2]) == pytest.approx(direct, rel=1e-13)


class TestRhoBoundPoly:
    def test_m3_example(self):
        W = WeightSet.product([1.0])
        rule = PolyLatticeRule(b=2, m=3, p=P3, q=(GFPoly.one(2),))
        b, vac = star_disc_bound_rho_poly(rule, 1.0, W, W)
        assert b == pytest.approx(0.375, rel=1e-12)

    def test_zero_prime_weights(self):
        W = WeightSet.product([1.0])
        Wp = WeightSet.product([0.0])
        rule = PolyLatticeRule(b=2, m=3, p=P3, q=(GFPoly.one(2),))
        b, _ = star_disc_bound_rho_poly(rule, 1.0, W, Wp)
        assert b == 0.0


class TestExactDstar:
    def test_equispaced(self):
        for N in (3, 8, 17):
            pts = lattice_points(LatticeRule(N=N, z=(1,)))
            assert exact_star_discrepancy(pts, N) == pytest.approx(1.0 / N, abs=1e-15)

    def test_single_point_at_origin(self):
        assert exact_star_discrepancy(np.asarray([[0]]), 1) == pytest.approx(1.0)

    def test_two_dim_example(self):
        pts = lattice_points(LatticeRule(N=2, z=(1, 1)))
        assert exact_star_discrepancy(pts, 2) == pytest.approx(0.75)

    def test_three_dims_rejected(self):
        with pytest.raises(UsageError):
            exact_star_discrepancy(np.zeros((4, 3), dtype=int), 4)

    def test_matches_reference_loop(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            N = int(rng.integers(2, 14))
            denom = int(rng.integers(N, 40))
            pts = rng.integers(0, denom, size=(N, 2))
            fast = exact_star_discrepancy(pts, denom)
            slow = reference_star_discrepancy(pts.tolist(), denom)
            assert fast == pytest.approx(slow, abs=1e-12)


class TestUpperBoundProperty:
    def test_lattice_bounds_dominate_exact(self):
        W = WeightSet.product([1.0, 1.0])
        for N in (4, 7, 12, 16):
            for z2 in (1, 3, N - 1):
                rule = LatticeRule(N=N, z=(1, z2))
                exact = exact_star_discrepancy(lattice_points(rule), N)
                joe, _ = star_disc_bound_lattice(rule, W)
                rho_b, _ = star_disc_bound_rho_lattice(rule, 1.0, W, W)
                # weighted D* with unit pair weight dominates the plain D*
                assert exact <= joe + 1e-9
                assert exact <= rho_b + 1e-9

    def test_poly_bounds_dominate_exact(self):
        W = WeightSet.product([1.0, 1.0])
        for m in (2, 3, 4):
            p = smallest_irreducible(2, m)
            for codes in ((1, 1), (1, 3), (3, 2 ** m - 1)):
                rule = PolyLatticeRule(b=2, m=m, p=p,
                                       q=tuple(GFPoly.from_code(2, c) for c in codes))
                exact = exact_star_discrepancy(poly_lattice_points(rule), 2 ** m)
                joe, _ = star_disc_bound_poly(rule, W)
                rho_b, _ = star_disc_bound_rho_poly(rule, 1.0, W, W)
                assert exact <= joe + 1e-9
                assert exact <= rho_b + 1e-9
