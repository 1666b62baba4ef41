from fractions import Fraction

import pytest

from qmcforge.errors import UsageError
from qmcforge.gfpoly import (GFPoly, gf_is_irreducible, gf_mulmod, nu_m,
                             smallest_irreducible, tr_m)
from qmcforge.oracle import reference_laurent_digits


def poly(base, *coeffs):
    return GFPoly(base, tuple(coeffs))


class TestArithmetic:
    def test_mulmod_example(self):
        # (x+1)^2 mod (x^2+x+1) over GF(2) is x
        a = poly(2, 1, 1)
        p = poly(2, 1, 1, 1)
        assert gf_mulmod(a, a, p).coeffs == (0, 1)

    def test_zero_absorbs(self):
        a = poly(3, 2, 1)
        p = poly(3, 1, 0, 1)
        assert gf_mulmod(a, GFPoly.zero(3), p).is_zero()

    def test_identity(self):
        c = poly(2, 1, 0, 1)
        p = poly(2, 1, 1, 0, 0, 1)
        assert gf_mulmod(GFPoly.one(2), c, p).coeffs == c.coeffs

    def test_base_mismatch(self):
        with pytest.raises(UsageError):
            gf_mulmod(poly(2, 1), poly(3, 1), poly(3, 1, 1))

    def test_normalization_strips_leading_zeros(self):
        assert poly(2, 1, 1, 0, 0).coeffs == (1, 1)
        assert poly(2).degree == float("-inf")

    @pytest.mark.parametrize("base", [2, 3, 5])
    def test_ring_axioms_random_sample(self, base):
        import random

        rng = random.Random(base)
        polys = [GFPoly(base, tuple(rng.randrange(base) for _ in range(rng.randrange(1, 9))))
                 for _ in range(12)]
        for a, b, c in zip(polys, polys[4:], polys[8:]):
            assert ((a + b) + c).coeffs == (a + (b + c)).coeffs
            assert ((a * b) * c).coeffs == (a * (b * c)).coeffs
            assert (a * (b + c)).coeffs == (a * b + a * c).coeffs
            assert (a + (-a)).is_zero()

    def test_divmod_reconstructs(self):
        a = poly(3, 2, 2, 1, 0, 1)
        d = poly(3, 1, 2, 1)
        q, r = a.divmod(d)
        assert (q * d + r).coeffs == a.coeffs
        assert r.degree < d.degree


class TestIrreducibility:
    def test_known_irreducible(self):
        assert gf_is_irreducible(poly(2, 1, 1, 1))          # x^2+x+1
        assert gf_is_irreducible(poly(2, 1, 1, 0, 1))       # x^3+x+1

    def test_square_is_reducible(self):
        assert not gf_is_irreducible(poly(2, 0, 0, 1))      # x^2

    def test_degree_one_always(self):
        for b in (2, 3, 5):
            for c in range(b):
                assert gf_is_irreducible(poly(b, c, 1))

    def test_matches_brute_force_factor_scan(self):
        # degree <= 4 over GF(2): reducible iff some product of lower-degree
        # monics reproduces it
        b = 2
        monics = {d: [GFPoly.from_code(b, low + b ** d) for low in range(b ** d)]
                  for d in range(1, 4)}
        for code in range(b ** 4, 2 * b ** 4):
            p = GFPoly.from_code(b, code)
            reducible = False
            for d1 in range(1, 4):
                d2 = 4 - d1
                if d2 < 1 or d2 > 3 or d1 > d2:
                    continue
                for f1 in monics[d1]:
                    for f2 in monics[d2]:
                        if (f1 * f2).coeffs == p.coeffs:
                            reducible = True
            assert gf_is_irreducible(p) == (not reducible)

    def test_smallest_irreducible_values(self):
        assert smallest_irreducible(2, 3).coeffs == (1, 1, 0, 1)       # x^3+x+1
        assert smallest_irreducible(2, 5).coeffs == (1, 0, 1, 0, 0, 1)  # x^5+x^2+1
        assert smallest_irreducible(2, 1).coeffs == (0, 1)             # x


class TestDigitExpansion:
    def test_example_x_over_trinomial(self):
        p = poly(2, 1, 1, 1)
        e = nu_m(poly(2, 0, 1), p, 2)
        assert e.digits == (1, 1)
        assert e.value == Fraction(3, 4)

    def test_zero_numerator(self):
        p = poly(2, 1, 1, 1)
        e = nu_m(GFPoly.zero(2), p, 2)
        assert e.digits == (0, 0)
        assert e.value == 0

    def test_power_modulus_shift(self):
        p = poly(2, 0, 0, 1)  # x^2
        e = nu_m(GFPoly.one(2), p, 2)
        assert e.digits == (0, 1)
        assert e.value == Fraction(1, 4)

    def test_degree_mismatch(self):
        with pytest.raises(UsageError):
            nu_m(GFPoly.one(2), poly(2, 1, 1, 1), 3)

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_exhaustive_against_reference_division(self, m):
        b = 2
        for pcode in range(b ** m, 2 * b ** m):
            p = GFPoly.from_code(b, pcode)
            for ncode in range(b ** m):
                numer = GFPoly.from_code(b, ncode)
                got = nu_m(numer, p, m).digits
                ref = reference_laurent_digits(numer, p, m)
                assert got == ref

    def test_reference_division_period(self):
        p = poly(2, 1, 1, 1)
        assert reference_laurent_digits(poly(2, 0, 1), p, 6) == (1, 1, 0, 1, 1, 0)
        assert reference_laurent_digits(GFPoly.zero(2), p, 5) == (0,) * 5
        assert reference_laurent_digits(GFPoly.one(2), poly(2, 0, 0, 1), 4) == (0, 1, 0, 0)


class TestTruncation:
    def test_zero(self):
        assert tr_m(0, 4, 2).is_zero()

    def test_digit_transcription(self):
        assert tr_m(6, 3, 2).coeffs == (0, 1, 1)  # 6 = 110 in base 2

    def test_truncates_high_digits(self):
        assert tr_m(5, 2, 2).coeffs == (1,)  # 101 -> keep low two digits

    @pytest.mark.parametrize("b,m", [(2, 4), (3, 3)])
    def test_bijection_on_g_m(self, b, m):
        seen = {tr_m(k, m, b).coeffs for k in range(b ** m)}
        assert len(seen) == b ** m
