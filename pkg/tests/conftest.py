import numpy as np
import pytest

from qmcforge.weights import WeightSet


@pytest.fixture
def unit_weights():
    """gamma_u = 1 for every subset up to dimension 8 (order-dependent form)."""
    return WeightSet.order_dependent([1.0] * 8)


@pytest.fixture
def decaying_product():
    return WeightSet.product([j ** -2.0 for j in range(1, 17)])


def brute_force_monotone(W: WeightSet, s: int) -> bool:
    """Full pairwise check of gamma_v >= gamma_u over all v strictly inside u."""
    from itertools import combinations

    subsets = []
    for k in range(1, s + 1):
        subsets.extend(frozenset(c) for c in combinations(range(1, s + 1), k))
    for u in subsets:
        for v in subsets:
            if v < u and W.weight(v) < W.weight(u):
                return False
    return True


def random_lattice_rules(N: int, s: int, count: int, seed: int):
    """Fixed-seed random generating vectors for stability grids."""
    from qmcforge.korobov import LatticeRule

    rng = np.random.default_rng(seed)
    return [LatticeRule(N=N, z=tuple(int(v) for v in rng.integers(1, N, size=s)))
            for _ in range(count)]


def random_poly_rules(b: int, m: int, s: int, count: int, seed: int):
    from qmcforge.gfpoly import GFPoly, smallest_irreducible
    from qmcforge.walsh import PolyLatticeRule

    p = smallest_irreducible(b, m)
    rng = np.random.default_rng(seed)
    return [PolyLatticeRule(b=b, m=m, p=p,
                            q=tuple(GFPoly.from_code(b, int(c))
                                    for c in rng.integers(1, b ** m, size=s)))
            for _ in range(count)]
