"""Rank-1 lattice rules and their worst-case error in weighted Korobov spaces.

The squared worst-case error of the rule with generating vector z and modulus
N is the dual-lattice sum

    P(z) = sum over nonempty u, sum over k_u in the dual of
           gamma_u * prod_{j in u} |k_j|^(-2 alpha),

which for integer alpha collapses to a single pass over the N points using
the even Bernoulli polynomial B_{2 alpha}.  The figure of merit rho is the
largest single dual term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from .errors import QmcforgeError, ResourceLimitError, UsageError
from .weights import SpaceParams, WeightSet, subset_product_sum, subsets_of, weighted_power_sum, zeta

# Monomial coefficients of B_2, B_4, B_6, B_8, highest degree first.
_BERNOULLI_EVEN = {
    1: (1.0, -1.0, 1.0 / 6),
    2: (1.0, -2.0, 1.0, 0.0, -1.0 / 30),
    3: (1.0, -3.0, 5.0 / 2, 0.0, -1.0 / 2, 0.0, 1.0 / 42),
    4: (1.0, -4.0, 14.0 / 3, 0.0, -7.0 / 3, 0.0, 2.0 / 3, 0.0, -1.0 / 30),
}

ZAREMBA_N_LIMIT = 1024
ZAREMBA_DIM_LIMIT = 4
SERIES_DIM_LIMIT = 4
SERIES_CELL_LIMIT = 2 * 10 ** 8


@dataclass(frozen=True)
class LatticeRule:
    """Rank-1 lattice rule: modulus N >= 2 and generating vector z.

    The node set is {({n z_1 / N}, ..., {n z_s / N}) : n = 0..N-1}.
    """

    N: int
    z: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(int(v) for v in self.z))
        if self.N < 2:
            raise UsageError(f"modulus N must be >= 2, got {self.N}")
        if len(self.z) < 1:
            raise UsageError("generating vector must have at least one component")
        if any(not 1 <= v <= self.N - 1 for v in self.z):
            raise UsageError(f"components of z must lie in 1..{self.N - 1}")

    @property
    def s(self) -> int:
        return len(self.z)

    def to_jsonable(self) -> dict:
        return {"type": "lattice", "N": self.N, "z": list(self.z)}


@dataclass(frozen=True)
class MeritReport:
    """Evaluated merit data for one rule under one (alpha, gamma) pair.

    ``per_subset`` maps a subset u to (inner sum or merit term, phi_u,
    phi_{u,0}); entries may be None when not computed.
    """

    p_value: float
    rho_value: float | None = None
    method: str = "closed-form"
    truncation_bound: float | None = None
    per_subset: Mapping[frozenset[int], tuple[float, int | None, int | None]] | None = None

    def to_jsonable(self) -> dict:
        subsets = None
        if self.per_subset is not None:
            subsets = [{"u": sorted(u), "inner": inner, "phi": phi}
                       for u, (inner, phi, _phi0) in sorted(
                           self.per_subset.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))]
        return {"P": self.p_value, "rho": self.rho_value, "method": self.method,
                "truncation_bound": self.truncation_bound, "per_subset": subsets}


def lattice_points(rule: LatticeRule) -> np.ndarray:
    """Integer numerators of the node set, shape (N, s); denominator is N.

    Row n holds (n * z_j) mod N, so the point is row / N exactly.
    """
    n = np.arange(rule.N, dtype=np.int64)
    return (n[:, None] * np.asarray(rule.z, dtype=np.int64)[None, :]) % rule.N


def bernoulli_even(alpha: int, x: float) -> float:
    """B_{2 alpha}(x) for alpha in {1, 2, 3, 4}, x in [0, 1), via Horner."""
    coeffs = _BERNOULLI_EVEN.get(alpha)
    if coeffs is None:
        raise UsageError(f"closed form supports alpha in 1..4, got {alpha}")
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def _require_closed_alpha(alpha: float) -> int:
    a = int(alpha)
    if a != alpha or a not in _BERNOULLI_EVEN:
        raise UsageError(
            f"closed form needs integer alpha in 1..4 (got {alpha}); use the series evaluator")
    return a


def omega_factor(alpha: int) -> float:
    """(2 pi)^(2 alpha) / ((-1)^(alpha+1) (2 alpha)!), the B_{2 alpha} scale."""
    sign = 1.0 if alpha % 2 == 1 else -1.0
    return sign * (2.0 * math.pi) ** (2 * alpha) / math.factorial(2 * alpha)


def omega_table(alpha: int, N: int) -> np.ndarray:
    """omega(a/N) for a = 0..N-1 where omega(x) = factor * B_{2 alpha}(x).

    omega is the Fourier kernel sum_{k != 0} exp(2 pi i k x) / |k|^(2 alpha).
    The table is mirrored across a = N/2 so that reflected candidates z and
    N - z produce bitwise identical values.
    """
    fac = omega_factor(alpha)
    half = np.arange(N // 2 + 1) / N
    coeffs = _BERNOULLI_EVEN[alpha]
    vals = np.zeros_like(half)
    for c in coeffs:
        vals = vals * half + c
    table = np.empty(N)
    table[: N // 2 + 1] = fac * vals
    table[N // 2 + 1:] = table[1: (N + 1) // 2][::-1]
    return table


def p_merit_closed(rule: LatticeRule, params: SpaceParams,
                   want_subsets: bool = False) -> MeritReport:
    """P(z) by the Bernoulli closed form (integer alpha in 1..4).

    Equals (1/N) sum over points of sum over nonempty u of
    gamma_u * prod_{j in u} omega(x_j).
    """
    alpha = _require_closed_alpha(params.alpha)
    table = omega_table(alpha, rule.N)
    factors = table[lattice_points(rule)]
    per_point = subset_product_sum(params.weights, factors)
    p = float(per_point.mean())
    per_subset = None
    if want_subsets:
        per_subset = {}
        for u in subsets_of(rule.s):
            g = params.weights.weight(u)
            cols = [j - 1 for j in sorted(u)]
            inner = g * float(np.prod(factors[:, cols], axis=1).mean())
            per_subset[u] = (inner, None, None)
    return MeritReport(p_value=p, method="closed-form", per_subset=per_subset)


def _series_tail_bound(W: WeightSet, s: int, alpha: float, K: int) -> float:
    """Majorant for the dual terms dropped by the box |k_j| <= K."""
    full = 1.0 + 2.0 * zeta(2.0 * alpha)
    capped = 1.0 + 2.0 * float(np.sum(np.arange(1, K + 1, dtype=np.float64) ** (-2.0 * alpha)))
    return weighted_power_sum(W, s, 1.0, full) - weighted_power_sum(W, s, 1.0, capped)


def p_merit_series(rule: LatticeRule, params: SpaceParams, K: int) -> MeritReport:
    """P(z) by truncated dual enumeration over the box |k_j| <= K.

    Works for any alpha > 1/2.  K >= N is required so that the minimal
    single-coordinate dual vectors (multiples of N) are reachable.  The
    report's truncation_bound majorizes the dropped tail.
    """
    if K < rule.N:
        raise UsageError(f"need K >= N (K={K}, N={rule.N})")
    s = rule.s
    if s > SERIES_DIM_LIMIT:
        raise UsageError(f"series evaluation supports s <= {SERIES_DIM_LIMIT}")
    if (2 * K + 1) ** s > SERIES_CELL_LIMIT:
        raise ResourceLimitError(f"series box (2K+1)^s too large at K={K}, s={s}")
    alpha = params.alpha
    rng = np.arange(-K, K + 1, dtype=np.int64)
    absr = np.abs(rng).astype(np.float64)
    absr[K] = 1.0  # k = 0 placeholder; excluded via the zero weight pattern
    radial_axis = absr ** (-2.0 * alpha)

    gamma_lut = np.zeros(1 << s)
    for u in subsets_of(s):
        gamma_lut[sum(1 << (j - 1) for j in u)] = params.weights.weight(u)

    shape = [1] * s
    dot = np.zeros((1,) * s, dtype=np.int64)
    radial = np.ones((1,) * s)
    pattern = np.zeros((1,) * s, dtype=np.int64)
    for j in range(s):
        sh = shape.copy()
        sh[j] = 2 * K + 1
        axis = rng.reshape(sh)
        dot = dot + axis * rule.z[j]
        radial = radial * radial_axis.reshape(sh)
        pattern = pattern + (axis != 0).astype(np.int64) * (1 << j)
    dual = (dot % rule.N) == 0
    p = float(np.sum(radial[dual] * gamma_lut[pattern[dual]]))
    bound = _series_tail_bound(params.weights, s, alpha, K)
    return MeritReport(p_value=p, method="truncated-series", truncation_bound=bound)


@lru_cache(maxsize=512)
def dual_product_minima(rule: LatticeRule) -> dict[frozenset[int], tuple[int, int]]:
    """(phi_u, phi_{u,0}) for every nonempty u of the rule, by full enumeration.

    phi_u is the minimum of prod |k_j| over dual vectors supported exactly on
    u with all components nonzero; phi_{u,0} allows zero components (product
    of max(1, |k_j|)).  Any dual vector reduces componentwise into
    (-N/2, N/2] without leaving the dual lattice, a component collapsing to 0
    only when it was a multiple of N; so scanning that box plus the value +N
    per component is exhaustive.
    """
    N, s = rule.N, rule.s
    if N > ZAREMBA_N_LIMIT or s > ZAREMBA_DIM_LIMIT:
        raise ResourceLimitError(f"dual minima enumeration capped at N <= {ZAREMBA_N_LIMIT}, "
                                 f"s <= {ZAREMBA_DIM_LIMIT}")
    if (N + 2) ** s > 5 * 10 ** 7:
        raise ResourceLimitError(f"dual minima enumeration too large for N={N}, s={s}")
    axis = np.concatenate([np.arange(-((N - 1) // 2), N // 2 + 1, dtype=np.int64),
                           np.asarray([N], dtype=np.int64)])
    shape = [1] * s
    dot = np.zeros((1,) * s, dtype=np.int64)
    prodmax = np.ones((1,) * s, dtype=np.int64)
    pattern = np.zeros((1,) * s, dtype=np.int64)
    for j in range(s):
        sh = shape.copy()
        sh[j] = axis.size
        a = axis.reshape(sh)
        dot = dot + a * rule.z[j]
        prodmax = prodmax * np.maximum(1, np.abs(a))
        pattern = pattern + (a != 0).astype(np.int64) * (1 << j)
    dual = ((dot % N) == 0).ravel()
    prodmax = prodmax.ravel()[dual]
    pattern = pattern.ravel()[dual]

    exact_min = {}
    for mask in range(1, 1 << s):
        sel = pattern == mask
        exact_min[mask] = int(prodmax[sel].min()) if sel.any() else None
    out = {}
    for u in subsets_of(s):
        umask = sum(1 << (j - 1) for j in u)
        phi_u = exact_min[umask]
        if phi_u is None:
            raise ResourceLimitError("dual enumeration missed a full-support vector")
        # direct phi_{u,0}: support contained in u, vector nonzero
        contained = (pattern & ~umask) == 0
        phi_u0 = int(prodmax[contained & (pattern != 0)].min())
        by_subsets = min(exact_min[v] for v in range(1, 1 << s)
                         if v & umask == v and exact_min[v] is not None)
        if phi_u0 != by_subsets:
            raise QmcforgeError("phi_{u,0} disagrees with min over subsets; enumeration bug")
        if len(u) >= 2 and phi_u0 > N / 2:
            raise QmcforgeError("phi_{u,0} exceeded N/2 on a mixed subset; enumeration bug")
        out[u] = (phi_u, phi_u0)
    return out


def zaremba_rho_value(rule: LatticeRule, params: SpaceParams) -> float:
    """rho alone, from the cached dual minima (no merit evaluation)."""
    minima = dual_product_minima(rule)
    return max(params.weights.weight(u) / float(phi_u) ** (2.0 * params.alpha)
               for u, (phi_u, _phi_u0) in minima.items())


def zaremba_rho(rule: LatticeRule, params: SpaceParams,
                series_K: int | None = None) -> MeritReport:
    """Figure of merit rho = max over u of gamma_u / phi_u(z)^(2 alpha).

    The report carries P as well (closed form for integer alpha, truncated
    series otherwise) plus the per-subset (term, phi_u, phi_{u,0}) breakdown.
    """
    minima = dual_product_minima(rule)
    alpha = params.alpha
    per_subset = {}
    rho = 0.0
    for u, (phi_u, phi_u0) in minima.items():
        g = params.weights.weight(u)
        term = g / float(phi_u) ** (2.0 * alpha)
        per_subset[u] = (term, phi_u, phi_u0)
        rho = max(rho, term)
    if alpha == int(alpha) and int(alpha) in _BERNOULLI_EVEN:
        base = p_merit_closed(rule, params)
    else:
        base = p_merit_series(rule, params, series_K or max(rule.N, 64))
    return MeritReport(p_value=base.p_value, rho_value=rho, method=base.method,
                       truncation_bound=base.truncation_bound, per_subset=per_subset)
