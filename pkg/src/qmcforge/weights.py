"""Coordinate-subset weights gamma_u and the aggregate sums used by error bounds.

A weight set assigns a nonnegative number gamma_u to every nonempty subset u
of coordinate indices {1, ..., s_max}.  Four shapes are supported:

    product   gamma_u = prod_{j in u} gamma_j
    pod       gamma_u = Gamma_{|u|} * prod_{j in u} gamma_j
    order     gamma_u = Gamma_{|u|}
    explicit  finite table of subsets; unlisted subsets weigh 0
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import ResourceLimitError, UsageError

S_MAX_DEFAULT = 64

# Subset enumeration cutoff for explicit tables and generic fallbacks (2^s cost).
ENUM_DIM_LIMIT = 20

_BERNOULLI_NUMBERS = (1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730)


def zeta(x: float) -> float:
    """Riemann zeta for x > 1 by Euler-Maclaurin summation.

    Absolute error below 1e-14 for all x > 1 + 1e-3; no special-function
    dependency.
    """
    if x <= 1.0:
        raise UsageError(f"zeta({x}) diverges; need exponent > 1")
    M = 64
    total = float(np.sum(np.arange(1, M, dtype=np.float64) ** (-x)))
    total += 0.5 * M ** (-x)
    total += M ** (1.0 - x) / (x - 1.0)
    # Correction terms B_{2i}/(2i)! * x(x+1)...(x+2i-2) * M^(-x-2i+1).
    poch = x
    for i, b2i in enumerate(_BERNOULLI_NUMBERS, start=1):
        total += b2i / math.factorial(2 * i) * poch * M ** (-x - 2 * i + 1)
        poch *= (x + 2 * i - 1) * (x + 2 * i)
    return total


def _as_weight_tuple(values: Iterable[float], name: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if any(v < 0 or not math.isfinite(v) for v in out):
        raise UsageError(f"{name} entries must be finite and >= 0")
    return out


@dataclass(frozen=True)
class WeightSet:
    """Immutable weight assignment gamma_u over coordinate subsets.

    Use the classmethod constructors; the raw fields depend on ``kind``.
    Coordinates are 1-based.  ``s_max`` is the largest dimension for which
    weights are defined.
    """

    kind: str
    gamma: tuple[float, ...] = ()
    Gamma: tuple[float, ...] = ()
    table: tuple[tuple[frozenset[int], float], ...] = ()
    s_max: int = S_MAX_DEFAULT

    @classmethod
    def product(cls, gammas: Sequence[float]) -> "WeightSet":
        g = _as_weight_tuple(gammas, "gamma")
        if not g:
            raise UsageError("product weights need at least one gamma_j")
        return cls(kind="product", gamma=g, s_max=len(g))

    @classmethod
    def pod(cls, Gammas: Sequence[float], gammas: Sequence[float]) -> "WeightSet":
        G = _as_weight_tuple(Gammas, "Gamma")
        g = _as_weight_tuple(gammas, "gamma")
        if not G or not g:
            raise UsageError("pod weights need Gamma_k and gamma_j sequences")
        return cls(kind="pod", gamma=g, Gamma=G, s_max=min(len(g), len(G)))

    @classmethod
    def order_dependent(cls, Gammas: Sequence[float]) -> "WeightSet":
        G = _as_weight_tuple(Gammas, "Gamma")
        if not G:
            raise UsageError("order-dependent weights need Gamma_k entries")
        return cls(kind="order", Gamma=G, s_max=len(G))

    @classmethod
    def explicit(cls, mapping: Mapping[Iterable[int], float],
                 s_max: int = S_MAX_DEFAULT) -> "WeightSet":
        entries = []
        for u, w in mapping.items():
            fs = frozenset(int(j) for j in u)
            if not fs or min(fs) < 1:
                raise UsageError("explicit weight subsets must be nonempty sets of indices >= 1")
            w = float(w)
            if w < 0 or not math.isfinite(w):
                raise UsageError("explicit weights must be finite and >= 0")
            entries.append((fs, w))
        entries.sort(key=lambda e: (len(e[0]), sorted(e[0])))
        top = max((max(fs) for fs, _ in entries), default=1)
        return cls(kind="explicit", table=tuple(entries), s_max=max(s_max, top))

    @classmethod
    def from_formula(cls, kind: str, formula: str, s_max: int = S_MAX_DEFAULT,
                     Gammas: Sequence[float] | None = None) -> "WeightSet":
        fn = parse_weight_formula(formula)
        seq = [fn(j) for j in range(1, s_max + 1)]
        if kind == "product":
            return cls.product(seq)
        if kind == "pod":
            if Gammas is None:
                raise UsageError("pod weights need a Gamma sequence")
            return cls.pod(Gammas, seq)
        if kind == "order":
            return cls.order_dependent(seq)
        raise UsageError(f"formula weights unsupported for kind {kind!r}")

    def _check_subset(self, u: Iterable[int]) -> frozenset[int]:
        fs = frozenset(int(j) for j in u)
        if not fs:
            raise UsageError("coordinate subset u must be nonempty")
        if min(fs) < 1 or max(fs) > self.s_max:
            raise UsageError(f"subset {sorted(fs)} outside 1..{self.s_max}")
        return fs

    def weight(self, u: Iterable[int]) -> float:
        """gamma_u for a nonempty subset u of {1, ..., s_max}."""
        fs = self._check_subset(u)
        if self.kind == "product":
            return math.prod(self.gamma[j - 1] for j in fs)
        if self.kind == "pod":
            return self.Gamma[len(fs) - 1] * math.prod(self.gamma[j - 1] for j in fs)
        if self.kind == "order":
            return self.Gamma[len(fs) - 1]
        for subset, w in self.table:
            if subset == fs:
                return w
        return 0.0

    def powered(self, t: float) -> "WeightSet":
        """Weight set with every gamma_u raised to the power t (t > 0)."""
        if t <= 0:
            raise UsageError("weight power must be positive")
        if self.kind == "product":
            return WeightSet.product([g ** t for g in self.gamma])
        if self.kind == "pod":
            return WeightSet.pod([G ** t for G in self.Gamma], [g ** t for g in self.gamma])
        if self.kind == "order":
            return WeightSet.order_dependent([G ** t for G in self.Gamma])
        return WeightSet.explicit({fs: w ** t for fs, w in self.table}, s_max=self.s_max)

    def scaled(self, c: float) -> "WeightSet":
        """Weight set with every gamma_u multiplied by c >= 0."""
        if c < 0:
            raise UsageError("weight scale must be >= 0")
        if self.kind == "product":
            # c * prod gamma_j is not a product form; route through pod.
            return WeightSet.pod([c] * len(self.gamma), self.gamma)
        if self.kind == "pod":
            return WeightSet.pod([c * G for G in self.Gamma], self.gamma)
        if self.kind == "order":
            return WeightSet.order_dependent([c * G for G in self.Gamma])
        return WeightSet.explicit({fs: c * w for fs, w in self.table}, s_max=self.s_max)

    def to_jsonable(self) -> dict:
        if self.kind == "product":
            return {"kind": "product", "gamma": list(self.gamma)}
        if self.kind == "pod":
            return {"kind": "pod", "Gamma": list(self.Gamma), "gamma": list(self.gamma)}
        if self.kind == "order":
            return {"kind": "order", "Gamma": list(self.Gamma)}
        return {"kind": "explicit",
                "weights": {",".join(str(j) for j in sorted(fs)): w for fs, w in self.table},
                "s_max": self.s_max}

    @classmethod
    def from_jsonable(cls, obj: dict) -> "WeightSet":
        kind = obj.get("kind")
        if kind == "product":
            g = obj["gamma"]
            if isinstance(g, str):
                return cls.from_formula("product", g, int(obj.get("s_max", S_MAX_DEFAULT)))
            return cls.product(g)
        if kind == "pod":
            g = obj["gamma"]
            if isinstance(g, str):
                return cls.from_formula("pod", g, int(obj.get("s_max", S_MAX_DEFAULT)),
                                        Gammas=obj["Gamma"])
            return cls.pod(obj["Gamma"], g)
        if kind == "order":
            return cls.order_dependent(obj["Gamma"])
        if kind == "explicit":
            mapping = {tuple(int(t) for t in key.split(",")): w
                       for key, w in obj["weights"].items()}
            return cls.explicit(mapping, s_max=int(obj.get("s_max", S_MAX_DEFAULT)))
        raise UsageError(f"unknown weight kind {kind!r}")


_FORMULA_RE = re.compile(
    r"^\s*(?:(?P<c>[-+]?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)\s*\*\s*)?"
    r"j\s*\^\s*(?P<e>[-+]?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)\s*$"
)


def parse_weight_formula(text: str) -> Callable[[int], float]:
    """Parse 'j^c' or 'c*j^e' into the map j -> c * j**e."""
    m = _FORMULA_RE.match(text)
    if not m:
        raise UsageError(f"weight formula {text!r} not of the form j^c or c*j^e")
    c = float(m.group("c")) if m.group("c") else 1.0
    e = float(m.group("e"))
    return lambda j: c * float(j) ** e


@dataclass(frozen=True)
class SpaceParams:
    """Smoothness alpha > 1/2 together with a weight set."""

    alpha: float
    weights: WeightSet

    def __post_init__(self):
        if not self.alpha > 0.5:
            raise UsageError(f"alpha must exceed 1/2, got {self.alpha}")


def subsets_of(s: int) -> Iterable[frozenset[int]]:
    """All nonempty subsets of {1, ..., s} (2^s - 1 of them)."""
    for k in range(1, s + 1):
        for combo in combinations(range(1, s + 1), k):
            yield frozenset(combo)


def _guard_enum(s: int) -> None:
    if s > ENUM_DIM_LIMIT:
        raise ResourceLimitError(f"subset enumeration capped at s <= {ENUM_DIM_LIMIT}, got {s}")


def weight(W: WeightSet, u: Iterable[int]) -> float:
    """gamma_u; module-level alias for WeightSet.weight."""
    return W.weight(u)


def check_monotone(W: WeightSet, s: int) -> bool:
    """True iff gamma_v >= gamma_u whenever v is a nonempty proper subset of u.

    Checked through single-element removals (gamma_{u\\{j}} >= gamma_u), which
    implies the full condition by transitivity.  Product, pod and order kinds
    reduce to small index scans; explicit tables only need their own entries
    checked because unlisted subsets weigh 0.
    """
    if not 1 <= s <= W.s_max:
        raise UsageError(f"dimension s={s} outside 1..{W.s_max}")
    if s == 1:
        return True
    if W.kind == "product":
        # gamma_{u\{j}} - gamma_u = prod_{i in u\{j}} gamma_i * (1 - gamma_j).
        heavy = [j for j in range(1, s + 1) if W.gamma[j - 1] > 1.0]
        for j in heavy:
            if any(W.gamma[i - 1] > 0.0 for i in range(1, s + 1) if i != j):
                return False
        return True
    if W.kind == "order":
        return all(W.Gamma[k - 2] >= W.Gamma[k - 1] for k in range(2, s + 1))
    if W.kind == "pod":
        # For u of size k containing j: Gamma_{k-1} >= Gamma_k * gamma_j unless
        # every (k-1)-subset of the other coordinates has a zero product.
        positives = sum(1 for i in range(1, s + 1) if W.gamma[i - 1] > 0.0)
        for k in range(2, s + 1):
            for j in range(1, s + 1):
                others_positive = positives - (1 if W.gamma[j - 1] > 0.0 else 0)
                attainable = others_positive >= k - 1
                if attainable and W.Gamma[k - 2] < W.Gamma[k - 1] * W.gamma[j - 1]:
                    return False
        return True
    # explicit: removals from unlisted subsets (gamma_u = 0) hold trivially
    for fs, w in W.table:
        if len(fs) < 2 or max(fs) > s or w == 0.0:
            continue
        for j in fs:
            if W.weight(fs - {j}) < w:
                return False
    return True


def weighted_power_sum(W: WeightSet, s: int, lam: float, factor: float) -> float:
    """Sum over nonempty u of gamma_u^lam * factor^|u|.

    Product weights use the closed form prod_j(1 + gamma_j^lam * factor) - 1;
    pod and order kinds group by subset size; explicit tables enumerate their
    entries.
    """
    if not 1 <= s <= W.s_max:
        raise UsageError(f"dimension s={s} outside 1..{W.s_max}")
    if W.kind == "product":
        return math.prod(1.0 + W.gamma[j] ** lam * factor for j in range(s)) - 1.0
    if W.kind == "order":
        return sum(W.Gamma[k - 1] ** lam * factor ** k * math.comb(s, k)
                   for k in range(1, s + 1))
    if W.kind == "pod":
        elem = _elementary_symmetric([g ** lam for g in W.gamma[:s]])
        return sum(W.Gamma[k - 1] ** lam * factor ** k * elem[k] for k in range(1, s + 1))
    return sum(w ** lam * factor ** len(fs) for fs, w in W.table
               if w > 0.0 and max(fs) <= s)


def weighted_zeta_sum(W: WeightSet, s: int, lam: float, alpha: float) -> float:
    """Sum over nonempty u of gamma_u^lam * (2 zeta(2 alpha lam))^|u|."""
    if lam > 1.0 or 2.0 * alpha * lam <= 1.0:
        raise UsageError(f"need 1/(2 alpha) < lambda <= 1, got lambda={lam}, alpha={alpha}")
    return weighted_power_sum(W, s, lam, 2.0 * zeta(2.0 * alpha * lam))


def _elementary_symmetric(values: Sequence[float]) -> list[float]:
    """e_0..e_n of the given values via the standard DP recurrence."""
    e = [1.0] + [0.0] * len(values)
    for i, v in enumerate(values, start=1):
        for k in range(i, 0, -1):
            e[k] += v * e[k - 1]
    return e


def subset_product_sum(W: WeightSet, factors: np.ndarray) -> np.ndarray:
    """Per-row sums S(n) = sum over nonempty u of gamma_u * prod_{j in u} factors[n, j-1].

    ``factors`` has shape (npoints, s).  This is the inner kernel of the
    computable merit forms; rows are independent.
    """
    factors = np.asarray(factors, dtype=np.float64)
    npoints, s = factors.shape
    if not 1 <= s <= W.s_max:
        raise UsageError(f"dimension s={s} outside 1..{W.s_max}")
    if W.kind == "product":
        g = np.asarray(W.gamma[:s])
        return np.prod(1.0 + g[None, :] * factors, axis=1) - 1.0
    if W.kind in ("pod", "order"):
        t = factors if W.kind == "order" else np.asarray(W.gamma[:s])[None, :] * factors
        e = np.zeros((npoints, s + 1))
        e[:, 0] = 1.0
        for j in range(s):
            for k in range(j + 1, 0, -1):
                e[:, k] += t[:, j] * e[:, k - 1]
        G = np.asarray(W.Gamma[:s])
        return e[:, 1:s + 1] @ G
    out = np.zeros(npoints)
    for fs, w in W.table:
        if w == 0.0 or max(fs) > s:
            continue
        cols = [j - 1 for j in sorted(fs)]
        out += w * np.prod(factors[:, cols], axis=1)
    return out


def ratio_size_sum(W: WeightSet, Wprime: WeightSet, ratio_exp: float,
                   size_factors: Sequence[float], s: int) -> tuple[float, bool]:
    """Sum over nonempty u of (gamma'_u / gamma_u^ratio_exp) * size_factors[|u|].

    Returns (value, vacuous); vacuous is True when some gamma_u = 0 while
    gamma'_u > 0, in which case the value is +inf.  The 0/0 case counts as 0.
    """
    _guard_enum(s)
    total = 0.0
    vacuous = False
    for u in subsets_of(s):
        wp = Wprime.weight(u)
        if wp == 0.0:
            continue
        w = W.weight(u)
        if w == 0.0:
            vacuous = True
            continue
        total += wp / w ** ratio_exp * size_factors[len(u)]
    return (math.inf if vacuous else total), vacuous


def weighted_order_sum(Wprime: WeightSet, s: int) -> float:
    """Sum over nonempty u of gamma'_u * |u| (tractability probe quantity)."""
    _guard_enum(s)
    return sum(Wprime.weight(u) * len(u) for u in subsets_of(s))
