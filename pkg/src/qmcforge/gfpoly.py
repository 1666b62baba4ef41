"""Exact polynomial arithmetic over Z_b (b prime) and base-b digit expansions.

Coefficients are stored lowest degree first, reduced mod b, with no trailing
zeros; the zero polynomial has degree -inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ResourceLimitError, UsageError

SUPPORTED_BASES = (2, 3, 5, 7)

# Irreducibility scan caps: trial division over b^(deg/2) monic candidates.
_IRRED_WORK_LIMIT = 1 << 20


def _normalize(base: int, coeffs) -> tuple[int, ...]:
    out = [int(c) % base for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class GFPoly:
    """Polynomial over Z_b, coefficients lowest degree first."""

    base: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.base not in SUPPORTED_BASES:
            raise UsageError(f"base must be a prime in {SUPPORTED_BASES}, got {self.base}")
        object.__setattr__(self, "coeffs", _normalize(self.base, self.coeffs))

    @classmethod
    def zero(cls, base: int) -> "GFPoly":
        return cls(base, ())

    @classmethod
    def one(cls, base: int) -> "GFPoly":
        return cls(base, (1,))

    @classmethod
    def x(cls, base: int) -> "GFPoly":
        return cls(base, (0, 1))

    @classmethod
    def from_code(cls, base: int, code: int) -> "GFPoly":
        """Decode the integer sum(c_i * b^i) back into a polynomial."""
        if code < 0:
            raise UsageError("polynomial code must be >= 0")
        digits = []
        while code:
            code, d = divmod(code, base)
            digits.append(d)
        return cls(base, tuple(digits))

    def code(self) -> int:
        """Integer encoding sum(c_i * b^i); orders G_m for tie-breaking."""
        return sum(c * self.base ** i for i, c in enumerate(self.coeffs))

    @property
    def degree(self) -> float:
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    def is_zero(self) -> bool:
        return not self.coeffs

    def _same_base(self, other: "GFPoly") -> None:
        if self.base != other.base:
            raise UsageError(f"base mismatch: {self.base} vs {other.base}")

    def __add__(self, other: "GFPoly") -> "GFPoly":
        self._same_base(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return GFPoly(self.base, tuple((x + y) % self.base for x, y in zip(a, b)))

    def __neg__(self) -> "GFPoly":
        return GFPoly(self.base, tuple(-c % self.base for c in self.coeffs))

    def __sub__(self, other: "GFPoly") -> "GFPoly":
        return self + (-other)

    def __mul__(self, other: "GFPoly") -> "GFPoly":
        self._same_base(other)
        if self.is_zero() or other.is_zero():
            return GFPoly.zero(self.base)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] = (out[i + j] + a * b) % self.base
        return GFPoly(self.base, tuple(out))

    def divmod(self, divisor: "GFPoly") -> tuple["GFPoly", "GFPoly"]:
        self._same_base(divisor)
        if divisor.is_zero():
            raise UsageError("division by the zero polynomial")
        b = self.base
        rem = list(self.coeffs)
        dcoeffs = divisor.coeffs
        dd = len(dcoeffs) - 1
        inv_lead = pow(dcoeffs[-1], -1, b)
        quot = [0] * max(len(rem) - dd, 0)
        for i in range(len(rem) - dd - 1, -1, -1):
            factor = (rem[i + dd] * inv_lead) % b
            if factor:
                quot[i] = factor
                for j, c in enumerate(dcoeffs):
                    rem[i + j] = (rem[i + j] - factor * c) % b
        return GFPoly(b, tuple(quot)), GFPoly(b, tuple(rem[:dd]))

    def __mod__(self, divisor: "GFPoly") -> "GFPoly":
        return self.divmod(divisor)[1]

    def __repr__(self) -> str:
        if self.is_zero():
            return f"GFPoly({self.base}, 0)"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                lead = "" if c == 1 else str(c)
                terms.append(f"{lead}x^{i}" if i > 1 else f"{lead}x")
        return f"GFPoly({self.base}, {' + '.join(terms)})"


def gf_mulmod(a: GFPoly, c: GFPoly, p: GFPoly) -> GFPoly:
    """(a * c) mod p with exact coefficient arithmetic."""
    if p.is_zero():
        raise UsageError("modulus polynomial must be nonzero")
    return (a * c) % p


def gf_is_irreducible(p: GFPoly) -> bool:
    """Trial division by every monic polynomial of degree 1..deg(p)/2."""
    d = p.degree
    if d < 1:
        raise UsageError("irreducibility is defined for degree >= 1")
    d = int(d)
    b = p.base
    half = d // 2
    if b ** half > _IRRED_WORK_LIMIT:
        raise ResourceLimitError(f"irreducibility scan too large for base {b}, degree {d}")
    for deg in range(1, half + 1):
        for low in range(b ** deg):
            candidate = GFPoly.from_code(b, low + b ** deg)  # monic of this degree
            if (p % candidate).is_zero():
                return False
    return True


def smallest_irreducible(b: int, m: int) -> GFPoly:
    """Monic irreducible of degree m with the smallest integer encoding."""
    if m < 1:
        raise UsageError("degree must be >= 1")
    for low in range(b ** m):
        candidate = GFPoly.from_code(b, low + b ** m)
        if gf_is_irreducible(candidate):
            return candidate
    raise RuntimeError("no irreducible found; unreachable for prime b")


@dataclass(frozen=True)
class DigitExpansion:
    """First m base-b digits t_1..t_m of a Laurent expansion; value in [0, 1)."""

    base: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if any(not 0 <= d < self.base for d in self.digits):
            raise UsageError("digits must lie in 0..b-1")

    @property
    def numerator(self) -> int:
        """Numerator over b^m: sum t_i * b^(m-i)."""
        n = 0
        for d in self.digits:
            n = n * self.base + d
        return n

    @property
    def denominator(self) -> int:
        return self.base ** len(self.digits)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)


def nu_m(numer: GFPoly, p: GFPoly, m: int) -> DigitExpansion:
    """Digits t_1..t_m of the Laurent expansion of numer(x) / p(x).

    Requires deg(p) = m.  With p = sum p_i x^i and numer reduced mod p, digit
    t_k solves the coefficient match at x^(m-k):

        p_m t_k = numer_{m-k} - sum_{i<k} p_{m-(k-i)} t_i   (mod b).
    """
    numer._same_base(p)
    if p.degree != m:
        raise UsageError(f"modulus degree {p.degree} != m = {m}")
    b = p.base
    r = (numer % p).coeffs
    rc = list(r) + [0] * (m - len(r))
    pc = p.coeffs
    inv_lead = pow(pc[m], -1, b)
    digits = []
    for k in range(1, m + 1):
        acc = rc[m - k]
        for i in range(1, k):
            acc -= pc[m - (k - i)] * digits[i - 1]
        digits.append((acc * inv_lead) % b)
    return DigitExpansion(b, tuple(digits))


def tr_m(k: int, m: int, b: int) -> GFPoly:
    """Polynomial kappa_0 + kappa_1 x + ... + kappa_{m-1} x^{m-1} from the
    base-b digits of k (digits at position >= m are dropped)."""
    if k < 0:
        raise UsageError("k must be >= 0")
    return GFPoly.from_code(b, k % b ** m)
