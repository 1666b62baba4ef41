"""Stability certificates: evaluate both sides of the worst-case-error bounds
that hold when a rule built for one (alpha, gamma) is used under another.

Every certificate records lhs (the merit under the target parameters), rhs
(the bound), their margin, and the dominant components.  Inequalities are
checked with 1e-9 relative slack; a bound rendered infinite by a zero weight
in a denominator is a vacuous pass, flagged but never a failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .cbc import cbc_construct, euler_totient
from .errors import UsageError
from .korobov import (LatticeRule, MeritReport, p_merit_closed, p_merit_series,
                      zaremba_rho_value)
from .walsh import (PolyLatticeRule, cbc_construct_poly, p_merit_wal_closed, rho_wal,
                    rho_wal_value)
from .weights import (SpaceParams, WeightSet, check_monotone, ratio_size_sum,
                      weighted_order_sum, weighted_power_sum, weighted_zeta_sum, zeta)

CERT_REL_SLACK = 1e-9
JENSEN_REL_SLACK = 1e-10

_CLOSED_ALPHAS = (1.0, 2.0, 3.0, 4.0)


@dataclass(frozen=True)
class StabilityCertificate:
    """One checked inequality lhs <= rhs with its audit trail."""

    lhs: float
    rhs: float
    margin: float
    components: Mapping[str, float]
    passed: bool
    vacuous: bool = False

    def to_jsonable(self) -> dict:
        def num(v):
            return "inf" if isinstance(v, float) and math.isinf(v) else v
        return {"lhs": self.lhs, "rhs": num(self.rhs), "margin": num(self.margin),
                "components": {k: num(v) for k, v in self.components.items()},
                "passed": self.passed, "vacuous": self.vacuous}


def _certificate(lhs: float, rhs: float, components: dict,
                 vacuous: bool = False) -> StabilityCertificate:
    passed = vacuous or lhs <= rhs * (1.0 + CERT_REL_SLACK) or (rhs == 0.0 and lhs == 0.0)
    return StabilityCertificate(lhs=lhs, rhs=rhs, margin=rhs - lhs,
                                components=components, passed=passed, vacuous=vacuous)


def c_alpha_prime(alpha_prime: float) -> float:
    """(1 + zeta(2a')) + (2^(2a') + zeta(2a')) (2^(2a'-1) - 1) / 2^(4a')."""
    if not alpha_prime > 0.5:
        raise UsageError(f"alpha' must exceed 1/2, got {alpha_prime}")
    z = zeta(2.0 * alpha_prime)
    t = 2.0 ** (2.0 * alpha_prime)
    return (1.0 + z) + (t + z) * (t / 2.0 - 1.0) / t ** 2


def _lattice_lhs(rule: LatticeRule, alpha_prime: float, Wprime: WeightSet,
                 series_K: int | None) -> MeritReport:
    if alpha_prime in _CLOSED_ALPHAS:
        return p_merit_closed(rule, SpaceParams(alpha=alpha_prime, weights=Wprime))
    return p_merit_series(rule, SpaceParams(alpha=alpha_prime, weights=Wprime),
                          series_K or max(rule.N, 32))


def theorem1_bound(rule: LatticeRule, alpha: float, W: WeightSet,
                   alpha_prime: float, Wprime: WeightSet,
                   series_K: int | None = None) -> StabilityCertificate:
    """Korobov stability: for monotone gamma (gamma_v >= gamma_u for v in u),

        P_{a',g'}(z) <= c_{a'} rho_{a,g}(z)^(a'/a)
                        * sum_u g'_u / g_u^(a'/a)
                          * (2^(2a'+1) / (2^(2a'-1) - 1))^|u| (log2 N)^(|u|-1).
    """
    if not check_monotone(W, rule.s):
        raise UsageError("the stability bound needs monotone weights gamma")
    rho = zaremba_rho_value(rule, SpaceParams(alpha=alpha, weights=W))
    c = c_alpha_prime(alpha_prime)
    ratio = alpha_prime / alpha
    F = 2.0 ** (2.0 * alpha_prime + 1.0) / (2.0 ** (2.0 * alpha_prime - 1.0) - 1.0)
    L = math.log2(rule.N)
    size_factors = [0.0] + [F ** k * L ** (k - 1) for k in range(1, rule.s + 1)]
    subset_sum, vacuous = ratio_size_sum(W, Wprime, ratio, size_factors, rule.s)
    rhs = c * rho ** ratio * subset_sum if not vacuous else math.inf
    lhs = _lattice_lhs(rule, alpha_prime, Wprime, series_K).p_value
    return _certificate(lhs, rhs, {"rho": rho, "c_alpha_prime": c,
                                   "subset_sum": subset_sum}, vacuous)


def theorem2_bound_poly(rule: PolyLatticeRule, alpha: float, W: WeightSet,
                        alpha_prime: float, Wprime: WeightSet) -> StabilityCertificate:
    """Walsh stability (no monotonicity needed):

        P_{a',g'}(q) <= rho_{a,g}(q)^(a'/a)
                        * sum_u g'_u / g_u^(a'/a)
                          * (b^(2a'-1) (b-1) / (b^(2a'-1) - 1))^|u| (m+1)^(|u|-1).
    """
    rho = rho_wal_value(rule, SpaceParams(alpha=alpha, weights=W))
    ratio = alpha_prime / alpha
    b = float(rule.b)
    F = b ** (2.0 * alpha_prime - 1.0) * (b - 1.0) / (b ** (2.0 * alpha_prime - 1.0) - 1.0)
    M = rule.m + 1.0
    size_factors = [0.0] + [F ** k * M ** (k - 1) for k in range(1, rule.s + 1)]
    subset_sum, vacuous = ratio_size_sum(W, Wprime, ratio, size_factors, rule.s)
    rhs = rho ** ratio * subset_sum if not vacuous else math.inf
    lhs = p_merit_wal_closed(rule, SpaceParams(alpha=alpha_prime, weights=Wprime)).p_value
    return _certificate(lhs, rhs, {"rho": rho, "subset_sum": subset_sum}, vacuous)


def prop_bound_lattice(N: int, s: int, alpha: float, W: WeightSet, lam: float) -> float:
    """CBC guarantee for lattice rules:
    (weighted_zeta_sum(lam) / phi(N))^(1/lam), any 1/(2 alpha) < lam <= 1."""
    total = weighted_zeta_sum(W, s, lam, alpha)
    return (total / euler_totient(N)) ** (1.0 / lam)


def prop_bound_poly(b: int, m: int, s: int, alpha: float, W: WeightSet, lam: float) -> float:
    """CBC guarantee for polynomial lattice rules with irreducible modulus:
    ((1/(b^m - 1)) sum_u gamma_u^lam ((b-1)/(b^(2 alpha lam) - b))^|u|)^(1/lam)."""
    if lam > 1.0 or 2.0 * alpha * lam <= 1.0:
        raise UsageError(f"need 1/(2 alpha) < lambda <= 1, got lambda={lam}")
    factor = (b - 1.0) / (float(b) ** (2.0 * alpha * lam) - b)
    total = weighted_power_sum(W, s, lam, factor)
    return (total / (b ** m - 1)) ** (1.0 / lam)


def prop_bound(kind: str, size, s: int, alpha: float, W: WeightSet, lam: float) -> float:
    """Dispatch on kind: 'lattice' takes size = N, 'poly' takes size = (b, m)."""
    if kind == "lattice":
        return prop_bound_lattice(int(size), s, alpha, W, lam)
    if kind == "poly":
        b, m = size
        return prop_bound_poly(int(b), int(m), s, alpha, W, lam)
    raise UsageError(f"unknown bound kind {kind!r}")


def prop1_certificate(rule: LatticeRule, alpha: float, W: WeightSet,
                      lam: float = 1.0) -> StabilityCertificate:
    """P(z) against the CBC guarantee (valid for CBC-constructed rules)."""
    rhs = prop_bound_lattice(rule.N, rule.s, alpha, W, lam)
    lhs = _lattice_lhs(rule, alpha, W, None).p_value
    return _certificate(lhs, rhs, {"lambda": lam, "totient": euler_totient(rule.N)})


def prop2_certificate(rule: PolyLatticeRule, alpha: float, W: WeightSet,
                      lam: float = 1.0) -> StabilityCertificate:
    """rho <= P <= CBC guarantee for polynomial lattice rules; the certificate
    checks the outer inequality and records rho for the chain."""
    rhs = prop_bound_poly(rule.b, rule.m, rule.s, alpha, W, lam)
    report = rho_wal(rule, SpaceParams(alpha=alpha, weights=W))
    cert = _certificate(report.p_value, rhs, {"lambda": lam, "rho": report.rho_value})
    if report.rho_value > report.p_value * (1.0 + CERT_REL_SLACK):
        return StabilityCertificate(lhs=cert.lhs, rhs=cert.rhs, margin=cert.margin,
                                    components=cert.components, passed=False)
    return cert


def combined_bound_eq1(rule: LatticeRule, alpha: float, W: WeightSet,
                       alpha_prime: float, Wprime: WeightSet, lam: float = 1.0,
                       series_K: int | None = None) -> StabilityCertificate:
    """Stability bound with the CBC guarantee substituted for rho:

        P_{a',g'}(z) <= c_{a'} * (weighted_zeta_sum(lam) / phi(N))^(a'/(a lam))
                        * the Theorem-1 subset sum.

    Valid for rules produced by the CBC search under (alpha, gamma); its rhs
    majorizes the Theorem-1 rhs because rho <= P <= CBC guarantee.
    """
    if not check_monotone(W, rule.s):
        raise UsageError("the stability bound needs monotone weights gamma")
    c = c_alpha_prime(alpha_prime)
    ratio = alpha_prime / alpha
    raw = weighted_zeta_sum(W, rule.s, lam, alpha) / euler_totient(rule.N)
    F = 2.0 ** (2.0 * alpha_prime + 1.0) / (2.0 ** (2.0 * alpha_prime - 1.0) - 1.0)
    L = math.log2(rule.N)
    size_factors = [0.0] + [F ** k * L ** (k - 1) for k in range(1, rule.s + 1)]
    subset_sum, vacuous = ratio_size_sum(W, Wprime, ratio, size_factors, rule.s)
    rhs = c * raw ** (alpha_prime / (alpha * lam)) * subset_sum if not vacuous else math.inf
    lhs = _lattice_lhs(rule, alpha_prime, Wprime, series_K).p_value
    return _certificate(lhs, rhs, {"c_alpha_prime": c, "cbc_guarantee_base": raw,
                                   "subset_sum": subset_sum}, vacuous)


def jensen_certificate(rule: LatticeRule | PolyLatticeRule, alpha: float,
                       W: WeightSet, delta: float,
                       series_K: int | None = None) -> StabilityCertificate:
    """Power-mean stability: (P_{a/d, g^(1/d)})^d <= P_{a, g} for 0 < d <= 1.

    For lattice rules a noninteger exponent falls back to the truncated
    series; its tail bound is added to the rhs so the check stays sound.
    """
    if not 0.0 < delta <= 1.0:
        raise UsageError(f"delta must lie in (0, 1], got {delta}")
    alpha_hi = alpha / delta
    W_hi = W.powered(1.0 / delta)
    slack_from_truncation = 0.0
    if isinstance(rule, PolyLatticeRule):
        lhs_p = p_merit_wal_closed(rule, SpaceParams(alpha=alpha_hi, weights=W_hi)).p_value
        rhs = p_merit_wal_closed(rule, SpaceParams(alpha=alpha, weights=W)).p_value
    else:
        lhs_p = _lattice_lhs(rule, alpha_hi, W_hi, series_K).p_value
        base = _lattice_lhs(rule, alpha, W, series_K)
        rhs = base.p_value
        if base.truncation_bound is not None:
            slack_from_truncation = base.truncation_bound
    lhs = lhs_p ** delta
    passed = lhs <= (rhs + slack_from_truncation) * (1.0 + JENSEN_REL_SLACK)
    return StabilityCertificate(lhs=lhs, rhs=rhs, margin=rhs - lhs,
                                components={"delta": delta, "alpha_high": alpha_hi,
                                            "rhs_truncation": slack_from_truncation},
                                passed=passed)


def certificate_table_csv(rows: Sequence[tuple[int, int, StabilityCertificate]]) -> str:
    """CSV with columns s, N_or_m, lhs, rhs, margin, passed for a batch of
    certificates (grid runs, regression baselines)."""
    lines = ["s,N_or_m,lhs,rhs,margin,passed"]
    for s, size, cert in rows:
        lines.append(f"{s},{size},{cert.lhs!r},{cert.rhs!r},{cert.margin!r},{cert.passed}")
    return "\n".join(lines) + "\n"


def probe_table_csv(table: dict) -> str:
    """CSV rendering of a corollary_probe result, one row per grid cell."""
    rows = table["rows"]
    if not rows:
        return "s,N_or_m\n"
    fields = list(rows[0].keys())
    lines = [",".join(fields)]
    for row in rows:
        lines.append(",".join(repr(row[f]) if isinstance(row[f], float) else str(row[f])
                              for f in fields))
    lines.append(f"# C = {table['C']!r}")
    return "\n".join(lines) + "\n"


def rosser_schoenfeld_holds(N: int) -> bool:
    """Totient growth check for N >= 3:
    1/phi(N) < (1/N) (e^gamma log log N + 2.50637 / log log N)."""
    if N < 3:
        raise UsageError("the totient inequality needs N >= 3")
    ll = math.log(math.log(N))
    rhs = (math.exp(0.5772156649015329) * ll + 2.50637 / ll) / N
    return 1.0 / euler_totient(N) < rhs


def totient_sieve(limit: int) -> np.ndarray:
    """phi(n) for n = 0..limit via a sieve (phi[0] = 0 by convention)."""
    phi = np.arange(limit + 1, dtype=np.int64)
    phi[0] = 0
    for p in range(2, limit + 1):
        if phi[p] == p:  # p prime
            phi[p::p] -= phi[p::p] // p
    return phi


@dataclass(frozen=True)
class CorollaryProbe:
    """Exponents for finite evaluations of the tractability statements.

    lam and delta obey 1/(2 alpha) < lam < 1 and 0 < delta < cap, where the
    cap is alpha'/(alpha lam) for the merit statements and 1/(alpha lam) for
    the discrepancy statements; q, q_prime, q_dprime >= 0 divide out the
    allowed polynomial growth in s.
    """

    lam: float
    delta: float
    q: float = 0.0
    q_prime: float = 0.0
    q_dprime: float = 0.0

    def validate(self, kind: str, alpha: float, alpha_prime: float) -> None:
        if not (1.0 / (2.0 * alpha) < self.lam < 1.0):
            raise UsageError(f"lambda={self.lam} outside (1/(2 alpha), 1)")
        cap = (alpha_prime / (alpha * self.lam) if kind in ("cor1", "cor3")
               else 1.0 / (alpha * self.lam))
        if not 0.0 < self.delta < cap:
            raise UsageError(f"delta={self.delta} outside (0, {cap})")
        if min(self.q, self.q_prime, self.q_dprime) < 0:
            raise UsageError("growth exponents must be >= 0")


def corollary_probe(kind: str, probe: CorollaryProbe, grid: Sequence[tuple[int, int]],
                    alpha: float, W: WeightSet, alpha_prime: float,
                    Wprime: WeightSet) -> dict:
    """Evaluate the finite quantities inside the tractability suprema on a
    declared (s, N) or (s, m) grid, plus the observed merit or discrepancy
    bound and its ratio to the claimed envelope.

    Rules are CBC-constructed per grid cell under (alpha, gamma).  The
    empirical constant C is the largest observed ratio; no asymptotic claim
    is asserted.  Reporting tool only.
    """
    if kind not in ("cor1", "cor2", "cor3", "cor4"):
        raise UsageError(f"unknown corollary kind {kind!r}")
    probe.validate(kind, alpha, alpha_prime)
    lam, delta = probe.lam, probe.delta
    rows = []
    for s, size in grid:
        row: dict = {"s": s, "N_or_m": size}
        if kind in ("cor1", "cor2"):
            N = size
            rule, _ = cbc_construct(N, s, SpaceParams(alpha=alpha, weights=W))
            phiN = euler_totient(N)
            L = math.log2(N)
            row["sup1"] = weighted_zeta_sum(W, s, lam, alpha) / s ** probe.q
            if kind == "cor1":
                F = 2.0 ** (2.0 * alpha_prime + 1.0) / (2.0 ** (2.0 * alpha_prime - 1.0) - 1.0)
                sf = [0.0] + [F ** k * L ** (k - 1) for k in range(1, s + 1)]
                val, _vac = ratio_size_sum(W, Wprime, alpha_prime / alpha, sf, s)
                row["sup2"] = val / (s ** probe.q_prime * phiN ** delta)
                row["observed"] = p_merit_closed(
                    rule, SpaceParams(alpha=alpha_prime, weights=Wprime)).p_value \
                    if alpha_prime in _CLOSED_ALPHAS else p_merit_series(
                        rule, SpaceParams(alpha=alpha_prime, weights=Wprime), max(N, 32)).p_value
                envelope = (s ** (probe.q * alpha_prime / (alpha * lam) + probe.q_prime)
                            * phiN ** (-alpha_prime / (alpha * lam) + delta))
            else:
                row["sup2"] = weighted_order_sum(Wprime, s) / s ** probe.q_prime
                sf = [0.0] + [(2.0 * L) ** k for k in range(1, s + 1)]
                val, _vac = ratio_size_sum(W, Wprime, 1.0 / (2.0 * alpha), sf, s)
                row["sup3"] = val / (s ** probe.q_dprime * phiN ** delta)
                from .discrepancy import star_disc_bound_rho_lattice
                row["observed"] = star_disc_bound_rho_lattice(rule, alpha, W, Wprime)[0]
                envelope = (s ** max(probe.q_prime,
                                     probe.q / (2.0 * alpha * lam) + probe.q_dprime)
                            * phiN ** (-1.0 / (2.0 * alpha * lam) + delta))
        else:
            b, m = 2, size
            rule, _ = cbc_construct_poly(b, m, s, SpaceParams(alpha=alpha, weights=W))
            factor = (b - 1.0) / (float(b) ** (2.0 * alpha * lam) - b)
            row["sup1"] = weighted_power_sum(W, s, lam, factor) / s ** probe.q
            if kind == "cor3":
                F = (float(b) ** (2.0 * alpha_prime - 1.0) * (b - 1.0)
                     / (float(b) ** (2.0 * alpha_prime - 1.0) - 1.0))
                sf = [0.0] + [F ** k * (m + 1.0) ** (k - 1) for k in range(1, s + 1)]
                val, _vac = ratio_size_sum(W, Wprime, alpha_prime / alpha, sf, s)
                row["sup2"] = val / (s ** probe.q_prime * float(b) ** (delta * m))
                row["observed"] = p_merit_wal_closed(
                    rule, SpaceParams(alpha=alpha_prime, weights=Wprime)).p_value
                envelope = (s ** (probe.q * alpha_prime / (alpha * lam) + probe.q_prime)
                            * float(b) ** (-(alpha_prime / (alpha * lam) - delta) * m))
            else:
                from .discrepancy import sine_factor, star_disc_bound_rho_poly
                kb = sine_factor(b)
                row["sup2"] = weighted_order_sum(Wprime, s) / s ** probe.q_prime
                sf = [0.0] + [(kb * (m + 1.0)) ** k for k in range(1, s + 1)]
                val, _vac = ratio_size_sum(W, Wprime, 1.0 / (2.0 * alpha), sf, s)
                row["sup3"] = val / (s ** probe.q_dprime * float(b) ** (delta * m))
                row["observed"] = star_disc_bound_rho_poly(rule, alpha, W, Wprime)[0]
                envelope = (s ** max(probe.q_prime,
                                     probe.q / (2.0 * alpha * lam) + probe.q_dprime)
                            * float(b) ** (-m * (1.0 / (2.0 * alpha * lam) - delta)))
        row["envelope"] = envelope
        row["ratio"] = row["observed"] / envelope if envelope > 0 else math.inf
        rows.append(row)
    C = max((r["ratio"] for r in rows), default=0.0)
    return {"kind": kind, "rows": rows, "C": C}
