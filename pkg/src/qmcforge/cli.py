"""Command-line front end: construct rules, evaluate merits and bounds, emit
certificates and sweep tables.

Exit codes: 0 success or certificate pass, 1 certificate failure, 2 usage or
precondition error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from .cbc import CbcTrace, cbc_construct, cbc_construct_fast, is_prime
from .discrepancy import lattice_report, poly_report
from .errors import ResourceLimitError, UsageError
from .gfpoly import GFPoly, smallest_irreducible
from .korobov import LatticeRule, p_merit_closed, p_merit_series, zaremba_rho
from .stability import (combined_bound_eq1, jensen_certificate, prop1_certificate,
                        prop2_certificate, theorem1_bound, theorem2_bound_poly)
from .walsh import PolyLatticeRule, cbc_construct_poly, p_merit_wal_closed, rho_wal
from .weights import S_MAX_DEFAULT, SpaceParams, WeightSet, parse_weight_formula

EXIT_OK = 0
EXIT_CERT_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def worker_count() -> int:
    """Worker cap from QMCFORGE_THREADS (0 or unset = auto)."""
    raw = os.environ.get("QMCFORGE_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"QMCFORGE_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise UsageError("QMCFORGE_THREADS must be >= 0")
    return n if n > 0 else min(8, os.cpu_count() or 1)


def _parse_seq(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def parse_weights(spec, s_needed: int = 0) -> WeightSet:
    """Weight declaration from CLI text ('kind:data') or config JSON dict."""
    if isinstance(spec, dict):
        return WeightSet.from_jsonable(spec)
    if not isinstance(spec, str) or ":" not in spec:
        raise UsageError(f"weight spec {spec!r} must look like kind:data")
    kind, _, data = spec.partition(":")
    kind = kind.strip().lower()
    s_max = max(S_MAX_DEFAULT, s_needed)
    if kind == "product":
        if "j^" in data:
            return WeightSet.from_formula("product", data, s_max)
        return WeightSet.product(_parse_seq(data))
    if kind == "pod":
        gpart, _, jpart = data.partition("|")
        Gammas = _parse_seq(gpart)
        if "j^" in jpart:
            fn = parse_weight_formula(jpart)
            return WeightSet.pod(Gammas, [fn(j) for j in range(1, len(Gammas) + 1)])
        return WeightSet.pod(Gammas, _parse_seq(jpart))
    if kind == "order":
        return WeightSet.order_dependent(_parse_seq(data))
    if kind == "explicit":
        mapping = {}
        for entry in data.split(";"):
            if not entry.strip():
                continue
            subset, _, value = entry.partition("=")
            mapping[tuple(int(t) for t in subset.split(","))] = float(value)
        return WeightSet.explicit(mapping, s_max=s_max)
    raise UsageError(f"unknown weight kind {kind!r}")


def _poly_from_arg(text: str, b: int) -> GFPoly:
    return GFPoly(b, tuple(int(t) for t in text.split(",")))


def load_rule(path: str) -> tuple[LatticeRule | PolyLatticeRule, dict]:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read rule file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"rule file {path} is not valid JSON: {exc}")
    kind = obj.get("type")
    if kind == "lattice":
        return LatticeRule(N=int(obj["N"]), z=tuple(obj["z"])), obj
    if kind == "poly-lattice":
        b = int(obj["b"])
        rule = PolyLatticeRule(b=b, m=int(obj["m"]), p=GFPoly(b, tuple(obj["p"])),
                               q=tuple(GFPoly(b, tuple(c)) for c in obj["q"]))
        return rule, obj
    raise UsageError(f"rule file {path} has unknown type {kind!r}")


def _emit(obj, out_path: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
        for key, value in cfg.items():
            attr = key.replace("-", "_")
            if getattr(args, attr, None) in (None, False):
                setattr(args, attr, value)
    return args


def cmd_construct(args: argparse.Namespace) -> int:
    args = _merge_config(args)
    if args.kind == "lattice":
        if args.N is None:
            raise UsageError("lattice construction needs --N")
        N, s, alpha = int(args.N), int(args.s), float(args.alpha)
        W = parse_weights(args.weights, s)
        if args.random:
            rng = random.Random(args.seed)
            z = tuple(rng.randrange(1, N) for _ in range(s))
            rule = LatticeRule(N=N, z=z)
            merit = p_merit_closed(rule, SpaceParams(alpha=alpha, weights=W)).p_value
            trace = CbcTrace(choices=tuple((zj, merit) for zj in z), evaluations=0)
        elif args.fast:
            if not is_prime(N):
                raise UsageError("--fast needs a prime modulus N")
            if W.kind != "product":
                raise UsageError("--fast needs product weights")
            rule, trace = cbc_construct_fast(N, s, int(alpha), W.gamma[:s])
        else:
            rule, trace = cbc_construct(N, s, SpaceParams(alpha=alpha, weights=W))
        payload = rule.to_jsonable()
    else:
        if args.m is None:
            raise UsageError("poly-lattice construction needs --m")
        b, m, s, alpha = int(args.b), int(args.m), int(args.s), float(args.alpha)
        W = parse_weights(args.weights, s)
        p = _poly_from_arg(args.p, b) if args.p else smallest_irreducible(b, m)
        if args.random:
            rng = random.Random(args.seed)
            q = tuple(GFPoly.from_code(b, rng.randrange(1, b ** m)) for _ in range(s))
            rule = PolyLatticeRule(b=b, m=m, p=p, q=q)
            merit = p_merit_wal_closed(rule, SpaceParams(alpha=alpha, weights=W)).p_value
            trace = CbcTrace(choices=tuple((qj.code(), merit) for qj in rule.q), evaluations=0)
        else:
            rule, trace = cbc_construct_poly(b, m, s, SpaceParams(alpha=alpha, weights=W), p=p)
        payload = rule.to_jsonable()
    payload["alpha"] = float(args.alpha)
    payload["weights"] = W.to_jsonable()
    payload["trace"] = trace.to_jsonable()
    payload["evaluations"] = trace.evaluations
    for entry in payload["trace"]:
        print(f"dim {entry['dim']:3d}  component {entry['chosen']:6d}  merit {entry['merit']:.12e}",
              file=sys.stderr)
    _emit(payload, args.out)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    args = _merge_config(args)
    rule, _ = load_rule(args.rule)
    W = parse_weights(args.weights, rule.s)
    params = SpaceParams(alpha=float(args.alpha), weights=W)
    if isinstance(rule, LatticeRule):
        if args.series_K:
            report = p_merit_series(rule, params, int(args.series_K))
        else:
            report = p_merit_closed(rule, params)
        if args.rho:
            report = zaremba_rho(rule, params)
    else:
        report = p_merit_wal_closed(rule, params)
        if args.rho:
            report = rho_wal(rule, params)
    payload = report.to_jsonable()
    if args.discrepancy:
        if isinstance(rule, LatticeRule):
            disc = lattice_report(rule, params.alpha, W, with_exact=rule.s <= 2)
        else:
            disc = poly_report(rule, params.alpha, W, with_exact=rule.s <= 2)
        payload["discrepancy"] = disc.to_jsonable()
    _emit(payload, args.out)
    return EXIT_OK


def cmd_certify(args: argparse.Namespace) -> int:
    args = _merge_config(args)
    rule, _ = load_rule(args.rule)
    alpha = float(args.alpha)
    W = parse_weights(args.weights, rule.s)
    Wp = parse_weights(args.weights_prime, rule.s) if args.weights_prime else W
    alpha_p = float(args.alpha_prime) if args.alpha_prime is not None else alpha
    lam = float(args.lam)
    selector = args.theorem
    if selector == "thm1":
        if not isinstance(rule, LatticeRule):
            raise UsageError("thm1 applies to lattice rules")
        cert = theorem1_bound(rule, alpha, W, alpha_p, Wp)
    elif selector == "thm2":
        if not isinstance(rule, PolyLatticeRule):
            raise UsageError("thm2 applies to polynomial lattice rules")
        cert = theorem2_bound_poly(rule, alpha, W, alpha_p, Wp)
    elif selector == "prop1":
        if not isinstance(rule, LatticeRule):
            raise UsageError("prop1 applies to lattice rules")
        cert = prop1_certificate(rule, alpha, W, lam)
    elif selector == "prop2":
        if not isinstance(rule, PolyLatticeRule):
            raise UsageError("prop2 applies to polynomial lattice rules")
        cert = prop2_certificate(rule, alpha, W, lam)
    elif selector == "eq1":
        if not isinstance(rule, LatticeRule):
            raise UsageError("eq1 applies to lattice rules")
        cert = combined_bound_eq1(rule, alpha, W, alpha_p, Wp, lam)
    elif selector == "jensen":
        cert = jensen_certificate(rule, alpha, W, float(args.delta))
    else:
        raise UsageError(f"unknown certificate selector {selector!r}")
    _emit(cert.to_jsonable(), args.out)
    return EXIT_OK if cert.passed else EXIT_CERT_FAILED


def _sweep_cell(kind: str, size: int, s: int, alpha: float, W: WeightSet,
                certify: str | None) -> dict:
    params = SpaceParams(alpha=alpha, weights=W)
    if kind == "lattice":
        rule, _ = cbc_construct(size, s, params)
        p = p_merit_closed(rule, params).p_value
        from .stability import prop_bound_lattice
        bound = prop_bound_lattice(size, s, alpha, W, 1.0)
        thm_rhs = math.nan
        passed = None
        if s <= 4 and size <= 1024:
            cert = theorem1_bound(rule, alpha, W, alpha, W)
            thm_rhs = cert.rhs
            passed = cert.passed
    else:
        rule, _ = cbc_construct_poly(2, size, s, params)
        p = p_merit_wal_closed(rule, params).p_value
        from .stability import prop_bound_poly
        bound = prop_bound_poly(2, size, s, alpha, W, 1.0)
        thm_rhs = math.nan
        passed = None
        if s <= 3:
            cert = theorem2_bound_poly(rule, alpha, W, alpha, W)
            thm_rhs = cert.rhs
            passed = cert.passed
    row = {"N_or_m": size, "P": p, "sqrtP": math.sqrt(p), "prop_bound": bound,
           "thm1_rhs": thm_rhs}
    if certify:
        row["passed"] = passed
    return row


def cmd_sweep(args: argparse.Namespace) -> int:
    args = _merge_config(args)
    grid_text = args.N_grid if args.kind == "lattice" else args.m_grid
    if not grid_text:
        raise UsageError("sweep needs --N-grid (lattice) or --m-grid (poly-lattice)")
    if isinstance(grid_text, str):
        grid = [int(t) for t in grid_text.split(",") if t.strip()]
    else:
        grid = [int(t) for t in grid_text]
    if not grid:
        raise UsageError("sweep grid is empty")
    s, alpha = int(args.s), float(args.alpha)
    W = parse_weights(args.weights, s)

    workers = worker_count()
    if workers > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(
                lambda size: _sweep_cell(args.kind, size, s, alpha, W, args.certify), grid))
    else:
        rows = [_sweep_cell(args.kind, size, s, alpha, W, args.certify) for size in grid]

    sizes = np.asarray([row["N_or_m"] for row in rows], dtype=np.float64)
    if args.kind == "poly-lattice":
        sizes = 2.0 ** sizes
    sqrtp = np.asarray([row["sqrtP"] for row in rows])
    slope = math.nan
    if len(grid) >= 2 and np.all(sqrtp > 0):
        slope = float(np.polyfit(np.log(sizes), np.log(sqrtp), 1)[0])

    buf = io.StringIO()
    fields = list(rows[0].keys())
    writer = csv.DictWriter(buf, fieldnames=fields)
    writer.writeheader()
    writer.writerows(rows)
    buf.write(f"# slope_log_sqrtP_vs_log_N = {slope:.6f}\n")
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmcforge",
                                     description="Construct and certify lattice and "
                                                 "polynomial lattice rules")
    sub = parser.add_subparsers(dest="command", required=True)

    con = sub.add_parser("construct", help="run the greedy component search")
    con.add_argument("--kind", choices=["lattice", "poly-lattice"], default="lattice")
    con.add_argument("--N", type=int, help="lattice modulus")
    con.add_argument("--b", type=int, default=2, help="polynomial lattice base")
    con.add_argument("--m", type=int, help="polynomial lattice degree")
    con.add_argument("--p", help="modulus polynomial coefficients, lowest first")
    con.add_argument("--s", type=int, required=False, default=1)
    con.add_argument("--alpha", type=float, default=1.0)
    con.add_argument("--weights", default="product:j^-2")
    con.add_argument("--fast", action="store_true", help="FFT scan (prime N, product weights)")
    con.add_argument("--random", action="store_true", help="draw a random vector instead")
    con.add_argument("--seed", type=int, default=20240601, help="seed for --random")
    con.add_argument("--config", help="JSON file supplying any of the flags")
    con.add_argument("--out", help="rule JSON path (default: stdout)")
    con.set_defaults(func=cmd_construct)

    ev = sub.add_parser("evaluate", help="evaluate merit (and bounds) of a stored rule")
    ev.add_argument("rule", help="rule JSON path")
    ev.add_argument("--alpha", type=float, required=True)
    ev.add_argument("--weights", required=True)
    ev.add_argument("--rho", action="store_true", help="include the figure of merit")
    ev.add_argument("--discrepancy", action="store_true", help="include discrepancy bounds")
    ev.add_argument("--series-K", type=int, dest="series_K",
                    help="evaluate by truncated series with this radius")
    ev.add_argument("--config", help="JSON file supplying any of the flags")
    ev.add_argument("--out", help="report JSON path (default: stdout)")
    ev.set_defaults(func=cmd_evaluate)

    ce = sub.add_parser("certify", help="check a stability or construction bound")
    ce.add_argument("rule", help="rule JSON path")
    ce.add_argument("--theorem", required=True,
                    choices=["thm1", "thm2", "prop1", "prop2", "eq1", "jensen"])
    ce.add_argument("--alpha", type=float, required=True)
    ce.add_argument("--weights", required=True)
    ce.add_argument("--alpha-prime", type=float, dest="alpha_prime")
    ce.add_argument("--weights-prime", dest="weights_prime")
    ce.add_argument("--lambda", type=float, dest="lam", default=1.0)
    ce.add_argument("--delta", type=float, default=0.5, help="Jensen exponent")
    ce.add_argument("--config", help="JSON file supplying any of the flags")
    ce.add_argument("--out", help="certificate JSON path (default: stdout)")
    ce.set_defaults(func=cmd_certify)

    sw = sub.add_parser("sweep", help="construct over a size grid and tabulate")
    sw.add_argument("--kind", choices=["lattice", "poly-lattice"], default="lattice")
    sw.add_argument("--N-grid", dest="N_grid", help="comma-separated moduli")
    sw.add_argument("--m-grid", dest="m_grid", help="comma-separated degrees")
    sw.add_argument("--s", type=int, default=2)
    sw.add_argument("--alpha", type=float, default=1.0)
    sw.add_argument("--weights", default="product:j^-2")
    sw.add_argument("--certify", choices=["thm1", "thm2"], help="add a passed column")
    sw.add_argument("--config", help="JSON file supplying any of the flags")
    sw.add_argument("--out", help="CSV path (default: stdout)")
    sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
