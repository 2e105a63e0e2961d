"""Command-line entry point.

Exit codes: 0 success, 1 a mathematical law was violated, 2 bad usage/input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__, arith
from .curves import CubicPoint, NotOnCurveError, parse_cubic_point, point_to_json
from .eds import (
    EdsContext,
    load_cache_into,
    primitive_report,
    read_cache,
    strong_divisibility_report,
    structural_identities_report,
    valuation_report,
    write_cache,
)
from .frey_descent import AUX_CURVES, DescentInconsistency, aux_curve_scan, descent_solve, power_descent_equations
from .power_cert import REPORT_SCHEMA, build_certificate, corollary15_search, scan_powers, verify_scan_vs_certificate

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
CHECKS = ("strong-div", "valuation", "primitive", "identities")
VALUATION_PRIMES = (2, 3, 5, 7, 11, 13)


@dataclass
class RunConfig:
    d: int
    point: CubicPoint
    max_m: int = 25
    checks: tuple = CHECKS
    trial_bound: int = arith.DEFAULT_TRIAL_BOUND
    rho_rounds: int = arith.DEFAULT_RHO_ROUNDS
    cache_path: str | None = None
    seed: int = 0
    output_format: str = "text"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.max_m < 1:
            raise ValueError("--max-m must be >= 1")
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise ValueError(f"unknown checks {sorted(unknown)}; known: {', '.join(CHECKS)}")

    def echo(self) -> dict:
        out = asdict(self)
        out["d"] = str(self.d)
        out["point"] = point_to_json(self.point)
        out["checks"] = list(self.checks)
        return out

    def context(self) -> EdsContext:
        return EdsContext(self.d, self.point, self.trial_bound, self.rho_rounds, self.seed)


class UsageError(Exception):
    pass


def _emit(cfg: RunConfig, payload: dict, text_lines: list[str]) -> None:
    if cfg.output_format == "json":
        doc = {"schema": REPORT_SCHEMA, "version": __version__, "config": cfg.echo()}
        doc.update(payload)
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print("\n".join(text_lines))


def _context_with_cache(cfg: RunConfig) -> tuple[EdsContext, list[dict]]:
    ctx = cfg.context()
    problems = []
    if cfg.cache_path and Path(cfg.cache_path).exists():
        problems = load_cache_into(ctx, cfg.cache_path)
    return ctx, problems


def cmd_generate(cfg: RunConfig) -> int:
    ctx, problems = _context_with_cache(cfg)
    if problems:
        # never build on a cache that fails validation
        ctx = cfg.context()
    terms = ctx.terms(cfg.max_m)
    if cfg.cache_path:
        covered = not problems and Path(cfg.cache_path).exists() and len(read_cache(cfg.cache_path).terms) >= cfg.max_m
        if not covered:
            write_cache(ctx, cfg.cache_path, cfg.max_m)
    lines = [f"# u^3 + v^3 = {ctx.d}, P = {ctx.generator.u},{ctx.generator.v}", "m\tW\tA\tB\tC"]
    lines += [f"{t.m}\t{t.W}\t{t.A}\t{t.B}\t{t.C}" for t in terms]
    if problems:
        lines.append(f"# discarded invalid cache: {sorted({p['law'] for p in problems})}")
    _emit(cfg, {"terms": [t.to_json() for t in terms], "discarded_cache": problems}, lines)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    ctx, problems = _context_with_cache(cfg)
    M = cfg.max_m
    reports = []
    if "strong-div" in cfg.checks and M >= 2:
        reports.append(strong_divisibility_report(ctx, M))
    if "valuation" in cfg.checks:
        reports += [valuation_report(ctx, p, M) for p in VALUATION_PRIMES]
    if "primitive" in cfg.checks and M >= 2:
        reports.append(primitive_report(ctx, M))
    if "identities" in cfg.checks:
        reports.append(structural_identities_report(ctx, M))

    lines = []
    if problems:
        laws = sorted({p["law"] for p in problems})
        lines.append(f"FAIL cache_invariants: violated {', '.join(laws)} at m = {sorted({p['m'] for p in problems}, key=str)}")
    for rep in reports:
        lines.append(rep.summary())
        if rep.law == "primitive_divisor":
            for m, part, p0 in rep.details:
                extra = f" p0={p0}" if m == 2 else ""
                lines.append(f"  m={m} primitive_part={part}{extra}")
        for v in rep.violations[:10]:
            lines.append(f"  violation: {v}")
    ok = not problems and all(r.passed for r in reports)
    lines.append("OK: zero violations" if ok else "VIOLATION: see above")
    _emit(
        cfg,
        {
            "cache_violations": problems,
            "reports": [_jsonable(r.to_json()) for r in reports],
            "passed": ok,
        },
        lines,
    )
    return EXIT_OK if ok else EXIT_VIOLATION


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, int) and not isinstance(obj, bool) and abs(obj) >= 2**53:
        return str(obj)
    return obj


def cmd_certify_and_scan(cfg: RunConfig) -> int:
    ctx, problems = _context_with_cache(cfg)
    if problems:
        ctx = cfg.context()
    cert = build_certificate(ctx)
    hits = scan_powers(ctx, cfg.max_m)
    check = verify_scan_vs_certificate(hits, cert)
    lines = [
        f"W_1 = {cert.W1}, ord_2(W_1) = {cert.ord2W1}, p0 = {cert.p0}",
        f"finiteness (W_1 > 1) applicable: {cert.thm11_applicable} ({cert.reasons['thm11']})",
        f"exponent bound applicable: {cert.thm12_applicable} ({cert.reasons['thm12']})",
        f"exponent divisibility applicable: {cert.thm13_applicable} ({cert.reasons['thm13']})",
    ]
    if cert.has_l_bound:
        lines.append(f"bound: l <= {cert.l_bound_floor()} (max(ord_2(W_1), (1+sqrt({cert.p0}))^2) = {cert.l_bound_value():.4f})")
    if cert.allowed_l is not None:
        lines.append(f"allowed exponents: {sorted(cert.allowed_l)}")
    lines.append(f"hits up to m = {cfg.max_m}: {[(h.m, h.l, h.root) for h in hits]} (W_m = 1 at {hits.unit_terms})")
    lines.append(f"verdict: {cert.verdict()}")
    lines.append(check.summary())
    _emit(
        cfg,
        {
            "certificate": cert.to_json(),
            "hits": [h.to_json() for h in hits],
            "unit_terms": hits.unit_terms,
            "cross_check": check.to_json(),
        },
        lines,
    )
    return EXIT_OK if check.passed else EXIT_VIOLATION


def cmd_descent(cfg: RunConfig) -> int:
    ctx = cfg.context()
    t = ctx.term(cfg.max_m)
    try:
        sols = descent_solve(t.A, t.B, t.C, ctx.d, trial_bound=cfg.trial_bound, rho_rounds=cfg.rho_rounds)
    except DescentInconsistency as exc:
        lines = [f"m = {t.m}: {exc} (expected unless 2 and 3 do not divide A_m)"]
        _emit(cfg, {"m": t.m, "solutions": [], "error": str(exc)}, lines)
        return EXIT_OK if t.A % 2 == 0 else EXIT_VIOLATION
    lines = [f"m = {t.m}: A = {t.A}, B = {t.B}, C = {t.C}"]
    payload = {"m": t.m, "solutions": [s.to_json() for s in sols], "power_checks": []}
    for s in sols:
        lines.append(f"  s = {s.s}, a = {s.a}, b = {s.b}")
        l = cfg.extra.get("l")
        if l:
            case = "odd_a" if s.a % 2 else "even_a"
            checks = power_descent_equations(s, l, case)
            payload["power_checks"].append([c.to_json() for c in checks])
            lines += [f"    {c.equation}: applicable={c.applicable} holds={c.holds} {c.note}" for c in checks]
    _emit(cfg, payload, lines)
    return EXIT_OK


def _aux_scan(args) -> int:
    ids = [args.curve] if args.curve else sorted(AUX_CURVES)
    scans = [aux_curve_scan(c, args.height) for c in ids]
    if args.format == "json":
        print(json.dumps({"schema": REPORT_SCHEMA, "scans": [s.to_json() for s in scans]}, indent=2))
    else:
        for s in scans:
            pts = ", ".join(f"({x}, {y})" for x, y in s.points)
            print(f"{s.curve_id}: [{pts}]  [non-conclusive: {s.note}]")
    return EXIT_OK


def _corollary(args) -> int:
    res = corollary15_search(args.l_max, args.w_bound, trial_bound=args.trial_bound, rho_rounds=args.rho_rounds)
    if args.format == "json":
        print(json.dumps({"schema": REPORT_SCHEMA, **res.to_json()}, indent=2))
    else:
        print(f"U^3 + V^3 = 15 W^(3l): {res.cells} cells, solutions {res.solutions}, unknown {res.unknown}")
    return EXIT_VIOLATION if res.solutions else EXIT_OK


def _common(p: argparse.ArgumentParser, needs_point: bool = True) -> None:
    if needs_point:
        p.add_argument("--d", type=int, required=True, help="cube-free integer d in u^3 + v^3 = d")
        p.add_argument("--point", required=True, help="generator as 'u,v' with u, v like 17/21")
        p.add_argument("--max-m", type=int, default=25)
        p.add_argument("--checks", default=",".join(CHECKS), help="comma list from " + ",".join(CHECKS))
        p.add_argument("--cache", default=None, help="JSON-lines term cache")
        p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial-bound", type=int, default=arith.DEFAULT_TRIAL_BOUND)
    p.add_argument("--rho-rounds", type=int, default=arith.DEFAULT_RHO_ROUNDS)
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fermat-eds", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("generate", "print W_1..W_M with A, B, C and update the cache"),
        ("verify", "check the divisibility laws; exit 1 on any violation"),
        ("certify", "perfect-power certificate, scan and cross-check"),
        ("descent", "Z[sqrt(-3)] descent on the term at index --max-m"),
    ):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        if name == "descent":
            p.add_argument("--l", type=int, default=None, help="also test l-th power decompositions")
    p = sub.add_parser("aux-scan", help="naive point scan on the auxiliary curves (non-conclusive)")
    p.add_argument("--curve", choices=sorted(AUX_CURVES), default=None)
    p.add_argument("--height", type=int, default=50)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p = sub.add_parser("corollary15", help="search U^3 + V^3 = 15 W^(3l)")
    p.add_argument("--l-max", type=int, default=5)
    p.add_argument("--w-bound", type=int, default=20)
    _common(p, needs_point=False)
    return parser


COMMANDS = {
    "generate": cmd_generate,
    "verify": cmd_verify,
    "certify": cmd_certify_and_scan,
    "descent": cmd_descent,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "aux-scan":
            return _aux_scan(args)
        if args.command == "corollary15":
            return _corollary(args)
        cfg = RunConfig(
            d=args.d,
            point=parse_cubic_point(args.point),
            max_m=args.max_m,
            checks=tuple(c.strip() for c in args.checks.split(",") if c.strip()),
            trial_bound=args.trial_bound,
            rho_rounds=args.rho_rounds,
            cache_path=args.cache,
            seed=args.seed,
            output_format=args.format,
            extra={"l": getattr(args, "l", None)},
        )
        return COMMANDS[args.command](cfg)
    except (NotOnCurveError, ValueError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
