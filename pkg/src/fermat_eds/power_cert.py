"""Perfect powers in (W_m): scanning, and the exponent restrictions that apply.

Three statements are certified from the generator alone:

* W_1 > 1: finitely many perfect powers (qualitative, no bound on l).
* W_1 even and non-singular reduction at every prime > 3: any l-th power
  has l <= max(ord_2(W_1), (1 + sqrt(p0))^2), p0 > 3 a primitive divisor
  of W_2.
* 6 | W_1 and (P triple a rational point, or non-singular reduction above 3):
  l divides ord_2(W_1); with ord_2(W_1) = 1 there are no perfect powers.

For fixed l > ord_2(W_1) the number of l-th powers is also uniformly
bounded, but no explicit bound is known, so none is computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import arith
from .curves import is_triple
from .eds import EdsContext, LawReport, p0_candidate
from .frey_descent import exponent_bound, exponent_bound_floor

REPORT_SCHEMA = 1


@dataclass(frozen=True)
class PowerHit:
    m: int
    l: int
    root: int

    def to_json(self) -> dict:
        return {"m": self.m, "l": self.l, "root": str(self.root)}


class PowerScan(list):
    """List of PowerHit; ``unit_terms`` records the indices with W_m = 1."""

    def __init__(self, hits=(), unit_terms=()):
        super().__init__(hits)
        self.unit_terms = list(unit_terms)


def scan_powers(ctx, M: int) -> PowerScan:
    """Every (m, l, r) with m <= M, l prime and W_m = r^l.

    W_m = 1 is a power for every l and is skipped (listed in unit_terms).
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    hits, units = [], []
    for m in range(1, M + 1):
        w = ctx.W(m)
        if w == 1:
            units.append(m)
            continue
        for l, r in sorted(arith.perfect_power_exponents(w)):
            hits.append(PowerHit(m, l, r))
    return PowerScan(hits, units)


@dataclass
class PowerCertificate:
    W1: int
    ord2W1: int
    p0: int | None
    thm11_applicable: bool
    thm12_applicable: bool
    thm13_applicable: bool
    allowed_l: frozenset | None = None
    reasons: dict = field(default_factory=dict)

    @property
    def has_l_bound(self) -> bool:
        return self.thm12_applicable and self.p0 is not None

    def l_bound_value(self) -> float | None:
        """max(ord_2(W_1), (1 + sqrt(p0))^2) as a float, for display only."""
        if not self.has_l_bound:
            return None
        return max(float(self.ord2W1), (1 + math.sqrt(self.p0)) ** 2)

    def l_bound_floor(self) -> int | None:
        if not self.has_l_bound:
            return None
        return max(self.ord2W1, exponent_bound_floor(self.p0))

    def admits(self, l: int) -> bool:
        """Whether an l-th power is compatible with every applicable restriction."""
        if self.has_l_bound and not (l <= self.ord2W1 or exponent_bound(self.p0)(l)):
            return False
        if self.allowed_l is not None and l not in self.allowed_l:
            return False
        return True

    def verdict(self) -> str:
        if self.thm13_applicable:
            if not self.allowed_l:
                return "no perfect powers possible (6 | W_1, ord_2(W_1) = 1)"
            return f"only l-th powers with l in {sorted(self.allowed_l)} possible"
        if self.has_l_bound:
            return f"l <= {self.l_bound_floor()} for any l-th power (p0 = {self.p0})"
        if self.thm11_applicable:
            return "finitely many perfect powers (no explicit bound on l)"
        return "finiteness criterion inapplicable (W_1 = 1); no restriction certified"

    def to_json(self) -> dict:
        return {
            "W1": str(self.W1),
            "ord2W1": self.ord2W1,
            "p0": None if self.p0 is None else str(self.p0),
            "thm11_applicable": self.thm11_applicable,
            "thm12_applicable": self.thm12_applicable,
            "thm13_applicable": self.thm13_applicable,
            "l_bound": self.l_bound_value(),
            "l_bound_floor": self.l_bound_floor(),
            "allowed_l": None if self.allowed_l is None else sorted(self.allowed_l),
            "verdict": self.verdict(),
            "reasons": self.reasons,
        }


def build_certificate(ctx: EdsContext) -> PowerCertificate:
    W1 = ctx.W(1)
    o2 = arith.ord(2, W1)
    reasons = {}

    thm11 = W1 > 1
    reasons["thm11"] = "W_1 > 1 (qualitative only)" if thm11 else "W_1 = 1"

    ns = ctx.nonsingular_above_3()
    bad = ctx.odd_primes_of_d_above_3()
    if ns is None:
        ns_text = "unknown: d not fully factored within budget"
    elif ns:
        ns_text = f"non-singular reduction at all primes > 3 (checked {bad or 'none dividing d'})"
    else:
        ns_text = "singular reduction at some prime > 3 dividing d"
    reasons["nonsingular"] = ns_text

    p0 = p0_candidate(ctx)
    reasons["p0"] = f"p0 = {p0}" if p0 else "no prime > 3 found in the primitive part of W_2"

    thm12 = W1 % 2 == 0 and ns is True
    reasons["thm12"] = ("W_1 even; " if W1 % 2 == 0 else "W_1 odd; ") + ns_text

    thm13 = False
    if W1 % 6:
        reasons["thm13"] = "6 does not divide W_1"
    elif ns is True:
        thm13 = True
        reasons["thm13"] = "6 | W_1 and " + ns_text
    else:
        tri = is_triple(ctx.weierstrass, ctx.generator_w, ctx.budget["trial_bound"], ctx.budget["rho_rounds"])
        thm13 = tri.status == "found"
        reasons["thm13"] = f"6 | W_1; {ns_text}; triple test: {tri.status} {tri.reason}".strip()

    allowed = None
    if thm13:
        allowed = frozenset(q for q, _ in arith.factor_with_effort(o2).factors) if o2 > 1 else frozenset()
    return PowerCertificate(W1, o2, p0, thm11, thm12, thm13, allowed, reasons)


def verify_scan_vs_certificate(hits, cert: PowerCertificate) -> LawReport:
    rep = LawReport("power_certificate")
    for h in hits:
        rep.checked += 1
        if not cert.admits(h.l):
            rep.violations.append({"m": h.m, "l": h.l, "problem": "exponent excluded by certificate"})
    return rep


# --- U^3 + V^3 = 15 W^(3l) ----------------------------------------------------


@dataclass
class CorollarySearch:
    l_max: int
    W_bound: int
    solutions: list = field(default_factory=list)
    unknown: list = field(default_factory=list)
    cells: int = 0

    def to_json(self) -> dict:
        return {
            "l_max": self.l_max,
            "W_bound": self.W_bound,
            "cells": self.cells,
            "solutions": [[str(v) for v in s] for s in self.solutions],
            "unknown": self.unknown,
        }


def cubic_sum_solutions(N: int, divisors) -> list[tuple[int, int]]:
    """All integer (U, V) with U^3 + V^3 = N > 0, given the divisors of N.

    With s = U + V: s | N, s > 0, s^3 <= 4N, and U, V are the roots of
    z^2 - s z + (s^2 - N/s)/3.
    """
    out = []
    for s in divisors:
        if s**3 > 4 * N:
            break
        q = N // s
        if (s * s - q) % 3:
            continue
        prod = (s * s - q) // 3
        disc = s * s - 4 * prod
        if disc < 0 or not arith.is_square(disc):
            continue
        r = math.isqrt(disc)
        if (s + r) % 2:
            continue
        out.append(((s + r) // 2, (s - r) // 2))
        if r:
            out.append(((s - r) // 2, (s + r) // 2))
    return out


def corollary15_search(l_max: int, W_bound: int, **budget) -> CorollarySearch:
    """Search U^3 + V^3 = 15 W^(3l), gcd(U, V, W) = 1, 1 <= W <= W_bound, 2 <= l <= l_max."""
    if l_max < 2 or W_bound < 1:
        raise ValueError("need l_max >= 2 and W_bound >= 1")
    res = CorollarySearch(l_max, W_bound)
    for W in range(1, W_bound + 1):
        for l in range(2, l_max + 1):
            res.cells += 1
            N = 15 * W ** (3 * l)
            fac = arith.factor_with_effort(N, **budget)
            if not fac.complete:
                res.unknown.append({"W": W, "l": l, "cofactor": str(fac.cofactor)})
                continue
            for U, V in cubic_sum_solutions(N, fac.divisors()):
                if math.gcd(math.gcd(U, V), W) == 1:
                    res.solutions.append((U, V, W, l))
    return res
