"""The divisibility sequence W_m of denominators of mP, and checks of its laws.

Each term keeps both coordinate systems in lowest terms:

    mP = (U/W, V/W) on u^3 + v^3 = d,
    mP = (A/B^2, C/B^3) on y^2 = x^3 - 432 d^2.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
import threading
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import arith
from .curves import (
    CubicCurve,
    CubicPoint,
    WeierstrassCurve,
    WeierstrassPoint,
    from_weierstrass,
    is_torsion,
    multiply,
    nonsingular_reduction_at,
    point_from_json,
    point_to_json,
    to_weierstrass,
)

CACHE_SCHEMA = 1


class InconsistencyError(RuntimeError):
    """Computed data contradicts a law that must hold (bug or bad input)."""


@dataclass(frozen=True)
class EdsTerm:
    m: int
    U: int
    V: int
    W: int
    A: int
    B: int
    C: int

    def to_json(self) -> dict:
        out = {"m": self.m}
        out.update({k: str(getattr(self, k)) for k in "UVWABC"})
        return out

    @classmethod
    def from_json(cls, rec: dict) -> EdsTerm:
        return cls(int(rec["m"]), *(int(rec[k]) for k in "UVWABC"))

    @property
    def weierstrass_point(self) -> WeierstrassPoint:
        return WeierstrassPoint.from_abc(self.A, self.B, self.C)

    @property
    def cubic_point(self) -> CubicPoint:
        return CubicPoint(Fraction(self.U, self.W), Fraction(self.V, self.W))


def term_from_point(m: int, d: int, Q: WeierstrassPoint) -> EdsTerm:
    if Q.is_identity:
        raise InconsistencyError(f"{m}P is the identity; the generator is torsion")
    P = from_weierstrass(WeierstrassCurve(d), Q)
    W = math.lcm(P.u.denominator, P.v.denominator)
    A, B, C = Q.abc()
    return EdsTerm(m, int(P.u * W), int(P.v * W), W, A, B, C)


class EdsContext:
    """A cube-free d, a non-torsion point P on u^3 + v^3 = d, and memoized terms.

    Terms are computed independently by multiplying P from scratch, so the
    memo only saves time and never changes a result.  Writes to the memo are
    serialized by a lock.
    """

    def __init__(
        self,
        d: int,
        point: CubicPoint,
        trial_bound: int = arith.DEFAULT_TRIAL_BOUND,
        rho_rounds: int = arith.DEFAULT_RHO_ROUNDS,
        seed: int = 0,
    ):
        self.curve = CubicCurve(d, trial_bound, rho_rounds)
        self.weierstrass = self.curve.weierstrass()
        if point.is_identity:
            raise ValueError("the generator must be an affine point")
        self.generator = point
        self.generator_w = to_weierstrass(self.curve, point)
        if is_torsion(self.weierstrass, self.generator_w):
            raise ValueError(f"{point} is a torsion point")
        self.budget = {"trial_bound": trial_bound, "rho_rounds": rho_rounds, "seed": seed}
        self.memo: dict[int, EdsTerm] = {}
        self._lock = threading.Lock()

    @property
    def d(self) -> int:
        return self.curve.d

    def term(self, m: int) -> EdsTerm:
        if m < 1:
            raise ValueError("m must be >= 1")
        cached = self.memo.get(m)
        if cached is not None:
            return cached
        t = self.term_fresh(m)
        with self._lock:
            return self.memo.setdefault(m, t)

    def term_fresh(self, m: int) -> EdsTerm:
        """m*P recomputed, bypassing the memo."""
        return term_from_point(m, self.d, multiply(self.weierstrass, m, self.generator_w))

    def terms(self, M: int) -> list[EdsTerm]:
        return [self.term(m) for m in range(1, M + 1)]

    def W(self, m: int) -> int:
        return self.term(m).W

    def adopt(self, terms) -> None:
        """Load externally supplied terms (e.g. from a cache) into the memo as-is."""
        with self._lock:
            for t in terms:
                self.memo[t.m] = t

    def odd_primes_of_d_above_3(self) -> list[int] | None:
        """Primes > 3 dividing d, or None if d could not be fully factored."""
        fac = self.curve.factorization
        if fac is None:
            return []
        if not fac.complete:
            return None
        return [p for p in fac.primes() if p > 3]

    def nonsingular_above_3(self) -> bool | None:
        """Non-singular reduction of P at every prime > 3 (None when undecidable).

        Only primes dividing d can go wrong: the discriminant is -2^12 3^9 d^4.
        """
        primes = self.odd_primes_of_d_above_3()
        if primes is None:
            return None
        return all(nonsingular_reduction_at(self.weierstrass, self.generator_w, p) for p in primes)


# --- reports ----------------------------------------------------------------


@dataclass
class LawReport:
    law: str
    checked: int = 0
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    details: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.law}: {self.checked} checked, {len(self.violations)} violations"

    def to_json(self) -> dict:
        return {
            "law": self.law,
            "passed": self.passed,
            "checked": self.checked,
            "violations": self.violations,
            "notes": self.notes,
            "details": self.details,
        }


def strong_divisibility_report(ctx: EdsContext, M: int) -> LawReport:
    """gcd(W_m, W_n) = W_gcd(m, n) for 1 <= n < m <= M."""
    if M < 2:
        raise ValueError("M must be >= 2")
    rep = LawReport("strong_divisibility")
    for m in range(2, M + 1):
        for n in range(1, m):
            rep.checked += 1
            g = math.gcd(m, n)
            lhs = math.gcd(ctx.W(m), ctx.W(n))
            if lhs != ctx.W(g):
                rep.violations.append({"m": m, "n": n, "gcd_W": str(lhs), "W_gcd": str(ctx.W(g))})
    return rep


def valuation_report(ctx: EdsContext, p: int, M: int) -> LawReport:
    """ord_p(W_mn) = ord_p(W_n) + ord_p(m) whenever p | W_n and mn <= M."""
    rep = LawReport(f"valuation_p{p}")
    for n in range(1, M + 1):
        base = arith.ord(p, ctx.W(n))
        if base == 0:
            continue
        for m in range(1, M // n + 1):
            rep.checked += 1
            got = arith.ord(p, ctx.W(m * n))
            want = base + arith.ord(p, m)
            if got != want:
                rep.violations.append({"p": p, "n": n, "m": m, "ord_W_mn": got, "expected": want})
    if not rep.checked:
        rep.notes.append(f"p = {p} divides no W_n with n <= {M}; vacuous")
    return rep


def primitive_part(ctx: EdsContext, m: int) -> int:
    # By strong divisibility, a prime dividing W_m and some earlier W_k also
    # divides W_gcd(m, k), and gcd(m, k) is a proper divisor of m.  So only
    # proper divisors of m need to be stripped.
    part = ctx.W(m)
    earlier = math.prod(ctx.W(k) for k in range(1, m) if m % k == 0)
    g = math.gcd(part, earlier)
    while g > 1:
        part //= g
        g = math.gcd(part, g)
    return part


def primitive_report(ctx: EdsContext, M: int) -> LawReport:
    """Primitive part of W_m for 2 <= m <= M; every one must exceed 1.

    details holds (m, primitive_part, p0_candidate); p0_candidate is only
    looked for at m = 2 and is None when no prime > 3 turned up.
    """
    if M < 2:
        raise ValueError("M must be >= 2")
    rep = LawReport("primitive_divisor")
    for m in range(2, M + 1):
        rep.checked += 1
        part = primitive_part(ctx, m)
        p0 = None
        if m == 2:
            p0 = p0_candidate(ctx, part)
        rep.details.append((m, part, p0))
        if part <= 1:
            rep.violations.append({"m": m, "primitive_part": str(part)})
    return rep


def p0_candidate(ctx: EdsContext, part: int | None = None) -> int | None:
    if part is None:
        part = primitive_part(ctx, 2)
    budget = {k: ctx.budget[k] for k in ("trial_bound", "rho_rounds", "seed")}
    return arith.smallest_prime_factor_above(part, 3, **budget)


def structural_identities_report(ctx: EdsContext, M: int) -> LawReport:
    """Per-term identities linking the two models.

    (i)   for p in {2, 3}: p | W_m iff p does not divide A_m
    (ii)  C_m^2 = A_m^3 - 432 d^2 B_m^6
    (iii) U/W = (36 d B^3 + C)/(6AB) and V/W = (36 d B^3 - C)/(6AB)
    (iv)  gcd(A_m^3, C_m^2) | 3^(3 + 2 ord_3(d)) when W_1 is even and P has
          non-singular reduction at all primes > 3
    """
    d = ctx.d
    rep = LawReport("structural_identities")
    hyp = ctx.W(1) % 2 == 0 and ctx.nonsingular_above_3()
    if not hyp:
        rep.notes.append("gcd(A^3, C^2) bound skipped: needs W_1 even and non-singular reduction above 3")
    bound3 = 3 ** (3 + 2 * arith.ord(3, d))
    for m in range(1, M + 1):
        t = ctx.term(m)
        rep.checked += 1
        for p in (2, 3):
            if (t.W % p == 0) == (t.A % p == 0):
                rep.violations.append({"m": m, "identity": f"p={p} divides W_m iff not A_m"})
        if t.C * t.C != t.A**3 - 432 * d * d * t.B**6:
            rep.violations.append({"m": m, "identity": "weierstrass_equation"})
        den = 6 * t.A * t.B
        if (
            den == 0
            or Fraction(36 * d * t.B**3 + t.C, den) != Fraction(t.U, t.W)
            or Fraction(36 * d * t.B**3 - t.C, den) != Fraction(t.V, t.W)
        ):
            rep.violations.append({"m": m, "identity": "uv_reconstruction"})
        if hyp and bound3 % math.gcd(t.A**3, t.C**2):
            rep.violations.append({"m": m, "identity": "gcd(A^3, C^2) | 3^(3+2 ord_3 d)"})
    return rep


def growth_ratios(ctx: EdsContext, ms=range(8, 16)) -> dict[int, float]:
    """log W_2m / log W_m; about 4 for quadratic digit growth.  Warns only."""
    out = {}
    for m in ms:
        lo, hi = ctx.W(m), ctx.W(2 * m)
        if lo < 2:
            continue
        r = math.log(hi) / math.log(lo)
        out[m] = r
        if not 3 <= r <= 5:
            warnings.warn(f"log W_{2 * m} / log W_{m} = {r:.3f} outside [3, 5]", stacklevel=2)
    return out


# --- term validation and the cache file -------------------------------------


def validate_term(ctx: EdsContext, t: EdsTerm) -> list[str]:
    """Names of the invariants a (possibly foreign) term violates."""
    d = ctx.d
    bad = []
    if t.m < 1:
        return ["index_positive"]
    if t.U**3 + t.V**3 != d * t.W**3:
        bad.append("cubic_equation")
    if t.W < 1 or math.gcd(math.gcd(t.U, t.V), t.W) != 1:
        bad.append("cubic_lowest_terms")
    if t.C * t.C != t.A**3 - 432 * d * d * t.B**6:
        bad.append("weierstrass_equation")
    if t.B < 1 or math.gcd(t.A, t.B) != 1 or math.gcd(t.C, t.B) != 1:
        bad.append("weierstrass_lowest_terms")
    den = 6 * t.A * t.B
    if den == 0 or t.W == 0 or (
        Fraction(36 * d * t.B**3 + t.C, den) != Fraction(t.U, t.W)
        or Fraction(36 * d * t.B**3 - t.C, den) != Fraction(t.V, t.W)
    ):
        bad.append("cross_model_consistency")
    if not bad and ctx.term_fresh(t.m) != t:
        bad.append("multiple_of_generator")
    return bad


def write_cache(ctx: EdsContext, path, M: int) -> None:
    """Write header + terms 1..M atomically (temp file, then rename)."""
    path = Path(path)
    lines = [json.dumps({"schema": CACHE_SCHEMA, "d": str(ctx.d), "P": point_to_json(ctx.generator)})]
    lines += [json.dumps(ctx.term(m).to_json()) for m in range(1, M + 1)]
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".", suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


@dataclass
class CacheContents:
    d: int
    point: CubicPoint
    terms: list[EdsTerm]


def read_cache(path) -> CacheContents:
    with open(path) as fh:
        rows = [json.loads(line) for line in fh if line.strip()]
    if not rows or "d" not in rows[0]:
        raise ValueError(f"{path}: missing header record")
    head = rows[0]
    return CacheContents(int(head["d"]), point_from_json(head["P"]), [EdsTerm.from_json(r) for r in rows[1:]])


def load_cache_into(ctx: EdsContext, path) -> list[dict]:
    """Validate every cached term; adopt them all, return the violations.

    A header for a different (d, P) is itself a violation and nothing is
    adopted.
    """
    contents = read_cache(path)
    if contents.d != ctx.d or contents.point != ctx.generator:
        return [{"m": None, "law": "cache_header_mismatch"}]
    problems = []
    seen = set()
    for t in contents.terms:
        if t.m in seen:
            problems.append({"m": t.m, "law": "duplicate_index"})
        seen.add(t.m)
        problems += [{"m": t.m, "law": law} for law in validate_term(ctx, t)]
    ctx.adopt(contents.terms)
    return problems
