"""Exact arithmetic on u^3 + v^3 = d and its Weierstrass model y^2 = x^3 - 432 d^2.

The group law lives on the Weierstrass side only.  Points on the cubic are
moved across with ``to_weierstrass``/``from_weierstrass``
(x = 12d/(u+v), y = 36d(u-v)/(u+v) and back), which is how addition on the
cubic is obtained as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath

from . import arith

TORSION_BOUND = 12


class NotOnCurveError(ValueError):
    pass


def _frac(value) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


@dataclass(frozen=True)
class CubicCurve:
    """The curve u^3 + v^3 = d for a nonzero cube-free integer d.

    Cube-freeness is checked with budgeted factoring.  If an unsplit cofactor
    remains that could still hide a cube, ``cube_free_verified`` is False.
    """

    d: int
    trial_bound: int = arith.DEFAULT_TRIAL_BOUND
    rho_rounds: int = arith.DEFAULT_RHO_ROUNDS

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d == 0:
            raise ValueError("d must be a nonzero integer")
        if abs(self.d) > 1:
            fac = arith.factor_with_effort(abs(self.d), self.trial_bound, self.rho_rounds)
            cubes = [p for p, e in fac.factors if e >= 3]
            if cubes:
                raise ValueError(f"d = {self.d} is not cube-free (divisible by {cubes[0]}^3)")
            object.__setattr__(self, "_factorization", fac)

    @property
    def factorization(self) -> arith.Factorization | None:
        return getattr(self, "_factorization", None)

    @property
    def cube_free_verified(self) -> bool:
        fac = self.factorization
        return fac is None or fac.complete or fac.cofactor < self.trial_bound**3

    def contains(self, P: CubicPoint) -> bool:
        return P.is_identity or P.u**3 + P.v**3 == self.d

    def weierstrass(self) -> WeierstrassCurve:
        return WeierstrassCurve(self.d)


@dataclass(frozen=True)
class CubicPoint:
    """Affine point (u, v) or, with both fields None, the identity [1, -1, 0]."""

    u: Fraction | None = None
    v: Fraction | None = None

    def __post_init__(self):
        if (self.u is None) != (self.v is None):
            raise ValueError("both coordinates or neither")
        if self.u is not None:
            object.__setattr__(self, "u", _frac(self.u))
            object.__setattr__(self, "v", _frac(self.v))

    @classmethod
    def identity(cls) -> CubicPoint:
        return cls()

    @property
    def is_identity(self) -> bool:
        return self.u is None

    def __neg__(self) -> CubicPoint:
        # reflection in the line u = v
        return self if self.is_identity else CubicPoint(self.v, self.u)

    def __repr__(self):
        return "CubicPoint(O)" if self.is_identity else f"CubicPoint({self.u}, {self.v})"


@dataclass(frozen=True)
class WeierstrassCurve:
    d: int

    @property
    def b_coeff(self) -> int:
        return -432 * self.d * self.d

    def contains(self, Q: WeierstrassPoint) -> bool:
        return Q.is_identity or Q.y * Q.y == Q.x**3 + self.b_coeff

    def check(self, Q: WeierstrassPoint) -> None:
        if not self.contains(Q):
            raise NotOnCurveError(f"{Q} is not on y^2 = x^3 - {-self.b_coeff}")

    def add(self, P: WeierstrassPoint, Q: WeierstrassPoint) -> WeierstrassPoint:
        if P.is_identity:
            return Q
        if Q.is_identity:
            return P
        if P.x == Q.x:
            if P.y == -Q.y:
                return WeierstrassPoint()
            lam = 3 * P.x * P.x / (2 * P.y)
        else:
            lam = (Q.y - P.y) / (Q.x - P.x)
        x3 = lam * lam - P.x - Q.x
        return WeierstrassPoint(x3, lam * (P.x - x3) - P.y)

    def multiply(self, n: int, Q: WeierstrassPoint) -> WeierstrassPoint:
        return multiply(self, n, Q)


@dataclass(frozen=True)
class WeierstrassPoint:
    """Affine point (x, y) on y^2 = x^3 - 432 d^2, or the identity.

    Affine points also expose x = A/B^2, y = C/B^3 in lowest terms.
    """

    x: Fraction | None = None
    y: Fraction | None = None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise ValueError("both coordinates or neither")
        if self.x is not None:
            object.__setattr__(self, "x", _frac(self.x))
            object.__setattr__(self, "y", _frac(self.y))

    @classmethod
    def identity(cls) -> WeierstrassPoint:
        return cls()

    @classmethod
    def from_abc(cls, A: int, B: int, C: int) -> WeierstrassPoint:
        return cls(Fraction(A, B * B), Fraction(C, B**3))

    @property
    def is_identity(self) -> bool:
        return self.x is None

    @property
    def B(self) -> int:
        b, exact = arith.iroot(self.x.denominator, 2)
        if not exact:
            raise ValueError(f"denominator of x = {self.x} is not a square")
        return b

    @property
    def A(self) -> int:
        return self.x.numerator

    @property
    def C(self) -> int:
        c = self.y * self.B**3
        if c.denominator != 1:
            raise ValueError(f"y = {self.y} has denominator other than B^3")
        return c.numerator

    def abc(self) -> tuple[int, int, int]:
        return self.A, self.B, self.C

    def __neg__(self) -> WeierstrassPoint:
        return self if self.is_identity else WeierstrassPoint(self.x, -self.y)

    def __repr__(self):
        return "WeierstrassPoint(O)" if self.is_identity else f"WeierstrassPoint({self.x}, {self.y})"


Point = Union[CubicPoint, WeierstrassPoint]


def to_weierstrass(C: CubicCurve, P: CubicPoint) -> WeierstrassPoint:
    if not C.contains(P):
        raise NotOnCurveError(f"{P} is not on u^3 + v^3 = {C.d}")
    if P.is_identity:
        return WeierstrassPoint()
    s = P.u + P.v
    return WeierstrassPoint(12 * C.d / s, 36 * C.d * (P.u - P.v) / s)


def from_weierstrass(W: WeierstrassCurve, Q: WeierstrassPoint) -> CubicPoint:
    W.check(Q)
    if Q.is_identity:
        return CubicPoint()
    return CubicPoint((36 * W.d + Q.y) / (6 * Q.x), (36 * W.d - Q.y) / (6 * Q.x))


def multiply(W: WeierstrassCurve, n: int, Q: WeierstrassPoint) -> WeierstrassPoint:
    """n*Q by double-and-add; negative n goes through y -> -y."""
    W.check(Q)
    if n < 0:
        return multiply(W, -n, -Q)
    result = WeierstrassPoint()
    addend = Q
    while n:
        if n & 1:
            result = W.add(result, addend)
        n >>= 1
        if n:
            addend = W.add(addend, addend)
    return result


def add_cubic(C: CubicCurve, P1: CubicPoint, P2: CubicPoint) -> CubicPoint:
    W = C.weierstrass()
    return from_weierstrass(W, W.add(to_weierstrass(C, P1), to_weierstrass(C, P2)))


def multiply_cubic(C: CubicCurve, n: int, P: CubicPoint) -> CubicPoint:
    W = C.weierstrass()
    return from_weierstrass(W, multiply(W, n, to_weierstrass(C, P)))


def duplication_identity_check(A1: int, B1: int, C1: int, d: int) -> tuple[int, int]:
    """(A, B) of x(2Q) = A/B^2 from the closed duplication formula.

    x(2Q) = A'(A'^3 + 8*432 d^2 B'^6) / (4 B'^2 C'^2) for Q = (A'/B'^2, C'/B'^3).
    """
    k = 432 * d * d
    if B1 < 1 or math.gcd(A1, B1) != 1:
        raise ValueError("need B' >= 1 and gcd(A', B') = 1")
    if C1 * C1 != A1**3 - k * B1**6:
        raise NotOnCurveError("C'^2 != A'^3 - 432 d^2 B'^6")
    if C1 == 0:
        raise ValueError("point of order 2 doubles to the identity")
    x2 = Fraction(A1 * (A1**3 + 8 * k * B1**6), 4 * B1 * B1 * C1 * C1)
    B, exact = arith.iroot(x2.denominator, 2)
    if not exact:
        raise ArithmeticError("duplication produced a non-square denominator")
    return x2.numerator, B


def nonsingular_reduction_at(W: WeierstrassCurve, Q: WeierstrassPoint, p: int) -> bool:
    """Whether Q reduces to a non-singular point of Y^2 Z = X^3 - 432 d^2 Z^3 mod p."""
    if p <= 3 or not arith.is_probable_prime(p):
        raise ValueError("p must be a prime > 3")
    W.check(Q)
    if Q.is_identity:
        X, Y, Z = 0, 1, 0
    else:
        A, B, C = Q.abc()
        X, Y, Z = A * B, C, B**3
        g = math.gcd(math.gcd(X, Y), Z)
        X, Y, Z = X // g, Y // g, Z // g
    dX = -3 * X * X
    dY = 2 * Y * Z
    dZ = Y * Y + 2**4 * 3**4 * W.d**2 * Z * Z
    return any(v % p for v in (dX, dY, dZ))


def is_torsion(W: WeierstrassCurve, Q: WeierstrassPoint) -> bool:
    W.check(Q)
    R = Q
    for _ in range(TORSION_BOUND):
        if R.is_identity:
            return True
        R = W.add(R, Q)
    return False


def point_count_mod_p(W: WeierstrassCurve, p: int) -> int:
    """a_p = p + 1 - #E(F_p) for a prime p not dividing 6d."""
    if not arith.is_probable_prime(p) or (6 * W.d) % p == 0:
        raise ValueError(f"{p} is not a prime of good reduction")
    b = W.b_coeff % p
    half = (p - 1) // 2
    total = 0
    for x in range(p):
        r = (x * x * x + b) % p
        if r:
            total += 1 if pow(r, half, p) == 1 else -1
    return -total


# --- triples ----------------------------------------------------------------


def _poly_mul(f, g):
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, c in enumerate(g):
            out[i + j] += a * c
    return out


def _poly_sub(f, g):
    n = max(len(f), len(g))
    f, g = f + [0] * (n - len(f)), g + [0] * (n - len(g))
    return [a - c for a, c in zip(f, g)]


def triplication_polynomials(b: int) -> tuple[list[int], list[int]]:
    """(phi3, psi3) for y^2 = x^3 + b, low degree first; x(3R) = phi3/psi3^2."""
    psi3 = [0, 12 * b, 0, 0, 3]
    psi3_sq = _poly_mul(psi3, psi3)
    # psi2*psi4 = 8 (x^3 + b)(x^6 + 20 b x^3 - 8 b^2)
    psi2psi4 = [8 * c for c in _poly_mul([b, 0, 0, 1], [-8 * b * b, 0, 0, 20 * b, 0, 0, 1])]
    phi3 = _poly_sub([0] + psi3_sq, psi2psi4)
    return phi3, psi3


@dataclass(frozen=True)
class TripleResult:
    status: str  # "found", "not_triple" or "unknown"
    root: WeierstrassPoint | None = None
    reason: str = ""


def _eval(coeffs, num, den):
    """den^deg * f(num/den) as an exact integer."""
    deg = len(coeffs) - 1
    return sum(c * num**i * den ** (deg - i) for i, c in enumerate(coeffs))


MAX_DENOMINATORS = 4096


def is_triple(
    W: WeierstrassCurve,
    Q: WeierstrassPoint,
    trial_bound: int = arith.DEFAULT_TRIAL_BOUND,
    rho_rounds: int = arith.DEFAULT_RHO_ROUNDS,
) -> TripleResult:
    """Decide whether Q = 3R for a rational point R.

    Clears denominators in x(3R) = x(Q) to get a degree-9 integer polynomial
    in x(R) with leading coefficient B^2.  Rational roots r/t^2 have t | B, so
    the divisors of B (from budgeted factoring) give every admissible
    denominator; numerators are read off high-precision real roots and then
    confirmed exactly, together with 3R = Q for both signs of y(R).
    """
    if Q.is_identity:
        raise ValueError("is_triple needs an affine point")
    W.check(Q)
    A, B, _ = Q.abc()
    phi3, psi3 = triplication_polynomials(W.b_coeff)
    poly = _poly_sub([B * B * c for c in phi3], [A * c for c in _poly_mul(psi3, psi3)])
    while poly and poly[-1] == 0:
        poly.pop()

    fac = arith.factor_with_effort(B, trial_bound, rho_rounds) if B > 1 else None
    factored = fac is None or fac.complete
    n_div = math.prod(e + 1 for _, e in fac.factors) if fac is not None else 1
    complete = factored and n_div <= MAX_DENOMINATORS
    denominators = ([1] if fac is None else fac.divisors()) if complete else [1]

    digits = max(len(str(abs(c))) for c in poly)
    with mpmath.workdps(2 * digits + 40):
        try:
            roots = mpmath.polyroots(
                [mpmath.mpf(c) for c in reversed(poly)], maxsteps=400, extraprec=4 * digits + 100
            )
        except mpmath.libmp.NoConvergence:
            return TripleResult("unknown", reason="real root isolation did not converge")
        tol = mpmath.mpf(10) ** (-(digits // 2 + 10))
        real_roots = [mpmath.re(r) for r in roots if abs(mpmath.im(r)) < tol * (1 + abs(r))]
        candidates = set()
        for rho in real_roots:
            for t in denominators:
                nearest = int(mpmath.nint(rho * t * t))
                candidates.update((nearest + k, t) for k in (-1, 0, 1))
            if not complete:
                # best approximation with denominator <= B^2, verified exactly below
                approx = Fraction(mpmath.nstr(rho, 2 * digits + 30)).limit_denominator(B * B)
                candidates.add((approx.numerator, arith.iroot(approx.denominator, 2)[0]))

    for r, t in sorted(candidates):
        if math.gcd(r, t) != 1 or _eval(poly, r, t * t) != 0:
            continue
        x = Fraction(r, t * t)
        y2 = x**3 + W.b_coeff
        if y2 < 0 or not (arith.is_square(y2.numerator) and arith.is_square(y2.denominator)):
            continue
        y = Fraction(math.isqrt(y2.numerator), math.isqrt(y2.denominator))
        for R in (WeierstrassPoint(x, y), WeierstrassPoint(x, -y)):
            if multiply(W, 3, R) == Q:
                return TripleResult("found", R)
    if complete:
        return TripleResult("not_triple")
    if not factored:
        return TripleResult("unknown", reason=f"could not factor B = {B}; cofactor {fac.cofactor}")
    return TripleResult("unknown", reason=f"B has {n_div} divisors; enumeration skipped")


# --- serialization ----------------------------------------------------------


def _fstr(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def point_to_json(P: Point) -> dict:
    if P.is_identity:
        return {"identity": True}
    if isinstance(P, CubicPoint):
        return {"u": _fstr(P.u), "v": _fstr(P.v)}
    return {"x": _fstr(P.x), "y": _fstr(P.y)}


def point_from_json(obj: dict, model: str = "cubic") -> Point:
    cls = CubicPoint if model == "cubic" else WeierstrassPoint
    if obj.get("identity"):
        return cls()
    if "u" in obj:
        return CubicPoint(Fraction(obj["u"]), Fraction(obj["v"]))
    return WeierstrassPoint(Fraction(obj["x"]), Fraction(obj["y"]))


def parse_cubic_point(text: str) -> CubicPoint:
    """Parse "num/den,num/den" (whitespace ignored, reduced on input)."""
    parts = "".join(text.split()).split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'u,v', got {text!r}")
    return CubicPoint(Fraction(parts[0]), Fraction(parts[1]))
